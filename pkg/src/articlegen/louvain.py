"""Louvain community detection on small weighted graphs.

Greedy modularity maximization with a resolution parameter: repeated
local moving of nodes into the neighboring community with the best gain,
then aggregation of communities into supernodes, until no move improves
modularity. Node visit order is shuffled with a seeded generator, and
all tie-breaks are by smallest community id, so a fixed seed gives a
byte-identical result on every run.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .errors import DataError

Edge = tuple[int, int, float]


def _validate_edges(n_nodes: int, edges: Iterable[Edge]) -> list[Edge]:
    clean: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for u, v, w in edges:
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise DataError(f"edge ({u}, {v}) out of node range [0, {n_nodes})")
        if u == v:
            raise DataError(f"self-edge on node {u} not allowed")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DataError(f"duplicate edge ({key[0]}, {key[1]})")
        seen.add(key)
        if not w > 0.0:
            raise DataError(f"edge ({u}, {v}) must have positive weight, got {w}")
        clean.append((u, v, float(w)))
    return clean


def modularity(
    n_nodes: int,
    edges: Iterable[Edge],
    communities: Sequence[int],
    gamma: float = 1.0,
) -> float:
    """Resolution-scaled modularity of a node-to-community assignment.

    Q = sum over communities of [L_c / m - gamma * (D_c / 2m)^2], where
    L_c is the intra-community edge weight, D_c the total weighted degree
    of the community, and m the total edge weight. Edgeless graph -> 0.
    """
    if len(communities) != n_nodes:
        raise DataError(
            f"assignment covers {len(communities)} nodes, expected {n_nodes}"
        )
    clean = _validate_edges(n_nodes, edges)
    m = sum(w for _, _, w in clean)
    if m == 0.0:
        return 0.0
    intra: dict[int, float] = {}
    degree: dict[int, float] = {}
    for u, v, w in clean:
        cu, cv = communities[u], communities[v]
        degree[cu] = degree.get(cu, 0.0) + w
        degree[cv] = degree.get(cv, 0.0) + w
        if cu == cv:
            intra[cu] = intra.get(cu, 0.0) + w
    q = 0.0
    for c in degree:
        q += intra.get(c, 0.0) / m - gamma * (degree[c] / (2.0 * m)) ** 2
    return q


def _local_move(
    adj: dict[int, dict[int, float]],
    gamma: float,
    rng: random.Random,
) -> tuple[dict[int, int], bool]:
    """One level of local moving. Returns (community per node, any move made).

    Degrees include self-loop weight (stored pre-doubled by aggregation),
    so 2m is invariant across levels.
    """
    nodes = sorted(adj)
    k = {v: sum(adj[v].values()) for v in nodes}
    m2 = sum(k.values())
    comm = {v: v for v in nodes}
    tot = {v: k[v] for v in nodes}
    improved = False
    moved = True
    while moved:
        moved = False
        order = nodes[:]
        rng.shuffle(order)
        for v in order:
            cv = comm[v]
            weight_to: dict[int, float] = {}
            for u, w in adj[v].items():
                if u != v:
                    weight_to[comm[u]] = weight_to.get(comm[u], 0.0) + w
            tot[cv] -= k[v]
            stay = weight_to.get(cv, 0.0) - gamma * tot[cv] * k[v] / m2
            best_c = cv
            best_score = stay
            for c in sorted(weight_to):
                if c == cv:
                    continue
                score = weight_to[c] - gamma * tot[c] * k[v] / m2
                if score > best_score:
                    best_score = score
                    best_c = c
            tot[best_c] += k[v]
            if best_c != cv:
                comm[v] = best_c
                moved = True
                improved = True
    return comm, improved


def _aggregate(
    adj: dict[int, dict[int, float]],
    comm: dict[int, int],
) -> tuple[dict[int, dict[int, float]], dict[int, int]]:
    """Collapse communities into supernodes; intra weight becomes a self-loop."""
    labels = sorted(set(comm.values()))
    index = {c: i for i, c in enumerate(labels)}
    new_adj: dict[int, dict[int, float]] = {i: {} for i in range(len(labels))}
    for u, nbrs in adj.items():
        cu = index[comm[u]]
        row = new_adj[cu]
        for v, w in nbrs.items():
            cv = index[comm[v]]
            row[cv] = row.get(cv, 0.0) + w
    return new_adj, index


def louvain_communities(
    n_nodes: int,
    edges: Iterable[Edge],
    gamma: float = 1.0,
    seed: int = 11,
) -> list[int]:
    """Community index per node; indices are dense and numbered by each
    community's smallest member node. Isolated nodes end up alone."""
    if n_nodes < 0:
        raise DataError(f"node count must be >= 0, got {n_nodes}")
    if gamma <= 0.0:
        raise DataError(f"resolution must be > 0, got {gamma}")
    clean = _validate_edges(n_nodes, edges)
    if n_nodes == 0:
        return []
    if not clean:
        return list(range(n_nodes))

    rng = random.Random(seed)
    adj: dict[int, dict[int, float]] = {v: {} for v in range(n_nodes)}
    for u, v, w in clean:
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w
    # Original node -> current supernode.
    mapping = {v: v for v in range(n_nodes)}
    while True:
        comm, improved = _local_move(adj, gamma, rng)
        if not improved:
            break
        adj, index = _aggregate(adj, comm)
        mapping = {orig: index[comm[sup]] for orig, sup in mapping.items()}

    groups: dict[int, list[int]] = {}
    for orig, sup in mapping.items():
        groups.setdefault(sup, []).append(orig)
    out = [0] * n_nodes
    for i, group in enumerate(sorted(groups.values(), key=min)):
        for v in group:
            out[v] = i
    return out
