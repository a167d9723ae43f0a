"""Algebraic connectivity of small graphs via the shipped eigensolver."""

from __future__ import annotations

import numpy as np

from .kernels import eigvalsh_small


def algebraic_connectivity(num_nodes: int, edges) -> float:
    """Second-smallest Laplacian eigenvalue of an undirected simple graph.

    `edges` is an iterable of (i, j) index pairs over range(num_nodes);
    duplicates and self-loops are ignored. Returns 0.0 for graphs with fewer
    than two nodes and for disconnected graphs (lambda_2 zero up to noise).
    """
    if num_nodes < 2:
        return 0.0
    adj = np.zeros((num_nodes, num_nodes))
    for i, j in edges:
        if i != j:
            adj[i, j] = 1.0
            adj[j, i] = 1.0
    lap = np.diag(adj.sum(axis=1)) - adj
    vals = eigvalsh_small(lap)
    lam2 = float(vals[1])
    return lam2 if lam2 > 1e-9 else 0.0
