"""Kernel-level betweenness tests: brute-force oracle and backend parity."""

from __future__ import annotations

import random

import numpy as np
import pytest

from teamnet import kernels

from oracles import brute_betweenness


def random_edge_set(rng: random.Random, n: int) -> set[tuple[int, int]]:
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.4:
                edges.add((u, v))
    return edges


def undirected_csr(n: int, edges: set[tuple[int, int]]):
    pairs = set()
    for u, v in edges:
        pairs.add((u, v))
        pairs.add((v, u))
    return kernels.csr_adjacency(n, pairs)


def kernel_pair_once(n: int, edges: set[tuple[int, int]]) -> np.ndarray:
    indptr, indices = undirected_csr(n, edges)
    counts = kernels.betweenness_counts(n, indptr, indices, indptr, indices)
    return counts / 2.0  # ordered pairs -> unordered


def test_path_graph():
    # A-B-C: only the middle node carries shortest paths.
    got = kernel_pair_once(3, {(0, 1), (1, 2)})
    assert got.tolist() == [0.0, 1.0, 0.0]


def test_star_graph():
    # Center of a 5-node star lies on every leaf-pair path: C(4,2) = 6.
    edges = {(0, i) for i in range(1, 5)}
    got = kernel_pair_once(5, edges)
    assert got[0] == 6.0
    assert got[1:].tolist() == [0.0, 0.0, 0.0, 0.0]


def test_disconnected_pairs_contribute_zero():
    # Two components: no cross-component pair adds anything.
    got = kernel_pair_once(5, {(0, 1), (1, 2), (3, 4)})
    assert got.tolist() == [0.0, 1.0, 0.0, 0.0, 0.0]


def test_matches_exhaustive_enumeration_on_random_graphs():
    rng = random.Random(1234)
    checked = 0
    for _ in range(120):
        n = 2 + int(rng.random() * 6)  # 2..7 nodes
        edges = random_edge_set(rng, n)
        exact = brute_betweenness(n, edges)
        got = kernel_pair_once(n, edges)
        for v in range(n):
            assert got[v] == pytest.approx(float(exact[v]), abs=1e-12)
        checked += 1
    assert checked == 120


def test_backends_agree_exactly():
    impls = kernels.backends()
    if "compiled" not in impls:
        pytest.skip("compiled kernel not built")
    rng = random.Random(99)
    for _ in range(40):
        n = 3 + int(rng.random() * 20)
        edges = random_edge_set(rng, n)
        indptr, indices = undirected_csr(n, edges)
        a = impls["compiled"].betweenness_counts(n, indptr, indices, indptr, indices)
        b = impls["python"].betweenness_counts(n, indptr, indices, indptr, indices)
        assert list(a) == list(b)  # bit-identical by construction


def test_directed_adjacency_uses_reverse_for_predecessors():
    # Directed path 0 -> 1 -> 2: node 1 mediates exactly one ordered pair.
    pairs = {(0, 1), (1, 2)}
    indptr, indices = kernels.csr_adjacency(3, pairs)
    rindptr, rindices = kernels.csr_adjacency(3, {(v, u) for u, v in pairs})
    counts = kernels.betweenness_counts(3, indptr, indices, rindptr, rindices)
    assert counts.tolist() == [0.0, 1.0, 0.0]
