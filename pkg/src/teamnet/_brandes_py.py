"""Pure-Python betweenness kernel (fallback for the compiled extension).

Same contract and same floating-point operation order as the Cython kernel
in _brandes.pyx, so both backends produce bit-identical results.
"""

from __future__ import annotations


def betweenness_counts(n, indptr, indices, rindptr, rindices):
    """Brandes shortest-path dependency sums over ordered (source, target) pairs.

    The graph is given as CSR adjacency: node v's successors are
    indices[indptr[v]:indptr[v+1]].  rindptr/rindices is the reverse
    adjacency, used to find shortest-path predecessors during the
    accumulation sweep; for an undirected (symmetric) graph pass the forward
    arrays twice.

    Returns a list of n floats: for each node v the sum over ordered pairs
    (s, t), s != t != v, of sigma_st(v) / sigma_st.
    """
    indptr = list(indptr)
    indices = list(indices)
    rindptr = list(rindptr)
    rindices = list(rindices)

    bc = [0.0] * n
    dist = [0] * n
    sigma = [0.0] * n
    delta = [0.0] * n
    order = [0] * n

    for s in range(n):
        for v in range(n):
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            dv1 = dist[v] + 1
            for i in range(indptr[v], indptr[v + 1]):
                w = indices[i]
                if dist[w] < 0:
                    dist[w] = dv1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv1:
                    sigma[w] += sigma[v]
        # order[0:tail] holds BFS order; sweep back, skipping the source.
        for qi in range(tail - 1, 0, -1):
            w = order[qi]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w] - 1
            for i in range(rindptr[w], rindptr[w + 1]):
                v = rindices[i]
                if dist[v] == dw:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc
