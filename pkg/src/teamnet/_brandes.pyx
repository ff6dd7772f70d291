# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled betweenness kernel (Brandes accumulation over CSR adjacency).

Mirrors _brandes_py.betweenness_counts exactly, including floating-point
operation order, so the two backends agree bit-for-bit.
"""

import numpy as np


def betweenness_counts(int n, int[::1] indptr, int[::1] indices,
                       int[::1] rindptr, int[::1] rindices):
    """Shortest-path dependency sums per node over ordered (s, t) pairs.

    See the pure-Python twin for the full contract.  Returns a float64
    numpy array of length n.
    """
    bc_arr = np.zeros(n, dtype=np.float64)
    dist_arr = np.empty(n, dtype=np.int32)
    sigma_arr = np.empty(n, dtype=np.float64)
    delta_arr = np.empty(n, dtype=np.float64)
    order_arr = np.empty(n, dtype=np.int32)

    cdef double[::1] bc = bc_arr
    cdef int[::1] dist = dist_arr
    cdef double[::1] sigma = sigma_arr
    cdef double[::1] delta = delta_arr
    cdef int[::1] order = order_arr

    cdef int s, v, w, i, qi, head, tail, dv1, dw
    cdef double coeff

    for s in range(n):
        for v in range(n):
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
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
        for qi in range(tail - 1, 0, -1):
            w = order[qi]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w] - 1
            for i in range(rindptr[w], rindptr[w + 1]):
                v = rindices[i]
                if dist[v] == dw:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc_arr
