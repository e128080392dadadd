# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels; mirrors ``_kernels_py`` function by function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()


def bfs_distances(const int[::1] indptr, const int[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full((n, n), -1, dtype=np.int32)
    cdef int[:, ::1] dist = dist_arr
    cdef int[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t s, head, tail, k
    cdef int v, w, dv
    for s in range(n):
        dist[s, s] = 0
        queue[0] = <int>s
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[s, v] + 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[s, w] < 0:
                    dist[s, w] = dv
                    queue[tail] = w
                    tail += 1
    return dist_arr


def betweenness(const int[::1] indptr, const int[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    bc_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] bc = bc_arr
    cdef double[::1] sigma = np.zeros(max(n, 1))
    cdef double[::1] delta = np.zeros(max(n, 1))
    cdef int[::1] dist = np.full(max(n, 1), -1, dtype=np.int32)
    cdef int[::1] order = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t s, head, tail, k, i
    cdef int v, w
    cdef double coeff
    for s in range(n):
        for i in range(n):
            sigma[i] = 0.0
            delta[i] = 0.0
            dist[i] = -1
        sigma[s] = 1.0
        dist[s] = 0
        order[0] = <int>s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    for i in range(n):
        bc[i] /= 2.0
    return bc_arr


def symmetry(const int[::1] indptr, const int[::1] indices, int hmax, bint merged):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = max(n, 1)
    out_arr = np.zeros((n, hmax + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int[::1] dist = np.full(m, -1, dtype=np.int32)
    cdef int[::1] q = np.empty(m, dtype=np.int32)
    cdef int[::1] gid = np.full(m, -1, dtype=np.int32)
    cdef int[::1] gcount = np.zeros(m + 1, dtype=np.int32)
    cdef int[::1] gstart = np.zeros(m + 1, dtype=np.int32)
    cdef int[::1] gfill = np.zeros(m + 1, dtype=np.int32)
    cdef int[::1] gmembers = np.empty(m, dtype=np.int32)
    cdef int[::1] lev_start = np.zeros(hmax + 2, dtype=np.int32)
    cdef int[::1] glev_start = np.zeros(hmax + 2, dtype=np.int32)
    cdef int[::1] stack = np.empty(m, dtype=np.int32)
    cdef int[::1] mark = np.zeros(m, dtype=np.int32)
    cdef int[::1] targets = np.empty(m, dtype=np.int32)
    cdef double[::1] mass = np.zeros(m)
    cdef Py_ssize_t root, head, tail, k, kk, i
    cdef int v, w, u, r, nlev, ng, g, t, top, ntarg, stamp = 0, dead, h, lev
    cdef double share, total, p, entropy
    for root in range(n):
        # breadth-first levels up to hmax
        dist[root] = 0
        q[0] = <int>root
        head = 0
        tail = 1
        while head < tail:
            v = q[head]
            head += 1
            if dist[v] == hmax:
                continue
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q[tail] = w
                    tail += 1
        nlev = dist[q[tail - 1]] + 1
        for r in range(hmax + 2):
            lev_start[r] = <int>tail
        for i in range(tail - 1, -1, -1):
            lev_start[dist[q[i]]] = <int>i

        # groups, numbered level by level
        ng = 0
        for r in range(nlev):
            glev_start[r] = ng
            for i in range(lev_start[r], lev_start[r + 1]):
                v = q[i]
                if gid[v] >= 0:
                    continue
                gid[v] = ng
                if merged:
                    top = 0
                    stack[top] = v
                    top += 1
                    while top > 0:
                        top -= 1
                        u = stack[top]
                        for k in range(indptr[u], indptr[u + 1]):
                            w = indices[k]
                            if gid[w] < 0 and dist[w] == r:
                                gid[w] = ng
                                stack[top] = w
                                top += 1
                ng += 1
        glev_start[nlev] = ng

        for g in range(ng + 1):
            gcount[g] = 0
        for i in range(tail):
            gcount[gid[q[i]] + 1] += 1
        gstart[0] = 0
        for g in range(ng):
            gstart[g + 1] = gstart[g] + gcount[g + 1]
            gfill[g] = gstart[g]
        for i in range(tail):
            v = q[i]
            g = gid[v]
            gmembers[gfill[g]] = v
            gfill[g] += 1

        for g in range(ng):
            mass[g] = 0.0
        mass[0] = 1.0
        dead = 0
        for r in range(hmax):
            if r + 1 >= nlev:
                break
            for g in range(glev_start[r], glev_start[r + 1]):
                stamp += 1
                ntarg = 0
                for kk in range(gstart[g], gstart[g + 1]):
                    v = gmembers[kk]
                    for k in range(indptr[v], indptr[v + 1]):
                        w = indices[k]
                        if dist[w] == r + 1:
                            t = gid[w]
                            if mark[t] != stamp:
                                mark[t] = stamp
                                targets[ntarg] = t
                                ntarg += 1
                if ntarg == 0:
                    dead += 1
                    continue
                share = mass[g] / ntarg
                for k in range(ntarg):
                    mass[targets[k]] += share
            h = r + 1
            total = 0.0
            for g in range(glev_start[h], glev_start[h + 1]):
                total += mass[g]
            entropy = 0.0
            for g in range(glev_start[h], glev_start[h + 1]):
                p = mass[g] / total
                if p > 0:
                    entropy -= p * log(p)
            out[root, h] = exp(entropy) / (glev_start[h + 1] - glev_start[h] + dead)

        for i in range(tail):
            v = q[i]
            dist[v] = -1
            gid[v] = -1
    return out_arr


def louvain_move(const int[::1] indptr, const int[::1] indices, const double[::1] data,
                 const double[::1] strength, const long[::1] order, long[::1] comm, double m2):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = max(n, 1)
    cdef double[::1] tot = np.zeros(m)
    cdef double[::1] links = np.zeros(m)
    cdef Py_ssize_t i, p, oi
    cdef long ci, cj, best
    cdef double gain, best_gain, ki
    cdef bint moved, moved_any = False
    for i in range(n):
        tot[comm[i]] += strength[i]
    while True:
        moved = False
        for oi in range(n):
            i = order[oi]
            ci = comm[i]
            ki = strength[i]
            for p in range(indptr[i], indptr[i + 1]):
                if indices[p] != i:
                    links[comm[indices[p]]] += data[p]
            tot[ci] -= ki
            best = ci
            best_gain = links[ci] - ki * tot[ci] / m2
            for p in range(indptr[i], indptr[i + 1]):
                cj = comm[indices[p]]
                if cj == ci:
                    continue
                gain = links[cj] - ki * tot[cj] / m2
                if gain > best_gain + 1e-12:
                    best = cj
                    best_gain = gain
            tot[best] += ki
            for p in range(indptr[i], indptr[i + 1]):
                links[comm[indices[p]]] = 0.0
            links[ci] = 0.0
            if best != ci:
                comm[i] = best
                moved = True
                moved_any = True
        if not moved:
            break
    return moved_any
