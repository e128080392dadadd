"""Pure-Python kernels; same contract as the compiled ``_kernels`` extension.

Graphs arrive as CSR arrays ``(indptr, indices)`` with sorted neighbour lists.
"""
from collections import deque
import math

import numpy as np


def bfs_distances(indptr, indices):
    """All-pairs hop distances; ``-1`` marks unreachable pairs."""
    n = len(indptr) - 1
    dist = np.full((n, n), -1, dtype=np.int32)
    ip = indptr.tolist()
    ix = indices.tolist()
    for s in range(n):
        row = [-1] * n
        row[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            dv = row[v] + 1
            for k in range(ip[v], ip[v + 1]):
                w = ix[k]
                if row[w] < 0:
                    row[w] = dv
                    queue.append(w)
        dist[s] = row
    return dist


def betweenness(indptr, indices):
    """Brandes accumulation over unordered pairs (ordered-pair total halved)."""
    n = len(indptr) - 1
    ip = indptr.tolist()
    ix = indices.tolist()
    bc = [0.0] * n
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0.0] * n
        sigma[s] = 1.0
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for k in range(ip[v], ip[v + 1]):
                w = ix[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return np.asarray(bc) / 2.0


def symmetry(indptr, indices, hmax, merged):
    """Concentric symmetry for every node and every level ``h = 1..hmax``.

    Returns an ``(n, hmax + 1)`` array whose column ``h`` holds the score at
    level ``h`` (column 0 is unused and left at zero).
    """
    n = len(indptr) - 1
    ip = indptr.tolist()
    ix = indices.tolist()
    out = np.zeros((n, hmax + 1))
    for root in range(n):
        dist = {root: 0}
        levels = [[root]]
        for r in range(hmax):
            nxt = []
            for v in levels[r]:
                for k in range(ip[v], ip[v + 1]):
                    w = ix[k]
                    if w not in dist:
                        dist[w] = r + 1
                        nxt.append(w)
            if not nxt:
                break
            levels.append(nxt)

        # unit of flow: a node (backbone) or a connected intra-level group (merged)
        group = {}
        level_groups = []
        for r, nodes in enumerate(levels):
            if merged:
                count = 0
                for v in nodes:
                    if v in group:
                        continue
                    gid = (r, count)
                    count += 1
                    group[v] = gid
                    todo = [v]
                    while todo:
                        u = todo.pop()
                        for k in range(ip[u], ip[u + 1]):
                            w = ix[k]
                            if w not in group and dist.get(w) == r:
                                group[w] = gid
                                todo.append(w)
                level_groups.append([(r, c) for c in range(count)])
            else:
                for v in nodes:
                    group[v] = v
                level_groups.append(list(nodes))

        members = {}
        for v in dist:
            members.setdefault(group[v], []).append(v)

        mass = {level_groups[0][0]: 1.0}
        dead = 0
        for r in range(hmax):
            if r + 1 >= len(levels):
                break
            new_mass = {}
            for g in level_groups[r]:
                targets = set()
                for v in members[g]:
                    for k in range(ip[v], ip[v + 1]):
                        w = ix[k]
                        if dist.get(w) == r + 1:
                            targets.add(group[w])
                if not targets:
                    dead += 1
                    continue
                share = mass.get(g, 0.0) / len(targets)
                for t in targets:
                    new_mass[t] = new_mass.get(t, 0.0) + share
            mass = new_mass
            h = r + 1
            total = sum(mass.values())
            entropy = 0.0
            for g in level_groups[h]:
                p = mass.get(g, 0.0) / total
                if p > 0:
                    entropy -= p * math.log(p)
            out[root, h] = math.exp(entropy) / (len(level_groups[h]) + dead)
    return out


def louvain_move(indptr, indices, data, strength, order, comm, m2):
    """Local-moving phase of Louvain on a weighted graph (self-loops allowed).

    ``comm`` is updated in place. Nodes are visited in ``order`` until a full
    pass moves nothing. Returns whether any node moved.
    """
    n = len(indptr) - 1
    ip = indptr.tolist()
    ix = indices.tolist()
    wt = data.tolist()
    k = strength.tolist()
    c = comm.tolist()
    tot = [0.0] * n
    for i in range(n):
        tot[c[i]] += k[i]
    moved_any = False
    while True:
        moved = False
        for i in order.tolist():
            ci = c[i]
            links = {}
            for p in range(ip[i], ip[i + 1]):
                j = ix[p]
                if j != i:
                    links[c[j]] = links.get(c[j], 0.0) + wt[p]
            tot[ci] -= k[i]
            best = ci
            best_gain = links.get(ci, 0.0) - k[i] * tot[ci] / m2
            for p in range(ip[i], ip[i + 1]):
                cj = c[ix[p]]
                if cj == ci:
                    continue
                gain = links[cj] - k[i] * tot[cj] / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = cj, gain
            tot[best] += k[i]
            if best != ci:
                c[i] = best
                moved = True
                moved_any = True
        if not moved:
            break
    comm[:] = c
    return moved_any
