"""Compiled inner loops: change statistics and Metropolis dyad toggling.

Network state is a bundle of arrays (see ``NetworkState``):

adj   n x n uint8 symmetric adjacency
deg   n int64 degrees
nbr   n x n int32; ``nbr[i, :deg[i]]`` lists the neighbours of i
npos  n x n int32; position of j inside ``nbr[i]`` (or -1)
elist D x 2 int32; first ``m`` rows are the edges (i < j)
epos  n x n int32; row of edge (i, j), i < j, inside ``elist`` (or -1)
m     length-1 int64 edge count

Terms are encoded as parallel arrays ``kinds`` / ``params`` / ``acol`` with
categorical attribute codes in ``attrs`` (one row per attribute column).
"""

import math

import numpy as np
from numba import njit

EDGES, NODEMATCH, GWDEGREE, GWESP, TRIANGLE, KSTAR = range(6)

PROPOSAL_UNIFORM = 0
PROPOSAL_TNT = 1


@njit(cache=True, nogil=True)
def _gw_increment(count, decay):
    # w(c + 1) - w(c) for w(c) = e^decay * (1 - (1 - e^-decay)^c)
    r = 1.0 - math.exp(-decay)
    if count == 0:
        return 1.0
    return r ** count


@njit(cache=True, nogil=True)
def _binom(a, b):
    if b < 0 or a < b:
        return 0.0
    out = 1.0
    for t in range(b):
        out = out * (a - t) / (t + 1)
    return out


@njit(cache=True, nogil=True)
def _shared(adj, deg, nbr, u, v):
    # common neighbours of u and v, scanning the smaller neighbourhood
    if deg[u] > deg[v]:
        u, v = v, u
    c = 0
    for t in range(deg[u]):
        if adj[v, nbr[u, t]]:
            c += 1
    return c


@njit(cache=True, nogil=True)
def change_stats(adj, deg, nbr, i, j, kinds, params, acol, attrs, out):
    """Fill ``out`` with s(y with ij on) - s(y with ij off)."""
    on = adj[i, j]
    di = deg[i] - on
    dj = deg[j] - on
    need_cn = False
    for t in range(kinds.shape[0]):
        if kinds[t] == TRIANGLE or kinds[t] == GWESP:
            need_cn = True
    cn = 0
    if need_cn:
        cn = _shared(adj, deg, nbr, i, j)
    for t in range(kinds.shape[0]):
        k = kinds[t]
        if k == EDGES:
            out[t] = 1.0
        elif k == NODEMATCH:
            c = acol[t]
            out[t] = 1.0 if attrs[c, i] == attrs[c, j] else 0.0
        elif k == TRIANGLE:
            out[t] = cn
        elif k == KSTAR:
            kk = int(params[t])
            out[t] = _binom(di, kk - 1) + _binom(dj, kk - 1)
        elif k == GWDEGREE:
            out[t] = _gw_increment(di, params[t]) + _gw_increment(dj, params[t])
        elif k == GWESP:
            decay = params[t]
            e = math.exp(decay)
            r = 1.0 - math.exp(-decay)
            val = e * (1.0 - r ** cn)
            if deg[i] <= deg[j]:
                a, b = i, j
            else:
                a, b = j, i
            for s in range(deg[a]):
                w = nbr[a, s]
                if w == b or not adj[b, w]:
                    continue
                # edges (i, w) and (j, w) each gain partner j / i
                sp_iw = _shared(adj, deg, nbr, i, w) - on
                sp_jw = _shared(adj, deg, nbr, j, w) - on
                val += _gw_increment(sp_iw, decay) + _gw_increment(sp_jw, decay)
            out[t] = val
    return out


@njit(cache=True, nogil=True)
def toggle(adj, deg, nbr, npos, elist, epos, m, i, j):
    if i > j:
        i, j = j, i
    if adj[i, j]:
        adj[i, j] = 0
        adj[j, i] = 0
        for a, b in ((i, j), (j, i)):
            p = npos[a, b]
            last = nbr[a, deg[a] - 1]
            nbr[a, p] = last
            npos[a, last] = p
            npos[a, b] = -1
            deg[a] -= 1
        p = epos[i, j]
        q = m[0] - 1
        li = elist[q, 0]
        lj = elist[q, 1]
        elist[p, 0] = li
        elist[p, 1] = lj
        epos[li, lj] = p
        epos[i, j] = -1
        m[0] = q
    else:
        adj[i, j] = 1
        adj[j, i] = 1
        for a, b in ((i, j), (j, i)):
            nbr[a, deg[a]] = b
            npos[a, b] = deg[a]
            deg[a] += 1
        q = m[0]
        elist[q, 0] = i
        elist[q, 1] = j
        epos[i, j] = q
        m[0] = q + 1


@njit(cache=True, nogil=True)
def metropolis(adj, deg, nbr, npos, elist, epos, m, stats, theta,
               kinds, params, acol, attrs, uniforms, proposal):
    """Run ``uniforms.shape[0]`` Metropolis-Hastings toggle proposals.

    ``stats`` is updated in place; returns the number of accepted toggles.
    """
    n = adj.shape[0]
    ndyads = n * (n - 1) / 2.0
    d = theta.shape[0]
    delta = np.empty(d)
    accepted = 0
    for step in range(uniforms.shape[0]):
        u = uniforms[step]
        m0 = m[0]
        log_hastings = 0.0
        if proposal == PROPOSAL_TNT and m0 > 0 and u[0] < 0.5:
            e = min(int(u[1] * m0), m0 - 1)
            i = elist[e, 0]
            j = elist[e, 1]
        else:
            i = min(int(u[1] * n), n - 1)
            j = min(int(u[2] * (n - 1)), n - 2)
            if j >= i:
                j += 1
        change_stats(adj, deg, nbr, i, j, kinds, params, acol, attrs, delta)
        dot = 0.0
        for t in range(d):
            dot += theta[t] * delta[t]
        on = adj[i, j]
        if on:
            dot = -dot
        if proposal == PROPOSAL_TNT:
            if on:
                fwd = 0.5 / m0 + 0.5 / ndyads
                rev = (1.0 if m0 == 1 else 0.5) / ndyads
            else:
                fwd = (0.5 if m0 > 0 else 1.0) / ndyads
                rev = 0.5 / (m0 + 1) + 0.5 / ndyads
            log_hastings = math.log(rev) - math.log(fwd)
        log_r = dot + log_hastings
        if log_r >= 0.0 or math.log(1.0 - u[3]) < log_r:
            toggle(adj, deg, nbr, npos, elist, epos, m, i, j)
            sign = -1.0 if on else 1.0
            for t in range(d):
                stats[t] += sign * delta[t]
            accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def dyad_design(adj, deg, nbr, kinds, params, acol, attrs):
    """Change statistics (dyad off) and edge indicator for every dyad i < j."""
    n = adj.shape[0]
    nd = n * (n - 1) // 2
    d = kinds.shape[0]
    x = np.empty((nd, d))
    y = np.empty(nd)
    row = 0
    for i in range(n):
        for j in range(i + 1, n):
            change_stats(adj, deg, nbr, i, j, kinds, params, acol, attrs, x[row])
            y[row] = adj[i, j]
            row += 1
    return x, y
