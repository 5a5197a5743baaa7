"""Compiled inner loops for block statistics and annealing.

State for a labeling is kept as three ``K x K`` block sums (observed edges,
expected edges, squared probabilities) plus three ``N x K`` tables holding,
for every node, the same sums restricted to its own row. With the tables a
label-move proposal costs O(K) to score and O(N) to apply.
"""
from __future__ import annotations

import math

import numba
import numpy as np

EPS_VAR = 1e-12
IMPROVE_TOL = 1e-10


@numba.njit(cache=True, nogil=True)
def zblock(s, t, u, eps):
    var = t - u
    if var > eps:
        return (s - t) / math.sqrt(var)
    return 0.0


@numba.njit(cache=True, nogil=True)
def init_state(a, p, p2, labels, k):
    n = a.shape[0]
    wa = np.zeros((n, k))
    wp = np.zeros((n, k))
    wp2 = np.zeros((n, k))
    for i in range(n):
        for j in range(n):
            g = labels[j]
            wa[i, g] += a[i, j]
            wp[i, g] += p[i, j]
            wp2[i, g] += p2[i, j]
    s = np.zeros((k, k))
    t = np.zeros((k, k))
    u = np.zeros((k, k))
    for i in range(n):
        c = labels[i]
        for g in range(k):
            s[c, g] += wa[i, g]
            t[c, g] += wp[i, g]
            u[c, g] += wp2[i, g]
    return wa, wp, wp2, s, t, u


@numba.njit(cache=True, nogil=True)
def z_matrix(s, t, u, eps):
    k = s.shape[0]
    z = np.zeros((k, k))
    for x in range(k):
        for y in range(k):
            z[x, y] = zblock(s[x, y], t[x, y], u[x, y], eps)
    return z


@numba.njit(cache=True, nogil=True)
def z_value(z, b):
    k = z.shape[0]
    tot = 0.0
    for x in range(k):
        for y in range(k):
            tot += b[x, y] * z[x, y]
    return tot / k


@numba.njit(cache=True, nogil=True)
def _moved(m, x, y, r, src, dst):
    # entry (x, y) after adding (e_dst - e_src) r^T + r (e_dst - e_src)^T
    v = m[x, y]
    if x == dst:
        v += r[y]
    if x == src:
        v -= r[y]
    if y == dst:
        v += r[x]
    if y == src:
        v -= r[x]
    return v


@numba.njit(cache=True, nogil=True)
def _apply_delta(m, r, src, dst):
    k = m.shape[0]
    for g in range(k):
        m[dst, g] += r[g]
        m[src, g] -= r[g]
    for g in range(k):
        m[g, dst] += r[g]
        m[g, src] -= r[g]


@numba.njit(cache=True, nogil=True)
def move_delta(i, dst, labels, wa, wp, wp2, s, t, u, z, b, eps):
    """Change in the total statistic if node ``i`` moves to group ``dst``."""
    src = labels[i]
    k = s.shape[0]
    ra = wa[i]
    rp = wp[i]
    rp2 = wp2[i]
    d = 0.0
    # rows src/dst against the untouched columns; the mirrored entries double it
    for g in range(k):
        if g == src or g == dst:
            continue
        for x in (src, dst):
            if b[x, g] != 0.0:
                zn = zblock(_moved(s, x, g, ra, src, dst),
                            _moved(t, x, g, rp, src, dst),
                            _moved(u, x, g, rp2, src, dst), eps)
                d += 2.0 * b[x, g] * (zn - z[x, g])
    for x in (src, dst):
        for y in (src, dst):
            if b[x, y] != 0.0:
                zn = zblock(_moved(s, x, y, ra, src, dst),
                            _moved(t, x, y, rp, src, dst),
                            _moved(u, x, y, rp2, src, dst), eps)
                d += b[x, y] * (zn - z[x, y])
    return d / k


@numba.njit(cache=True, nogil=True)
def apply_move(i, dst, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps):
    src = labels[i]
    k = s.shape[0]
    _apply_delta(s, wa[i], src, dst)
    _apply_delta(t, wp[i], src, dst)
    _apply_delta(u, wp2[i], src, dst)
    labels[i] = dst
    n = a.shape[0]
    for j in range(n):
        aij = a[j, i]
        pij = p[j, i]
        p2ij = p2[j, i]
        wa[j, src] -= aij
        wa[j, dst] += aij
        wp[j, src] -= pij
        wp[j, dst] += pij
        wp2[j, src] -= p2ij
        wp2[j, dst] += p2ij
    for x in (src, dst):
        for g in range(k):
            z[x, g] = zblock(s[x, g], t[x, g], u[x, g], eps)
            z[g, x] = z[x, g]


@numba.njit(cache=True, nogil=True)
def exact_z(a, p, p2, b, labels, eps):
    k = b.shape[0]
    _, _, _, s, t, u = init_state(a, p, p2, labels, k)
    return z_value(z_matrix(s, t, u, eps), b)


@numba.njit(cache=True, nogil=True)
def greedy(a, p, p2, b, labels, eps):
    """Steepest-ascent single-node moves until none improves. Mutates ``labels``."""
    n = a.shape[0]
    k = b.shape[0]
    wa, wp, wp2, s, t, u = init_state(a, p, p2, labels, k)
    z = z_matrix(s, t, u, eps)
    moves = 0
    while k > 1:
        best = IMPROVE_TOL
        bi = -1
        bg = -1
        for i in range(n):
            for g in range(k):
                if g == labels[i]:
                    continue
                d = move_delta(i, g, labels, wa, wp, wp2, s, t, u, z, b, eps)
                if d > best:
                    best = d
                    bi = i
                    bg = g
        if bi < 0:
            break
        apply_move(bi, bg, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps)
        moves += 1
    return moves


@numba.njit(cache=True, nogil=True)
def anneal(a, p, p2, b, labels, t0, alpha, sweeps, stall, swap_prob, rng, eps):
    """One simulated-annealing run from ``labels`` (mutated).

    Returns the best labeling seen, its statistic and the sweeps used.
    """
    n = a.shape[0]
    k = b.shape[0]
    wa, wp, wp2, s, t, u = init_state(a, p, p2, labels, k)
    z = z_matrix(s, t, u, eps)
    cur = z_value(z, b)
    best = cur
    best_labels = labels.copy()
    if k < 2 or n == 0:
        return best_labels, best, 0
    temp = t0
    since = 0
    used = 0
    for _ in range(sweeps):
        used += 1
        improved = False
        for _m in range(n):
            if swap_prob > 0.0 and rng.random() < swap_prob:
                i = min(int(rng.random() * n), n - 1)
                j = min(int(rng.random() * n), n - 1)
                ci = labels[i]
                cj = labels[j]
                if ci == cj:
                    continue
                d1 = move_delta(i, cj, labels, wa, wp, wp2, s, t, u, z, b, eps)
                apply_move(i, cj, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps)
                dz = d1 + move_delta(j, ci, labels, wa, wp, wp2, s, t, u, z, b, eps)
                if dz > 0.0 or rng.random() < math.exp(dz / temp):
                    apply_move(j, ci, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps)
                    cur += dz
                else:
                    apply_move(i, ci, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps)
                    continue
            else:
                i = min(int(rng.random() * n), n - 1)
                g = min(int(rng.random() * (k - 1)), k - 2)
                if g >= labels[i]:
                    g += 1
                dz = move_delta(i, g, labels, wa, wp, wp2, s, t, u, z, b, eps)
                if dz > 0.0 or rng.random() < math.exp(dz / temp):
                    apply_move(i, g, labels, a, p, p2, wa, wp, wp2, s, t, u, z, eps)
                    cur += dz
                else:
                    continue
            if cur > best + IMPROVE_TOL:
                best = cur
                best_labels[:] = labels
                improved = True
        temp *= alpha
        if improved:
            since = 0
        else:
            since += 1
            if since >= stall:
                break
    return best_labels, best, used
