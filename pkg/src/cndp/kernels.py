"""Numeric kernels shared by the solvers.

Everything here works on flat arrays so it can be compiled by numba. Edges
are rows of a coefficient matrix ``coef[e, j]`` (polynomial ``sum_j coef[e, j]
x**j``); ``strict[e]`` is False for constant latencies, whose value is
``coef[e, 0]`` regardless of load or capacity.
"""
import heapq

import numpy as np

from ._accel import jit

ROOT_MAX_ITERS = 200

# pairwise Frank-Wolfe status codes
FW_CONVERGED = 0
FW_NO_PATH = 1
FW_MAX_ITERS = 2


# ---------------------------------------------------------------- polynomials

@jit
def poly(c, x):
    s = 0.0
    for j in range(c.shape[0] - 1, -1, -1):
        s = s * x + c[j]
    return s


@jit
def dpoly(c, x):
    s = 0.0
    for j in range(c.shape[0] - 1, 0, -1):
        s = s * x + j * c[j]
    return s


@jit
def d2poly(c, x):
    s = 0.0
    for j in range(c.shape[0] - 1, 1, -1):
        s = s * x + j * (j - 1) * c[j]
    return s


@jit
def poly_rows(coef, x):
    """Evaluate every edge polynomial at its own abscissa."""
    s = np.zeros(coef.shape[0])
    for j in range(coef.shape[1] - 1, -1, -1):
        s = s * x + coef[:, j]
    return s


@jit
def dpoly_rows(coef, x):
    s = np.zeros(coef.shape[0])
    for j in range(coef.shape[1] - 1, 0, -1):
        s = s * x + j * coef[:, j]
    return s


@jit
def edge_latency(coef, strict, usable, v, z, marginal):
    """Per-edge latency S(v/z) (or S + xS' when ``marginal``); inf where unusable."""
    m = coef.shape[0]
    x = np.zeros(m)
    for e in range(m):
        if strict[e] and usable[e]:
            x[e] = max(v[e], 0.0) / z[e]
    t = poly_rows(coef, x)
    if marginal:
        t = t + x * dpoly_rows(coef, x)
    for e in range(m):
        if not strict[e]:
            t[e] = coef[e, 0]
        elif not usable[e]:
            t[e] = np.inf
    return t


@jit
def beckmann_edge(c, strict_e, v, z):
    """Closed-form integral of S(t/z) dt over [0, v]."""
    if v <= 0.0:
        return 0.0
    if not strict_e:
        return c[0] * v
    x = v / z
    s = 0.0
    for j in range(c.shape[0] - 1, -1, -1):
        s = s * x + c[j] / (j + 1)
    return z * x * s


@jit
def beckmann_potential(coef, strict, usable, v, z):
    total = 0.0
    for e in range(coef.shape[0]):
        if usable[e]:
            total += beckmann_edge(coef[e], strict[e], v[e], z[e])
    return total


# ---------------------------------------------------------------- root finding

@jit
def _hybrid_root(c, mode, target, lo, hi, tol):
    # mode 0: u^2 S'(u) - target;  mode 1: S(y) - target.
    # f is increasing on [lo, hi] with f(lo) <= 0 <= f(hi).
    x = 0.5 * (lo + hi)
    for _ in range(ROOT_MAX_ITERS):
        if mode == 0:
            f = x * x * dpoly(c, x) - target
            df = 2.0 * x * dpoly(c, x) + x * x * d2poly(c, x)
        else:
            f = poly(c, x) - target
            df = dpoly(c, x)
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4e-16 * hi:
            return 0.5 * (lo + hi)
        step_ok = False
        if df > 0.0:
            xn = x - f / df
            if lo < xn < hi:
                if abs(xn - x) <= 1e-15 * abs(xn):
                    return xn
                x = xn
                step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
    if hi - lo <= tol * hi:
        return 0.5 * (lo + hi)
    return np.nan


@jit
def solve_u_scalar(c, price, tol):
    """Unique u > 0 with u^2 S'(u) = price; nan on failure."""
    hi = 1.0
    for _ in range(ROOT_MAX_ITERS):
        if hi * hi * dpoly(c, hi) >= price:
            break
        hi *= 2.0
    if hi * hi * dpoly(c, hi) < price:
        return np.nan
    return _hybrid_root(c, 0, price, 0.0, hi, tol)


@jit
def solve_y_scalar(c, delta, tol):
    """y >= delta with S(y) = S(delta) + delta S'(delta); nan on failure."""
    target = poly(c, delta) + delta * dpoly(c, delta)
    hi = 2.0 * delta
    for _ in range(ROOT_MAX_ITERS):
        if poly(c, hi) >= target:
            break
        hi *= 2.0
    if poly(c, hi) < target:
        return np.nan
    return _hybrid_root(c, 1, target, delta, hi, tol)


@jit
def solve_u_rows(coef, strict, prices, tol):
    """Per-edge u_e for strict edges with positive price (0 elsewhere)."""
    m = coef.shape[0]
    u = np.zeros(m)
    for e in range(m):
        if strict[e] and prices[e] > 0.0:
            u[e] = solve_u_scalar(coef[e], prices[e], tol)
    return u


# ---------------------------------------------------------------- shortest paths

@jit
def dijkstra(n, ptr, adj, other, w, root):
    """Label-setting search from ``root`` along the CSR adjacency.

    ``adj[ptr[i]:ptr[i+1]]`` lists edge ids incident to node i in search
    direction and ``other[e]`` is the node reached through e. Infinite
    weights are skipped. Among equal-distance predecessors the lowest edge
    id wins.
    """
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    dist[root] = 0.0
    heap = [(0.0, np.int64(root))]
    while len(heap) > 0:
        d, i = heapq.heappop(heap)
        if done[i]:
            continue
        done[i] = True
        for p in range(ptr[i], ptr[i + 1]):
            e = adj[p]
            we = w[e]
            if not np.isfinite(we):
                continue
            j = other[e]
            if done[j]:
                continue
            nd = d + we
            if nd < dist[j]:
                dist[j] = nd
                pred[j] = e
                heapq.heappush(heap, (nd, np.int64(j)))
            elif nd == dist[j] and e < pred[j]:
                pred[j] = e
    return dist, pred


@jit
def trace_path(pred, back, root, target, m):
    """0/1 edge incidence of the path encoded by ``pred`` (walks target -> root)."""
    inc = np.zeros(m, dtype=np.uint8)
    node = target
    steps = 0
    while node != root:
        e = pred[node]
        inc[e] = 1
        node = back[e]
        steps += 1
        if steps > m:
            break
    return inc


# ---------------------------------------------------------------- equilibrium

@jit
def _line_search(coef, strict, z, v, idx, dirs, amax):
    # root of g(a) = sum_e d_e S_e((v_e + a d_e)/z_e) on [0, amax]; g(0) < 0
    g = 0.0
    for q in range(idx.shape[0]):
        e = idx[q]
        if strict[e]:
            g += dirs[q] * poly(coef[e], max(v[e] + amax * dirs[q], 0.0) / z[e])
        else:
            g += dirs[q] * coef[e, 0]
    if g <= 0.0:
        return amax
    lo = 0.0
    hi = amax
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g = 0.0
        for q in range(idx.shape[0]):
            e = idx[q]
            if strict[e]:
                g += dirs[q] * poly(coef[e], max(v[e] + mid * dirs[q], 0.0) / z[e])
            else:
                g += dirs[q] * coef[e, 0]
        if g <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


@jit
def _find_or_add(inc, owner, wts, npaths, k, path):
    m = path.shape[0]
    for p in range(npaths):
        if owner[p] != k:
            continue
        same = True
        for e in range(m):
            if inc[p, e] != path[e]:
                same = False
                break
        if same:
            return p, inc, owner, wts, npaths
    if npaths == inc.shape[0]:
        cap = 2 * npaths
        inc2 = np.zeros((cap, m), dtype=np.uint8)
        owner2 = np.full(cap, -1, dtype=np.int64)
        wts2 = np.zeros(cap)
        inc2[:npaths] = inc
        owner2[:npaths] = owner
        wts2[:npaths] = wts
        inc, owner, wts = inc2, owner2, wts2
    inc[npaths] = path
    owner[npaths] = k
    wts[npaths] = 0.0
    return npaths, inc, owner, wts, npaths + 1


@jit
def frank_wolfe(n, ptr, adj, tail, head, coef, strict, z, src, dst, dem,
                tol_gap, max_iters):
    """Pairwise Frank-Wolfe on the Beckmann potential.

    Each pass visits the commodities in order; for commodity k the
    all-or-nothing shortest path receives flow from the most expensive path
    currently carrying k's flow, with an exact bisection line search.

    Returns (per-commodity flows [K, m], relative gap, passes, potential
    history, status, info) where info is the offending commodity for
    FW_NO_PATH.
    """
    m = tail.shape[0]
    K = src.shape[0]
    usable = np.zeros(m, dtype=np.bool_)
    for e in range(m):
        usable[e] = (not strict[e]) or z[e] > 0.0

    inc = np.zeros((max(8, 2 * K), m), dtype=np.uint8)
    owner = np.full(inc.shape[0], -1, dtype=np.int64)
    wts = np.zeros(inc.shape[0])
    npaths = 0
    v = np.zeros(m)
    history = np.zeros(max_iters + 1)
    flows = np.zeros((K, m))

    t = edge_latency(coef, strict, usable, v, z, False)
    for k in range(K):
        dist, pred = dijkstra(n, ptr, adj, head, t, src[k])
        if not np.isfinite(dist[dst[k]]):
            return flows, np.inf, 0, history[:0], FW_NO_PATH, k
        path = trace_path(pred, tail, src[k], dst[k], m)
        p, inc, owner, wts, npaths = _find_or_add(inc, owner, wts, npaths, k, path)
        wts[p] += dem[k]
        for e in range(m):
            v[e] += dem[k] * path[e]

    rel = np.inf
    status = FW_MAX_ITERS
    it = 0
    idx = np.empty(m, dtype=np.int64)
    dirs = np.empty(m)
    while True:
        history[it] = beckmann_potential(coef, strict, usable, v, z)
        t = edge_latency(coef, strict, usable, v, z, False)
        total = 0.0
        for e in range(m):
            if usable[e] and v[e] > 0.0:
                total += t[e] * v[e]
        lower = 0.0
        for k in range(K):
            dist, pred = dijkstra(n, ptr, adj, head, t, src[k])
            lower += dem[k] * dist[dst[k]]
        rel = max(total - lower, 0.0) / max(1.0, total)
        if rel <= tol_gap:
            status = FW_CONVERGED
            break
        if it >= max_iters:
            break
        it += 1
        for k in range(K):
            t = edge_latency(coef, strict, usable, v, z, False)
            dist, pred = dijkstra(n, ptr, adj, head, t, src[k])
            path = trace_path(pred, tail, src[k], dst[k], m)
            pf, inc, owner, wts, npaths = _find_or_add(inc, owner, wts, npaths, k, path)
            pa = -1
            worst = -np.inf
            for p in range(npaths):
                if owner[p] == k and wts[p] > 0.0:
                    c = 0.0
                    for e in range(m):
                        if inc[p, e]:
                            c += t[e]
                    if c > worst:
                        worst = c
                        pa = p
            best = dist[dst[k]]
            if pa < 0 or pa == pf or worst - best <= 1e-15 * max(1.0, worst):
                continue
            nd = 0
            for e in range(m):
                d = np.int64(inc[pf, e]) - np.int64(inc[pa, e])
                if d != 0:
                    idx[nd] = e
                    dirs[nd] = d
                    nd += 1
            a = _line_search(coef, strict, z, v, idx[:nd], dirs[:nd], wts[pa])
            if a <= 0.0:
                continue
            if a >= wts[pa]:
                a = wts[pa]
                wts[pa] = 0.0
            else:
                wts[pa] -= a
            wts[pf] += a
            for q in range(nd):
                v[idx[q]] += a * dirs[q]

    for p in range(npaths):
        if wts[p] > 0.0:
            k = owner[p]
            for e in range(m):
                if inc[p, e]:
                    flows[k, e] += wts[p]
    return flows, rel, it, history[:it + 1], status, -1
