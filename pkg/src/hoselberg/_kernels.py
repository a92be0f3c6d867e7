"""Hot inner loops, each in a numba version and a pure-numpy version.

The numba path is used when numba imports and ``HOSELBERG_DISABLE_NUMBA`` is
unset (or set to ``0``/``false``).  Both paths compute identical quantities
in the same order per element; results agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None

_DISABLE = os.environ.get("HOSELBERG_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
_backend = "numba" if (numba is not None and not _DISABLE) else "numpy"

RESONANCE_OK = 0
RESONANCE_HIT = 1


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Switch kernels at runtime (used by the benchmark and the backend-agreement tests)."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _backend = name


def _root_tables(n: int):
    """Positive roots as (i, j) pairs plus their simple-root coordinate vectors."""
    pairs = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    ij = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    simple = np.zeros((len(pairs), n), dtype=np.int64)
    for r, (i, j) in enumerate(pairs):
        simple[r, i:j] = 1
    return ij, simple


# ---------------------------------------------------------------------------
# Harish-Chandra coefficient recursion, streamed by height.
#
#   (mu, mu + 2 lam) c_mu = 2k sum_alpha S_alpha(mu)
#   S_alpha(mu) = S_alpha(mu - alpha) + (p + mu - alpha, alpha) c_{mu - alpha}
#
# Only the last n height layers are kept; the highest root has height n.
# A layer is indexed by its first n - 1 simple-root coordinates.
# ---------------------------------------------------------------------------

def _hc_stream_py(lam, p, k, n, H, ij, simple, store_full, guard):
    size = (H + 1) ** (n - 1)
    nroots = ij.shape[0]
    nslot = n + 1
    G = np.zeros((nslot, size), dtype=np.complex128)
    S = np.zeros((nslot, nroots, size), dtype=np.complex128)
    sums = np.zeros(H + 1, dtype=np.complex128)
    full = np.zeros((H + 1) ** n if store_full else 1, dtype=np.complex128)
    G[0, 0] = 1.0
    sums[0] = 1.0
    if store_full:
        full[0] = 1.0
    min_den = np.inf
    min_flat = 0
    min_h = 0
    m = np.zeros(n, dtype=np.int64)
    e = np.zeros(n + 1, dtype=np.float64)
    for h in range(1, H + 1):
        cur = h % nslot
        for t in range(size):
            G[cur, t] = 0.0
        for r in range(nroots):
            for t in range(size):
                S[cur, r, t] = 0.0
        # odometer over m[0..n-2] with partial sum <= h
        for q in range(n):
            m[q] = 0
        acc = 0.0j
        while True:
            part = 0
            for q in range(n - 1):
                part += m[q]
            if part <= h:
                m[n - 1] = h - part
                flat = 0
                stride = 1
                for q in range(n - 1):
                    flat += m[q] * stride
                    stride *= H + 1
                e[0] = m[0]
                for q in range(1, n):
                    e[q] = m[q] - m[q - 1]
                e[n] = -m[n - 1]
                den = 0.0j
                for q in range(n + 1):
                    den += e[q] * e[q] + 2.0 * e[q] * lam[q]
                tot = 0.0j
                for r in range(nroots):
                    i = ij[r, 0]
                    j = ij[r, 1]
                    ok = True
                    for q in range(i, j):
                        if m[q] - simple[r, q] < 0:
                            ok = False
                            break
                    val = 0.0j
                    if ok:
                        slot = (h - (j - i)) % nslot
                        pflat = 0
                        stride = 1
                        for q in range(n - 1):
                            pflat += (m[q] - simple[r, q]) * stride
                            stride *= H + 1
                        w = p[i] - p[j] + e[i] - e[j] - 2.0
                        val = S[slot, r, pflat] + w * G[slot, pflat]
                    S[cur, r, flat] = val
                    tot += val
                if abs(den) < min_den:
                    min_den = abs(den)
                    min_flat = flat
                    min_h = h
                if abs(den) < guard:
                    return sums, full, RESONANCE_HIT, min_den, min_flat, min_h
                c = 2.0 * k * tot / den
                G[cur, flat] = c
                acc += c
                if store_full:
                    ff = 0
                    stride = 1
                    for q in range(n):
                        ff += m[q] * stride
                        stride *= H + 1
                    full[ff] = c
            # advance odometer
            q = 0
            while q < n - 1:
                m[q] += 1
                if m[q] <= h:
                    break
                m[q] = 0
                q += 1
            if q == n - 1:
                break
        sums[h] = acc
    return sums, full, RESONANCE_OK, min_den, min_flat, min_h


if numba is not None:
    _hc_stream_nb = numba.njit(cache=True, nogil=True)(_hc_stream_py)
else:  # pragma: no cover
    _hc_stream_nb = None


def _compositions(h: int, n: int) -> np.ndarray:
    """All m in Z_{>=0}^n with sum h."""
    if n == 1:
        return np.array([[h]], dtype=np.int64)
    grids = np.meshgrid(*([np.arange(h + 1)] * (n - 1)), indexing="ij")
    head = np.stack([g.ravel() for g in grids], axis=1)
    head = head[head.sum(axis=1) <= h]
    return np.concatenate([head, (h - head.sum(axis=1))[:, None]], axis=1)


def _hc_stream_np(lam, p, k, n, H, ij, simple, store_full, guard):
    size = (H + 1) ** (n - 1)
    nroots = ij.shape[0]
    nslot = n + 1
    strides = (H + 1) ** np.arange(n, dtype=np.int64)
    G = np.zeros((nslot, size), dtype=np.complex128)
    S = np.zeros((nslot, nroots, size), dtype=np.complex128)
    sums = np.zeros(H + 1, dtype=np.complex128)
    full = np.zeros((H + 1) ** n if store_full else 1, dtype=np.complex128)
    G[0, 0] = 1.0
    sums[0] = 1.0
    if store_full:
        full[0] = 1.0
    min_den, min_flat, min_h = np.inf, 0, 0
    for h in range(1, H + 1):
        cur = h % nslot
        G[cur] = 0.0
        S[cur] = 0.0
        m = _compositions(h, n)
        flat = m[:, : n - 1] @ strides[: n - 1]
        e = np.zeros((m.shape[0], n + 1))
        e[:, :n] += m
        e[:, 1:] -= m
        den = np.sum(e * e, axis=1) + 2.0 * (e @ lam)
        tot = np.zeros(m.shape[0], dtype=np.complex128)
        for r in range(nroots):
            i, j = ij[r]
            prev = m - simple[r]
            ok = np.all(prev >= 0, axis=1)
            slot = (h - (j - i)) % nslot
            pflat = np.where(ok, prev[:, : n - 1] @ strides[: n - 1], 0)
            w = p[i] - p[j] + e[:, i] - e[:, j] - 2.0
            val = np.where(ok, S[slot, r, pflat] + w * G[slot, pflat], 0.0)
            S[cur, r, flat] = val
            tot += val
        a = np.abs(den)
        t = int(np.argmin(a))
        if a[t] < min_den:
            min_den, min_flat, min_h = a[t], int(flat[t]), h
        if a[t] < guard:
            return sums, full, RESONANCE_HIT, min_den, min_flat, min_h
        c = 2.0 * k * tot / den
        G[cur, flat] = c
        sums[h] = c.sum()
        if store_full:
            full[m @ strides] = c
    return sums, full, RESONANCE_OK, min_den, min_flat, min_h


def hc_stream(lam, p, k, n: int, H: int, store_full: bool = False, guard: float = 1e-10):
    """Run the coefficient recursion up to height ``H``.

    Returns ``(layer_sums, full, status, min_den, min_flat, min_h)``; ``full`` is
    the flattened dense (H+1)^n coefficient cube when ``store_full``.
    """
    ij, simple = _root_tables(n)
    lam = np.ascontiguousarray(lam, dtype=np.complex128)
    p = np.ascontiguousarray(p, dtype=np.complex128)
    fn = _hc_stream_nb if _backend == "numba" else _hc_stream_np
    return fn(lam, p, complex(k), int(n), int(H), ij, simple, bool(store_full), float(guard))


# ---------------------------------------------------------------------------
# Product integrand: prod_f |x[a_f] - x[b_f]|^{e_f} evaluated at many points.
# ---------------------------------------------------------------------------

def _logprod_py(X, XL, fa, fb, er, ei, out_re, out_im):
    P = X.shape[0]
    F = fa.shape[0]
    for q in range(P):
        sr = 0.0
        si = 0.0
        for f in range(F):
            d = (X[q, fa[f]] - X[q, fb[f]]) + (XL[q, fa[f]] - XL[q, fb[f]])
            lg = np.log(abs(d))
            sr += er[f] * lg
            si += ei[f] * lg
        out_re[q] = sr
        out_im[q] = si


if numba is not None:
    _logprod_nb = numba.njit(cache=True, nogil=True, fastmath=False)(_logprod_py)
else:  # pragma: no cover
    _logprod_nb = None


def _logprod_np(X, XL, fa, fb, er, ei, out_re, out_im):
    out_re[:] = 0.0
    out_im[:] = 0.0
    for f in range(fa.shape[0]):
        d = (X[:, fa[f]] - X[:, fb[f]]) + (XL[:, fa[f]] - XL[:, fb[f]])
        lg = np.log(np.abs(d))
        out_re += er[f] * lg
        out_im += ei[f] * lg


def log_product(X: np.ndarray, fa: np.ndarray, fb: np.ndarray, exps: np.ndarray, X_lo: np.ndarray | None = None) -> np.ndarray:
    """sum_f exps[f] * log|X[:, fa[f]] - X[:, fb[f]]| as a complex array.

    ``X_lo`` holds optional low-order parts of the coordinates (double-double
    positions), which keeps nearly coincident points distinguishable.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    XL = np.zeros_like(X) if X_lo is None else np.ascontiguousarray(X_lo, dtype=np.float64)
    P = X.shape[0]
    out_re = np.empty(P)
    out_im = np.empty(P)
    exps = np.asarray(exps, dtype=np.complex128)
    args = (X, XL, np.ascontiguousarray(fa, dtype=np.int64), np.ascontiguousarray(fb, dtype=np.int64),
            np.ascontiguousarray(exps.real), np.ascontiguousarray(exps.imag), out_re, out_im)
    if _backend == "numba":
        _logprod_nb(*args)
    else:
        _logprod_np(*args)
    return out_re + 1j * out_im


# ---------------------------------------------------------------------------
# Tensor-product quadrature over a nested domain, one flat index range.
#
# Variable v is placed between extended coordinates lower[v] and upper[v]
# from its cube coordinate u (and complement 1 - u) in double-double form.
# ---------------------------------------------------------------------------

def _tensor_chunk_py(start, stop, sizes, xs, cs, ws, offs, lower, upper, anchors, fa, fb, er, ei):
    V = sizes.shape[0]
    A = anchors.shape[0]
    F = fa.shape[0]
    X = np.empty(V + A)
    XL = np.zeros(V + A)
    for q in range(A):
        X[V + q] = anchors[q]
    digit = np.zeros(V, dtype=np.int64)
    rem = start
    for v in range(V - 1, -1, -1):
        digit[v] = rem % sizes[v]
        rem //= sizes[v]
    acc_re = 0.0
    acc_im = 0.0
    for _ in range(start, stop):
        w = 1.0
        logjac = 0.0
        for v in range(V):
            r = offs[v] + digit[v]
            u = xs[r]
            w *= ws[r]
            lo = lower[v]
            hi = upper[v]
            # width = X[hi] - X[lo] in double-double, rounded
            s = X[hi] - X[lo]
            bb = s - X[hi]
            e = (X[hi] - (s - bb)) + (-X[lo] - bb)
            width = s + (e + (XL[hi] - XL[lo]))
            logjac += np.log(width)
            if u <= 0.5:
                bh = X[lo]
                bl = XL[lo]
                step = width * u
            else:
                bh = X[hi]
                bl = XL[hi]
                step = -width * cs[r]
            s = bh + step
            bb = s - bh
            e = (bh - (s - bb)) + (step - bb) + bl
            h2 = s + e
            X[v] = h2
            XL[v] = e - (h2 - s)
        sr = logjac
        si = 0.0
        for f in range(F):
            d = (X[fa[f]] - X[fb[f]]) + (XL[fa[f]] - XL[fb[f]])
            lg = np.log(abs(d))
            sr += er[f] * lg
            si += ei[f] * lg
        mag = w * np.exp(sr)
        acc_re += mag * np.cos(si)
        acc_im += mag * np.sin(si)
        # odometer, last variable fastest
        v = V - 1
        while v >= 0:
            digit[v] += 1
            if digit[v] < sizes[v]:
                break
            digit[v] = 0
            v -= 1
    return acc_re, acc_im


if numba is not None:
    _tensor_chunk_nb = numba.njit(cache=True, nogil=True)(_tensor_chunk_py)
else:  # pragma: no cover
    _tensor_chunk_nb = None


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _tensor_chunk_np(start, stop, sizes, xs, cs, ws, offs, lower, upper, anchors, fa, fb, er, ei):
    V = sizes.shape[0]
    idx = np.unravel_index(np.arange(start, stop), tuple(sizes))
    P = stop - start
    X = np.empty((P, V + anchors.shape[0]))
    XL = np.zeros_like(X)
    X[:, V:] = anchors
    W = np.ones(P)
    logf = np.zeros(P, dtype=np.complex128)
    for v in range(V):
        r = offs[v] + idx[v]
        u, c = xs[r], cs[r]
        W *= ws[r]
        lo, hi = lower[v], upper[v]
        s, e = _two_sum(X[:, hi], -X[:, lo])
        width = s + (e + (XL[:, hi] - XL[:, lo]))
        logf += np.log(width)
        near = u <= 0.5
        bh = np.where(near, X[:, lo], X[:, hi])
        bl = np.where(near, XL[:, lo], XL[:, hi])
        step = np.where(near, width * u, -width * c)
        s, e = _two_sum(bh, step)
        e = e + bl
        X[:, v] = s + e
        XL[:, v] = e - (X[:, v] - s)
    exps = er + 1j * ei
    for f in range(fa.shape[0]):
        d = (X[:, fa[f]] - X[:, fb[f]]) + (XL[:, fa[f]] - XL[:, fb[f]])
        logf += exps[f] * np.log(np.abs(d))
    tot = np.dot(W, np.exp(logf))
    return tot.real, tot.imag


def tensor_chunk(start: int, stop: int, rules, lower, upper, anchors, fa, fb, exps) -> complex:
    """sum over flat tensor indices [start, stop) of weight * Jacobian * prod |x_a - x_b|^e.

    ``rules`` is a list of (nodes, complements, weights) on [0, 1], one per
    variable, outermost first; the last variable varies fastest.
    """
    sizes = np.array([len(r[0]) for r in rules], dtype=np.int64)
    offs = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    xs = np.ascontiguousarray(np.concatenate([r[0] for r in rules]), dtype=np.float64)
    cs = np.ascontiguousarray(np.concatenate([r[1] for r in rules]), dtype=np.float64)
    ws = np.ascontiguousarray(np.concatenate([r[2] for r in rules]), dtype=np.float64)
    exps = np.asarray(exps, dtype=np.complex128)
    args = (int(start), int(stop), sizes, xs, cs, ws, offs,
            np.ascontiguousarray(lower, dtype=np.int64), np.ascontiguousarray(upper, dtype=np.int64),
            np.ascontiguousarray(anchors, dtype=np.float64),
            np.ascontiguousarray(fa, dtype=np.int64), np.ascontiguousarray(fb, dtype=np.int64),
            np.ascontiguousarray(exps.real), np.ascontiguousarray(exps.imag))
    fn = _tensor_chunk_nb if _backend == "numba" else _tensor_chunk_np
    re, im = fn(*args)
    return complex(re, im)
