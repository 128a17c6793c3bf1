"""Hot array kernels for arithmetic over finite truncated rings.

A ring element is a vector of ``D`` int64 digits, one per basis monomial,
digit ``k`` reduced modulo its own modulus ``moduli[k]``.  Products of basis
monomials are precomputed into a ``(D*D, D)`` table ``mul2`` so that

    (x * y)[k]  =  sum_{c,d} x[c] * y[d] * mul2[c*D + d, k]   (mod moduli[k])

Matrices over the ring are ``(r, r, D)`` arrays; batches stack on a leading
axis.  Everything expensive in the package (coset materialization,
stabilizer sweeps, convolution counting) reduces to batched ring matmuls
plus mixed-radix encoding, which is what lives here.

Two interchangeable implementations are provided: a vectorized numpy path
and numba ``@njit`` loops.  The active one is picked at import time; set
``CLOSEHECKE_DISABLE_NUMBA=1`` to force the numpy path.  Both stay
importable (``numpy_impl`` / ``numba_impl``) for cross-checks and for the
benchmark script.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

DISABLE_ENV = "CLOSEHECKE_DISABLE_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# numpy implementations.  Shapes are strict here; the public wrappers below
# normalize their inputs.


def _np_ring_mul(x, y, mul2, mod):
    # x, y: (N, D) -> (N, D)
    n, d = x.shape
    pair = (x[:, :, None] * y[:, None, :]).reshape(n, d * d)
    return (pair @ mul2) % mod


def _np_mat_mul(a, b, mul2, mod):
    # a, b: (N, r, r, D) -> (N, r, r, D)
    n, r, _, d = a.shape
    acc = np.zeros((n, r, r, d * d), dtype=np.int64)
    for l in range(r):
        acc += (a[:, :, None, l, :, None] * b[:, None, l, :, None, :]).reshape(
            n, r, r, d * d
        )
    out = acc.reshape(n * r * r, d * d) @ mul2
    return out.reshape(n, r, r, d) % mod


def _np_encode(m, strides):
    # m: (N, r, r, D), strides: (r, r, D) -> (N,)
    n = m.shape[0]
    return m.reshape(n, -1) @ strides.reshape(-1)


def _np_linmap(x, lin, mod):
    # x: (N, Ds), lin: (Dt, Ds) -> (N, Dt)
    return (x @ lin.T) % mod


numpy_impl = SimpleNamespace(
    name="numpy",
    ring_mul=_np_ring_mul,
    mat_mul=_np_mat_mul,
    encode=_np_encode,
    linmap=_np_linmap,
)


# ---------------------------------------------------------------------------
# numba implementations (loop nests compiled once per signature).

numba_impl = None
if not _numba_disabled():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None

    if njit is not None:

        @njit(cache=True)
        def _nb_ring_mul(x, y, mul2, mod):
            n, d = x.shape
            out = np.zeros((n, d), dtype=np.int64)
            for i in range(n):
                for c in range(d):
                    xc = x[i, c]
                    if xc == 0:
                        continue
                    for e in range(d):
                        ye = y[i, e]
                        if ye == 0:
                            continue
                        w = xc * ye
                        row = c * d + e
                        for k in range(d):
                            t = mul2[row, k]
                            if t != 0:
                                out[i, k] += w * t
            for i in range(n):
                for k in range(d):
                    out[i, k] %= mod[k]
            return out

        @njit(cache=True)
        def _nb_mat_mul(a, b, mul2, mod):
            n, r, _, d = a.shape
            out = np.zeros((n, r, r, d), dtype=np.int64)
            for i in range(n):
                for p in range(r):
                    for q in range(r):
                        for l in range(r):
                            for c in range(d):
                                xc = a[i, p, l, c]
                                if xc == 0:
                                    continue
                                for e in range(d):
                                    ye = b[i, l, q, e]
                                    if ye == 0:
                                        continue
                                    w = xc * ye
                                    row = c * d + e
                                    for k in range(d):
                                        t = mul2[row, k]
                                        if t != 0:
                                            out[i, p, q, k] += w * t
                        for k in range(d):
                            out[i, p, q, k] %= mod[k]
            return out

        @njit(cache=True)
        def _nb_encode(m, strides):
            n = m.shape[0]
            flat = m.reshape(n, -1)
            s = strides.reshape(-1)
            out = np.zeros(n, dtype=np.int64)
            for i in range(n):
                acc = 0
                for j in range(s.shape[0]):
                    acc += flat[i, j] * s[j]
                out[i] = acc
            return out

        @njit(cache=True)
        def _nb_linmap(x, lin, mod):
            n, ds = x.shape
            dt = lin.shape[0]
            out = np.zeros((n, dt), dtype=np.int64)
            for i in range(n):
                for k in range(dt):
                    acc = 0
                    for c in range(ds):
                        acc += lin[k, c] * x[i, c]
                    out[i, k] = acc % mod[k]
            return out

        numba_impl = SimpleNamespace(
            name="numba",
            ring_mul=_nb_ring_mul,
            mat_mul=_nb_mat_mul,
            encode=_nb_encode,
            linmap=_nb_linmap,
        )

impl = numba_impl if numba_impl is not None else numpy_impl
USING_NUMBA = impl is not numpy_impl


# ---------------------------------------------------------------------------
# Public wrappers: accept single elements or batches, broadcast one-to-many,
# and keep dtype discipline in one place.


def _as_batch(x, core_ndim):
    x = np.ascontiguousarray(x, dtype=np.int64)
    if x.ndim == core_ndim:
        return x[None, ...], True
    if x.ndim == core_ndim + 1:
        return x, False
    raise ValueError(f"expected {core_ndim} or {core_ndim + 1} dims, got {x.ndim}")


def ring_mul(x, y, mul2, mod):
    """Elementwise ring product; ``x`` and ``y`` are (D,) or (N, D)."""
    xb, xs = _as_batch(x, 1)
    yb, ys = _as_batch(y, 1)
    if xb.shape[0] == 1 and yb.shape[0] > 1:
        xb = np.broadcast_to(xb, yb.shape).copy()
    elif yb.shape[0] == 1 and xb.shape[0] > 1:
        yb = np.broadcast_to(yb, xb.shape).copy()
    out = impl.ring_mul(xb, yb, mul2, mod)
    return out[0] if (xs and ys) else out


def mat_mul(a, b, mul2, mod):
    """Ring matrix product; operands are (r, r, D) or (N, r, r, D)."""
    ab, asingle = _as_batch(a, 3)
    bb, bsingle = _as_batch(b, 3)
    if ab.shape[0] == 1 and bb.shape[0] > 1:
        ab = np.broadcast_to(ab, bb.shape).copy()
    elif bb.shape[0] == 1 and ab.shape[0] > 1:
        bb = np.broadcast_to(bb, ab.shape).copy()
    out = impl.mat_mul(ab, bb, mul2, mod)
    return out[0] if (asingle and bsingle) else out


def encode(m, strides):
    """Mixed-radix key of each matrix; (r, r, D) or (N, r, r, D) input."""
    mb, single = _as_batch(m, 3)
    out = impl.encode(mb, np.ascontiguousarray(strides, dtype=np.int64))
    return int(out[0]) if single else out


def linmap(x, lin, mod):
    """Apply an integer-matrix linear map to digit vectors, then reduce."""
    xb, single = _as_batch(x, 1)
    out = impl.linmap(xb, np.ascontiguousarray(lin, dtype=np.int64), mod)
    return out[0] if single else out


def keys_in_sorted(sorted_keys, queries):
    """Boolean membership of ``queries`` against an ascending key array."""
    queries = np.asarray(queries, dtype=np.int64)
    pos = np.searchsorted(sorted_keys, queries)
    ok = pos < sorted_keys.shape[0]
    hit = np.zeros(queries.shape, dtype=bool)
    hit[ok] = sorted_keys[pos[ok]] == queries[ok]
    return hit
