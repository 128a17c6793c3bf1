"""Group elements at working precision, congruence quotients and the
Iwahori factorization.

A group element is stored as g = pi^(-d) * M with d >= 0 and M an integral
matrix over O/p^L at some working pi-level L; the shift clears denominators
so no fraction ever appears.  For restriction families the matrix lives
over the extension ring O_E/p_E^L (a free module over the base ring), and
base-field congruence levels convert to pi_E-levels through e(E/F).
Normalization strips common uniformizer factors, which costs precision and
is therefore tracked: every exact test asserts the level it needs and
fails loudly instead of guessing.

The finite quotients K/K_m are enumerated once into `LevelQuotient` tables
(sorted mixed-radix keys, multiplication by plain matrix arithmetic plus
index lookup) and can be cached to a versioned binary file.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from . import _kernels as K
from .errors import (AuditFailure, PrecisionExhausted, RingMismatch,
                     SizeGuardExceeded)
from .fields import FieldDescriptor
from .rings import RingElem, TruncatedRing, truncated_ring
from .rootdata import Cochar, RootDatum

QUOTIENT_GUARD = 10_000          # max |K/K_m|
CANDIDATE_GUARD = 2_000_000      # max matrices scanned when enumerating K/K_m

_CACHE_MAGIC = b"CHKQUOT1"


class Backend:
    """A group family bound to a coefficient field at all working levels.

    For split GL_n / SL_n the coefficient field is the base field itself.
    For Res_{E/F} families it describes E, congruence levels stay in
    F-units, and ``plevel`` converts them to pi_E-levels.
    """

    def __init__(self, datum: RootDatum, coeff_field: FieldDescriptor):
        if datum.is_restriction and coeff_field.f % datum.ext_f != 0:
            raise ValueError("residue degree of E must be divisible by f(E/F)")
        self.datum = datum
        self.field = coeff_field
        self.n = datum.n
        self.e_tot = datum.ext_e
        self.base_q = coeff_field.p ** (coeff_field.f // datum.ext_f)
        self._quotients: dict[int, LevelQuotient] = {}

    def __repr__(self):
        return f"Backend({self.datum}, {self.field.describe()})"

    def plevel(self, m: int) -> int:
        return m * self.e_tot

    def ring(self, plevel: int) -> TruncatedRing:
        return truncated_ring(self.field, plevel)

    # -- element constructors -------------------------------------------------

    def identity(self, plevel: int) -> "GroupElem":
        ring = self.ring(plevel)
        mat = np.zeros((self.n, self.n, ring.num_digits), dtype=np.int64)
        for i in range(self.n):
            mat[i, i] = ring.one_coords
        return GroupElem(self, plevel, 0, mat)

    def from_rings(self, entries, plevel: int, d: int = 0) -> "GroupElem":
        ring = self.ring(plevel)
        mat = np.zeros((self.n, self.n, ring.num_digits), dtype=np.int64)
        for i in range(self.n):
            for j in range(self.n):
                mat[i, j] = ring.element(entries[i][j]).coords
        return GroupElem(self, plevel, d, mat)

    def pi_lambda(self, lam: Cochar, plevel: int) -> "GroupElem":
        """The diagonal element lam(pi_F), canonicalized with the minimal
        nonnegative central shift."""
        lam = self.datum.check_cochar(lam)
        ring = self.ring(plevel)
        plam = [self.e_tot * v for v in lam]
        d = max(0, -min(plam))
        mat = np.zeros((self.n, self.n, ring.num_digits), dtype=np.int64)
        for i in range(self.n):
            mat[i, i] = ring.pi_power(plam[i] + d).coords
        return GroupElem(self, plevel, d, mat)

    def element_shift(self, lam: Cochar) -> int:
        plam = [self.e_tot * v for v in self.datum.check_cochar(lam)]
        return max(0, -min(plam))

    def coset_spread(self, lam: Cochar) -> int:
        """d + max pi-elementary-divisor of the lam coset; the extra
        pi-precision a level-m membership ball needs."""
        plam = [self.e_tot * v for v in self.datum.check_cochar(lam)]
        return max(0, -min(plam)) + max(0, max(plam))

    # -- determinants ---------------------------------------------------------

    def det_batch(self, ring: TruncatedRing, mats: np.ndarray) -> np.ndarray:
        """Determinant digit vectors of a (N, r, r, D) batch."""
        r = self.n
        mul2, mod = ring.mul2, ring.moduli

        def mul(a, b):
            return K.ring_mul(a, b, mul2, mod)

        if r == 1:
            return mats[:, 0, 0].copy()
        if r == 2:
            return (mul(mats[:, 0, 0], mats[:, 1, 1])
                    - mul(mats[:, 0, 1], mats[:, 1, 0])) % mod
        m00 = mul(mats[:, 1, 1], mats[:, 2, 2]) - mul(mats[:, 1, 2], mats[:, 2, 1])
        m01 = mul(mats[:, 1, 0], mats[:, 2, 2]) - mul(mats[:, 1, 2], mats[:, 2, 0])
        m02 = mul(mats[:, 1, 0], mats[:, 2, 1]) - mul(mats[:, 1, 1], mats[:, 2, 0])
        return (mul(mats[:, 0, 0], m00 % mod)
                - mul(mats[:, 0, 1], m01 % mod)
                + mul(mats[:, 0, 2], m02 % mod)) % mod

    def adjugate_batch(self, ring: TruncatedRing, mats: np.ndarray) -> np.ndarray:
        r = self.n
        mul2, mod = ring.mul2, ring.moduli

        def mul(a, b):
            return K.ring_mul(a, b, mul2, mod)

        out = np.zeros_like(mats)
        if r == 1:
            out[:, 0, 0] = ring.one_coords
            return out
        if r == 2:
            out[:, 0, 0] = mats[:, 1, 1]
            out[:, 1, 1] = mats[:, 0, 0]
            out[:, 0, 1] = (-mats[:, 0, 1]) % mod
            out[:, 1, 0] = (-mats[:, 1, 0]) % mod
            return out
        for i in range(3):
            for j in range(3):
                rows = [k for k in range(3) if k != i]
                cols = [k for k in range(3) if k != j]
                minor = (mul(mats[:, rows[0], cols[0]], mats[:, rows[1], cols[1]])
                         - mul(mats[:, rows[0], cols[1]], mats[:, rows[1], cols[0]])) % mod
                if (i + j) % 2:
                    minor = (-minor) % mod
                out[:, j, i] = minor
        return out

    def family_mask(self, ring: TruncatedRing, mats: np.ndarray) -> np.ndarray:
        """Which matrices of the batch satisfy the family condition over
        the given ring (unit determinant for GL, determinant one for SL)."""
        dets = self.det_batch(ring, mats)
        if self.datum.family == "SL":
            return np.all(dets == ring.one_coords, axis=-1)
        f = self.field.f
        return (dets[:, :f] % self.field.p != 0).any(axis=-1)

    # -- quotient tables -------------------------------------------------------

    def quotient(self, m: int, guard: int = QUOTIENT_GUARD) -> "LevelQuotient":
        lq = self._quotients.get(m)
        if lq is None:
            lq = LevelQuotient(self, m, guard=guard)
            self._quotients[m] = lq
        return lq

    def lift_quotient_mat(self, lq: "LevelQuotient", idx: int,
                          plevel: int) -> "GroupElem":
        """Zero-padding lift of a quotient element into K at a working
        level, with the determinant corrected back to one for SL."""
        ring = self.ring(plevel)
        mat = lq.ring.lift_coords_to(ring, lq.mats[idx])
        g = GroupElem(self, plevel, 0, mat)
        if self.datum.family == "SL":
            det = g.det()
            if not det == ring.one:
                fix = ring.invert_unit(det)
                mat = mat.copy()
                for i in range(self.n):
                    mat[i, 0] = K.ring_mul(mat[i, 0], fix.coords, ring.mul2,
                                           ring.moduli)
                g = GroupElem(self, plevel, 0, mat)
        return g

    def lift_quotient_batch(self, lq: "LevelQuotient", plevel: int) -> np.ndarray:
        """Zero-padding lifts of the whole quotient table at a working
        level, determinant-corrected for SL so the lifts land in K."""
        ring = self.ring(plevel)
        mats = lq.ring.lift_coords_to(ring, lq.mats)
        if self.datum.family == "SL":
            dets = self.det_batch(ring, mats)
            fix = ring.invert_unit_batch(dets)
            for i in range(self.n):
                mats[:, i, 0] = K.ring_mul(mats[:, i, 0], fix, ring.mul2,
                                           ring.moduli)
        return mats

    def congruence_generators(self, m: int, span_plevel: int,
                              at_plevel: int | None = None) -> np.ndarray:
        """Matrices generating K_m modulo K_(span_plevel): one-parameter
        root elements I + c E_ij and torus elements with 1 + c on the
        diagonal, c running over an additive spanning set of
        p_F^m / pi^span_plevel.  Returned over the ring at ``at_plevel``
        (default the span level)."""
        plevel = at_plevel if at_plevel is not None else span_plevel
        ring = self.ring(plevel)
        lo = self.plevel(max(m, 1))
        mons = ring.scaled_monomials(lo, span_plevel)
        r = self.n
        eye = self.identity(plevel).mat
        gens = []
        for b in mons:
            for i in range(r):
                for j in range(r):
                    if i == j:
                        continue
                    g = eye.copy()
                    g[i, j] = b
                    gens.append(g)
            units = (ring.one_coords + b) % ring.moduli
            if self.datum.family == "GL":
                for i in range(r):
                    g = eye.copy()
                    g[i, i] = units
                    gens.append(g)
            else:
                uinv = ring.invert_unit_batch(units[None, :])[0]
                for i in range(r - 1):
                    g = eye.copy()
                    g[i, i] = units
                    g[i + 1, i + 1] = uinv
                    gens.append(g)
        if not gens:
            return eye[None, ...].copy()
        return np.stack(gens)


class GroupElem:
    """g = pi^(-d) * mat with mat integral over O/p^level."""

    __slots__ = ("ctx", "level", "d", "mat")

    def __init__(self, ctx: Backend, level: int, d: int, mat: np.ndarray):
        self.ctx = ctx
        self.level = level
        self.d = d
        self.mat = np.ascontiguousarray(mat, dtype=np.int64)

    @property
    def ring(self) -> TruncatedRing:
        return self.ctx.ring(self.level)

    def entry(self, i: int, j: int) -> RingElem:
        return RingElem(self.ring, self.mat[i, j])

    def det(self) -> RingElem:
        return RingElem(self.ring, self.ctx.det_batch(self.ring, self.mat[None])[0])

    def reduce_to(self, plevel: int) -> "GroupElem":
        if plevel > self.level:
            raise PrecisionExhausted(
                f"element known at pi-level {self.level}, need {plevel}")
        if plevel == self.level:
            return self
        tgt = self.ctx.ring(plevel)
        return GroupElem(self.ctx, plevel, self.d,
                         self.ring.reduce_coords_to(tgt, self.mat))

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        if other.ctx is not self.ctx:
            raise RingMismatch("elements from different backends")
        lvl = min(self.level, other.level)
        a, b = self.reduce_to(lvl), other.reduce_to(lvl)
        ring = a.ring
        mat = K.mat_mul(a.mat, b.mat, ring.mul2, ring.moduli)
        return GroupElem(self.ctx, lvl, self.d + other.d, mat)

    def inv(self) -> "GroupElem":
        ring = self.ring
        det = self.det()
        v = ring.valuation(det)
        if v >= ring.level:
            raise PrecisionExhausted("determinant valuation not certified")
        unit = det
        for _ in range(v):
            unit = unit.ring.divide_by_pi(unit)
        lvl = self.level - v
        tgt = self.ctx.ring(lvl)
        uinv = unit.ring.invert_unit(unit)
        adj = self.ctx.adjugate_batch(ring, self.mat[None])[0]
        adj = ring.reduce_coords_to(tgt, adj)
        r = self.ctx.n
        flat = K.ring_mul(adj.reshape(r * r, -1),
                          np.broadcast_to(uinv.coords, (r * r, tgt.num_digits)).copy(),
                          tgt.mul2, tgt.moduli)
        mat = flat.reshape(r, r, tgt.num_digits)
        dprime = v - self.d
        if dprime < 0:
            scale = tgt.pi_power(-dprime).coords
            flat = K.ring_mul(mat.reshape(r * r, -1),
                              np.broadcast_to(scale, (r * r, tgt.num_digits)).copy(),
                              tgt.mul2, tgt.moduli)
            mat = flat.reshape(r, r, tgt.num_digits)
            dprime = 0
        return GroupElem(self.ctx, lvl, dprime, mat)

    def min_valuation(self) -> int:
        """Smallest entry valuation of mat, clamped at the level."""
        return int(self.ring.valuations_batch(self.mat.reshape(-1, self.ring.num_digits)).min())

    def normalized(self) -> "GroupElem":
        """Strip common uniformizer factors shared by d and the matrix, so
        the shift becomes the intrinsic max(0, -min valuation of g)."""
        if self.d == 0:
            return self
        v = self.min_valuation()
        if v >= self.level and self.d > 0:
            raise PrecisionExhausted("cannot normalize: matrix vanishes at level")
        s = min(self.d, v)
        if s == 0:
            return self
        ring = self.ring
        flat = self.mat.reshape(-1, ring.num_digits)
        for _ in range(s):
            flat = ring.divide_by_pi_batch(flat)
            ring = truncated_ring(ring.desc, ring.level - 1)
        mat = flat.reshape(self.ctx.n, self.ctx.n, ring.num_digits)
        return GroupElem(self.ctx, self.level - s, self.d - s, mat)

    def same_element(self, other: "GroupElem") -> bool:
        a, b = self.normalized(), other.normalized()
        if a.d != b.d:
            return False
        lvl = min(a.level, b.level)
        return bool(np.array_equal(a.reduce_to(lvl).mat, b.reduce_to(lvl).mat))

    def is_in_K(self) -> bool:
        g = self.normalized()
        if g.d != 0:
            return False
        if self.ctx.datum.family == "SL":
            return bool(g.det() == g.ring.one)
        return g.ring.valuation(g.det()) == 0

    def is_in_Km(self, m: int) -> bool:
        mp = self.ctx.plevel(m)
        g = self.normalized()
        if g.d != 0 or g.level < mp:
            return False
        tgt = self.ctx.ring(mp)
        red = g.ring.reduce_coords_to(tgt, g.mat)
        return bool(np.array_equal(red, self.ctx.identity(mp).mat)) and g.is_in_K()

    def __repr__(self):
        ring = self.ring
        rows = []
        for i in range(self.ctx.n):
            rows.append("[" + ", ".join(ring.format_coords(self.mat[i, j])
                                        for j in range(self.ctx.n)) + "]")
        head = f"pi^-{self.d} * " if self.d else ""
        return head + "[" + " ".join(rows) + f"] @L{self.level}"


def iwahori_factor(g: GroupElem, m: int) -> tuple[GroupElem, GroupElem, GroupElem]:
    """Unique factorization g = u_plus * torus * u_minus of an element of
    K_m (m >= 1) with u_plus upper unitriangular, torus diagonal and
    u_minus lower unitriangular, all congruent to 1 mod p_F^m.

    Computed by eliminating with the unit pivots in reversed index order,
    which is the plain LDU decomposition of the index-reversed matrix.
    """
    if m < 1 or not g.is_in_Km(m):
        raise ValueError("iwahori_factor expects an element of K_m, m >= 1")
    ctx, r = g.ctx, g.ctx.n
    ring = g.ring
    rev = list(range(r - 1, -1, -1))
    a = [[g.entry(rev[i], rev[j]) for j in range(r)] for i in range(r)]
    low = [[ring.one if i == j else ring.element(0) for j in range(r)] for i in range(r)]
    for k in range(r):
        pivot_inv = ring.invert_unit(a[k][k])
        for i in range(k + 1, r):
            mult = a[i][k] * pivot_inv
            low[i][k] = mult
            for j in range(r):
                a[i][j] = a[i][j] - mult * a[k][j]
    diag = [a[k][k] for k in range(r)]
    upp = [[ring.one if i == j else ring.element(0) for j in range(r)] for i in range(r)]
    for i in range(r):
        dinv = ring.invert_unit(diag[i])
        for j in range(i + 1, r):
            upp[i][j] = dinv * a[i][j]

    def unrev(mat):
        return [[mat[rev.index(i)][rev.index(j)] for j in range(r)] for i in range(r)]

    # index reversal swaps lower and upper unitriangular shapes
    u_plus = ctx.from_rings(unrev(low), g.level)
    torus = ctx.from_rings(
        [[diag[rev.index(i)] if i == j else ring.element(0) for j in range(r)]
         for i in range(r)], g.level)
    u_minus = ctx.from_rings(unrev(upp), g.level)
    recomposed = u_plus * torus * u_minus
    if not recomposed.same_element(g):
        raise AuditFailure("iwahori factorization failed to recompose")
    return u_plus, torus, u_minus


def quotient_order(ctx: Backend, plevel: int) -> int:
    """Closed-form order of G(O/pi^plevel) for the backend's family."""
    q = ctx.field.q
    r = ctx.n
    gl1 = 1
    for k in range(r):
        gl1 *= q**r - q**k
    gl = q ** ((plevel - 1) * r * r) * gl1
    if ctx.datum.family == "GL":
        return gl
    units = q ** (plevel - 1) * (q - 1)
    return gl // units


class LevelQuotient:
    """The finite group K/K_m = G(O/p_F^m), fully enumerated.

    Elements are stored in ascending mixed-radix key order (coordinate
    lexicographic), which fixes the canonical enumeration shared by all
    orbit computations.  Multiplication is table-free: matrix arithmetic
    plus binary search on the key array.
    """

    def __init__(self, ctx: Backend, m: int, guard: int = QUOTIENT_GUARD,
                 _from_cache: tuple | None = None):
        self.ctx = ctx
        self.m = m
        self.ring = ctx.ring(ctx.plevel(m))
        r = ctx.n
        self.mat_moduli = np.tile(self.ring.moduli, r * r)
        self.mat_strides = self._matrix_strides()
        if _from_cache is not None:
            keys, = _from_cache
            self.keys = np.ascontiguousarray(keys, dtype=np.int64)
            self.mats = self._decode(self.keys)
        else:
            self.keys, self.mats = self._enumerate(guard)
        self.size = int(self.keys.shape[0])
        self._check_order()
        self._inv_idx = None
        self.version = self._version_hash()
        self.keys.setflags(write=False)

    def _matrix_strides(self) -> np.ndarray:
        r = self.ctx.n
        d = self.ring.num_digits
        total = r * r * d
        strides = np.ones(total, dtype=np.int64)
        for c in range(total - 2, -1, -1):
            nxt = int(self.mat_moduli[c + 1])
            if strides[c + 1] > (1 << 62) // max(nxt, 1):
                raise SizeGuardExceeded("matrix key would overflow int64")
            strides[c] = strides[c + 1] * nxt
        return strides.reshape(r, r, d)

    def _decode(self, keys: np.ndarray) -> np.ndarray:
        r, d = self.ctx.n, self.ring.num_digits
        flat_strides = self.mat_strides.reshape(-1)
        out = np.zeros((keys.shape[0], r * r * d), dtype=np.int64)
        rem = keys.copy()
        for c in range(r * r * d):
            out[:, c] = rem // flat_strides[c]
            rem = rem % flat_strides[c]
        return out.reshape(-1, r, r, d)

    def _enumerate(self, guard: int):
        r = self.ctx.n
        total = self.ring.size ** (r * r)
        if total > CANDIDATE_GUARD:
            raise SizeGuardExceeded(
                f"quotient enumeration would scan {total} matrices")
        keys_out, chunk = [], 1 << 16
        for start in range(0, total, chunk):
            ks = np.arange(start, min(start + chunk, total), dtype=np.int64)
            mats = self._decode(ks)
            mask = self.ctx.family_mask(self.ring, mats)
            keys_out.append(ks[mask])
        keys = np.concatenate(keys_out)
        if keys.shape[0] > guard:
            raise SizeGuardExceeded(
                f"|K/K_m| = {keys.shape[0]} exceeds guard {guard}")
        return keys, self._decode(keys)

    def _check_order(self):
        expected = quotient_order(self.ctx, self.ring.level)
        if self.size != expected:
            raise AuditFailure(
                f"enumerated {self.size} elements, closed form {expected}")

    def _version_hash(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps({
            "field": self.ctx.field.to_json_dict(),
            "family": self.ctx.datum.family,
            "n": self.ctx.n,
            "ext": [self.ctx.datum.ext_e, self.ctx.datum.ext_f],
            "m": self.m,
        }, sort_keys=True).encode())
        h.update(self.keys.tobytes())
        return h.hexdigest()[:16]

    # -- index arithmetic -------------------------------------------------------

    def encode_mats(self, mats: np.ndarray) -> np.ndarray:
        return K.encode(mats, self.mat_strides)

    def index_of_keys(self, keys) -> np.ndarray:
        keys = np.atleast_1d(np.asarray(keys, dtype=np.int64))
        pos = np.searchsorted(self.keys, keys)
        if np.any(pos >= self.size) or np.any(self.keys[pos] != keys):
            raise AuditFailure("matrix is not a quotient element")
        return pos

    def index_of_mats(self, mats: np.ndarray) -> np.ndarray:
        return self.index_of_keys(self.encode_mats(mats))

    def identity_index(self) -> int:
        eye = np.zeros_like(self.mats[0])
        for i in range(self.ctx.n):
            eye[i, i] = self.ring.one_coords
        return int(self.index_of_keys(self.encode_mats(eye[None]))[0])

    def mult_rows(self, i: int, js: np.ndarray | None = None) -> np.ndarray:
        """Indices of element i times each element of js (default: all)."""
        rhs = self.mats if js is None else self.mats[js]
        prods = K.mat_mul(np.broadcast_to(self.mats[i], rhs.shape).copy(), rhs,
                          self.ring.mul2, self.ring.moduli)
        return self.index_of_mats(prods)

    def mult_idx(self, i: int, j: int) -> int:
        prod = K.mat_mul(self.mats[i], self.mats[j], self.ring.mul2,
                         self.ring.moduli)
        return int(self.index_of_mats(prod[None])[0])

    def inv_indices(self) -> np.ndarray:
        if self._inv_idx is None:
            ring = self.ring
            dets = self.ctx.det_batch(ring, self.mats)
            dinv = ring.invert_unit_batch(dets)
            adj = self.ctx.adjugate_batch(ring, self.mats)
            r = self.ctx.n
            flat = adj.reshape(self.size * r * r, -1)
            scale = np.repeat(dinv, r * r, axis=0)
            inv = K.ring_mul(flat, scale, ring.mul2, ring.moduli)
            self._inv_idx = self.index_of_mats(inv.reshape(self.size, r, r, -1))
        return self._inv_idx

    def inv_idx(self, i: int) -> int:
        return int(self.inv_indices()[i])

    def reduction_to(self, other: "LevelQuotient") -> np.ndarray:
        """Index map of the canonical surjection K/K_m -> K/K_m'."""
        if other.m > self.m:
            raise ValueError("reduction target must be a lower level")
        red = self.ring.reduce_coords_to(other.ring, self.mats)
        return other.index_of_mats(red)

    # -- cache file --------------------------------------------------------------

    def save(self, path):
        header = json.dumps({
            "version": 1,
            "hash": self.version,
            "field": self.ctx.field.to_json_dict(),
            "family": self.ctx.datum.family,
            "n": self.ctx.n,
            "ext": [self.ctx.datum.ext_e, self.ctx.datum.ext_f],
            "m": self.m,
            "count": self.size,
        }, sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(len(header).to_bytes(4, "little"))
            fh.write(header)
            fh.write(self.keys.astype("<i8").tobytes())

    @classmethod
    def load(cls, path, ctx: Backend) -> "LevelQuotient":
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
            raise AuditFailure("quotient cache: bad magic")
        off = len(_CACHE_MAGIC)
        hlen = int.from_bytes(blob[off:off + 4], "little")
        off += 4
        header = json.loads(blob[off:off + hlen])
        off += hlen
        if (header["field"] != ctx.field.to_json_dict()
                or header["family"] != ctx.datum.family
                or header["n"] != ctx.n
                or header["ext"] != [ctx.datum.ext_e, ctx.datum.ext_f]):
            raise AuditFailure("quotient cache: backend mismatch")
        keys = np.frombuffer(blob[off:], dtype="<i8").astype(np.int64)
        if keys.shape[0] != header["count"]:
            raise AuditFailure("quotient cache: truncated key table")
        if np.any(np.diff(keys) <= 0):
            raise AuditFailure("quotient cache: keys not strictly ascending")
        lq = cls(ctx, header["m"], _from_cache=(keys,))
        if lq.version != header["hash"]:
            raise AuditFailure("quotient cache: version hash mismatch")
        return lq
