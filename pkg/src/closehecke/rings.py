"""Exact arithmetic in truncated local rings O/p^n.

Ring elements are digit vectors over a fixed monomial basis.  For an
equal-characteristic field F_q((t)) the level-n ring is F_q[t]/(t^n) with
basis ``y^j t^i`` (i < n, j < f) and every digit mod p.  For a mixed-kind
field defined by a monic Eisenstein polynomial of degree e the basis is
``y^j pi^i`` with i < min(e, n) and the digit at pi-degree i reduced mod
``p^ceil((n-i)/e)``; the Eisenstein relation is applied eagerly so the
digit vector is a unique canonical form.  Both shapes have exactly q^n
elements and a nilpotent uniformizer of index n.

The multiplication of basis monomials is precomputed into the dense table
consumed by `closehecke._kernels`, so batched arithmetic never re-enters
the symbolic reduction path.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .errors import NotAUnit, PrecisionExhausted, RingMismatch
from .fields import FieldDescriptor

_INT64_BUDGET = 1 << 62


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0 and n != 0:
        n //= p
        v += 1
    return v


def _poly_rem(coeffs: list[int], g) -> list[int]:
    """Remainder of an integer polynomial modulo monic g, little-endian."""
    r = list(coeffs)
    dg = len(g) - 1
    while len(r) > dg:
        lead = r.pop()
        if lead == 0:
            continue
        for j in range(dg):
            r[len(r) - dg + j] -= lead * g[j]
    return r


class TruncatedRing:
    """The finite ring O/p^n of a field descriptor at level n >= 1."""

    def __init__(self, desc: FieldDescriptor, level: int):
        if level < 1:
            raise ValueError("level must be >= 1")
        self.desc = desc
        self.level = level
        p, f = desc.p, desc.f
        if desc.kind == "mixed":
            e = desc.e
            self.pi_degrees = min(e, level)
            self.kexp = tuple(-((level - i) // -e) for i in range(self.pi_degrees))
        else:
            self.pi_degrees = level
            self.kexp = tuple(1 for _ in range(self.pi_degrees))
        self.num_digits = self.pi_degrees * f
        moduli = [p ** self.kexp[i] for i in range(self.pi_degrees) for _ in range(f)]
        self.moduli = np.array(moduli, dtype=np.int64)
        self.size = 1
        for m in moduli:
            self.size *= m
        strides = np.ones(self.num_digits, dtype=np.int64)
        for c in range(self.num_digits - 2, -1, -1):
            strides[c] = strides[c + 1] * moduli[c + 1]
        self.elem_strides = strides
        if self.num_digits**2 * int(self.moduli.max()) ** 3 >= _INT64_BUDGET:
            raise PrecisionExhausted("digit products would overflow int64 kernels")

        self._build_mul_table()
        self.zero = np.zeros(self.num_digits, dtype=np.int64)
        self.one_coords = self._reduce({(0, 0): 1})
        self.pi_coords = self._reduce({(1, 0): 1})
        self.y_coords = self._reduce({(0, 1): 1}) if f > 1 else self.one_coords.copy()
        self._res_inv = self._build_residue_inverses()
        self._p_over_pi = None
        for a in (self.moduli, self.elem_strides, self.mul2, self.zero,
                  self.one_coords, self.pi_coords, self.y_coords):
            a.setflags(write=False)

    # -- canonical reduction of integer (pi, y) polynomials ------------------

    def _digit_index(self, i: int, j: int) -> int:
        return i * self.desc.f + j

    def _term_is_zero(self, i: int, c: int) -> bool:
        if c == 0:
            return True
        if self.desc.kind == "equal":
            return i >= self.level or c % self.desc.p == 0
        return self.desc.e * _vp(c, self.desc.p) + i >= self.level

    def _reduce(self, terms: dict) -> np.ndarray:
        """Canonical digit vector of sum of c * y^j * pi^i terms (exact)."""
        desc = self.desc
        f = desc.f
        g = desc.residue_poly
        work = dict(terms)
        guard = 0
        while True:
            guard += 1
            if guard > 64 + 4 * self.level:
                raise RuntimeError("reduction did not terminate")
            # fold y-degrees below f
            by_i: dict[int, list[int]] = {}
            for (i, j), c in work.items():
                if c == 0:
                    continue
                row = by_i.setdefault(i, [])
                while len(row) <= j:
                    row.append(0)
                row[j] += c
            work = {}
            for i, row in by_i.items():
                for j, c in enumerate(_poly_rem(row, g)):
                    if not self._term_is_zero(i, c):
                        work[(i, j)] = work.get((i, j), 0) + c
            if desc.kind == "equal":
                break
            high = {k: v for k, v in work.items() if k[0] >= desc.e}
            if not high:
                break
            for (i, j), c in high.items():
                del work[(i, j)]
                for s, cs in enumerate(desc.eisenstein):
                    for jj, cc in enumerate(cs):
                        if cc == 0:
                            continue
                        key = (i - desc.e + s, j + jj)
                        work[key] = work.get(key, 0) - cc * c
        out = np.zeros(self.num_digits, dtype=np.int64)
        for (i, j), c in work.items():
            if i < self.pi_degrees:
                d = self._digit_index(i, j)
                out[d] = (out[d] + c) % int(self.moduli[d])
        return out

    def _build_mul_table(self):
        d = self.num_digits
        f = self.desc.f
        table = np.zeros((d * d, d), dtype=np.int64)
        for c1 in range(d):
            i1, j1 = divmod(c1, f)
            for c2 in range(c1, d):
                i2, j2 = divmod(c2, f)
                col = self._reduce({(i1 + i2, j1 + j2): 1})
                table[c1 * d + c2] = col
                table[c2 * d + c1] = col
        self.mul2 = table

    def _build_residue_inverses(self):
        """Inverse table of the residue field F_q, indexed base p by digits."""
        p, f = self.desc.p, self.desc.f
        g = self.desc.residue_poly
        q = p**f

        def rmul(a, b):
            prod = [0] * (2 * f - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    prod[i + j] += x * y
            return tuple(v % p for v in _poly_rem(prod, g))

        def idx(a):
            k = 0
            for v in reversed(a):
                k = k * p + v
            return k

        elems = []
        for k in range(q):
            digs, kk = [], k
            for _ in range(f):
                digs.append(kk % p)
                kk //= p
            elems.append(tuple(digs))
        one = tuple([1] + [0] * (f - 1))
        inv = [-1] * q
        for a in elems:
            if all(v == 0 for v in a):
                continue
            for b in elems:
                if rmul(a, b) == one:
                    inv[idx(a)] = idx(b)
                    break
            else:
                raise RuntimeError("residue field inverse missing; g not irreducible?")
        return np.array(inv, dtype=np.int64)

    # -- basic API ------------------------------------------------------------

    def __repr__(self):
        return f"TruncatedRing({self.desc.describe()}, level={self.level})"

    def element(self, value) -> "RingElem":
        """Coerce an int, digit vector or RingElem into this ring."""
        if isinstance(value, RingElem):
            if value.ring is not self:
                raise RingMismatch("ring mismatch")
            return value
        if isinstance(value, (int, np.integer)):
            return RingElem(self, self._reduce({(0, 0): int(value)}))
        arr = np.asarray(value, dtype=np.int64)
        if arr.shape != (self.num_digits,):
            raise ValueError("bad digit vector shape")
        return RingElem(self, arr % self.moduli)

    @property
    def one(self) -> "RingElem":
        return RingElem(self, self.one_coords)

    @property
    def pi(self) -> "RingElem":
        return RingElem(self, self.pi_coords)

    @property
    def ygen(self) -> "RingElem":
        return RingElem(self, self.y_coords)

    def pi_power(self, k: int) -> "RingElem":
        if k < 0:
            raise ValueError("negative uniformizer power has no ring meaning")
        return RingElem(self, self._reduce({(k, 0): 1}))

    def monomial(self, s: int, i: int, j: int) -> "RingElem":
        return RingElem(self, self._reduce({(i, j): self.desc.p**s}))

    def add(self, x, y):
        self._check(x, y)
        return RingElem(self, (x.coords + y.coords) % self.moduli)

    def sub(self, x, y):
        self._check(x, y)
        return RingElem(self, (x.coords - y.coords) % self.moduli)

    def mul(self, x, y):
        self._check(x, y)
        return RingElem(self, K.ring_mul(x.coords, y.coords, self.mul2, self.moduli))

    def neg(self, x):
        self._check(x)
        return RingElem(self, (-x.coords) % self.moduli)

    def _check(self, *elems):
        for x in elems:
            if not isinstance(x, RingElem) or x.ring is not self:
                raise RingMismatch("ring mismatch")

    # -- valuation, units, uniformizer division --------------------------------

    def valuation(self, x) -> int | float:
        """Largest k < n with x in pi^k * ring; math.inf exactly for 0
        (at level n, valuation >= n happens only for the zero class)."""
        self._check(x)
        return self.valuation_coords(x.coords)

    def valuation_coords(self, coords) -> int | float:
        e = self.desc.e if self.desc.kind == "mixed" else None
        f = self.desc.f
        best = math.inf
        for d in range(self.num_digits):
            c = int(coords[d])
            if c == 0:
                continue
            i = d // f
            v = i if e is None else i + e * _vp(c, self.desc.p)
            if v < best:
                best = v
        return best

    def valuations_batch(self, coords: np.ndarray) -> np.ndarray:
        """Valuation of each digit vector along the last axis, with the
        ring level as the clamped value for the zero class."""
        desc, f = self.desc, self.desc.f
        i_of_digit = np.arange(self.num_digits, dtype=np.int64) // f
        if desc.kind == "equal":
            digval = np.where(coords % desc.p != 0, i_of_digit, self.level)
        else:
            vp = np.zeros(coords.shape, dtype=np.int64)
            tmp = np.abs(coords.copy())
            for _ in range(max(self.kexp)):
                mask = (tmp != 0) & (tmp % desc.p == 0)
                if not mask.any():
                    break
                vp[mask] += 1
                tmp[mask] //= desc.p
            digval = np.where(coords != 0, i_of_digit + desc.e * vp, self.level)
        return np.minimum(digval.min(axis=-1), self.level)

    def residue_index(self, coords) -> int:
        p, f = self.desc.p, self.desc.f
        k = 0
        for j in range(f - 1, -1, -1):
            k = k * p + int(coords[self._digit_index(0, j)]) % p
        return k

    def invert_unit(self, x) -> "RingElem":
        self._check(x)
        if self.valuation(x) != 0:
            raise NotAUnit("not a unit")
        return RingElem(self, self.invert_unit_batch(x.coords[None, :])[0])

    def invert_unit_batch(self, xs: np.ndarray) -> np.ndarray:
        """Newton inversion of unit digit vectors, shape (N, D)."""
        p, f = self.desc.p, self.desc.f
        res_idx = np.zeros(xs.shape[0], dtype=np.int64)
        for j in range(f - 1, -1, -1):
            res_idx = res_idx * p + xs[:, self._digit_index(0, j)] % p
        inv_idx = self._res_inv[res_idx]
        if np.any(inv_idx < 0):
            raise NotAUnit("not a unit")
        b = np.zeros_like(xs)
        for j in range(f):
            b[:, self._digit_index(0, j)] = (inv_idx // p**j) % p
        two = (2 * self.one_coords) % self.moduli
        steps = max(1, math.ceil(math.log2(self.level))) + 1
        for _ in range(steps):
            xb = K.ring_mul(xs, b, self.mul2, self.moduli)
            b = K.ring_mul(b, (two - xb) % self.moduli, self.mul2, self.moduli)
        if np.any(K.ring_mul(xs, b, self.mul2, self.moduli) != self.one_coords):
            raise NotAUnit("not a unit")
        return b

    def p_over_pi(self) -> "RingElem":
        """The exact quotient p / pi as an element one level down (mixed,
        requires e < level so that p is nonzero there)."""
        if self._p_over_pi is None:
            desc = self.desc
            if desc.kind != "mixed":
                raise NotAUnit("p is 0 in equal characteristic")
            lower = truncated_ring(desc, self.level - 1)
            terms = {(desc.e - 1, 0): -1}
            for s in range(1, desc.e):
                for jj, cc in enumerate(desc.eisenstein[s]):
                    key = (s - 1, jj)
                    terms[key] = terms.get(key, 0) - cc
            u0 = lower._reduce({(0, jj): cc // desc.p
                                for jj, cc in enumerate(desc.eisenstein[0])})
            base = RingElem(lower, lower._reduce(terms))
            self._p_over_pi = lower.mul(base, lower.invert_unit(RingElem(lower, u0)))
        return self._p_over_pi

    def divide_by_pi_batch(self, xs: np.ndarray) -> np.ndarray:
        """Exact uniformizer division; result digit vectors one level down."""
        if self.level < 2:
            raise PrecisionExhausted("cannot divide below level 1")
        lower = truncated_ring(self.desc, self.level - 1)
        desc, f = self.desc, self.desc.f
        out = np.zeros((xs.shape[0], lower.num_digits), dtype=np.int64)
        n_shift = min(self.pi_degrees - 1, lower.pi_degrees)
        if n_shift > 0:
            out[:, : n_shift * f] = xs[:, f : (n_shift + 1) * f]
        head = xs[:, :f]
        if desc.kind == "equal" or desc.e >= self.level:
            if np.any(head % desc.p != 0):
                raise NotAUnit("not divisible by the uniformizer")
            return out % lower.moduli
        if np.any(head % desc.p != 0):
            raise NotAUnit("not divisible by the uniformizer")
        w = head // desc.p
        if np.any(w != 0):
            quot = np.zeros((xs.shape[0], lower.num_digits), dtype=np.int64)
            quot[:, :f] = w
            out = out + K.ring_mul(
                quot, self.p_over_pi().coords, lower.mul2, lower.moduli
            )
        return out % lower.moduli

    def divide_by_pi(self, x) -> "RingElem":
        self._check(x)
        lower = truncated_ring(self.desc, self.level - 1)
        return RingElem(lower, self.divide_by_pi_batch(x.coords[None, :])[0])

    # -- level changes ----------------------------------------------------------

    def reduce_coords_to(self, target: "TruncatedRing", coords: np.ndarray) -> np.ndarray:
        """Canonical surjection onto a lower level, batched on leading axes."""
        if target.desc != self.desc or target.level > self.level:
            raise RingMismatch("invalid level reduction")
        dt = target.num_digits
        return coords[..., :dt] % target.moduli

    def lift_coords_to(self, target: "TruncatedRing", coords: np.ndarray) -> np.ndarray:
        """Zero-padding section into a higher level (a fixed section, not a
        ring map; reduce o lift is the identity)."""
        if target.desc != self.desc or target.level < self.level:
            raise RingMismatch("invalid level lift")
        shape = coords.shape[:-1] + (target.num_digits,)
        out = np.zeros(shape, dtype=np.int64)
        out[..., : self.num_digits] = coords
        return out

    def reduce_to(self, target, x) -> "RingElem":
        self._check(x)
        return RingElem(target, self.reduce_coords_to(target, x.coords))

    def lift_to(self, target, x) -> "RingElem":
        self._check(x)
        return RingElem(target, self.lift_coords_to(target, x.coords))

    # -- enumeration helpers -----------------------------------------------------

    def decode_keys(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        out = np.zeros(keys.shape + (self.num_digits,), dtype=np.int64)
        rem = keys.copy()
        for c in range(self.num_digits):
            out[..., c] = rem // self.elem_strides[c]
            rem = rem % self.elem_strides[c]
        return out

    def all_elements_coords(self) -> np.ndarray:
        return self.decode_keys(np.arange(self.size, dtype=np.int64))

    def scaled_monomials(self, vlo: int, vhi: int) -> list[np.ndarray]:
        """Digit vectors of p^s y^j pi^i with valuation in [vlo, vhi); an
        additive spanning set of pi^vlo / pi^vhi, used for congruence
        subgroup generators."""
        desc, f = self.desc, self.desc.f
        out = []
        for i in range(self.pi_degrees):
            for s in range(self.kexp[i]):
                val = i if desc.kind == "equal" else i + desc.e * s
                if vlo <= val < vhi:
                    for j in range(f):
                        out.append(self.monomial(s, i, j).coords)
        return out

    def random_coords(self, rng, n: int) -> np.ndarray:
        cols = [rng.integers(0, int(m), size=n, dtype=np.int64) for m in self.moduli]
        return np.stack(cols, axis=-1)

    def format_coords(self, coords) -> str:
        desc, f = self.desc, self.desc.f
        sym = desc.uniformizer
        parts = []
        for d in range(self.num_digits):
            c = int(coords[d])
            if c == 0:
                continue
            i, j = divmod(d, f)
            factors = [] if c == 1 and (i or j) else [str(c)]
            if j == 1:
                factors.append("y")
            elif j > 1:
                factors.append(f"y^{j}")
            if i == 1:
                factors.append(sym)
            elif i > 1:
                factors.append(f"{sym}^{i}")
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts) if parts else "0"


class RingElem:
    """Immutable canonical digit vector of a TruncatedRing element."""

    __slots__ = ("ring", "coords", "_key")

    def __init__(self, ring: TruncatedRing, coords: np.ndarray):
        self.ring = ring
        c = np.ascontiguousarray(coords, dtype=np.int64)
        c.setflags(write=False)
        self.coords = c
        self._key = None

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(int(v) for v in self.coords)
        return self._key

    def __add__(self, other):
        return self.ring.add(self, _coerce(self.ring, other))

    def __radd__(self, other):
        return self.ring.add(_coerce(self.ring, other), self)

    def __sub__(self, other):
        return self.ring.sub(self, _coerce(self.ring, other))

    def __rsub__(self, other):
        return self.ring.sub(_coerce(self.ring, other), self)

    def __mul__(self, other):
        return self.ring.mul(self, _coerce(self.ring, other))

    def __rmul__(self, other):
        return self.ring.mul(_coerce(self.ring, other), self)

    def __neg__(self):
        return self.ring.neg(self)

    def __pow__(self, k: int):
        out = self.ring.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.element(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        if other.ring is not self.ring:
            raise RingMismatch("ring mismatch")
        return self.key() == other.key()

    def __hash__(self):
        return hash((id(self.ring), self.key()))

    def valuation(self):
        return self.ring.valuation(self)

    def is_zero(self) -> bool:
        return not self.coords.any()

    def is_unit(self) -> bool:
        return self.ring.valuation(self) == 0

    def inverse(self) -> "RingElem":
        return self.ring.invert_unit(self)

    def __repr__(self):
        return self.ring.format_coords(self.coords)


def _coerce(ring, v):
    return v if isinstance(v, RingElem) else ring.element(v)


_RING_CACHE: dict[tuple, TruncatedRing] = {}


def truncated_ring(desc: FieldDescriptor, level: int) -> TruncatedRing:
    """Cached ring constructor; a (descriptor, level) pair is one object,
    so identity comparison is safe for mismatch checks."""
    key = (desc, level)
    ring = _RING_CACHE.get(key)
    if ring is None:
        ring = TruncatedRing(desc, level)
        _RING_CACHE[key] = ring
    return ring


class DeligneTriplet:
    """The depth-m data (O/p^m, p/p^{m+1}, eps) of a field descriptor.

    The middle item is the rank-one free module over O/p^m generated by
    the uniformizer class; module elements are stored through their
    coefficient in that generator.  ``eps`` is the natural surjection
    p/p^{m+1} -> p/p^m, i.e. coefficient reduction one level down.
    """

    def __init__(self, desc: FieldDescriptor, m: int):
        if m < 1:
            raise ValueError("depth must be >= 1")
        self.desc = desc
        self.m = m
        self.ring = truncated_ring(desc, m)

    def module_element(self, coeff) -> RingElem:
        """Coefficient c of c * pi~ in p/p^{m+1}, an element of O/p^m."""
        return self.ring.element(coeff)

    def module_value(self, coeff) -> RingElem:
        """The underlying ring value c * pi inside O/p^{m+1}."""
        up = truncated_ring(self.desc, self.m + 1)
        c = self.ring.lift_to(up, self.module_element(coeff))
        return up.mul(c, up.pi)

    def epsilon(self, coeff) -> RingElem:
        """p/p^{m+1} -> p/p^m on coefficients; kernel has size exactly q."""
        if self.m < 2:
            raise ValueError("epsilon at depth 1 lands in the zero module")
        lower = truncated_ring(self.desc, self.m - 1)
        return self.ring.reduce_to(lower, self.module_element(coeff))

    def scalar_mul(self, r, coeff) -> RingElem:
        return self.ring.mul(self.ring.element(r), self.module_element(coeff))
