"""Cartan invariants, double-coset canonicalization, stabilizers and
right-coset decompositions at congruence level m.

The Cartan invariant of an invertible matrix is its elementary-divisor
vector, computed by Smith elimination over the truncated valuation ring
with minimal-valuation pivots; the witnesses of the elimination are
integral with unit determinant, so they realize g = a * pi_lam * b with
a, b in K.  A double coset K_m a pi_lam b K_m is labeled by lam together
with the lexicographically minimal pair in the orbit of (a mod K_m,
b mod K_m) under the coset stabilizer, which makes labels deterministic
across runs and backends.

Membership g in K_m pi_lam K_m is decided two ways.  When the level-nu
point set of the coset fits the size guard it is materialized once by
closure under congruence generators, and membership is one binary search:
at nu = m + (shift + largest divisor) the truncation ball around any coset
point stays inside the coset, so key equality is an exact test.  Otherwise
membership falls back to scanning right-coset representatives x_i and
testing x_i^{-1} g in K_m, which is a pure congruence check at a known
shift and never divides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import (AuditFailure, PrecisionExhausted, SizeGuardExceeded)
from .groups import Backend, GroupElem, LevelQuotient, quotient_order
from .rings import RingElem, truncated_ring
from .rootdata import Cochar

POINTS_GUARD = 10_000_000     # materialized coset points
RIGHT_COSET_GUARD = 100_000   # right cosets per double coset
SET_BUILD_LIMIT = 4_000_000   # prefer the scan route above this estimate


# ---------------------------------------------------------------------------
# Smith elimination over the truncated ring.


def _pi_divisors(g: GroupElem, witnesses: bool):
    """Elementary divisors of the shifted integral matrix, ascending, in
    uniformizer units; optionally the K-witnesses of the elimination."""
    ctx, ring, r = g.ctx, g.ring, g.ctx.n
    M = [[g.entry(i, j) for j in range(r)] for i in range(r)]
    A = [[ring.one if i == j else ring.element(0) for j in range(r)] for i in range(r)]
    B = [[ring.one if i == j else ring.element(0) for j in range(r)] for i in range(r)]
    divisors: list[int] = []
    for k in range(r):
        best, best_v = None, None
        for i in range(k, r):
            for j in range(k, r):
                v = M[i][j].valuation()
                if v < ring.level and (best_v is None or v < best_v):
                    best, best_v = (i, j), v
        if best is None:
            raise PrecisionExhausted(
                "no pivot certified at the working level; raise the precision")
        bi, bj = best
        if bi != k:
            M[k], M[bi] = M[bi], M[k]
            if witnesses:
                for row in A:
                    row[k], row[bi] = row[bi], row[k]
        if bj != k:
            for row in M:
                row[k], row[bj] = row[bj], row[k]
            if witnesses:
                B[k], B[bj] = B[bj], B[k]
        v = best_v
        divisors.append(v)
        unit = M[k][k]
        for _ in range(v):
            unit = unit.ring.divide_by_pi(unit)
        uinv_low = unit.ring.invert_unit(unit)
        uinv = unit.ring.lift_to(ring, uinv_low)
        for i in range(k + 1, r):
            t = M[i][k]
            if t.is_zero():
                continue
            tdiv = t
            for _ in range(v):
                tdiv = tdiv.ring.divide_by_pi(tdiv)
            mult = tdiv.ring.lift_to(ring, tdiv) * uinv
            for j in range(k, r):
                M[i][j] = M[i][j] - mult * M[k][j]
            if witnesses:
                for row in A:
                    row[k] = row[k] + mult * row[i]
        for j in range(k + 1, r):
            t = M[k][j]
            if t.is_zero():
                continue
            tdiv = t
            for _ in range(v):
                tdiv = tdiv.ring.divide_by_pi(tdiv)
            mult = tdiv.ring.lift_to(ring, tdiv) * uinv
            for i in range(k, r):
                M[i][j] = M[i][j] - mult * M[i][k]
            if witnesses:
                for jj in range(r):
                    B[k][jj] = B[k][jj] + mult * B[j][jj]
    if not witnesses:
        return divisors, None, None
    # fold pivot units into B and certify witnesses one notch below the
    # largest pivot valuation, which is where the multipliers stay exact
    vmax = max(divisors)
    wit_level = ring.level - vmax
    if wit_level < max(1, g.ctx.plevel(1)):
        raise PrecisionExhausted("witness precision exhausted; raise the level")
    units = []
    for k in range(r):
        u = M[k][k]
        for _ in range(divisors[k]):
            u = u.ring.divide_by_pi(u)
        units.append(u.ring.lift_to(ring, u))
    wring = ctx.ring(wit_level)
    a = ctx.from_rings(A, ring.level).reduce_to(wit_level)
    brows = [[(units[i] * B[i][j]) for j in range(r)] for i in range(r)]
    b = ctx.from_rings(brows, ring.level).reduce_to(wit_level)
    if ctx.datum.family == "SL":
        da = a.det()
        if not da == wring.one:
            dinv = wring.invert_unit(da)
            amat = a.mat.copy()
            bmat = b.mat.copy()
            for i in range(r):
                amat[i, 0] = K.ring_mul(amat[i, 0], dinv.coords, wring.mul2,
                                        wring.moduli)
                bmat[0, i] = K.ring_mul(bmat[0, i], da.coords, wring.mul2,
                                        wring.moduli)
            a = GroupElem(ctx, wit_level, 0, amat)
            b = GroupElem(ctx, wit_level, 0, bmat)
    return divisors, a, b


def _divisors_to_cochar(ctx: Backend, divisors, d: int) -> Cochar:
    vals = [v - d for v in divisors]
    if any(v % ctx.e_tot for v in vals):
        raise ValueError(
            "Cartan invariant lies outside the split cocharacter lattice "
            "of this restriction family")
    return tuple(v // ctx.e_tot for v in vals)


def cartan_invariant(g: GroupElem) -> Cochar:
    """The antidominant elementary-divisor cocharacter of g, independent
    of K x K translation."""
    divisors, _, _ = _pi_divisors(g, witnesses=False)
    return _divisors_to_cochar(g.ctx, divisors, g.d)


def cartan_decompose(g: GroupElem) -> tuple[GroupElem, Cochar, GroupElem]:
    """Witnesses (a, lam, b) with g = a * pi_lam * b, a and b in K.

    The witnesses come from the Smith elimination and are one valid choice;
    only the recomposition is contractual, and it is asserted here.
    """
    divisors, a, b = _pi_divisors(g, witnesses=True)
    lam = _divisors_to_cochar(g.ctx, divisors, g.d)
    pl = g.ctx.pi_lambda(lam, a.level)
    # the shift of pi_lambda may differ from g.d by a central power
    recomposed = a * pl * b
    if not recomposed.same_element(g.reduce_to(min(g.level, recomposed.level))):
        raise AuditFailure("cartan_decompose failed to recompose")
    return a, lam, b


# ---------------------------------------------------------------------------
# Double cosets at level m.


@dataclass(frozen=True)
class DoubleCosetId:
    """Canonical label of K_m a pi_lam b K_m: antidominant lam plus the
    lex-minimal (a, b) quotient-index pair in its stabilizer orbit."""

    m: int
    lam: Cochar
    a: int
    b: int

    def to_json_dict(self) -> dict:
        return {"lambda": list(self.lam), "a": self.a, "b": self.b}

    def sort_key(self):
        return (self.lam, self.a, self.b)


@dataclass
class StabilizerTable:
    """The stationary subgroup of (K/K_m)^2 for one coset, as index pairs."""

    lam: Cochar
    pairs: np.ndarray          # (S, 2) int64, lexicographically sorted
    quotient_size: int

    def __post_init__(self):
        self.pair_keys = self.pairs[:, 0] * self.quotient_size + self.pairs[:, 1]

    def __len__(self):
        return int(self.pairs.shape[0])

    def contains(self, a: int, b: int) -> bool:
        return bool(K.keys_in_sorted(self.pair_keys,
                                     np.array([a * self.quotient_size + b]))[0])

    def orbit_size(self) -> int:
        return self.quotient_size**2 // len(self)


def _km_congruence_mask(ctx: Backend, ring, mats: np.ndarray, d: int,
                        m: int) -> np.ndarray:
    """Which pi^(-d) * mat lie in K_m^(GL); exact on family elements.

    Works because pi^(-d) M in K_m iff M is congruent to pi^d * I modulo
    pi^(d + m_pi), a pure congruence with no division."""
    need = d + ctx.plevel(m)
    if ring.level < need:
        raise PrecisionExhausted(
            f"K_m congruence test needs pi-level {need}, have {ring.level}")
    tgt = ctx.ring(need)
    red = ring.reduce_coords_to(tgt, mats)
    ref = np.zeros((ctx.n, ctx.n, tgt.num_digits), dtype=np.int64)
    pid = tgt.pi_power(d).coords
    for i in range(ctx.n):
        ref[i, i] = pid
    return np.all(red == ref, axis=(-3, -2, -1))


def _volume_estimate(ctx: Backend, lam: Cochar) -> int:
    datum = ctx.datum
    est = 1
    for a in datum.positive_roots():
        est *= ctx.base_q ** (a.f_a * a.e_a * abs(datum.pairing(a, lam)))
    return est


class CosetHandle:
    """Lazy per-lam machinery: encoded point set, right-coset reps and
    membership tests for K_m pi_lam K_m."""

    def __init__(self, dc: "DoubleCosets", lam: Cochar):
        self.dc = dc
        self.ctx = dc.ctx
        self.lam = lam
        self.m = dc.m
        self.d_enc = self.ctx.element_shift(lam)
        self.spread = self.ctx.coset_spread(lam)
        self.enc_plevel = self.ctx.plevel(self.m) + self.spread
        self._keys: np.ndarray | None = None
        self._set_unavailable = False
        self._reps: list[GroupElem] | None = None
        self._rep_inv_mats: np.ndarray | None = None

    # -- materialized point set ------------------------------------------------

    def _set_estimate(self) -> int:
        ctx = self.ctx
        cong = quotient_order(ctx, self.enc_plevel) // quotient_order(
            ctx, ctx.plevel(self.m))
        return cong * _volume_estimate(ctx, self.lam)

    def point_set(self) -> np.ndarray:
        """Sorted keys of the level-nu canonical matrices of the coset."""
        if self._keys is None:
            est = self._set_estimate()
            if est > POINTS_GUARD:
                raise SizeGuardExceeded(
                    f"coset point set estimated at {est} level-{self.enc_plevel}"
                    f" points, guard {POINTS_GUARD}")
            self._keys = self._materialize()
        return self._keys

    def set_available(self) -> bool:
        if self._keys is not None:
            return True
        if self._set_unavailable:
            return False
        ok = self._set_estimate() <= SET_BUILD_LIMIT
        if not ok:
            self._set_unavailable = True
        return ok

    def _materialize(self) -> np.ndarray:
        ctx = self.ctx
        ring = ctx.ring(self.enc_plevel)
        lq = self.dc.lq
        strides = _matrix_strides_for(ctx, ring)
        gens = ctx.congruence_generators(self.m, self.enc_plevel)
        start = ctx.pi_lambda(self.lam, self.enc_plevel)
        if start.d != self.d_enc:
            raise AuditFailure("inconsistent coset shift")
        keys = K.encode(start.mat[None], strides)
        seen = set(int(k) for k in keys)
        frontier = start.mat[None]
        all_keys = [keys]
        while frontier.shape[0]:
            prods = []
            for g in gens:
                gb = np.broadcast_to(g, frontier.shape).copy()
                prods.append(K.mat_mul(gb, frontier, ring.mul2, ring.moduli))
                prods.append(K.mat_mul(frontier, gb, ring.mul2, ring.moduli))
            batch = np.concatenate(prods)
            bkeys = K.encode(batch, strides)
            order = np.argsort(bkeys, kind="stable")
            bkeys = bkeys[order]
            batch = batch[order]
            fresh = np.ones(bkeys.shape[0], dtype=bool)
            fresh[1:] = bkeys[1:] != bkeys[:-1]
            fresh &= np.fromiter((int(k) not in seen for k in bkeys),
                                 bool, bkeys.shape[0])
            frontier = batch[fresh]
            newkeys = bkeys[fresh]
            seen.update(int(k) for k in newkeys)
            if len(seen) > POINTS_GUARD:
                raise SizeGuardExceeded("coset point set exceeded the guard")
            if newkeys.shape[0]:
                all_keys.append(newkeys)
        out = np.sort(np.concatenate(all_keys))
        out.setflags(write=False)
        return out

    # -- right-coset representatives -------------------------------------------

    def work_plevel(self) -> int:
        return self.ctx.plevel(self.m) + 2 * self.spread + self.ctx.e_tot

    def right_reps(self) -> list[GroupElem]:
        """x_1 .. x_d with K_m pi_lam K_m the disjoint union of x_i K_m,
        found by closing the right coset of pi_lam under K_m generators;
        representatives are pairwise inequivalent by construction."""
        if self._reps is None:
            self._build_reps(self.ctx.pi_lambda(self.lam, self.work_plevel()))
        return self._reps

    def _build_reps(self, start: GroupElem):
        ctx = self.ctx
        wl = start.level
        gens = ctx.congruence_generators(self.m, self.enc_plevel, at_plevel=wl)
        reps: list[GroupElem] = [start]
        inv_mats = [start.inv()]
        queue = [start]
        while queue:
            x = queue.pop()
            for gmat in gens:
                y = GroupElem(ctx, wl, 0, gmat) * x
                if self._find_rep(y, reps, inv_mats) is None:
                    if len(reps) >= RIGHT_COSET_GUARD:
                        raise SizeGuardExceeded("right coset count exceeded guard")
                    reps.append(y)
                    inv_mats.append(y.inv())
                    queue.append(y)
        self._reps = reps
        self._rep_invs = inv_mats

    def _find_rep(self, y: GroupElem, reps, inv_mats) -> int | None:
        """Index i with y K_m = x_i K_m, else None."""
        lvl = min(min(iv.level for iv in inv_mats), y.level)
        ring = self.ctx.ring(lvl)
        stack = np.stack([iv.reduce_to(lvl).mat for iv in inv_mats])
        yb = np.broadcast_to(y.reduce_to(lvl).mat, stack.shape).copy()
        prods = K.mat_mul(stack, yb, ring.mul2, ring.moduli)
        mask = _km_congruence_mask(self.ctx, ring, prods,
                                   inv_mats[0].d + y.d, self.m)
        hits = np.flatnonzero(mask)
        return int(hits[0]) if hits.shape[0] else None

    def volume(self) -> int:
        return len(self.right_reps())

    def right_reps_of(self, x: GroupElem) -> list[GroupElem]:
        """Right-coset representatives of K_m x K_m for any x with this
        Cartan invariant (left translation by K_m does not depend on the
        witnesses, so the closure starts from x itself)."""
        handle = CosetHandle(self.dc, self.lam)
        handle._build_reps(x)
        return handle._reps

    # -- membership ---------------------------------------------------------------

    def contains(self, g: GroupElem) -> bool:
        gn = g.normalized()
        if gn.d != self.d_enc:
            return False
        if self.set_available():
            if gn.level < self.enc_plevel:
                raise PrecisionExhausted(
                    f"membership needs pi-level {self.enc_plevel}")
            ring = self.ctx.ring(self.enc_plevel)
            strides = _matrix_strides_for(self.ctx, ring)
            key = K.encode(gn.reduce_to(self.enc_plevel).mat[None], strides)
            return bool(K.keys_in_sorted(self.point_set(), key)[0])
        self.right_reps()
        return self._find_rep_membership(gn)

    def _find_rep_membership(self, g: GroupElem) -> bool:
        lvl = min(min(iv.level for iv in self._rep_invs), g.level)
        ring = self.ctx.ring(lvl)
        stack = np.stack([iv.reduce_to(lvl).mat for iv in self._rep_invs])
        gb = np.broadcast_to(g.reduce_to(lvl).mat, stack.shape).copy()
        prods = K.mat_mul(stack, gb, ring.mul2, ring.moduli)
        mask = _km_congruence_mask(self.ctx, ring, prods,
                                   self._rep_invs[0].d + g.d, self.m)
        return bool(mask.any())

    def membership_mask(self, ring, mats: np.ndarray, d: int) -> np.ndarray:
        """Vectorized membership of pi^(-d) * mats, all at the same shift."""
        if d != self.d_enc:
            # a batch at the wrong intrinsic shift can still contain
            # members if shifts are non-minimal; normalize per element
            return np.fromiter(
                (self.contains(GroupElem(self.ctx, ring.level, d, m))
                 for m in mats), bool, mats.shape[0])
        if self.set_available():
            enc_ring = self.ctx.ring(self.enc_plevel)
            red = ring.reduce_coords_to(enc_ring, mats)
            strides = _matrix_strides_for(self.ctx, enc_ring)
            return K.keys_in_sorted(self.point_set(), K.encode(red, strides))
        self.right_reps()
        out = np.zeros(mats.shape[0], dtype=bool)
        lvl = min(min(iv.level for iv in self._rep_invs), ring.level)
        rring = self.ctx.ring(lvl)
        red = ring.reduce_coords_to(rring, mats)
        for iv in self._rep_invs:
            ivb = np.broadcast_to(iv.reduce_to(lvl).mat, red.shape).copy()
            prods = K.mat_mul(ivb, red, rring.mul2, rring.moduli)
            out |= _km_congruence_mask(self.ctx, rring, prods, iv.d + d, self.m)
        return out


def _matrix_strides_for(ctx: Backend, ring) -> np.ndarray:
    r, d = ctx.n, ring.num_digits
    mod = np.tile(ring.moduli, r * r)
    strides = np.ones(r * r * d, dtype=np.int64)
    for c in range(r * r * d - 2, -1, -1):
        nxt = int(mod[c + 1])
        if strides[c + 1] > (1 << 62) // max(nxt, 1):
            raise SizeGuardExceeded("matrix key would overflow int64")
        strides[c] = strides[c + 1] * nxt
    return strides.reshape(r, r, d)


class DoubleCosets:
    """All level-m double-coset machinery of one backend, with caches."""

    def __init__(self, ctx: Backend, m: int,
                 quotient_guard: int | None = None):
        self.ctx = ctx
        self.m = m
        self.lq: LevelQuotient = (ctx.quotient(m) if quotient_guard is None
                                  else ctx.quotient(m, guard=quotient_guard))
        self._handles: dict[Cochar, CosetHandle] = {}
        self._stabs: dict[Cochar, StabilizerTable] = {}
        self._lifts: dict[int, np.ndarray] = {}

    def handle(self, lam: Cochar) -> CosetHandle:
        lam = self.ctx.datum.check_cochar(lam)
        if not self.ctx.datum.is_antidominant(lam):
            raise ValueError("coset handles are indexed by antidominant cochars")
        h = self._handles.get(lam)
        if h is None:
            h = CosetHandle(self, lam)
            self._handles[lam] = h
        return h

    def work_plevel(self, lams, chain: int = 2) -> int:
        """A pi-level deep enough for products of ``chain`` coset elements
        from the given support plus all membership tests along the way."""
        smax = max((self.ctx.coset_spread(l) for l in lams), default=0)
        return self.ctx.plevel(self.m) + 2 * chain * smax + 2 * self.ctx.e_tot

    def lifts_at(self, plevel: int) -> np.ndarray:
        mats = self._lifts.get(plevel)
        if mats is None:
            mats = self.ctx.lift_quotient_batch(self.lq, plevel)
            self._lifts[plevel] = mats
        return mats

    def lift_index(self, idx: int, plevel: int) -> GroupElem:
        return GroupElem(self.ctx, plevel, 0, self.lifts_at(plevel)[idx].copy())

    # -- stabilizers -----------------------------------------------------------

    def stabilizer(self, lam: Cochar) -> StabilizerTable:
        lam = self.ctx.datum.check_cochar(lam)
        tab = self._stabs.get(lam)
        if tab is not None:
            return tab
        handle = self.handle(lam)
        n = self.lq.size
        work = handle.enc_plevel
        ring = self.ctx.ring(work)
        lifts = self.lifts_at(work)
        inv_lifts = lifts[self.lq.inv_indices()]
        pl = self.ctx.pi_lambda(lam, work)
        left = K.mat_mul(lifts, np.broadcast_to(pl.mat, lifts.shape).copy(),
                         ring.mul2, ring.moduli)
        pairs = []
        for a in range(n):
            row = K.mat_mul(np.broadcast_to(left[a], inv_lifts.shape).copy(),
                            inv_lifts, ring.mul2, ring.moduli)
            mask = handle.membership_mask(ring, row, pl.d)
            for b in np.flatnonzero(mask):
                pairs.append((a, int(b)))
        pairs = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
        tab = StabilizerTable(lam, pairs, n)
        self._audit_stabilizer(tab)
        self._stabs[lam] = tab
        return tab

    def _audit_stabilizer(self, tab: StabilizerTable, rng_seed: int = 0):
        n = self.lq.size
        size = len(tab)
        if size == 0 or not tab.contains(self.lq.identity_index(),
                                         self.lq.identity_index()):
            raise AuditFailure("stabilizer misses the identity pair")
        if n * n % size != 0:
            raise AuditFailure("stabilizer order does not divide |K/K_m|^2")
        inv = self.lq.inv_indices()
        if size <= 316:          # size^2 <= 1e5: exhaustive closure audit
            idx_pairs = [(int(a), int(b)) for a, b in tab.pairs]
            for a1, b1 in idx_pairs:
                for a2, b2 in idx_pairs:
                    if not tab.contains(self.lq.mult_idx(a1, a2),
                                        self.lq.mult_idx(b1, b2)):
                        raise AuditFailure("stabilizer not closed under product")
        else:
            rng = np.random.default_rng(rng_seed)
            sel = rng.integers(0, size, size=(2000, 2))
            for i, j in sel:
                a1, b1 = tab.pairs[i]
                a2, b2 = tab.pairs[j]
                if not tab.contains(self.lq.mult_idx(int(a1), int(a2)),
                                    self.lq.mult_idx(int(b1), int(b2))):
                    raise AuditFailure("stabilizer not closed under product")
        for a, b in tab.pairs[:64]:
            if not tab.contains(int(inv[a]), int(inv[b])):
                raise AuditFailure("stabilizer not closed under inverse")

    # -- canonical ids -----------------------------------------------------------

    def _orbit_pairs(self, tab: StabilizerTable, a: int, b: int) -> np.ndarray:
        """All (a g1, g2^{-1} b) index pairs over the stabilizer."""
        lq = self.lq
        g1 = tab.pairs[:, 0]
        g2inv = lq.inv_indices()[tab.pairs[:, 1]]
        ring = lq.ring
        left = K.mat_mul(np.broadcast_to(lq.mats[a], lq.mats[g1].shape).copy(),
                         lq.mats[g1], ring.mul2, ring.moduli)
        right = K.mat_mul(lq.mats[g2inv],
                          np.broadcast_to(lq.mats[b], lq.mats[g2inv].shape).copy(),
                          ring.mul2, ring.moduli)
        ai = lq.index_of_mats(left)
        bi = lq.index_of_mats(right)
        return np.stack([ai, bi], axis=1)

    def canonical_pair(self, lam: Cochar, a: int, b: int) -> tuple[int, int]:
        tab = self.stabilizer(lam)
        orbit = self._orbit_pairs(tab, a, b)
        keys = orbit[:, 0] * self.lq.size + orbit[:, 1]
        best = int(np.argmin(keys))
        return int(orbit[best, 0]), int(orbit[best, 1])

    def canonical_id(self, g: GroupElem) -> DoubleCosetId:
        a, lam, b = cartan_decompose(g)
        mp = self.ctx.plevel(self.m)
        ai = int(self.lq.index_of_mats(a.reduce_to(mp).mat[None])[0])
        bi = int(self.lq.index_of_mats(b.reduce_to(mp).mat[None])[0])
        ca, cb = self.canonical_pair(lam, ai, bi)
        return DoubleCosetId(self.m, lam, ca, cb)

    def id_of_pi_lambda(self, lam: Cochar) -> DoubleCosetId:
        e = self.lq.identity_index()
        lam = self.ctx.datum.check_cochar(lam)
        ca, cb = self.canonical_pair(lam, e, e)
        return DoubleCosetId(self.m, lam, ca, cb)

    def representative(self, cid: DoubleCosetId, plevel: int | None = None) -> GroupElem:
        """One group element in the coset labeled by cid."""
        if plevel is None:
            plevel = self.work_plevel([cid.lam])
        a = self.lift_index(cid.a, plevel)
        b = self.lift_index(cid.b, plevel)
        return a * self.ctx.pi_lambda(cid.lam, plevel) * b

    def enumerate_ids(self, lam: Cochar) -> list[DoubleCosetId]:
        """The full census of double cosets over one Cartan stratum."""
        tab = self.stabilizer(lam)
        n = self.lq.size
        visited = np.zeros(n * n, dtype=bool)
        out = []
        for key in range(n * n):
            if visited[key]:
                continue
            a, b = divmod(key, n)
            orbit = self._orbit_pairs(tab, a, b)
            visited[orbit[:, 0] * n + orbit[:, 1]] = True
            out.append(DoubleCosetId(self.m, lam, a, b))
        if len(out) != tab.orbit_size():
            raise AuditFailure("census size disagrees with the orbit equation")
        return out

    def membership(self, g: GroupElem, lam: Cochar) -> bool:
        return self.handle(lam).contains(g)


# ---------------------------------------------------------------------------
# Precision bound and its runtime certificate.


def precision_bound(ctx: Backend, cochars, m: int, margin: bool = False) -> int:
    """Base-field level n with g K_n g^{-1} inside K_m for every g in the
    union of the given Cartan strata: m plus the largest decorated pairing,
    plus one when products of two strata will be formed."""
    datum = ctx.datum
    worst = 0
    for lam in cochars:
        lam = datum.check_cochar(lam)
        for a in datum.positive_roots():
            worst = max(worst, abs(datum.pairing(a, lam)) * a.e_a)
    return m + worst + (1 if margin else 0)


def conjugation_certificate(dc: DoubleCosets, cochars, m: int, n: int) -> bool:
    """Exhaustively certify g K_n g^{-1} inside K_m over the enumerated
    right-coset representatives and the K_n congruence generators."""
    ctx = dc.ctx
    for lam in cochars:
        handle = dc.handle(lam)
        span = ctx.plevel(n) + handle.spread
        work = span + handle.spread + ctx.plevel(m)
        gens = ctx.congruence_generators(n, span, at_plevel=work)
        for x in handle.right_reps():
            xw = ctx.pi_lambda(lam, work) if False else None
            xi = _relift(dc, x, work)
            xinv = xi.inv()
            for gmat in gens:
                conj = xi * GroupElem(ctx, work, 0, gmat) * xinv
                ring = conj.ring
                ok = _km_congruence_mask(ctx, ring, conj.mat[None], conj.d, m)
                if not bool(ok[0]):
                    return False
    return True


def _relift(dc: DoubleCosets, x: GroupElem, plevel: int) -> GroupElem:
    """Rebuild a coset representative at a higher working level through its
    canonical id (zero-padding lifts are sections, not group maps, so a
    straight lift of x would not stay in the same coset)."""
    cid = dc.canonical_id(x)
    y = dc.representative(cid, plevel)
    return y
