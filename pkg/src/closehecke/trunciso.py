"""Isomorphisms between truncated rings and the Eisenstein-polynomial
transfer they induce on totally ramified extensions.

A `TruncIso` is determined by the images of the two ring generators (the
uniformizer class and the residue-field generator) and extended linearly
over the monomial basis.  Construction audits the map: well-definedness on
every basis digit, multiplicativity on all basis pairs (which certifies it
on the whole ring), bijectivity by exhaustive image count, plus a full
elementwise pair audit at small sizes.  Uniformizer alignment is required
by default; pass ``require_aligned=False`` to experiment with isos that
send pi to another valuation-1 element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import NotAnIsomorphism, NotEisenstein, RingMismatch
from .fields import FieldDescriptor
from .rings import RingElem, TruncatedRing, truncated_ring

_EXHAUSTIVE_PAIR_LIMIT = 4096  # full elementwise audit up to this ring size


class TruncIso:
    """Ring isomorphism O_F/p^l -> O_F'/p'^l given by generator images."""

    def __init__(self, src: TruncatedRing, dst: TruncatedRing,
                 pi_image: RingElem, y_image: RingElem | None = None,
                 require_aligned: bool = True):
        if src.level != dst.level:
            raise RingMismatch("source and target must share the level")
        if src.size != dst.size:
            raise NotAnIsomorphism("rings have different sizes")
        self.src = src
        self.dst = dst
        self.pi_image = dst.element(pi_image)
        if y_image is None:
            y_image = dst.ygen if src.desc.f > 1 else dst.one
        self.y_image = dst.element(y_image)
        self.aligned = bool(self.pi_image == dst.pi)
        if require_aligned and not self.aligned:
            raise NotAnIsomorphism("iso is not uniformizer-aligned")
        self.matrix = self._build_matrix()
        self._audit()

    def _build_matrix(self) -> np.ndarray:
        src, dst = self.src, self.dst
        f = src.desc.f
        cols = np.zeros((dst.num_digits, src.num_digits), dtype=np.int64)
        pi_pows = [dst.one]
        for _ in range(src.pi_degrees - 1):
            pi_pows.append(pi_pows[-1] * self.pi_image)
        y_pows = [dst.one]
        for _ in range(f - 1):
            y_pows.append(y_pows[-1] * self.y_image)
        for i in range(src.pi_degrees):
            for j in range(f):
                cols[:, i * f + j] = (pi_pows[i] * y_pows[j]).coords
        return cols

    def _audit(self):
        src, dst = self.src, self.dst
        d = src.num_digits
        # well-defined: each basis digit killed by its own modulus
        for c in range(d):
            if np.any((src.moduli[c] * self.matrix[:, c]) % dst.moduli != 0):
                raise NotAnIsomorphism("not an isomorphism")
        if self(src.one) != dst.one:
            raise NotAnIsomorphism("not an isomorphism")
        # multiplicative on all basis pairs, hence everywhere by bilinearity
        mons = np.eye(d, dtype=np.int64)
        left = self.apply_coords(mons)
        for c1 in range(d):
            for c2 in range(d):
                prod_src = src.mul2[c1 * d + c2] % src.moduli
                lhs = self.apply_coords(prod_src[None, :])[0]
                rhs = K.ring_mul(left[c1], left[c2], dst.mul2, dst.moduli)
                if np.any(lhs != rhs):
                    raise NotAnIsomorphism("not an isomorphism")
        # bijective: exhaustive image count
        if src.size <= 10**6:
            imgs = self.apply_coords(src.all_elements_coords())
            keys = K.encode(imgs[:, None, None, :],
                            dst.elem_strides[None, None, :])
            if np.unique(keys).shape[0] != src.size:
                raise NotAnIsomorphism("not an isomorphism")
        if src.size <= _EXHAUSTIVE_PAIR_LIMIT:
            self._exhaustive_pair_audit()

    def _exhaustive_pair_audit(self):
        src, dst = self.src, self.dst
        xs = src.all_elements_coords()
        imgs = self.apply_coords(xs)
        for a in range(xs.shape[0]):
            prod = K.ring_mul(np.broadcast_to(xs[a], xs.shape).copy(), xs,
                              src.mul2, src.moduli)
            lhs = self.apply_coords(prod)
            rhs = K.ring_mul(np.broadcast_to(imgs[a], imgs.shape).copy(), imgs,
                             dst.mul2, dst.moduli)
            if np.any(lhs != rhs):
                raise NotAnIsomorphism("not an isomorphism")
            sums = self.apply_coords((xs[a] + xs) % src.moduli)
            if np.any(sums != (imgs[a] + imgs) % dst.moduli):
                raise NotAnIsomorphism("not an isomorphism")

    # -- application --------------------------------------------------------

    def apply_coords(self, coords: np.ndarray) -> np.ndarray:
        return K.linmap(coords, self.matrix, self.dst.moduli)

    def __call__(self, x: RingElem) -> RingElem:
        if x.ring is not self.src:
            raise RingMismatch("ring mismatch")
        return RingElem(self.dst, self.apply_coords(x.coords[None, :])[0])

    def reduce_to_level(self, m: int) -> "TruncIso":
        """The induced iso at a lower level (audited again on construction)."""
        s = truncated_ring(self.src.desc, m)
        t = truncated_ring(self.dst.desc, m)
        return TruncIso(
            s, t,
            self.dst.reduce_to(t, self.pi_image),
            self.dst.reduce_to(t, self.y_image),
            require_aligned=False,
        )

    def __repr__(self):
        return (f"TruncIso({self.src.desc.describe()} -> {self.dst.desc.describe()},"
                f" level={self.src.level}, aligned={self.aligned})")


def identity_iso(ring: TruncatedRing) -> TruncIso:
    return TruncIso(ring, ring, ring.pi, ring.ygen if ring.desc.f > 1 else None)


def matching_iso(src_desc: FieldDescriptor, dst_desc: FieldDescriptor,
                 level: int) -> TruncIso:
    """The standard uniformizer-aligned iso at the given level, when one
    exists for the obvious generator images (pi to pi', y to y').  Raises
    `NotAnIsomorphism` otherwise; a mixed-kind ring with e >= level always
    matches the equal-characteristic ring of the same residue field."""
    src = truncated_ring(src_desc, level)
    dst = truncated_ring(dst_desc, level)
    return TruncIso(src, dst, dst.pi, dst.ygen if dst.desc.f > 1 else None)


# ---------------------------------------------------------------------------
# Eisenstein polynomials at finite depth and their transfer.


@dataclass(frozen=True)
class EisensteinPoly:
    """x^d + pi * sum_i a_i x^i with the cofactors a_i known at depth m.

    The stored data are the cofactors a_0 .. a_{d-1} as elements of
    O/p^m; the actual non-leading coefficients are pi * a_i, so the shape
    conditions (lower coefficients of positive valuation, constant term of
    valuation exactly one) amount to a_0 being a unit.
    """

    ring: TruncatedRing
    degree: int
    cofactors: tuple[RingElem, ...]

    def __post_init__(self):
        if self.degree < 1 or len(self.cofactors) != self.degree:
            raise NotEisenstein("cofactor list must have length equal to the degree")
        for a in self.cofactors:
            if a.ring is not self.ring:
                raise RingMismatch("ring mismatch")
        if not self.cofactors[0].is_unit():
            raise NotEisenstein("constant term must have valuation exactly 1")

    @classmethod
    def from_ints(cls, ring: TruncatedRing, cofactors) -> "EisensteinPoly":
        return cls(ring, len(cofactors), tuple(ring.element(c) for c in cofactors))

    def __str__(self):
        sym = self.ring.desc.uniformizer
        parts = [f"x^{self.degree}"]
        for i in range(self.degree - 1, -1, -1):
            a = self.cofactors[i]
            if a.is_zero():
                continue
            atxt = repr(a)
            coeff = sym if atxt == "1" else f"{sym}*({atxt})"
            if i == 0:
                parts.append(coeff)
            elif i == 1:
                parts.append(f"{coeff}*x")
            else:
                parts.append(f"{coeff}*x^{i}")
        return " + ".join(parts)


def eisenstein_transfer(poly: EisensteinPoly, psi: TruncIso) -> EisensteinPoly:
    """Push an Eisenstein polynomial along a truncation iso, cofactor by
    cofactor.  The output does not depend on how the cofactors were lifted
    before depth-m reduction, because only their depth-m classes enter."""
    if poly.ring is not psi.src:
        raise RingMismatch("polynomial not over the source ring of the iso")
    return EisensteinPoly(
        psi.dst, poly.degree, tuple(psi(a) for a in poly.cofactors)
    )
