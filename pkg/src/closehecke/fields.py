"""Descriptors of non-archimedean local fields at desk scale.

A field is specified by its residue characteristic ``p``, residue degree
``f`` (residue field ``F_q`` with ``q = p^f`` realized as ``F_p[y]/(g)``
for a fixed irreducible ``g`` from a built-in table) and, in mixed
characteristic, a monic Eisenstein polynomial over the unramified base
whose root is the uniformizer.  Equal-characteristic fields are
``F_q((t))`` and need no further data.

Only the data that survives truncation matters here; descriptors are the
input to `closehecke.rings.RingTower`, which builds the finite rings
``O/p^n`` the rest of the package computes in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import NotEisenstein

# Fixed irreducible polynomials g(y) over F_p, little-endian, monic.
# Degree <= 3 entries are certified irreducible by root search below.
RESIDUE_POLYS = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (7, 1): (0, 1),
    (2, 2): (1, 1, 1),       # y^2 + y + 1
    (2, 3): (1, 1, 0, 1),    # y^3 + y + 1
    (3, 2): (1, 0, 1),       # y^2 + 1
    (5, 2): (2, 0, 1),       # y^2 + 2
}

_SMALL_PRIMES = (2, 3, 5, 7)


def _poly_eval_mod(poly, x, p):
    acc = 0
    for c in reversed(poly):
        acc = (acc * x + c) % p
    return acc


def _check_irreducible(poly, p):
    """Root search certifies irreducibility for degrees 2 and 3."""
    deg = len(poly) - 1
    if deg == 1:
        return
    if deg > 3:
        raise ValueError("residue polynomial table only covers degree <= 3")
    for x in range(p):
        if _poly_eval_mod(poly, x, p) == 0:
            raise ValueError(f"residue polynomial {poly} has root {x} mod {p}")


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 1 << 30
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class FieldDescriptor:
    """Finite-precision model data of a local field.

    ``eisenstein`` lists the non-leading coefficients ``c_0 .. c_{e-1}`` of
    the monic degree-``e`` uniformizer polynomial, little-endian in the
    uniformizer degree; each coefficient is itself a little-endian integer
    polynomial in the residue generator ``y``.  Mixed kind only.
    """

    kind: str                    # "mixed" | "equal"
    p: int
    f: int = 1
    eisenstein: tuple[tuple[int, ...], ...] | None = None
    uniformizer: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in ("mixed", "equal"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.p not in _SMALL_PRIMES:
            raise ValueError(f"residue prime must be one of {_SMALL_PRIMES}")
        if (self.p, self.f) not in RESIDUE_POLYS:
            raise ValueError(f"no residue polynomial on file for q = {self.p}^{self.f}")
        _check_irreducible(RESIDUE_POLYS[(self.p, self.f)], self.p)
        if self.kind == "equal":
            if self.eisenstein is not None:
                raise ValueError("equal-characteristic fields take no Eisenstein data")
            object.__setattr__(self, "uniformizer", self.uniformizer or "t")
        else:
            if not self.eisenstein:
                raise NotEisenstein("mixed-kind descriptor needs an Eisenstein polynomial")
            eis = tuple(tuple(int(v) for v in c) for c in self.eisenstein)
            object.__setattr__(self, "eisenstein", eis)
            object.__setattr__(self, "uniformizer", self.uniformizer or "pi")
            self._check_eisenstein()

    def _check_eisenstein(self):
        p = self.p
        for c in self.eisenstein:
            if any(v % p != 0 for v in c):
                raise NotEisenstein("non-leading coefficients must have positive valuation")
        c0 = self.eisenstein[0]
        cof = tuple(v // p for v in c0)
        if all(v % p == 0 for v in cof):
            raise NotEisenstein("constant term must have valuation exactly 1")

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def e(self) -> int:
        """Uniformizer degree over the unramified base (1 in equal char)."""
        return len(self.eisenstein) if self.kind == "mixed" else 1

    @property
    def residue_poly(self) -> tuple[int, ...]:
        return RESIDUE_POLYS[(self.p, self.f)]

    def describe(self) -> str:
        if self.kind == "equal":
            return f"F_{self.q}((t))"
        if self.e == 1 and self.f == 1:
            return f"Q_{self.p}"
        return f"mixed(p={self.p}, f={self.f}, e={self.e})"

    # -- JSON interchange ---------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {"kind": self.kind, "p": self.p, "f": self.f}
        if self.kind == "mixed":
            d["eisenstein"] = [[str(v) for v in c] for c in self.eisenstein]
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "FieldDescriptor":
        kind = d["kind"]
        p = int(d["p"])
        f = int(d.get("f", 1))
        eis = None
        if kind == "mixed":
            raw = d.get("eisenstein")
            if raw is None:
                raise NotEisenstein("mixed-kind config needs an 'eisenstein' list")
            eis = tuple(_coeff_from_json(c) for c in raw)
        return cls(kind=kind, p=p, f=f, eisenstein=eis)

    @classmethod
    def from_json(cls, text: str) -> "FieldDescriptor":
        return cls.from_json_dict(json.loads(text))


def _coeff_from_json(c):
    """A coefficient is a decimal string, an int, or a list of those (y-poly)."""
    if isinstance(c, (str, int)):
        return (int(c),)
    return tuple(int(v) for v in c)


def padic_field(p: int) -> FieldDescriptor:
    """Q_p: mixed kind, uniformizer polynomial x - p."""
    return FieldDescriptor(kind="mixed", p=p, f=1, eisenstein=((-p,),))


def laurent_field(p: int, f: int = 1) -> FieldDescriptor:
    """F_q((t))."""
    return FieldDescriptor(kind="equal", p=p, f=f)


def eisenstein_extension(p: int, coeffs, f: int = 1) -> FieldDescriptor:
    """Totally ramified extension of the unramified base by a monic
    Eisenstein polynomial with the given non-leading integer coefficients
    (little-endian).  ``eisenstein_extension(2, [-2, 0, 0, 0])`` is the
    quartic root of 2 over Q_2."""
    eis = tuple((int(c),) if isinstance(c, int) else tuple(int(v) for v in c) for c in coeffs)
    return FieldDescriptor(kind="mixed", p=p, f=f, eisenstein=eis)
