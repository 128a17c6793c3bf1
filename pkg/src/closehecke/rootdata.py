"""Based root data for the implemented matrix families.

Covers split GL_n and SL_n (n <= 3) and the Weil restrictions of GL_2 and
SL_2 along an extension E/F, for which the relative root system is the one
of the underlying group decorated with the ramification index e_a and
residue degree f_a of E/F on every root.  Cocharacters are integer tuples
in Z^n (summing to zero for SL); the antidominant chamber is the ascending
one, so the canonical representative of a Weyl orbit is the sorted tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

Cochar = tuple[int, ...]


@dataclass(frozen=True)
class DecoratedRoot:
    vector: Cochar
    e_a: int = 1
    f_a: int = 1
    double_is_root: bool = False  # typed but exercised by no built-in family


@dataclass(frozen=True)
class RootDatum:
    family: str          # "GL" | "SL"
    n: int               # matrix size
    ext_e: int = 1       # e(E/F) for restriction families, else 1
    ext_f: int = 1       # f(E/F)

    def __post_init__(self):
        if self.family not in ("GL", "SL"):
            raise ValueError("family must be GL or SL")
        if not 1 <= self.n <= 3:
            raise ValueError("only ranks up to 3 are implemented")
        if self.ext_e < 1 or self.ext_f < 1:
            raise ValueError("extension decorations must be >= 1")

    # -- roots ---------------------------------------------------------------

    @property
    def is_restriction(self) -> bool:
        return self.ext_e * self.ext_f > 1

    def roots(self) -> tuple[DecoratedRoot, ...]:
        out = []
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                v = [0] * self.n
                v[i], v[j] = 1, -1
                out.append(DecoratedRoot(tuple(v), self.ext_e, self.ext_f))
        return tuple(out)

    def positive_roots(self) -> tuple[DecoratedRoot, ...]:
        return tuple(a for a in self.roots()
                     if next(v for v in a.vector if v != 0) > 0)

    def simple_roots(self) -> tuple[DecoratedRoot, ...]:
        out = []
        for i in range(self.n - 1):
            v = [0] * self.n
            v[i], v[i + 1] = 1, -1
            out.append(DecoratedRoot(tuple(v), self.ext_e, self.ext_f))
        return tuple(out)

    def coroot(self, a: DecoratedRoot) -> Cochar:
        return a.vector

    # -- lattice and Weyl group ------------------------------------------------

    def in_lattice(self, lam: Cochar) -> bool:
        if len(lam) != self.n:
            return False
        return self.family == "GL" or sum(lam) == 0

    def check_cochar(self, lam) -> Cochar:
        lam = tuple(int(v) for v in lam)
        if not self.in_lattice(lam):
            raise ValueError(f"{lam} is not in the cocharacter lattice of {self}")
        return lam

    def weyl_elements(self) -> tuple[np.ndarray, ...]:
        """All Weyl elements as permutation matrices acting on Z^n."""
        mats = []
        for perm in itertools.permutations(range(self.n)):
            m = np.zeros((self.n, self.n), dtype=np.int64)
            for i, pi in enumerate(perm):
                m[pi, i] = 1
            mats.append(m)
        return tuple(mats)

    def weyl_orbit(self, lam: Cochar) -> set[Cochar]:
        lam = self.check_cochar(lam)
        return {tuple(int(v) for v in w @ np.array(lam)) for w in self.weyl_elements()}

    # -- chamber combinatorics ----------------------------------------------------

    def pairing(self, a, lam) -> int:
        vec = a.vector if isinstance(a, DecoratedRoot) else tuple(a)
        return int(sum(x * y for x, y in zip(vec, lam)))

    def is_antidominant(self, lam: Cochar) -> bool:
        lam = self.check_cochar(lam)
        return all(lam[i] <= lam[i + 1] for i in range(self.n - 1))

    def antidominant_rep(self, lam: Cochar) -> tuple[Cochar, np.ndarray]:
        """The unique antidominant Weyl translate and one witnessing
        permutation matrix w with w . lam equal to it."""
        lam = self.check_cochar(lam)
        order = sorted(range(self.n), key=lambda i: (lam[i], i))
        w = np.zeros((self.n, self.n), dtype=np.int64)
        for new, old in enumerate(order):
            w[new, old] = 1
        return tuple(lam[i] for i in order), w

    def max_pairing(self, lam: Cochar) -> int:
        lam = self.check_cochar(lam)
        return max((abs(self.pairing(a, lam)) for a in self.positive_roots()),
                   default=0)

    # -- antidominant semigroup -----------------------------------------------------

    def semigroup_generators(self) -> tuple[Cochar, ...]:
        """A finite antidominant set containing 0 whose sums reach every
        antidominant cocharacter (certified by tests over a window)."""
        n = self.n
        if self.family == "GL":
            gens = {tuple([0] * n)}
            for k in range(1, n):
                gens.add(tuple([0] * (n - k) + [1] * k))
            gens.add(tuple([1] * n))
            gens.add(tuple([-1] * n))
            return tuple(sorted(gens))
        if n == 1:
            return ((0,),)
        if n == 2:
            return ((0, 0), (-1, 1))
        return ((0, 0, 0), (-1, 0, 1), (-1, -1, 2), (-2, 1, 1))

    def generator_decomposition(self, lam: Cochar, limit: int = 64) -> list[Cochar]:
        """Greedy certificate writing an antidominant lam as a sum of
        semigroup generators; raises if no decomposition is found."""
        lam = self.check_cochar(lam)
        if not self.is_antidominant(lam):
            raise ValueError("decomposition expects an antidominant cocharacter")
        gens = [g for g in self.semigroup_generators() if any(g)]
        zero = tuple([0] * self.n)
        # breadth-first over residuals keeps the certificate short
        seen = {lam: None}
        frontier = [lam]
        for _ in range(limit):
            nxt = []
            for cur in frontier:
                if cur == zero:
                    out = []
                    node = cur
                    while seen[node] is not None:
                        node, g = seen[node]
                        out.append(g)
                    return out
                for g in gens:
                    res = tuple(c - v for c, v in zip(cur, g))
                    if self.is_antidominant(res) and res not in seen:
                        seen[res] = (cur, g)
                        nxt.append(res)
            if not nxt:
                break
            frontier = nxt
        raise ValueError(f"no generator decomposition found for {lam}")

    def __str__(self):
        base = f"{self.family}{self.n}"
        if self.is_restriction:
            base = f"Res(e={self.ext_e},f={self.ext_f}){base}"
        return base


def root_datum(family: str, n: int, ext_e: int = 1, ext_f: int = 1) -> RootDatum:
    """Family constructor; 'ResSL2' / 'ResGL2' style names are accepted."""
    fam = family.upper()
    if fam.startswith("RES"):
        fam = fam[3:]
        if fam in ("SL2", "GL2"):
            fam, n = fam[:2], 2
    return RootDatum(fam, n, ext_e, ext_f)


@dataclass(frozen=True)
class Window:
    """A finite set of antidominant cocharacters: sup-norm box bound and/or
    a cap on |<a, lam>| over the roots.  GL families need the box to make
    the set finite in the central direction."""

    box: int | None = None
    pairing: int | None = None

    def __post_init__(self):
        if self.box is None and self.pairing is None:
            raise ValueError("window needs at least one bound")

    @classmethod
    def parse(cls, text: str) -> "Window":
        box = pairing = None
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, _, val = part.partition(":")
            if key == "box":
                box = int(val)
            elif key == "pairing":
                pairing = int(val)
            else:
                raise ValueError(f"unknown window component {part!r}")
        return cls(box, pairing)

    def spec(self) -> str:
        parts = []
        if self.box is not None:
            parts.append(f"box:{self.box}")
        if self.pairing is not None:
            parts.append(f"pairing:{self.pairing}")
        return ",".join(parts)

    def enumerate(self, datum: RootDatum) -> list[Cochar]:
        if self.box is None:
            if datum.family == "GL":
                raise ValueError("GL windows need a box bound to be finite")
            # for SL the pairing cap bounds the box as well
            box = self.pairing
        else:
            box = self.box
        out = []
        for lam in itertools.product(range(-box, box + 1), repeat=datum.n):
            if not datum.in_lattice(lam):
                continue
            if not datum.is_antidominant(lam):
                continue
            if self.box is not None and max(abs(v) for v in lam) > self.box:
                continue
            if self.pairing is not None and datum.max_pairing(lam) > self.pairing:
                continue
            out.append(lam)
        return sorted(out)

    def sumset(self, datum: RootDatum) -> list[Cochar]:
        """Antidominant support window closed under one product: all sums
        of two window members."""
        base = self.enumerate(datum)
        out = set(base)
        for a in base:
            for b in base:
                out.add(tuple(x + y for x, y in zip(a, b)))
        return sorted(out)
