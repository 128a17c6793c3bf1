"""Congruence Hecke algebras over truncated models of local fields.

The package computes, in exact arithmetic, the Hecke algebra of a matrix
group over a non-archimedean local field with respect to a principal
congruence subgroup, using only the truncated ring O/p^n.  Two backends
whose truncated rings agree can then be compared structure constant by
structure constant.
"""

from ._kernels import USING_NUMBA
from .fields import FieldDescriptor, padic_field, laurent_field, eisenstein_extension
from .rings import TruncatedRing, RingElem, DeligneTriplet, truncated_ring
from .trunciso import TruncIso, EisensteinPoly, eisenstein_transfer, matching_iso
from .rootdata import RootDatum, root_datum, Window
from .groups import Backend, GroupElem, LevelQuotient, iwahori_factor
from .cartan import (
    DoubleCosetId,
    DoubleCosets,
    StabilizerTable,
    cartan_invariant,
    cartan_decompose,
    precision_bound,
)
from .hecke import HeckeAlgebra, HeckeElem, volume_closed_form
from .transfer import TransferPlan, build_plan

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "FieldDescriptor",
    "padic_field",
    "laurent_field",
    "eisenstein_extension",
    "TruncatedRing",
    "RingElem",
    "DeligneTriplet",
    "truncated_ring",
    "TruncIso",
    "EisensteinPoly",
    "eisenstein_transfer",
    "matching_iso",
    "RootDatum",
    "root_datum",
    "Window",
    "Backend",
    "GroupElem",
    "LevelQuotient",
    "iwahori_factor",
    "DoubleCosetId",
    "DoubleCosets",
    "StabilizerTable",
    "cartan_invariant",
    "cartan_decompose",
    "precision_bound",
    "HeckeAlgebra",
    "HeckeElem",
    "volume_closed_form",
    "TransferPlan",
    "build_plan",
]
