"""Exact jet calculus: prolongation, normal forms, differential invariants and orbit counts."""

from .corpus import run_corpus
from .equation import SolvedEquation, is_symmetry, prolong_equation, reduce
from .errors import JetError
from .expr import Poly, RatFun, VarId, evaluate, format_expr, parse, partial
from .invariants import (
    Ansatz,
    Derivation,
    FamilySpec,
    LieAlgebraSpec,
    TotalDifferentialOperator,
    apply_derivation,
    check_first_integral,
    commutator,
    decompose_commutator,
    find_invariants_linear,
    instantiate_family,
    is_invariant,
    tresse_derivatives,
    verify_invariant_derivation,
)
from .jet import JetContext, fiber_dimension, horizontal_differential, total_derivative, total_derivative_multi
from .orbitdim import generic_orbit_dimension, hilbert_function, orbit_dimension_at, poincare_fit, sample_point
from .prolong import PointMap, PointVectorField, generating_function, lie_derivative, prolong_field, prolong_point_map
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"
