"""Clifford-valued exterior calculus on metric-affine spacetimes.

Scalar fields, the cl(1,3) matrix algebra, coframe-expanded exterior
forms, the Cartan structure objects of a (tetrad, connection) pair, and
the direct/variational Dirac operator comparison with its coupling
constraints and chirality mass split.
"""

from .scalars import Chart, ScalarExpr, canon, derive, expr_equal, parameter, parse
from .clifford import (
    BasisCoefficients,
    basis,
    basis_decompose,
    dirac_conjugate,
    gamma,
    gamma5,
    sigma,
    verify_commutator_table,
)
from .forms import Form, FormFamily, MForm, Tetrad, cov_d, cov_d_spinor, ext_d
from .geometry import (
    Geometry,
    GeometryInvariants,
    bianchi_check,
    connection_from_lower,
    contortion,
    curvature,
    decompose,
    geometry_suite,
    hodge_identity_check,
    invariants,
    levi_civita,
    nonmetricity,
    random_geometry,
    torsion,
    traces,
    zero_connection,
)
from .dirac import (
    ConstraintSolution,
    CouplingConstants,
    MassSplit,
    SpinorField,
    adjoint_connection,
    consistency_residual,
    covariance_check,
    derive_constraints,
    direct_dirac_residual,
    hermiticity_defect,
    lagrangian_density,
    mass_split,
    spinor_connection,
    variational_dirac_residual,
)
from .scenario import Scenario, ScenarioError, load_scenario

__version__ = "0.1.0"
