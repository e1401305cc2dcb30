"""Named check suites run by the CLI against a loaded scenario."""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass

import sympy as sp

from . import dirac as dirac_mod
from .checks import CheckResult
from .clifford import (
    anticommutation_holds,
    basis,
    dirac_conjugate,
    verify_commutator_table,
)
from .dirac import (
    CouplingConstants,
    SpinorField,
    bivector_transform,
    consistency_residual,
    covariance_check,
    derive_constraints,
    direct_dirac_residual,
    gamma_form,
    hermiticity_defect,
    mass_split,
    spinor_connection,
)
from .forms import Form, MForm
from .geometry import Geometry, geometry_suite, random_geometry, traces


@dataclass
class SuiteContext:
    geom: Geometry
    couplings: CouplingConstants
    psi: SpinorField
    mass: sp.Expr
    seed: int
    policy: str  # canonical | sampled


def derive_seed(seed: int, name: str) -> int:
    return (seed * 2654435761 + zlib.crc32(name.encode())) % (2**31)


def detect_policy(geom: Geometry, psi: SpinorField) -> str:
    """Canonical equality whenever the data stays in the rational class."""
    atoms = set()
    exprs = [geom.tetrad.h[i, j] for i in range(4) for j in range(4)]
    exprs += [v for _, f in geom.omega.items() for v in f.comps.values()]
    exprs += list(psi.components)
    for e in exprs:
        atoms |= sp.sympify(e).atoms(sp.sin, sp.cos, sp.sinh, sp.cosh, sp.exp)
    return "sampled" if atoms else "canonical"


def _zero_check(name, obj, ctx: SuiteContext, detail="") -> CheckResult:
    seed = derive_seed(ctx.seed, name)
    if ctx.policy == "canonical":
        ok = obj.is_zero_canonical()
        return CheckResult(name, ok, "canonical", 0.0 if ok else 1.0, detail)
    res = obj.max_residual_sampled(ctx.geom.chart, seed)
    return CheckResult(name, res <= 1e-9, "sampled", res, detail)


def suite_clifford(ctx: SuiteContext) -> list[CheckResult]:
    out = [
        CheckResult(
            "clifford: gamma_a gamma_b + gamma_b gamma_a = 2 eta_ab",
            anticommutation_holds(),
            "exact",
        )
    ]
    ok = True
    for label, B in basis():
        s = -1 if (label in ("1", "g5") or label.endswith("g5")) else 1
        bar = dirac_conjugate(B)
        if not all(sp.expand(x) == 0 for x in (sp.Matrix(bar) - s * sp.Matrix(B))):
            ok = False
    out.append(
        CheckResult("clifford: adjoint signs (-I, +g_a, +s_ab, -g_a g5, -g5)", ok, "exact")
    )
    for fam in verify_commutator_table():
        out.append(
            CheckResult(
                f"clifford: {fam.name}",
                fam.passed,
                "exact",
                0.0 if fam.passed else float(fam.failures),
                f"{fam.cases} index assignments",
            )
        )
    return out


def suite_geometry(ctx: SuiteContext) -> list[CheckResult]:
    return geometry_suite(ctx.geom, ctx.policy, derive_seed(ctx.seed, "geometry"))


def suite_dirac(ctx: SuiteContext) -> list[CheckResult]:
    diff = consistency_residual(ctx.psi, ctx.mass, ctx.couplings, ctx.geom)
    check = _zero_check("dirac: variational - direct = 0", diff, ctx)
    if not check.passed:
        # recognizable mismatch: the torsion-trace discrepancy of the
        # minimally-coupled operator on metric-compatible backgrounds
        _, _, trT = traces(ctx.geom)
        sg = gamma_form().hodge()
        known = sp.I * sg.wedge(
            MForm.from_form(trT * sp.Rational(-1, 2))
        ).wedge(MForm.from_matrix(ctx.psi.col))
        if (diff - known).is_zero_canonical():
            check.detail = "residual equals i *gamma ^ (-1/2 T) psi"
    return [check]


def suite_solution(ctx: SuiteContext) -> list[CheckResult]:
    res = direct_dirac_residual(ctx.psi, ctx.mass, ctx.couplings, ctx.geom)
    return [_zero_check("solution: direct Dirac residual = 0", res, ctx)]


def suite_hermiticity(ctx: SuiteContext) -> list[CheckResult]:
    L = dirac_mod.lagrangian_density(ctx.psi, ctx.mass, ctx.couplings, ctx.geom)
    Lc = Form(4, {k: sp.conjugate(v) for k, v in L.comps.items()})
    sym = _zero_check("hermiticity: symmetrized density self-conjugate", L - Lc, ctx)
    defect = hermiticity_defect(ctx.psi, ctx.mass, ctx.couplings, ctx.geom)
    dres = _zero_check("hermiticity: operator-form defect = 0", defect, ctx)
    return [sym, dres]


def suite_covariance(ctx: SuiteContext) -> list[CheckResult]:
    Omega = spinor_connection(ctx.couplings, ctx.geom)
    x = ctx.geom.chart.coord(1)
    out = []
    for tag, (a, b, theta) in (
        ("constant rotation s12", (1, 2, sp.Rational(1, 3))),
        ("constant boost s01", (0, 1, sp.Rational(2, 5))),
        ("position-dependent s12", (1, 2, x)),
    ):
        S, Sinv = bivector_transform(a, b, theta)
        res = covariance_check(
            Omega, S, Sinv, ctx.psi, ctx.geom,
            seed=derive_seed(ctx.seed, tag), policy="sampled",
        )
        res.name = f"covariance: {tag}"
        out.append(res)
    return out


def suite_mass_split(ctx: SuiteContext) -> list[CheckResult]:
    try:
        ms = mass_split(ctx.mass, ctx.couplings)
    except ValueError as exc:
        return [
            CheckResult(
                "mass-split: spectrum", True, "exact", 0.0,
                f"skipped: {exc}", skipped=True,
            )
        ]
    plus, minus = ms.masses["+i"], ms.masses["-i"]
    gap_ok = sp.expand(ms.gap - 8 * sp.Abs(ctx.couplings.b4)) == 0
    blind_ok = True
    if sp.sympify(ctx.couplings.b4) == 0:
        blind_ok = sp.expand(plus - minus) == 0
    detail = f"masses[g5=+i]={plus}, masses[g5=-i]={minus}, gap={ms.gap}"
    return [
        CheckResult("mass-split: gap = 8|b4|", bool(gap_ok), "exact", 0.0, detail),
        CheckResult(
            "mass-split: chirality-blind at b4=0", bool(blind_ok), "exact"
        ),
    ]


def suite_constraints(ctx: SuiteContext) -> list[CheckResult]:
    try:
        sol = derive_constraints()
    except Exception as exc:  # inconsistent system is a library bug
        return [CheckResult("constraints: derivation", False, "exact", 1.0, str(exc))]
    out = [
        CheckResult(
            "constraints: derivation",
            True,
            "exact",
            0.0,
            "Re a1 = -1/2, Re a3 = +1/2, Re b1 = -1/2; a2,a4,b2,b3,b4 real",
        )
    ]
    rng = random.Random(derive_seed(ctx.seed, "constraints"))
    ok = True
    for i in range(2):
        geom = random_geometry(ctx.geom.chart, rng, kind="general")
        draw = [sp.Rational(rng.randint(-8, 8), rng.randint(1, 6)) for _ in range(8)]
        cc = sol.family(*draw)
        psi = SpinorField.constant(1, 0, 0, 0)
        if not consistency_residual(psi, 1, cc, geom).is_zero_canonical():
            ok = False
    out.append(
        CheckResult("constraints: re-substitution on random geometries", ok, "canonical")
    )
    return out


SUITES = {
    "clifford": suite_clifford,
    "geometry": suite_geometry,
    "dirac": suite_dirac,
    "solution": suite_solution,
    "hermiticity": suite_hermiticity,
    "covariance": suite_covariance,
    "mass-split": suite_mass_split,
    "constraints": suite_constraints,
}
