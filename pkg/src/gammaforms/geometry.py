"""Metric-affine geometry from a tetrad and a full connection.

A geometry is the pair (coframe e^a = h^a_mu dx^mu, connection 1-form
omega^a_b); the metric is always g = eta_ab e^a x e^b, so non-metricity,
torsion, curvature, their traces and the Levi-Civita/contortion/
disformation split are all derived quantities.  Index movement happens
only through explicit eta factors, never through the covariant exterior
derivative: in non-metric geometry D and index raising do not commute.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import sympy as sp

from .checks import CheckResult
from .forms import Form, FormFamily, Tetrad, cov_d, ext_d
from .clifford import eta
from .scalars import Chart


class Geometry:
    """Chart + tetrad + full connection; derived objects are cached."""

    def __init__(self, chart: Chart, tetrad, omega: FormFamily):
        self.chart = chart
        self.tetrad = tetrad if isinstance(tetrad, Tetrad) else Tetrad(chart, tetrad)
        if omega.slots != ("up", "down") or omega.degree != 1:
            raise ValueError("connection must be an ('up','down') family of 1-forms")
        self.omega = omega
        self._cache = {}

    @staticmethod
    def flat(chart: Chart | None = None) -> "Geometry":
        chart = chart or Chart()
        return Geometry(chart, Tetrad.flat(chart), zero_connection())

    def coframe(self, a: int) -> Form:
        return Form.coframe(a)

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]


def zero_connection() -> FormFamily:
    return FormFamily.build(("up", "down"), 1, {})


def connection_from_lower(omega_lower: FormFamily) -> FormFamily:
    """omega^a_b from omega_ab by raising the first index with eta."""
    return omega_lower.move_slot(0)


def omega_lower(geom: Geometry) -> FormFamily:
    """omega_ab = eta_ac omega^c_b."""
    return geom._cached("omega_lower", lambda: geom.omega.move_slot(0))


def nonmetricity(geom: Geometry) -> FormFamily:
    """Q_ab = omega_(ab): the symmetric part of the lowered connection."""

    def compute():
        low = omega_lower(geom)
        data = {}
        for a in range(4):
            for b in range(a, 4):
                data[(a, b)] = (low.get((a, b)) + low.get((b, a))) * sp.Rational(1, 2)
        return FormFamily.build(("down", "down"), 1, data, symmetry="sym")

    return geom._cached("nonmetricity", compute)


def torsion(geom: Geometry) -> FormFamily:
    """T^a = de^a + omega^a_b ^ e^b."""

    def compute():
        data = {}
        for a in range(4):
            f = geom.tetrad.de[a]
            for b in range(4):
                w = geom.omega.get((a, b))
                if not w.is_structurally_zero():
                    f = f + w.wedge(Form.coframe(b))
            data[(a,)] = f
        return FormFamily.build(("up",), 2, data)

    return geom._cached("torsion", compute)


def curvature(geom: Geometry) -> FormFamily:
    """R^a_b = d omega^a_b + omega^a_c ^ omega^c_b."""

    def compute():
        data = {}
        for a in range(4):
            for b in range(4):
                f = ext_d(geom.omega.get((a, b)), geom.tetrad)
                for c in range(4):
                    w1 = geom.omega.get((a, c))
                    w2 = geom.omega.get((c, b))
                    if w1.is_structurally_zero() or w2.is_structurally_zero():
                        continue
                    f = f + w1.wedge(w2)
                data[(a, b)] = f
        return FormFamily.build(("up", "down"), 2, data)

    return geom._cached("curvature", compute)


def traces(geom: Geometry) -> tuple[Form, Form, Form]:
    """The trace 1-forms (Q, P, T).

    Q = eta_ab Q^{ab}, P = (iota_a Q^{ab}) e_b, T = iota_a T^a.  These are
    the only geometric 1-forms available to the scalar and pseudoscalar
    spinor-connection channels.
    """

    def compute():
        Qf = nonmetricity(geom)
        Qtr = Form.zero(1)
        for a in range(4):
            Qtr = Qtr + Qf.get((a, a)) * eta(a, a)
        Qup = Qf.move_slot(0).move_slot(1)
        Ptr = Form.zero(1)
        for a in range(4):
            for b in range(4):
                contracted = Qup.get((a, b)).interior(a)
                if contracted.is_structurally_zero():
                    continue
                coeff = contracted.get(())
                Ptr = Ptr + Form.monomial(coeff * eta(b, b), (b,))
        Tf = torsion(geom)
        Ttr = Form.zero(1)
        for a in range(4):
            Ttr = Ttr + Tf.get((a,)).interior(a)
        return Qtr.canon(), Ptr.canon(), Ttr.canon()

    return geom._cached("traces", compute)


def levi_civita(geom: Geometry) -> FormFamily:
    """Riemannian connection 1-form of the tetrad, with both indices down.

    omega~_ab = (1/2)[-iota_a de_b + iota_b de_a + (iota_a iota_b de_c) e^c];
    equivalently the unique antisymmetric solution of omega~^a_b ^ e^b = -de^a.
    """

    def compute():
        de_low = [geom.tetrad.de[c] * eta(c, c) for c in range(4)]
        data = {}
        for a in range(4):
            for b in range(a + 1, 4):
                f = (de_low[a].interior(b) - de_low[b].interior(a)) * sp.Rational(1, 2)
                for c in range(4):
                    coeff = de_low[c].interior(b).interior(a).get(())
                    if coeff != 0:
                        f = f + Form.monomial(coeff * sp.Rational(1, 2), (c,))
                data[(a, b)] = f
        return FormFamily.build(("down", "down"), 1, data, symmetry="antisym")

    return geom._cached("levi_civita", compute)


def contortion(geom: Geometry) -> FormFamily:
    """K_ab = (1/2)[iota_a T_b - iota_b T_a - (iota_a iota_b T_c) e^c]."""

    def compute():
        Tf = torsion(geom)
        T_low = [Tf.get((c,)) * eta(c, c) for c in range(4)]
        data = {}
        for a in range(4):
            for b in range(a + 1, 4):
                f = (T_low[b].interior(a) - T_low[a].interior(b)) * sp.Rational(1, 2)
                for c in range(4):
                    coeff = T_low[c].interior(b).interior(a).get(())
                    if coeff != 0:
                        f = f - Form.monomial(coeff * sp.Rational(1, 2), (c,))
                data[(a, b)] = f
        return FormFamily.build(("down", "down"), 1, data, symmetry="antisym")

    return geom._cached("contortion", compute)


def disformation(geom: Geometry) -> FormFamily:
    """(iota_b Q_ac - iota_a Q_bc) e^c + Q_ab: the non-metricity part of L_ab."""

    def compute():
        Qf = nonmetricity(geom)
        data = {}
        for a in range(4):
            for b in range(4):
                f = Qf.get((a, b))
                for c in range(4):
                    coeff = Qf.get((a, c)).interior(b).get(()) - Qf.get((b, c)).interior(a).get(())
                    if coeff != 0:
                        f = f + Form.monomial(coeff, (c,))
                data[(a, b)] = f
        return FormFamily.build(("down", "down"), 1, data)

    return geom._cached("disformation", compute)


def distortion(geom: Geometry) -> FormFamily:
    """L_ab = contortion + disformation; omega_ab = omega~_ab + L_ab."""

    def compute():
        return contortion(geom) + disformation(geom)

    return geom._cached("distortion", compute)


def decompose(geom: Geometry) -> tuple[FormFamily, FormFamily]:
    return levi_civita(geom), distortion(geom)


@dataclass
class GeometryInvariants:
    """Everything the spinor sector needs, computed once per geometry."""

    Q_ab: FormFamily
    T_a: FormFamily
    R_ab: FormFamily
    trace_Q: Form
    trace_P: Form
    trace_T: Form
    lc: FormFamily
    K: FormFamily
    L: FormFamily


def invariants(geom: Geometry) -> GeometryInvariants:
    def compute():
        trQ, trP, trT = traces(geom)
        return GeometryInvariants(
            Q_ab=nonmetricity(geom),
            T_a=torsion(geom),
            R_ab=curvature(geom),
            trace_Q=trQ,
            trace_P=trP,
            trace_T=trT,
            lc=levi_civita(geom),
            K=contortion(geom),
            L=distortion(geom),
        )

    return geom._cached("invariants", compute)


# --- identity suites ---------------------------------------------------------


def _family_check(name, family, chart, policy="canonical", seed=0):
    if policy == "canonical":
        ok = family.is_zero_canonical()
        return CheckResult(name, ok, "canonical", 0.0 if ok else 1.0)
    res = family.max_residual_sampled(chart, seed)
    return CheckResult(name, res <= 1e-9, "sampled", res)


def _form_check(name, form, chart, policy="canonical", seed=0):
    if policy == "canonical":
        ok = form.is_zero_canonical()
        return CheckResult(name, ok, "canonical", 0.0 if ok else 1.0)
    res = form.max_residual_sampled(chart, seed)
    return CheckResult(name, res <= 1e-9, "sampled", res)


def decomposition_check(geom: Geometry, policy="canonical", seed=0) -> list[CheckResult]:
    """Connection split: recomposition, symmetric part, torsion/contortion ties."""
    lc, L = decompose(geom)
    low = omega_lower(geom)
    Qf = nonmetricity(geom)
    Tf = torsion(geom)
    K = contortion(geom)

    recomp = low - (lc + L)
    sym_part_data = {}
    for a in range(4):
        for b in range(4):
            sym = (low.get((a, b)) + low.get((b, a))) * sp.Rational(1, 2)
            sym_part_data[(a, b)] = sym - Qf.get((a, b))
    sym_resid = FormFamily.build(("down", "down"), 1, sym_part_data)

    lc_up = lc.move_slot(0)
    lc_wedge = {}
    for a in range(4):
        f = geom.tetrad.de[a]
        for b in range(4):
            f = f + lc_up.get((a, b)).wedge(Form.coframe(b))
        lc_wedge[(a,)] = f
    lc_resid = FormFamily.build(("up",), 2, lc_wedge)

    K_up = K.move_slot(0)
    K_wedge = {}
    for a in range(4):
        f = Form.zero(2)
        for b in range(4):
            f = f + K_up.get((a, b)).wedge(Form.coframe(b))
        K_wedge[(a,)] = f - Tf.get((a,))
    K_resid = FormFamily.build(("up",), 2, K_wedge)

    ch = geom.chart
    return [
        _family_check("decompose: omega = lc + L", recomp, ch, policy, seed),
        _family_check("decompose: omega_(ab) = Q_ab", sym_resid, ch, policy, seed),
        _family_check("levi-civita: lc^a_b ^ e^b = -de^a", lc_resid, ch, policy, seed),
        _family_check("contortion: K^a_b ^ e^b = T^a", K_resid, ch, policy, seed),
    ]


def bianchi_check(geom: Geometry, policy="canonical", seed=0) -> list[CheckResult]:
    """D Q_ab = R_(ab),  D T^a = R^a_b ^ e^b,  D R^a_b = 0."""
    Qf = nonmetricity(geom)
    Tf = torsion(geom)
    Rf = curvature(geom)
    om = geom.omega
    frame = geom.tetrad

    DQ = cov_d(Qf, om, frame)
    R_low = Rf.move_slot(0)
    b1_data = {}
    for a in range(4):
        for b in range(4):
            Rsym = (R_low.get((a, b)) + R_low.get((b, a))) * sp.Rational(1, 2)
            b1_data[(a, b)] = DQ.get((a, b)) - Rsym
    b1 = FormFamily.build(("down", "down"), 2, b1_data)

    DT = cov_d(Tf, om, frame)
    b2_data = {}
    for a in range(4):
        f = DT.get((a,))
        for b in range(4):
            f = f - Rf.get((a, b)).wedge(Form.coframe(b))
        b2_data[(a,)] = f
    b2 = FormFamily.build(("up",), 3, b2_data)

    b3 = cov_d(Rf, om, frame)

    ch = geom.chart
    return [
        _family_check("bianchi: D Q_ab - R_(ab)", b1, ch, policy, seed),
        _family_check("bianchi: D T^a - R^a_b ^ e^b", b2, ch, policy, seed),
        _family_check("bianchi: D R^a_b", b3, ch, policy, seed),
    ]


def _star_e_families(geom: Geometry):
    """Hodge duals *e_a, *e_ab, *e_abc, *e_abcd with all indices down."""
    e_low = [Form.coframe(a) * eta(a, a) for a in range(4)]
    fam1 = FormFamily.build(
        ("down",), 3, {(a,): e_low[a].hodge() for a in range(4)}
    )
    d2 = {}
    for a, b in itertools.product(range(4), repeat=2):
        d2[(a, b)] = e_low[a].wedge(e_low[b]).hodge()
    fam2 = FormFamily.build(("down", "down"), 2, d2)
    d3 = {}
    for idx in itertools.product(range(4), repeat=3):
        f = e_low[idx[0]].wedge(e_low[idx[1]]).wedge(e_low[idx[2]])
        d3[idx] = f.hodge()
    fam3 = FormFamily.build(("down",) * 3, 1, d3)
    d4 = {}
    for idx in itertools.product(range(4), repeat=4):
        f = e_low[idx[0]]
        for i in idx[1:]:
            f = f.wedge(e_low[i])
        d4[idx] = f.hodge()
    fam4 = FormFamily.build(("down",) * 4, 0, d4)
    return fam1, fam2, fam3, fam4


def hodge_identity_check(geom: Geometry, policy="canonical", seed=0) -> list[CheckResult]:
    """D of the Hodge coframe monomials against the -Q ^ * + T ^ * pattern,
    plus the combined identity D*e^a - omega^{(ab)} ^ *e_b = *e_a ^ (Q+T-P)."""
    om = geom.omega
    frame = geom.tetrad
    trQ, trP, trT = traces(geom)
    Tf = torsion(geom)
    s1, s2, s3, s4 = _star_e_families(geom)

    r1_data = {}
    D1 = cov_d(s1, om, frame)
    for a in range(4):
        f = D1.get((a,)) + trQ.wedge(s1.get((a,)))
        for b in range(4):
            f = f - Tf.get((b,)).wedge(s2.get((a, b)))
        r1_data[(a,)] = f
    r1 = FormFamily.build(("down",), 4, r1_data)

    r2_data = {}
    D2 = cov_d(s2, om, frame)
    for a, b in itertools.product(range(4), repeat=2):
        f = D2.get((a, b)) + trQ.wedge(s2.get((a, b)))
        for c in range(4):
            f = f - Tf.get((c,)).wedge(s3.get((a, b, c)))
        r2_data[(a, b)] = f
    r2 = FormFamily.build(("down", "down"), 3, r2_data)

    r3_data = {}
    D3 = cov_d(s3, om, frame)
    for idx in itertools.product(range(4), repeat=3):
        f = D3.get(idx) + trQ.wedge(s3.get(idx))
        for d in range(4):
            f = f - Tf.get((d,)).wedge(s4.get(idx + (d,)))
        r3_data[idx] = f
    r3 = FormFamily.build(("down",) * 3, 2, r3_data)

    r4_data = {}
    D4 = cov_d(s4, om, frame)
    for idx in itertools.product(range(4), repeat=4):
        r4_data[idx] = D4.get(idx) + trQ.wedge(s4.get(idx))
    r4 = FormFamily.build(("down",) * 4, 1, r4_data)

    # combined identity; the free index on the right is raised with eta
    star_up = FormFamily.build(
        ("up",), 3, {(a,): Form.coframe(a).hodge() for a in range(4)}
    )
    D_up = cov_d(star_up, om, frame)
    S = trQ + trT - trP
    comb_data = {}
    for a in range(4):
        f = D_up.get((a,))
        for b in range(4):
            w_ab = geom.omega.get((a, b)) * eta(b, b)  # omega^{ab}
            w_ba = geom.omega.get((b, a)) * eta(a, a)  # omega^{ba}
            sym = (w_ab + w_ba) * sp.Rational(1, 2)
            f = f - sym.wedge(s1.get((b,)))
        rhs = s1.get((a,)).wedge(S) * eta(a, a)
        comb_data[(a,)] = f - rhs
    comb = FormFamily.build(("up",), 4, comb_data)

    ch = geom.chart
    return [
        _family_check("hodge: D*e_a = -Q^*e_a + T^b^*e_ab", r1, ch, policy, seed),
        _family_check("hodge: D*e_ab = -Q^*e_ab + T^c^*e_abc", r2, ch, policy, seed),
        _family_check("hodge: D*e_abc = -Q^*e_abc + T^d^*e_abcd", r3, ch, policy, seed),
        _family_check("hodge: D*e_abcd = -Q^*e_abcd", r4, ch, policy, seed),
        _family_check(
            "hodge: D*e^a - omega^(ab)^*e_b = *e_a^(Q+T-P)", comb, ch, policy, seed
        ),
    ]


def geometry_suite(geom: Geometry, policy="canonical", seed=0) -> list[CheckResult]:
    out = []
    out += bianchi_check(geom, policy, seed)
    out += hodge_identity_check(geom, policy, seed)
    out += decomposition_check(geom, policy, seed)
    return out


# --- randomized polynomial geometries ----------------------------------------


def random_polynomial(rng: random.Random, chart: Chart, degree=2, terms=2,
                      coeff_range=(-2, 2)):
    """Sparse random polynomial in the chart coordinates, integer coefficients."""
    coords = chart.coords
    expr = sp.Integer(0)
    for _ in range(rng.randint(1, terms)):
        c = 0
        while c == 0:
            c = rng.randint(*coeff_range)
        mono = sp.Integer(c)
        for _ in range(rng.randint(0, degree)):
            mono *= coords[rng.randrange(4)]
        expr += mono
    return sp.expand(expr)


def random_geometry(
    chart: Chart,
    rng: random.Random,
    kind: str = "general",
    degree: int = 2,
    connection_entries: int = 3,
) -> Geometry:
    """Random low-degree polynomial geometry with an exactly invertible tetrad.

    The tetrad is unit-triangular plus an optional constant diagonal
    scaling, so its inverse stays polynomial/rational-constant and every
    identity check remains decidable by canonical equality.
    """
    h = sp.eye(4)
    upper = rng.random() < 0.5
    for _ in range(rng.randint(1, 3)):
        a = rng.randrange(4)
        b = rng.randrange(4)
        if a == b:
            continue
        if (a < b) != upper:
            a, b = b, a
        h[a, b] = h[a, b] + random_polynomial(rng, chart, degree=degree, terms=1)
    for a in range(4):
        if rng.random() < 0.25:
            h[a, a] = rng.choice([1, 2, sp.Rational(1, 2)])
    tetrad = Tetrad(chart, h)

    if kind == "riemannian":
        geom0 = Geometry(chart, tetrad, zero_connection())
        lc = levi_civita(geom0)
        return Geometry(chart, tetrad, connection_from_lower(lc))

    low_data = {}
    for _ in range(connection_entries):
        a, b = rng.randrange(4), rng.randrange(4)
        key = (a, b)
        slot = rng.randrange(4)
        poly = random_polynomial(rng, chart, degree=degree, terms=1)
        f = low_data.get(key, Form.zero(1)) + Form.monomial(poly, (slot,))
        low_data[key] = f
    low = FormFamily.build(("down", "down"), 1, low_data)

    if kind == "metric_compatible":
        anti = {}
        for a in range(4):
            for b in range(4):
                anti[(a, b)] = (low.get((a, b)) - low.get((b, a))) * sp.Rational(1, 2)
        low = FormFamily.build(("down", "down"), 1, anti)
        geom0 = Geometry(chart, tetrad, zero_connection())
        lc = levi_civita(geom0)
        low = low + lc
    elif kind == "weyl":
        phi = Form.monomial(random_polynomial(rng, chart, degree=degree, terms=1),
                            (rng.randrange(4),))
        low = FormFamily.build(
            ("down", "down"), 1,
            {(a, a): phi * eta(a, a) for a in range(4)},
        )
    elif kind != "general":
        raise ValueError(f"unknown geometry kind {kind!r}")

    return Geometry(chart, tetrad, connection_from_lower(low))
