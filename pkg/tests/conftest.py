import random

import pytest
import sympy as sp

from gammaforms.forms import Form, FormFamily, Tetrad
from gammaforms.geometry import Geometry, connection_from_lower, levi_civita, zero_connection
from gammaforms.scalars import Chart


@pytest.fixture(scope="session")
def chart():
    return Chart()


@pytest.fixture(scope="session")
def coords(chart):
    return chart.coords


@pytest.fixture()
def flat_geometry(chart):
    return Geometry.flat(chart)


def make_torsion_line_geometry(chart, u=None):
    """Metric-compatible connection omega_ab = (u_a e_b - u_b e_a)/2."""
    u = u or [sp.Integer(0), sp.Integer(1), sp.Integer(0), sp.Integer(0)]
    e_low = [Form.coframe(b) * (-1 if b == 0 else 1) for b in range(4)]
    data = {}
    for a in range(4):
        for b in range(4):
            if a != b:
                data[(a, b)] = (u[a] * e_low[b] - u[b] * e_low[a]) * sp.Rational(1, 2)
    low = FormFamily.build(("down", "down"), 1, data)
    return Geometry(chart, Tetrad.flat(chart), connection_from_lower(low))


def make_weyl_geometry(chart, phi=None):
    """Pure-trace non-metricity omega_ab = phi eta_ab with phi a 1-form."""
    t = chart.coord(0)
    phi = phi if phi is not None else Form.monomial(t, (0,))
    data = {(a, a): phi * (-1 if a == 0 else 1) for a in range(4)}
    low = FormFamily.build(("down", "down"), 1, data)
    return Geometry(chart, Tetrad.flat(chart), connection_from_lower(low))


def make_frw_geometry(chart, scale=None):
    """FRW coframe e^0 = dt, e^k = a(t) dx^k with its Levi-Civita connection."""
    t = chart.coord(0)
    a_t = scale if scale is not None else 1 + t**2 / 4
    tetrad = Tetrad(chart, sp.diag(1, a_t, a_t, a_t))
    base = Geometry(chart, tetrad, zero_connection())
    return Geometry(chart, tetrad, connection_from_lower(levi_civita(base)))


@pytest.fixture()
def torsion_line_geometry(chart):
    return make_torsion_line_geometry(chart)


@pytest.fixture()
def weyl_geometry(chart):
    return make_weyl_geometry(chart)


@pytest.fixture()
def frw_geometry(chart):
    return make_frw_geometry(chart)


@pytest.fixture()
def rng():
    return random.Random(20260810)
