"""Scenario files: one TOML file = one geometry + one coupling specification.

Expression values are strings in the scalar grammar; connection entries
are given per index pair as four coframe-slot coefficients.  Scenarios
drive the CLI suites and double as diffable regression fixtures.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import sympy as sp

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dirac import CouplingConstants, SpinorField
from .forms import Form, FormFamily, Tetrad
from .geometry import Geometry, connection_from_lower, random_geometry, zero_connection
from .scalars import Chart, parse


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario input."""


@dataclass
class Scenario:
    name: str
    description: str = ""
    seed: int = 0
    suites: tuple = ()
    chart: Chart = field(default_factory=Chart)
    parameters: tuple = ()
    tetrad_rows: tuple | None = None  # 4x4 expression strings
    connection_mode: str = "explicit"  # explicit | levi-civita
    connection_lower: dict = field(default_factory=dict)
    connection_upper: dict = field(default_factory=dict)
    random_kind: str | None = None  # draws the geometry from the seed
    couplings_mode: str = "zero"  # zero | constrained | explicit | symbolic
    couplings_A: tuple = ("0",) * 4
    couplings_B: tuple = ("0",) * 4
    couplings_a: tuple = ("0",) * 4
    couplings_b: tuple = ("0",) * 4
    charge: str | None = None
    potential: tuple | None = None  # 4 coframe-slot coefficients
    spinor: tuple = ("1", "0", "0", "0")
    mass: str = "1"

    def _parse(self, text):
        try:
            return parse(str(text), self.chart, self.parameters)
        except ValueError as exc:
            raise ScenarioError(f"{self.name}: bad expression {text!r}: {exc}") from exc

    def build_geometry(self, seed: int | None = None) -> Geometry:
        seed = self.seed if seed is None else seed
        if self.random_kind is not None:
            return random_geometry(
                self.chart, random.Random(seed), kind=self.random_kind
            )
        if self.tetrad_rows is None:
            tetrad = Tetrad.flat(self.chart)
        else:
            h = sp.Matrix(
                4, 4, [self._parse(v) for row in self.tetrad_rows for v in row]
            )
            try:
                tetrad = Tetrad(self.chart, h)
            except ValueError as exc:
                raise ScenarioError(f"{self.name}: {exc}") from exc
            _validate_invertible(tetrad, self.chart)
        if self.connection_mode == "levi-civita":
            from .geometry import levi_civita

            base = Geometry(self.chart, tetrad, zero_connection())
            return Geometry(self.chart, tetrad, connection_from_lower(levi_civita(base)))
        if self.connection_lower and self.connection_upper:
            raise ScenarioError(
                f"{self.name}: give connection.lower or connection.upper, not both"
            )
        table, lower = (
            (self.connection_lower, True)
            if self.connection_lower
            else (self.connection_upper, False)
        )
        data = {}
        for key, slots in table.items():
            try:
                a, b = (int(s) for s in str(key).split())
            except Exception as exc:
                raise ScenarioError(
                    f"{self.name}: connection key {key!r} must look like 'a b'"
                ) from exc
            if not (0 <= a <= 3 and 0 <= b <= 3) or len(slots) != 4:
                raise ScenarioError(f"{self.name}: bad connection entry {key!r}")
            f = Form(
                1, {(c,): self._parse(v) for c, v in enumerate(slots)}
            )
            data[(a, b)] = data.get((a, b), Form.zero(1)) + f
        family = FormFamily.build(("down", "down") if lower else ("up", "down"), 1, data)
        omega = connection_from_lower(family) if lower else family
        return Geometry(self.chart, tetrad, omega)

    def build_couplings(self, mode_override: str | None = None) -> CouplingConstants:
        mode = mode_override or self.couplings_mode
        q = self._parse(self.charge) if self.charge is not None else None
        pot = None
        if self.potential is not None:
            pot = Form(1, {(c,): self._parse(v) for c, v in enumerate(self.potential)})
        if mode == "zero":
            return CouplingConstants.zero(q=q, potential=pot)
        if mode == "symbolic":
            return CouplingConstants.symbolic()
        if mode == "constrained":
            vals = [self._parse(v) for v in self.couplings_A] + [
                self._parse(v) for v in self.couplings_B
            ]
            return CouplingConstants.constrained(*vals, q=q, potential=pot)
        if mode == "explicit":
            a = [self._parse(v) for v in self.couplings_a]
            b = [self._parse(v) for v in self.couplings_b]
            return CouplingConstants(*a, *b, q=q, potential=pot)
        raise ScenarioError(f"{self.name}: unknown couplings mode {mode!r}")

    def build_spinor(self) -> SpinorField:
        return SpinorField(tuple(self._parse(v) for v in self.spinor))

    def build_mass(self):
        return self._parse(self.mass)


def _validate_invertible(tetrad: Tetrad, chart: Chart, samples: int = 32):
    det = tetrad.h.det()
    rng = random.Random(20570)
    values = []
    for _ in range(samples):
        point = chart.random_point(rng)
        value = complex(sp.N(det.subs(point)))
        if abs(value) < 1e-8:
            raise ScenarioError(
                f"tetrad is (numerically) singular on the sample domain: det={value}"
            )
        values.append(value)
    reals = [v.real for v in values]
    if all(abs(v.imag) < 1e-12 for v in values) and min(reals) < 0 < max(reals):
        raise ScenarioError(
            "tetrad determinant changes sign on the sample domain "
            "(singular somewhere inside it)"
        )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path.name}: {exc}") from exc
    return scenario_from_dict(raw, default_name=path.stem)


def scenario_from_dict(raw: dict, default_name="scenario") -> Scenario:
    chart_tbl = raw.get("chart", {})
    coords = tuple(chart_tbl.get("coordinates", ("t", "x", "y", "z")))
    intervals = tuple(
        tuple(float(v) for v in pair)
        for pair in chart_tbl.get("intervals", ((-1, 1),) * 4)
    )
    try:
        chart = Chart(coords, intervals)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc

    conn = raw.get("connection", {})
    couplings = raw.get("couplings", {})
    spinor_tbl = raw.get("spinor", {})
    charge_tbl = raw.get("charge", {})
    rand_tbl = raw.get("random_geometry", {})
    tetrad_tbl = raw.get("tetrad", {})

    known_suites = set(SUITE_ORDER)
    suites = tuple(raw.get("suites", ()))
    unknown = [s for s in suites if s not in known_suites]
    if unknown:
        raise ScenarioError(f"unknown suites {unknown}; registered: {sorted(known_suites)}")

    sc = Scenario(
        name=raw.get("name", default_name),
        description=raw.get("description", ""),
        seed=int(raw.get("seed", 0)),
        suites=suites,
        chart=chart,
        parameters=tuple(raw.get("parameters", ())),
        tetrad_rows=tuple(tuple(r) for r in tetrad_tbl["rows"]) if tetrad_tbl else None,
        connection_mode=conn.get("mode", "explicit"),
        connection_lower=dict(conn.get("lower", {})),
        connection_upper=dict(conn.get("upper", {})),
        random_kind=rand_tbl.get("kind") if rand_tbl else None,
        couplings_mode=couplings.get("mode", "zero"),
        couplings_A=tuple(couplings.get("A", ("0",) * 4)),
        couplings_B=tuple(couplings.get("B", ("0",) * 4)),
        couplings_a=tuple(couplings.get("a", ("0",) * 4)),
        couplings_b=tuple(couplings.get("b", ("0",) * 4)),
        charge=charge_tbl.get("q"),
        potential=tuple(charge_tbl["potential"]) if "potential" in charge_tbl else None,
        spinor=tuple(spinor_tbl.get("components", ("1", "0", "0", "0"))),
        mass=str(spinor_tbl.get("mass", "1")),
    )
    if sc.connection_mode not in ("explicit", "levi-civita"):
        raise ScenarioError(f"unknown connection mode {sc.connection_mode!r}")
    return sc


# suite registry lives here to avoid an import cycle with cli
SUITE_ORDER = (
    "clifford",
    "geometry",
    "dirac",
    "solution",
    "hermiticity",
    "covariance",
    "mass-split",
    "constraints",
)
