"""Exterior forms on the orthonormal coframe, with scalar or Clifford values.

A ``Form`` is a degree-homogeneous exterior form expanded in the
anholonomic coframe e^0..e^3: components are stored on strictly
increasing multi-indices with sympy scalar coefficients.  An ``MForm``
carries a fixed-shape sympy matrix on every component instead (4x4 for
Clifford-valued forms, 4x1 / 1x4 for spinor-valued ones); wedging
multiplies the matrices in operand order, so forms with Clifford
coefficients deliberately do not graded-commute.

The exterior derivative needs the tetrad: ``Tetrad`` owns the coframe
e^a = h^a_mu dx^mu, the frame derivatives and the precomputed de^a, and
is the "differential structure" argument of ``ext_d``.

Conventions fixed here (everything downstream depends on them):
  * signature eta = diag(-1,+1,+1,+1);
  * orientation *1 = e^0^e^1^e^2^e^3, which makes *e^b ^ e^a = -eta^{ab} *1.
"""

from __future__ import annotations

import itertools
import sympy as sp

from .clifford import I4, eta
from .scalars import Chart, is_zero_canonical, sampled_compare

VOL_KEY = (0, 1, 2, 3)


def _merge(A: tuple, B: tuple):
    """Sign and sorted key of e^A ^ e^B, or None when an index repeats."""
    if set(A) & set(B):
        return None
    merged = list(A + B)
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(merged)):
        j = i
        while j > 0 and merged[j - 1] > merged[j]:
            merged[j - 1], merged[j] = merged[j], merged[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(merged)


def _perm_sign(seq):
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _hodge_table():
    table = {}
    for p in range(5):
        for A in itertools.combinations(range(4), p):
            Ac = tuple(a for a in range(4) if a not in A)
            sign = _perm_sign(A + Ac)
            for a in A:
                sign *= eta(a, a)
            table[A] = (sign, Ac)
    return table


_HODGE = _hodge_table()


class Form:
    """Scalar-coefficient exterior p-form in the orthonormal coframe."""

    __slots__ = ("degree", "comps")

    def __init__(self, degree: int, comps: dict | None = None):
        self.degree = degree
        self.comps = {}
        if comps:
            for k, v in comps.items():
                if v != 0:
                    self.comps[k] = self.comps.get(k, 0) + v
            self.comps = {k: v for k, v in self.comps.items() if v != 0}

    # -- constructors
    @staticmethod
    def zero(degree: int) -> "Form":
        return Form(degree)

    @staticmethod
    def scalar(value) -> "Form":
        return Form(0, {(): sp.sympify(value)})

    @staticmethod
    def coframe(a: int) -> "Form":
        return Form(1, {(a,): sp.Integer(1)})

    @staticmethod
    def monomial(value, key: tuple) -> "Form":
        return Form(len(key), {tuple(key): sp.sympify(value)})

    @staticmethod
    def volume() -> "Form":
        return Form(4, {VOL_KEY: sp.Integer(1)})

    # -- ring structure
    def __add__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            # an empty form is a universal zero, whatever its degree tag
            if self.is_structurally_zero():
                return Form(other.degree, dict(other.comps))
            if other.is_structurally_zero():
                return Form(self.degree, dict(self.comps))
            raise ValueError("cannot add forms of different degree")
        comps = dict(self.comps)
        for k, v in other.comps.items():
            comps[k] = comps.get(k, 0) + v
        return Form(self.degree, comps)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.degree, {k: -v for k, v in self.comps.items()})

    def __mul__(self, scalar) -> "Form":
        scalar = sp.sympify(scalar)
        return Form(self.degree, {k: scalar * v for k, v in self.comps.items()})

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        out = {}
        degree = self.degree + other.degree
        for A, u in self.comps.items():
            for B, v in other.comps.items():
                m = _merge(A, B)
                if m is None:
                    continue
                sign, key = m
                out[key] = out.get(key, 0) + sign * u * v
        return Form(degree, out)

    def interior(self, a: int) -> "Form":
        if self.degree == 0:
            return Form(0)
        out = {}
        for A, u in self.comps.items():
            if a not in A:
                continue
            pos = A.index(a)
            key = A[:pos] + A[pos + 1 :]
            out[key] = out.get(key, 0) + (-1) ** pos * u
        return Form(self.degree - 1, out)

    def hodge(self) -> "Form":
        out = {}
        for A, u in self.comps.items():
            sign, Ac = _HODGE[A]
            out[Ac] = out.get(Ac, 0) + sign * u
        return Form(4 - self.degree, out)

    # -- inspection
    def get(self, key: tuple):
        return self.comps.get(tuple(key), sp.Integer(0))

    def is_structurally_zero(self) -> bool:
        return not self.comps

    def is_zero_canonical(self) -> bool:
        return all(is_zero_canonical(v) for v in self.comps.values())

    def max_residual_sampled(self, chart: Chart, seed: int = 0) -> float:
        worst = 0.0
        for v in self.comps.values():
            rep = sampled_compare(v, sp.Integer(0), chart, seed=seed)
            worst = max(worst, rep.max_abs_diff)
        return worst

    def canon(self) -> "Form":
        return Form(self.degree, {k: sp.expand(v) for k, v in self.comps.items()})

    def subs(self, mapping) -> "Form":
        return Form(self.degree, {k: v.subs(mapping) for k, v in self.comps.items()})

    def free_symbols(self):
        out = set()
        for v in self.comps.values():
            out |= sp.sympify(v).free_symbols
        return out

    def __repr__(self):
        if not self.comps:
            return f"0 (degree {self.degree})"
        parts = []
        for k in sorted(self.comps):
            base = "e" + "".join(str(i) for i in k) if k else "1"
            parts.append(f"({self.comps[k]})*{base}")
        return " + ".join(parts)


def wedge(f: Form, g: Form) -> Form:
    return f.wedge(g)


def interior(a: int, f: Form) -> Form:
    return f.interior(a)


def hodge(f):
    return f.hodge()


# --- the tetrad and the exterior derivative ---------------------------------


class Tetrad:
    """Coframe e^a = h^a_mu dx^mu and the differential structure it induces."""

    def __init__(self, chart: Chart, h):
        self.chart = chart
        self.h = sp.ImmutableMatrix(h)
        if self.h.shape != (4, 4):
            raise ValueError("tetrad must be 4x4")
        self.is_identity = self.h == sp.ImmutableMatrix(sp.eye(4))
        if self.is_identity:
            self.hinv = sp.ImmutableMatrix(sp.eye(4))
        else:
            det = sp.cancel(self.h.det())
            if det == 0:
                raise ValueError("singular tetrad")
            self.hinv = sp.ImmutableMatrix(sp.simplify(self.h.inv()))
        self._de = None
        self._d_monomial_cache = {}

    @staticmethod
    def flat(chart: Chart) -> "Tetrad":
        return Tetrad(chart, sp.eye(4))

    def frame_diff(self, expr, b: int):
        """Derivative along the frame vector X_b = h^mu_b d/dx^mu."""
        expr = sp.sympify(expr)
        if self.is_identity:
            return sp.diff(expr, self.chart.coord(b))
        total = sp.Integer(0)
        for mu in range(4):
            if self.hinv[mu, b] != 0:
                total += self.hinv[mu, b] * sp.diff(expr, self.chart.coord(mu))
        return total

    @property
    def de(self) -> list[Form]:
        """The 2-forms de^a, expanded back into the coframe basis."""
        if self._de is None:
            out = []
            coords = self.chart.coords
            for a in range(4):
                comps = {}
                if not self.is_identity:
                    for mu in range(4):
                        entry = self.h[a, mu]
                        if entry == 0:
                            continue
                        for nu in range(4):
                            dcoeff = sp.diff(entry, coords[nu])
                            if dcoeff == 0:
                                continue
                            # dx^nu ^ dx^mu -> coframe
                            for b in range(4):
                                for c in range(4):
                                    w = dcoeff * self.hinv[nu, b] * self.hinv[mu, c]
                                    if w == 0:
                                        continue
                                    m = _merge((b,), (c,))
                                    if m is None:
                                        continue
                                    sign, key = m
                                    comps[key] = comps.get(key, 0) + sign * w
                out.append(Form(2, comps).canon())
            self._de = out
        return self._de

    def d_monomial(self, A: tuple) -> Form:
        """d(e^{a1} ^ ... ^ e^{ap}) by the graded Leibniz chain."""
        A = tuple(A)
        if A in self._d_monomial_cache:
            return self._d_monomial_cache[A]
        if not A:
            result = Form.zero(1)
        elif len(A) == 1:
            result = self.de[A[0]]
        else:
            head, rest = A[0], A[1:]
            result = self.de[head].wedge(Form.monomial(1, rest)) - Form.coframe(
                head
            ).wedge(self.d_monomial(rest))
        self._d_monomial_cache[A] = result
        return result


def ext_d(f: Form, frame: Tetrad) -> Form:
    """Exterior derivative of a coframe-expanded form."""
    out = Form.zero(f.degree + 1)
    for A, u in f.comps.items():
        for b in range(4):
            du = frame.frame_diff(u, b)
            if du != 0:
                out = out + Form.monomial(du, (b,)).wedge(Form.monomial(1, A))
        if A and not frame.is_identity:
            out = out + u * frame.d_monomial(A)
    return out


# --- matrix-valued forms -----------------------------------------------------


class MForm:
    """Exterior form whose coefficients are fixed-shape sympy matrices.

    Shape (4,4) holds Clifford-valued forms, (4,1) spinor-valued ones,
    (1,4) adjoint-spinor rows and (1,1) sandwich scalars.  Wedge performs
    the matrix product in operand order.
    """

    __slots__ = ("degree", "shape", "comps")

    def __init__(self, degree: int, shape: tuple, comps: dict | None = None):
        self.degree = degree
        self.shape = shape
        self.comps = {}
        if comps:
            for k, M in comps.items():
                if M.shape != shape:
                    raise ValueError("component shape mismatch")
                if not M.is_zero_matrix:
                    self.comps[tuple(k)] = sp.Matrix(M)

    @staticmethod
    def zero(degree: int, shape=(4, 4)) -> "MForm":
        return MForm(degree, shape)

    @staticmethod
    def from_form(f: Form, matrix=None) -> "MForm":
        """Lift a scalar form; by default it multiplies the identity."""
        matrix = I4 if matrix is None else sp.Matrix(matrix)
        return MForm(
            f.degree, matrix.shape, {k: v * matrix for k, v in f.comps.items()}
        )

    @staticmethod
    def from_matrix(M, degree: int = 0, key: tuple = ()) -> "MForm":
        M = sp.Matrix(M)
        return MForm(degree, M.shape, {tuple(key): M})

    def __add__(self, other: "MForm") -> "MForm":
        if self.degree != other.degree or self.shape != other.shape:
            if not self.comps and self.shape == other.shape:
                return MForm(other.degree, other.shape, dict(other.comps))
            if not other.comps and self.shape == other.shape:
                return MForm(self.degree, self.shape, dict(self.comps))
            raise ValueError("degree/shape mismatch")
        comps = {k: sp.Matrix(v) for k, v in self.comps.items()}
        for k, v in other.comps.items():
            comps[k] = comps[k] + v if k in comps else v
        return MForm(self.degree, self.shape, comps)

    def __sub__(self, other: "MForm") -> "MForm":
        return self + (-other)

    def __neg__(self) -> "MForm":
        return MForm(self.degree, self.shape, {k: -v for k, v in self.comps.items()})

    def __mul__(self, scalar) -> "MForm":
        scalar = sp.sympify(scalar)
        return MForm(
            self.degree, self.shape, {k: scalar * v for k, v in self.comps.items()}
        )

    __rmul__ = __mul__

    def left_mul(self, M) -> "MForm":
        """Constant matrix times every coefficient, M on the left."""
        M = sp.Matrix(M)
        return MForm(
            self.degree,
            (M.shape[0], self.shape[1]),
            {k: M * v for k, v in self.comps.items()},
        )

    def right_mul(self, M) -> "MForm":
        M = sp.Matrix(M)
        return MForm(
            self.degree,
            (self.shape[0], M.shape[1]),
            {k: v * M for k, v in self.comps.items()},
        )

    def wedge(self, other: "MForm") -> "MForm":
        if self.shape[1] != other.shape[0]:
            raise ValueError("matrix shapes do not chain")
        degree = self.degree + other.degree
        shape = (self.shape[0], other.shape[1])
        out = {}
        for A, U in self.comps.items():
            for B, V in other.comps.items():
                m = _merge(A, B)
                if m is None:
                    continue
                sign, key = m
                prod = U * V if sign > 0 else -(U * V)
                out[key] = out[key] + prod if key in out else prod
        return MForm(degree, shape, out)

    def interior(self, a: int) -> "MForm":
        if self.degree == 0:
            return MForm(0, self.shape)
        out = {}
        for A, U in self.comps.items():
            if a not in A:
                continue
            pos = A.index(a)
            key = A[:pos] + A[pos + 1 :]
            term = U if pos % 2 == 0 else -U
            out[key] = out[key] + term if key in out else term
        return MForm(self.degree - 1, self.shape, out)

    def hodge(self) -> "MForm":
        out = {}
        for A, U in self.comps.items():
            sign, Ac = _HODGE[A]
            term = U if sign > 0 else -U
            out[Ac] = out[Ac] + term if Ac in out else term
        return MForm(4 - self.degree, self.shape, out)

    def get(self, key: tuple) -> sp.Matrix:
        key = tuple(key)
        if key in self.comps:
            return self.comps[key]
        return sp.zeros(*self.shape)

    def entry_form(self, i: int, j: int) -> Form:
        return Form(self.degree, {k: M[i, j] for k, M in self.comps.items()})

    def scalar_form(self) -> Form:
        if self.shape != (1, 1):
            raise ValueError("not a scalar-valued form")
        return Form(self.degree, {k: M[0, 0] for k, M in self.comps.items()})

    def applyfunc(self, fn) -> "MForm":
        return MForm(
            self.degree, self.shape, {k: M.applyfunc(fn) for k, M in self.comps.items()}
        )

    def subs(self, mapping) -> "MForm":
        return self.applyfunc(lambda e: sp.sympify(e).subs(mapping))

    def is_zero_canonical(self) -> bool:
        return all(
            is_zero_canonical(x) for M in self.comps.values() for x in M
        )

    def max_residual_sampled(self, chart: Chart, seed: int = 0) -> float:
        worst = 0.0
        for M in self.comps.values():
            for x in M:
                rep = sampled_compare(x, sp.Integer(0), chart, seed=seed)
                worst = max(worst, rep.max_abs_diff)
        return worst

    def __repr__(self):
        keys = ", ".join(
            "e" + "".join(str(i) for i in k) if k else "1" for k in sorted(self.comps)
        )
        return f"MForm(degree={self.degree}, shape={self.shape}, comps on [{keys}])"


def ext_d_mform(f: MForm, frame: Tetrad) -> MForm:
    """Exterior derivative of a matrix-valued form, coefficient-wise."""
    out = MForm.zero(f.degree + 1, f.shape)
    for A, U in f.comps.items():
        for b in range(4):
            dU = U.applyfunc(lambda e: frame.frame_diff(e, b))
            if dU.is_zero_matrix:
                continue
            m = _merge((b,), A)
            if m is None:
                continue
            sign, key = m
            out = out + MForm(
                f.degree + 1, f.shape, {key: dU if sign > 0 else -dU}
            )
        if A and not frame.is_identity:
            dA = frame.d_monomial(A)
            out = out + MForm(
                f.degree + 1,
                f.shape,
                {k: v * U for k, v in dA.comps.items()},
            )
    return out


# --- indexed families and covariant derivatives ------------------------------


class FormFamily:
    """Lorentz-indexed family of forms (omega^a_b, Q_ab, T^a, R^a_b, ...).

    ``slots`` declares the variance of every index ('up'/'down'); an
    optional symmetry on the first two slots is enforced by storing only
    canonical index order and synthesizing the rest.
    """

    def __init__(self, slots: tuple, degree: int, data: dict, symmetry: str | None = None):
        self.slots = tuple(slots)
        self.degree = degree
        self.symmetry = symmetry
        if symmetry not in (None, "sym", "antisym"):
            raise ValueError("symmetry must be None, 'sym' or 'antisym'")
        if symmetry and len(self.slots) < 2:
            raise ValueError("symmetry needs at least two slots")
        self._data = {}
        for idx, f in data.items():
            idx = tuple(idx)
            if len(idx) != len(self.slots):
                raise ValueError("index arity mismatch")
            if f.degree != degree:
                raise ValueError("family degree mismatch")
            if symmetry == "antisym" and idx[0] == idx[1]:
                if not f.canon().is_structurally_zero():
                    raise ValueError(
                        f"antisymmetric family must vanish on the diagonal {idx}"
                    )
                continue
            key, sign = self._canonical(idx)
            stored = f if sign > 0 else -f
            if key in self._data:
                if not (self._data[key] - stored).canon().is_structurally_zero():
                    raise ValueError(
                        f"components at {idx} violate declared {symmetry}metry"
                    )
                continue
            if not f.is_structurally_zero():
                self._data[key] = f if sign > 0 else -f

    def _canonical(self, idx):
        if self.symmetry is None or idx[0] <= idx[1]:
            return idx, 1
        swapped = (idx[1], idx[0]) + idx[2:]
        return swapped, (1 if self.symmetry == "sym" else -1)

    @staticmethod
    def build(slots, degree, mapping=None, symmetry=None) -> "FormFamily":
        """mapping: dict index-tuple -> Form; symmetry checked on write."""
        return FormFamily(slots, degree, dict(mapping or {}), symmetry)

    def get(self, idx) -> Form:
        idx = tuple(idx)
        if self.symmetry:
            if self.symmetry == "antisym" and idx[0] == idx[1]:
                return Form.zero(self.degree)
            key, sign = self._canonical(idx)
            f = self._data.get(key)
            if f is None:
                return Form.zero(self.degree)
            return f if sign > 0 else -f
        return self._data.get(idx, Form.zero(self.degree))

    def indices(self):
        return itertools.product(range(4), repeat=len(self.slots))

    def items(self):
        for idx in self.indices():
            yield idx, self.get(idx)

    def __add__(self, other: "FormFamily") -> "FormFamily":
        if self.slots != other.slots or self.degree != other.degree:
            raise ValueError("family structure mismatch")
        return FormFamily(
            self.slots,
            self.degree,
            {idx: self.get(idx) + other.get(idx) for idx in self.indices()},
        )

    def __sub__(self, other: "FormFamily") -> "FormFamily":
        if self.slots != other.slots or self.degree != other.degree:
            raise ValueError("family structure mismatch")
        return FormFamily(
            self.slots,
            self.degree,
            {idx: self.get(idx) - other.get(idx) for idx in self.indices()},
        )

    def move_slot(self, pos: int) -> "FormFamily":
        """Raise or lower one index with eta; an explicit, D-external step."""
        slots = list(self.slots)
        slots[pos] = "up" if slots[pos] == "down" else "down"
        data = {}
        for idx, f in self.items():
            factor = eta(idx[pos], idx[pos])
            data[idx] = f * factor
        return FormFamily(tuple(slots), self.degree, data)

    def is_zero_canonical(self) -> bool:
        return all(f.is_zero_canonical() for _, f in self.items())

    def max_residual_sampled(self, chart, seed=0) -> float:
        return max(
            [f.max_residual_sampled(chart, seed) for _, f in self.items()],
            default=0.0,
        )


def cov_d(F: FormFamily, omega: FormFamily, frame: Tetrad) -> FormFamily:
    """Covariant exterior derivative: one connection term per index slot.

    D F^a.._b.. = dF + omega^a_c ^ F^c.._b.. - omega^c_b ^ F^a.._c..
    Index raising/lowering is never performed implicitly here; callers
    move indices with move_slot() outside of D.
    """
    data = {}
    for idx in F.indices():
        res = ext_d(F.get(idx), frame)
        for pos, variance in enumerate(F.slots):
            for c in range(4):
                sub = idx[:pos] + (c,) + idx[pos + 1 :]
                fc = F.get(sub)
                if fc.is_structurally_zero():
                    continue
                if variance == "up":
                    w = omega.get((idx[pos], c))
                    res = res + w.wedge(fc)
                else:
                    w = omega.get((c, idx[pos]))
                    res = res - w.wedge(fc)
        data[idx] = res
    return FormFamily(F.slots, F.degree + 1, data)


def cov_d_spinor(psi_column, Omega: MForm, frame: Tetrad) -> MForm:
    """D psi = d psi + Omega psi for a column spinor 0-form."""
    psi = MForm.from_matrix(sp.Matrix(psi_column))
    return ext_d_mform(psi, frame) + Omega.wedge(psi)


def cov_d_adjoint_spinor(psibar_row, Omega_bar: MForm, frame: Tetrad) -> MForm:
    """D psibar = d psibar - psibar Omega_bar for the adjoint row spinor."""
    psibar = MForm.from_matrix(sp.Matrix(psibar_row))
    return ext_d_mform(psibar, frame) - psibar.wedge(Omega_bar)
