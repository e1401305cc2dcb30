"""The Dirac algebra cl(1,3) as explicit 4x4 complex matrices.

Signature (-,+,+,+).  The generator representation is fixed once and for
all: gamma_0 = blockdiag(-i I2, +i I2), gamma_k = offdiag(+i sigma_k,
-i sigma_k) with the standard Pauli matrices.  Everything downstream
(adjoint signs, gamma_5 spectrum, chirality projectors) depends on this
choice, so it is never parameterized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import sympy as sp

I4 = sp.ImmutableMatrix(sp.eye(4))
ZERO4 = sp.ImmutableMatrix(sp.zeros(4))

ETA = sp.ImmutableMatrix(sp.diag(-1, 1, 1, 1))

_PAULI = (
    sp.ImmutableMatrix([[0, 1], [1, 0]]),
    sp.ImmutableMatrix([[0, -sp.I], [sp.I, 0]]),
    sp.ImmutableMatrix([[1, 0], [0, -1]]),
)


def eta(a: int, b: int):
    return ETA[a, b]


def _block(tl, tr, bl, br):
    return sp.ImmutableMatrix(sp.Matrix([[tl, tr], [bl, br]]))


_I2 = sp.eye(2)
_Z2 = sp.zeros(2)

_GAMMA = (
    _block(-sp.I * _I2, _Z2, _Z2, sp.I * _I2),
    _block(_Z2, sp.I * _PAULI[0], -sp.I * _PAULI[0], _Z2),
    _block(_Z2, sp.I * _PAULI[1], -sp.I * _PAULI[1], _Z2),
    _block(_Z2, sp.I * _PAULI[2], -sp.I * _PAULI[2], _Z2),
)


def gamma(a: int) -> sp.ImmutableMatrix:
    """Generator gamma_a, a in 0..3."""
    return _GAMMA[a]


def sigma(a: int, b: int) -> sp.ImmutableMatrix:
    """sigma_ab = (gamma_a gamma_b - gamma_b gamma_a)/4; antisymmetric."""
    if a == b:
        return ZERO4
    return sp.ImmutableMatrix((_GAMMA[a] * _GAMMA[b] - _GAMMA[b] * _GAMMA[a]) / 4)


@lru_cache(maxsize=1)
def gamma5() -> sp.ImmutableMatrix:
    """gamma_5 = gamma_0 gamma_1 gamma_2 gamma_3 in the fixed representation."""
    return sp.ImmutableMatrix(_GAMMA[0] * _GAMMA[1] * _GAMMA[2] * _GAMMA[3])


def commutator(A, B):
    return sp.ImmutableMatrix(A * B - B * A)


def dirac_conjugate(G) -> sp.ImmutableMatrix:
    """The map G -> gamma_0 G^dagger gamma_0 (entrywise conjugate-transpose).

    On the basis it gives -I, +gamma_a, +sigma_ab, -gamma_a gamma_5,
    -gamma_5; on products it is the order-reversing map up to one overall
    sign per factor pair (gamma_0^2 = -I is not unital).
    """
    G = sp.Matrix(G)
    return sp.ImmutableMatrix(_GAMMA[0] * G.H * _GAMMA[0])


BASIS_LABELS = (
    ("1",),
    ("g0", "g1", "g2", "g3"),
    ("s01", "s02", "s03", "s12", "s13", "s23"),
    ("g0g5", "g1g5", "g2g5", "g3g5"),
    ("g5",),
)

SIGMA_SLOTS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@lru_cache(maxsize=1)
def basis() -> tuple[tuple[str, sp.ImmutableMatrix], ...]:
    """The 16-element basis {I, gamma_a, sigma_ab (a<b), gamma_a gamma_5, gamma_5}."""
    out = [("1", I4)]
    out += [(f"g{a}", _GAMMA[a]) for a in range(4)]
    out += [(f"s{a}{b}", sigma(a, b)) for a, b in SIGMA_SLOTS]
    g5 = gamma5()
    out += [(f"g{a}g5", sp.ImmutableMatrix(_GAMMA[a] * g5)) for a in range(4)]
    out.append(("g5", g5))
    return tuple(out)


@dataclass(frozen=True)
class BasisCoefficients:
    """Coefficients of a cl(1,3) element in the 16-element basis."""

    coeffs: dict

    def __getitem__(self, label):
        return self.coeffs[label]

    def reconstruct(self) -> sp.ImmutableMatrix:
        M = sp.zeros(4)
        for label, B in basis():
            M += self.coeffs[label] * sp.Matrix(B)
        return sp.ImmutableMatrix(M)

    def nonzero_labels(self):
        return tuple(l for l, c in self.coeffs.items() if sp.expand(c) != 0)


@lru_cache(maxsize=1)
def _trace_gram_inverse():
    # Tr(B_k B_l) pairing; diagonal for this basis, inverted once, exactly.
    mats = [sp.Matrix(B) for _, B in basis()]
    gram = sp.Matrix(16, 16, lambda k, l: (mats[k] * mats[l]).trace())
    return gram.inv()

def basis_decompose(G) -> BasisCoefficients:
    """Unique coefficients with G = sum_B c_B B; exact, symbolic entries allowed."""
    G = sp.Matrix(G)
    traces = sp.Matrix([(sp.Matrix(B) * G).trace() for _, B in basis()])
    sol = _trace_gram_inverse() * traces
    labels = [label for label, _ in basis()]
    return BasisCoefficients(
        {label: sp.expand(sol[k]) for k, label in enumerate(labels)}
    )


# --- commutator table -------------------------------------------------------


@dataclass(frozen=True)
class FamilyResult:
    name: str
    cases: int
    failures: int

    @property
    def passed(self):
        return self.failures == 0


def _is_zero_matrix(M):
    return all(sp.expand(x) == 0 for x in M)


def verify_commutator_table() -> tuple[FamilyResult, ...]:
    """Check the eleven commutator families over every index assignment.

    Exact matrix arithmetic throughout; returns one pass/fail record per
    family in display order.
    """
    g5 = gamma5()
    g = _GAMMA
    gg5 = [sp.ImmutableMatrix(g[a] * g5) for a in range(4)]
    R = range(4)
    results = []

    def run(name, cases):
        failures = sum(
            0 if _is_zero_matrix(commutator(A, B) - sp.Matrix(rhs)) else 1
            for A, B, rhs in cases
        )
        results.append(FamilyResult(name, len(list(cases)), failures))

    idents = [I4] + [g[a] for a in R] + [sigma(a, b) for a, b in SIGMA_SLOTS] + gg5 + [g5]
    run("[I,G]=0", [(I4, B, ZERO4) for B in idents])
    run("[ga,gb]=4s_ab", [(g[a], g[b], 4 * sigma(a, b)) for a in R for b in R])
    run(
        "[ga,s_bc]=eta_ab gc - eta_ac gb",
        [
            (g[a], sigma(b, c), eta(a, b) * g[c] - eta(a, c) * g[b])
            for a in R for b in R for c in R
        ],
    )
    run(
        "[ga,gb g5]=2 eta_ab g5",
        [(g[a], gg5[b], 2 * eta(a, b) * g5) for a in R for b in R],
    )
    run("[ga,g5]=2 ga g5", [(g[a], g5, 2 * gg5[a]) for a in R])
    run(
        "[s_ab,s_cd]=-eta_ac s_bd - eta_bd s_ac + eta_bc s_ad + eta_ad s_bc",
        [
            (
                sigma(a, b),
                sigma(c, d),
                -eta(a, c) * sigma(b, d)
                - eta(b, d) * sigma(a, c)
                + eta(b, c) * sigma(a, d)
                + eta(a, d) * sigma(b, c),
            )
            for a in R for b in R for c in R for d in R
        ],
    )
    run(
        "[s_ab,gc g5]=-eta_ac gb g5 + eta_bc ga g5",
        [
            (sigma(a, b), gg5[c], -eta(a, c) * gg5[b] + eta(b, c) * gg5[a])
            for a in R for b in R for c in R
        ],
    )
    run("[s_ab,g5]=0", [(sigma(a, b), g5, ZERO4) for a in R for b in R])
    run(
        "[ga g5,gb g5]=4 s_ab",
        [(gg5[a], gg5[b], 4 * sigma(a, b)) for a in R for b in R],
    )
    run("[ga g5,g5]=-2 ga", [(gg5[a], g5, -2 * g[a]) for a in R])
    run("[g5,g5]=0", [(g5, g5, ZERO4)])
    return tuple(results)


def anticommutation_holds() -> bool:
    """gamma_a gamma_b + gamma_b gamma_a = 2 eta_ab I, all 10 unordered pairs."""
    for a in range(4):
        for b in range(a, 4):
            lhs = _GAMMA[a] * _GAMMA[b] + _GAMMA[b] * _GAMMA[a]
            if not _is_zero_matrix(lhs - 2 * eta(a, b) * I4):
                return False
    return True
