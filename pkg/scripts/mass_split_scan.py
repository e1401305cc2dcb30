#!/usr/bin/env python3
"""Scan the coframe couplings and tabulate the chirality-resolved masses.

The effective mass operator is (m - 4 b3) I - 4 b4 gamma5; with
gamma5^2 = -I its eigenspaces carry gamma5-eigenvalues +-i, and a real
b4 splits the two chiralities symmetrically about m - 4 b3.
"""

import sympy as sp

from gammaforms import CouplingConstants, mass_split


def main():
    m = sp.Integer(1)
    print(f"m = {m}")
    print(f"{'b3':>8} {'b4':>8} {'mass[g5=+i]':>16} {'mass[g5=-i]':>16} {'gap':>8}")
    for b3 in (0, sp.Rational(1, 10)):
        for b4 in (0, sp.Rational(1, 40), sp.Rational(1, 20), sp.Rational(1, 10)):
            ms = mass_split(m, CouplingConstants.constrained(B3=b3, B4=b4))
            print(
                f"{str(b3):>8} {str(b4):>8} {str(ms.masses['+i']):>16} "
                f"{str(ms.masses['-i']):>16} {str(ms.gap):>8}"
            )


if __name__ == "__main__":
    main()
