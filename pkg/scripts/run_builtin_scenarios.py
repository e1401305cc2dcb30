#!/usr/bin/env python3
"""Run every built-in scenario and summarize pass/fail per suite.

The riemann-cartan-torsion-line scenario is expected to fail its dirac
and hermiticity suites with zero couplings; that is the reproduction of
the minimal-coupling discrepancy, so it is reported but not fatal here.
"""

import sys

from gammaforms.cli import builtin_scenarios, main as cli_main

EXPECTED_FAILURES = {"riemann-cartan-torsion-line"}


def main() -> int:
    bad = []
    for path in builtin_scenarios():
        name = path.stem
        print(f"=== {name}")
        rc = cli_main(["run", str(path)])
        if rc == 1 and name in EXPECTED_FAILURES:
            print(f"    (expected failure for {name} with zero couplings)")
            rc2 = cli_main(["run", str(path), "--couplings", "constrained"])
            if rc2 != 0:
                bad.append(name + " (constrained)")
        elif rc != 0:
            bad.append(name)
        print()
    if bad:
        print("unexpected failures:", ", ".join(bad))
        return 1
    print("all scenarios behaved as documented")
    return 0


if __name__ == "__main__":
    sys.exit(main())
