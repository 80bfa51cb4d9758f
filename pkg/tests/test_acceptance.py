"""Acceptance gate: thirteen theorem-level criteria on the default fixture
(x_max = 4, 2000 cells, cfl = 0.45).

Each test runs one verification suite, prints a single pass/fail line with
the per-check margins, and fails if any check in the suite fails.  Long
trajectories are shared between suites through the verification module's
run cache, so the whole gate costs roughly one pass over the long runs.
"""

import pytest

from photonbec import verify

CRITERIA = [
    # (number, suite, headline)
    (1, "ledger", "photon loss balance closes to rounding"),
    (2, "equilibria", "equilibrium profiles are stationary to O(dx)"),
    (3, "condensate", "supercritical data condense in finite time"),
    (4, "monotone_number", "photon number never increases"),
    (5, "contraction", "L1 distance between solutions contracts"),
    (6, "comparison", "ordered data stay ordered"),
    (7, "lipschitz", "one-sided Lipschitz (Oleinik) bound"),
    (8, "supersolution", "solutions stay under the decaying barrier"),
    (9, "support", "support obeys the logistic curve and shrinks to [0,2]"),
    (10, "convergence", "long-time convergence to the equilibrium family"),
    (11, "viscous", "vanishing-viscosity oracle agrees"),
    (12, "entropy", "Kruzkov and weak-form residuals vanish under refinement"),
    (13, "lower_bound", "equilibrium photon-number lower bound"),
]


def _run_and_report(number, suite, headline, capsys):
    report = verify.run_suite(suite)
    checks = report["suites"][suite]
    passed = all(c["passed"] for c in checks)
    tag = "PASS" if passed else "FAIL"
    detail = "; ".join(
        f"{c['name']}={c['value']:.3g} (threshold {c['threshold']:.3g})"
        for c in checks
    )
    with capsys.disabled():
        print(f"[{tag}] criterion {number:02d} ({suite}): {headline} -- {detail}")
    assert passed, f"criterion {number} ({suite}) failed: {detail}"


@pytest.mark.parametrize("number, suite, headline", CRITERIA,
                         ids=[f"{n:02d}_{s}" for n, s, _ in CRITERIA])
def test_acceptance_criterion(number, suite, headline, capsys):
    _run_and_report(number, suite, headline, capsys)
