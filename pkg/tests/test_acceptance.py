"""Acceptance criteria at their stated tolerances, one CHECK line per measurement."""
import time

import pytest

from risambc import model
from risambc.cli import default_config_path
from risambc.harness import checks

_elapsed = {}


@pytest.fixture(scope="module")
def scenario():
    return model.load_config(default_config_path())


@pytest.mark.acceptance
@pytest.mark.parametrize("n", sorted(checks.CRITERIA))
def test_criterion(n, scenario, capsys):
    t0 = time.perf_counter()
    results = checks.run_criterion(n, scenario)
    _elapsed[n] = time.perf_counter() - t0
    with capsys.disabled():
        print()
        for r in results:
            print(r.line())
        ok = all(r.passed for r in results)
        print(f"CRITERION {n} {'PASS' if ok else 'FAIL'}")
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed


@pytest.mark.acceptance
def test_total_budget(capsys):
    if len(_elapsed) != len(checks.CRITERIA):
        pytest.skip("needs every criterion in the same session")
    total = sum(_elapsed.values())
    ok = total <= checks.TOTAL_BUDGET_S
    with capsys.disabled():
        print(f"\nCHECK total_runtime_s {total:.6g} {checks.TOTAL_BUDGET_S:.6g} {'PASS' if ok else 'FAIL'}")
    assert ok
