"""The ten acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in the
terminal summary so they are visible without ``-s``.
"""

import subprocess
import sys
import time

import pytest

from bvf.checks import CRITERIA, CheckResult, timed

from .conftest import ACCEPTANCE_LINES


def report(result: CheckResult) -> None:
    line = result.line() + f" ({result.seconds:.1f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    result = timed(CRITERIA[number])
    report(result)
    assert result.passed, result.detail


def test_criterion_10_thread_count_determinism():
    start = time.perf_counter()
    cmd = [sys.executable, "-m", "bvf.cli", "verify-all", "--suite", "trivial"]
    runs = [subprocess.run(cmd + ["--threads", t], capture_output=True) for t in ("1", "2")]
    same = runs[0].stdout == runs[1].stdout
    ok = same and all(r.returncode == 0 for r in runs)
    report(CheckResult("10 verify-all byte-identical under --threads 1 and 2", ok, float(same), 1.0,
                       {"exit_codes": [r.returncode for r in runs]}, time.perf_counter() - start))
    assert ok
