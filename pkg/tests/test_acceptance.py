"""Acceptance gate.

Each criterion runs at its stated tolerance and prints one line,
``criterion N <name>: PASS`` or ``FAIL``, followed by its metrics.  Run with
``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json
import subprocess
import sys

import pytest

from dualbm.acceptance import CRITERIA, run_suite


def _line(result):
    status = "PASS" if result["pass"] else "FAIL"
    metrics = {k: v for k, v in result.items() if k not in ("id", "name", "pass")}
    return f"criterion {result['id']} {result['name']}: {status}  {json.dumps(metrics, sort_keys=True)}"


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid):
    (result,) = run_suite(seed=0, ids=[cid])
    print("\n" + _line(result))
    assert result["pass"], _line(result)


def test_criterion_10_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        proc = subprocess.run(
            [sys.executable, "-m", "dualbm", "accept", "--suite", "all", "--seed", "0", "--out", str(p)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stdout + proc.stderr
    identical = paths[0].read_bytes() == paths[1].read_bytes()
    print(f"\ncriterion 10 determinism: {'PASS' if identical else 'FAIL'}")
    assert identical
