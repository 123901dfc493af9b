"""Acceptance suite: every recorded claim at its pinned tolerance.

Each claim prints one line per sub-check and a PASS/FAIL verdict; run
with `pytest tests/test_acceptance.py -v -s` to see them, or via the CLI
as `pressure-lab reproduce --all`.
"""

import time

import pytest

from pressure_lab.claims import CLAIMS, run_claim

CLAIM_IDS = list(CLAIMS)


@pytest.mark.parametrize("claim_id", CLAIM_IDS)
def test_claim(claim_id):
    start = time.time()
    result = run_claim(claim_id)
    elapsed = time.time() - start
    verdict = "PASS" if result.passed else "FAIL"
    print(f"\n{verdict} {claim_id} ({elapsed:.1f}s)")
    for line in result.lines:
        print(f"  {line}")
    assert result.passed, f"{claim_id} failed:\n" + "\n".join(result.lines)


def test_every_claim_has_description():
    for claim_id, (description, fn) in CLAIMS.items():
        assert description and callable(fn), claim_id
