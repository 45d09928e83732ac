#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest: one PASS/FAIL line each.

Exits 0 only if every criterion passes.
"""

import sys
import traceback
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import test_acceptance as acceptance  # noqa: E402

CRITERIA = [
    acceptance.test_criterion_1_locality,
    acceptance.test_criterion_2_laziness,
    acceptance.test_criterion_3_s3_oracle,
    acceptance.test_criterion_4_s4_oracle,
    acceptance.test_criterion_5_reference_semantics,
    acceptance.test_criterion_6_simplepop_reproduction,
    acceptance.test_criterion_7_analyzer_fixtures,
    acceptance.test_criterion_8_factorial,
    acceptance.test_criterion_9_determinism,
]


def main():
    failures = 0
    for index, criterion in enumerate(CRITERIA, start=1):
        try:
            criterion()
        except Exception:
            failures += 1
            print(f"ACCEPTANCE {index} FAIL:")
            traceback.print_exc()
    if failures:
        print(f"{failures} criterion(s) failed")
        return 1
    print("all acceptance criteria passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
