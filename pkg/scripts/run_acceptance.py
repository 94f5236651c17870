"""Run the nine acceptance criteria and print one PASS/FAIL line each."""

import runpy
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.path.insert(0, str(ROOT / "tests"))
    runpy.run_path(str(ROOT / "tests" / "test_acceptance.py"), run_name="__main__")
