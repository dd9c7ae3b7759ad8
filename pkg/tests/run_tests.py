# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Test runner script for tropwitt."""

import argparse
import os
import subprocess
import sys
from pathlib import Path


def run_tests(fast: bool = False, workers: str = "") -> int:
    """Run the test suite with coverage reporting."""
    project_root = Path(__file__).parent.parent
    os.chdir(project_root)

    reports_dir = Path("reports")
    reports_dir.mkdir(exist_ok=True)

    cmd = [
        "poetry",
        "run",
        "pytest",
        "--cov=app",
        "--cov-report=html:reports/coverage-html",
        "--cov-report=xml:reports/coverage.xml",
        "--cov-report=term-missing",
        "--html=reports/test-report.html",
        "--self-contained-html",
        "--junitxml=reports/junit.xml",
        "--cov-fail-under=80",
        "-v",
    ]
    if fast:
        cmd.extend(["-m", "not slow"])
    if workers:
        cmd.extend(["-n", workers])
    cmd.append("tests/")

    print("Running test suite...")
    print(f"Command: {' '.join(cmd)}")
    print("-" * 50)

    result = subprocess.run(cmd, capture_output=False)

    if result.returncode == 0:
        print("\nAll tests passed.")
        print("Coverage report: reports/coverage-html/index.html")
        print("Test report: reports/test-report.html")
    else:
        print("\nSome tests failed.")
    return result.returncode


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the tropwitt test suite")
    parser.add_argument("--fast", action="store_true", help="Skip tests marked slow")
    parser.add_argument("-n", dest="workers", default="", help="pytest-xdist workers, e.g. auto")
    args = parser.parse_args()
    sys.exit(run_tests(args.fast, args.workers))
