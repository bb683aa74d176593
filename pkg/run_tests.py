#!/usr/bin/env python3
"""
Test runner for lffusion.
Provides different test suites and options for comprehensive testing.
"""

import subprocess
import sys
import argparse


SUITES = {
    "core": ["tests/test_camera.py", "tests/test_scene.py"],
    "sampling": ["tests/test_theory.py", "tests/test_planner.py"],
    "mpi": ["tests/test_mpi.py", "tests/test_fusion.py"],
    "flatland": ["tests/test_epi.py", "tests/test_spectrum.py", "tests/test_reconstruct.py"],
    "harness": ["tests/test_metrics.py", "tests/test_baseline.py", "tests/test_sweep.py"],
    "formats": ["tests/test_formats.py", "tests/test_config.py"],
    "cli": ["tests/integration/test_cli.py"],
}


def run_command(cmd):
    """Run a command and return the result."""
    print(f"Running: {' '.join(cmd)}")
    result = subprocess.run(cmd, capture_output=False, text=True)
    return result.returncode == 0


def main():
    parser = argparse.ArgumentParser(description="lffusion Test Runner")
    parser.add_argument(
        "--suite",
        choices=["all", "unit", "integration"] + sorted(SUITES),
        default="unit",
        help="Test suite to run"
    )
    parser.add_argument(
        "--fast",
        action="store_true",
        help="Skip slow tests"
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Verbose output"
    )

    args = parser.parse_args()

    cmd = [sys.executable, "-m", "pytest"]

    if args.verbose:
        cmd.append("-v")

    markers = []
    if args.suite in ("unit", "integration"):
        markers.append(args.suite)
    if args.fast:
        markers.append("not slow")
    if markers:
        cmd.extend(["-m", " and ".join(markers)])

    if args.suite in SUITES:
        cmd.extend(SUITES[args.suite])
    else:
        cmd.append("tests/")

    print("=" * 60)
    print(f"Running lffusion Test Suite: {args.suite}")
    print("=" * 60)

    success = run_command(cmd)

    if success:
        print("\n" + "=" * 60)
        print("✅ All tests passed!")
        print("=" * 60)
        sys.exit(0)
    else:
        print("\n" + "=" * 60)
        print("❌ Some tests failed!")
        print("=" * 60)
        sys.exit(1)


if __name__ == "__main__":
    main()
