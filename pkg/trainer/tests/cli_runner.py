"""Subprocess helper: the radar toolkit is driven only through its CLI."""

import subprocess
import sys


def run_toolkit(args):
    proc = subprocess.run(
        [sys.executable, "-m", "pmcwrd", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"pmcwrd {' '.join(args)} failed:\n{proc.stdout}\n{proc.stderr}"
        )
    return proc
