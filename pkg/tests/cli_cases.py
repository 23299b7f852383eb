"""Golden CLI invocations on the worked example, run from tests/data."""

from __future__ import annotations

import contextlib
import io
import os
from pathlib import Path

from stackyfan.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

# (golden name, argv, expected exit code)
CASES = [
    ("validate", ["validate", "example21.sf"], 0),
    ("member_in", ["member", "example21.sf", "3", "2"], 0),
    ("member_out", ["member", "example21.sf", "1", "0"], 0),
    ("hom", ["hom", "id_to_canonical.map"], 0),
    ("hom_reverse", ["hom", "id_from_canonical.map"], 1),
    ("resolve", ["resolve", "example21.sf", "--cone", "r1,r2"], 0),
    ("resolve_minimal", ["resolve", "example21.sf", "--cone", "r1,r2", "--minimal"], 0),
    ("hilbert", ["hilbert", "example21.sf", "--cone", "r1,r2"], 0),
    ("hilbert_dual", ["hilbert", "example21.sf", "--cone", "r1,r2", "--dual"], 0),
    ("present", ["present", "example21.sf", "--cone", "r1,r2"], 0),
    ("stabilizer_r1", ["stabilizer", "example21.sf", "--cone", "r1"], 0),
    ("stabilizer_r2", ["stabilizer", "example21.sf", "--cone", "r2"], 0),
    ("stabilizer_max", ["stabilizer", "example21.sf", "--cone", "r1,r2"], 0),
    ("divisors", ["divisors", "example21.sf"], 0),
    ("cover", ["cover", "example21.sf"], 0),
    ("reconstruct", ["reconstruct", "example21.fan", "--orders", "r1=2,r2=1"], 0),
    ("bcs_reduce", ["bcs-reduce", "z_plus_z2.bcs"], 0),
    ("bcs_to_framed", ["bcs-to-framed", "example21.bcs"], 0),
    ("framed_to_bcs", ["framed-to-bcs", "example21.sf"], 0),
]


def run(argv: list[str]) -> tuple[int, str, str]:
    """Run the CLI in-process from the data directory."""
    out, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(DATA)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                code = main(argv)
            except SystemExit as e:
                code = e.code
    finally:
        os.chdir(cwd)
    return code, out.getvalue(), err.getvalue()


def render(code: int, out: str, err: str) -> str:
    """One golden file holds the exit code, stdout and stderr."""
    return f"exit: {code}\n--- stdout\n{out}--- stderr\n{err}"


def golden_path(name: str) -> Path:
    return GOLDEN / f"{name}.txt"


def regenerate() -> None:
    GOLDEN.mkdir(exist_ok=True)
    for name, argv, _ in CASES:
        golden_path(name).write_text(render(*run(argv)), encoding="utf-8")


if __name__ == "__main__":
    regenerate()
