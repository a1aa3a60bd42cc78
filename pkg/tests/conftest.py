from pathlib import Path

import pytest

from rcdual.problem import read_program

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
PROGRAMS = ["affine1d", "affine2d", "square1d", "halfspaces2d", "disk2d", "l1ball2d", "gap", "mixed2d"]
DUAL_PROGRAMS = ["affine1d", "affine2d", "square1d", "halfspaces2d", "disk2d", "l1ball2d"]
REDUCTIONS = ["reduce_box", "reduce_ball", "reduce_boundary"]


def load(name):
    return read_program(PROBLEMS / f"{name}.json")


@pytest.fixture
def problems_dir():
    return PROBLEMS
