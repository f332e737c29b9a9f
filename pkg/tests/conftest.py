import random
import sys

import pytest

from residual_calc.class_ring import RingContext
from residual_calc.lattice import LatticeClass, SurfaceGeometry


def geom(gram, canonical, **kw) -> SurfaceGeometry:
    return SurfaceGeometry(tuple(map(tuple, gram)), tuple(canonical), **kw)


def cls(*coords, degree_rel=0, **kw) -> LatticeClass:
    return LatticeClass(tuple(coords), degree_rel=degree_rel, **kw)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def ring6():
    return RingContext.build(6, z=1, a=1, b=1, c=2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(i))
