import sys
from pathlib import Path

import pytest

# backend --> path
backend_path = Path(__file__).parent.parent
sys.path.insert(0, str(backend_path))


@pytest.fixture(scope="session")
def rationals():
    from app.field_arith import make_field
    return make_field("rationals")


@pytest.fixture(scope="session")
def q15_field():
    from app.field_arith import make_field
    return make_field("real_quadratic", 15)


@pytest.fixture(scope="session")
def hurwitz_algebra(rationals):
    """(-1,-1 / Q), ramified at 2"""
    from app.quat_algebra import make_algebra
    return make_algebra(rationals, 1, 1)


@pytest.fixture(scope="session")
def q11_algebra(rationals):
    """(-1,-11 / Q), ramified at 11, class number 2"""
    from app.quat_algebra import make_algebra
    return make_algebra(rationals, 1, 11)


@pytest.fixture(scope="session")
def q15_algebra(q15_field):
    """(-1,-1 / Q(sqrt 15)), ramified only at the infinite places"""
    from app.quat_algebra import make_algebra
    return make_algebra(q15_field, 1, 1)


@pytest.fixture(scope="session")
def hurwitz_order(hurwitz_algebra):
    from app.zlattice import maximal_order
    return maximal_order(hurwitz_algebra)


@pytest.fixture(scope="session")
def q11_order(q11_algebra):
    from app.zlattice import maximal_order
    return maximal_order(q11_algebra)


@pytest.fixture(scope="session")
def q15_data(q15_algebra):
    """Class, type, unit and normalizer data of the Q(sqrt 15) example (slow to build)"""
    from app.genus_enum import get_algebra_data
    return get_algebra_data(q15_algebra)


@pytest.fixture
def genus_specs_q15():
    """Narrow class ideals over Q(sqrt 15) with their proper class numbers"""
    return [
        {"ideal": "unit", "class_count": 22},
        {"ideal": "prime:3^-1", "class_count": 18},
        {"ideal": "prime:5^-1", "class_count": 18},
        {"ideal": "prime:3^-1*5^-1", "class_count": 14},
    ]
