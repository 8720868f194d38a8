import pytest

from app.config.settings import load_settings
from app.engine.curves import make_twist_field, validate


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from the default settings (no flags, no config file)."""
    settings = load_settings()
    yield settings
    load_settings()


@pytest.fixture
def base_curve_3_5():
    """E: y^2 = x(x + 3)(x + 5), conductor 480."""
    return validate(1, 3, 5)


@pytest.fixture
def base_curve_11_13():
    """E: y^2 = x(x + 11)(x + 13)."""
    return validate(1, 11, 13)


@pytest.fixture
def twisted_11_13_by_5():
    """E_5 for p = 11, the curve y^2 = x(x + 55)(x + 65)."""
    return validate(1, 11, 13, 5)


@pytest.fixture
def field_sqrt_5():
    """K = Q(sqrt(5))."""
    return make_twist_field(1, 5)


@pytest.fixture
def twin_specs():
    """Base curves for the first few twin pairs and both signs."""
    pairs = [(3, 5), (5, 7), (11, 13), (17, 19), (29, 31), (41, 43)]
    return [validate(eps, p, q) for p, q in pairs for eps in (1, -1)]
