import numpy as np
import pytest

from coshlibor.affine import AffineProcessSpec
from coshlibor.config import load_preset
from coshlibor.model import DiscountCurve, TenorStructure, calibrate
from coshlibor.validation import build_model

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


def brownian_setup(sigma=1.0):
    """sigma-Brownian, x0 = 0, T = 10, dates 0.5..5.0 plus 10, flat 3.5% semiannual."""
    tenor = TenorStructure(tuple(0.5 * i for i in range(1, 11)) + (10.0,))
    curve = DiscountCurve.flat(tenor, 0.035, 0.5)
    return calibrate(AffineProcessSpec.brownian(sigma=sigma, horizon=10.0), tenor, curve)


def random_instance(rng):
    if rng.random() < 0.2:
        spec = AffineProcessSpec.brownian(sigma=rng.uniform(0.2, 2.0), drift=rng.uniform(-0.5, 0.5),
                                          x0=rng.uniform(-1, 1), horizon=10.0)
        top = 3.0
    else:
        ap, am = rng.uniform(2, 60, size=2)
        spec = AffineProcessSpec.jump_ou(lam=rng.uniform(0.005, 0.5), alpha_plus=ap, alpha_minus=am,
                                         beta_plus=rng.uniform(0, 60), beta_minus=rng.uniform(0, 60),
                                         sigma=rng.choice([0.0, rng.uniform(0.05, 1.0)]),
                                         theta=rng.uniform(-1, 1), x0=rng.uniform(-1, 1), horizon=10.0)
        top = 0.9 * min(ap, am)
    n = int(rng.integers(1, 6))
    us = np.sort(rng.uniform(0, top, size=n + 1))[::-1]
    u0, ui = float(us[0]), [float(u) for u in us[1:]]
    cs = [float(c) for c in rng.uniform(0.01, 3.0, size=n)]
    t = float(rng.uniform(0, 9.5))
    return spec, t, u0, ui, cs


@pytest.fixture(scope="session")
def brownian_model():
    return brownian_setup()


@pytest.fixture(scope="session")
def fig1_model():
    return build_model(load_preset("fig1"))


@pytest.fixture(scope="session")
def fig2_model():
    return build_model(load_preset("fig2"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
