import numpy as np
import pytest

from jordan_hessian import algebra as alg


def family_instances():
    """(name, MetrisedAlgebra) pairs used across the suite."""
    return [
        ("componentwise(3)", alg.metrised(alg.componentwise(3))),
        ("spin(4)", alg.metrised(alg.spin(4))),
        ("sym(2)", alg.metrised(alg.sym(2))),
        ("sym(3)", alg.metrised(alg.sym(3))),
        (
            "sym(2)+spin(3)",
            alg.direct_sum([alg.metrised(alg.sym(2)), alg.metrised(alg.spin(3))], [1.0, 2.0]),
        ),
    ]


FAMILIES = family_instances()
FAMILY_IDS = [name for name, _ in FAMILIES]


def non_jordan_r2() -> alg.JordanAlgebra:
    # e1*e1 = e2, e2*e2 = e1, e1*e2 = 0
    C = np.zeros((2, 2, 2))
    C[1, 0, 0] = 1.0
    C[0, 1, 1] = 1.0
    return alg.JordanAlgebra(C)


def random_point_in_series_region(A, rng, rho_max=0.5):
    """Random x with spectral radius of L_x uniform in (0, rho_max]."""
    x = rng.standard_normal(A.dim)
    return x * (rho_max * rng.uniform(0.05, 1.0) / alg.spectral_radius(A, x))


def random_cone_point(A, rng, low=0.4, high=2.5):
    """Element with all eigenvalues in [low, high] (family-tagged A)."""
    z = rng.standard_normal(A.dim)
    sd = alg.spectral(A, z)
    lam = rng.uniform(low, high, size=sd.eigenvalues.size)
    return lam @ sd.idempotents


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=FAMILIES, ids=FAMILY_IDS)
def family(request):
    return request.param[1]


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
