import contextlib

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

hypothesis.settings.register_profile("default", deadline=None, max_examples=40)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[dict]()


def random_spd(rng, n, cond=50.0):
    """SPD matrix with eigenvalues log-uniform in ``[1, cond]`` times a random scale."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(0.0, np.log(cond), n)) * np.exp(rng.uniform(-1.0, 1.0))
    S = (Q * lam) @ Q.T
    return 0.5 * (S + S.T)


def random_sym(rng, n):
    A = rng.standard_normal((n, n))
    return 0.5 * (A + A.T)


@st.composite
def spd_and_syms(draw, k=1, min_dim=1, max_dim=6):
    """``(S, V_1, ..., V_k)`` with S SPD; matrices come from a seeded generator
    so shrinking acts on (dim, seed)."""
    n = draw(st.integers(min_dim, max_dim))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return (random_spd(rng, n), *[random_sym(rng, n) for _ in range(k)])


@st.composite
def spd_pairs(draw, min_dim=1, max_dim=6):
    n = draw(st.integers(min_dim, max_dim))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return random_spd(rng, n), random_spd(rng, n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def criterion(request):
    """Context manager recording PASS/FAIL for an acceptance criterion."""
    log = request.config.stash.setdefault(_ACCEPTANCE, {})

    @contextlib.contextmanager
    def record(num, title):
        try:
            yield
        except BaseException:
            log[num] = ("FAIL", title)
            raise
        log[num] = ("PASS", title)

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(log):
        status, title = log[num]
        terminalreporter.write_line(f"{status} criterion {num:2d}: {title}")
