import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gftlab.claims import random_normalized
from gftlab.series import TruncatedSeries

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def complex_arrays(size, scale=1.0):
    part = st.floats(-scale, scale, allow_nan=False, allow_infinity=False)
    pair = st.builds(complex, part, part)
    return st.lists(pair, min_size=size, max_size=size).map(lambda v: np.array(v, dtype=complex))


def series_strategy(order, scale=1.0):
    return complex_arrays(order + 1, scale).map(TruncatedSeries)


def normalized_strategy(order, scale=0.1):
    def build(v):
        v = v.copy()
        v[0], v[1] = 0.0, 1.0
        return TruncatedSeries(v)

    return complex_arrays(order + 1, scale).map(build)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_series(rng):
    def make(order=32, decay=0.1):
        return random_normalized(rng, order, decay)

    return make


def mixture_unit_vectors(rng, n, d):
    """Quarters: isotropic, sparse support (1-3 coordinates), real with a common phase, decaying profile."""
    x = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    q = n // 4
    for i in range(q, 2 * q):
        keep = rng.choice(d, rng.integers(1, min(3, d) + 1), replace=False)
        mask = np.zeros(d, bool)
        mask[keep] = True
        x[i, ~mask] = 0
    x[2 * q : 3 * q] = rng.standard_normal((q, d)) * np.exp(1j * rng.uniform(0, 2 * np.pi, (q, 1)))
    x[3 * q :] *= rng.uniform(0, 1, (n - 3 * q, 1)) ** np.arange(d)
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sampled_form_sup(b, rng, n=10_000):
    """Brute-force lower bound for ``sup |x^T B x|`` over unit vectors."""
    x = mixture_unit_vectors(rng, n, b.shape[0])
    return float(np.max(np.abs(np.einsum("ij,jk,ik->i", x, b, x))))


def fft_grunsky(f, n, r=0.4, m=64):
    """Independent oracle: ``c_mn`` from a 2-D FFT of the log kernel on a torus of radius ``r``."""
    theta = 2 * np.pi * np.arange(m) / m
    shift = np.pi / m  # keeps z != zeta on the grid
    z = r * np.exp(1j * theta)[:, None]
    w = r * np.exp(1j * (theta + shift))[None, :]
    fz, fw = np.polyval(f.coeffs[::-1], z), np.polyval(f.coeffs[::-1], w)
    kernel = np.log((fz - fw) / (z - w))
    c = np.fft.fft2(kernel) / m**2
    idx = np.arange(1, n + 1)
    return c[1 : n + 1, 1 : n + 1] / (r ** np.add.outer(idx, idx)) / np.exp(1j * shift * idx)[None, :]


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = marker.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}" + (f"  [{detail}]" if detail else ""))
