import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gftlab.claims import random_normalized
from gftlab.errors import NumericalError, UsageError
from gftlab.experiments import ExperimentConfig, ExtremalParams, aw_sample_map, extremal_fk
from gftlab.grunsky import (
    GrunskyMatrix,
    coefficient_bound_check,
    coefficient_sup,
    form_sup,
    grunsky_form_norm,
    grunsky_matrix,
    grunsky_of_inverse,
    read_csv,
    scaled_form_norm,
    scaled_radius,
    seq_norm,
    write_csv,
)
from gftlab.series import TruncatedSeries, geometric, identity, koebe, lagrange_invert, mobius

from conftest import complex_arrays, fft_grunsky, sampled_form_sup

# computed once at first build: Grunsky form norm of the inverse Koebe series at N = 16
KOEBE_INVERSE_NORM_16 = 9.676324858205925e16


def fk(k, t=1.0, order=97):
    return extremal_fk(ExtremalParams(k, t), order)


def corpus():
    return {
        "identity": identity(97),
        "koebe": koebe(97),
        "fk_0.1": fk(0.1),
        "fk_0.25": fk(0.25, 1j),
        "fk_0.5": fk(0.5, np.exp(0.7j)),
        "z/(1-z)": geometric(97),
    }


def test_identity_has_zero_matrix():
    g = grunsky_matrix(identity(33), 16)
    assert not np.any(g.c) and not np.any(g.pure_terms[0])


def test_koebe_closed_form():
    g = grunsky_matrix(koebe(97), 48)
    n = np.arange(1, 49)
    assert np.max(np.abs(g.c - np.diag(-1.0 / n))) < 1e-13
    assert np.max(np.abs(g.pure_terms[0] - 2.0 / n)) < 1e-13


@pytest.mark.parametrize("k,t", [(0.1, 1.0), (0.5, 1j), (0.8, np.exp(2j))])
def test_extremal_closed_form(k, t):
    g = grunsky_matrix(fk(k, t, 41), 20)
    n = np.arange(1, 21)
    assert np.max(np.abs(g.c - np.diag(-((t * k) ** 2) ** n / n))) < 1e-13


def test_matches_fft_oracle(random_series):
    f = random_series(33, decay=0.3)
    g = grunsky_matrix(f, 8)
    assert np.max(np.abs(g.c - fft_grunsky(f, 8))) < 1e-9


def test_koebe_inverse_low_block_matches_fft_oracle():
    ginv = grunsky_of_inverse(koebe(33), 6)
    oracle = fft_grunsky(lagrange_invert(koebe(200)), 6, r=0.15, m=128)
    assert np.max(np.abs(ginv.c - oracle) / np.abs(oracle).max()) < 1e-8


def test_symmetric_and_pure_terms_equal(random_series):
    g = grunsky_matrix(random_series(41, decay=0.5), 20)
    assert np.array_equal(g.c, g.c.T)
    assert np.array_equal(g.pure_terms[0], g.pure_terms[1])


def test_order_checks():
    with pytest.raises(UsageError):
        grunsky_matrix(koebe(20), 10)
    with pytest.raises(UsageError):
        grunsky_matrix(koebe(200), 65)
    with pytest.raises(UsageError):
        grunsky_matrix(koebe(10), 0)


def test_form_norm_examples():
    assert form_sup(np.zeros((4, 4))) == 0
    assert abs(grunsky_form_norm(grunsky_matrix(koebe(97), 48)) - 1) < 1e-8
    for k in (0.1, 0.25, 0.5):
        assert abs(grunsky_form_norm(grunsky_matrix(fk(k), 48)) - k * k) < 1e-8


@given(complex_arrays(36))
def test_form_sup_is_largest_singular_value(v):
    a = v.reshape(6, 6)
    b = a + a.T
    assert form_sup(b) == pytest.approx(np.linalg.svd(b, compute_uv=False)[0], rel=1e-8, abs=1e-12)


def test_form_sup_brackets_sampling():
    rng = np.random.default_rng(3)
    for d in range(1, 9):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        b = a + a.T
        assert sampled_form_sup(b, rng) <= form_sup(b) * (1 + 1e-9)


def test_form_sup_reports_nonconvergence():
    b = np.array([[1.0, 0.3], [0.3, 0.9]], dtype=complex)
    with pytest.raises(NumericalError) as exc:
        form_sup(b, max_iter=1)
    assert exc.value.diagnostics["iterations"] == 1 and exc.value.diagnostics["size"] == 2


def test_monotone_in_truncation():
    for f in corpus().values():
        norms = [grunsky_form_norm(grunsky_matrix(f, n)) for n in (4, 8, 16, 32)]
        assert all(a <= b + 1e-10 for a, b in zip(norms, norms[1:]))


def test_univalent_corpus_necessity():
    for name, f in corpus().items():
        g = grunsky_matrix(f, 32)
        assert grunsky_form_norm(g) <= 1 + 1e-8, name
        assert coefficient_bound_check(g).verdict == "pass", name


def test_aw_samples_satisfy_grunsky_inequality():
    cfg = ExperimentConfig()
    for i in range(4):
        _, w = aw_sample_map(0.3, 5, i, cfg)
        assert grunsky_form_norm(grunsky_matrix(w, 32)) <= 1 + 1e-8


def test_coefficient_bound_examples():
    rep = coefficient_bound_check(grunsky_matrix(koebe(33), 16))
    assert rep.verdict == "pass" and abs(rep.computed["max_weighted_coefficient"] - 1) < 1e-9
    assert coefficient_bound_check(grunsky_matrix(identity(33), 16)).computed["max_weighted_coefficient"] == 0
    bad = coefficient_bound_check(grunsky_matrix(TruncatedSeries.from_coeffs([0, 1, 1], 33), 16))
    assert bad.verdict == "fail"


def test_seq_norm_examples():
    assert seq_norm(GrunskyMatrix(np.zeros((3, 3)), (np.zeros(3), np.zeros(3)), 3)) == 0
    assert abs(seq_norm(grunsky_matrix(koebe(97), 48)) - 2) < 1e-8
    assert abs(seq_norm(grunsky_matrix(fk(0.5), 48)) - 0.5) < 1e-8


def test_scaled_form_is_diagonal_scaling(random_series):
    g = grunsky_matrix(random_series(33, decay=0.4), 16)
    r = 0.7
    d = np.diag(r ** np.arange(1, 17))
    assert scaled_form_norm(g, r) == form_sup(d @ g.weighted() @ d)


def test_scaled_radius_examples():
    assert scaled_radius(grunsky_matrix(identity(33), 16)) == 1.0
    assert scaled_radius(grunsky_matrix(koebe(33), 16)) == 1.0
    assert scaled_radius(grunsky_matrix(fk(0.5), 16)) == 1.0


def test_scaled_radius_bisection_brackets_threshold():
    g = grunsky_matrix(TruncatedSeries.from_coeffs([0, 1, 1], 33), 16)
    r = scaled_radius(g)
    assert 0 < r < 1
    assert scaled_form_norm(g, r) <= 1 + 1e-9 < scaled_form_norm(g, r + 2**-19)


def test_inverse_of_identity_is_zero():
    assert not np.any(grunsky_of_inverse(identity(33), 16).c)


def test_inverse_of_extremal_is_small():
    assert grunsky_form_norm(grunsky_of_inverse(fk(0.1, order=33), 16)) < 1


def test_koebe_inverse_norm_exceeds_one():
    v = grunsky_form_norm(grunsky_of_inverse(koebe(33), 16))
    assert v > 1
    assert v == pytest.approx(KOEBE_INVERSE_NORM_16, rel=1e-8)


def test_mobius_kernel_is_trivial():
    g = grunsky_matrix(mobius(1, 0, -0.5, 1, 33), 16)
    assert np.max(np.abs(g.c)) < 1e-14


def test_csv_round_trip(tmp_path):
    g = grunsky_matrix(fk(0.3, np.exp(1j), 17), 8)
    write_csv(tmp_path / "g.csv", g)
    back = read_csv(tmp_path / "g.csv")
    assert np.array_equal(back.c, g.c)
    assert (tmp_path / "g.csv").read_text().splitlines()[0] == "m,n,re,im"


@given(st.integers(1, 12))
def test_truncate_is_leading_block(n):
    g = grunsky_matrix(koebe(33), 16)
    assert np.array_equal(g.truncate(n).c, g.c[:n, :n])


def test_coefficient_sup_bounded_by_form_norm(rng):
    for _ in range(20):
        f = random_normalized(rng, 13, decay=0.3)
        g = grunsky_matrix(f, 6)
        assert coefficient_sup(g) <= grunsky_form_norm(g) * (1 + 1e-9) + 1e-15
