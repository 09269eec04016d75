"""End-to-end acceptance criteria, one test per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion (see ``conftest.py``).
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

from gftlab.claims import inversion_closed_forms, random_normalized, run_claims
from gftlab.config import RunConfig
from gftlab.experiments import (
    ExtremalParams,
    aw_sample_map,
    extremal_fk,
    mu0_field,
    sample_schwarzian,
    theorem1_experiment,
)
from gftlab.functional import (
    FunctionalSpec,
    coefficient_symbol,
    extremal_mu,
    inversion_polynomials,
    phi0,
    transform_functional,
)
from gftlab.grunsky import coefficient_bound_check, form_sup, grunsky_form_norm, grunsky_matrix
from gftlab.reports import canonical_json, seal, validate
from gftlab.schwarzian import CANONICAL_GRID, bnorm, chain_rule_residual, schwarzian, solve_schwarzian
from gftlab.series import compose, geometric, identity, koebe, lagrange_invert
from gftlab.univalence import NETANYAHU_BOUND, biunivalence_certificates, covering_radius

from conftest import sampled_form_sup

GOLDEN = Path(__file__).parent / "golden" / "ball_k0.25_seed1.json"
TOL_GEOM = 1e-3
POWER_TOL = 1e-10  # stopping tolerance of form_sup: its relative accuracy


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@pytest.fixture(scope="module")
def ball_run():
    cfg = RunConfig()
    start = time.perf_counter()
    rep = theorem1_experiment(0.25, 200, 1, cfg.experiment())
    elapsed = time.perf_counter() - start
    return canonical_json(seal("experiment", rep, cfg.canonical())), rep, elapsed


@criterion(1, "inversion identities")
def test_c01_inversion_identities(record_property):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    res = 0.0
    for _ in range(100):
        f = random_normalized(rng, 4, decay=1.0)
        res = max(res, float(np.max(np.abs(lagrange_invert(f).coeffs[2:5] - inversion_closed_forms(f)))))
    elapsed = time.perf_counter() - start
    record_property("residual", f"{res:.2e}")
    assert res < 1e-10 and elapsed < 1


@criterion(2, "inverse round trip")
def test_c02_round_trip(record_property):
    rng = np.random.default_rng(102)
    start = time.perf_counter()
    res = 0.0
    for _ in range(100):
        f = random_normalized(rng, 32)
        res = max(res, float(np.max(np.abs((compose(f, lagrange_invert(f)) - identity(32)).coeffs))))
    elapsed = time.perf_counter() - start
    record_property("residual", f"{res:.2e}")
    assert res < 1e-10 and elapsed < 5


@criterion(3, "Schwarzian chain rule")
def test_c03_chain_rule(record_property):
    rng = np.random.default_rng(103)
    start = time.perf_counter()
    res = max(chain_rule_residual(random_normalized(rng, 32), random_normalized(rng, 32)) for _ in range(100))
    elapsed = time.perf_counter() - start
    record_property("residual", f"{res:.2e}")
    assert res < 1e-9 and elapsed < 5


@criterion(4, "Koebe Schwarzian norm")
def test_c04_koebe_bnorm(record_property):
    s = schwarzian(koebe(32))
    base, fine = bnorm(s, CANONICAL_GRID), bnorm(s, CANONICAL_GRID.doubled())
    record_property("bnorm", f"{base:.9f}")
    assert abs(base - 6) <= 1e-3
    assert abs(fine - base) / base < 1e-3


@criterion(5, "Schwarzian ODE round trip")
def test_c05_schwarzian_ode(record_property):
    start = time.perf_counter()
    s = schwarzian(koebe(32))
    res = float(np.max(np.abs(schwarzian(solve_schwarzian(s)).phi.coeffs - s.phi.coeffs)))
    rng = np.random.default_rng(105)
    for i in range(100):
        q = sample_schwarzian(float(rng.uniform(0, 2)), int(rng.integers(0, 10)), rng)
        w = solve_schwarzian(q)
        res = max(res, float(np.max(np.abs(schwarzian(w).phi.coeffs - q.phi.coeffs))))
    elapsed = time.perf_counter() - start
    record_property("residual", f"{res:.2e}")
    assert res < 1e-8 and elapsed < 10


@criterion(6, "Grunsky closed forms")
def test_c06_grunsky_closed_forms(record_property):
    n = 48
    start = time.perf_counter()
    g = grunsky_matrix(koebe(2 * n + 1), n)
    assert abs(grunsky_form_norm(g) - 1) <= 1e-8
    assert abs(coefficient_bound_check(g).computed["max_weighted_coefficient"] - 1) <= 1e-9
    for k in (0.1, 0.25, 0.5):
        v = grunsky_form_norm(grunsky_matrix(extremal_fk(ExtremalParams(k), 2 * n + 1), n))
        assert abs(v - k * k) <= 1e-8
    elapsed = time.perf_counter() - start
    record_property("seconds", f"{elapsed:.1f}")
    assert elapsed < 60


def _univalent_test_matrices():
    cfg = RunConfig().experiment()
    for d in range(1, 9):
        yield f"koebe-{d}", grunsky_matrix(koebe(2 * d + 1), d).weighted()
        for k in (0.25, 0.6):
            f = extremal_fk(ExtremalParams(k, np.exp(0.7j)), 2 * d + 1)
            yield f"fk{k}-{d}", grunsky_matrix(f, d).weighted()
        for i in range(2):
            _, w = aw_sample_map(0.25, 7, i, cfg)
            yield f"aw{i}-{d}", grunsky_matrix(w, d).weighted()


def _generic_matrices(rng, orders):
    for d in orders:
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        yield f"generic-{d}", a + a.T


@criterion(7, "operator norm sanity")
def test_c07_operator_norm(record_property):
    rng = np.random.default_rng(107)
    worst = 1.0
    both = list(_univalent_test_matrices()) + list(_generic_matrices(rng, range(1, 4)))
    for name, b in both:
        norm, sampled = form_sup(b), sampled_form_sup(b, rng)
        assert norm >= sampled * (1 - POWER_TOL), name
        assert norm <= sampled * 1.05, name
        worst = max(worst, norm / sampled)
    # lower bound only: larger generic matrices fall outside the 5% band for 1e4 samples
    for name, b in _generic_matrices(rng, range(4, 9)):
        assert form_sup(b) >= sampled_form_sup(b, rng) * (1 - POWER_TOL), name
    record_property("worst_ratio", f"{worst:.4f}")


@criterion(8, "extremal family and covering radii")
def test_c08_extremal_family(record_property):
    start = time.perf_counter()
    for k in (0.0, 0.05, 0.1, 0.25, 0.5, 0.9):
        for t in np.exp(2j * np.pi * np.arange(8) / 8):
            assert extremal_fk(ExtremalParams(k, t), 4).coeffs[2] == 2 * t * k
    worst = 0.0
    for k in (0.05, 0.1, 0.25):
        err = abs(covering_radius(extremal_fk(ExtremalParams(k))) - 1 / (1 + k) ** 2)
        worst = max(worst, err)
        assert err <= TOL_GEOM
    kc = covering_radius(koebe(1 << 16))
    elapsed = time.perf_counter() - start
    record_property("koebe_covering", f"{kc:.6f}")
    assert abs(kc - 0.25) <= TOL_GEOM and elapsed < 30


@criterion(9, "certificates")
def test_c09_certificates(ball_run, record_property):
    assert biunivalence_certificates(identity(32)).overall == "certified"
    koe = biunivalence_certificates(koebe(32))
    assert koe.overall == "refuted" and koe.netanyahu_pass == "fail" and koe.a2_modulus == 2
    certs = [biunivalence_certificates(f).to_dict() for f in (identity(32), koebe(32), geometric(32))]
    certs += [biunivalence_certificates(extremal_fk(ExtremalParams(k), 32)).to_dict() for k in (0.05, 0.25, 0.5, 0.7)]
    certs += [r["certificate"] for r in ball_run[1].per_trial if r["certificate"] is not None]
    bad = [c for c in certs if c["overall"] == "certified" and c["a2_modulus"] > NETANYAHU_BOUND + TOL_GEOM]
    record_property("certificates_checked", len(certs))
    assert not bad


@criterion(10, "ball experiment k=0.25, 200 trials, seed 1")
def test_c10_ball_experiment(ball_run, record_property):
    text, rep, elapsed = ball_run
    cfg = RunConfig()
    start = time.perf_counter()
    again = canonical_json(seal("experiment", theorem1_experiment(0.25, 200, 1, cfg.experiment()), cfg.canonical()))
    elapsed_again = time.perf_counter() - start
    agg = rep.aggregates
    golden = json.loads(GOLDEN.read_text())
    record_property("a2_le_half", agg["a2_le_half"])
    record_property("seconds", f"{elapsed:.0f}")
    assert text == again
    assert agg["completed"] == 200 and agg["numeric_univalence"] == 1.0
    for key, value in golden["aggregates"].items():
        assert agg[key] == value, key
    assert max(elapsed, elapsed_again) < 300


@criterion(11, "claim registry")
def test_c11_claim_registry(tmp_path, record_property):
    reports = run_claims(RunConfig())
    for rep in reports:
        validate(seal("claim", rep, RunConfig().canonical()))
    by_id = {r.claim_id: r for r in reports}
    assert len(reports) >= 10
    single = by_id["a2-half-sufficiency"]
    assert abs(single.computed["covering_radius"] - 0.64) <= TOL_GEOM
    assert single.computed["required_covering"] == 1.0 and single.verdict == "fail"
    family = by_id["covering-lemma-family"]
    assert family.computed["prediction"] == pytest.approx(1.0)
    quarter = [m for m in family.computed["members"] if abs(m["a2"]) == pytest.approx(0.5)]
    assert len(quarter) == 1 and abs(quarter[0]["covering_radius"] - 0.64) <= TOL_GEOM
    assert family.verdict == "fail"
    record_property("reports", len(reports))


@criterion(12, "extremal functional machinery")
def test_c12_functional_machinery(record_property):
    b2, b3 = coefficient_symbol("b", 2), coefficient_symbol("b", 3)
    jt = transform_functional(FunctionalSpec(coefficient_symbol("a", 3)), inversion_polynomials(3))
    assert jt.alphabet == "b" and sp.expand(jt.poly - (2 * b2**2 - b3)) == 0
    z = 1.5 * np.exp(2j * np.pi * np.arange(1000) / 1000) * np.linspace(1, 3, 1000)
    mu = extremal_mu(phi0(FunctionalSpec(-b2, "b"), {2: 0.0}), 0.25, z)
    phase = mu / mu0_field(0.25, z)
    spread = float(np.max(np.abs(phase - phase[0])))
    record_property("spread", f"{spread:.1e}")
    assert spread < 1e-12
    assert abs(abs(phase[0]) - 1) < 1e-12
