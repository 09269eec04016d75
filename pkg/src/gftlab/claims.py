"""Registry of runnable claim checks.

Each descriptor carries a short mathematical anchor and a function that
computes the comparison under a ``RunConfig``.  Verdicts describe the
computed comparison only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .config import RunConfig
from .errors import UsageError
from .experiments import ExtremalParams, extremal_fk, theorem1_experiment, theorem2_experiment
from .functional import FunctionalSpec, coefficient_symbol, extremal_mu, inversion_polynomials, phi0, transform_functional
from .grunsky import coefficient_bound_check, grunsky_form_norm, grunsky_matrix
from .reports import ClaimReport, verdict_of
from .schwarzian import bnorm, chain_rule_residual, schwarzian
from .series import TruncatedSeries, compose, identity, koebe, lagrange_invert
from .univalence import NETANYAHU_BOUND, biunivalence_certificates, lemma1_covering_check


@dataclass(frozen=True)
class ClaimDescriptor:
    claim_id: str
    paper_anchor: str
    run: Callable[[RunConfig], ClaimReport]
    sampled: bool = False


def _rng(seed, tag):
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def random_normalized(rng, order, decay=0.1):
    """``z + sum a_n z^n`` with complex Gaussian ``a_n`` scaled by ``decay^(n-1)``.

    The default keeps the inverse coefficients of moderate size, so absolute
    residuals measure the algebra rather than floating-point growth.
    """
    c = np.zeros(order + 1, dtype=complex)
    c[1] = 1.0
    n = np.arange(2, order + 1)
    c[2:] = (rng.standard_normal(n.size) + 1j * rng.standard_normal(n.size)) * decay ** (n - 1)
    return TruncatedSeries(c)


def inversion_closed_forms(f):
    a2, a3, a4 = f.coeffs[2], f.coeffs[3], f.coeffs[4]
    return np.array([-a2, 2 * a2**2 - a3, -5 * a2**3 + 5 * a2 * a3 - a4])


def _inversion_identities(cfg):
    rng = _rng(cfg.seed, 1)
    res = 0.0
    for _ in range(100):
        f = random_normalized(rng, 4, decay=1.0)
        res = max(res, float(np.max(np.abs(lagrange_invert(f).coeffs[2:5] - inversion_closed_forms(f)))))
    return ClaimReport(
        "inversion-identities",
        "b_2 = -a_2, b_3 = 2a_2^2 - a_3, b_4 = -5a_2^3 + 5a_2a_3 - a_4",
        {"sets": 100},
        {"max_residual": res},
        verdict_of(res < 1e-10),
        1e-10,
        cfg.seed,
    )


def _round_trip(cfg):
    rng = _rng(cfg.seed, 2)
    res = 0.0
    for _ in range(100):
        f = random_normalized(rng, cfg.order)
        res = max(res, float(np.max(np.abs((compose(f, lagrange_invert(f)) - identity(cfg.order)).coeffs))))
    return ClaimReport(
        "inverse-round-trip",
        "f(f^{-1}(w)) = w as formal power series",
        {"series": 100, "order": cfg.order},
        {"max_residual": float(res)},
        verdict_of(res < 1e-10),
        1e-10,
        cfg.seed,
    )


def _chain_rule(cfg):
    rng = _rng(cfg.seed, 3)
    res = 0.0
    for _ in range(100):
        f1, f = random_normalized(rng, cfg.order), random_normalized(rng, cfg.order)
        res = max(res, chain_rule_residual(f1, f))
    return ClaimReport(
        "schwarzian-chain-rule",
        "S_{f1 o f} = (S_{f1} o f) f'^2 + S_f",
        {"pairs": 100, "order": cfg.order},
        {"max_residual": res},
        verdict_of(res < 1e-9),
        1e-9,
        cfg.seed,
    )


def _koebe_schwarzian(cfg):
    grid = cfg.grid()
    s = schwarzian(koebe(max(cfg.order, 32)))
    base, fine = bnorm(s, grid), bnorm(s, grid.doubled())
    change = abs(fine - base) / base
    return ClaimReport(
        "koebe-schwarzian-norm",
        "||S_K||_B = sup (1-|z|^2)^2 |S_K(z)| = 6 for the Koebe function K",
        {"grid": grid.__dict__},
        {"bnorm": base, "bnorm_doubled_grid": fine, "relative_change": change, "expected": 6.0},
        verdict_of(abs(base - 6) <= 1e-3 and change < 1e-3),
        1e-3,
    )


def _grunsky_closed_forms(cfg):
    n = 48
    values = {"koebe": grunsky_form_norm(grunsky_matrix(koebe(2 * n + 1), n))}
    ok = abs(values["koebe"] - 1) <= 1e-8
    for k in (0.1, 0.25, 0.5):
        v = grunsky_form_norm(grunsky_matrix(extremal_fk(ExtremalParams(k), 2 * n + 1), n))
        values[f"fk_{k}"] = v
        ok &= abs(v - k * k) <= 1e-8
    return ClaimReport(
        "grunsky-closed-forms",
        "Grunsky form norm: 1 for the Koebe function, k^2 for z/(1-kz)^2",
        {"grunsky_order": n},
        values,
        verdict_of(ok),
        1e-8,
    )


def _coefficient_bound(cfg):
    n = cfg.grunsky_order
    koebe_rep = coefficient_bound_check(grunsky_matrix(koebe(2 * n + 1), n))
    fk_rep = coefficient_bound_check(grunsky_matrix(extremal_fk(ExtremalParams(cfg.k), 2 * n + 1), n))
    top = koebe_rep.computed["max_weighted_coefficient"]
    ok = koebe_rep.passed and fk_rep.passed and abs(top - 1) <= 1e-9
    return ClaimReport(
        "grunsky-coefficient-bound",
        "|c_mn| <= 1/sqrt(mn) for univalent f, with equality for the Koebe function",
        {"grunsky_order": n, "k": cfg.k},
        {"koebe_max": top, "fk_max": fk_rep.computed["max_weighted_coefficient"]},
        verdict_of(ok),
        1e-9,
    )


def _netanyahu(cfg):
    v = cfg.verifier()
    ident = biunivalence_certificates(identity(cfg.order), v)
    koe = biunivalence_certificates(koebe(cfg.order), v)
    ok = ident.overall == "certified" and koe.overall == "refuted" and koe.netanyahu_pass == "fail"
    return ClaimReport(
        "netanyahu-refutation",
        "max |a_2| over biunivalent maps is 4/3",
        {"order": cfg.order},
        {"identity_overall": ident.overall, "koebe_a2": koe.a2_modulus, "koebe_overall": koe.overall, "bound": NETANYAHU_BOUND},
        verdict_of(ok),
        cfg.tol_geom,
    )


def _a2_extremal(cfg):
    rng = _rng(cfg.seed, 8)
    gap = 0.0
    for _ in range(100):
        k = float(rng.uniform(0, 0.99))
        t = complex(np.exp(2j * np.pi * rng.uniform()))
        gap = max(gap, abs(extremal_fk(ExtremalParams(k, t), 4).coeffs[2] - 2 * t * k))
    return ClaimReport(
        "a2-bound-equality",
        "|a_2| <= 2k, with equality for z/(1-tkz)^2",
        {"pairs": 100},
        {"max_gap": float(gap)},
        verdict_of(gap <= 1e-15),
        1e-15,
        cfg.seed,
    )


def _a2_half_sufficiency(cfg):
    f = extremal_fk(ExtremalParams(0.25), cfg.order)
    cert = biunivalence_certificates(f, cfg.verifier())
    cov = cert.covering_radius
    return ClaimReport(
        "a2-half-sufficiency",
        "|a_2| <= 1/2 places f in the biunivalent class (read as: f(D) covers D)",
        {"map": "z/(1-z/4)^2", "order": cfg.order},
        {
            "a2_modulus": cert.a2_modulus,
            "covering_radius": cov,
            "covering_closed_form": 1 / 1.25**2,
            "required_covering": 1.0,
            "grunsky_inverse_norm": cert.grunsky_inverse_norm,
            "certificate_overall": cert.overall,
        },
        verdict_of(cov >= 1 - cfg.tol_geom),
        cfg.tol_geom,
        notes="discrepancy reported as computed: the map attains |a_2| = 1/2 yet its image misses part of D",
    )


def _covering_family(cfg):
    family = [extremal_fk(ExtremalParams(k), 64) for k in (0.05, 0.1, 0.15, 0.2, 0.25)]
    rep = lemma1_covering_check(family, cfg.verifier())
    rep.inputs["ks"] = [0.05, 0.1, 0.15, 0.2, 0.25]
    rep.notes = "prediction 1/(2 max|a_2|) = 1 versus computed covering 1/(1+k)^2"
    return rep


def _koebe_quarter(cfg):
    rep = lemma1_covering_check([koebe(1 << 16)], cfg.verifier())
    rep.claim_id = "koebe-quarter-sharp"
    rep.paper_anchor = "1/(2|a_2^0|) is sharp: Koebe function with a_2 = 2 covers exactly radius 1/4"
    return rep


def _covering_unit_disk(cfg):
    return theorem2_experiment(cfg.k, cfg.experiment(), seed=cfg.seed)


@lru_cache(maxsize=4)
def _ball(cfg):
    return theorem1_experiment(cfg.k, cfg.claim_trials, cfg.seed, cfg.experiment())


def _ball_experiment(cfg):
    rep = _ball(cfg)
    agg = rep.aggregates
    return ClaimReport(
        "ball-biunivalence",
        "maps in the ball of radius 1/4 are biunivalent up to a Mobius map",
        {"k": cfg.k, "trials": cfg.claim_trials, "sampling": rep.sampling},
        {
            key: agg[key]
            for key in (
                "completed",
                "certified",
                "refuted",
                "indeterminate",
                "grunsky_inverse_le_1",
                "covering_ge_1",
                "a2_le_half",
                "a2_max_le_half",
                "netanyahu_violations",
            )
        },
        verdict_of(agg["refuted"] == 0, decidable=False),
        cfg.tol_geom,
        cfg.seed,
        notes="sampled sufficient subregion; a finite sample cannot decide the claim",
    )


def _ahlfors_weill(cfg):
    rep = _ball(cfg)
    agg = rep.aggregates
    ok = agg["failed"] == 0 and agg["numeric_univalence"] == 1.0 and agg["max_solver_residual"] < 1e-8
    return ClaimReport(
        "ahlfors-weill-univalence",
        "(1-|z|^2)^2 |S_f(z)| <= 2k implies f univalent with k-quasiconformal extension",
        {"k": cfg.k, "trials": cfg.claim_trials},
        {
            "numeric_univalence_fraction": agg["numeric_univalence"],
            "failed_trials": agg["failed"],
            "max_solver_residual": agg["max_solver_residual"],
            "all_a2_le_2k": agg["all_a2_le_2k"],
        },
        verdict_of(ok),
        cfg.tol_geom,
        cfg.seed,
    )


def mu_phase_constancy(k, z):
    """``extremal_mu(phi0(-b_2)) * z^3/|z|^3`` minus its mean, and that mean."""
    jt = FunctionalSpec(-coefficient_symbol("b", 2), "b")
    vals = extremal_mu(phi0(jt, {2: 0.0}), k, z) * z**3 / np.abs(z) ** 3
    return float(np.max(np.abs(vals - vals[0]))), complex(vals[0])


def _functional_machinery(cfg):
    table = inversion_polynomials(4)
    jt = transform_functional(FunctionalSpec(coefficient_symbol("a", 3)), table)
    b2, b3 = coefficient_symbol("b", 2), coefficient_symbol("b", 3)
    symbolic_ok = jt == FunctionalSpec(2 * b2**2 - b3, "b")
    rng = _rng(cfg.seed, 12)
    z = (1 + rng.exponential(size=1000)) * np.exp(2j * np.pi * rng.uniform(size=1000))
    k = cfg.k if cfg.k > 0 else 0.25
    spread, const = mu_phase_constancy(k, z)
    return ClaimReport(
        "extremal-functional-machinery",
        "J~(f) = 2b_2^2 - b_3 for J = a_3; mu_k = k|phi_0|/phi_0 matches mu_0 = k|z|^3/z^3",
        {"points": 1000, "k": k},
        {"transformed": str(jt.poly), "symbolic_match": bool(symbolic_ok), "phase_spread": spread, "phase_constant": const},
        verdict_of(symbolic_ok and spread < 1e-12),
        1e-12,
        cfg.seed,
    )


REGISTRY = (
    ClaimDescriptor("inversion-identities", "b_2 = -a_2, b_3 = 2a_2^2 - a_3, b_4 = -5a_2^3 + 5a_2a_3 - a_4", _inversion_identities),
    ClaimDescriptor("inverse-round-trip", "f(f^{-1}(w)) = w", _round_trip),
    ClaimDescriptor("schwarzian-chain-rule", "S_{f1 o f} = (S_{f1} o f) f'^2 + S_f", _chain_rule),
    ClaimDescriptor("koebe-schwarzian-norm", "||S_K||_B = 6", _koebe_schwarzian),
    ClaimDescriptor("grunsky-closed-forms", "Grunsky norm 1 (Koebe) and k^2 (f_k)", _grunsky_closed_forms),
    ClaimDescriptor("grunsky-coefficient-bound", "|c_mn| <= 1/sqrt(mn)", _coefficient_bound),
    ClaimDescriptor("netanyahu-refutation", "max_B |a_2| = 4/3", _netanyahu),
    ClaimDescriptor("a2-bound-equality", "|a_2| <= 2k", _a2_extremal),
    ClaimDescriptor("a2-half-sufficiency", "|a_2| <= 1/2 implies membership in B", _a2_half_sufficiency),
    ClaimDescriptor("covering-lemma-family", "covering >= 1/(2|a_2^0|)", _covering_family),
    ClaimDescriptor("koebe-quarter-sharp", "1/(2|a_2^0|) sharp at Koebe", _koebe_quarter),
    ClaimDescriptor("covering-unit-disk", "S_k(inf), k <= 1/4, covers D", _covering_unit_disk),
    ClaimDescriptor("ball-biunivalence", "ball of radius 1/4 lies in B up to Mobius", _ball_experiment, sampled=True),
    ClaimDescriptor("ahlfors-weill-univalence", "(1-|z|^2)^2 |S_f| <= 2k implies univalence", _ahlfors_weill),
    ClaimDescriptor("extremal-functional-machinery", "J~ = 2b_2^2 - b_3; mu_k phase", _functional_machinery),
)


def claim_registry():
    return list(REGISTRY)


def run_claims(cfg, ids=None):
    """Run the selected claims (all by default) in registry order."""
    chosen = [d for d in REGISTRY if ids is None or d.claim_id in ids]
    missing = set(ids or ()) - {d.claim_id for d in chosen}
    if missing:
        raise UsageError(f"unknown claim id(s): {', '.join(sorted(missing))}")
    return [d.run(cfg) for d in chosen]
