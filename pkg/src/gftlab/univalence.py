"""Numerical univalence tests, covering radii and biunivalence certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GFTError, SingularityError, UsageError
from .grunsky import grunsky_form_norm, grunsky_matrix, grunsky_of_inverse
from .reports import ClaimReport, verdict_of
from .schwarzian import _golden_max
from .series import evaluate, evaluate_on_circle

NETANYAHU_BOUND = 4 / 3
A2_SUFFICIENT = 0.5
MAX_WINDING_SAMPLES = 1 << 20


@dataclass(frozen=True)
class VerifierConfig:
    rhos: tuple = (0.90, 0.99, 0.999)
    samples: int = 2048
    grunsky_order: int = 16
    tol_geom: float = 1e-3
    tol_norm: float = 1e-6


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    points: np.ndarray
    rho: float
    closed: bool = True

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).ravel()
        if pts.size < 16:
            raise UsageError(f"a boundary curve needs at least 16 points, got {pts.size}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def boundary_curve(f, rho, m):
    if not 0 < rho < 1:
        raise UsageError(f"rho must lie in (0, 1), got {rho}")
    if m < 16:
        raise UsageError(f"need at least 16 samples, got {m}")
    return BoundaryCurve(evaluate_on_circle(f, rho, m), rho)


def _orient(a, b, c):
    ab, ac = b - a, c - a
    return ab.real * ac.imag - ab.imag * ac.real


def _on_segment(a, b, c):
    # c collinear with a-b: inside the bounding box
    return (
        (np.minimum(a.real, b.real) <= c.real)
        & (c.real <= np.maximum(a.real, b.real))
        & (np.minimum(a.imag, b.imag) <= c.imag)
        & (c.imag <= np.maximum(a.imag, b.imag))
    )


def segments_intersect(p1, p2, q1, q2):
    """Closed-segment intersection via orientation signs (broadcasts)."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
    touch = (
        ((d1 == 0) & _on_segment(q1, q2, p1))
        | ((d2 == 0) & _on_segment(q1, q2, p2))
        | ((d3 == 0) & _on_segment(p1, p2, q1))
        | ((d4 == 0) & _on_segment(p1, p2, q2))
    )
    return proper | touch


def jordan_test(curve, block=256):
    """True iff no two non-adjacent edges of the closed polyline meet."""
    a = curve.points
    b = np.roll(a, -1)
    if np.any(a == b):
        raise UsageError("boundary curve has a zero-length segment")
    m = a.size
    xlo, xhi = np.minimum(a.real, b.real), np.maximum(a.real, b.real)
    ylo, yhi = np.minimum(a.imag, b.imag), np.maximum(a.imag, b.imag)
    j = np.arange(m)
    for start in range(0, m, block):
        i = np.arange(start, min(start + block, m))[:, None]
        # edges i and i+1 share a vertex, as do edge 0 and edge m-1
        mask = (j[None, :] >= i + 2) & ~((i == 0) & (j[None, :] == m - 1))
        mask &= (xlo[None, :] <= xhi[i]) & (xlo[i] <= xhi[None, :])
        mask &= (ylo[None, :] <= yhi[i]) & (ylo[i] <= yhi[None, :])
        ii, jj = np.nonzero(mask)
        if ii.size == 0:
            continue
        ii = ii + start
        if np.any(segments_intersect(a[ii], b[ii], a[jj], b[jj])):
            return False
    return True


def winding_number(g, rho, m=2048):
    """Winding of ``g(rho e^{it})`` about 0, refining until phase steps are small."""
    while True:
        vals = evaluate_on_circle(g, rho, m)
        if np.any(vals == 0):
            raise SingularityError("function vanishes on the sampling circle", point=rho)
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(steps)) < np.pi / 2:
            return int(round(steps.sum() / (2 * np.pi)))
        if m >= MAX_WINDING_SAMPLES:
            raise SingularityError("phase resolution not reached on the sampling circle", point=rho)
        m *= 2


def univalence_evidence(f, rhos, m):
    """Per-radius Jordan verdicts and the zero count of ``f'``."""
    rhos = [float(r) for r in rhos]
    if not rhos or any(not 0 < r < 1 for r in rhos) or sorted(rhos) != rhos:
        raise UsageError("rhos must be increasing values in (0, 1)")
    jordan = {r: jordan_test(boundary_curve(f, r, m)) for r in rhos}
    zeros = winding_number(f.derivative(), rhos[-1], m)
    return {"jordan": jordan, "derivative_zeros": zeros, "pass": all(jordan.values()) and zeros == 0}


def numeric_univalence(f, rhos=VerifierConfig.rhos, m=VerifierConfig.samples):
    return univalence_evidence(f, rhos, m)["pass"]


def min_modulus_on_circle(f, rho, m):
    """``min |f|`` on ``|z| = rho``: grid argmin plus a golden-section polish."""
    vals = np.abs(evaluate_on_circle(f, rho, m))
    j = int(np.argmin(vals))
    t0, dt = 2 * np.pi * j / m, 2 * np.pi / m
    neg, _ = _golden_max(lambda t: -abs(evaluate(f, rho * np.exp(1j * t))), t0 - dt, t0 + dt)
    return min(float(vals[j]), -neg)


def covering_radius(f, rho_ladder=VerifierConfig.rhos, m=VerifierConfig.samples):
    """Distance from 0 to the boundary of ``f(D)``.

    Minimum modulus on the two outermost ladder circles, linearly
    extrapolated in the radius to ``rho = 1``.
    """
    ladder = [float(r) for r in rho_ladder]
    if not ladder or any(not 0 < r < 1 for r in ladder) or sorted(ladder) != ladder:
        raise UsageError("rho ladder must be increasing values in (0, 1)")
    if len(ladder) == 1:
        return min_modulus_on_circle(f, ladder[0], m)
    r1, r2 = ladder[-2], ladder[-1]
    v1, v2 = min_modulus_on_circle(f, r1, m), min_modulus_on_circle(f, r2, m)
    return v2 + (v2 - v1) * (1 - r2) / (r2 - r1)


_CERT_FIELDS = (
    "a2_modulus",
    "netanyahu_pass",
    "lemma2_pass",
    "grunsky_f_norm",
    "grunsky_inverse_norm",
    "covering_radius",
    "numeric_univalence",
    "overall",
)


@dataclass
class BiunivalenceCertificate:
    a2_modulus: float
    netanyahu_pass: str
    lemma2_pass: str
    grunsky_f_norm: float
    grunsky_inverse_norm: float
    covering_radius: float
    numeric_univalence: str
    overall: str
    errors: dict = field(default_factory=dict)

    def to_dict(self):
        out = {name: getattr(self, name) for name in _CERT_FIELDS}
        if self.errors:
            out["errors"] = dict(self.errors)
        return out


def _overall(cert, cfg):
    if cert.netanyahu_pass == "fail" or cert.numeric_univalence == "fail":
        return "refuted"
    # a finite Grunsky section above 1 already rules out univalence on the disk
    if cert.grunsky_f_norm > 1 + cfg.tol_norm or cert.grunsky_inverse_norm > 1 + cfg.tol_norm:
        return "refuted"
    if (
        cert.numeric_univalence == "pass"
        and cert.grunsky_inverse_norm <= 1 + cfg.tol_norm
        and cert.covering_radius >= 1 - cfg.tol_geom
    ):
        return "certified"
    return "indeterminate"


def biunivalence_certificates(f, cfg=VerifierConfig()):
    """Collect every biunivalence signal for ``f``; failures are recorded per field."""
    if f.coeffs[0] != 0 or abs(f.coeffs[1] - 1) > 1e-12:
        raise UsageError("certificates need f(0) = 0, f'(0) = 1")
    errors = {}
    a2 = float(abs(f.coeffs[2])) if f.order >= 2 else 0.0
    n = min(cfg.grunsky_order, (f.order - 1) // 2)

    def attempt(name, fn, fallback=float("nan")):
        try:
            return fn()
        except (GFTError, FloatingPointError, ArithmeticError) as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
            return fallback

    gf = attempt("grunsky_f_norm", lambda: grunsky_form_norm(grunsky_matrix(f, n)))
    gi = attempt("grunsky_inverse_norm", lambda: grunsky_form_norm(grunsky_of_inverse(f.truncate(2 * n + 1), n)))
    cov = attempt("covering_radius", lambda: covering_radius(f, cfg.rhos, cfg.samples))
    uni = attempt(
        "numeric_univalence",
        lambda: verdict_of(numeric_univalence(f, cfg.rhos, cfg.samples)),
        fallback="indeterminate",
    )
    cert = BiunivalenceCertificate(
        a2_modulus=a2,
        netanyahu_pass=verdict_of(a2 <= NETANYAHU_BOUND),
        lemma2_pass=verdict_of(a2 <= A2_SUFFICIENT),
        grunsky_f_norm=float(gf),
        grunsky_inverse_norm=float(gi),
        covering_radius=float(cov),
        numeric_univalence=uni,
        overall="indeterminate",
        errors=errors,
    )
    cert.overall = _overall(cert, cfg)
    return cert


def lemma1_covering_check(family, cfg=VerifierConfig()):
    """Compare each member's covering radius with ``1 / (2 max|a_2|)``."""
    family = list(family)
    if not family:
        raise UsageError("empty family")
    members = []
    for idx, f in enumerate(family):
        if not numeric_univalence(f, cfg.rhos, cfg.samples):
            raise UsageError(f"family member {idx} failed the numeric univalence test")
        members.append({"index": idx, "a2": complex(f.coeffs[2]), "covering_radius": covering_radius(f, cfg.rhos, cfg.samples)})
    a2_0 = max(abs(m["a2"]) for m in members)
    inputs = {"family_size": len(family), "rhos": list(cfg.rhos), "samples": cfg.samples}
    anchor = "covering radius >= 1/(2|a2_0|), a2_0 = max |a2| over the family; sharp for the maximizer"
    if a2_0 == 0:
        return ClaimReport(
            claim_id="covering-lemma-family",
            paper_anchor=anchor,
            inputs=inputs,
            computed={"a2_0": 0.0, "prediction": None, "members": members, "applicable": False},
            verdict="indeterminate",
            tolerance=cfg.tol_geom,
            notes="max |a2| is 0: the predicted radius 1/(2|a2_0|) is undefined",
        )
    prediction = 1 / (2 * a2_0)
    for m in members:
        m["verdict"] = verdict_of(m["covering_radius"] >= prediction - cfg.tol_geom)
        m["gap"] = m["covering_radius"] - prediction
    ok = all(m["verdict"] == "pass" for m in members)
    return ClaimReport(
        claim_id="covering-lemma-family",
        paper_anchor=anchor,
        inputs=inputs,
        computed={"a2_0": a2_0, "prediction": prediction, "members": members, "applicable": True},
        verdict=verdict_of(ok),
        tolerance=cfg.tol_geom,
    )
