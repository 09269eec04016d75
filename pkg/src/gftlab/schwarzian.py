"""Schwarzian derivatives, hyperbolic sup-norms and the Schwarzian equation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DomainError, SingularityError, UsageError
from .reports import ClaimReport, verdict_of
from .series import TruncatedSeries, compose, reciprocal

GOLDEN = (math.sqrt(5) - 1) / 2
REFINE_ROUNDS = 200


@dataclass(frozen=True)
class GridSpec:
    """Polar sampling grid on the disk: ``radii_count`` levels in ``[0, r_max]``."""

    radii_count: int = 65
    angles: int = 512
    r_max: float = 0.96
    refine: bool = True

    def radii(self):
        if self.radii_count < 1:
            return np.zeros(0)
        if self.radii_count == 1:
            return np.zeros(1)
        return np.linspace(0.0, self.r_max, self.radii_count)

    def thetas(self):
        return 2 * np.pi * np.arange(self.angles) / self.angles if self.angles > 0 else np.zeros(0)

    def doubled(self):
        return replace(self, radii_count=2 * self.radii_count - 1, angles=2 * self.angles)


CANONICAL_GRID = GridSpec()


@dataclass(frozen=True)
class BeckerGrid:
    radii: tuple = tuple(1 + 2.0 ** -j for j in range(1, 15)) + (2.0, 4.0, 8.0)
    angles: int = 512


@dataclass(frozen=True)
class QuadDifferential:
    """A holomorphic function phi on the disk, with an optional cached norm."""

    phi: TruncatedSeries
    norm_cache: Optional[float] = None

    def with_norm(self, grid=CANONICAL_GRID):
        return QuadDifferential(self.phi, bnorm(self.phi, grid))

    def __call__(self, z):
        return self.phi(z)


@dataclass(frozen=True, eq=False)
class LaurentTail:
    """``F(z) = z + b0 + sum_n tail[n-1] z^-n`` on ``|z| > 1``."""

    b0: complex
    tail: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        arr = np.array(self.tail, dtype=complex).ravel()
        arr.setflags(write=False)
        object.__setattr__(self, "tail", arr)
        object.__setattr__(self, "b0", complex(self.b0))

    @property
    def order(self):
        return self.tail.size

    @classmethod
    def from_disk_map(cls, f):
        """Inverted map ``1/f(1/z)`` of a normalized series ``f = z + a_2 z^2 + ...``."""
        if f.coeffs[0] != 0 or abs(f.coeffs[1] - 1) > 1e-12:
            raise DomainError("inversion needs f(0) = 0, f'(0) = 1")
        # 1/f(1/z) = z * R(1/z) with R = 1 / (f(w)/w)
        r = reciprocal(TruncatedSeries(f.coeffs[1:])).coeffs
        return cls(r[1], r[2:])

    def _powers(self, z):
        n = np.arange(1, self.order + 1)
        return n, np.asarray(z)[..., None] ** (-n)

    def __call__(self, z):
        n, zn = self._powers(z)
        return np.asarray(z) + self.b0 + zn @ self.tail

    def derivatives(self, z):
        """``(F'(z), F''(z))``."""
        z = np.asarray(z, dtype=complex)
        n, zn = self._powers(z)
        d1 = 1 - (zn / z[..., None]) @ (n * self.tail)
        d2 = (zn / z[..., None] ** 2) @ (n * (n + 1) * self.tail)
        return d1, d2


def _as_series(phi):
    return phi.phi if isinstance(phi, QuadDifferential) else phi


def schwarzian(f):
    """Schwarzian ``(f''/f')' - (f''/f')^2 / 2`` of a series.

    The ``z^j`` coefficient of ``S_f`` involves ``a_{j+3}``, so an order-``N``
    input yields an order ``N - 3`` result.
    """
    if f.order < 4:
        raise UsageError("schwarzian needs a series of order >= 4")
    if f.coeffs[1] == 0:
        raise DomainError("f'(0) = 0: not locally univalent at the origin")
    n = f.order
    d1 = f.derivative()
    d2 = d1.derivative()
    pre = d2 * reciprocal(d1.truncate(n - 2))
    s = pre.derivative() - 0.5 * (pre * pre).truncate(n - 3)
    return QuadDifferential(s)


def chain_rule_residual(f1, f):
    """Largest coefficient of ``S_{f1 o f} - ((S_{f1} o f) f'^2 + S_f)``.

    Compared over every coefficient determined by the inputs.
    """
    if f.coeffs[0] != 0:
        raise DomainError("chain_rule_residual: inner map must satisfy f(0) = 0")
    n = min(f1.order, f.order)
    f1, f = f1.truncate(n), f.truncate(n)
    lhs = schwarzian(compose(f1, f)).phi
    m = lhs.order
    s1 = schwarzian(f1).phi
    fp = f.derivative().truncate(m)
    rhs = compose(s1, f.truncate(m)) * fp * fp + schwarzian(f).phi
    return float(np.max(np.abs(lhs.coeffs - rhs.coeffs)))


def _golden_max(fun, lo, hi, iters=40):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    best = max((fc, c), (fd, d))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
        best = max(best, (fc, c), (fd, d))
    return best


def weighted_modulus(phi, z):
    """``(1 - |z|^2)^2 |phi(z)|``."""
    z = np.asarray(z)
    return (1 - np.abs(z) ** 2) ** 2 * np.abs(_as_series(phi)(z))


def bnorm(phi, grid=CANONICAL_GRID, return_argmax=False):
    """Estimate ``sup_D (1 - |z|^2)^2 |phi(z)|`` on a polar grid.

    After the grid pass, golden-section searches in the radius and in the
    angle alternate around the grid argmax until neither improves.
    """
    s = _as_series(phi)
    radii, thetas = grid.radii(), grid.thetas()
    if radii.size == 0 or thetas.size == 0:
        raise UsageError("bnorm: empty grid")
    z = radii[:, None] * np.exp(1j * thetas)[None, :]
    w = weighted_modulus(s, z)
    i, j = np.unravel_index(np.argmax(w), w.shape)
    best = float(w[i, j])
    rho, theta = float(radii[i]), float(thetas[j])
    if grid.refine and best > 0:
        dr = grid.r_max / max(grid.radii_count - 1, 1)
        dt = 2 * np.pi / grid.angles
        # alternate radial and angular searches until they stop improving
        for _ in range(REFINE_ROUNDS):
            start = best
            val, r_new = _golden_max(
                lambda r: float(weighted_modulus(s, r * np.exp(1j * theta))),
                max(rho - dr, 0.0),
                min(rho + dr, 1.0),
            )
            if val > best:
                best, rho = val, r_new
            val, t_new = _golden_max(
                lambda t: float(weighted_modulus(s, rho * np.exp(1j * t))), theta - dt, theta + dt
            )
            if val > best:
                best, theta = val, t_new
            if best - start <= 1e-15 * best:
                break
    if return_argmax:
        return best, rho * np.exp(1j * theta)
    return best


def ahlfors_weill_admissible(f, k, grid=CANONICAL_GRID):
    """Check ``(1 - |z|^2)^2 |S_f(z)| <= 2k`` on the grid."""
    if not 0 <= k < 1:
        raise UsageError(f"dilatation k must lie in [0, 1), got {k}")
    sup, where = bnorm(schwarzian(f), grid, return_argmax=True)
    return ClaimReport(
        claim_id="ahlfors-weill-admissible",
        paper_anchor="Ahlfors-Weill: (1-|z|^2)^2 |S_f(z)| <= 2k gives a k-quasiconformal extension",
        inputs={"k": k, "order": f.order, "grid": grid.__dict__},
        computed={"sup": sup, "bound": 2 * k, "argmax": complex(where)},
        verdict=verdict_of(sup <= 2 * k),
        tolerance=0.0,
    )


def becker_norm(F, grid=BeckerGrid()):
    """``max (|z|^2 - 1) |z F''(z) / F'(z)|`` over radii > 1."""
    thetas = 2 * np.pi * np.arange(grid.angles) / grid.angles
    r = np.asarray(grid.radii, dtype=float)
    if r.size == 0 or thetas.size == 0:
        raise UsageError("becker_norm: empty grid")
    z = r[:, None] * np.exp(1j * thetas)[None, :]
    d1, d2 = F.derivatives(z)
    bad = np.abs(d1) < 1e-13
    if np.any(bad):
        point = complex(z[bad][0])
        raise SingularityError(f"F' vanishes at sampled point {point}", point=point)
    vals = (np.abs(z) ** 2 - 1) * np.abs(z * d2 / d1)
    return float(vals.max())


def solve_schwarzian(phi):
    """Solve ``S_w = phi`` with ``w(0) = 0, w'(0) = 1, w''(0) = 0``.

    Uses the linear equation ``u'' + (phi/2) u = 0`` with the two solutions
    ``u1 = z + ...`` and ``u2 = 1 + O(z^2)``; ``w = u1 / u2``.  An order-``M``
    phi determines ``w`` through order ``M + 3``.
    """
    s = _as_series(phi)
    if s.order < 2:
        raise UsageError("solve_schwarzian needs phi of order >= 2")
    m = s.order + 3
    p = np.zeros(m + 1, dtype=complex)
    p[: s.order + 1] = s.coeffs

    def solve(u0, u1):
        u = np.zeros(m + 1, dtype=complex)
        u[0], u[1] = u0, u1
        for n in range(m - 1):
            u[n + 2] = -0.5 * np.dot(p[: n + 1], u[n::-1]) / ((n + 2) * (n + 1))
        return u

    # u2's top coefficient would need phi beyond its order; it only meets u1_0 = 0
    num = TruncatedSeries(solve(0.0, 1.0))
    den = TruncatedSeries(solve(1.0, 0.0))
    return num * reciprocal(den)


def match_second_coefficient(w, a2):
    """Post-compose with ``u -> u / (1 - c u)`` so the result has ``a_2 = a2``."""
    c = a2 - w.coeffs[2]
    one = TruncatedSeries.from_coeffs([1.0], w.order)
    return w * reciprocal(one - c * w)


def tau_from_k(k):
    """Teichmüller distance from the origin for extremal dilatation ``k``: ``artanh(k) / 2``."""
    if not 0 <= k < 1:
        raise DomainError(f"dilatation must satisfy 0 <= k < 1, got {k}")
    return 0.5 * math.atanh(k)
