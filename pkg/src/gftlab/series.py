"""Truncated complex power series in one and two variables.

A :class:`TruncatedSeries` of order ``N`` stores the Taylor coefficients
``c_0 .. c_N`` of a function at the origin.  Every operation returns only
coefficients that are fully determined by its inputs, so the order of a
result can be lower than the order of its arguments (a derivative loses one
coefficient, a Schwarzian loses three).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, UsageError

DEFAULT_ORDER = 32

__all__ = [
    "DEFAULT_ORDER",
    "TruncatedSeries",
    "BivariateTruncated",
    "series_arith",
    "compose",
    "reciprocal",
    "log",
    "exp",
    "reciprocal_log",
    "lagrange_invert",
    "evaluate",
    "evaluate_on_circle",
    "divided_difference",
    "bivariate_log",
    "identity",
    "koebe",
    "geometric",
    "mobius",
    "read_series",
    "write_series",
]


def _frozen(values, ndim):
    arr = np.array(values, dtype=complex)
    if arr.ndim != ndim:
        raise UsageError(f"expected a {ndim}-d coefficient array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients ``c_0 .. c_N`` of a power series, immutable."""

    coeffs: np.ndarray

    # make numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __post_init__(self):
        arr = _frozen(self.coeffs, 1)
        if arr.size < 2:
            raise UsageError("a truncated series needs order >= 1")
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_coeffs(cls, coeffs, order=None):
        """Build a series, zero-padding or cutting ``coeffs`` to ``order``."""
        arr = np.asarray(coeffs, dtype=complex).ravel()
        if order is None:
            order = max(arr.size - 1, 1)
        out = np.zeros(order + 1, dtype=complex)
        n = min(arr.size, order + 1)
        out[:n] = arr[:n]
        return cls(out)

    @classmethod
    def zeros(cls, order=DEFAULT_ORDER):
        return cls(np.zeros(order + 1, dtype=complex))

    @property
    def order(self):
        return self.coeffs.size - 1

    def __getitem__(self, n):
        if n < 0:
            raise IndexError(n)
        return self.coeffs[n] if n <= self.order else 0j

    def __len__(self):
        return self.coeffs.size

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self.coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"TruncatedSeries(order={self.order}, [{head}{more}])"

    def truncate(self, order):
        if order > self.order:
            raise UsageError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def pad(self, order):
        """Extend with zero coefficients (only valid for polynomials)."""
        return TruncatedSeries.from_coeffs(self.coeffs, order)

    def allclose(self, other, atol=1e-12):
        other = other if isinstance(other, TruncatedSeries) else TruncatedSeries(other)
        n = min(self.order, other.order)
        return bool(np.max(np.abs(self.coeffs[: n + 1] - other.coeffs[: n + 1])) <= atol)

    def max_abs_diff(self, other):
        n = min(self.order, other.order)
        return float(np.max(np.abs(self.coeffs[: n + 1] - other.coeffs[: n + 1])))

    # arithmetic sugar; the module-level functions carry the contracts
    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c[0] += other
            return TruncatedSeries(c)
        return series_arith(self, other, "add")

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.coeffs * other)
        return series_arith(self, other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.coeffs / other)
        return self * reciprocal(other)

    def derivative(self):
        return series_arith(self, None, "derivative")

    def __call__(self, z):
        return evaluate(self, z)


@dataclass(frozen=True, eq=False)
class BivariateTruncated:
    """Coefficients ``d_pq`` of ``sum d_pq z^p zeta^q`` for ``p, q <= order``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coeffs, 2)
        if arr.shape[0] != arr.shape[1]:
            raise UsageError(f"bivariate coefficients must be square, got {arr.shape}")
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def is_symmetric(self, atol=0.0):
        return bool(np.max(np.abs(self.coeffs - self.coeffs.T), initial=0.0) <= atol)

    def __call__(self, z, zeta):
        n = np.arange(self.order + 1)
        return np.asarray(z) ** n @ self.coeffs @ np.asarray(zeta) ** n


def _check_same_order(a, b):
    if a.order != b.order:
        raise UsageError(f"series orders differ: {a.order} vs {b.order}")


def _mul(x, y, n):
    return np.convolve(x[: n + 1], y[: n + 1])[: n + 1]


def series_arith(a, b, which):
    """Add, multiply or differentiate truncated series.

    ``which`` is one of ``"add"``, ``"mul"``, ``"derivative"``.  Sums and
    products require equal orders and keep that order.  The derivative of an
    order-``N`` series is returned with order ``N - 1``: its ``z^N``
    coefficient would need ``c_{N+1}``.
    """
    if which == "derivative":
        if a.order < 2:
            raise UsageError("derivative needs order >= 2")
        n = np.arange(1, a.order + 1)
        return TruncatedSeries(n * a.coeffs[1:])
    if which not in ("add", "mul"):
        raise UsageError(f"unknown series operation {which!r}")
    _check_same_order(a, b)
    if which == "add":
        return TruncatedSeries(a.coeffs + b.coeffs)
    return TruncatedSeries(_mul(a.coeffs, b.coeffs, a.order))


def compose(outer, inner):
    """Taylor coefficients of ``outer(inner(z))``.

    ``inner`` must vanish at 0.  The result has order
    ``min(outer.order, inner.order)``.
    """
    if inner.coeffs[0] != 0:
        raise DomainError("compose: inner series must satisfy inner(0) = 0")
    n = min(outer.order, inner.order)
    g = inner.coeffs[: n + 1]
    acc = np.zeros(n + 1, dtype=complex)
    acc[0] = outer.coeffs[n]
    for j in range(n - 1, -1, -1):
        acc = _mul(acc, g, n)
        acc[0] += outer.coeffs[j]
    return TruncatedSeries(acc)


def _reciprocal_coeffs(a):
    n = a.size - 1
    r = np.zeros(n + 1, dtype=complex)
    r[0] = 1.0 / a[0]
    for m in range(1, n + 1):
        r[m] = -np.dot(a[1 : m + 1], r[m - 1 :: -1]) * r[0]
    return r


def reciprocal(a):
    if a.coeffs[0] == 0:
        raise DomainError("reciprocal: series must satisfy a(0) != 0")
    return TruncatedSeries(_reciprocal_coeffs(a.coeffs))


def _log_coeffs(a):
    # log a = integral of a'/a; the log(1+u) power sum cancels catastrophically
    n = a.size - 1
    da = np.arange(1, n + 1) * a[1:]
    q = _mul(da, _reciprocal_coeffs(a[:n]), n - 1)
    out = np.zeros(n + 1, dtype=complex)
    out[1:] = q / np.arange(1, n + 1)
    return out


def log(a, atol=1e-12):
    """Principal-branch logarithm of a series with ``a(0) = 1``."""
    if abs(a.coeffs[0] - 1) > atol:
        raise DomainError("log: series must satisfy a(0) = 1")
    return TruncatedSeries(_log_coeffs(a.coeffs))


def exp(s):
    """``exp`` of a series with ``s(0) = 0``."""
    if s.coeffs[0] != 0:
        raise DomainError("exp: series must satisfy s(0) = 0")
    n = s.order
    ds = np.arange(n + 1) * s.coeffs
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for m in range(1, n + 1):
        e[m] = np.dot(ds[1 : m + 1], e[m - 1 :: -1]) / m
    return TruncatedSeries(e)


def reciprocal_log(a, which):
    if which == "reciprocal":
        return reciprocal(a)
    if which == "log":
        return log(a)
    raise UsageError(f"unknown operation {which!r}")


def _check_normalized(f, what, atol=1e-12):
    if f.coeffs[0] != 0 or abs(f.coeffs[1] - 1) > atol:
        raise DomainError(f"{what}: series must satisfy f(0) = 0, f'(0) = 1")


def lagrange_invert(f):
    """Compositional inverse of a normalized series ``f = z + a_2 z^2 + ...``.

    Solves ``f(g(z)) = z`` order by order: the ``z^n`` coefficient of
    ``f(g)`` is ``b_n`` plus terms involving only ``b_2 .. b_{n-1}``.
    """
    _check_normalized(f, "lagrange_invert")
    n_max = f.order
    a = f.coeffs
    b = np.zeros(n_max + 1, dtype=complex)
    b[1] = 1.0
    for n in range(2, n_max + 1):
        g = b[: n + 1]
        acc = np.zeros(n + 1, dtype=complex)
        acc[0] = a[n]
        for j in range(n - 1, -1, -1):
            acc = _mul(acc, g, n)
            acc[0] += a[j]
        b[n] = -acc[n]
    return TruncatedSeries(b)


_HORNER_MAX = 256


def evaluate(f, z):
    """Evaluate the truncated polynomial at ``z`` (scalar or array).

    Horner for short series; long series use explicit powers in chunks, since
    ``np.polyval`` iterates over coefficients in Python.
    """
    if f.order <= _HORNER_MAX:
        return np.polyval(f.coeffs[::-1], z)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.empty(flat.size, dtype=complex)
    n = np.arange(f.order + 1)
    step = max(1, (1 << 22) // n.size)
    for i in range(0, flat.size, step):
        out[i : i + step] = (flat[i : i + step, None] ** n) @ f.coeffs
    return out.reshape(z.shape) if z.ndim else out[0]


def evaluate_on_circle(f, rho, m):
    """Values ``f(rho * exp(2 pi i j / m))`` for ``j = 0 .. m-1`` via one FFT.

    Coefficients beyond ``m`` are folded modulo ``m``, which is exact for
    equispaced samples, so arbitrarily long series are handled.
    """
    n = np.arange(f.order + 1)
    scaled = f.coeffs * rho**n
    idx = n % m
    bins = np.bincount(idx, scaled.real, m) + 1j * np.bincount(idx, scaled.imag, m)
    return m * np.fft.ifft(bins)


def divided_difference(f, order=None):
    """Kernel ``(f(z) - f(zeta)) / (z - zeta)`` as a bivariate series.

    ``d_pq = a_{p+q+1}``.  Entries with ``p + q + 1 > f.order`` are unknown, so
    the box order defaults to ``(f.order - 1) // 2``.
    """
    _check_normalized(f, "divided_difference")
    if order is None:
        order = (f.order - 1) // 2
    if 2 * order + 1 > f.order:
        raise UsageError(f"bivariate order {order} needs a series of order >= {2 * order + 1}")
    idx = np.add.outer(np.arange(order + 1), np.arange(order + 1)) + 1
    return BivariateTruncated(f.coeffs[idx])


def bivariate_log(d):
    """Logarithm of a bivariate series with ``d_00 = 1``, box-truncated.

    Writes ``D = sum_p D_p(zeta) z^p`` and uses ``z dL/dz = z D_z / D``, with
    ``1/D`` built by recursion in ``z`` over univariate ``zeta``-series.
    """
    c = d.coeffs
    n = d.order
    if abs(c[0, 0] - 1) > 1e-12:
        raise DomainError("bivariate_log: series must satisfy D(0, 0) = 1")
    e = np.zeros_like(c)
    e[0] = _reciprocal_coeffs(c[0])
    for p in range(1, n + 1):
        acc = np.zeros(n + 1, dtype=complex)
        for j in range(1, p + 1):
            acc += _mul(c[j], e[p - j], n)
        e[p] = -_mul(e[0], acc, n)
    out = np.zeros_like(c)
    out[0] = _log_coeffs(c[0])
    for p in range(1, n + 1):
        acc = np.zeros(n + 1, dtype=complex)
        for j in range(1, p + 1):
            acc += j * _mul(c[j], e[p - j], n)
        out[p] = acc / p
    return BivariateTruncated(out)


# catalog of closed-form series

def identity(order=DEFAULT_ORDER):
    return TruncatedSeries.from_coeffs([0, 1], order)


def koebe(order=DEFAULT_ORDER):
    """``z / (1 - z)^2``: coefficients ``a_n = n``."""
    return TruncatedSeries(np.arange(order + 1, dtype=complex))


def geometric(order=DEFAULT_ORDER, ratio=1.0):
    """``z / (1 - ratio z)``."""
    n = np.arange(order + 1)
    c = np.zeros(order + 1, dtype=complex)
    c[1:] = complex(ratio) ** (n[1:] - 1)
    return TruncatedSeries(c)


def mobius(a, b, c, d, order=DEFAULT_ORDER):
    """Taylor series of ``(a z + b) / (c z + d)`` at 0 (needs ``d != 0``)."""
    if d == 0:
        raise DomainError("mobius: pole at the origin")
    num = TruncatedSeries.from_coeffs([b, a], order)
    den = TruncatedSeries.from_coeffs([d, c], order)
    return num * reciprocal(den)


def read_series(path):
    """Read the text format: one ``"re im"`` line per coefficient, index 0 first."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 're im', got {line!r}")
        try:
            rows.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a pair of reals: {line!r}") from None
    return TruncatedSeries(rows)


def write_series(path, f):
    lines = [f"{float(c.real)!r} {float(c.imag)!r}" for c in f.coeffs]
    Path(path).write_text("\n".join(lines) + "\n")
