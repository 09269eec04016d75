"""Polynomial coefficient functionals and the inverse-coefficient transform.

A functional is a sympy polynomial in formal coefficient symbols ``a2, a3,
...`` (coefficients of ``f``) or ``b2, b3, ...`` (coefficients of the
inverse map).  The coefficient map ``a -> b`` is an involution, so the same
machinery transforms in both directions.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy as sp

from .errors import DomainError, SingularityError, UsageError
from .experiments import ExperimentConfig, ExtremalParams, aw_sample_map, extremal_fk
from .series import TruncatedSeries, lagrange_invert

_SYMBOL = re.compile(r"^([ab])(\d+)$")


def coefficient_symbol(alphabet, n):
    return sp.Symbol(f"{alphabet}{n}")


def _other(alphabet):
    return "b" if alphabet == "a" else "a"


@dataclass(frozen=True)
class FunctionalSpec:
    """``J(x_{n1}, ..., x_{ns})`` as a polynomial in one coefficient alphabet."""

    poly: sp.Expr
    alphabet: str = "a"

    def __post_init__(self):
        if self.alphabet not in ("a", "b"):
            raise UsageError(f"alphabet must be 'a' or 'b', got {self.alphabet!r}")
        expr = sp.expand(sp.sympify(self.poly))
        object.__setattr__(self, "poly", expr)
        for s in expr.free_symbols:
            m = _SYMBOL.match(s.name)
            if not m or m.group(1) != self.alphabet or int(m.group(2)) < 2:
                raise UsageError(f"unexpected symbol {s} in a functional over {self.alphabet}2, {self.alphabet}3, ...")
        if not expr.is_polynomial(*self.symbols):
            raise UsageError("functional must be a polynomial")
        if all(sp.diff(expr, s) == 0 for s in self.symbols):
            raise UsageError("functional has identically zero gradient")

    @classmethod
    def parse(cls, text, alphabet="a"):
        """Read ``"re im : n1^p1 n2^p2 ..."`` monomial lines."""
        expr = sp.Integer(0)
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            head, sep, tail = line.partition(":")
            parts = head.split()
            if not sep or len(parts) != 2:
                raise UsageError(f"line {lineno}: expected 'coeff_re coeff_im : n^p ...', got {line!r}")
            term = sp.Rational(parts[0]) + sp.I * sp.Rational(parts[1])
            for factor in tail.split():
                n, _, p = factor.partition("^")
                try:
                    term *= coefficient_symbol(alphabet, int(n)) ** int(p or 1)
                except ValueError:
                    raise UsageError(f"line {lineno}: bad factor {factor!r}") from None
            expr += term
        return cls(expr, alphabet)

    @property
    def symbols(self):
        return sorted(self.poly.free_symbols, key=lambda s: int(s.name[1:]))

    @property
    def indices(self):
        return tuple(int(s.name[1:]) for s in self.symbols)

    @cached_property
    def _numeric(self):
        syms = self.symbols
        return syms, sp.lambdify(syms, self.poly, "numpy")

    def __call__(self, values):
        """Evaluate at ``{n: value}``."""
        syms, fn = self._numeric
        try:
            args = [values[int(s.name[1:])] for s in syms]
        except KeyError as exc:
            raise UsageError(f"no value for coefficient index {exc.args[0]}") from None
        return complex(fn(*args))

    def gradient(self):
        return {int(s.name[1:]): sp.diff(self.poly, s) for s in self.symbols}

    def __eq__(self, other):
        return (
            isinstance(other, FunctionalSpec)
            and self.alphabet == other.alphabet
            and sp.expand(self.poly - other.poly) == 0
        )

    def __hash__(self):
        return hash((self.alphabet, sp.srepr(self.poly)))


@dataclass(frozen=True)
class InversionTable:
    """Row ``n``: ``b_n`` of the inverse series as a polynomial in ``a_2 .. a_n``."""

    rows: dict = field(default_factory=dict)

    @property
    def order(self):
        return max(self.rows) if self.rows else 1


def inversion_polynomials(n):
    """Symbolic inverse coefficients by Lagrange inversion.

    ``b_m = (1/m) [w^(m-1)] (w / f(w))^m`` with symbolic ``a_j``.
    """
    if n < 2:
        raise UsageError("inversion table needs N >= 2")
    a = [sp.Integer(1)] + [coefficient_symbol("a", j) for j in range(2, n + 1)]
    # h = w / f(w) = 1 / (1 + a2 w + ... ), truncated at w^(n-1)
    h = [sp.Integer(1)] + [sp.Integer(0)] * (n - 1)
    for m in range(1, n):
        h[m] = sp.expand(-sum(a[j] * h[m - j] for j in range(1, m + 1)))

    def mul(x, y):
        return [sp.expand(sum(x[i] * y[m - i] for i in range(m + 1))) for m in range(n)]

    rows = {}
    power = h
    for m in range(2, n + 1):
        power = mul(power, h)
        rows[m] = sp.expand(power[m - 1] / m)
    return InversionTable(rows)


def _a_in_terms_of_b(table, upto):
    # row m reads b_m = -a_m + R_m(a_2..a_{m-1}); solve for a_m triangularly
    sol = {}
    for m in range(2, upto + 1):
        am, bm = coefficient_symbol("a", m), coefficient_symbol("b", m)
        rest = table.rows[m] + am
        sol[am] = sp.expand(rest.subs(sol, simultaneous=True) - bm)
    return sol


def transform_functional(j, table):
    """Rewrite ``J`` in the other coefficient alphabet.

    ``a``-functionals go to ``b`` by inverting the table rows triangularly;
    ``b``-functionals go to ``a`` by substituting the rows directly.
    """
    top = max(j.indices)
    if top > table.order:
        raise UsageError(f"functional uses index {top} beyond table order {table.order}")
    if j.alphabet == "a":
        sub = _a_in_terms_of_b(table, top)
    else:
        sub = {coefficient_symbol("b", m): table.rows[m] for m in range(2, top + 1)}
    return FunctionalSpec(sp.expand(j.poly.subs(sub, simultaneous=True)), _other(j.alphabet))


def monomial_kernel(n):
    """Default kernel ``z^(n+1)``."""
    c = np.zeros(n + 2, dtype=complex)
    c[n + 1] = 1.0
    return c


def phi0(jt, at, kernel=monomial_kernel):
    """``sum_l (dJ~/db_{n_l} at the assignment) * kernel_{n_l}(z)`` as a polynomial series."""
    grads = jt.gradient()
    syms = jt.symbols
    values = {}
    for s in syms:
        n = int(s.name[1:])
        if n in at:
            values[s] = at[n]
        elif s in at:
            values[s] = at[s]
        else:
            raise UsageError(f"assignment is missing {s}")
    parts = [(n, complex(sp.N(g.subs(values)))) for n, g in grads.items()]
    kernels = {n: np.asarray(kernel(n), dtype=complex) for n, _ in parts}
    order = max(max(k.size for k in kernels.values()) - 1, 1)
    out = np.zeros(order + 1, dtype=complex)
    for n, lam in parts:
        out[: kernels[n].size] += lam * kernels[n]
    if not np.any(out):
        warnings.warn("phi0 vanishes identically: zero gradient at this assignment", RuntimeWarning, stacklevel=2)
    return TruncatedSeries(out)


def extremal_mu(phi, k, z):
    """``k |phi(z)| / phi(z)`` on ``|z| > 1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) <= 1):
        raise DomainError("extremal_mu is defined on |z| > 1 only")
    vals = phi(z)
    if np.any(vals == 0):
        point = complex(np.ravel(z)[np.argmax(np.ravel(vals) == 0)])
        raise SingularityError(f"phi0 vanishes at {point}: mu undefined", point=point)
    return k * np.abs(vals) / vals


def evaluate_functional(j, f):
    """Evaluate ``J`` at the Taylor coefficients of ``f`` (whatever the alphabet)."""
    top = max(j.indices)
    if f.order < top:
        raise UsageError(f"series order {f.order} below functional index {top}")
    return j({n: f.coeffs[n] for n in j.indices})


def _radical_inverse(i, base):
    out, denom = 0.0, 1.0
    while i:
        i, r = divmod(i, base)
        denom *= base
        out += r / denom
    return out


def parametric_search(j, k, budget, seed, cfg=ExperimentConfig()):
    """Lower bound for ``max |J|`` over maps with k-quasiconformal extension.

    Candidates are the extremal family ``f_{k', t}`` (``k' <= k``) and
    Ahlfors-Weill samples at level ``2k``.  Evaluation ``i`` depends only on
    evaluations ``< i``, so a larger budget never lowers the result.
    """
    if budget <= 0:
        raise UsageError("budget must be positive")
    if not 0 <= k < 1:
        raise UsageError(f"k must lie in [0, 1), got {k}")
    order = max(j.indices) + 1
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EA7C4]))
    trace = []
    best = (-1.0, None)

    def family(kk, theta):
        kk = min(max(kk, 0.0), k)
        f = extremal_fk(ExtremalParams(kk, complex(np.exp(1j * theta))), order)
        return abs(evaluate_functional(j, f)), {"source": "fk", "k": kk, "theta": theta % (2 * math.pi)}

    step_k, step_t = k / 4, math.pi / 4
    aw_index = 0
    for i in range(budget):
        if i == 0:
            value, params = family(k, 0.0)
        elif i % 8 == 7:
            _, w = aw_sample_map(k, seed, aw_index, cfg)
            aw_index += 1
            value, params = abs(evaluate_functional(j, w)), {"source": "aw", "sample": aw_index - 1}
        elif i % 4 == 3 and best[1] is not None and best[1]["source"] == "fk":
            b = best[1]
            value, params = family(b["k"] + step_k * rng.uniform(-1, 1), b["theta"] + step_t * rng.uniform(-1, 1))
            step_k, step_t = step_k * 0.8, step_t * 0.8
        else:
            value, params = family(k * _radical_inverse(i, 2), 2 * math.pi * _radical_inverse(i, 3))
        trace.append({"step": i, "value": value, **params})
        if value > best[0]:
            best = (value, params)
    return {"best_value": best[0], "argmax_params": best[1], "trace": trace}


def extremal_scaffold(j, k, budget, seed, samples=8, cfg=ExperimentConfig()):
    """One pass of the extremal-data pipeline; no fixed-point iteration is attempted.

    Searches for a good candidate, transforms ``J`` to ``J~``, evaluates the
    partials of ``J~`` at the candidate's inverse coefficients and returns
    ``phi0`` together with ``mu_k`` sampled on ``|z| = 2``.
    """
    search = parametric_search(j, k, budget, seed, cfg)
    top = max(j.indices)
    jt = transform_functional(j, inversion_polynomials(max(top, 2)))
    p = search["argmax_params"]
    if p["source"] == "fk":
        f = extremal_fk(ExtremalParams(p["k"], complex(np.exp(1j * p["theta"]))), max(top, 2) + 1)
    else:
        _, f = aw_sample_map(k, seed, p["sample"], cfg)
    g = lagrange_invert(f)
    at = {n: g.coeffs[n] for n in jt.indices}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        phi = phi0(jt, at)
    z = 2 * np.exp(2j * np.pi * np.arange(samples) / samples)
    try:
        mu = extremal_mu(phi, k, z).tolist()
    except SingularityError:
        mu = None
    return {
        "functional": str(j.poly),
        "transformed": str(jt.poly),
        "search": {"best_value": search["best_value"], "argmax_params": search["argmax_params"]},
        "partials_at": {str(n): complex(v) for n, v in at.items()},
        "phi0": phi.coeffs.tolist(),
        "mu_samples": {"z": z.tolist(), "mu": mu},
        "converged": None,
    }
