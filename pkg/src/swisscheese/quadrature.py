"""Contour integrals over circles, and a residue-calculus oracle.

The engine is the trapezoid rule in the angle, which converges geometrically
for integrands analytic near the circle.  Node counts double (reusing the
previous nodes) until two consecutive refinements agree.

:func:`residue_oracle_T` computes the same integrals over the unit circle with
no quadrature at all: Laurent coefficients at each pole inside the disc are
extracted from the factored representation by polynomial division, in
extended precision so that clusters of nearby poles do not cancel away the
answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .rational import RationalFunction, derivative, raw_derivative, raw_multiply

__all__ = [
    "ConvergenceError",
    "DEFAULT_SPEC",
    "IntegralResult",
    "OracleInapplicableError",
    "QuadratureSpec",
    "circle_integral",
    "l1_norm_T",
    "pairing_T",
    "periodic_integral",
    "residue_oracle_T",
]

# Successive refinements closer than this multiple of eps * (integrand L1 mass)
# differ only by rounding.
ROUNDOFF_FACTOR = 256
ORACLE_DPS = 50
ORACLE_MIN_CLEARANCE = 1e-9


@dataclass(frozen=True)
class QuadratureSpec:
    initial_nodes: int = 16
    max_doublings: int = 12
    rel_tolerance: float = 1e-13

    def __post_init__(self) -> None:
        n = self.initial_nodes
        if n < 16 or n & (n - 1):
            raise ValueError(f"initial_nodes must be a power of two >= 16, got {n}")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be positive")
        if not self.rel_tolerance >= 1e-14:
            raise ValueError("rel_tolerance must be >= 1e-14")


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class IntegralResult:
    value: complex
    nodes_used: int
    est_error: float
    converged: bool

    def to_dict(self) -> dict:
        v = complex(self.value)
        return {
            "re": v.real,
            "im": v.imag,
            "nodes": self.nodes_used,
            "err": self.est_error,
            "converged": self.converged,
        }


class ConvergenceError(RuntimeError):
    def __init__(self, what: str, result: IntegralResult) -> None:
        super().__init__(
            f"{what}: no convergence after {result.nodes_used} nodes "
            f"(est. error {result.est_error:.3e})"
        )
        self.result = result


class OracleInapplicableError(ValueError):
    pass


def periodic_integral(
    fun: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec = DEFAULT_SPEC
) -> IntegralResult:
    """Integrate ``fun(theta)`` over ``[0, 2 pi)`` by the doubling trapezoid rule.

    ``fun`` receives an array of angles and returns values of shape ``(N,)``
    or ``(N, K)``; in the second case all ``K`` columns are integrated at once
    and ``value`` is an array.  Convergence requires two consecutive doublings
    whose change is within ``rel_tolerance * (1 + |value|)`` or within the
    rounding floor of the integrand.
    """
    n = spec.initial_nodes
    vals = np.asarray(fun(2 * np.pi * np.arange(n) / n))
    total = vals.sum(axis=0)
    mass = np.abs(vals).sum(axis=0)
    est = 2 * np.pi * total / n
    eps = np.finfo(float).eps
    passes = 0
    err = math.inf
    for _ in range(spec.max_doublings):
        new = np.asarray(fun(2 * np.pi * (np.arange(n) + 0.5) / n))
        total = total + new.sum(axis=0)
        mass = mass + np.abs(new).sum(axis=0)
        n *= 2
        prev, est = est, 2 * np.pi * total / n
        diff = np.abs(est - prev)
        floor = ROUNDOFF_FACTOR * eps * 2 * np.pi * mass / n
        tol = np.maximum(spec.rel_tolerance * (1 + np.abs(est)), floor)
        err = float(np.max(diff))
        if np.all(diff <= tol):
            passes += 1
            if passes >= 2:
                return IntegralResult(_unwrap(est), n, err, True)
        else:
            passes = 0
    return IntegralResult(_unwrap(est), n, err, False)


def _unwrap(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def circle_integral(
    h: Callable[[np.ndarray], np.ndarray],
    center: complex,
    radius: float,
    orientation: str = "ccw",
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    offset_form: bool = False,
) -> IntegralResult:
    """``oint h(z) dz`` over the circle ``|z - center| = radius``.

    ``h`` must be vectorized; a 2-D return ``(N, K)`` integrates ``K``
    functions on the same nodes.  ``orientation="cw"`` negates the result.
    With ``offset_form=True`` ``h`` receives ``z - center`` instead of ``z``.
    """
    if orientation not in ("ccw", "cw"):
        raise ValueError(f"orientation must be 'ccw' or 'cw', got {orientation!r}")

    def integrand(theta: np.ndarray) -> np.ndarray:
        e = np.exp(1j * theta)
        pts = radius * e if offset_form else center + radius * e
        vals = np.asarray(h(pts), dtype=complex)
        dz = 1j * radius * e
        return vals * (dz if vals.ndim == 1 else dz[:, None])

    res = periodic_integral(integrand, spec)
    if orientation == "cw":
        res.value = -res.value
    return res


def pairing_T(
    f: RationalFunction, g: RationalFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> IntegralResult:
    """``int_T f'(z) g(z) dz``, counter-clockwise."""
    df = derivative(f)
    if df.is_zero or g.is_zero:
        return IntegralResult(0j, 0, 0.0, True)
    return circle_integral(lambda z: df(z) * g(z), 0j, 1.0, "ccw", spec)


def l1_norm_T(f: RationalFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int_0^{2 pi} |f(e^{i theta})| d theta``."""
    res = periodic_integral(lambda t: np.abs(f(np.exp(1j * t))).astype(complex), spec)
    if not res.converged:
        raise ConvergenceError("l1_norm_T", res)
    return float(res.value.real)


# ---------------------------------------------------------------------------
# residue oracle


def _taylor_at(poly: list, a, order: int) -> list:
    """First ``order`` Taylor coefficients of ``poly`` at ``a`` by repeated
    synthetic division by ``(z - a)``."""
    out = []
    cur = list(poly)
    for _ in range(order):
        if not cur:
            out.append(mpmath.mpc(0))
            continue
        quotient = [mpmath.mpc(0)] * (len(cur) - 1)
        acc = mpmath.mpc(0)
        for k in range(len(cur) - 1, -1, -1):
            acc = acc * a + cur[k]
            if k > 0:
                quotient[k - 1] = acc
        out.append(acc)
        cur = quotient
    return out


def _local_denominator(factors, a, order: int) -> list:
    """Taylor coefficients at ``a`` of the product of the factors not at ``a``."""
    series = [mpmath.mpc(1)] + [mpmath.mpc(0)] * (order - 1)
    for b, m in factors:
        if b == a:
            continue
        d = a - b
        for _ in range(m):
            # multiply by (d + t), truncated
            series = [d * series[0]] + [
                d * series[k] + series[k - 1] for k in range(1, order)
            ]
    return series


def _residue(num: list, factors, a, m: int):
    top = _taylor_at(num, a, m)
    den = _local_denominator(factors, a, m)
    phi = []
    for k in range(m):
        acc = top[k]
        for j in range(1, k + 1):
            acc -= den[j] * phi[k - j]
        phi.append(acc / den[0])
    return phi[m - 1]


def residue_oracle_T(f: RationalFunction, g: RationalFunction) -> complex:
    """``2 pi i`` times the residues of ``f' g`` inside the unit disc."""
    with mpmath.workdps(ORACLE_DPS):
        one = mpmath.mpc(1)
        fn = [mpmath.mpc(c.real, c.imag) for c in f.num]
        ff = [(mpmath.mpc(a.real, a.imag), m) for a, m in f.factors]
        gn = [mpmath.mpc(c.real, c.imag) for c in g.num]
        gf = [(mpmath.mpc(a.real, a.imag), m) for a, m in g.factors]
        dn, df = raw_derivative(fn, ff, one)
        num, factors = raw_multiply(dn, df, gn, gf)
        for a, _ in factors:
            if abs(1 - abs(a)) <= ORACLE_MIN_CLEARANCE:
                raise OracleInapplicableError(f"pole {complex(a)} lies on the unit circle")
        total = mpmath.mpc(0)
        for a, m in factors:
            if abs(a) < 1:
                total += _residue(list(num), factors, a, m)
        value = 2j * mpmath.pi * total
        return complex(value)
