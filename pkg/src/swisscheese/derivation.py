"""The derivation ``D(f)(g) = int_T f'(z) g(z) dz`` and checks of the identities around it.

Every check returns a :class:`DerivationCheckRecord`; a record passes when its
defect is within its tolerance.  The identities are exact, so tolerances only
absorb quadrature error and are scaled by the magnitudes actually computed.

Contour conventions: ``gamma_1`` is the circle ``|w| = rho`` run
counter-clockwise, ``gamma_2`` is the union of the deleted circles run
clockwise.  With the unit circle ``T`` counter-clockwise, ``T + gamma_2`` is
the positively oriented boundary of the truncated X.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .geometry import SwissCheese, certified_bound
from .norms import sup_norm_T, sup_norm_X
from .quadrature import (
    DEFAULT_SPEC,
    ConvergenceError,
    QuadratureSpec,
    circle_integral,
    l1_norm_T,
    pairing_T,
    residue_oracle_T,
)
from .rational import RationalFunction, derivative, evaluate_offset, multiply

__all__ = [
    "DEFAULT_RHO",
    "D",
    "DerivationCheckRecord",
    "PreconditionError",
    "UnboundednessRow",
    "cauchy_deflection_check",
    "cauchy_split_check",
    "cyclicity_check",
    "fubini_check",
    "inputs_digest",
    "l1_unboundedness_demo",
    "leibniz_check",
    "monomial_checks",
    "morris_bound_check",
    "oracle_agreement_check",
    "restriction_bound_check",
]

DEFAULT_RHO = 1.25
CONTOUR_MARGIN = 1e-6
SPLIT_POINTS = 32


class PreconditionError(ValueError):
    pass


@dataclass
class DerivationCheckRecord:
    check_name: str
    lhs: Any
    rhs: Any
    defect: float
    tolerance: float
    passed: bool
    inputs_digest: str
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check_name,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "defect": self.defect,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "inputs": self.inputs_digest,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DerivationCheckRecord":
        return cls(
            d["check"], _unnum(d["lhs"]), _unnum(d["rhs"]), d["defect"],
            d["tolerance"], d["pass"], d["inputs"], d.get("detail", {}),
        )


def _num(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def _unnum(x):
    if isinstance(x, dict) and set(x) == {"re", "im"}:
        return complex(x["re"], x["im"])
    return x


def _record(name, lhs, rhs, defect, tol, digest, **detail) -> DerivationCheckRecord:
    defect = float(defect)
    tol = float(tol)
    return DerivationCheckRecord(name, lhs, rhs, defect, tol, defect <= tol, digest, detail)


def inputs_digest(*items) -> str:
    payload = []
    for it in items:
        if isinstance(it, RationalFunction):
            payload.append(it.to_dict())
        elif isinstance(it, complex):
            payload.append([it.real, it.imag])
        else:
            payload.append(it)
    raw = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()[:16]


def D(f: RationalFunction, g: RationalFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """``D(f)(g)``; raises :class:`ConvergenceError` if the quadrature stalls."""
    res = pairing_T(f, g, spec)
    if not res.converged:
        raise ConvergenceError("D(f)(g)", res)
    return complex(res.value)


def _is_constant(f: RationalFunction) -> bool:
    return not f.factors and len(f.num) <= 1


def oracle_agreement_check(f, g, spec=DEFAULT_SPEC, rtol=1e-9) -> DerivationCheckRecord:
    quad = pairing_T(f, g, spec)
    if not quad.converged:
        raise ConvergenceError("pairing_T", quad)
    exact = residue_oracle_T(f, g)
    defect = abs(quad.value - exact)
    return _record(
        "oracle", complex(quad.value), exact, defect, rtol * (1 + abs(exact)),
        inputs_digest(f, g), quadrature=quad.to_dict(),
    )


def cyclicity_check(f, g, spec=DEFAULT_SPEC, rtol=1e-9) -> DerivationCheckRecord:
    """``D(f)(g) + D(g)(f) = 0``; for constant ``g`` also ``D(f)(g) = 0``."""
    dfg = D(f, g, spec)
    dgf = D(g, f, spec)
    defect = abs(dfg + dgf)
    if _is_constant(g):
        defect = max(defect, abs(dfg))
    return _record(
        "cyclicity", dfg, -dgf, defect, rtol * (1 + abs(dfg)), inputs_digest(f, g),
        constant_g=_is_constant(g),
    )


def leibniz_check(f, g, h, spec=DEFAULT_SPEC, rtol=1e-8) -> DerivationCheckRecord:
    """``D(fg)(h) = D(f)(gh) + D(g)(fh)``."""
    t0 = D(multiply(f, g), h, spec)
    t1 = D(f, multiply(g, h), spec)
    t2 = D(g, multiply(f, h), spec)
    scale = max(abs(t0), abs(t1), abs(t2))
    return _record(
        "leibniz", t0, t1 + t2, abs(t0 - t1 - t2), rtol * (1 + scale),
        inputs_digest(f, g, h),
    )


def morris_bound_check(
    f, g, cheese: SwissCheese, spec=DEFAULT_SPEC, atol=1e-8
) -> DerivationCheckRecord:
    """``|D(f)(g)| <= 4 pi (sum r/s^2) |f|_X |g|_X``, plus the bound with constant C."""
    value = abs(D(f, g, spec))
    nf = sup_norm_X(f, cheese, spec)
    ng = sup_norm_X(g, cheese, spec)
    prod = nf.value * ng.value
    cert = certified_bound(cheese)
    bound = cert * prod
    detail = {
        "norm_f": nf.to_dict(),
        "norm_g": ng.to_dict(),
        "certified_bound": cert,
        "C": cheese.C,
    }
    if cert <= cheese.C:
        detail["constant_bound"] = cheese.C * prod
        detail["constant_bound_holds"] = bool(value <= cheese.C * prod + atol * (1 + prod))
    return _record(
        "morris", value, bound, max(0.0, value - bound), atol * (1 + prod),
        inputs_digest(f, g, cheese.digest()), **detail,
    )


def _check_contour_poles(f: RationalFunction, cheese: SwissCheese, rho: float) -> None:
    for p in f.poles:
        if abs(abs(p) - rho) <= CONTOUR_MARGIN or abs(abs(p) - 1) <= CONTOUR_MARGIN:
            raise PreconditionError(f"pole {p} within {CONTOUR_MARGIN:g} of a contour")
        host = None
        for d in cheese.discs:
            if abs(abs(p - d.center) - d.radius) <= CONTOUR_MARGIN:
                raise PreconditionError(f"pole {p} within {CONTOUR_MARGIN:g} of a deleted circle")
            if abs(p - d.center) < d.radius:
                host = d
        if host is None and abs(p) < rho:
            raise PreconditionError(f"pole {p} is neither in a deleted disc nor beyond |w|={rho}")


def _cauchy_kernel(f: RationalFunction, zs: np.ndarray):
    """``w -> f(w) / (w - z)^2`` for every ``z`` in ``zs`` (columns)."""
    def kernel(w: np.ndarray) -> np.ndarray:
        return f(w)[:, None] / (w[:, None] - zs[None, :]) ** 2

    return kernel


def _offset_kernel(f: RationalFunction, center: complex, zs: np.ndarray):
    """As :func:`_cauchy_kernel`, taking offsets from ``center``."""
    def kernel(off: np.ndarray) -> np.ndarray:
        w = center + off
        return evaluate_offset(f, center, off)[:, None] / (w[:, None] - zs[None, :]) ** 2

    return kernel


def _integrate(h, center, radius, orientation, spec, what, offset_form=False):
    res = circle_integral(h, center, radius, orientation, spec, offset_form=offset_form)
    if not res.converged:
        raise ConvergenceError(what, res)
    return res.value


def _h1(f, zs, rho, spec) -> np.ndarray:
    return _integrate(_cauchy_kernel(f, zs), 0j, rho, "ccw", spec, "h1") / (2j * np.pi)


def _h2(f, zs, cheese, spec) -> np.ndarray:
    total = np.zeros(len(zs), dtype=complex)
    for d in cheese.discs:
        total += _integrate(
            _offset_kernel(f, d.center, zs), d.center, d.radius, "cw", spec, "h2", True
        )
    return total / (2j * np.pi)


def cauchy_split_check(
    f, cheese: SwissCheese, rho: float = DEFAULT_RHO, spec=DEFAULT_SPEC, rtol=1e-8
) -> DerivationCheckRecord:
    """``f' = h_1 + h_2`` on 32 points of T, with ``h_j`` the Cauchy integrals of
    ``f(w) / (w - z)^2`` over ``gamma_j`` divided by ``2 pi i``."""
    if not rho > 1:
        raise ValueError("rho must exceed 1")
    _check_contour_poles(f, cheese, rho)
    zs = np.exp(2j * np.pi * np.arange(SPLIT_POINTS) / SPLIT_POINTS)
    fp = derivative(f)(zs)
    h1 = _h1(f, zs, rho, spec)
    h2 = _h2(f, zs, cheese, spec)
    defect = float(np.max(np.abs(fp - h1 - h2)))
    fmax = float(np.max(np.abs(fp)))
    return _record(
        "cauchy_split", fmax, float(np.max(np.abs(h1 + h2))), defect, rtol * (1 + fmax),
        inputs_digest(f, cheese.digest(), rho),
        h2_max=float(np.max(np.abs(h2))), h1_max=float(np.max(np.abs(h1))),
    )


def fubini_check(
    f, g, cheese: SwissCheese, rho: float = DEFAULT_RHO, spec=DEFAULT_SPEC, rtol=1e-8
) -> DerivationCheckRecord:
    """Both orders of the double integral
    ``(1/2 pi i) int_T int_{gamma_1} f(w) g(z) / (w - z)^2 dw dz``."""
    if not rho > 1:
        raise ValueError("rho must exceed 1")
    _check_contour_poles(f, cheese, rho)
    if any(abs(abs(p) - 1) <= CONTOUR_MARGIN for p in g.poles):
        raise PreconditionError("g has a pole on the unit circle")

    def outer_T(z: np.ndarray) -> np.ndarray:
        return _h1(f, z, rho, spec) * g(z)

    def outer_gamma1(w: np.ndarray) -> np.ndarray:
        inner = _integrate(_cauchy_kernel(g, w), 0j, 1.0, "ccw", spec, "inner T")
        return f(w) * inner / (2j * np.pi)

    A = _integrate(outer_T, 0j, 1.0, "ccw", spec, "fubini T-outer")
    B = _integrate(outer_gamma1, 0j, rho, "ccw", spec, "fubini gamma1-outer")
    return _record(
        "fubini", complex(A), complex(B), abs(A - B), rtol * (1 + abs(A)),
        inputs_digest(f, g, cheese.digest(), rho),
    )


def cauchy_deflection_check(
    g, w: complex, cheese: SwissCheese, spec=DEFAULT_SPEC, rtol=1e-9
) -> DerivationCheckRecord:
    """``int_T g(z)/(w - z)^2 dz + int_{gamma_2} g(z)/(w - z)^2 dz = 0`` for ``|w| > 1``."""
    w = complex(w)
    if not abs(w) > 1 + CONTOUR_MARGIN:
        raise PreconditionError(f"|w| must exceed 1, got {abs(w)}")
    for p in g.poles:
        if abs(p) <= 1 + CONTOUR_MARGIN:
            inside = [d for d in cheese.discs if abs(p - d.center) < d.radius - CONTOUR_MARGIN]
            if not inside:
                raise PreconditionError(f"pole {p} of g is not off X")

    def h(z: np.ndarray) -> np.ndarray:
        return g(z) / (w - z) ** 2

    lhs = complex(_integrate(h, 0j, 1.0, "ccw", spec, "deflection T"))
    gamma2 = 0j
    for d in cheese.discs:
        k = _offset_kernel(g, d.center, np.array([w]))
        gamma2 += complex(
            _integrate(lambda off: k(off)[:, 0], d.center, d.radius, "cw", spec,
                       "deflection disc", True)
        )
    return _record(
        "cauchy_deflection", lhs, -gamma2, abs(lhs + gamma2), rtol * (1 + abs(lhs)),
        inputs_digest(g, w, cheese.digest()),
    )


def restriction_bound_check(f, g, spec=DEFAULT_SPEC, rtol=1e-9) -> DerivationCheckRecord:
    """``|D(f)(g)| <= 2 pi |f'|_T |g|_T`` and ``<= 2 pi |f|_T |g'|_T``."""
    value = abs(D(f, g, spec))
    b1 = 2 * math.pi * sup_norm_T(derivative(f)).value * sup_norm_T(g).value
    b2 = 2 * math.pi * sup_norm_T(f).value * sup_norm_T(derivative(g)).value
    bound = min(b1, b2)
    return _record(
        "restriction", value, bound, max(0.0, value - b1, value - b2), rtol * (1 + bound),
        inputs_digest(f, g), bound_fprime_g=b1, bound_f_gprime=b2,
    )


def monomial_checks(n: int, spec=DEFAULT_SPEC) -> list[DerivationCheckRecord]:
    """``D(z^n)(z^-n) = 2 pi i n`` exactly, and equality in the first restriction bound."""
    f = RationalFunction.monomial(n)
    g = RationalFunction.monomial(-n)
    digest = inputs_digest(f, g)
    value = D(f, g, spec)
    exact = 2j * math.pi * n
    out = [
        _record("monomial_pairing", value, exact, abs(value - exact), 1e-10, digest,
                oracle=_num(residue_oracle_T(f, g)), n=n),
    ]
    b1 = 2 * math.pi * sup_norm_T(derivative(f)).value * sup_norm_T(g).value
    out.append(
        _record("monomial_equality", abs(value), b1, abs(b1 - abs(value)), 1e-9, digest, n=n)
    )
    return out


@dataclass
class UnboundednessRow:
    n: int
    sup_norm: float
    l1_norm: float
    ok: bool


def l1_unboundedness_demo(
    n_max: int, spec=DEFAULT_SPEC, cheese: SwissCheese | None = None
) -> list[UnboundednessRow]:
    """Rows ``(n, |z^n|_X, ||(z^n)'||_{L^1(T)})``: bounded sup norm, L1 norm ``2 pi n``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    cheese = cheese or SwissCheese(C=1.0)
    rows = []
    for n in range(1, n_max + 1):
        f = RationalFunction.monomial(n)
        sup = sup_norm_X(f, cheese, spec).value
        l1 = l1_norm_T(derivative(f), spec)
        ok = abs(l1 - 2 * math.pi * n) <= 1e-9 and abs(sup - 1) <= 1e-12
        rows.append(UnboundednessRow(n, sup, l1, ok))
    return rows
