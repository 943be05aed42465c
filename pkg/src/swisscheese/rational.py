"""Rational functions with factored denominators.

A :class:`RationalFunction` is ``p(z) / prod (z - a_j)^m_j``.  The poles are
carried as construction data, so deciding whether a function belongs to
``R_0(X)`` is a distance computation rather than a root-finding problem.
No common factors are ever cancelled; results are correct pointwise.

The ``poly_*`` helpers work on plain sequences of coefficients (ascending
degree) and only use ring operations, so they accept ``complex`` as well as
``mpmath.mpc`` entries.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .geometry import SwissCheese, distance_to_X

__all__ = [
    "GenerationError",
    "NO_POLES",
    "PoleEvaluationError",
    "Polynomial",
    "RationalFunction",
    "add",
    "derivative",
    "evaluate",
    "evaluate_offset",
    "multiply",
    "pole_clearance",
    "random_member",
    "scale",
]

POLE_GUARD = 1e-13
# Returned by pole_clearance for pole-free functions.
NO_POLES = sys.float_info.max

ArrayLike = Union[complex, np.ndarray]


class PoleEvaluationError(ZeroDivisionError):
    pass


class GenerationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# coefficient-list helpers


def poly_trim(c: Sequence) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return poly_trim(out)


def poly_mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_scale(a: Sequence, c) -> tuple:
    return poly_trim([x * c for x in a])


def poly_deriv(a: Sequence) -> tuple:
    return poly_trim([k * a[k] for k in range(1, len(a))])


def poly_from_roots(roots: Sequence, one=1) -> tuple:
    """Expand ``prod (z - r)`` over ``roots`` (with repetition)."""
    out: tuple = (one,)
    for r in roots:
        out = poly_mul(out, (-r, one))
    return out


def poly_eval(a: Sequence, z):
    """Horner evaluation; ``z`` may be a scalar or a numpy array."""
    acc = 0 * z
    for c in reversed(a):
        acc = acc * z + c
    return acc


# ---------------------------------------------------------------------------
# generic rational-function algebra on (numerator, factors) pairs
#
# factors is a tuple of (pole, multiplicity) with distinct poles.


def _expand(factors, one=1) -> tuple:
    return poly_from_roots([a for a, m in factors for _ in range(m)], one)


def _merge(f_factors, g_factors, combine) -> tuple:
    mults: dict = {}
    order = []
    for a, m in f_factors:
        mults[a] = m
        order.append(a)
    for a, m in g_factors:
        if a in mults:
            mults[a] = combine(mults[a], m)
        else:
            mults[a] = combine(0, m)
            order.append(a)
    return tuple((a, mults[a]) for a in order)


def raw_derivative(num, factors, one=1):
    """``(p/q)' = (p' L - p S) / prod (z-a)^(m+1)`` with ``L = prod (z-a)``,
    ``S = sum_j m_j prod_{k != j} (z - a_k)``."""
    if not factors:
        return poly_deriv(num), ()
    poles = [a for a, _ in factors]
    L = poly_from_roots(poles, one)
    S: tuple = ()
    for j, (_, m) in enumerate(factors):
        others = poly_from_roots(poles[:j] + poles[j + 1 :], one)
        S = poly_add(S, poly_scale(others, m))
    new_num = poly_add(poly_mul(poly_deriv(num), L), poly_scale(poly_mul(num, S), -1))
    if not new_num:
        return (), ()
    return new_num, tuple((a, m + 1) for a, m in factors)


def raw_multiply(f_num, f_factors, g_num, g_factors):
    num = poly_mul(f_num, g_num)
    if not num:
        return (), ()
    return num, _merge(f_factors, g_factors, lambda x, y: x + y)


def raw_add(f_num, f_factors, g_num, g_factors, one=1):
    common = _merge(f_factors, g_factors, max)
    fm = dict(f_factors)
    gm = dict(g_factors)
    f_fill = tuple((a, m - fm.get(a, 0)) for a, m in common if m > fm.get(a, 0))
    g_fill = tuple((a, m - gm.get(a, 0)) for a, m in common if m > gm.get(a, 0))
    num = poly_add(poly_mul(f_num, _expand(f_fill, one)), poly_mul(g_num, _expand(g_fill, one)))
    if not num:
        return (), ()
    return num, common


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    coefficients: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", poly_trim(complex(c) for c in self.coefficients)
        )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z: ArrayLike) -> ArrayLike:
        return poly_eval(self.coefficients, z)


@dataclass(frozen=True)
class RationalFunction:
    numerator: Polynomial
    factors: tuple[tuple[complex, int], ...] = ()

    def __post_init__(self) -> None:
        factors = tuple((complex(a), int(m)) for a, m in self.factors)
        poles = [a for a, _ in factors]
        if len(set(poles)) != len(poles):
            raise ValueError("poles must be pairwise distinct")
        if any(m < 1 for _, m in factors):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "factors", factors)

    # -- constructors --------------------------------------------------

    @classmethod
    def polynomial(cls, coefficients: Sequence[complex]) -> "RationalFunction":
        return cls(Polynomial(tuple(coefficients)))

    @classmethod
    def constant(cls, c: complex) -> "RationalFunction":
        return cls.polynomial([c])

    @classmethod
    def monomial(cls, n: int, c: complex = 1) -> "RationalFunction":
        """``c z^n`` for any integer ``n``; negative powers get a pole at 0."""
        if n >= 0:
            return cls.polynomial([0] * n + [c])
        return cls(Polynomial((c,)), ((0j, -n),))

    @classmethod
    def from_parts(cls, num: Sequence, factors: Sequence) -> "RationalFunction":
        return cls(Polynomial(tuple(complex(c) for c in num)), tuple(factors))

    # -- views ---------------------------------------------------------

    @property
    def num(self) -> tuple[complex, ...]:
        return self.numerator.coefficients

    @property
    def poles(self) -> list[complex]:
        return [a for a, _ in self.factors]

    @property
    def is_zero(self) -> bool:
        return not self.num

    def __call__(self, z: ArrayLike) -> ArrayLike:
        return evaluate(self, z)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return add(self, other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return multiply(self, other)

    def derivative(self) -> "RationalFunction":
        return derivative(self)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "num": [[c.real, c.imag] for c in self.num],
            "factors": [
                {"pole": [a.real, a.imag], "mult": m} for a, m in self.factors
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RationalFunction":
        num = tuple(complex(float(re), float(im)) for re, im in data.get("num", []))
        factors = tuple(
            (complex(float(f["pole"][0]), float(f["pole"][1])), int(f["mult"]))
            for f in data.get("factors", [])
        )
        return cls(Polynomial(num), factors)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RationalFunction":
        return cls.from_dict(json.loads(text))


def evaluate(f: RationalFunction, z: ArrayLike) -> ArrayLike:
    """``numerator(z) / prod (z - a)^m``; refuses points within 1e-13 of a pole."""
    scalar = np.isscalar(z)
    zz = np.asarray(z, dtype=complex)
    value = poly_eval(f.num, zz) if f.num else np.zeros_like(zz)
    for a, m in f.factors:
        d = zz - a
        if zz.size and np.min(np.abs(d)) <= POLE_GUARD:
            raise PoleEvaluationError(f"evaluation within {POLE_GUARD:g} of pole {a}")
        value = value / d**m
    return complex(value) if scalar else value


def evaluate_offset(f: RationalFunction, center: complex, offset: np.ndarray) -> np.ndarray:
    """``f(center + offset)`` with each factor formed as ``(center - a) + offset``.

    On a small circle around a nearby pole this keeps the distance to the pole
    accurate to full relative precision, which ``z - a`` would not.
    """
    offset = np.asarray(offset, dtype=complex)
    z = center + offset
    value = poly_eval(f.num, z) if f.num else np.zeros_like(z)
    for a, m in f.factors:
        d = (center - a) + offset
        if d.size and np.min(np.abs(d)) <= POLE_GUARD:
            raise PoleEvaluationError(f"evaluation within {POLE_GUARD:g} of pole {a}")
        value = value / d**m
    return value


def derivative(f: RationalFunction) -> RationalFunction:
    num, factors = raw_derivative(f.num, f.factors)
    return RationalFunction(Polynomial(num), factors)


def multiply(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    num, factors = raw_multiply(f.num, f.factors, g.num, g.factors)
    return RationalFunction(Polynomial(num), factors)


def add(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    num, factors = raw_add(f.num, f.factors, g.num, g.factors)
    return RationalFunction(Polynomial(num), factors)


def scale(f: RationalFunction, c: complex) -> RationalFunction:
    num = poly_scale(f.num, complex(c))
    if not num:
        return RationalFunction(Polynomial(()))
    return RationalFunction(Polynomial(num), f.factors)


def pole_clearance(f: RationalFunction, cheese: SwissCheese) -> float:
    """Smallest distance from a pole of ``f`` to X; ``NO_POLES`` if there are none."""
    if not f.factors:
        return NO_POLES
    return min(distance_to_X(a, cheese) for a in f.poles)


def random_member(
    cheese: SwissCheese,
    max_degree: int,
    max_poles: int,
    min_clearance: float,
    seed: int,
    *,
    inside_prob: float = 0.7,
    outside: tuple[float, float] | None = None,
    allow_outside: bool = True,
    inside_fraction: float = 0.5,
    double_prob: float = 0.25,
) -> RationalFunction:
    """Draw a random element of ``R_0(X)`` deterministically from ``seed``.

    Numerator coefficients are uniform in the unit box.  Each pole is placed
    with probability ``inside_prob`` inside a deleted disc (at most one pole per
    disc) and otherwise in the annulus ``outside = (lo, hi)`` around 0, whose
    default is ``(1 + min_clearance, 2.5)``.  With ``allow_outside=False`` every
    pole must find a free disc or :class:`GenerationError` is raised.

    Inside a disc of radius ``r`` the pole keeps distance at least
    ``min(min_clearance, inside_fraction * r)`` from the boundary: the deleted
    discs of a budgeted cheese are far smaller than typical clearances, and
    demanding the absolute clearance there would leave every disc empty.
    """
    rng = np.random.default_rng(seed)
    lo, hi = outside if outside is not None else (1.0 + min_clearance, 2.5)
    if lo <= 1.0 or hi < lo:
        raise ValueError(f"outside annulus must satisfy 1 < lo <= hi, got {(lo, hi)}")
    deg = int(rng.integers(0, max_degree + 1))
    coeffs = rng.uniform(-1, 1, deg + 1) + 1j * rng.uniform(-1, 1, deg + 1)
    if coeffs[-1] == 0:
        coeffs[-1] = 1.0
    npoles = int(rng.integers(0, max_poles + 1)) if max_poles > 0 else 0
    free = list(cheese.discs)
    factors: list[tuple[complex, int]] = []
    for _ in range(npoles):
        inside = free and (rng.random() < inside_prob or not allow_outside)
        if inside:
            disc = free.pop(int(rng.integers(0, len(free))))
            keep = min(min_clearance, inside_fraction * disc.radius)
            reach = disc.radius - keep
            u, t = rng.random(2)
            pole = disc.center + reach * np.sqrt(u) * np.exp(2j * np.pi * t)
        elif allow_outside:
            rad = rng.uniform(lo, hi)
            pole = rad * np.exp(2j * np.pi * rng.random())
        else:
            raise GenerationError("no deleted disc left for an inside pole and outside placement disabled")
        mult = 2 if rng.random() < double_prob else 1
        factors.append((complex(pole), mult))
    return RationalFunction(Polynomial(tuple(complex(c) for c in coeffs)), tuple(factors))
