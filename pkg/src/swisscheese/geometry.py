"""Swiss cheese sets: the closed unit disc with finitely many disjoint open discs removed.

Discs are grouped by annulus index ``n``.  Annulus ``n`` may only hold discs
inside the closed disc of radius ``R_n = (n - 1) / n`` and the radii placed
there must sum to less than ``C (1 - R_n)^2 / (2^(n+3) pi)``.  Under that
budget the quantity ``4 pi sum r / s^2`` (``s`` being the distance of a disc
to the unit circle) never exceeds ``C / 2``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

__all__ = [
    "AnnulusRecord",
    "ConstructionError",
    "Disc",
    "SwissCheese",
    "annulus_budget",
    "annulus_radius",
    "budget_certificate",
    "certified_bound",
    "distance_to_X",
    "generate_cheese",
    "in_X",
    "lemma21_sum",
    "validate",
]

# Retry policy for disc placement.
MAX_RESAMPLES = 64
MAX_HALVINGS = 8
BUDGET_SAFETY = 0.9

# Rational upper bound for pi used by the exact certificate (355/113 > pi).
_PI_UPPER = Fraction(355, 113)


class ConstructionError(RuntimeError):
    """Disc placement failed for an annulus."""

    def __init__(self, annulus: int, message: str) -> None:
        super().__init__(f"annulus {annulus}: {message}")
        self.annulus = annulus


@dataclass(frozen=True)
class Disc:
    """An open disc removed from the closed unit disc."""

    center: complex
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError(f"disc radius must be positive, got {self.radius!r}")

    @property
    def gap_to_circle(self) -> float:
        """Distance from the disc to the unit circle, ``1 - (|c| + r)``."""
        return 1.0 - (abs(self.center) + self.radius)

    def contains(self, p: complex) -> bool:
        return abs(p - self.center) < self.radius


@dataclass(frozen=True)
class AnnulusRecord:
    n: int
    R_n: float
    budget: float
    discs: tuple[Disc, ...] = ()

    @property
    def radius_sum(self) -> float:
        return math.fsum(d.radius for d in self.discs)


@dataclass(frozen=True)
class SwissCheese:
    C: float
    annuli: tuple[AnnulusRecord, ...] = field(default_factory=tuple)
    seed: int = 0

    @property
    def discs(self) -> list[Disc]:
        """All deleted discs in annulus order; list position is the disc index."""
        return [d for a in self.annuli for d in a.discs]

    def iter_indexed(self) -> Iterator[tuple[int, AnnulusRecord, Disc]]:
        i = 0
        for a in self.annuli:
            for d in a.discs:
                yield i, a, d
                i += 1

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "seed": self.seed,
            "annuli": [
                {
                    "n": a.n,
                    "R_n": a.R_n,
                    "budget": a.budget,
                    "discs": [
                        {"re": d.center.real, "im": d.center.imag, "r": d.radius}
                        for d in a.discs
                    ],
                }
                for a in self.annuli
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SwissCheese":
        annuli = tuple(
            AnnulusRecord(
                n=int(a["n"]),
                R_n=float(a["R_n"]),
                budget=float(a["budget"]),
                discs=tuple(
                    Disc(complex(float(d["re"]), float(d["im"])), float(d["r"]))
                    for d in a["discs"]
                ),
            )
            for a in data["annuli"]
        )
        return cls(C=float(data["C"]), annuli=annuli, seed=int(data["seed"]))

    def to_json(self) -> str:
        # repr-based float output is the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SwissCheese":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def annulus_radius(n: int) -> float:
    return (n - 1) / n


def annulus_budget(C: float, n: int) -> float:
    """Radius budget ``C (1 - R_n)^2 / (2^(n+3) pi)`` for annulus ``n``."""
    if not C > 0:
        raise ValueError(f"C must be positive, got {C!r}")
    if int(n) != n or n < 1:
        raise ValueError(f"annulus index must be a positive integer, got {n!r}")
    gap = 1.0 - annulus_radius(n)
    return C * gap * gap / (2.0 ** (n + 3) * math.pi)


def _disjoint(center: complex, radius: float, placed: list[Disc]) -> bool:
    return all(abs(center - d.center) > radius + d.radius for d in placed)


def generate_cheese(
    C: float, annuli_count: int, discs_per_annulus: int, seed: int
) -> SwissCheese:
    """Build a truncated Swiss cheese by seeded rejection sampling.

    Annulus 1 is degenerate (``R_1 = 0``) and is always emitted empty.  For
    ``n >= 2`` each disc gets radius ``0.9 * budget / discs_per_annulus``;
    a center is drawn uniformly from ``Delta(0, R_n - rho)`` and redrawn up
    to 64 times when it collides with an earlier disc, after which ``rho`` is
    halved (at most 8 times) for the rest of the annulus.
    """
    if annuli_count < 1:
        raise ValueError("annuli_count must be >= 1")
    if discs_per_annulus < 1:
        raise ValueError("discs_per_annulus must be >= 1")
    rng = np.random.default_rng(seed)
    placed: list[Disc] = []
    annuli = []
    for n in range(1, annuli_count + 1):
        R_n = annulus_radius(n)
        budget = annulus_budget(C, n)
        discs: list[Disc] = []
        if n >= 2:
            rho = BUDGET_SAFETY * budget / discs_per_annulus
            for _ in range(discs_per_annulus):
                disc = _place_disc(rng, R_n, rho, placed, n)
                rho = disc.radius
                discs.append(disc)
                placed.append(disc)
        annuli.append(AnnulusRecord(n=n, R_n=R_n, budget=budget, discs=tuple(discs)))
    return SwissCheese(C=float(C), annuli=tuple(annuli), seed=int(seed))


def _place_disc(
    rng: np.random.Generator, R_n: float, rho: float, placed: list[Disc], n: int
) -> Disc:
    for _ in range(MAX_HALVINGS + 1):
        reach = R_n - rho
        if reach > 0:
            for _ in range(MAX_RESAMPLES):
                u, t = rng.random(2)
                center = complex(
                    reach * math.sqrt(u) * math.cos(2 * math.pi * t),
                    reach * math.sqrt(u) * math.sin(2 * math.pi * t),
                )
                if _disjoint(center, rho, placed):
                    return Disc(center, rho)
        rho /= 2
    raise ConstructionError(n, f"no disjoint placement after {MAX_HALVINGS} halvings")


def lemma21_sum(cheese: SwissCheese) -> float:
    """Sum of ``r / s^2`` over all deleted discs."""
    return math.fsum(d.radius / d.gap_to_circle**2 for d in cheese.discs)


def certified_bound(cheese: SwissCheese) -> float:
    """The constant ``4 pi sum r / s^2`` bounding ``|int_T f' g dz| / (|f|_X |g|_X)``."""
    return 4 * math.pi * lemma21_sum(cheese)


def _sqrt_upper(q: Fraction, bits: int = 80) -> Fraction:
    """A rational upper bound for sqrt(q), accurate to about 2^-bits."""
    scale = 1 << bits
    n = q.numerator * scale * scale
    root = math.isqrt(n // q.denominator + 1) + 1
    return Fraction(root, scale)


def budget_certificate(cheese: SwissCheese) -> bool:
    """Exact check that ``4 pi sum r / s^2 <= C / 2``.

    Works in rationals: each float is exact as a Fraction, ``|c|`` is bounded
    above by a rational square root and ``pi`` by 355/113, so a True result
    is a proof for the floats actually stored.
    """
    total = Fraction(0)
    for d in cheese.discs:
        c2 = Fraction(d.center.real) ** 2 + Fraction(d.center.imag) ** 2
        r = Fraction(d.radius)
        s_lower = 1 - (_sqrt_upper(c2) + r)
        if s_lower <= 0:
            return False
        total += r / (s_lower * s_lower)
    return 8 * _PI_UPPER * total <= Fraction(cheese.C)


def in_X(p: complex, cheese: SwissCheese) -> bool:
    if abs(p) > 1:
        return False
    return not any(d.contains(p) for d in cheese.discs)


def distance_to_X(p: complex, cheese: SwissCheese) -> float:
    """Exact distance from ``p`` to X (valid for disjoint discs)."""
    p = complex(p)
    if abs(p) > 1:
        return abs(p) - 1.0
    for d in cheese.discs:
        dist = abs(p - d.center)
        if dist < d.radius:
            return d.radius - dist
    return 0.0


def validate(cheese: SwissCheese) -> list[str]:
    """Return one description per violated invariant; empty means valid.

    Each entry starts with the invariant's kind (``radius``, ``containment``,
    ``circle``, ``annulus-radius``, ``annulus``, ``budget``, ``budget-sum``,
    ``disjoint``, ``C``) followed by a colon.
    """
    out: list[str] = []
    if not cheese.C > 0:
        out.append(f"C: constant must be positive, got {cheese.C!r}")
    for a in cheese.annuli:
        if a.R_n != annulus_radius(a.n):
            out.append(f"annulus-radius: annulus {a.n} has R_n={a.R_n!r}, expected (n-1)/n")
        if cheese.C > 0 and a.budget != annulus_budget(cheese.C, a.n):
            out.append(f"budget: annulus {a.n} budget {a.budget!r} != C(1-R_n)^2/(2^(n+3)pi)")
        if a.discs and not a.radius_sum < a.budget:
            out.append(
                f"budget-sum: annulus {a.n} radius sum {a.radius_sum!r} >= budget {a.budget!r}"
            )
    indexed = list(cheese.iter_indexed())
    for i, a, d in indexed:
        if not d.radius > 0:
            out.append(f"radius: disc {i} has non-positive radius {d.radius!r}")
        if not abs(d.center) + d.radius < 1:
            out.append(f"containment: disc {i} closure not inside the open unit disc")
        # T misses the closed disc iff the nearest point of T is farther than r
        if not 1 - abs(d.center) > d.radius:
            out.append(f"circle: disc {i} meets the unit circle")
        if abs(d.center) + d.radius > a.R_n:
            out.append(f"annulus: disc {i} leaves the closed disc of radius R_{a.n}={a.R_n}")
    for k, (i, _, di) in enumerate(indexed):
        for j, _, dj in indexed[k + 1 :]:
            if not abs(di.center - dj.center) > di.radius + dj.radius:
                out.append(f"disjoint: discs {i} and {j} have intersecting closures")
    return out
