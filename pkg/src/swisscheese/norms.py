"""Sup norms on the unit circle and on a Swiss cheese.

Every function handled here is analytic on a neighbourhood of the (truncated)
set, so by the maximum principle its modulus peaks on the boundary: the unit
circle together with the deleted circles.  Each circle is sampled on nested
equispaced grids; the best few sampled peaks are then sharpened by a golden
section search inside their grid cell.  The estimate can only err low.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SwissCheese
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .rational import RationalFunction, evaluate_offset, poly_eval

__all__ = ["NormEstimate", "sup_norm_T", "sup_norm_X", "sup_norm_circles"]

REL_STABLE = 1e-10
START_SAMPLES = 64
MAX_SAMPLES = 1 << 16
PEAKS_PER_CIRCLE = 3
GOLDEN_STEPS = 48
_INVPHI = (math.sqrt(5) - 1) / 2


@dataclass
class NormEstimate:
    value: float
    arg_max: complex
    samples: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [self.arg_max.real, self.arg_max.imag],
            "samples": self.samples,
            "converged": self.converged,
        }


def _golden_max(fun, lo: np.ndarray, hi: np.ndarray, steps: int):
    """Vectorized golden-section maximization of ``fun`` on ``[lo, hi]``."""
    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(steps):
        left = fc > fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        x = np.where(left, b - _INVPHI * (b - a), a + _INVPHI * (b - a))
        fx = fun(x)
        c = np.where(left, x, keep)
        fc = np.where(left, fx, fkeep)
        d = np.where(left, keep, x)
        fd = np.where(left, fkeep, fx)
    best_left = fc > fd
    return np.where(best_left, c, d), np.where(best_left, fc, fd)


def _eval_local(f: RationalFunction, centers: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """``f(centers + offsets)`` elementwise, pole factors formed from the offsets."""
    value = poly_eval(f.num, centers + offsets) if f.num else np.zeros_like(offsets)
    for a, m in f.factors:
        value = value / ((centers - a) + offsets) ** m
    return value


def _local_peaks(vals: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest discrete local maxima of a periodic sample."""
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    idx = np.flatnonzero(is_peak)
    if idx.size == 0:
        idx = np.array([int(np.argmax(vals))])
    order = np.argsort(-vals[idx], kind="stable")
    return idx[order[:k]]


def sup_norm_circles(
    f: RationalFunction, circles: list[tuple[complex, float]]
) -> tuple[NormEstimate, list[NormEstimate]]:
    """Estimate ``max |f|`` over a union of circles.

    Returns the overall estimate and the per-circle estimates.  Circles
    refine independently; each stops once its value changes by at most
    ``1e-10`` relative between consecutive grid doublings.
    """
    m = len(circles)
    centers = np.array([c for c, _ in circles], dtype=complex)
    radii = np.array([r for _, r in circles], dtype=float)
    best = np.zeros(m)
    best_theta = np.zeros(m)
    samples = np.zeros(m, dtype=int)
    done = np.zeros(m, dtype=bool)
    level_prev = np.full(m, np.nan)
    n = START_SAMPLES

    while True:
        active = np.flatnonzero(~done)
        if active.size == 0 or n > MAX_SAMPLES:
            break
        theta = 2 * np.pi * np.arange(n) / n
        vals = np.vstack(
            [np.abs(evaluate_offset(f, centers[ci], radii[ci] * np.exp(1j * theta)))
             for ci in active]
        )
        samples[active] += n
        owners, lo, hi = [], [], []
        h = 2 * np.pi / n
        for row, ci in enumerate(active):
            j = int(np.argmax(vals[row]))
            if vals[row, j] > best[ci]:
                best[ci], best_theta[ci] = vals[row, j], theta[j]
            for p in _local_peaks(vals[row], PEAKS_PER_CIRCLE):
                owners.append(ci)
                lo.append(theta[p] - h)
                hi.append(theta[p] + h)
        owners_arr = np.array(owners)

        def modulus(t: np.ndarray) -> np.ndarray:
            return np.abs(_eval_local(f, centers[owners_arr], radii[owners_arr] * np.exp(1j * t)))

        t_star, v_star = _golden_max(modulus, np.array(lo), np.array(hi), GOLDEN_STEPS)
        np.add.at(samples, owners_arr, 2 * GOLDEN_STEPS + 2)
        for ci, t, v in zip(owners_arr, t_star, v_star):
            if v > best[ci]:
                best[ci], best_theta[ci] = v, t
        for ci in active:
            prev = level_prev[ci]
            if not np.isnan(prev) and best[ci] - prev <= REL_STABLE * max(best[ci], 1e-300):
                done[ci] = True
            level_prev[ci] = best[ci]
        n *= 2

    per = [
        NormEstimate(
            float(best[i]),
            complex(centers[i] + radii[i] * np.exp(1j * best_theta[i])),
            int(samples[i]),
            bool(done[i]),
        )
        for i in range(m)
    ]
    top = max(range(m), key=lambda i: best[i])
    overall = NormEstimate(
        per[top].value, per[top].arg_max, int(samples.sum()), all(p.converged for p in per)
    )
    return overall, per


def sup_norm_T(f: RationalFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> NormEstimate:
    """``|f|_T``; ``f`` must have no pole on the unit circle."""
    if f.is_zero:
        return NormEstimate(0.0, 1 + 0j, 0, True)
    return sup_norm_circles(f, [(0j, 1.0)])[0]


def sup_norm_X(
    f: RationalFunction, cheese: SwissCheese, spec: QuadratureSpec = DEFAULT_SPEC
) -> NormEstimate:
    """``|f|_X`` from the boundary of X: the unit circle and every deleted circle."""
    if f.is_zero:
        return NormEstimate(0.0, 1 + 0j, 0, True)
    circles = [(0j, 1.0)] + [(d.center, d.radius) for d in cheese.discs]
    return sup_norm_circles(f, circles)[0]
