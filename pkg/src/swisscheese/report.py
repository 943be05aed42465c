"""Run configuration and the full verification sweep behind ``swisscheese verify``."""

from __future__ import annotations

import json
import logging
import os
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import derivation as dv
from .geometry import SwissCheese, budget_certificate, certified_bound, validate
from .quadrature import DEFAULT_SPEC, ConvergenceError, OracleInapplicableError
from .rational import PoleEvaluationError, RationalFunction, random_member

log = logging.getLogger(__name__)

MONOMIAL_MAX = 8
CONTOUR_SAMPLES = 50
DEFLECTION_RADIUS = 1.5
# Outside poles of the contour families sit beyond both gamma_1 and |w| = 1.5.
CONTOUR_POLE_GAP = 0.5


@dataclass
class RunConfig:
    C: float = 1.0
    annuli: int = 4
    discs_per_annulus: int = 3
    seed: int = 7
    sweep_pairs: int = 200
    sweep_triples: int = 100
    max_degree: int = 6
    max_poles: int = 3
    min_clearance: float = 0.02
    rho: float = dv.DEFAULT_RHO
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.annuli < 1 or self.discs_per_annulus < 1:
            raise ValueError("annuli and discs_per_annulus must be positive")
        if self.sweep_pairs < 0 or self.sweep_triples < 0:
            raise ValueError("sweep sizes must be non-negative")
        if self.max_degree < 0 or self.max_poles < 0:
            raise ValueError("max_degree and max_poles must be non-negative")
        if not self.rho > 1:
            raise ValueError("rho must exceed 1")
        if not self.min_clearance > 0:
            raise ValueError("min_clearance must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def tol(self, check: str, default: float) -> float:
        return float(self.tolerances.get(check, default))


def derive_seed(seed: int, tag: str, index: int) -> int:
    ss = np.random.SeedSequence([seed, zlib.crc32(tag.encode()), index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def pair_family(cheese: SwissCheese, cfg: RunConfig, i: int):
    f = random_member(cheese, cfg.max_degree, cfg.max_poles, cfg.min_clearance,
                      derive_seed(cfg.seed, "pair-f", i))
    g = random_member(cheese, cfg.max_degree, cfg.max_poles, cfg.min_clearance,
                      derive_seed(cfg.seed, "pair-g", i))
    return f, g


def triple_family(cheese: SwissCheese, cfg: RunConfig, i: int):
    return tuple(
        random_member(cheese, cfg.max_degree, cfg.max_poles, cfg.min_clearance,
                      derive_seed(cfg.seed, tag, i))
        for tag in ("triple-f", "triple-g", "triple-h")
    )


def contour_family(cheese: SwissCheese, cfg: RunConfig, i: int):
    lo = max(cfg.rho, DEFLECTION_RADIUS) + CONTOUR_POLE_GAP
    outside = (lo, lo + 1.5)
    f = random_member(cheese, cfg.max_degree, cfg.max_poles, cfg.min_clearance,
                      derive_seed(cfg.seed, "contour-f", i), outside=outside)
    g = random_member(cheese, cfg.max_degree, cfg.max_poles, cfg.min_clearance,
                      derive_seed(cfg.seed, "contour-g", i), outside=outside)
    phase = np.random.default_rng(derive_seed(cfg.seed, "contour-w", i)).random()
    w = complex(DEFLECTION_RADIUS * np.exp(2j * np.pi * phase))
    return f, g, w


_STATE: dict = {}


def _init_worker(cheese_json: str, cfg_dict: dict) -> None:
    _STATE["cheese"] = SwissCheese.from_json(cheese_json)
    _STATE["cfg"] = RunConfig.from_dict(cfg_dict)


def _aborted(name: str, exc: Exception) -> dv.DerivationCheckRecord:
    return dv.DerivationCheckRecord(
        name, None, None, sys.float_info.max, 0.0, False, "",
        {"aborted": f"{type(exc).__name__}: {exc}"},
    )


def _run_task(task: tuple[str, int]) -> list[dict]:
    kind, i = task
    cheese: SwissCheese = _STATE["cheese"]
    cfg: RunConfig = _STATE["cfg"]
    spec = DEFAULT_SPEC
    records = []
    for name, thunk in _task_thunks(kind, i, cheese, cfg, spec):
        try:
            rec = thunk()
        except (ConvergenceError, dv.PreconditionError, OracleInapplicableError,
                PoleEvaluationError) as exc:
            rec = _aborted(name, exc)
        records.append(rec.to_dict())
    return records


def _task_thunks(kind, i, cheese, cfg, spec):
    if kind == "pair":
        f, g = pair_family(cheese, cfg, i)
        one = RationalFunction.constant(1)
        return [
            ("oracle", lambda: dv.oracle_agreement_check(f, g, spec, cfg.tol("oracle", 1e-9))),
            ("cyclicity", lambda: dv.cyclicity_check(f, g, spec, cfg.tol("cyclicity", 1e-9))),
            ("cyclicity", lambda: dv.cyclicity_check(f, one, spec, cfg.tol("cyclicity", 1e-9))),
            ("morris", lambda: dv.morris_bound_check(f, g, cheese, spec, cfg.tol("morris", 1e-8))),
            ("restriction",
             lambda: dv.restriction_bound_check(f, g, spec, cfg.tol("restriction", 1e-9))),
        ]
    if kind == "triple":
        f, g, h = triple_family(cheese, cfg, i)
        return [("leibniz", lambda: dv.leibniz_check(f, g, h, spec, cfg.tol("leibniz", 1e-8)))]
    if kind == "contour":
        f, g, w = contour_family(cheese, cfg, i)
        return [
            ("cauchy_split", lambda: dv.cauchy_split_check(
                f, cheese, cfg.rho, spec, cfg.tol("cauchy_split", 1e-8))),
            ("fubini", lambda: dv.fubini_check(
                f, g, cheese, cfg.rho, spec, cfg.tol("fubini", 1e-8))),
            ("cauchy_deflection", lambda: dv.cauchy_deflection_check(
                g, w, cheese, spec, cfg.tol("cauchy_deflection", 1e-9))),
        ]
    if kind == "monomial":
        recs = dv.monomial_checks(i, spec)
        return [(r.check_name, (lambda r=r: r)) for r in recs]
    if kind == "l1":
        return [("l1_unboundedness", lambda: _l1_record(i, cheese, spec))]
    raise ValueError(f"unknown task kind {kind!r}")


def _l1_record(n: int, cheese: SwissCheese, spec) -> dv.DerivationCheckRecord:
    row = dv.l1_unboundedness_demo(n, spec, cheese)[-1]
    expected = 2 * np.pi * n
    return dv.DerivationCheckRecord(
        "l1_unboundedness", row.l1_norm, expected, abs(row.l1_norm - expected), 1e-9,
        row.ok, dv.inputs_digest(n), {"n": n, "sup_norm_X": row.sup_norm},
    )


def _structural_records(cheese: SwissCheese) -> list[dict]:
    violations = validate(cheese)
    digest = cheese.digest()[:16]
    certified = budget_certificate(cheese)
    return [
        dv.DerivationCheckRecord(
            "validate", len(violations), 0, float(len(violations)), 0.0,
            not violations, digest, {"violations": violations},
        ).to_dict(),
        dv.DerivationCheckRecord(
            "budget_certificate", certified_bound(cheese), cheese.C / 2,
            0.0 if certified else 1.0, 0.0, certified, digest,
            {"exact": True},
        ).to_dict(),
    ]


def build_tasks(cfg: RunConfig) -> list[tuple[str, int]]:
    if cfg.sweep_pairs == 0:
        return []
    tasks = [("pair", i) for i in range(cfg.sweep_pairs)]
    tasks += [("triple", i) for i in range(cfg.sweep_triples)]
    tasks += [("contour", i) for i in range(min(CONTOUR_SAMPLES, cfg.sweep_pairs))]
    tasks += [("monomial", n) for n in range(1, MONOMIAL_MAX + 1)]
    tasks += [("l1", n) for n in range(1, MONOMIAL_MAX + 1)]
    return tasks


def run_verification(
    cheese: SwissCheese, cfg: RunConfig, jobs: int | None = None
) -> tuple[dict, dict]:
    """Run every check; returns ``(report, timings)``.

    The report is a pure function of ``(cheese, cfg)``; wall-clock timings
    are returned separately so that reports compare byte for byte.
    """
    jobs = jobs or os.cpu_count() or 1
    t0 = time.perf_counter()
    structural = _structural_records(cheese)
    t1 = time.perf_counter()
    tasks = build_tasks(cfg)
    cheese_json = cheese.to_json()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker,
                                 initargs=(cheese_json, cfg.to_dict())) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=8))
    else:
        _init_worker(cheese_json, cfg.to_dict())
        results = [_run_task(t) for t in tasks]
    t2 = time.perf_counter()

    checks: dict[str, list] = {}
    for rec in structural + [r for batch in results for r in batch]:
        checks.setdefault(rec["check"], []).append(rec)
    summary = {
        name: {"total": len(recs), "failed": sum(not r["pass"] for r in recs)}
        for name, recs in checks.items()
    }
    report = {
        "config": cfg.to_dict(),
        "cheese_digest": cheese.digest(),
        "C": cheese.C,
        "certified_bound": certified_bound(cheese),
        "checks": checks,
        "summary": summary,
        "pass": all(r["pass"] for recs in checks.values() for r in recs),
    }
    timings = {"structural_s": t1 - t0, "sweeps_s": t2 - t1, "tasks": len(tasks), "jobs": jobs}
    log.info("verification finished: %d records, pass=%s", sum(map(len, checks.values())),
             report["pass"])
    return report, timings


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True, allow_nan=False) + "\n"
