"""Run a method x epsilon x instance matrix."""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..core import RunReport
from ..dichotomy import DichotomyConfig
from ..problems import build_bilinear, build_logsumexp_dual, build_quadratic_dual, generate_instance
from ..saddle import Approach1Config, Approach2Config, solve_dichotomy_outer, solve_small_x, solve_small_y
from . import methods
from .config import BenchConfig


def _cells(cfg: BenchConfig) -> list[tuple[int, float, str]]:
    return [(seed, eps, meth) for seed in cfg.seeds for eps in cfg.eps for meth in cfg.methods]


class _Timer:
    def __init__(self, limit: float):
        self.limit = limit
        self.t0 = time.perf_counter()
        self.timed_out = False

    def __call__(self, *_args) -> bool:
        if time.perf_counter() - self.t0 > self.limit:
            self.timed_out = True
            return True
        return False


def _run_bilinear(cfg: BenchConfig, seed: int, eps: float, method: str) -> RunReport:
    n, m = cfg.dims
    spec = build_bilinear(n, m, seed, **cfg.instance)
    if cfg.overrides:
        spec.constants = dataclasses.replace(spec.constants, **cfg.overrides)
    timer = _Timer(cfg.time_limit_sec)
    if method == "approach1":
        x, rep = solve_small_x(spec, Approach1Config(eps), callback=timer)
        residual = float(np.linalg.norm(x))
    elif method == "approach2":
        x, rep = solve_small_y(spec, Approach2Config(eps, y_eps=eps), callback=timer)
        residual = float(np.linalg.norm(rep.extra["y"]))
    else:
        c = spec.constants
        dcfg = DichotomyConfig(M_f=c.M_f, L_f=c.L_f, mu_f=c.mu_f, eps=c.mu_f * eps * eps / 2.0)
        y, rep = solve_dichotomy_outer(spec, dcfg, "prox_r", callback=timer)
        residual = float(np.linalg.norm(y))
    report = RunReport(method=method, outer_iters=rep.outer_iters, counters=spec.counter.snapshot(),
                       residual=residual, wall_sec=time.perf_counter() - timer.t0,
                       timed_out=timer.timed_out, converged=rep.converged and not timer.timed_out)
    for f in rep.flags:
        report.flag(f)
    return report


def run_cell(cfg: BenchConfig, seed: int, eps: float, method: str) -> RunReport:
    """One (seed, eps, method) cell; generation time is excluded from wall_sec."""
    n, m = cfg.dims
    if cfg.problem == "quadratic":
        params = {k: v for k, v in cfg.instance.items() if k != "inner_iters"}
        inst = generate_instance("quadratic", (n, m), seed, **params)
        qd = build_quadratic_dual(inst, inner_iters=cfg.instance.get("inner_iters", 800))
        for key, value in cfg.overrides.items():
            setattr(qd, key, float(value))
        report = methods.QUADRATIC_METHODS[method](qd, eps, cfg.time_limit_sec)
    elif cfg.problem == "logsumexp":
        inst = generate_instance("logsumexp", (n, m), seed, **cfg.instance)
        spec = build_logsumexp_dual(inst)
        if cfg.overrides:
            spec.constants = dataclasses.replace(spec.constants, **cfg.overrides)
        report = methods.LSE_METHODS[method](spec, inst, eps, cfg.time_limit_sec)
    else:
        report = _run_bilinear(cfg, seed, eps, method)
    report.method = method
    report.problem = cfg.problem
    report.epsilon = eps
    report.n, report.m = n, m
    report.seed = seed
    # keep only plain scalars; arrays and solver state stay out of the record
    report.extra = {k: v for k, v in report.extra.items() if isinstance(v, (int, float, str, bool))}
    if not math.isfinite(report.residual):
        report.flag("no point checked")
    return report


def _run_indexed(args):
    cfg, cell = args
    return run_cell(cfg, *cell)


def run_matrix(cfg: BenchConfig) -> list[RunReport]:
    """One report per (seed, eps, method) cell, in that nesting order.

    With ``cfg.workers > 1`` cells run on a process pool; results are merged
    by cell index so the order never depends on scheduling.
    """
    cells = _cells(cfg)
    if cfg.workers == 1 or len(cells) == 1:
        return [run_cell(cfg, *cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_run_indexed, [(cfg, cell) for cell in cells]))
