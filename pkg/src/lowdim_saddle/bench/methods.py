"""Dual-side methods compared by the harness.

Each runner takes a built problem, a target ``eps`` for the stopping rule and
a wall-clock limit, and returns a RunReport. The stopping rule is checked on
every dual point the method produces; the inner accuracies used internally
are chosen so that the rule, not the method's own tolerance, ends the run.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..accel import composite_model, fgm_model
from ..core import BoxDomain, RunReport, SaddleSpec, SimplexDomain, Vector
from ..dichotomy import DichotomyConfig, InexactGradSpec, multidim_dichotomy
from ..ellipsoid import ellipsoid_iterations, ellipsoid_minimize
from ..problems import LogSumExpInstance, QuadraticDual, kkt_stop
from ..saddle import (
    Approach1Config,
    Approach2Config,
    fgm_composite_solve,
    first_delta,
    solve_dichotomy_outer,
    solve_small_x,
    solve_small_y,
    swap_roles,
)

FEAS_TOL = 1e-8


class _Stop(Exception):
    pass


@dataclass
class Watch:
    """Stopping rule plus time limit, fed with (dual point, primal point) pairs."""

    rule: Callable[[Vector, Vector], tuple[bool, float]]
    time_limit: float
    t0: float = 0.0
    satisfied: bool = False
    timed_out: bool = False
    residual: float = math.inf
    lam: Vector | None = None
    x: Vector | None = None
    checks: int = 0

    def start(self) -> "Watch":
        self.t0 = time.perf_counter()
        return self

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def __call__(self, lam: Vector, x: Vector) -> bool:
        self.checks += 1
        ok, res = self.rule(lam, x)
        if res < self.residual or self.lam is None:
            self.residual, self.lam, self.x = res, np.array(lam, dtype=float), np.array(x, dtype=float)
        if ok:
            self.satisfied = True
            self.residual, self.lam, self.x = res, np.array(lam, dtype=float), np.array(x, dtype=float)
            return True
        if self.elapsed() > self.time_limit:
            self.timed_out = True
            return True
        return False

    def fill(self, report: RunReport) -> RunReport:
        report.wall_sec = self.elapsed()
        report.timed_out = self.timed_out and not self.satisfied
        report.converged = self.satisfied
        report.residual = self.residual
        report.extra["lam"] = self.lam
        report.extra["x"] = self.x
        return report


# --- log-sum-exp dual ------------------------------------------------------------------------


def lse_rule(inst: LogSumExpInstance, eps: float, feas_tol: float = FEAS_TOL):
    """Complementarity |lam^T g| <= eps/2 plus primal feasibility g <= feas_tol."""

    def rule(lam, x):
        g = inst.constraint_values(x)
        ok = kkt_stop(lam, g, eps) and float(np.max(g)) <= feas_tol
        return ok, abs(float(lam @ g))

    return rule


def _lse_internal_eps(spec: SaddleSpec, eps: float) -> float:
    """Argument accuracy in the multipliers that makes the stopping rule reachable."""
    c = spec.constants
    scale = max(1.0, spec.Qy.diameter)
    return 1e-3 * min(eps, FEAS_TOL) / (c.L_f * scale)


def lse_ellipsoid_dual(spec: SaddleSpec, inst: LogSumExpInstance, eps: float, time_limit: float) -> RunReport:
    """Ellipsoid method on the multipliers (outer), FGM on x (inner)."""
    c = spec.constants
    watch = Watch(lse_rule(inst, eps), time_limit).start()
    dual = swap_roles(spec, B=max(c.M_f * spec.Qy.diameter, 1e-300))
    eps_arg = _lse_internal_eps(spec, eps)
    _, rep = solve_small_x(dual, Approach1Config(eps_arg, inner_case="prox_h"), callback=watch)
    report = RunReport(method="ellipsoid_dual", outer_iters=rep.outer_iters, counters=spec.counter.snapshot())
    return watch.fill(report)


def lse_dichotomy_outer(spec: SaddleSpec, inst: LogSumExpInstance, eps: float, time_limit: float) -> RunReport:
    """Dichotomy on the multipliers, FGM on x with adaptive accuracy."""
    c = spec.constants
    watch = Watch(lse_rule(inst, eps), time_limit).start()
    eps_arg = _lse_internal_eps(spec, eps)
    cfg = DichotomyConfig(M_f=c.M_f, L_f=c.L_f, mu_f=c.mu_f, eps=c.mu_f * eps_arg**2 / 2.0)
    _, rep = solve_dichotomy_outer(spec, cfg, "prox_r", callback=watch)
    report = RunReport(method="dichotomy_outer", outer_iters=rep.extra.get("evaluations", 0),
                       counters=spec.counter.snapshot())
    for f in rep.flags:
        report.flag(f)
    return watch.fill(report)


def lse_fgm_dual(spec: SaddleSpec, inst: LogSumExpInstance, eps: float, time_limit: float,
                 max_iters: int = 10_000_000) -> RunReport:
    """Fast gradient method on the negated dual with an inexact gradient.

    With gradient error e the model <g~, y - z> + mu/4 ||y - z||^2 is a
    (2 ||e||^2 / mu, L)-model of the mu-strongly convex negated dual.
    """
    c = spec.constants
    watch = Watch(lse_rule(inst, eps), time_limit).start()
    mu_d, L_d = c.mu_f, max(c.L_f, c.mu_f)
    # inner gap such that the induced gradient error is 1e-3 of the target
    err = 1e-3 * min(eps, FEAS_TOL)
    gap = first_delta(err, c.mu_x, c.L_xy)
    state = {"x": np.zeros(spec.dim_x), "iters": 0}

    def grad(lam):
        res = fgm_composite_solve(lambda x: spec.grad_x(x, lam), spec.prox_r, c.L_xx, c.mu_x, state["x"], gap)
        state["x"] = res.point
        state["iters"] += res.iters
        if watch(lam, res.point):
            raise _Stop()
        return -spec.grad_y(res.point, lam)

    model = composite_model(grad, spec.prox_h, L_d, mu_d / 2.0, delta=2.0 * err**2 / mu_d, quad=mu_d / 2.0)
    k_done = {"k": 0}

    def on_step(k, y, A, alpha):
        k_done["k"] = k
        return False

    try:
        fgm_model(model, spec.Qy, mu_d / 2.0, L_d, max_iters, spec.Qy.center, callback=on_step)
    except _Stop:
        pass
    report = RunReport(method="fgm_dual", outer_iters=k_done["k"], counters=spec.counter.snapshot())
    report.extra["inner_iters"] = state["iters"]
    return watch.fill(report)


def lse_approach2(spec: SaddleSpec, inst: LogSumExpInstance, eps: float, time_limit: float) -> RunReport:
    """FGM on x (outer), ellipsoid on the multipliers (inner).

    The stopping rule needs the Lagrangian minimizer at the multipliers, so
    each check re-solves the x-problem at the current inner point.
    """
    c = spec.constants
    watch = Watch(lse_rule(inst, eps), time_limit).start()
    eps_x = math.sqrt(2.0 * min(eps, FEAS_TOL) * 1e-3 / c.mu_x)
    gap = first_delta(1e-3 * min(eps, FEAS_TOL), c.mu_x, c.L_xy)

    def cb(x, lam):
        res = fgm_composite_solve(lambda v: spec.grad_x(v, lam), spec.prox_r, c.L_xx, c.mu_x, x, gap)
        return watch(lam, res.point)

    _, rep = solve_small_y(spec, Approach2Config(eps_x), callback=cb)
    report = RunReport(method="approach2", outer_iters=rep.outer_iters, counters=spec.counter.snapshot())
    for f in rep.flags:
        report.flag(f)
    return watch.fill(report)


# --- quadratic dual --------------------------------------------------------------------------------


def quadratic_rule(eps: float):
    """|lam^T g| < eps and g_i <= 0 wherever lam_i = 0."""

    def rule(lam, g):
        lam = np.asarray(lam, dtype=float)
        res = abs(float(lam @ g))
        ok = res < eps and bool(np.all(g[lam == 0] <= 0))
        return ok, res

    return rule


def _quad_watch(qd: QuadraticDual, eps: float, time_limit: float):
    watch = Watch(quadratic_rule(eps), time_limit).start()
    primal = {"x": None, "best": None}

    def check(lam, x, g):
        stop = watch(lam, g)
        if watch.lam is not None and np.array_equal(watch.lam, lam):
            primal["best"] = x
        return stop

    return watch, primal, check


def _quad_fill(watch: Watch, primal: dict, report: RunReport, qd: QuadraticDual) -> RunReport:
    watch.fill(report)
    report.extra["g"] = report.extra.pop("x")
    report.extra["x"] = primal["best"]
    report.counters = qd.counter.snapshot()
    return report


def quadratic_ellipsoid_dual(qd: QuadraticDual, eps: float, time_limit: float) -> RunReport:
    watch, primal, check = _quad_watch(qd, eps, time_limit)
    simplex = SimplexDomain(2, max(qd.Omega, 1e-300))
    ball = simplex.bounding_ball()
    N = ellipsoid_iterations(2, max(qd.Omega * qd.M_g * 2 * qd.inst.r, 1e-300), ball.radius,
                             simplex.inner_radius(), 1e-3 * eps * eps)
    last = {}

    def oracle(lam):
        val, x, g = qd.evaluate(lam)
        last.update(lam=lam.copy(), x=x, g=g)
        return -val, -g

    def cb(state, lam, value):
        return check(last["lam"], last["x"], last["g"])

    _, rep = ellipsoid_minimize(oracle, simplex, ball, N, callback=cb)
    report = RunReport(method="ellipsoid_dual", outer_iters=rep.outer_iters)
    return _quad_fill(watch, primal, report, qd)


def _quad_dichotomy(qd: QuadraticDual, eps: float, time_limit: float, simplex: bool) -> RunReport:
    watch, primal, check = _quad_watch(qd, eps, time_limit)
    Omega = max(qd.Omega, 1e-300)
    box = BoxDomain(np.zeros(2), np.full(2, Omega))
    R = box.diameter
    eps_int = 1e-2 * eps
    reg = eps_int / R**2
    lam0 = box.center
    M_f = math.sqrt(2.0) * float(np.max(np.linalg.norm(qd.inst.C, axis=1) * qd.inst.r + np.abs(qd.inst.d))) + reg * R
    L_f = (qd.lipschitz if math.isfinite(qd.lipschitz) else 1e12) + reg

    def nu(lam):
        _, x, g = qd.evaluate(lam)
        if check(lam, x, g):
            raise _Stop()
        return -g + reg * (lam - lam0)

    cfg = DichotomyConfig(M_f=M_f, L_f=L_f, mu_f=reg, eps=eps_int / 2.0)
    report = RunReport(method="triangle_dual" if simplex else "dichotomy_outer")
    try:
        _, rep = multidim_dichotomy(InexactGradSpec(nu=nu), box, cfg,
                                    simplex_bound=Omega if simplex else None)
        report.outer_iters = rep.extra.get("evaluations", 0)
    except _Stop:
        report.outer_iters = watch.checks
    return _quad_fill(watch, primal, report, qd)


def quadratic_triangle_dual(qd: QuadraticDual, eps: float, time_limit: float) -> RunReport:
    return _quad_dichotomy(qd, eps, time_limit, simplex=True)


def quadratic_dichotomy_outer(qd: QuadraticDual, eps: float, time_limit: float) -> RunReport:
    return _quad_dichotomy(qd, eps, time_limit, simplex=False)


def quadratic_fgm_dual(qd: QuadraticDual, eps: float, time_limit: float, max_iters: int = 10_000_000) -> RunReport:
    """FGM on the regularized negated dual over the triangle."""
    watch, primal, check = _quad_watch(qd, eps, time_limit)
    Omega = max(qd.Omega, 1e-300)
    simplex = SimplexDomain(2, Omega)
    R = simplex.diameter
    reg = 1e-2 * eps / R**2
    lam0 = simplex.inner_center()
    L = (qd.lipschitz if math.isfinite(qd.lipschitz) else 1e12) + reg

    def grad(lam):
        _, x, g = qd.evaluate(lam)
        if check(lam, x, g):
            raise _Stop()
        return -g

    def prox_step(c1, c2):
        return simplex.project((reg * lam0 - c1) / (reg + 2.0 * c2))

    model = composite_model(grad, prox_step, L, reg)
    k_done = {"k": 0}

    def on_step(k, y, A, alpha):
        k_done["k"] = k
        return False

    try:
        fgm_model(model, simplex, reg, L, max_iters, lam0, callback=on_step)
    except _Stop:
        pass
    report = RunReport(method="fgm_dual", outer_iters=k_done["k"])
    return _quad_fill(watch, primal, report, qd)


LSE_METHODS = {
    "ellipsoid_dual": lse_ellipsoid_dual,
    "dichotomy_outer": lse_dichotomy_outer,
    "fgm_dual": lse_fgm_dual,
    "approach2": lse_approach2,
}

QUADRATIC_METHODS = {
    "ellipsoid_dual": quadratic_ellipsoid_dual,
    "triangle_dual": quadratic_triangle_dual,
    "dichotomy_outer": quadratic_dichotomy_outer,
    "fgm_dual": quadratic_fgm_dual,
}
