"""Composed saddle-point solvers for  min_x max_y  r(x) + F(x, y) - h(y).

* ``solve_small_x``: ellipsoid method on x, accelerated inner maximization in y.
* ``solve_small_y``: fast gradient method on x driven by an inexact model,
  ellipsoid method for the inner maximization in y.
* ``solve_dichotomy_outer``: multidimensional dichotomy on y, accelerated inner
  minimization in x.

Every inner solve is stopped by the certified bound of its own method, and the
certified gaps are recorded in the report.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .accel import (
    UmStats,
    composite_distance_bound,
    composite_model,
    fgm_bound,
    fgm_iterations,
    fgm_model,
    restart_count,
    restart_gap_bound,
    um_sliding,
)
from .core import (
    BoxDomain,
    Coupling,
    ParameterError,
    RunReport,
    SaddleConstants,
    SaddleSpec,
    StateCorruptionError,
    Vector,
    as_vector,
    require_nonnegative,
    require_positive,
)
from .dichotomy import DichotomyConfig, InexactGradSpec, multidim_dichotomy
from .ellipsoid import ellipsoid_gap_bound, ellipsoid_iterations, ellipsoid_minimize

INNER_CASES_SMALL_X = ("smooth_h", "prox_h", "separable")
INNER_CASES_DICHOTOMY = ("smooth_r", "prox_r", "separable")


@dataclass(frozen=True)
class Approach1Config:
    eps: float
    inner_case: str = "prox_h"
    warm_start: bool = True
    inner_max_iters: int = 200_000

    def __post_init__(self) -> None:
        require_positive(self.eps, "eps")
        if self.inner_case not in INNER_CASES_SMALL_X:
            raise ParameterError(f"inner_case must be one of {INNER_CASES_SMALL_X}, got {self.inner_case!r}")


@dataclass(frozen=True)
class Approach2Config:
    """``eps`` is the argument accuracy in x.

    When ``y_eps`` is given the outer accuracy is tightened so that the
    reported inner point is also within ``y_eps`` of the saddle's y.
    """

    eps: float
    y_eps: float | None = None

    def __post_init__(self) -> None:
        require_positive(self.eps, "eps")
        if self.y_eps is not None:
            require_positive(self.y_eps, "y_eps")


@dataclass(frozen=True)
class CompositeL:
    L: float

    def __post_init__(self) -> None:
        require_nonnegative(self.L, "L")


def composite_L(spec: SaddleSpec) -> CompositeL:
    """Smoothness of x -> max_y S(x, y): L_xx + 2 L_xy^2 / mu_y."""
    c = spec.constants
    if not c.mu_y > 0:
        raise ParameterError("composite smoothness needs mu_y > 0")
    return CompositeL(c.L_xx + 2.0 * c.L_xy**2 / c.mu_y)


def delta_subgradient_of_max(spec: SaddleSpec, x: Vector, y_tilde: Vector, delta: float) -> tuple[Vector, float]:
    """Gradient in x of S(., y_tilde), a delta-subgradient of g = max_y S(., y).

    ``delta`` must bound g(x) - S(x, y_tilde).
    """
    require_nonnegative(delta, "delta")
    w = spec.grad_x(x, y_tilde)
    if spec.r is not None:
        w = w + spec.grad_r(x)
    return w, float(delta)


def inner_tolerance_small_y(L: float, mu_x: float, eps: float) -> float:
    """Largest eps_y with 2 (1 + sqrt(L / mu_x)) eps_y <= eps / 2."""
    require_positive(mu_x, "mu_x")
    require_positive(eps, "eps")
    require_nonnegative(L, "L")
    return eps / (4.0 * (1.0 + math.sqrt(L / mu_x)))


def approach1_iterations(n: int, B: float, R: float, rho: float, mu_x: float, eps: float) -> int:
    """Outer ellipsoid budget ceil(2 n^2 ln(4 B R / (mu_x rho eps^2)))."""
    require_positive(mu_x, "mu_x")
    return ellipsoid_iterations(n, B, R, rho, mu_x * eps * eps / 4.0)


def first_delta(delta_tilde: float, mu_x: float, L_xy: float) -> float:
    """Inner gap giving gradient error delta_tilde via strong convexity: mu_x dt^2 / (2 L_xy^2)."""
    if L_xy == 0:
        return math.inf
    return mu_x * delta_tilde**2 / (2.0 * L_xy**2)


def second_delta(delta_tilde: float, L_y: float) -> float:
    """Inner gap 2 dt^2 / L_y from the interior error bound sqrt(L_y delta / 2) of a (delta, L_y)-oracle.

    The bound is only claimed at distance sqrt(delta / (2 L_y)) from the
    boundary, and a one-dimensional oracle with error sqrt(L_y delta) exists
    even without a boundary, so solvers only use this when asked to.
    """
    require_positive(L_y, "L_y")
    return 2.0 * delta_tilde**2 / L_y


# --- inner solvers --------------------------------------------------------------------


@dataclass
class InnerResult:
    point: Vector
    gap: float
    iters: int


def fgm_composite_solve(
    grad: Callable[[Vector], Vector],
    prox_step: Callable[[Vector, float], Vector],
    L: float,
    mu: float,
    y0: Vector,
    gap: float,
    max_iters: int = 200_000,
) -> InnerResult:
    """Minimize s(y) + phi(y) with s L-smooth, phi prox-friendly and the sum mu-strongly convex.

    The iteration count is chosen from the certified bound, with the initial
    distance certified from the gradient mapping at ``y0``.
    """
    L = max(L, mu)
    y0 = np.asarray(y0, dtype=float)
    g0 = grad(y0)
    y_plus = prox_step(g0 - L * y0, L / 2.0)
    G = L * float(np.linalg.norm(y0 - y_plus))
    if G == 0:
        return InnerResult(y0.copy(), 0.0, 0)
    R = composite_distance_bound(G, L, mu)
    N = fgm_iterations(L, mu, R, gap) if gap > 0 else max_iters
    N = min(N, max_iters)
    model = composite_model(grad, prox_step, L, mu)
    y = fgm_model(model, None, mu, L, N, y_plus)
    # started from y_plus, which is no farther from the minimizer than y0
    return InnerResult(y, fgm_bound(N, L, mu, R), N)


def separable_bisection(deriv: Callable[[Vector], Vector], box: BoxDomain, gap: float,
                        max_steps: int = 200) -> InnerResult:
    """Minimize a sum of convex one-dimensional functions over a box, coordinatewise.

    All coordinates are bisected at once on the sign of their derivative. The
    certified gap is sum |d_i(mid_i)| * width_i / 2.
    """
    lo, hi = box.lower.copy(), box.upper.copy()
    steps = 0
    while True:
        mid = 0.5 * (lo + hi)
        d = np.asarray(deriv(mid), dtype=float)
        cert = float(np.sum(np.abs(d) * (hi - lo))) / 2.0
        if cert <= gap or steps >= max_steps:
            return InnerResult(mid, cert, steps)
        up = d >= 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        steps += 1


def _inner_max_y(spec: SaddleSpec, case: str, max_iters: int):
    """Solver for min_y -F(x, y) + h(y); returns a function (x, y0, gap) -> InnerResult."""
    c = spec.constants
    if case == "prox_h":
        require_positive(c.mu_y, "mu_y")

        def solve(x, y0, gap):
            return fgm_composite_solve(lambda y: -spec.grad_y(x, y), spec.prox_h, c.L_yy, c.mu_y, y0, gap, max_iters)

        return solve

    if case == "smooth_h":
        require_positive(c.mu_y, "mu_y")
        if spec.Qy is not None:
            raise ParameterError("smooth_h inner case needs an unconstrained y")
        if spec.h is None or spec.h.grad is None:
            raise ParameterError("smooth_h inner case needs grad h")

        def solve(x, y0, gap):
            def neg_F(y):
                return -spec.grad_y(x, y)

            u_grad, v_grad, L_u, L_v = neg_F, spec.grad_h, c.L_yy, c.L_h
            if c.L_yy > c.L_h:
                # the smoother part plays u
                u_grad, v_grad, L_u, L_v = spec.grad_h, neg_F, c.L_h, c.L_yy
            H = 2.0 * max(L_u, c.mu_y)
            g0 = u_grad(y0) + v_grad(y0)
            R = float(np.linalg.norm(g0)) / c.mu_y
            if R == 0:
                return InnerResult(np.array(y0, dtype=float), 0.0, 0)
            stats = UmStats()
            y = um_sliding(u_grad, v_grad, H, c.mu_y, L_v, gap, y0, stats=stats, R=R)
            K = restart_count(c.mu_y, R, gap)
            return InnerResult(y, restart_gap_bound(c.mu_y, R, K), stats.inner_iters)

        return solve

    if case == "separable":
        if not isinstance(spec.Qy, BoxDomain):
            raise ParameterError("separable inner case needs a box for y")

        def solve(x, y0, gap):
            return separable_bisection(lambda y: -spec.grad_y(x, y) + spec.grad_h(y), spec.Qy, gap)

        return solve
    raise ParameterError(f"unknown inner case {case!r}")


def _inner_min_x(spec: SaddleSpec, case: str, max_iters: int):
    """Solver for min_x r(x) + F(x, y); returns a function (y, x0, gap) -> InnerResult."""
    c = spec.constants
    if case == "prox_r":
        require_positive(c.mu_x, "mu_x")

        def solve(y, x0, gap):
            return fgm_composite_solve(lambda x: spec.grad_x(x, y), spec.prox_r, c.L_xx, c.mu_x, x0, gap, max_iters)

        return solve

    if case == "smooth_r":
        require_positive(c.mu_x, "mu_x")
        if spec.Qx is not None:
            raise ParameterError("smooth_r inner case needs an unconstrained x")
        if spec.r is None or spec.r.grad is None:
            raise ParameterError("smooth_r inner case needs grad r")

        def solve(y, x0, gap):
            def F_x(x):
                return spec.grad_x(x, y)

            u_grad, v_grad, L_u, L_v = F_x, spec.grad_r, c.L_xx, c.L_r
            if c.L_xx > c.L_r:
                u_grad, v_grad, L_u, L_v = spec.grad_r, F_x, c.L_r, c.L_xx
            H = 2.0 * max(L_u, c.mu_x)
            R = float(np.linalg.norm(u_grad(x0) + v_grad(x0))) / c.mu_x
            if R == 0:
                return InnerResult(np.array(x0, dtype=float), 0.0, 0)
            stats = UmStats()
            x = um_sliding(u_grad, v_grad, H, c.mu_x, L_v, gap, x0, stats=stats, R=R)
            K = restart_count(c.mu_x, R, gap)
            return InnerResult(x, restart_gap_bound(c.mu_x, R, K), stats.inner_iters)

        return solve

    if case == "separable":
        if not isinstance(spec.Qx, BoxDomain):
            raise ParameterError("separable inner case needs a box for x")

        def solve(y, x0, gap):
            return separable_bisection(lambda x: spec.grad_x(x, y) + spec.grad_r(x), spec.Qx, gap)

        return solve
    raise ParameterError(f"unknown inner case {case!r}")


def _start_point(domain, dim: int) -> Vector:
    if domain is None:
        return np.zeros(dim)
    if hasattr(domain, "center"):
        return np.array(domain.center, dtype=float)
    return domain.project(np.zeros(dim))


def _finish(report: RunReport, spec: SaddleSpec, t0: float) -> RunReport:
    report.counters = spec.counter.snapshot()
    report.wall_sec = time.perf_counter() - t0
    return report


# --- Approach 1: small x ---------------------------------------------------------------------


def solve_small_x(
    spec: SaddleSpec,
    cfg: Approach1Config,
    callback: Callable[[Vector, Vector], bool] | None = None,
) -> tuple[Vector, RunReport]:
    """Ellipsoid method in x on g(x) = max_y S(x, y); returns x with ||x - x*|| <= eps.

    Each outer step maximizes over y to a certified gap of mu_x eps^2 / 8, so
    the gap of the selected point never exceeds the outer slack mu_x eps^2 / 4.
    ``callback(x, y_tilde)`` runs after each outer evaluation; True stops.
    """
    t0 = time.perf_counter()
    c = spec.constants
    require_positive(c.mu_x, "mu_x")
    if spec.Qx is None:
        raise ParameterError("the outer ellipsoid method needs a bounded Q_x")
    ball = spec.Qx.bounding_ball()
    rho = spec.Qx.inner_radius()
    require_positive(rho, "inner radius of Q_x")
    delta = c.mu_x * cfg.eps**2 / 4.0
    N = approach1_iterations(spec.dim_x, c.B, ball.radius, rho, c.mu_x, cfg.eps)
    inner = _inner_max_y(spec, cfg.inner_case, cfg.inner_max_iters)

    y_init = _start_point(spec.Qy, spec.dim_y)
    state = {"y": y_init, "best": math.inf, "best_y": y_init}
    gaps: list[float] = []
    iters: list[int] = []
    best_values: list[float] = []

    def oracle(x):
        y0 = state["y"] if cfg.warm_start else y_init
        res = inner(x, y0, delta / 2.0)
        gaps.append(res.gap)
        iters.append(res.iters)
        state["y"] = res.point
        value = spec.value(x, res.point)
        if value < state["best"]:
            state["best"], state["best_y"] = value, res.point
        best_values.append(state["best"])
        w, _ = delta_subgradient_of_max(spec, x, res.point, res.gap)
        return value, w

    def on_step(_state, x, _value):
        return callback is not None and bool(callback(x, state["y"]))

    x, rep = ellipsoid_minimize(oracle, spec.Qx, ball, N, delta=delta, callback=on_step)
    report = RunReport(method="approach1", epsilon=cfg.eps, n=spec.dim_x, m=spec.dim_y)
    report.outer_iters = rep.outer_iters
    report.residual = rep.residual
    report.converged = not rep.extra.get("stopped_by_callback", False)
    if any(g > delta / 2.0 for g in gaps):
        report.flag("inner budget exhausted")
        report.converged = False
    report.extra.update(
        N_el=N,
        delta=delta,
        inner_gaps=gaps,
        inner_iters=iters,
        best_values=best_values,
        y=state["best_y"],
        stopped_by_callback=rep.extra.get("stopped_by_callback", False),
        gap_bound=ellipsoid_gap_bound(spec.dim_x, N, c.B, ball.radius, rho, delta),
    )
    return x, _finish(report, spec, t0)


# --- Approach 2: small y ----------------------------------------------------------------------


def _inner_ellipsoid_y(spec: SaddleSpec, x: Vector, gap: float) -> tuple[Vector, float, int]:
    """Maximize S(x, .) over Q_y by the ellipsoid method to a certified gap."""
    c = spec.constants
    Q = spec.Qy
    ball = Q.bounding_ball()
    rho = Q.inner_radius()
    center = ball.center
    g_c = -spec.grad_y(x, center) + spec.grad_h(center)
    # Lipschitz bound of -F(x, .) + h over the ball, times its diameter
    M = float(np.linalg.norm(g_c)) + (c.L_yy + c.L_h) * ball.radius
    B = max(M * 2.0 * ball.radius, np.finfo(float).tiny)
    N = ellipsoid_iterations(spec.dim_y, B, ball.radius, rho, gap)

    def oracle(y):
        v = -spec.F.value(x, y) + spec.h_value(y)
        w = -spec.grad_y(x, y) + spec.grad_h(y)
        return v, w

    try:
        y, rep = ellipsoid_minimize(oracle, Q, ball, N)
    except StateCorruptionError as exc:
        # the ellipsoid shrank below floating-point resolution; the bound at
        # the last good step still holds for the incumbent
        if exc.best_point is None:
            raise
        return exc.best_point, ellipsoid_gap_bound(spec.dim_y, exc.steps, B, ball.radius, rho), exc.steps
    return y, ellipsoid_gap_bound(spec.dim_y, N, B, ball.radius, rho), rep.outer_iters


def solve_small_y(
    spec: SaddleSpec,
    cfg: Approach2Config,
    callback: Callable[[Vector, Vector], bool] | None = None,
    max_outer: int | None = None,
) -> tuple[Vector, RunReport]:
    """Fast gradient method in x on f(x) = max_y S(x, y) with an ellipsoid inner solver.

    The inner point y~(z) with gap eps_y makes (f_delta, psi) a
    (2 eps_y, 2L)-model of f with L from ``composite_L``; eps_y is the
    largest value keeping the model error at half the target.
    ``callback(x_k, y~)`` runs after every outer step; True stops.
    """
    t0 = time.perf_counter()
    c = spec.constants
    require_positive(c.mu_x, "mu_x")
    if spec.Qy is None:
        raise ParameterError("the inner ellipsoid method needs a bounded Q_y")
    eps_x = cfg.eps
    if cfg.y_eps is not None and c.L_xy > 0:
        eps_x = min(eps_x, cfg.y_eps * c.mu_y / (2.0 * c.L_xy))
    L_model = max(2.0 * composite_L(spec).L, c.mu_x)
    eps_f = c.mu_x * eps_x**2 / 2.0
    eps_y = inner_tolerance_small_y(L_model, c.mu_x, eps_f)

    gaps: list[float] = []
    inner_iters: list[int] = []
    last = {"y": None}

    def grad(z):
        y, gap, it = _inner_ellipsoid_y(spec, z, eps_y)
        gaps.append(gap)
        inner_iters.append(it)
        last["y"] = y
        return spec.grad_x(z, y)

    x0 = _start_point(spec.Qx, spec.dim_x)
    if spec.Qx is not None and hasattr(spec.Qx, "diameter"):
        R = spec.Qx.diameter
    else:
        g0 = grad(x0)
        x_plus = spec.prox_r(g0 - L_model * x0, L_model / 2.0)
        R = composite_distance_bound(L_model * float(np.linalg.norm(x0 - x_plus)), L_model, c.mu_x)
    R = max(R, np.finfo(float).tiny)
    N = fgm_iterations(L_model, c.mu_x, R, eps_f / 2.0)
    if max_outer is not None:
        N = min(N, max_outer)
    model = composite_model(grad, spec.prox_r, L_model, c.mu_x, delta=2.0 * eps_y)
    stopped = {"flag": False, "k": N}

    def on_step(k, x, A, alpha):
        stopped["k"] = k
        if callback is not None and callback(x, last["y"]):
            stopped["flag"] = True
            return True
        return False

    x = fgm_model(model, spec.Qx, c.mu_x, L_model, N, x0, callback=on_step)

    if cfg.y_eps is not None and c.mu_y > 0:
        y_gap = c.mu_y * (cfg.y_eps / 2.0) ** 2 / 2.0
    else:
        y_gap = eps_y
    y, final_gap, _ = _inner_ellipsoid_y(spec, x, y_gap)

    report = RunReport(method="approach2", epsilon=cfg.eps, n=spec.dim_x, m=spec.dim_y)
    report.outer_iters = stopped["k"]
    report.converged = not stopped["flag"]
    report.residual = fgm_bound(N, L_model, c.mu_x, R, 2.0 * eps_y)
    if any(g > eps_y for g in gaps):
        report.flag("inner budget exhausted")
        report.converged = False
    report.extra.update(
        y=y,
        eps_y=eps_y,
        eps_x=eps_x,
        L_model=L_model,
        N_outer=N,
        inner_gaps=gaps,
        inner_iters=inner_iters,
        final_inner_gap=final_gap,
        stopped_by_callback=stopped["flag"],
    )
    return x, _finish(report, spec, t0)


# --- Approach 3: dichotomy on y -----------------------------------------------------------------


def _boundary_distance(y: Vector, box: BoxDomain) -> float:
    return float(min(np.min(y - box.lower), np.min(box.upper - y)))


def solve_dichotomy_outer(
    spec: SaddleSpec,
    cfg: DichotomyConfig,
    inner_case: str = "prox_r",
    callback: Callable[[Vector, Vector], bool] | None = None,
    budget: int | None = None,
    inner_max_iters: int = 200_000,
    interior_formula: bool = False,
) -> tuple[Vector, RunReport]:
    """Maximize phi(y) = min_x S(x, y) over a box of dimension <= 5 by dichotomy.

    The gradient of -phi at y is -grad_y F(x~(y), y) + grad h(y). For every
    requested gradient accuracy the inner x-problem is solved to the gap
    ``first_delta``, which always bounds the gradient error through strong
    convexity in x. With ``interior_formula`` the larger ``second_delta`` is
    allowed away from the boundary as well. With mu_y = 0 the objective is
    regularized by eps/(2 R^2) ||y - y0||^2 and the target halved.
    Returns y with -phi(y) + phi* <= cfg.eps.
    ``callback(y, x~)`` runs after each gradient evaluation; True stops.
    """
    t0 = time.perf_counter()
    c = spec.constants
    Q = spec.Qy
    if not isinstance(Q, BoxDomain):
        raise ParameterError("dichotomy outer method needs a box Q_y")
    if not 1 <= spec.dim_y <= 5:
        raise ParameterError("dichotomy outer method supports dim y in 1..5")
    if inner_case not in INNER_CASES_DICHOTOMY:
        raise ParameterError(f"inner_case must be one of {INNER_CASES_DICHOTOMY}, got {inner_case!r}")
    require_positive(c.mu_x, "mu_x")
    if spec.h is not None and spec.h.grad is None:
        raise ParameterError("dichotomy outer method needs grad h")

    R = Q.diameter
    y0 = Q.center
    reg = 0.0
    if c.mu_y == 0:
        reg = cfg.eps / R**2
        cfg = replace(cfg, eps=cfg.eps / 2.0, mu_f=reg, L_f=cfg.L_f + reg,
                      L_y=(cfg.L_y if cfg.L_y is not None else cfg.L_f) + reg)
    L_y = cfg.L_y
    inner = _inner_min_x(spec, inner_case, inner_max_iters)
    x_start = _start_point(spec.Qx, spec.dim_x)
    state = {"x": x_start, "y": None}
    gaps: list[float] = []
    inner_iters: list[int] = []

    def refine(y, demand):
        d1 = first_delta(demand, c.mu_x, c.L_xy)
        d2 = second_delta(demand, L_y) if interior_formula else 0.0
        if _boundary_distance(y, Q) < math.sqrt(d2 / (2.0 * L_y)):
            d2 = 0.0
        gap = max(d1, d2)
        if not math.isfinite(gap):
            gap = 1.0
        res = inner(y, state["x"], gap)
        gaps.append(res.gap)
        inner_iters.append(res.iters)
        state["x"], state["y"] = res.point, y.copy()
        achieved = math.sqrt(2.0 * c.L_xy**2 * res.gap / c.mu_x)
        if interior_formula and _boundary_distance(y, Q) >= math.sqrt(res.gap / (2.0 * L_y)):
            achieved = min(achieved, math.sqrt(L_y * res.gap / 2.0))
        nu = -spec.grad_y(res.point, y) + spec.grad_h(y)
        if reg:
            nu = nu + reg * (y - y0)
        return nu, achieved

    def on_eval(y, nu, dt):
        return callback is not None and bool(callback(y, state["x"]))

    y, rep = multidim_dichotomy(InexactGradSpec(refine=refine), Q, cfg, callback=on_eval, budget=budget)
    if state["y"] is not None and np.array_equal(state["y"], y):
        x = state["x"]
    else:
        x = inner(y, state["x"], first_delta(cfg.eps, c.mu_x, c.L_xy) if c.L_xy else 1.0).point

    report = RunReport(method="dichotomy_outer", epsilon=cfg.eps, n=spec.dim_x, m=spec.dim_y)
    report.outer_iters = rep.outer_iters
    report.converged = rep.converged and not rep.extra.get("stopped_by_callback", False)
    for f in rep.flags:
        report.flag(f)
    report.extra.update(rep.extra)
    report.extra.update(x=x, inner_gaps=gaps, inner_iters=inner_iters, regularization=reg,
                        stopped_by_callback=rep.extra.get("stopped_by_callback", False))
    return y, _finish(report, spec, t0)


# --- role swap ----------------------------------------------------------------------------------


def swap_roles(spec: SaddleSpec, B: float | None = None) -> SaddleSpec:
    """The problem min_y max_x h(y) - F(x, y) - r(x), whose solution in y maximizes phi.

    Constants are permuted accordingly; ``B`` bounds the oscillation of the
    new outer function over Q_y (defaults to the original ``B``).
    """
    c = spec.constants
    F = spec.F
    swapped = Coupling(
        value=lambda y, x: -F.value(x, y),
        grad_x=lambda y, x: -np.asarray(F.grad_y(x, y)),
        grad_y=lambda y, x: -np.asarray(F.grad_x(x, y)),
    )
    constants = SaddleConstants(
        mu_x=c.mu_y, mu_y=c.mu_x, L_xx=c.L_yy, L_xy=c.L_xy, L_yy=c.L_xx,
        L_h=c.L_r, L_r=c.L_h, B=c.B if B is None else B, M_f=c.M_f, L_f=c.L_f, mu_f=c.mu_f,
    )
    return SaddleSpec(F=swapped, dim_x=spec.dim_y, dim_y=spec.dim_x, r=spec.h, h=spec.r,
                      Qx=spec.Qy, Qy=spec.Qx, constants=constants, counter=spec.counter)


__all__ = [
    "Approach1Config",
    "Approach2Config",
    "CompositeL",
    "InnerResult",
    "approach1_iterations",
    "composite_L",
    "delta_subgradient_of_max",
    "fgm_composite_solve",
    "first_delta",
    "inner_tolerance_small_y",
    "second_delta",
    "separable_bisection",
    "solve_dichotomy_outer",
    "solve_small_x",
    "solve_small_y",
    "swap_roles",
]
