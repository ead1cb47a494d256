"""Ellipsoid method driven by (delta-)subgradients."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Protocol

import numpy as np

from .core import (
    BallDomain,
    InfeasibleError,
    ParameterError,
    RunReport,
    StateCorruptionError,
    Vector,
    as_vector,
    require_nonnegative,
    require_positive,
)


class SeparationOracle(Protocol):
    def contains(self, x: Vector) -> bool: ...

    def separate(self, x: Vector) -> Vector: ...


@dataclass(frozen=True)
class FunctionalSeparation:
    """Separation oracle built from two callables."""

    contains_fn: Callable[[Vector], bool]
    separate_fn: Callable[[Vector], Vector]

    def contains(self, x: Vector) -> bool:
        return bool(self.contains_fn(x))

    def separate(self, x: Vector) -> Vector:
        return self.separate_fn(x)


@dataclass(frozen=True)
class EllipsoidState:
    """Ellipsoid {x : (x - c)^T H^{-1} (x - c) <= 1} plus the incumbent."""

    c: Vector
    H: np.ndarray
    k: int = 0
    best_point: Vector | None = None
    best_value: float = math.inf

    @classmethod
    def from_ball(cls, ball: BallDomain) -> "EllipsoidState":
        n = ball.dim
        return cls(c=ball.center.copy(), H=ball.radius**2 * np.eye(n))

    def mahalanobis(self, x: Vector) -> float:
        d = np.asarray(x, dtype=float) - self.c
        return float(math.sqrt(max(d @ np.linalg.solve(self.H, d), 0.0)))

    def log_volume(self) -> float:
        """log sqrt(det H); the volume up to the unit-ball constant."""
        sign, logdet = np.linalg.slogdet(self.H)
        if sign <= 0:
            raise StateCorruptionError("shape matrix is not positive definite")
        return 0.5 * logdet


def ellipsoid_step(state: EllipsoidState, w: Vector) -> EllipsoidState:
    """Central cut through the center with normal ``w``."""
    w = as_vector(w, "w")
    n = state.c.size
    if n < 2:
        raise ParameterError("ellipsoid update needs dimension >= 2; use bisection for n = 1")
    if w.size != n:
        raise ParameterError("cut normal has the wrong dimension")
    Hw = state.H @ w
    wHw = float(w @ Hw)
    if not (wHw > 0 and math.isfinite(wHw)):
        raise StateCorruptionError(f"w^T H w = {wHw}; shape matrix lost definiteness")
    s = math.sqrt(wHw)
    b = Hw / s
    c = state.c - b / (n + 1)
    H = (n * n / (n * n - 1.0)) * (state.H - (2.0 / (n + 1)) * np.outer(b, b))
    H = 0.5 * (H + H.T)
    return replace(state, c=c, H=H, k=state.k + 1)


def _is_pd(H: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return False
    return True


def ellipsoid_iterations(n: int, B: float, R: float, rho: float, eps: float) -> int:
    """Smallest N with (B R / rho) exp(-N / (2 n^2)) <= eps, never below 2 n^2 ln(R / rho)."""
    require_positive(B, "B")
    require_positive(R, "R")
    require_positive(rho, "rho")
    require_positive(eps, "eps")
    need = 2 * n * n * math.log(B * R / (rho * eps))
    floor = 2 * n * n * math.log(R / rho)
    return max(1, math.ceil(max(need, floor)))


def ellipsoid_gap_bound(n: int, N: int, B: float, R: float, rho: float, delta: float = 0.0) -> float:
    """Guaranteed g(x_N) - g* after N steps; infinite if N is too short for the bound to apply."""
    if N < 2 * n * n * math.log(R / rho):
        return math.inf
    return B * R / rho * math.exp(-N / (2.0 * n * n)) + delta


def strongly_convex_argument_bound(gap: float, mu: float) -> float:
    """Distance to the minimizer implied by a value gap: sqrt(2 gap / mu)."""
    if gap < 0:
        raise ParameterError(f"gap must be nonnegative, got {gap}")
    require_positive(mu, "mu")
    return math.sqrt(2.0 * gap / mu)


def ellipsoid_minimize(
    oracle: Callable[[Vector], tuple[float, Vector]],
    feasible: SeparationOracle,
    ball: BallDomain,
    N: int,
    delta: float = 0.0,
    callback: Callable[[EllipsoidState, Vector, float], bool] | None = None,
    trace: list | None = None,
) -> tuple[Vector, RunReport]:
    """Minimize a convex g over a body given by a separation oracle.

    Parameters
    ----------
    oracle : callable
        Maps a feasible point to ``(value, w)`` where ``w`` is a
        ``delta``-subgradient of g. ``w == 0`` stops the method.
    feasible : SeparationOracle
        Membership test and separating hyperplanes for the feasible body.
    ball : BallDomain
        Initial ellipsoid; it must contain the feasible body.
    N : int
        Number of cuts (feasibility cuts count too).
    delta : float
        Declared subgradient slack, only recorded in the report.
    callback : callable, optional
        ``callback(state, point, value)`` after each feasible evaluation;
        returning True stops early.
    trace : list, optional
        If given, every state is appended (for diagnostics).

    Returns
    -------
    x : ndarray
        Feasible center with the smallest observed value.
    report : RunReport
    """
    if N < 1:
        raise ParameterError("N must be positive")
    require_nonnegative(delta, "delta")
    report = RunReport(method="ellipsoid", n=ball.dim)
    report.extra["delta"] = delta
    if ball.dim == 1:
        x, it = _bisection(oracle, feasible, ball, N, callback, report)
        report.outer_iters = it
        return x, report

    state = EllipsoidState.from_ball(ball)
    if trace is not None:
        trace.append(state)
    feasible_evals = 0
    stopped = False
    for _ in range(N):
        x = state.c
        if feasible.contains(x):
            value, w = oracle(x)
            feasible_evals += 1
            if value < state.best_value:
                state = replace(state, best_point=x.copy(), best_value=float(value))
            if callback is not None and callback(state, x, value):
                stopped = True
                break
            if not np.any(w):
                report.extra["zero_subgradient"] = True
                stopped = True
                break
        else:
            w = feasible.separate(x)
        try:
            state = ellipsoid_step(state, w)
            if not _is_pd(state.H):
                raise StateCorruptionError("Cholesky factorization of the shape matrix failed")
        except StateCorruptionError as exc:
            exc.best_point = state.best_point
            exc.best_value = state.best_value
            exc.steps = state.k
            raise
        if trace is not None:
            trace.append(state)

    report.outer_iters = state.k
    report.extra["feasible_evaluations"] = feasible_evals
    report.extra["stopped_by_callback"] = stopped
    report.extra["final_state"] = state
    if state.best_point is None:
        raise InfeasibleError("no feasible center was visited")
    report.residual = state.best_value
    return state.best_point, report


def _bisection(oracle, feasible, ball, N, callback, report):
    """One-dimensional analogue: halve the interval by the sign of w."""
    lo = float(ball.center[0] - ball.radius)
    hi = float(ball.center[0] + ball.radius)
    best_x, best_v = None, math.inf
    it = 0
    for it in range(1, N + 1):
        x = np.array([0.5 * (lo + hi)])
        if feasible.contains(x):
            value, w = oracle(x)
            if value < best_v:
                best_x, best_v = x.copy(), float(value)
            if callback is not None and callback(None, x, value):
                break
            if w[0] == 0:
                break
        else:
            w = feasible.separate(x)
        if w[0] > 0:
            hi = x[0]
        else:
            lo = x[0]
    if best_x is None:
        raise InfeasibleError("no feasible midpoint was visited")
    report.residual = best_v
    return best_x, it
