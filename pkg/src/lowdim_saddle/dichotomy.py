"""One-dimensional and recursive multidimensional dichotomy with inexact gradients."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

import numpy as np

from .core import BoxDomain, ParameterError, RunReport, Vector, as_vector, require_positive


class StopDecision(enum.Enum):
    """Outcome of the subproblem test for one cutting hyperplane.

    CUT_UPPER discards the upper half (gradient component positive),
    CUT_LOWER discards the lower half.
    """

    CONTINUE = "continue"
    CUT_LOWER = "cut_lower"
    CUT_UPPER = "cut_upper"
    ACCEPT = "accept_point"


@dataclass(frozen=True)
class DichotomyConfig:
    """Constants of f on the box: Lipschitz M_f, smoothness L_f, strong convexity mu_f.

    ``eps`` is the target accuracy in function value and ``R`` the diagonal of
    the initial box (filled from the box when omitted). ``L_y`` is the
    smoothness constant used when converting gradient accuracy into an inner
    function gap; it defaults to ``L_f``.
    """

    M_f: float
    L_f: float
    mu_f: float
    eps: float
    R: float | None = None
    L_y: float | None = None

    def __post_init__(self) -> None:
        for name in ("M_f", "L_f", "mu_f", "eps"):
            require_positive(getattr(self, name), name)
        if self.R is not None:
            require_positive(self.R, "R")
        if self.L_y is None:
            object.__setattr__(self, "L_y", self.L_f)

    @property
    def C_f(self) -> float:
        R = self._R()
        return max(1.0 / self.L_f, R / (self.M_f + self.L_f * R))

    def _R(self) -> float:
        if self.R is None:
            raise ParameterError("config needs R (diagonal of the initial box)")
        return self.R


@dataclass
class InexactGradSpec:
    """Approximate gradient nu(x) with error bound delta_tilde(x).

    If ``refine`` is supplied it is used instead: ``refine(x, demand)`` must
    return ``(nu, achieved)`` with ``achieved`` an error bound that is at most
    ``demand`` whenever the oracle can deliver it.
    """

    nu: Callable[[Vector], Vector] | None = None
    delta_tilde: Callable[[Vector], float] | None = None
    refine: Callable[[Vector, float], tuple[Vector, float]] | None = None

    def __post_init__(self) -> None:
        if self.nu is None and self.refine is None:
            raise ParameterError("need nu or refine")

    def evaluate(self, x: Vector, demand: float) -> tuple[Vector, float]:
        if self.refine is not None:
            g, dt = self.refine(x, demand)
            return np.asarray(g, dtype=float), float(dt)
        g = np.asarray(self.nu(x), dtype=float)
        dt = 0.0 if self.delta_tilde is None else float(self.delta_tilde(x))
        return g, dt


def stop_check(nu_perp: float, Delta: float, delta_tilde: float, cfg: DichotomyConfig) -> StopDecision:
    """Decide a cut, an acceptance or further refinement of a subproblem point."""
    R = cfg._R()
    lhs = cfg.C_f * delta_tilde + Delta
    a = abs(nu_perp)
    if lhs < a / cfg.L_f:
        return StopDecision.CUT_UPPER if nu_perp > 0 else StopDecision.CUT_LOWER
    if lhs <= (cfg.eps - R * a) / (cfg.M_f + cfg.L_f * R):
        return StopDecision.ACCEPT
    return StopDecision.CONTINUE


def sweep_budget(cfg: DichotomyConfig) -> int:
    """ceil(log2(4 R (M_f + 2 L_f R) / (L_f eps))), at least 1."""
    R = cfg._R()
    ratio = 4.0 * R * (cfg.M_f + 2.0 * cfg.L_f * R) / (cfg.L_f * cfg.eps)
    return max(1, math.ceil(math.log2(ratio))) if ratio > 1 else 1


def recursion_cost_bound(n: int, R: float, eps: float, cfg: DichotomyConfig) -> int:
    """ceil(2^((n^2+n)/2) log2^n(C R / eps)) with C = max(M, 4(M+2LR)/L, 128 L^2/mu)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    require_positive(R, "R")
    require_positive(eps, "eps")
    M, L, mu = cfg.M_f, cfg.L_f, cfg.mu_f
    C = max(M, 4.0 * (M + 2.0 * L * R) / L, 128.0 * L * L / mu)
    ratio = C * R / eps
    if ratio <= 1:
        return 1
    return max(1, math.ceil(2.0 ** ((n * n + n) / 2.0) * math.log2(ratio) ** n))


def subproblem_eps(eps: float, cfg: DichotomyConfig, R: float) -> float:
    """Accuracy for a hyperplane subproblem of a level with diagonal R: mu eps^2 / (128 L^2 R^2)."""
    return cfg.mu_f * eps * eps / (128.0 * cfg.L_f**2 * R * R)


def dichotomy_1d(
    grad: Callable[[float], float],
    interval: tuple[float, float],
    eps_arg: float,
    trace: list | None = None,
) -> float:
    """Bisection on the sign of the derivative; returns the final bracket midpoint."""
    a, b = float(interval[0]), float(interval[1])
    if b < a:
        raise ParameterError("interval must satisfy a <= b")
    require_positive(eps_arg, "eps_arg")
    steps = math.ceil(math.log2((b - a) / eps_arg)) if b - a > eps_arg else 0
    for _ in range(steps):
        m = 0.5 * (a + b)
        if grad(m) >= 0:
            b = m
        else:
            a = m
        if trace is not None:
            trace.append((a, b))
    return 0.5 * (a + b)


# --- multidimensional recursion -----------------------------------------------------


@dataclass
class _Event:
    x: Vector
    nu: Vector
    dt: float
    delta: float
    final: bool


class _Stop(Exception):
    def __init__(self, x: Vector):
        self.x = x


class _Budget(Exception):
    pass


def _corner_distance(x: Vector, lo: Vector, hi: Vector) -> float:
    return float(np.linalg.norm(np.maximum(x - lo, hi - x)))


@dataclass
class _Run:
    grad: InexactGradSpec
    cfg: DichotomyConfig
    budget: int
    simplex_bound: float | None
    callback: Callable | None
    on_cut: Callable | None
    max_refine: int = 40
    evals: int = 0
    cuts: int = 0
    fallback_cuts: int = 0
    exhausted_levels: int = 0
    tightenings: int = 0
    accepted_depths: list[int] = field(default_factory=list)
    subproblems: dict[int, int] = field(default_factory=dict)

    def evaluate(self, x: Vector, demand: float) -> tuple[Vector, float]:
        if self.evals >= self.budget:
            raise _Budget()
        self.evals += 1
        nu, dt = self.grad.evaluate(x, demand)
        if self.callback is not None and self.callback(x, nu, dt):
            raise _Stop(x.copy())
        return nu, dt

    def level(self, lo: Vector, hi: Vector, free: list[int], eps: float, R: float,
              depth: int) -> Iterator[_Event]:
        """Refine the problem restricted to the box [lo, hi] over coordinates ``free``.

        Yields every evaluated point with a bound on its distance to this
        level's minimizer. A ``final`` event certifies eps-optimality; if the
        consumer keeps iterating, the level continues with a tighter eps.
        """
        mu = self.cfg.mu_f
        while True:
            cfg = replace(self.cfg, eps=eps, R=R)
            accepted = None
            for _ in range(sweep_budget(cfg)):
                if depth == 0 and np.linalg.norm(hi - lo) <= self.cfg.eps / self.cfg.M_f:
                    return
                for i in free:
                    if hi[i] <= lo[i]:
                        continue
                    c = 0.5 * (lo[i] + hi[i])
                    if self.simplex_bound is not None and lo.sum() - lo[i] + c > self.simplex_bound:
                        # the section misses the simplex: everything feasible lies below c
                        self._cut(lo, hi, i, c, StopDecision.CUT_UPPER, depth)
                        continue
                    rest = [j for j in free if j != i]
                    if not rest:
                        x = lo.copy()
                        x[i] = c
                        nu, dt, decision = self._point_decision(x, i, cfg, 0.5 * (hi[i] - lo[i]))
                        events = [(_Event(x, nu, dt, 0.0, True), decision)]
                    else:
                        events = self._child_events(lo, hi, i, c, rest, eps, cfg, depth)
                    last = None
                    decided = False
                    for ev, decision in events:
                        last = ev
                        if decision is StopDecision.ACCEPT:
                            accepted = ev
                            break
                        if decision is not StopDecision.CONTINUE:
                            self._cut(lo, hi, i, c, decision, depth)
                            decided = True
                        yield _Event(ev.x, ev.nu, ev.dt, _corner_distance(ev.x, lo, hi), False)
                        if decided:
                            break
                    if accepted is not None:
                        break
                    if not decided:
                        # subproblem ran out of sweeps without a certified decision
                        self.fallback_cuts += 1
                        nu_i = 0.0 if last is None else last.nu[i]
                        dec = StopDecision.CUT_LOWER if nu_i < 0 else StopDecision.CUT_UPPER
                        self._cut(lo, hi, i, c, dec, depth)
                if accepted is not None:
                    break
            if accepted is None:
                self.exhausted_levels += depth > 0
                return
            self.accepted_depths.append(depth)
            delta = min(_corner_distance(accepted.x, lo, hi), math.sqrt(2.0 * eps / mu))
            yield _Event(accepted.x, accepted.nu, accepted.dt, delta, True)
            if depth == 0:
                return
            # the parent could not decide with this accuracy: tighten and go on
            eps /= 16.0
            self.tightenings += 1

    def _child_events(self, lo, hi, i, c, rest, eps, cfg, depth):
        child_lo, child_hi = lo.copy(), hi.copy()
        child_lo[i] = child_hi[i] = c
        face = None
        if self.simplex_bound is not None and len(rest) == 1:
            j = rest[0]
            room = self.simplex_bound - (child_lo.sum() - child_lo[j])
            if room < child_hi[j]:
                face = j
            child_hi[j] = min(child_hi[j], max(room, child_lo[j]))
        eps_child = subproblem_eps(eps, self.cfg, cfg.R)
        R_child = max(float(np.linalg.norm(child_hi - child_lo)), np.finfo(float).tiny)
        self.subproblems[depth + 1] = self.subproblems.get(depth + 1, 0) + 1
        gen = self.level(child_lo, child_hi, rest, eps_child, R_child, depth + 1)
        try:
            for ev in gen:
                if face is None:
                    yield ev, stop_check(ev.nu[i], ev.delta, ev.dt, cfg)
                    continue
                # the segment ends on the face x_i + x_j = bound: the value of the
                # section moves with x_i by d_i f + lambda, lambda = max(-d_j f, 0)
                # the face multiplier; both terms carry the point and gradient errors
                nu = ev.nu.copy()
                nu[i] = ev.nu[i] + max(-ev.nu[face], 0.0)
                shifted = _Event(ev.x, nu, 2.0 * ev.dt, 2.0 * ev.delta, ev.final)
                yield shifted, stop_check(nu[i], shifted.delta, shifted.dt, cfg)
        finally:
            gen.close()

    def _point_decision(self, x, i, cfg, half_len):
        # requested gradient accuracy keeps C_f * delta_tilde below the bracket scale
        demand = self.cfg.L_f * half_len
        nu, dt = self.evaluate(x, demand)
        decision = stop_check(nu[i], 0.0, dt, cfg)
        tries = 0
        while decision is StopDecision.CONTINUE and dt > 0 and self.grad.refine is not None:
            if tries >= self.max_refine:
                break
            R = cfg._R()
            a = abs(nu[i])
            room = max(a / cfg.L_f, (cfg.eps - R * a) / (cfg.M_f + cfg.L_f * R)) / cfg.C_f
            demand = 0.5 * room if room > 0 else 0.25 * min(demand, dt)
            if not demand > 0:
                break
            nu, dt = self.evaluate(x, demand)
            decision = stop_check(nu[i], 0.0, dt, cfg)
            tries += 1
        return nu, dt, decision

    def _cut(self, lo, hi, i, c, decision, depth):
        if decision is StopDecision.CUT_UPPER:
            hi[i] = c
        else:
            lo[i] = c
        self.cuts += 1
        if self.on_cut is not None:
            self.on_cut(depth, i, lo.copy(), hi.copy())


def multidim_dichotomy(
    grad: InexactGradSpec,
    Q: BoxDomain,
    cfg: DichotomyConfig,
    simplex_bound: float | None = None,
    callback: Callable[[Vector, Vector, float], bool] | None = None,
    on_cut: Callable[[int, int, Vector, Vector], None] | None = None,
    budget: int | None = None,
) -> tuple[Vector, RunReport]:
    """Minimize a smooth convex f over a box by recursive hyperplane dichotomy.

    Each sweep bisects every coordinate: the restriction of f to the middle
    hyperplane is minimized recursively until the gradient component across
    the hyperplane certifies which half keeps the minimizer, or certifies that
    the current point is already eps-optimal.

    Parameters
    ----------
    grad : InexactGradSpec
        Approximate gradient with its error bound.
    Q : BoxDomain
        Search box (dimension 1 to 5).
    cfg : DichotomyConfig
        Constants; ``cfg.R`` defaults to the diagonal of ``Q``.
    simplex_bound : float, optional
        Restrict the search to {x >= 0, sum(x) <= simplex_bound} inside Q (n = 2 only).
    callback : callable, optional
        ``callback(x, nu, delta_tilde)`` after every gradient evaluation;
        returning True stops and returns that point.
    on_cut : callable, optional
        ``on_cut(depth, coordinate, lower, upper)`` after every cut.
    budget : int, optional
        Maximum number of gradient evaluations; defaults to
        ``recursion_cost_bound``.

    Returns
    -------
    x : ndarray
    report : RunReport
        ``extra`` holds evaluation, cut and subproblem counts; a flag is set if
        the evaluation budget ran out.
    """
    n = Q.dim
    if not 1 <= n <= 5:
        raise ParameterError("multidimensional dichotomy supports dimensions 1 to 5")
    R = cfg.R if cfg.R is not None else Q.diameter
    if R <= 0:
        return Q.center, RunReport(method="dichotomy", n=n)
    cfg = replace(cfg, R=R)
    if budget is None:
        budget = recursion_cost_bound(n, R, cfg.eps, cfg)
    lo, hi = Q.lower.copy(), Q.upper.copy()
    if simplex_bound is not None:
        if n != 2:
            raise ParameterError("the simplex restriction is supported in two dimensions")
        lo = np.maximum(lo, 0.0)
        hi = np.minimum(hi, simplex_bound)
    run = _Run(grad=grad, cfg=cfg, budget=budget, simplex_bound=simplex_bound,
               callback=callback, on_cut=on_cut)
    report = RunReport(method="dichotomy", n=n, epsilon=cfg.eps)
    x = None
    sweeps = 0
    try:
        for ev in run.level(lo, hi, list(range(n)), cfg.eps, R, 0):
            if ev.final:
                x = ev.x
                report.converged = True
                break
    except _Stop as stop:
        x = stop.x
        report.extra["stopped_by_callback"] = True
    except _Budget:
        report.flag("evaluation budget exhausted")
    if x is None:
        x = 0.5 * (lo + hi)
        if not report.flags:
            report.converged = True
    sweeps = run.cuts // max(n, 1)
    report.outer_iters = sweeps
    report.extra.update(
        evaluations=run.evals,
        cuts=run.cuts,
        fallback_cuts=run.fallback_cuts,
        exhausted_levels=run.exhausted_levels,
        tightenings=run.tightenings,
        subproblems=dict(run.subproblems),
        accepted_depths=list(run.accepted_depths),
        budget=budget,
        final_box=(lo.copy(), hi.copy()),
    )
    return as_vector(x), report
