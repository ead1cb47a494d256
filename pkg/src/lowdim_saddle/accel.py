"""Accelerated solvers for the high-dimensional parts.

Accelerated meta-algorithm (UM) for U = u + v with a prox-type subproblem,
its restarted form for strongly convex U, a sliding variant that solves the
subproblem with a nested restarted UM, and a fast gradient method driven by an
inexact (delta, L)-model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import Domain, ParameterError, Vector, as_vector, require_nonnegative, require_positive

GradFn = Callable[[Vector], Vector]
# v_prox(g, center, H) = argmin_y <g, y> + v(y) + H/2 ||y - center||^2
SubproblemSolver = Callable[[Vector, Vector, float], Vector]


@dataclass
class UmStats:
    grad_u: int = 0
    grad_v: int = 0
    subproblems: int = 0
    inner_iters: int = 0
    restarts: int = 0
    iters_per_restart: list[int] = field(default_factory=list)


@dataclass
class UmState:
    A: float
    y: Vector
    z: Vector
    z_tilde: Vector
    k: int = 0


def um_step_size(H: float) -> float:
    return 1.0 / (2.0 * H)


def um_coefficient(lam: float, A: float) -> float:
    """a_{k+1} = (lam + sqrt(lam^2 + 4 lam A)) / 2."""
    return 0.5 * (lam + math.sqrt(lam * lam + 4.0 * lam * A))


def um_run(
    u_grad: GradFn,
    v_prox: SubproblemSolver,
    H: float,
    K: int,
    z0: Vector,
    v_grad: GradFn | None = None,
    stats: UmStats | None = None,
    trace: list | None = None,
) -> Vector:
    """K steps of the accelerated meta-algorithm; returns y_K.

    ``H`` should be at least twice the gradient Lipschitz constant of ``u``.
    When ``v_grad`` is omitted, the gradient of v at the new point is taken
    from the optimality condition of the subproblem.
    """
    require_positive(H, "H")
    if K < 1:
        raise ParameterError("K must be positive")
    stats = stats if stats is not None else UmStats()
    z = as_vector(z0, "z0").copy()
    y = z.copy()
    A = 0.0
    lam = um_step_size(H)
    for k in range(K):
        a = um_coefficient(lam, A)
        A_next = A + a
        z_tilde = (A * y + a * z) / A_next
        g_tilde = u_grad(z_tilde)
        stats.grad_u += 1
        y = v_prox(g_tilde, z_tilde, H)
        stats.subproblems += 1
        if v_grad is None:
            gv = -g_tilde - H * (y - z_tilde)
        else:
            gv = v_grad(y)
            stats.grad_v += 1
        gu = u_grad(y)
        stats.grad_u += 1
        z = z - a * (gu + gv)
        A = A_next
        stats.inner_iters += 1
        if trace is not None:
            trace.append(UmState(A=A, y=y.copy(), z=z.copy(), z_tilde=z_tilde, k=k + 1))
    return y


def restart_length(H: float, mu: float) -> int:
    """Inner iterations per restart: ceil(sqrt(32 H / mu))."""
    require_positive(H, "H")
    require_positive(mu, "mu")
    return max(1, math.ceil(math.sqrt(32.0 * H / mu) - 1e-12))


def restart_count(mu: float, R: float, eps: float) -> int:
    """Logarithmic number of restarts: ceil(ln(mu R^2 / eps)), at least 1."""
    require_positive(mu, "mu")
    require_positive(eps, "eps")
    if R <= 0:
        return 1
    return max(1, math.ceil(math.log(mu * R * R / eps)))


def restart_gap_bound(mu: float, R: float, K: int) -> float:
    """Certified U(z_K) - U* after K restarts from distance R."""
    # each restart: gap <= mu R_k^2 / 8 and R_{k+1}^2 <= R_k^2 / 4
    return mu * R * R / 8.0 * 4.0 ** (-(K - 1))


def restarted_um(
    u_grad: GradFn,
    v_prox: SubproblemSolver,
    H: float,
    mu: float,
    K: int,
    z0: Vector,
    v_grad: GradFn | None = None,
    stats: UmStats | None = None,
) -> Vector:
    """Restarted UM for mu-strongly convex U; K restarts of ceil(sqrt(32H/mu)) steps."""
    require_positive(mu, "mu")
    if K < 1:
        raise ParameterError("K must be positive")
    stats = stats if stats is not None else UmStats()
    n_inner = restart_length(H, mu)
    z = as_vector(z0, "z0").copy()
    for _ in range(K):
        before = stats.inner_iters
        z = um_run(u_grad, v_prox, H, n_inner, z, v_grad=v_grad, stats=stats)
        stats.restarts += 1
        stats.iters_per_restart.append(stats.inner_iters - before)
    return z


def um_sliding(
    u_grad: GradFn,
    v_grad: GradFn,
    H: float,
    mu: float,
    L_v: float,
    eps_y: float,
    z0: Vector,
    stats: UmStats | None = None,
    R: float | None = None,
    inner_factor: float = 1e-3,
) -> Vector:
    """Restarted UM where each subproblem is itself solved by a restarted UM.

    The outer method touches ``u`` only; the subproblem
    min <grad u(z~), y> + v(y) + H/2 ||y - z~||^2 is handled by an inner
    restarted UM with strong convexity H/2 and step parameter 2 L_v. This
    separates the number of grad u and grad v evaluations.

    ``R`` bounds ||z0 - y*||; when omitted it is certified from the gradient
    at z0 via strong convexity.
    """
    require_positive(H, "H")
    require_positive(mu, "mu")
    require_nonnegative(L_v, "L_v")
    require_positive(eps_y, "eps_y")
    stats = stats if stats is not None else UmStats()
    z = as_vector(z0, "z0").copy()

    if R is None:
        g0 = u_grad(z) + v_grad(z)
        stats.grad_u += 1
        stats.grad_v += 1
        R = float(np.linalg.norm(g0)) / mu
    if R == 0:
        return z
    K = restart_count(mu, R, eps_y)
    eps_in = inner_factor * eps_y

    if L_v == 0:
        # v is affine: the subproblem has a closed form
        def v_prox(g, center, Hc):
            return center - g / Hc

        return restarted_um(u_grad, v_prox, H, mu, K, z, stats=stats)

    H_in = 2.0 * L_v

    def v_prox(g, center, Hc):
        mu_in = Hc / 2.0
        start_grad = v_grad(center)
        stats.grad_v += 1
        R_in = float(np.linalg.norm(g + start_grad)) / Hc
        if R_in == 0:
            return center.copy()
        K_in = restart_count(mu_in, R_in, eps_in)

        # inner: u_new = v, v_new(y) = <g, y> + Hc/2 ||y - center||^2 (closed form)
        def lin_quad_prox(g_new, c_new, H_new):
            return (Hc * center + H_new * c_new - g - g_new) / (Hc + H_new)

        def counted_v_grad(y):
            stats.grad_v += 1
            return v_grad(y)

        inner_stats = UmStats()
        y = restarted_um(counted_v_grad, lin_quad_prox, H_in, mu_in, K_in, center, stats=inner_stats)
        return y

    return restarted_um(u_grad, v_prox, H, mu, K, z, v_grad=v_grad, stats=stats)


# --- fast gradient method with a (delta, L)-model ------------------------------------


@dataclass
class ModelOracle:
    """Inexact (delta, L)-model of f with a strongly convex psi.

    ``prox_solve(u, weight, alpha, z)`` returns
    argmin_y weight/2 ||y - u||^2 + alpha psi(y, z) over the feasible set.
    ``model_at(z)`` returns ``(f_delta(z), psi(., z))`` and is used for checks.
    """

    prox_solve: Callable[[Vector, float, float, Vector], Vector]
    delta: float
    L: float
    mu: float
    model_at: Callable[[Vector], tuple[float, Callable[[Vector], float]]] | None = None


def composite_model(
    grad: GradFn,
    prox_step: Callable[[Vector, float], Vector],
    L: float,
    mu: float,
    delta: float = 0.0,
    quad: float = 0.0,
    value: Callable[[Vector], float] | None = None,
    phi: Callable[[Vector], float] | None = None,
) -> ModelOracle:
    """Model psi(y, z) = <grad(z), y - z> + phi(y) - phi(z) + quad/2 ||y - z||^2.

    ``prox_step(c1, c2)`` solves argmin <c1, y> + phi(y) + c2 ||y||^2 over the
    feasible set (phi may be zero, in which case it is a plain projection).
    """

    def prox_solve(u, weight, alpha, z):
        g = grad(z)
        c1 = g - (weight / alpha) * u - quad * z
        c2 = weight / (2.0 * alpha) + quad / 2.0
        return prox_step(c1, c2)

    model_at = None
    if value is not None:

        def model_at(z):
            g = grad(z)
            fz = value(z)
            phz = 0.0 if phi is None else phi(z)

            def psi(y):
                d = y - z
                extra = 0.0 if phi is None else phi(y) - phz
                return float(g @ d) + extra + 0.5 * quad * float(d @ d)

            return fz, psi

    return ModelOracle(prox_solve=prox_solve, delta=delta, L=L, mu=mu, model_at=model_at)


def largest_root(a: float, b: float, c: float) -> float:
    """Largest real root of a t^2 + b t + c = 0 (a > 0), cancellation-free."""
    disc = b * b - 4.0 * a * c
    if a <= 0 or disc < 0:
        raise ParameterError(f"quadratic {a} t^2 + {b} t + {c} has no real largest root")
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    r1 = q / a
    r2 = c / q if q != 0 else r1
    return max(r1, r2)


def fgm_alpha(A: float, mu: float, L: float) -> float:
    """alpha_{k+1}: largest root of (A + alpha)(1 + A mu) = L alpha^2."""
    b = 1.0 + A * mu
    alpha = largest_root(L, -b, -A * b)
    if not alpha > 0:
        raise ParameterError("step recurrence produced a non-positive root")
    return alpha


def fgm_bound(N: int, L: float, mu: float, R: float, delta: float = 0.0) -> float:
    """Gap guarantee after N steps: L R^2 exp(-(N-1)/2 sqrt(mu/L)) + (1 + sqrt(L/mu)) delta."""
    require_positive(L, "L")
    require_positive(mu, "mu")
    return L * R * R * math.exp(-0.5 * (N - 1) * math.sqrt(mu / L)) + (1.0 + math.sqrt(L / mu)) * delta


def fgm_iterations(L: float, mu: float, R: float, eps: float) -> int:
    """Smallest N whose deterministic part of the bound is at most eps."""
    require_positive(L, "L")
    require_positive(mu, "mu")
    require_positive(eps, "eps")
    ratio = L * R * R / eps
    if ratio <= 1:
        return 1
    return 1 + math.ceil(2.0 * math.sqrt(L / mu) * math.log(ratio))


def composite_distance_bound(grad_map_norm: float, L: float, mu: float) -> float:
    """Bound on ||y0 - y*|| from the norm of the gradient mapping at y0 (step 1/L)."""
    require_positive(L, "L")
    require_positive(mu, "mu")
    G = grad_map_norm
    return G / L + G * (1.0 + math.sqrt(1.0 + mu / L)) / mu


_A_LIMIT = 1e280


def fgm_model(
    oracle: ModelOracle,
    Q: Domain | None,
    mu: float,
    L: float,
    N: int,
    y0: Vector,
    callback: Callable[[int, Vector, float, float], bool] | None = None,
) -> Vector:
    """Fast gradient method for a (delta, L)-model with mu-strongly convex psi.

    ``callback(k, y_k, A_k, alpha_k)`` runs after every step; returning True
    stops early.
    """
    require_positive(mu, "mu")
    require_positive(L, "L")
    if L < mu:
        raise ParameterError("need L >= mu")
    if N < 1:
        raise ParameterError("N must be positive")
    y = as_vector(y0, "y0").copy()
    if Q is not None:
        y = Q.project(y)
    u = y.copy()
    A = 0.0
    for k in range(N):
        weight = 1.0 + A * mu
        alpha = fgm_alpha(A, mu, L)
        A_next = A + alpha
        if not A_next < _A_LIMIT:
            # the bound is below any representable gap; further steps only overflow
            break
        z = (alpha * u + A * y) / A_next
        u = oracle.prox_solve(u, weight, alpha, z)
        y = (alpha * u + A * y) / A_next
        A = A_next
        if callback is not None and callback(k + 1, y, A, alpha):
            break
    return y
