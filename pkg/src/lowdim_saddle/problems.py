"""Problem builders: Lagrangian duals of constrained convex programs.

Two families are provided: a sparse least-squares objective on a ball with
max-aggregated affine constraints, and a regularized log-sum-exp objective
with linear constraints. Instances are generated from a seed and can be
serialized to JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    BallDomain,
    BoxDomain,
    CallCounter,
    Coupling,
    ParameterError,
    SaddleConstants,
    SaddleSpec,
    Vector,
    as_vector,
    linear_prox,
    make_rng,
    quadratic_prox,
    require_nonnegative,
    require_positive,
    spectral_norm,
)


class SlaterViolationError(ValueError):
    """The proposed Slater point is not strictly feasible."""


# --- constraints ------------------------------------------------------------------


@dataclass(frozen=True)
class AffineConstraint:
    """g(x) = <c, x> + d."""

    c: Vector
    d: float

    def value(self, x: Vector) -> float:
        return float(self.c @ x + self.d)

    def subgradient(self, x: Vector) -> Vector:
        return self.c


@dataclass(frozen=True)
class MaxConstraint:
    """Pointwise maximum of affine pieces; ties resolve to the smallest index."""

    C: np.ndarray
    d: Vector

    def active(self, x: Vector) -> int:
        return int(np.argmax(self.C @ x + self.d))

    def value(self, x: Vector) -> float:
        return float(np.max(self.C @ x + self.d))

    def subgradient(self, x: Vector) -> Vector:
        return self.C[self.active(x)]

    @property
    def lipschitz(self) -> float:
        return float(np.max(np.linalg.norm(self.C, axis=1)))


def aggregate_max_constraints(pieces: Sequence[AffineConstraint]) -> tuple[MaxConstraint, MaxConstraint]:
    """Split m affine constraints into max of the first floor(m/2) and max of the rest."""
    m = len(pieces)
    if m < 2:
        raise ParameterError("need at least two constraints")
    k = m // 2
    C = np.array([p.c for p in pieces], dtype=float)
    d = np.array([p.d for p in pieces], dtype=float)
    return MaxConstraint(C[:k], d[:k]), MaxConstraint(C[k:], d[k:])


@dataclass
class ConstrainedProgram:
    """min f(x) s.t. g_i(x) <= 0, x in a ball.

    ``f`` returns the objective value; ``mu_f`` is its strong convexity and
    ``M_g`` a common Lipschitz constant of the constraints.
    """

    f: Callable[[Vector], float]
    g: Sequence
    slater_point: Vector
    domain: BallDomain | None = None
    mu_f: float = 0.0
    M_g: float = 0.0
    f_lower: float = 0.0

    def constraint_values(self, x: Vector) -> Vector:
        return np.array([gi.value(x) for gi in self.g])

    @property
    def gamma(self) -> float:
        return float(np.min(-self.constraint_values(self.slater_point)))


def dual_localizer(p: ConstrainedProgram) -> tuple[BoxDomain, float]:
    """Box {0 <= y_k <= (f(x0) - f_lower)/gamma} holding every optimal multiplier.

    The same number bounds ||y*||_1, so it is also the simplex bound.
    """
    gamma = p.gamma
    if not gamma > 0:
        raise SlaterViolationError(f"Slater point is not strictly feasible (gamma = {gamma})")
    bound = (p.f(p.slater_point) - p.f_lower) / gamma
    if bound < 0:
        raise ParameterError("f_lower exceeds f at the Slater point")
    m = len(p.g)
    return BoxDomain(np.zeros(m), np.full(m, bound)), float(bound)


def dual_gradient_lipschitz(mu_f: float, M_g: float) -> float:
    """Lipschitz constant of the dual gradient: M_g^2 / mu_f."""
    require_positive(mu_f, "mu_f")
    require_nonnegative(M_g, "M_g")
    return M_g * M_g / mu_f


def kkt_stop(lam: Vector, g_vals: Vector, eps: float) -> bool:
    """|lam^T g| <= eps/2 and g_i <= 0 wherever lam_i = 0."""
    lam = np.asarray(lam, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    if abs(float(lam @ g_vals)) > eps / 2.0:
        return False
    return bool(np.all(g_vals[lam == 0] <= 0))


# --- instances ----------------------------------------------------------------------


@dataclass
class QuadraticInstance:
    """f(x) = 1/2 ||A x - b||^2 on the ball ||x|| <= r, constraints <c_i, x> + d_i <= 0."""

    A: np.ndarray
    b: Vector
    C: np.ndarray
    d: Vector
    r: float
    sigma: float
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def objective(self, x: Vector) -> float:
        res = self.A @ x - self.b
        return 0.5 * float(res @ res)

    def constraints(self) -> list[AffineConstraint]:
        return [AffineConstraint(self.C[i], float(self.d[i])) for i in range(self.m)]


@dataclass
class LogSumExpInstance:
    """log2(1 + sum exp(alpha_k x_k)) + mu_x/2 ||x||^2 subject to B x <= c.

    ``B`` has one row per constraint (n rows) and one column per primal
    coordinate (m columns).
    """

    alpha: Vector
    B: np.ndarray
    c: Vector
    mu_x: float
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def lse(self, x: Vector) -> float:
        t = self.alpha * x
        return float(np.logaddexp.reduce(np.concatenate(([0.0], t)))) / math.log(2.0)

    def lse_grad(self, x: Vector) -> Vector:
        t = self.alpha * x
        top = max(0.0, float(t.max()))
        e = np.exp(t - top)
        return self.alpha * e / ((math.exp(-top) + e.sum()) * math.log(2.0))

    def objective(self, x: Vector) -> float:
        return self.lse(x) + 0.5 * self.mu_x * float(x @ x)

    def constraint_values(self, x: Vector) -> Vector:
        return self.B @ x - self.c


def generate_quadratic(n: int, m: int, seed: int, sigma: float = 0.005, r: float = 5.0) -> QuadraticInstance:
    """Random instance: diag(A) ~ U(0, 1.1), off-diagonal nonzeros at rate sigma ~ U(0, 1),
    b ~ U(0, 0.5), c_i, d_i ~ U(0, 0.1)."""
    if n < 1 or m < 2:
        raise ParameterError("need n >= 1 and m >= 2")
    rng = make_rng(seed)
    A = rng.uniform(0.0, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < sigma)
    np.fill_diagonal(A, rng.uniform(0.0, 1.1, size=n))
    # a zero diagonal would break A_ii > 0
    diag = np.diag(A).copy()
    diag[diag == 0] = np.finfo(float).eps
    np.fill_diagonal(A, diag)
    b = rng.uniform(0.0, 0.5, size=n)
    C = rng.uniform(0.0, 0.1, size=(m, n))
    d = rng.uniform(0.0, 0.1, size=m)
    return QuadraticInstance(A=A, b=b, C=C, d=d, r=r, sigma=sigma, seed=seed)


def generate_logsumexp(n: int, m: int, seed: int, alpha0: float = 1e-3, k: float = 1e3,
                       mu_x: float = 1e-3) -> LogSumExpInstance:
    """Random instance: alpha ~ U(-alpha0, alpha0), B ~ U(-k, k) of shape (n, m), c = 1."""
    if n < 1 or m < 1:
        raise ParameterError("dims must be positive")
    rng = make_rng(seed)
    alpha = rng.uniform(-alpha0, alpha0, size=m)
    B = rng.uniform(-k, k, size=(n, m))
    return LogSumExpInstance(alpha=alpha, B=B, c=np.ones(n), mu_x=mu_x, seed=seed)


def generate_instance(kind: str, dims: tuple[int, int], seed: int, **params):
    """Deterministic instance of the given kind; ``dims = (n, m)``."""
    n, m = dims
    if kind == "quadratic":
        return generate_quadratic(n, m, seed, **params)
    if kind == "logsumexp":
        return generate_logsumexp(n, m, seed, **params)
    raise ParameterError(f"unknown instance kind {kind!r}")


# --- serialization ----------------------------------------------------------------------


def _matrix_to_json(M: np.ndarray) -> dict:
    return {"rows": M.shape[0], "cols": M.shape[1], "data": M.ravel(order="F").tolist()}


def _matrix_from_json(obj: dict) -> np.ndarray:
    return np.array(obj["data"], dtype=float).reshape((obj["rows"], obj["cols"]), order="F")


def instance_to_json(inst) -> str:
    if isinstance(inst, QuadraticInstance):
        doc = {"kind": "quadratic", "seed": inst.seed, "A": _matrix_to_json(inst.A),
               "b": inst.b.tolist(), "C": _matrix_to_json(inst.C), "d": inst.d.tolist(),
               "r": inst.r, "sigma": inst.sigma}
    elif isinstance(inst, LogSumExpInstance):
        doc = {"kind": "logsumexp", "seed": inst.seed, "alpha": inst.alpha.tolist(),
               "B": _matrix_to_json(inst.B), "c": inst.c.tolist(), "mu_x": inst.mu_x}
    else:
        raise ParameterError(f"cannot serialize {type(inst).__name__}")
    return json.dumps(doc)


def instance_from_json(text: str):
    doc = json.loads(text)
    kind = doc.get("kind")
    if kind == "quadratic":
        return QuadraticInstance(A=_matrix_from_json(doc["A"]), b=np.array(doc["b"]),
                                 C=_matrix_from_json(doc["C"]), d=np.array(doc["d"]),
                                 r=float(doc["r"]), sigma=float(doc["sigma"]), seed=doc["seed"])
    if kind == "logsumexp":
        return LogSumExpInstance(alpha=np.array(doc["alpha"]), B=_matrix_from_json(doc["B"]),
                                 c=np.array(doc["c"]), mu_x=float(doc["mu_x"]), seed=doc["seed"])
    raise ParameterError(f"unknown instance kind {kind!r}")


# --- quadratic dual ------------------------------------------------------------------------


def quadratic_slater_point(inst: QuadraticInstance, grid: int = 400) -> Vector:
    """Strictly feasible point along -1 inside the ball minimizing f(x)/gamma.

    All constraint normals are nonnegative, so moving along -1 decreases every
    constraint.
    """
    n = inst.n
    direction = -np.ones(n) / math.sqrt(n)
    best, best_ratio = None, math.inf
    for t in np.linspace(0.0, inst.r, grid + 1)[1:]:
        x = t * direction
        gamma = float(np.min(-(inst.C @ x + inst.d)))
        if gamma <= 0:
            continue
        ratio = inst.objective(x) / gamma
        if ratio < best_ratio:
            best, best_ratio = x, ratio
    if best is None:
        raise SlaterViolationError("no strictly feasible point along -1 inside the ball")
    return best


@dataclass
class QuadraticDual:
    """Dual of the quadratic instance over the triangle {lam >= 0, lam1 + lam2 <= Omega}.

    phi(lam) = min_{||x|| <= r} f(x) + lam1 g1(x) + lam2 g2(x); the inner minimum
    is approximated by a projected subgradient method with a fixed budget, so
    the returned gradient g(x_delta(lam)) is a delta-supergradient.
    """

    inst: QuadraticInstance
    g1: MaxConstraint
    g2: MaxConstraint
    slater_point: Vector
    gamma: float
    Omega: float
    M_g: float
    mu_f: float
    norm_A: float
    inner_iters: int = 800
    warm_start: bool = True
    counter: CallCounter = field(default_factory=CallCounter)
    _last_x: Vector | None = None

    @property
    def dim(self) -> int:
        return 2

    @property
    def ball(self) -> BallDomain:
        return BallDomain(np.zeros(self.inst.n), self.inst.r)

    @property
    def lipschitz(self) -> float:
        return dual_gradient_lipschitz(self.mu_f, self.M_g) if self.mu_f > 0 else math.inf

    def g_values(self, x: Vector) -> Vector:
        return np.array([self.g1.value(x), self.g2.value(x)])

    def lagrangian(self, x: Vector, lam: Vector) -> float:
        return self.inst.objective(x) + float(lam @ self.g_values(x))

    def inner_solve(self, lam: Vector, iters: int | None = None, x0: Vector | None = None) -> Vector:
        """Projected subgradient method with steps R / (M sqrt(k)); returns the best iterate."""
        inst = self.inst
        iters = self.inner_iters if iters is None else iters
        ball = self.ball
        x = np.zeros(inst.n) if x0 is None else ball.project(x0)
        R = 2.0 * inst.r
        M = self.norm_A * (self.norm_A * inst.r + float(np.linalg.norm(inst.b))) + float(np.sum(lam)) * self.M_g
        best, best_val = x, self.lagrangian(x, lam)
        AtA, Atb = inst.A.T @ inst.A, inst.A.T @ inst.b
        for k in range(1, iters + 1):
            s = AtA @ x - Atb + lam[0] * self.g1.subgradient(x) + lam[1] * self.g2.subgradient(x)
            x = ball.project(x - (R / (M * math.sqrt(k))) * s)
            val = self.lagrangian(x, lam)
            if val < best_val:
                best, best_val = x, val
        self.counter.add("grad_x", iters)
        return best

    def evaluate(self, lam: Vector) -> tuple[float, Vector, Vector]:
        """Return (phi estimate, x_delta(lam), g(x_delta(lam)))."""
        lam = np.asarray(lam, dtype=float)
        self.counter.add("grad_y")
        x0 = self._last_x if self.warm_start else None
        x = self.inner_solve(lam, x0=x0)
        self._last_x = x
        gv = self.g_values(x)
        return self.lagrangian(x, lam), x, gv


def build_quadratic_dual(inst: QuadraticInstance, inner_iters: int = 800, warm_start: bool = True) -> QuadraticDual:
    g1, g2 = aggregate_max_constraints(inst.constraints())
    x_hat = quadratic_slater_point(inst)
    program = ConstrainedProgram(f=inst.objective, g=[g1, g2], slater_point=x_hat)
    _, Omega = dual_localizer(program)
    M_g = max(g1.lipschitz, g2.lipschitz)
    sv = np.linalg.svd(inst.A, compute_uv=False)
    return QuadraticDual(
        inst=inst, g1=g1, g2=g2, slater_point=x_hat, gamma=program.gamma, Omega=Omega,
        M_g=M_g, mu_f=float(sv[-1] ** 2), norm_A=float(sv[0]), inner_iters=inner_iters,
        warm_start=warm_start,
    )


# --- log-sum-exp dual ------------------------------------------------------------------------


def logsumexp_primal_radius(inst: LogSumExpInstance, Omega: float) -> float:
    """Smallest R with mu_x/2 R^2 >= log2(m+1) + Omega ||c||_1."""
    return math.sqrt(2.0 * (math.log2(inst.m + 1) + Omega * float(np.abs(inst.c).sum())) / inst.mu_x)


def build_logsumexp_dual(inst: LogSumExpInstance, bounded_x: bool = False) -> SaddleSpec:
    """Saddle form min_x max_{y in Q_y} r(x) + F(x, y) - h(y) of the constrained problem.

    r(x) = mu_x/2 ||x||^2, F(x, y) = LSE(x) + y^T B x, h(y) = y^T c.
    The dual phi(y) = min_x r + F - h is concave; its strong concavity is
    bounded below by sigma_min(B)^2 / (mu_x + L_xx) (conjugate of a smooth
    function) and its gradient is ||B||^2 / mu_x Lipschitz.

    By default x is unconstrained: the strong concavity bound needs the inner
    minimizer to be interior for every y in Q_y. With ``bounded_x`` the ball
    of radius ``logsumexp_primal_radius`` (which holds the primal solution)
    is imposed instead.
    """
    n, m = inst.n, inst.m
    x0 = np.zeros(m)
    program = ConstrainedProgram(
        f=inst.objective,
        g=[AffineConstraint(inst.B[i], -float(inst.c[i])) for i in range(n)],
        slater_point=x0,
    )
    Qy, Omega = dual_localizer(program)
    R_x = logsumexp_primal_radius(inst, Omega)
    Qx = BallDomain(np.zeros(m), R_x) if bounded_x else None
    norm_B = spectral_norm(inst.B)
    sv = np.linalg.svd(inst.B, compute_uv=False)
    sigma_min = float(sv[-1]) if n <= m else 0.0
    L_xx = float(np.max(inst.alpha**2)) / math.log(2.0)
    mu_dual = sigma_min**2 / (inst.mu_x + L_xx)
    L_dual = dual_gradient_lipschitz(inst.mu_x, norm_B)
    # ||x(y)|| <= (||grad LSE|| + ||B^T y||) / mu_x over Q_y
    x_reach = (float(np.max(np.abs(inst.alpha))) / math.log(2.0) + norm_B * Qy.diameter) / inst.mu_x
    if bounded_x:
        x_reach = min(x_reach, R_x)
    M_dual = norm_B * x_reach + float(np.linalg.norm(inst.c))

    B = inst.B

    def F_value(x, y):
        return inst.lse(x) + float(y @ (B @ x))

    def F_grad_x(x, y):
        return inst.lse_grad(x) + B.T @ y

    def F_grad_y(x, y):
        return B @ x

    constants = SaddleConstants(
        mu_x=inst.mu_x,
        mu_y=mu_dual,
        L_xx=L_xx,
        L_xy=norm_B,
        L_yy=0.0,
        L_h=0.0,
        L_r=inst.mu_x,
        B=max(M_dual * Qy.diameter, np.finfo(float).tiny),
        M_f=M_dual,
        L_f=L_dual,
        mu_f=mu_dual,
    )
    spec = SaddleSpec(
        F=Coupling(F_value, F_grad_x, F_grad_y),
        dim_x=m,
        dim_y=n,
        r=quadratic_prox(inst.mu_x, domain=Qx),
        h=linear_prox(inst.c, domain=Qy),
        Qx=Qx,
        Qy=Qy,
        constants=constants,
    )
    return spec


# --- bilinear-quadratic family -------------------------------------------------------------------


def build_bilinear(n: int, m: int, seed: int, mu_x: float = 1.0, mu_y: float = 1.0,
                   coupling_norm: float = 1.0, box_y: bool = True, half_width: float = 1.0,
                   shift: float = 0.3) -> SaddleSpec:
    """S(x, y) = mu_x/2 ||x||^2 + x^T A y - mu_y/2 ||y||^2 on boxes; saddle point at the origin.

    ``A`` is a random n x m matrix scaled to spectral norm ``coupling_norm``.
    The boxes are [shift - half_width, shift + half_width] per coordinate, so
    the origin is interior but not the center when ``shift`` is nonzero.
    With ``box_y=False`` the y variable is unconstrained.
    """
    if not abs(shift) < half_width:
        raise ParameterError("the origin must be interior: need |shift| < half_width")
    rng = make_rng(seed)
    A = rng.standard_normal((n, m))
    A *= coupling_norm / np.linalg.norm(A, 2)
    lo, hi = shift - half_width, shift + half_width
    Qx = BoxDomain(np.full(n, lo), np.full(n, hi))
    Qy = BoxDomain(np.full(m, lo), np.full(m, hi)) if box_y else None
    norm_A = float(coupling_norm)
    # largest norm of a point of the box
    Rx = (half_width + abs(shift)) * math.sqrt(n)
    Ry = (half_width + abs(shift)) * math.sqrt(m)
    # g(x) = max_y S(x, y) ranges over [0, mu_x/2 Rx^2 + ||A||^2 Rx^2 / (2 mu_y)]
    B = 0.5 * mu_x * Rx**2 + 0.5 * (norm_A * Rx) ** 2 / mu_y
    constants = SaddleConstants(
        mu_x=mu_x, mu_y=mu_y, L_xx=0.0, L_xy=norm_A, L_yy=0.0, L_h=mu_y, L_r=mu_x,
        B=B, M_f=norm_A * Rx + mu_y * Ry, L_f=mu_y + norm_A**2 / mu_x, mu_f=mu_y,
    )
    return SaddleSpec(
        F=Coupling(lambda x, y: float(x @ (A @ y)), lambda x, y: A @ y, lambda x, y: A.T @ x),
        dim_x=n,
        dim_y=m,
        r=quadratic_prox(mu_x, domain=Qx),
        h=quadratic_prox(mu_y, domain=Qy),
        Qx=Qx,
        Qy=Qy,
        constants=constants,
    )
