"""Shared records, oracle wrappers and small numerical helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, TypeAlias, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

Vector: TypeAlias = NDArray[np.float64]

CALL_KINDS = ("grad_x", "grad_y", "grad_r", "grad_h", "prox", "value")


class ParameterError(ValueError):
    """Invalid numeric parameter (non-positive constant, negative tolerance, ...)."""


class DimensionError(ValueError):
    """Array shapes do not agree."""


class StateCorruptionError(RuntimeError):
    """A shape matrix lost positive definiteness or became non-finite."""


class InfeasibleError(RuntimeError):
    """No feasible point was ever produced."""


def as_vector(x: ArrayLike, name: str = "x") -> Vector:
    """Validate and convert to a 1-D float64 array with finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


def require_positive(value: float, name: str) -> float:
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be positive and finite, got {value}")
    return float(value)


def require_nonnegative(value: float, name: str) -> float:
    if not (value >= 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be nonnegative and finite, got {value}")
    return float(value)


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator backed by PCG64."""
    return np.random.Generator(np.random.PCG64(seed))


# --- domains -----------------------------------------------------------------


@dataclass(frozen=True)
class BoxDomain:
    lower: Vector
    upper: Vector

    def __post_init__(self) -> None:
        lo = as_vector(self.lower, "lower")
        hi = as_vector(self.upper, "upper")
        if lo.shape != hi.shape:
            raise DimensionError("lower and upper differ in dimension")
        if np.any(lo > hi):
            raise ParameterError("box has lower > upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def center(self) -> Vector:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: Vector, tol: float = 0.0) -> bool:
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project(self, x: Vector) -> Vector:
        return project_box(x, self)

    def separate(self, x: Vector) -> Vector:
        """Unit normal of the most violated face."""
        below = self.lower - x
        above = x - self.upper
        i_lo, i_hi = int(np.argmax(below)), int(np.argmax(above))
        w = np.zeros_like(x)
        if below[i_lo] >= above[i_hi]:
            w[i_lo] = -1.0
        else:
            w[i_hi] = 1.0
        return w

    def bounding_ball(self) -> "BallDomain":
        return BallDomain(self.center, max(0.5 * self.diameter, np.finfo(float).tiny))

    def inner_radius(self) -> float:
        return 0.5 * float(np.min(self.upper - self.lower))


@dataclass(frozen=True)
class BallDomain:
    center: Vector
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        object.__setattr__(self, "radius", require_positive(self.radius, "radius"))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x: Vector, tol: float = 0.0) -> bool:
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def project(self, x: Vector) -> Vector:
        d = x - self.center
        nrm = np.linalg.norm(d)
        if nrm <= self.radius:
            return np.array(x, dtype=float)
        return self.center + d * (self.radius / nrm)

    def separate(self, x: Vector) -> Vector:
        return x - self.center

    def bounding_ball(self) -> "BallDomain":
        return self

    def inner_radius(self) -> float:
        return self.radius


@dataclass(frozen=True)
class SimplexDomain:
    """The set {x >= 0, sum(x) <= bound}."""

    dim: int
    bound: float

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ParameterError("simplex dimension must be >= 1")
        object.__setattr__(self, "bound", require_positive(self.bound, "bound"))

    @property
    def diameter(self) -> float:
        return self.bound * math.sqrt(2.0) if self.dim > 1 else self.bound

    def contains(self, x: Vector, tol: float = 0.0) -> bool:
        return bool(np.all(x >= -tol) and x.sum() <= self.bound + tol)

    def project(self, x: Vector) -> Vector:
        x = np.asarray(x, dtype=float)
        clipped = np.maximum(x, 0.0)
        if clipped.sum() <= self.bound:
            return clipped
        # projection onto the face sum = bound (sort-based threshold)
        u = np.sort(x)[::-1]
        css = np.cumsum(u) - self.bound
        idx = np.arange(1, x.size + 1)
        k = idx[u - css / idx > 0][-1]
        theta = css[k - 1] / k
        return np.maximum(x - theta, 0.0)

    def separate(self, x: Vector) -> Vector:
        w = np.zeros_like(x)
        i = int(np.argmin(x))
        if x[i] < 0 and -x[i] >= x.sum() - self.bound:
            w[i] = -1.0
        else:
            w[:] = 1.0
        return w

    def bounding_box(self) -> BoxDomain:
        return BoxDomain(np.zeros(self.dim), np.full(self.dim, self.bound))

    def bounding_ball(self) -> BallDomain:
        # ball around the box center covers the box and hence the simplex
        return self.bounding_box().bounding_ball()

    def inner_radius(self) -> float:
        # radius of the inscribed ball of the corner simplex
        n = self.dim
        return self.bound / (n + math.sqrt(n))

    def inner_center(self) -> Vector:
        return np.full(self.dim, self.inner_radius())


Domain = Union[BoxDomain, BallDomain, SimplexDomain]


def project_box(x: ArrayLike, Q: BoxDomain) -> Vector:
    """Euclidean projection onto a box (componentwise clamp)."""
    x = as_vector(x)
    if x.shape != Q.lower.shape:
        raise DimensionError(f"point has dim {x.size}, box has dim {Q.dim}")
    return np.minimum(np.maximum(x, Q.lower), Q.upper)


# --- call accounting -----------------------------------------------------------


@dataclass
class CallCounter:
    """Per-kind oracle call counts."""

    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CALL_KINDS, 0))

    def add(self, kind: str, n: int = 1) -> None:
        if kind not in self.counts:
            raise KeyError(f"unknown call kind {kind!r}")
        self.counts[kind] += n

    def __getitem__(self, kind: str) -> int:
        return self.counts[kind]

    def total(self) -> int:
        return sum(self.counts.values())

    def snapshot(self) -> dict[str, int]:
        return dict(self.counts)

    def reset(self) -> None:
        for k in self.counts:
            self.counts[k] = 0


ORACLE_MODES = ("exact", "delta_subgradient", "inexact_gradient")


@dataclass
class FirstOrderOracle:
    """Callable returning ``(value, grad)`` with a declared inexactness.

    In ``delta_subgradient`` mode ``delta`` bounds the subgradient slack, in
    ``inexact_gradient`` mode it bounds the gradient error norm. Each call is
    recorded under ``kind`` in ``counter``.
    """

    func: Callable[[Vector], tuple[float, Vector]]
    delta: float = 0.0
    mode: str = "exact"
    counter: CallCounter = field(default_factory=CallCounter)
    kind: str = "grad_x"

    def __post_init__(self) -> None:
        if self.mode not in ORACLE_MODES:
            raise ParameterError(f"unknown oracle mode {self.mode!r}")
        require_nonnegative(self.delta, "delta")
        if self.mode == "exact" and self.delta != 0:
            raise ParameterError("exact oracles must declare delta = 0")

    def __call__(self, x: Vector) -> tuple[float, Vector]:
        self.counter.add(self.kind)
        value, grad = self.func(x)
        return float(value), np.asarray(grad, dtype=float)


class ProxStep(Protocol):
    def __call__(self, c1: Vector, c2: float) -> Vector: ...


@dataclass(frozen=True)
class ProxFriendlyFn:
    """Function r with an explicit solver for argmin <c1, x> + r(x) + c2 ||x||^2.

    ``grad`` is optional; it is needed only when a method treats r as smooth.
    """

    value: Callable[[Vector], float]
    prox_step: ProxStep
    grad: Callable[[Vector], Vector] | None = None
    domain: Domain | None = None


@dataclass(frozen=True)
class SmoothFn:
    value: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    domain: Domain | None = None


Term = Union[ProxFriendlyFn, SmoothFn]


def quadratic_prox(mu: float, domain: Domain | None = None, linear: Vector | None = None,
                   center: Vector | None = None) -> ProxFriendlyFn:
    """r(x) = mu/2 ||x - center||^2 + <linear, x> restricted to a box or ball."""
    if mu < 0:
        raise ParameterError("mu must be nonnegative")

    def shift(x):
        return x if center is None else x - center

    def value(x):
        v = 0.5 * mu * float(shift(x) @ shift(x))
        return v + (0.0 if linear is None else float(linear @ x))

    def grad(x):
        g = mu * shift(x)
        return g if linear is None else g + linear

    def prox_step(c1, c2):
        c = np.asarray(c1, dtype=float)
        if linear is not None:
            c = c + linear
        if center is not None:
            c = c - mu * center
        denom = mu + 2.0 * c2
        if denom <= 0:
            raise ParameterError("prox step needs mu + 2 c2 > 0")
        x = -c / denom
        # isotropic quadratic: constrained minimizer is the projection
        return x if domain is None else domain.project(x)

    return ProxFriendlyFn(value=value, prox_step=prox_step, grad=grad, domain=domain)


def linear_prox(coef: Vector, domain: Domain | None = None) -> ProxFriendlyFn:
    """h(y) = <coef, y> on a domain."""
    return quadratic_prox(0.0, domain=domain, linear=np.asarray(coef, dtype=float))


# --- problem record ---------------------------------------------------------------


@dataclass
class SaddleConstants:
    mu_x: float = 0.0
    mu_y: float = 0.0
    L_xx: float = 0.0
    L_xy: float = 0.0
    L_yy: float = 0.0
    L_h: float = 0.0
    L_r: float = 0.0
    B: float = 1.0
    M_f: float = 0.0
    L_f: float = 0.0
    mu_f: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mu_x", "mu_y", "L_xx", "L_xy", "L_yy", "L_h", "L_r", "M_f", "L_f", "mu_f"):
            require_nonnegative(getattr(self, name), name)
        require_positive(self.B, "B")


@dataclass
class Coupling:
    """Coupling term F(x, y) with partial gradients."""

    value: Callable[[Vector, Vector], float]
    grad_x: Callable[[Vector, Vector], Vector]
    grad_y: Callable[[Vector, Vector], Vector]


@dataclass
class SaddleSpec:
    """Problem  min_x max_y  r(x) + F(x, y) - h(y).

    ``r`` and ``h`` may be ``None`` (identically zero). ``Qx``/``Qy`` of ``None``
    mean the whole space. All oracle evaluations made through the helper
    methods are recorded in ``counter``.
    """

    F: Coupling
    dim_x: int
    dim_y: int
    r: Term | None = None
    h: Term | None = None
    Qx: Domain | None = None
    Qy: Domain | None = None
    constants: SaddleConstants = field(default_factory=SaddleConstants)
    counter: CallCounter = field(default_factory=CallCounter)

    def value(self, x: Vector, y: Vector) -> float:
        self.counter.add("value")
        v = self.F.value(x, y)
        if self.r is not None:
            v += self.r.value(x)
        if self.h is not None:
            v -= self.h.value(y)
        return float(v)

    def grad_x(self, x: Vector, y: Vector) -> Vector:
        self.counter.add("grad_x")
        return np.asarray(self.F.grad_x(x, y), dtype=float)

    def grad_y(self, x: Vector, y: Vector) -> Vector:
        self.counter.add("grad_y")
        return np.asarray(self.F.grad_y(x, y), dtype=float)

    def grad_r(self, x: Vector) -> Vector:
        if self.r is None:
            return np.zeros(self.dim_x)
        if self.r.grad is None:
            raise ParameterError("r has no gradient oracle")
        self.counter.add("grad_r")
        return np.asarray(self.r.grad(x), dtype=float)

    def grad_h(self, y: Vector) -> Vector:
        if self.h is None:
            return np.zeros(self.dim_y)
        if self.h.grad is None:
            raise ParameterError("h has no gradient oracle")
        self.counter.add("grad_h")
        return np.asarray(self.h.grad(y), dtype=float)

    def prox_r(self, c1: Vector, c2: float) -> Vector:
        self.counter.add("prox")
        if self.r is None:
            return _free_prox(c1, c2, self.Qx)
        return np.asarray(self.r.prox_step(c1, c2), dtype=float)

    def prox_h(self, c1: Vector, c2: float) -> Vector:
        self.counter.add("prox")
        if self.h is None:
            return _free_prox(c1, c2, self.Qy)
        return np.asarray(self.h.prox_step(c1, c2), dtype=float)

    def r_value(self, x: Vector) -> float:
        return 0.0 if self.r is None else float(self.r.value(x))

    def h_value(self, y: Vector) -> float:
        return 0.0 if self.h is None else float(self.h.value(y))


def _free_prox(c1: Vector, c2: float, domain: Domain | None) -> Vector:
    x = -np.asarray(c1, dtype=float) / (2.0 * c2)
    return x if domain is None else domain.project(x)


# --- reports ------------------------------------------------------------------


@dataclass
class RunReport:
    method: str = ""
    problem: str = ""
    epsilon: float = float("nan")
    n: int = 0
    m: int = 0
    seed: int | None = None
    outer_iters: int = 0
    counters: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CALL_KINDS, 0))
    residual: float = float("nan")
    wall_sec: float = 0.0
    timed_out: bool = False
    converged: bool = False
    flags: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def flag(self, message: str) -> None:
        if message not in self.flags:
            self.flags.append(message)


# --- numerical helpers -----------------------------------------------------------


def delta_oracle_gap_bound(delta: float, L: float) -> float:
    """Claimed gradient error of a (delta, L)-oracle: sqrt(L delta / 2).

    Stated for points at distance at least sqrt(delta / (2 L)) from the
    boundary. The guaranteed error is only sqrt(L delta): the oracle
    g = f'(0) + sqrt(L delta) for f(z) = L/2 max(z, 0)^2 attains it on the
    whole line. Solvers in this package do not rely on this bound.
    """
    require_nonnegative(delta, "delta")
    require_positive(L, "L")
    return math.sqrt(L * delta / 2.0)


def spectral_norm(M: NDArray, rtol: float = 1e-8, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on M^T M."""
    M = np.asarray(M, dtype=float)
    if M.size == 0 or not np.any(M):
        return 0.0
    v = make_rng(seed).standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = M.T @ (M @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        new = math.sqrt(nrm)
        if abs(new - sigma) <= rtol * new:
            return new
        sigma = new
    return sigma
