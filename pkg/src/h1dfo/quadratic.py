"""Quadratic models and their first-order Sobolev seminorm over balls.

A quadratic is stored by its expansion around a base point: value, gradient
and the (constant) symmetric Hessian.  The central quantity of the package
is the squared H1 seminorm of such a model over a Euclidean ball

    |Q|^2 = integral over B of ||grad Q(x)||^2 dx
          = V_n * r^n * [ r^2/(n+2) * ||H||_F^2 + ||grad Q(center)||^2 ],

with V_n the volume of the unit ball in R^n.  The closed form is exposed by
:func:`h1_seminorm_sq`; :func:`h1_seminorm_sq_quadrature` integrates the same
quantity with a midpoint rule and serves as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError


def _as_point(x, n: int | None = None) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise DimensionMismatchError(f"expected dimension {n}, got {x.size}")
    return x


@dataclass(frozen=True)
class QuadraticModel:
    """Quadratic polynomial ``c + g.(x-base) + 0.5 (x-base).H.(x-base)``.

    The Hessian is constant over R^n.  Only the lower triangle of ``hess``
    is authoritative; it is mirrored on construction so the stored matrix
    is exactly symmetric.  Instances are immutable value objects.
    """

    base: np.ndarray
    c: float
    g: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        base = _as_point(self.base)
        n = base.size
        g = _as_point(self.g, n)
        hess = np.asarray(self.hess, dtype=float)
        if hess.shape != (n, n):
            raise DimensionMismatchError(
                f"Hessian shape {hess.shape} does not match dimension {n}"
            )
        lower = np.tril(hess)
        hess = lower + np.tril(hess, -1).T
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "g", g.copy())
        object.__setattr__(self, "hess", hess)

    @property
    def n(self) -> int:
        return self.base.size

    def evaluate(self, x) -> float:
        """Value of the quadratic at ``x``."""
        s = _as_point(x, self.n) - self.base
        return self.c + float(self.g @ s) + 0.5 * float(s @ (self.hess @ s))

    def gradient_at(self, x) -> np.ndarray:
        """Gradient ``g + H (x - base)`` at ``x``."""
        s = _as_point(x, self.n) - self.base
        return self.g + self.hess @ s

    def rebase(self, new_base) -> "QuadraticModel":
        """Same polynomial re-expanded around ``new_base``."""
        b = _as_point(new_base, self.n)
        return QuadraticModel(b, self.evaluate(b), self.gradient_at(b), self.hess)

    def scaled(self, a: float) -> "QuadraticModel":
        a = float(a)
        return QuadraticModel(self.base, a * self.c, a * self.g, a * self.hess)

    def coefficients(self, at=None) -> np.ndarray:
        """Flat coefficient vector ``(c, g, vec H)`` expanded at ``at``.

        Used for model-to-model comparisons; ``at`` defaults to the base.
        """
        q = self if at is None else self.rebase(at)
        return np.concatenate([[q.c], q.g, q.hess.ravel()])


def zero_model(n: int, base=None) -> QuadraticModel:
    """The identically-zero quadratic in dimension ``n``."""
    if base is None:
        base = np.zeros(n)
    return QuadraticModel(base, 0.0, np.zeros(n), np.zeros((n, n)))


def combine(a: float, q1: QuadraticModel, b: float, q2: QuadraticModel) -> QuadraticModel:
    """Linear combination ``a*q1 + b*q2`` expanded at ``q1.base``."""
    if q1.n != q2.n:
        raise DimensionMismatchError("models have different dimensions")
    r2 = q2.rebase(q1.base)
    return QuadraticModel(
        q1.base,
        a * q1.c + b * r2.c,
        a * q1.g + b * r2.g,
        a * q1.hess + b * r2.hess,
    )


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = _as_point(self.center)
        radius = float(self.radius)
        if not radius > 0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def n(self) -> int:
        return self.center.size


def unit_ball_volume(n: int) -> float:
    """Volume ``pi^(n/2) / Gamma(n/2 + 1)`` of the unit ball in R^n."""
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def h1_seminorm_sq(q: QuadraticModel, ball: Ball) -> float:
    """Closed-form squared H1 seminorm of ``q`` over ``ball``.

    The model need not be based at the ball center; the gradient is taken
    there.  The result is nonnegative and zero exactly when the model is
    constant.
    """
    if q.n != ball.n:
        raise DimensionMismatchError("model and ball dimensions differ")
    n = q.n
    r = ball.radius
    gc = q.gradient_at(ball.center)
    fro_sq = float(np.sum(q.hess * q.hess))
    return unit_ball_volume(n) * r**n * (r**2 / (n + 2.0) * fro_sq + float(gc @ gc))


def h1_inner_product(q1: QuadraticModel, q2: QuadraticModel, ball: Ball) -> float:
    """Bilinear form whose diagonal is :func:`h1_seminorm_sq`.

    Equals the integral of ``grad q1 . grad q2`` over the ball; this is the
    polarization of the closed form in terms of Hessians and gradients at
    the center.
    """
    if q1.n != q2.n or q1.n != ball.n:
        raise DimensionMismatchError("dimension mismatch")
    n = q1.n
    r = ball.radius
    g1 = q1.gradient_at(ball.center)
    g2 = q2.gradient_at(ball.center)
    fro = float(np.sum(q1.hess * q2.hess))
    return unit_ball_volume(n) * r**n * (r**2 / (n + 2.0) * fro + float(g1 @ g2))


_MAX_QUADRATURE_DIM = 5


def h1_seminorm_sq_quadrature(q: QuadraticModel, ball: Ball, cells_per_axis: int) -> float:
    """Midpoint-rule estimate of the squared H1 seminorm.

    Integrates ``||grad q||^2`` over the bounding box of the ball, counting
    only cells whose centers fall inside it.  The O(h) boundary error makes
    this a percent-level oracle, adequate for cross-checking the closed
    form.  Cost grows as ``cells_per_axis**n``, so dimensions above
    5 are rejected.
    """
    if q.n != ball.n:
        raise DimensionMismatchError("model and ball dimensions differ")
    n = q.n
    if n > _MAX_QUADRATURE_DIM:
        raise ValueError(f"quadrature oracle limited to n <= {_MAX_QUADRATURE_DIM}")
    cells = int(cells_per_axis)
    if cells < 16:
        raise ValueError(f"need at least 16 cells per axis, got {cells}")
    r = ball.radius
    h = 2.0 * r / cells
    offsets = -r + (np.arange(cells) + 0.5) * h
    axes = [ball.center[i] + offsets for i in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([grid.ravel() for grid in grids], axis=1)
    inside = np.sum((pts - ball.center) ** 2, axis=1) <= r * r
    pts = pts[inside]
    grads = q.g + (pts - q.base) @ q.hess
    return float(np.sum(grads * grads)) * h**n
