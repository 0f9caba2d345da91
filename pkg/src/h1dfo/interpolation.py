"""Least-norm quadratic interpolation.

Given points ``y_0..y_m`` with data ``f_0..f_m``, the central solve picks the
quadratic ``Q`` (optionally a correction to a prior model ``Q0``) that
interpolates the data while minimizing

    ||hess(Q - Q0)||_F^2 + sigma * ||grad (Q - Q0)(x0)||^2 .

By the closed-form seminorm identity this is the interpolant closest to the
prior in the H1 seminorm over the ball of radius ``sqrt((n+2)/sigma)``
centered at ``x0``; ``sigma = 0`` is the minimum-Frobenius-norm limit, made
unique by additionally minimizing the gradient norm (a bilevel solve whose
first level already pins the model down whenever the points span R^n).

The fast path assembles and factorizes one symmetric KKT system through the
selected kernel backend; :func:`brute_force_least_norm` re-solves the same
problem by explicit coefficient parameterization and a dense null-space
method and exists purely as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import LeastNormSystem
from .errors import (
    DimensionMismatchError,
    DuplicatePointsError,
    InconsistentDataError,
    NotPoisedError,
)
from .quadratic import Ball, QuadraticModel, _as_point, combine, h1_inner_product, h1_seminorm_sq

DISTINCT_TOL = 1e-10
RANK_TOL = 1e-10
INTERP_TOL = 1e-9

_BRUTE_MAX_DIM = 6
_BRUTE_MAX_POINTS = 28


@dataclass(frozen=True)
class InterpolationSet:
    """Interpolation points with (optional) data values.

    ``points`` has one row per point; ``values`` may be left unset for
    purely geometric uses.  Points are expected to be pairwise distinct;
    operations that require it enforce a relative tolerance of
    ``1e-10 * (1 + max norm)``.
    """

    points: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DimensionMismatchError("points must be a nonempty 2-D array")
        object.__setattr__(self, "points", pts.copy())
        if self.values is not None:
            vals = np.atleast_1d(np.asarray(self.values, dtype=float))
            if vals.shape != (pts.shape[0],):
                raise DimensionMismatchError(
                    f"got {vals.size} values for {pts.shape[0]} points"
                )
            object.__setattr__(self, "values", vals.copy())

    @property
    def m1(self) -> int:
        """Number of points (m + 1)."""
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def with_values(self, values) -> "InterpolationSet":
        return InterpolationSet(self.points, values)

    def replaced(self, index: int, point, value: float) -> "InterpolationSet":
        """Copy of the set with one point (and its value) swapped out."""
        pts = self.points.copy()
        pts[index] = _as_point(point, self.n)
        vals = None
        if self.values is not None:
            vals = self.values.copy()
            vals[index] = value
        return InterpolationSet(pts, vals)


@dataclass(frozen=True)
class LeastNormSpec:
    """Parameters of a least-norm solve: gradient anchor, weight, prior."""

    x0: np.ndarray
    sigma: float
    prior: QuadraticModel | None = None

    def __post_init__(self):
        x0 = _as_point(self.x0)
        sigma = float(self.sigma)
        if sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {sigma}")
        if self.prior is not None and self.prior.n != x0.size:
            raise DimensionMismatchError("prior model dimension does not match x0")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class PoisednessReport:
    linear_rank: int
    kkt_condition: float
    poised_linear: bool


def _check_distinct(points: np.ndarray) -> None:
    m1 = points.shape[0]
    if m1 < 2:
        return
    scale = 1.0 + float(np.max(np.linalg.norm(points, axis=1)))
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.linalg.norm(diffs, axis=2)
    dist[np.diag_indices(m1)] = np.inf
    dmin = float(dist.min())
    if dmin <= DISTINCT_TOL * scale:
        raise DuplicatePointsError(
            f"points closer than distinctness tolerance ({dmin:.3e} <= "
            f"{DISTINCT_TOL * scale:.3e})"
        )


def _linear_rank(points: np.ndarray) -> int:
    diffs = points[1:] - points[0]
    r = float(np.max(np.linalg.norm(diffs, axis=1)))
    if r == 0.0:
        return 0
    sv = np.linalg.svd(diffs / r, compute_uv=False)
    return int(np.sum(sv > RANK_TOL * sv[0]))


def _scaled_system(points: np.ndarray, x0: np.ndarray, sigma: float):
    """Kernel system over geometry normalized to unit scale.

    Returns ``(system, scale)``; solved gradients/Hessians must be divided
    by ``scale`` and ``scale**2`` respectively.
    """
    shift = points - x0
    scale = float(np.max(np.linalg.norm(shift, axis=1)))
    if scale == 0.0:
        scale = 1.0
    sh = np.ascontiguousarray(shift / scale)
    return LeastNormSystem(sh, sigma * scale * scale), scale


def _model_from_solution(lam, c, ghat, sh, scale, x0) -> QuadraticModel:
    g = ghat / scale
    hess = 0.5 * (sh.T * lam) @ sh / (scale * scale)
    hess = 0.5 * (hess + hess.T)
    return QuadraticModel(x0, c, g, hess)


def _residual_data(s: InterpolationSet, spec: LeastNormSpec) -> np.ndarray:
    if s.values is None:
        raise ValueError("interpolation set carries no values")
    if s.n != spec.x0.size:
        raise DimensionMismatchError("point dimension does not match x0")
    if spec.prior is None:
        return s.values.copy()
    prior_vals = np.array([spec.prior.evaluate(y) for y in s.points])
    return s.values - prior_vals


def _check_interpolation(q: QuadraticModel, s: InterpolationSet) -> None:
    scale = 1.0 + float(np.max(np.abs(s.values)))
    resid = max(abs(q.evaluate(y) - f) for y, f in zip(s.points, s.values))
    if resid > INTERP_TOL * scale:
        raise InconsistentDataError(
            f"interpolation residual {resid:.3e} exceeds {INTERP_TOL * scale:.3e}; "
            "data admits no quadratic interpolant"
        )


def check_poisedness(s: InterpolationSet) -> PoisednessReport:
    """Rank of the scaled point-difference matrix plus a KKT conditioning estimate.

    ``poised_linear`` means the differences span R^n, which is what makes
    interpolant gradients well determined (and the sigma = 0 solve usable).
    """
    if s.m1 < 2:
        raise ValueError("poisedness check needs at least two points")
    _check_distinct(s.points)
    rank = _linear_rank(s.points)
    x0 = s.points[0]
    system, _ = _scaled_system(s.points, x0, 0.0)
    cond = np.inf if system.singular else 1.0 / system.rcond
    return PoisednessReport(
        linear_rank=rank,
        kkt_condition=float(cond),
        poised_linear=rank == s.n,
    )


def system_is_solvable(
    points: np.ndarray, x0: np.ndarray, sigma: float, rcond_floor: float | None = None
) -> bool:
    """Whether the least-norm KKT system for these points factorizes cleanly.

    ``rcond_floor`` optionally demands a stronger conditioning margin than
    the bare singularity cutoff (used when vetting candidate point sets).
    """
    system, _ = _scaled_system(np.asarray(points, dtype=float), x0, sigma)
    if system.singular:
        return False
    return rcond_floor is None or system.rcond > rcond_floor


def least_norm_interpolate(s: InterpolationSet, spec: LeastNormSpec) -> QuadraticModel:
    """Solve the least-norm interpolation problem.

    Returns the prior (or zero) plus the minimizing correction.  Raises
    ``NotPoisedError`` when ``sigma = 0`` is requested without linearly
    spanning points, and ``InconsistentDataError`` when the data admits no
    quadratic interpolant.
    """
    d = _residual_data(s, spec)
    _check_distinct(s.points)
    if spec.sigma == 0.0 and (s.m1 < 2 or _linear_rank(s.points) < s.n):
        raise NotPoisedError(
            "sigma = 0 requires interpolation points whose differences span R^n"
        )

    system, scale = _scaled_system(s.points, spec.x0, spec.sigma)
    sh = (s.points - spec.x0) / scale
    if not system.singular:
        lam, c, ghat = system.solve_data(d)
    else:
        # Degenerate geometry: the KKT matrix is rank deficient, yet the
        # model is still unique whenever the data is consistent.  Fall back
        # to a minimum-norm solve and let the interpolation check decide.
        lam, c, ghat = system.solve_data_minnorm(d)
    correction = _model_from_solution(lam, c, ghat, sh, scale, spec.x0)
    q = correction if spec.prior is None else combine(1.0, correction, 1.0, spec.prior)
    try:
        _check_interpolation(q, s)
    except InconsistentDataError:
        # A clean factorization implies the data was consistent, so a bad
        # residual there means severe ill-conditioning.  On the singular
        # path, probe feasibility directly to tell the two cases apart.
        if not system.singular or _data_consistent(s.points, spec.x0, d):
            raise NotPoisedError(
                "interpolation system too ill-conditioned for a reliable solve"
            ) from None
        raise
    return q


def _data_consistent(points: np.ndarray, x0: np.ndarray, d: np.ndarray) -> bool:
    a = _design_matrix(points, x0)
    theta, *_ = np.linalg.lstsq(a, d, rcond=None)
    resid = float(np.max(np.abs(a @ theta - d)))
    return resid <= INTERP_TOL * (1.0 + float(np.max(np.abs(d))))


def lagrange_functions(s: InterpolationSet, x0, sigma: float) -> list[QuadraticModel]:
    """Lagrange basis of the least-norm interpolation: ``l_i(y_j) = delta_ij``."""
    x0 = _as_point(x0, s.n)
    _check_distinct(s.points)
    if sigma == 0.0 and (s.m1 < 2 or _linear_rank(s.points) < s.n):
        raise NotPoisedError("sigma = 0 Lagrange functions need linearly spanning points")
    system, scale = _scaled_system(s.points, x0, float(sigma))
    if system.singular:
        raise NotPoisedError("interpolation system is singular; Lagrange basis undefined")
    sh = (s.points - x0) / scale
    return [
        _model_from_solution(lam, c, ghat, sh, scale, x0)
        for lam, c, ghat in system.solve_lagrange()
    ]


def lagrange_values(s: InterpolationSet, x0, sigma: float, point) -> np.ndarray:
    """All Lagrange function values at one point, via a single adjoint solve."""
    x0 = _as_point(x0, s.n)
    point = _as_point(point, s.n)
    system, scale = _scaled_system(s.points, x0, float(sigma))
    if system.singular:
        raise NotPoisedError("interpolation system is singular; Lagrange basis undefined")
    return system.lagrange_values(np.ascontiguousarray((point - x0) / scale))


def sigma_to_radius(sigma: float, n: int) -> float:
    """Ball radius ``sqrt((n+2)/sigma)`` over which the solve is least-change."""
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return float(np.sqrt((n + 2.0) / sigma))


def radius_to_sigma(radius: float, n: int) -> float:
    """Inverse of :func:`sigma_to_radius`: ``(n+2)/r^2``."""
    radius = float(radius)
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return (n + 2.0) / (radius * radius)


# --- dense coefficient parameterization (oracle + feasible directions) ---


def _coef_count(n: int) -> int:
    return 1 + n + n * (n + 1) // 2


def _design_matrix(points: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Rows map the coefficient vector ``(c, g, vech H)`` to point values."""
    shift = points - x0
    m1, n = shift.shape
    cols = [np.ones((m1, 1)), shift]
    cols.append(0.5 * shift * shift)
    for i in range(n):
        for j in range(i + 1, n):
            cols.append((shift[:, i] * shift[:, j])[:, None])
    return np.hstack([c.reshape(m1, -1) for c in cols])


def _objective_weights(n: int, sigma: float, hess_only: bool = False) -> np.ndarray:
    w = np.zeros(_coef_count(n))
    if not hess_only:
        w[1 : n + 1] = sigma
    w[n + 1 : 2 * n + 1] = 1.0  # diagonal Hessian entries
    w[2 * n + 1 :] = 2.0  # off-diagonal entries appear twice in the matrix
    return w


def _coef_to_model(theta: np.ndarray, x0: np.ndarray) -> QuadraticModel:
    n = x0.size
    c = float(theta[0])
    g = theta[1 : n + 1]
    hess = np.diag(theta[n + 1 : 2 * n + 1].copy())
    k = 2 * n + 1
    for i in range(n):
        for j in range(i + 1, n):
            hess[i, j] = hess[j, i] = theta[k]
            k += 1
    return QuadraticModel(x0, c, g, hess)


def _null_basis(a: np.ndarray) -> np.ndarray:
    u, sv, vt = np.linalg.svd(a, full_matrices=True)
    if sv.size == 0:
        return vt.T
    rank = int(np.sum(sv > RANK_TOL * sv[0]))
    return vt[rank:].T


def brute_force_least_norm(s: InterpolationSet, spec: LeastNormSpec) -> QuadraticModel:
    """Independent oracle for :func:`least_norm_interpolate`.

    Parameterizes the correction by its full coefficient vector and solves
    the equality-constrained least-norm problem with a dense null-space
    method; the ``sigma = 0`` case runs the literal two-level procedure
    (Frobenius norm first, then the gradient norm over the leftover
    freedom).  Desk scale only.
    """
    if s.n > _BRUTE_MAX_DIM or s.m1 > _BRUTE_MAX_POINTS:
        raise ValueError("brute-force oracle limited to n <= 6 and at most 28 points")
    d = _residual_data(s, spec)
    _check_distinct(s.points)
    if spec.sigma == 0.0 and (s.m1 < 2 or _linear_rank(s.points) < s.n):
        raise NotPoisedError(
            "sigma = 0 requires interpolation points whose differences span R^n"
        )

    a = _design_matrix(s.points, spec.x0)
    theta_p, *_ = np.linalg.lstsq(a, d, rcond=None)
    feas_resid = float(np.max(np.abs(a @ theta_p - d)))
    if feas_resid > INTERP_TOL * (1.0 + float(np.max(np.abs(d)))):
        raise InconsistentDataError(
            f"constraint residual {feas_resid:.3e}: data admits no quadratic interpolant"
        )
    z = _null_basis(a)

    if z.shape[1] == 0:
        theta = theta_p
    elif spec.sigma > 0.0:
        w = _objective_weights(s.n, spec.sigma)
        m = (z.T * w) @ z
        rhs = -(z.T @ (w * theta_p))
        try:
            u = np.linalg.solve(m, rhs)
        except np.linalg.LinAlgError:
            u, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        theta = theta_p + z @ u
    else:
        # Level one: minimize the Frobenius norm of the Hessian.
        w1 = _objective_weights(s.n, 0.0, hess_only=True)
        m1mat = (z.T * w1) @ z
        rhs1 = -(z.T @ (w1 * theta_p))
        u1, *_ = np.linalg.lstsq(m1mat, rhs1, rcond=None)
        nmat = _null_basis(m1mat)
        if nmat.shape[1] > 0:
            # Level two: minimize the gradient norm over the level-one set.
            gslice = slice(1, s.n + 1)
            bmat = (z @ nmat)[gslice]
            gvec = (theta_p + z @ u1)[gslice]
            v, *_ = np.linalg.lstsq(bmat, -gvec, rcond=None)
            u1 = u1 + nmat @ v
        theta = theta_p + z @ u1

    q = _coef_to_model(theta, spec.x0)
    if spec.prior is not None:
        q = combine(1.0, q, 1.0, spec.prior)
    _check_interpolation(q, s)
    return q


def seminorm_optimality_residual(s: InterpolationSet, x0, sigma: float) -> float:
    """First-order optimality of the solve, measured in the ball seminorm.

    The solution must be seminorm-orthogonal over the ball of radius
    ``sqrt((n+2)/sigma)`` to every quadratic vanishing on the points.
    Returns the largest normalized violation over a basis of such
    directions (0 for fully determined sets).
    """
    x0 = _as_point(x0, s.n)
    if sigma <= 0:
        raise ValueError("optimality residual is defined for sigma > 0")
    q = least_norm_interpolate(s, LeastNormSpec(x0, sigma))
    z = _null_basis(_design_matrix(s.points, x0))
    if z.shape[1] == 0:
        return 0.0
    ball = Ball(x0, sigma_to_radius(sigma, s.n))
    qn = np.sqrt(h1_seminorm_sq(q, ball))
    worst = 0.0
    for k in range(z.shape[1]):
        direction = _coef_to_model(z[:, k], x0)
        ip = h1_inner_product(q, direction, ball)
        dn = np.sqrt(h1_seminorm_sq(direction, ball))
        worst = max(worst, abs(ip) / (1.0 + qn * dn))
    return worst


def check_error_bounds(
    f,
    grad_f,
    s: InterpolationSet,
    q: QuadraticModel,
    nu: float,
    radius: float,
    samples: int,
    seed: int = 0,
) -> bool:
    """Sample the classical interpolation error bounds over a ball.

    For points inside ``B(y_0, radius)`` whose scaled differences have full
    rank, any quadratic interpolant of a function with ``nu``-Lipschitz
    gradient satisfies, everywhere on the ball,

        ||grad Q - grad F||  <=  (5 sqrt(m)/2) ||L^+|| (nu + ||H_Q||) r
        |Q - F|              <=  ((5 sqrt(m)/2) ||L^+|| + 1/2) (nu + ||H_Q||) r^2

    (Conn, Scheinberg & Vicente, Introduction to Derivative-Free
    Optimization, 2009).  Returns True when both hold at every sampled
    point.  The caller guarantees that ``q`` interpolates ``f`` on the set.
    """
    pts = s.points
    y0 = pts[0]
    m = s.m1 - 1
    n = s.n
    if m < n:
        raise NotPoisedError(f"need at least n+1 points, got {s.m1} for n={n}")
    radius = float(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    dists = np.linalg.norm(pts - y0, axis=1)
    if np.max(dists) > radius * (1.0 + 1e-12):
        raise ValueError("interpolation points must lie inside the ball")
    lmat = (pts[1:] - y0).T / radius
    sv = np.linalg.svd(lmat, compute_uv=False)
    if sv.size < n or sv[n - 1] <= RANK_TOL * sv[0]:
        raise NotPoisedError("scaled difference matrix is rank deficient")
    pinv_norm = 1.0 / sv[n - 1]
    hess_norm = float(np.max(np.abs(np.linalg.eigvalsh(q.hess))))
    lead = 2.5 * np.sqrt(m) * pinv_norm
    grad_bound = lead * (nu + hess_norm) * radius
    val_bound = (lead + 0.5) * (nu + hess_norm) * radius**2

    rng = np.random.default_rng(seed)
    for _ in range(int(samples)):
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        x = y0 + radius * rng.random() ** (1.0 / n) * u
        if np.linalg.norm(q.gradient_at(x) - np.asarray(grad_f(x), dtype=float)) > grad_bound:
            return False
        if abs(q.evaluate(x) - float(f(x))) > val_bound:
            return False
    return True
