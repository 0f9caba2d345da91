"""Pure-numpy implementation of the least-norm system kernel.

Mirrors the API of the compiled extension ``_lnkernel``; selected when the
extension is unavailable or explicitly disabled.  See ``_kernels/__init__``.

For shifted points ``s_0..s_m`` (rows of ``s_shift``, pre-scaled to unit
magnitude by the caller) and weight ``sigma >= 0``, the solve couples the
multipliers ``lam`` with the model pieces through

    hess = 0.5 * sum_j lam_j s_j s_j^T,    grad = (1/sigma) * S^T lam .

Two algebraically equivalent symmetric systems are used depending on the
weight, picking whichever stays well conditioned:

* ``sigma < 1`` (gradient cheap, includes ``sigma = 0``): the augmented
  system in ``(lam, c, g)``

      [ B   1   S        ] [lam]   [d]
      [ 1^T 0   0        ] [ c ] = [0]
      [ S^T 0  -sigma*I  ] [ g ]   [0]

  with ``B_jk = (s_j.s_k)^2 / 4``; at ``sigma = 0`` this is exactly the
  minimum-Frobenius-norm system.

* ``sigma >= 1``: the dense form in ``(lam, c)`` obtained by eliminating
  ``g``:

      [ B + P/sigma  1 ] [lam]   [d]
      [ 1^T          0 ] [ c ] = [0]

  with ``P`` the point Gram matrix.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

RCOND_SINGULAR = 1e-12


class LeastNormSystem:
    """Assembled and factorized KKT system of a least-norm interpolation."""

    def __init__(self, s_shift: np.ndarray, sigma: float):
        s = np.ascontiguousarray(s_shift, dtype=float)
        m1, n = s.shape
        sigma = float(sigma)
        self.m1 = m1
        self.n = n
        self.sigma = sigma
        self.compact = sigma >= 1.0
        self._s = s

        gram = s @ s.T
        bmat = 0.25 * gram * gram
        if self.compact:
            dim = m1 + 1
            a = np.zeros((dim, dim))
            a[:m1, :m1] = bmat + gram / sigma
            a[:m1, m1] = 1.0
            a[m1, :m1] = 1.0
        else:
            dim = m1 + 1 + n
            a = np.zeros((dim, dim))
            a[:m1, :m1] = bmat
            a[:m1, m1] = 1.0
            a[m1, :m1] = 1.0
            a[:m1, m1 + 1 :] = s
            a[m1 + 1 :, :m1] = s.T
            idx = np.arange(n)
            a[m1 + 1 + idx, m1 + 1 + idx] = -sigma
        self.dim = dim
        self._a = a

        anorm = float(np.max(np.sum(np.abs(a), axis=0)))
        fact, ipiv, info = lapack.dsytrf(a, lower=1)
        if info > 0:
            self.singular = True
            self.rcond = 0.0
            self._fact = None
            self._ipiv = None
            return
        if info < 0:
            raise RuntimeError(f"dsytrf failed with info={info}")
        rcond, cinfo = lapack.dsycon(fact, ipiv, anorm, lower=1)
        if cinfo != 0:
            raise RuntimeError(f"dsycon failed with info={cinfo}")
        self._fact = fact
        self._ipiv = ipiv
        self.rcond = float(rcond)
        self.singular = not (self.rcond > RCOND_SINGULAR)

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        """Factorized solve with one step of iterative refinement."""
        if self.singular:
            raise RuntimeError("system is singular")
        x, info = lapack.dsytrs(self._fact, self._ipiv, rhs, lower=1)
        if info != 0:
            raise RuntimeError(f"dsytrs failed with info={info}")
        corr, info = lapack.dsytrs(self._fact, self._ipiv, rhs - self._a @ x, lower=1)
        if info != 0:
            raise RuntimeError(f"dsytrs failed with info={info}")
        return x + corr

    def _unpack(self, sol: np.ndarray):
        lam = sol[: self.m1]
        c = float(sol[self.m1])
        if self.compact:
            ghat = (self._s.T @ lam) / self.sigma
        else:
            ghat = sol[self.m1 + 1 :].copy()
        return lam, c, ghat

    def _data_rhs(self, d: np.ndarray) -> np.ndarray:
        rhs = np.zeros(self.dim)
        rhs[: self.m1] = d
        return rhs

    def solve_data(self, d: np.ndarray):
        """Multipliers, constant and (scaled-frame) gradient for data ``d``."""
        return self._unpack(self._solve(self._data_rhs(d)))

    def solve_data_minnorm(self, d: np.ndarray):
        """Least-squares fallback for (near-)singular systems.

        Minimum-norm solve with refinement; valid whenever the data is
        consistent, in which case the induced model is still the unique
        optimum.
        """
        rhs = self._data_rhs(d)
        sol, *_ = np.linalg.lstsq(self._a, rhs, rcond=None)
        for _ in range(2):
            corr, *_ = np.linalg.lstsq(self._a, rhs - self._a @ sol, rcond=None)
            sol = sol + corr
        return self._unpack(sol)

    def solve_lagrange(self):
        """Solutions for all Kronecker-delta data sets, one per point."""
        rhs = np.zeros((self.dim, self.m1))
        rhs[: self.m1, : self.m1] = np.eye(self.m1)
        sol = self._solve(rhs)
        return [self._unpack(sol[:, i]) for i in range(self.m1)]

    def lagrange_values(self, t: np.ndarray) -> np.ndarray:
        """Values of all Lagrange functions at the (scaled) shifted point ``t``.

        Uses the symmetry of the system: evaluating every Lagrange model at
        one point costs a single solve with the evaluation vector.
        """
        st = self._s @ t
        w = np.zeros(self.dim)
        if self.compact:
            w[: self.m1] = 0.25 * st * st + st / self.sigma
        else:
            w[: self.m1] = 0.25 * st * st
            w[self.m1 + 1 :] = t
        w[self.m1] = 1.0
        return self._solve(w)[: self.m1]
