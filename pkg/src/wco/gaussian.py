"""Composition operators induced by invertible linear maps on ``R^n`` with density ``rho(||x||^2)``.

Closed-form evaluation only: the Radon-Nikodym derivative, the boundedness
verdict and the pointwise inequality ``rho(|x|^2)^2 <= rho(|phi^-1 x|^2) rho(|phi x|^2)``
that makes ``h o phi <= h``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .measure_space import InputError
from .report import PropertyReport


@dataclass(frozen=True)
class EntireSeriesDensity:
    """``rho(z) = sum a_k z^k``; ``is_polynomial=False`` marks a truncated genuinely entire series."""

    coefficients: tuple[float, ...]
    is_polynomial: bool = True

    def __post_init__(self):
        a = tuple(float(c) for c in self.coefficients)
        if any(c < 0 for c in a):
            raise InputError("coefficients must be nonnegative")
        if not any(c > 0 for c in a[1:]):
            raise InputError("some coefficient of positive degree must be positive")
        object.__setattr__(self, "coefficients", a)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    phi_matrix: np.ndarray
    inner_product_matrix: np.ndarray | None = None

    def __post_init__(self):
        phi = np.atleast_2d(np.asarray(self.phi_matrix, dtype=float))
        n = phi.shape[0]
        if phi.shape != (n, n):
            raise InputError("phi must be square")
        if abs(np.linalg.det(phi)) == 0:
            raise InputError("phi must be invertible")
        G = np.eye(n) if self.inner_product_matrix is None else np.atleast_2d(
            np.asarray(self.inner_product_matrix, dtype=float))
        if G.shape != (n, n) or not np.allclose(G, G.T):
            raise InputError("inner product matrix must be symmetric n x n")
        try:
            chol = np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise InputError("inner product matrix must be positive definite") from None
        object.__setattr__(self, "phi_matrix", phi)
        object.__setattr__(self, "inner_product_matrix", G)
        object.__setattr__(self, "_chol", chol)

    @classmethod
    def scalar(cls, alpha: float, dim: int = 1) -> "LinearSystem":
        return cls(alpha * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.phi_matrix.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.phi_matrix)

    def norm_sq(self, x) -> np.ndarray:
        """``||x||^2`` for points stacked along the last axis."""
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.inner_product_matrix, x)

    def operator_norm(self, A) -> float:
        """Operator norm of ``A`` with respect to the inner product (``G = L L^T``)."""
        L = self._chol
        return float(np.linalg.norm(L.T @ np.asarray(A) @ np.linalg.inv(L.T), 2))


def h_phi(sys: LinearSystem, rho: EntireSeriesDensity, x) -> np.ndarray:
    """``rho(||phi^-1 x||^2) / (|det phi| rho(||x||^2))`` at points ``x`` (last axis = coordinates)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    denom = rho(sys.norm_sq(x))
    if np.any(denom == 0):
        raise InputError("rho(||x||^2) vanishes: h is not defined at the origin when a_0 = 0")
    xinv = x @ sys.inverse.T
    return rho(sys.norm_sq(xinv)) / (abs(np.linalg.det(sys.phi_matrix)) * denom)


def is_bounded(sys: LinearSystem, rho: EntireSeriesDensity) -> PropertyReport:
    """Polynomial densities always give a bounded operator; otherwise need ``||phi^-1|| <= 1``."""
    norm_inv = sys.operator_norm(sys.inverse)
    if rho.is_polynomial:
        return PropertyReport(True, "bounded", None, 0.0, note=f"polynomial density; ||phi^-1|| = {norm_inv:.6g}")
    ok = norm_inv <= 1 + 1e-12
    witness = None if ok else {"norm_phi_inverse": norm_inv}
    return PropertyReport(ok, "bounded", witness, 1e-12, note=f"entire density; ||phi^-1|| = {norm_inv:.6g}")


def sample_points(dim: int, samples: int, seed: int, box: float = 10.0) -> np.ndarray:
    """Scrambled Sobol points in ``[-box, box]^dim``."""
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # counts like 1000 are not powers of 2; balance is not needed here
        warnings.filterwarnings("ignore", "The balance properties", UserWarning)
        pts = sampler.random(samples)
    return qmc.scale(pts, -box * np.ones(dim), box * np.ones(dim))


def density_inequality_sides(sys: LinearSystem, rho: EntireSeriesDensity, x) -> tuple[np.ndarray, np.ndarray]:
    """``(rho(||x||^2)^2, rho(||phi^-1 x||^2) rho(||phi x||^2))``."""
    x = np.asarray(x, dtype=float)
    lhs = rho(sys.norm_sq(x)) ** 2
    rhs = rho(sys.norm_sq(x @ sys.inverse.T)) * rho(sys.norm_sq(x @ sys.phi_matrix.T))
    return lhs, rhs


def check_density_inequality(sys: LinearSystem, rho: EntireSeriesDensity, samples: int = 1000, seed: int = 0,
                box: float = 10.0, rtol: float = 1e-12) -> PropertyReport:
    """Evaluate the inequality at quasi-random points; a violation must exceed ``rtol`` relative."""
    pts = sample_points(sys.dim, samples, seed, box)
    lhs, rhs = density_inequality_sides(sys, rho, pts)
    slack = (rhs - lhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    k = int(np.argmin(slack))
    ok = bool(slack[k] >= -rtol)
    witness = None if ok else {"point": pts[k].tolist(), "lhs": float(lhs[k]), "rhs": float(rhs[k])}
    return PropertyReport(ok, "density_inequality", witness, rtol,
                          note=f"{samples} points, worst relative slack {slack[k]:.3e} at {pts[k].tolist()}")


def linear_reduction_gap(alpha: float, A: float, B: float, t) -> np.ndarray:
    """``rho(t / alpha^2) rho(alpha^2 t) - rho(t)^2`` for ``rho(z) = A z + B``, evaluated directly."""
    t = np.asarray(t, dtype=float)

    def rho(z):
        return A * z + B

    return rho(t / alpha**2) * rho(alpha**2 * t) - rho(t) ** 2


def linear_reduction_closed_form(alpha: float, A: float, B: float, t) -> np.ndarray:
    """Expanded form ``A B (alpha^2 + alpha^-2 - 2) t``."""
    return A * B * (alpha**2 + alpha**-2 - 2) * np.asarray(t, dtype=float)


def weakly_centered_flag(sys: LinearSystem, rho: EntireSeriesDensity | None = None) -> PropertyReport:
    """Always true: an invertible ``phi`` makes the conditional expectation the identity."""
    meta = {"norm_phi_inverse": sys.operator_norm(sys.inverse)}
    if rho is not None:
        meta["bounded"] = is_bounded(sys, rho).verdict
    note = "phi invertible, so E_phi is the identity and h is trivially phi^-1-measurable; " + ", ".join(
        f"{k}={v}" for k, v in meta.items())
    return PropertyReport(True, "weakly_centered", None, 0.0, note=note)
