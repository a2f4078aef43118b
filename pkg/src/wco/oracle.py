"""Dense matrix realisation of weighted composition operators.

Everything here works on the matrix of ``C`` in the orthonormal basis
``e_x = chi_{x} / sqrt(mu({x}))`` and uses only generic linear algebra (SVD,
Hermitian eigendecomposition), so it serves as an independent check of the
closed-form criteria elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .measure_space import InputError
from .model import WcoSystem, rn_values
from .report import PropertyReport
from .transforms import projection_P

MAX_DIM = 64
SV_ZERO = 1e-12
CLUSTER_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    basis: tuple[str, ...]
    masses: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _arr(M) -> np.ndarray:
    return M.entries if isinstance(M, OperatorMatrix) else np.asarray(M, dtype=complex)


def spectral_norm(M) -> float:
    T = _arr(M)
    if T.size == 0:
        return 0.0
    return float(np.linalg.norm(T, 2))


def to_matrix(sys: WcoSystem, max_dim: int = MAX_DIM) -> OperatorMatrix:
    """``entry[y, x] = w(y) [phi(y) = x] sqrt(mu(y) / mu(x))``."""
    n = len(sys)
    if n > max_dim:
        raise InputError(f"{n} atoms exceeds the oracle cap of {max_dim}")
    m = sys.masses
    T = np.zeros((n, n), dtype=complex)
    for y in range(n):
        x = sys.phi[y]
        T[y, x] = sys.w[y] * np.sqrt(m[y] / m[x])
    return OperatorMatrix(T, sys.space.ids, m)


def coords(sys: WcoSystem, f) -> np.ndarray:
    """Coordinates of a function in the orthonormal basis."""
    return np.asarray(f) * np.sqrt(sys.masses)


def from_coords(sys: WcoSystem, c) -> np.ndarray:
    return np.asarray(c) / np.sqrt(sys.masses)


def linear_map_matrix(sys: WcoSystem, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Matrix of a function-level linear map, built column by column."""
    n = len(sys)
    out = np.zeros((n, n), dtype=complex)
    for x in range(n):
        e = np.zeros(n, dtype=complex)
        e[x] = 1.0
        out[:, x] = coords(sys, fn(from_coords(sys, e)))
    return out


def multiplication_matrix(g) -> np.ndarray:
    return np.diag(np.asarray(g, dtype=complex))


def projection_matrix(sys: WcoSystem) -> np.ndarray:
    return linear_map_matrix(sys, lambda f: projection_P(sys, f))


def _scale(T: np.ndarray, power: int) -> float:
    return max(1.0, spectral_norm(T)) ** power


def weak_centered_commutator(M) -> float:
    """``||T T* T* T - T* T T T*|| / max(1, ||T||)^4``."""
    T = _arr(M)
    Th = T.conj().T
    A = T @ Th
    B = Th @ T
    return spectral_norm(A @ B - B @ A) / _scale(T, 4)


def quasinormal_commutator(M) -> float:
    """``||T* T T - T T* T|| / max(1, ||T||)^3``."""
    T = _arr(M)
    Th = T.conj().T
    return spectral_norm(Th @ T @ T - T @ Th @ T) / _scale(T, 3)


def normality_gap(M) -> float:
    T = _arr(M)
    Th = T.conj().T
    return spectral_norm(Th @ T - T @ Th) / _scale(T, 2)


@dataclass(frozen=True)
class _Svd:
    W: np.ndarray
    s: np.ndarray
    V: np.ndarray
    rank: int


def _svd(T: np.ndarray, zero: float = SV_ZERO, reference: float | None = None) -> _Svd:
    W, s, Vh = np.linalg.svd(T)
    V = Vh.conj().T
    smax = s[0] if s.size else 0.0
    if reference is not None:
        smax = max(smax, float(reference))
    rank = int(np.sum(s > zero * smax)) if smax > 0 else 0
    return _Svd(W, s, V, rank)


def _modulus_power(vecs: np.ndarray, s: np.ndarray, rank: int, p: float) -> np.ndarray:
    n = vecs.shape[0]
    if p == 0:
        return np.eye(n, dtype=complex)
    Vr = vecs[:, :rank]
    return (Vr * s[:rank] ** p) @ Vr.conj().T


def modulus(M, p: float = 1.0, zero: float = SV_ZERO) -> np.ndarray:
    """``|T|^p = (T* T)^(p/2)`` from the SVD; ``p = 0`` gives the identity."""
    d = _svd(_arr(M), zero)
    return _modulus_power(d.V, d.s, d.rank, p)


def co_modulus(M, p: float = 1.0, zero: float = SV_ZERO) -> np.ndarray:
    """``|T*|^p = (T T*)^(p/2)``."""
    d = _svd(_arr(M), zero)
    return _modulus_power(d.W, d.s, d.rank, p)


def moduli_commutator(M) -> float:
    """``|| |T||T*| - |T*||T| || / max(1, ||T||)^2``."""
    T = _arr(M)
    d = _svd(T)
    P = _modulus_power(d.V, d.s, d.rank, 1.0)
    Q = _modulus_power(d.W, d.s, d.rank, 1.0)
    return spectral_norm(P @ Q - Q @ P) / _scale(T, 2)


def svd_polar(M, zero: float = SV_ZERO, reference: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Phase ``U`` (partial isometry vanishing on ker T) and modulus ``|T|``.

    Singular values at or below ``zero * max(sigma_max, reference)`` count as 0;
    pass ``reference`` when ``M`` was computed from a larger matrix and may be
    pure rounding noise.
    """
    d = _svd(_arr(M), zero, reference)
    r = d.rank
    U = d.W[:, :r] @ d.V[:, :r].conj().T
    return U, _modulus_power(d.V, d.s, r, 1.0)


def aluthge_matrix(M, alpha: float, zero: float = SV_ZERO) -> np.ndarray:
    """``|T|^alpha U |T|^(1 - alpha)``."""
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    d = _svd(_arr(M), zero)
    r = d.rank
    U = d.W[:, :r] @ d.V[:, :r].conj().T
    return _modulus_power(d.V, d.s, r, alpha) @ U @ _modulus_power(d.V, d.s, r, 1 - alpha)


def min_eigenvalue(H: np.ndarray) -> float:
    H = (H + H.conj().T) / 2
    return float(np.linalg.eigvalsh(H)[0]) if H.size else 0.0


def psd_within(H: np.ndarray, floor: float) -> bool:
    return min_eigenvalue(H) >= -floor


# -- spectral measures ------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A real interval; ``None`` endpoints are infinite."""

    lo: float | None = None
    hi: float | None = None
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, v: float, atol: float = 0.0) -> bool:
        if self.lo is not None:
            if self.lo_closed and v < self.lo - atol:
                return False
            if not self.lo_closed and v <= self.lo + atol:
                return False
        if self.hi is not None:
            if self.hi_closed and v > self.hi + atol:
                return False
            if not self.hi_closed and v >= self.hi - atol:
                return False
        return True

    @classmethod
    def point(cls, t: float) -> "Interval":
        return cls(t, t)

    @classmethod
    def below(cls, t: float) -> "Interval":
        return cls(None, t)


REAL_LINE = (Interval(),)


def in_sigma(v: float, sigma: Iterable[Interval], atol: float = 0.0) -> bool:
    return any(iv.contains(v, atol) for iv in sigma)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    projectors: list[np.ndarray]

    def measure(self, sigma: Sequence[Interval], atol: float = 0.0) -> np.ndarray:
        n = self.projectors[0].shape[0] if self.projectors else 0
        out = np.zeros((n, n), dtype=complex)
        for lam, P in zip(self.eigenvalues, self.projectors):
            if in_sigma(lam, sigma, atol):
                out += P
        return out

    def reconstruct(self) -> np.ndarray:
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projectors))


def cluster_tol(values) -> float:
    values = np.asarray(values, dtype=float)
    spread = float(values.max() - values.min()) if values.size else 0.0
    return CLUSTER_RTOL * max(1.0, spread)


def spectral_decomposition(H: np.ndarray) -> SpectralDecomposition:
    """Eigenvalue clusters (within ``1e-8 * max(1, spread)``) and their projectors."""
    H = (np.asarray(H) + np.asarray(H).conj().T) / 2
    vals, vecs = np.linalg.eigh(H)
    tol = cluster_tol(vals)
    groups: list[list[int]] = []
    for k, v in enumerate(vals):
        if groups and v - vals[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    eig = np.array([vals[g].mean() for g in groups])
    projs = [vecs[:, g] @ vecs[:, g].conj().T for g in groups]
    return SpectralDecomposition(eig, projs)


def _sigma_mask(values, sigma, atol) -> np.ndarray:
    return np.array([in_sigma(float(v), sigma, atol) for v in values], dtype=bool)


def spectral_measure_B(sys: WcoSystem, sigma: Sequence[Interval] = REAL_LINE, atol: float | None = None) -> np.ndarray:
    """Spectral measure of ``C* C``: multiplication by the indicator of ``h^{-1}(sigma)``."""
    h = rn_values(sys)
    atol = cluster_tol(np.append(h, 0.0)) if atol is None else atol
    return np.diag(_sigma_mask(h, sigma, atol).astype(complex))


def spectral_measure_A(sys: WcoSystem, sigma: Sequence[Interval] = REAL_LINE, atol: float | None = None) -> np.ndarray:
    """Spectral measure of ``C C*``: ``M_{chi_Gamma} P + chi_sigma(0) (I - P)`` with ``Gamma = (h o phi)^{-1}(sigma)``."""
    h = rn_values(sys)
    hphi = h[sys.phi]
    atol = cluster_tol(np.append(h, 0.0)) if atol is None else atol
    P = projection_matrix(sys)
    gamma = np.diag(_sigma_mask(hphi, sigma, atol).astype(complex))
    out = gamma @ P
    if in_sigma(0.0, sigma, atol):
        out = out + np.eye(len(sys)) - P
    return out


def eigen_measure(H: np.ndarray, sigma: Sequence[Interval], atol: float) -> np.ndarray:
    return spectral_decomposition(H).measure(sigma, atol)


def spectral_grid(sys: WcoSystem) -> np.ndarray:
    """Distinct values of ``h``, ``h o phi`` and 0 (clustered): the thresholds where F_A, F_B can jump."""
    h = rn_values(sys)
    vals = np.sort(np.concatenate([h, h[sys.phi], [0.0]]))
    tol = cluster_tol(vals)
    grid = [vals[0]]
    for v in vals[1:]:
        if v - grid[-1] > tol:
            grid.append(v)
    return np.array(grid)


def olson_order_check(sys: WcoSystem, rtol: float = 1e-9, floor: float = 1e-9) -> PropertyReport:
    """``F_A(t) - F_B(t)`` is positive semidefinite at every spectral threshold ``t``."""
    from .properties import is_hyponormal, is_weakly_centered

    wc = is_weakly_centered(sys, rtol)
    hy = is_hyponormal(sys, rtol)
    name = "olson_order"
    if not (wc.verdict and hy.verdict):
        failing = "weakly centered" if not wc.verdict else "hyponormal"
        return PropertyReport.not_applicable(name, f"hypothesis fails: not {failing}", rtol)
    T = to_matrix(sys).entries
    Th = T.conj().T
    A = spectral_decomposition(T @ Th)
    B = spectral_decomposition(Th @ T)
    grid = spectral_grid(sys)
    atol = cluster_tol(grid)
    worst = np.inf
    worst_t = None
    for t in grid:
        sigma = [Interval.below(float(t))]
        lam = min_eigenvalue(A.measure(sigma, atol) - B.measure(sigma, atol))
        if lam < worst:
            worst, worst_t = lam, float(t)
    ok = worst >= -floor
    witness = None if ok else {"threshold": worst_t, "min_eigenvalue": worst}
    return PropertyReport(ok, name, witness, rtol, note=f"min eigenvalue of F_A - F_B: {worst:.3e}")


def intertwining_gap(sys: WcoSystem, t: float) -> float:
    """``|| E_A((-inf, t]) T - T E_B((-inf, t]) ||`` using the eigenprojector constructions."""
    T = to_matrix(sys).entries
    Th = T.conj().T
    atol = cluster_tol(spectral_grid(sys))
    sigma = [Interval.below(float(t))]
    EA = eigen_measure(T @ Th, sigma, atol)
    EB = eigen_measure(Th @ T, sigma, atol)
    return spectral_norm(EA @ T - T @ EB) / _scale(T, 1)


def kernel_dim(M, zero: float = SV_ZERO) -> int:
    T = _arr(M)
    return T.shape[0] - _svd(T, zero).rank


def co_kernel_dim(M, zero: float = SV_ZERO) -> int:
    T = _arr(M)
    return T.shape[0] - _svd(T.conj().T, zero).rank
