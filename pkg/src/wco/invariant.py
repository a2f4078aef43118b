"""Invariant subspaces for weakly centered hyponormal systems, and the Aluthge domain-gap diagnostic.

At finite dimension a hyponormal operator is normal, so invariant subspaces
exist for classical reasons; what is checked here is the specific
construction ``chi_{h > t0} L^2(mu)`` and the kernel/range case split that
precedes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .measure_space import DEFAULT_RTOL, DiscreteMeasureSpace, InputError
from .model import WcoSystem, cond_exp_pullback, rn_values
from .properties import is_hyponormal, is_weakly_centered
from .report import PropertyReport

MATRIX_TOL = 1e-10


@dataclass(frozen=True)
class SubspaceDescriptor:
    kind: str  # "level_set" | "kernel" | "range_closure"
    atoms: frozenset[str]
    threshold: float | None = None
    # orthonormal columns, only for range_closure (not a coordinate subspace in general)
    basis: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "atoms": sorted(self.atoms), "threshold": self.threshold}


@dataclass(frozen=True)
class NotApplicable:
    reason: str

    def to_dict(self) -> dict:
        return {"kind": "not_applicable", "reason": self.reason}


def distinct_levels(values, rtol: float = DEFAULT_RTOL) -> list[float]:
    levels: list[float] = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if not levels or v - levels[-1] > rtol * max(1.0, abs(v)):
            levels.append(float(v))
    return levels


def top_level_threshold(h, rtol: float = DEFAULT_RTOL) -> float | None:
    """Midpoint of the two largest distinct values of ``h`` (None if ``h`` is constant)."""
    levels = distinct_levels(h, rtol)
    if len(levels) < 2:
        return None
    return (levels[-2] + levels[-1]) / 2


def find_invariant(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> SubspaceDescriptor | NotApplicable:
    wc = is_weakly_centered(sys, rtol)
    if not wc:
        return NotApplicable("hypothesis fails: not weakly centered")
    hy = is_hyponormal(sys, rtol)
    if not hy:
        return NotApplicable("hypothesis fails: not hyponormal")
    h = rn_values(sys)
    ids = sys.space.ids
    if len(distinct_levels(h, rtol)) < 2:
        return NotApplicable("scalar multiple of an isometry")
    # ker C is spanned by the atoms with no charged preimage, i.e. {h = 0}
    kernel = frozenset(ids[k] for k in np.flatnonzero(h == 0))
    if kernel:
        return SubspaceDescriptor("kernel", kernel)
    T = oracle.to_matrix(sys).entries
    if oracle.co_kernel_dim(T):
        W, s, _ = np.linalg.svd(T)
        r = int(np.sum(s > oracle.SV_ZERO * s[0]))
        support = frozenset(ids[k] for k in np.flatnonzero(sys.w != 0))
        return SubspaceDescriptor("range_closure", support, basis=W[:, :r])
    t0 = top_level_threshold(h, rtol)
    atoms = frozenset(ids[k] for k in np.flatnonzero(h > t0))
    return SubspaceDescriptor("level_set", atoms, threshold=t0)


def verify_invariant(sys: WcoSystem, S: SubspaceDescriptor, tol: float = MATRIX_TOL) -> PropertyReport:
    """Combinatorial and matrix check that ``T`` maps the subspace into itself."""
    n = len(sys)
    T = oracle.to_matrix(sys).entries
    trivial = False
    if S.basis is not None:
        Q = S.basis
        proj = Q @ Q.conj().T
        combinatorial_ok = True
        offending = None
        trivial = Q.shape[1] in (0, n)
    else:
        inside = sys.space.mask(S.atoms)
        trivial = not inside.any() or inside.all()
        offending = None
        for y in range(n):
            if sys.w[y] != 0 and inside[sys.phi[y]] and not inside[y]:
                offending = sys.space.ids[y]
                break
        combinatorial_ok = offending is None
        proj = np.diag(inside.astype(complex))
    gap = oracle.spectral_norm((np.eye(n) - proj) @ T @ proj)
    ok = combinatorial_ok and gap <= tol
    note = "trivial subspace" if trivial else ""
    if ok:
        return PropertyReport(True, "invariant_subspace", None, tol, note=note)
    witness = {"escaping_atom": offending, "matrix_gap": gap}
    return PropertyReport(False, "invariant_subspace", witness, tol, note=note)


# -- Aluthge domain gap -----------------------------------------------------


def domain_gap_weight(k: int) -> float:
    """Weights on Z: ``w(3n) = 1, w(3n+1) = n^2, w(3n+2) = n^-2`` for ``n >= 1``, else 1."""
    n, r = divmod(k, 3)
    if n < 1:
        return 1.0
    return (1.0, float(n * n), 1.0 / (n * n))[r]


def domain_gap_system(n_max: int) -> WcoSystem:
    """Window ``[-3, 3 n_max + 2]`` of the shift ``phi(k) = k - 1``, closed into a cycle.

    The lowest atom wraps to the highest so that ``phi`` stays injective; the
    wrap only affects ``h`` at the top atom, which the diagnostic never reads.
    """
    lo, hi = -3, 3 * n_max + 2
    ks = list(range(lo, hi + 1))
    space = DiscreteMeasureSpace.counting(str(k) for k in ks)
    phi = {str(k): str(k - 1 if k > lo else hi) for k in ks}
    w = {str(k): domain_gap_weight(k) for k in ks}
    return WcoSystem.from_mapping(space, phi, w)


def aluthge_domain_gap(n_max: int) -> list[tuple[int, float]]:
    """``r(x) = sqrt(h(x)) / (1 + (E(sqrt h) o phi^{-1})(x) sqrt(h(x)))`` at ``x = 3n``, ``n = 1..n_max``.

    No constant bounds ``r`` when the sequence grows without bound.
    """
    if n_max < 2:
        raise InputError("n_max must be at least 2")
    sys = domain_gap_system(n_max)
    sqrt_h = np.sqrt(rn_values(sys))
    pulled = cond_exp_pullback(sys, sqrt_h)
    out = []
    for n in range(1, n_max + 1):
        k = sys.space.index(str(3 * n))
        out.append((n, float(sqrt_h[k] / (1 + pulled[k].real * sqrt_h[k]))))
    return out
