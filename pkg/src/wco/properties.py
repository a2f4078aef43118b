"""Decision procedures for operator classes of weighted composition systems.

The closed-form checks compare values of ``h`` on atoms charged by ``mu_w``;
cohyponormality and centeredness have no closed form here and go through the
matrix realisation.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import oracle
from .measure_space import DEFAULT_RTOL, InputError, close
from .model import WcoSystem, conditional_expectation, fibers, rn_values
from .report import PropertyReport

PSD_FLOOR = 1e-9


def _ids(sys: WcoSystem, *ks: int) -> list[str]:
    return [sys.space.ids[k] for k in ks]


def _fiber_pair_mismatch(sys: WcoSystem, values: np.ndarray, rtol: float):
    """First pair of charged atoms in a common fiber whose values differ."""
    charged = sys.mu_w > 0
    parts = fibers(sys).fibers
    for z in range(len(sys)):
        members = [y for y in parts.get(z, []) if charged[y]]
        for a, b in itertools.combinations(members, 2):
            if not close(values[a], values[b], rtol):
                return z, a, b
    return None


def is_weakly_centered(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """``h`` is constant on every fiber of ``phi``, ignoring ``mu_w``-null atoms."""
    h = rn_values(sys)
    bad = _fiber_pair_mismatch(sys, h, rtol)
    if bad is None:
        return PropertyReport(True, "weakly_centered", None, rtol)
    z, a, b = bad
    witness = {"fiber_of": sys.space.ids[z], "pair": _ids(sys, a, b), "h": [float(h[a]), float(h[b])]}
    return PropertyReport(False, "weakly_centered", witness, rtol)


def _extended_power(h: np.ndarray, alpha: float) -> np.ndarray:
    out = np.empty_like(h)
    pos = h > 0
    out[pos] = h[pos] ** alpha
    out[~pos] = 0.0 if alpha > 0 else np.inf
    return out


def is_weakly_centered_alpha(sys: WcoSystem, alpha: float, rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """``h^alpha = E(h^alpha)`` a.e. [mu_w].

    For ``alpha < 0`` the power is taken in ``[0, inf]`` with ``0^alpha = inf``,
    which keeps ``t -> t^alpha`` a bijection of ``[0, inf]``.
    """
    alpha = float(alpha)
    if alpha == 0:
        raise InputError("alpha must be nonzero")
    name = f"weakly_centered_alpha({alpha:g})"
    h = rn_values(sys)
    ha = _extended_power(h, alpha)
    eha = conditional_expectation(sys, ha)
    bad = sys.ae_w.mismatches(ha, eha, rtol)
    note = ""
    if alpha < 0 and np.any((h == 0) & (sys.mu_w > 0)):
        note = "h vanishes on a mu_w-atom; negative powers read 0^alpha as +inf"
    if not bad.size:
        return PropertyReport(True, name, None, rtol, note=note)
    k = int(bad[0])
    witness = {"alpha": alpha, "atom": sys.space.ids[k], "h_alpha": float(ha[k]), "E_h_alpha": float(eha[k])}
    return PropertyReport(False, name, witness, rtol, note=note)


def is_quasinormal(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """``h = h o phi`` a.e. [mu_w]."""
    h = rn_values(sys)
    hphi = h[sys.phi]
    bad = sys.ae_w.mismatches(h, hphi, rtol)
    if not bad.size:
        return PropertyReport(True, "quasinormal", None, rtol)
    k = int(bad[0])
    witness = {"atom": sys.space.ids[k], "h": float(h[k]), "h_phi": float(hphi[k])}
    return PropertyReport(False, "quasinormal", witness, rtol)


def is_hyponormal(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """``h o phi <= h`` a.e. [mu_w]."""
    h = rn_values(sys)
    hphi = h[sys.phi]
    for k in np.flatnonzero(sys.mu_w > 0):
        if hphi[k] > h[k] + rtol * max(1.0, h[k], hphi[k]):
            witness = {"atom": sys.space.ids[k], "h": float(h[k]), "h_phi": float(hphi[k])}
            return PropertyReport(False, "hyponormal", witness, rtol)
    return PropertyReport(True, "hyponormal", None, rtol)


def _psd_report(name: str, H: np.ndarray, scale: float, floor: float) -> PropertyReport:
    lam = oracle.min_eigenvalue(H) / scale
    if lam >= -floor:
        return PropertyReport(True, name, None, floor, note=f"min scaled eigenvalue {lam:.3e}")
    return PropertyReport(False, name, {"min_eigenvalue": lam}, floor)


def matrix_hyponormal(sys: WcoSystem, floor: float = PSD_FLOOR) -> PropertyReport:
    T = oracle.to_matrix(sys).entries
    Th = T.conj().T
    return _psd_report("hyponormal", Th @ T - T @ Th, max(1.0, oracle.spectral_norm(T)) ** 2, floor)


def is_cohyponormal(sys: WcoSystem, floor: float = PSD_FLOOR) -> PropertyReport:
    """``T T* - T* T`` positive semidefinite up to ``-floor * max(1, ||T||)^2``."""
    T = oracle.to_matrix(sys).entries
    Th = T.conj().T
    return _psd_report("cohyponormal", T @ Th - Th @ T, max(1.0, oracle.spectral_norm(T)) ** 2, floor)


def is_centered(sys: WcoSystem, depth: int = 4, tol: float = DEFAULT_RTOL) -> PropertyReport:
    """``{T*^n T^n, T^m T*^m : n, m <= depth}`` pairwise commute (scaled norms)."""
    if not 1 <= depth <= 8:
        raise InputError("depth must lie in 1..8")
    T = oracle.to_matrix(sys).entries
    Th = T.conj().T
    s = max(1.0, oracle.spectral_norm(T))
    family = []
    Tn = np.eye(len(sys), dtype=complex)
    for n in range(depth + 1):
        Tnh = Tn.conj().T
        family.append((f"T*^{n}T^{n}", Tnh @ Tn, 2 * n))
        family.append((f"T^{n}T*^{n}", Tn @ Tnh, 2 * n))
        Tn = Tn @ T
    worst = 0.0
    for (la, A, pa), (lb, B, pb) in itertools.combinations(family, 2):
        gap = oracle.spectral_norm(A @ B - B @ A) / s ** (pa + pb)
        if gap > tol:
            return PropertyReport(False, "centered", {"pair": [la, lb], "commutator": gap}, tol)
        worst = max(worst, gap)
    return PropertyReport(True, "centered", None, tol, note=f"largest scaled commutator {worst:.3e}")


def is_isometry_multiple(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """``h`` constant on all atoms."""
    h = rn_values(sys)
    for k in range(1, len(h)):
        if not close(h[0], h[k], rtol):
            witness = {"pair": _ids(sys, 0, k), "h": [float(h[0]), float(h[k])]}
            return PropertyReport(False, "isometry_multiple", witness, rtol)
    return PropertyReport(True, "isometry_multiple", None, rtol)


def all_reports(sys: WcoSystem, rtol: float = DEFAULT_RTOL) -> list[PropertyReport]:
    out = [
        is_weakly_centered(sys, rtol),
        *(is_weakly_centered_alpha(sys, a, rtol) for a in (0.5, 2.0, -1.0)),
        is_quasinormal(sys, rtol),
        is_hyponormal(sys, rtol),
        is_isometry_multiple(sys, rtol),
    ]
    if len(sys) <= oracle.MAX_DIM:
        out += [is_cohyponormal(sys), is_centered(sys, 4, rtol)]
    return out
