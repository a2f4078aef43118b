"""Closed-form weights for the phase, the Aluthge transforms and the projection P."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure_space import InputError
from .model import WcoSystem, conditional_expectation, rn_values, weight_quotient


@dataclass(frozen=True)
class PolarData:
    phase_weight: np.ndarray
    modulus_density: np.ndarray

    def phase_system(self, sys: WcoSystem) -> WcoSystem:
        return sys.with_weight(self.phase_weight)


@dataclass(frozen=True)
class AluthgeWeights:
    alpha: float
    w_alpha: np.ndarray
    phase_weight: np.ndarray

    def system(self, sys: WcoSystem) -> WcoSystem:
        return sys.with_weight(self.w_alpha)

    def phase_system(self, sys: WcoSystem) -> WcoSystem:
        return sys.with_weight(self.phase_weight)


def polar(sys: WcoSystem) -> PolarData:
    """Phase weight ``w / sqrt(h o phi)`` (0 where ``w = 0``) and modulus density ``sqrt(h)``."""
    h = rn_values(sys)
    hphi = h[sys.phi]
    nz = sys.w != 0
    phase = np.zeros(len(sys), dtype=complex)
    # h(phi(x)) >= |w(x)|^2 mu(x) / mu(phi(x)) > 0 wherever w(x) != 0
    phase[nz] = sys.w[nz] / np.sqrt(hphi[nz])
    return PolarData(phase, np.sqrt(h))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def aluthge_weight(sys: WcoSystem, alpha: float) -> AluthgeWeights:
    """Weights of the alpha-Aluthge transform and of its phase.

    ``w_alpha = w * (h / h o phi)^(alpha/2)`` and
    ``phase = w / sqrt(h o phi) * sqrt(h^alpha) / sqrt(E(h^alpha))``, both forced
    to 0 wherever ``w = 0`` (and the phase also where ``E(h^alpha)`` vanishes).
    """
    alpha = _check_alpha(alpha)
    h = rn_values(sys)
    hphi = h[sys.phi]
    nz = sys.w != 0
    w_alpha = np.zeros(len(sys), dtype=complex)
    w_alpha[nz] = sys.w[nz] * (h[nz] / hphi[nz]) ** (alpha / 2)

    ha = h ** alpha
    eha = conditional_expectation(sys, ha)
    phase = np.zeros(len(sys), dtype=complex)
    ok = nz & (eha > 0)
    phase[ok] = sys.w[ok] / np.sqrt(hphi[ok]) * np.sqrt(ha[ok]) / np.sqrt(eha[ok])
    return AluthgeWeights(alpha, w_alpha, phase)


def projection_P(sys: WcoSystem, f) -> np.ndarray:
    """``P f = w * E(f_w)``; an orthogonal projection on ``L^2(mu)``."""
    return sys.w * conditional_expectation(sys, weight_quotient(sys, f))
