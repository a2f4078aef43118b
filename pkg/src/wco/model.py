"""Weighted composition systems ``f -> w * (f o phi)`` on a discrete space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .measure_space import AeContext, DiscreteMeasureSpace, InputError, _readonly


@dataclass(frozen=True, eq=False)
class WcoSystem:
    """A transformation ``phi`` (index array) and complex weight ``w`` over ``space``."""

    space: DiscreteMeasureSpace
    phi: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        n = len(self.space)
        phi = np.array(self.phi, dtype=int).reshape(-1)
        w = np.array(self.w, dtype=complex).reshape(-1)
        if phi.size != n or w.size != n:
            raise InputError("phi and w must be defined on every atom")
        if np.any(phi < 0) or np.any(phi >= n):
            raise InputError("phi must map into the atom set")
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        object.__setattr__(self, "phi", _readonly(phi))
        object.__setattr__(self, "w", _readonly(w))

    @classmethod
    def from_mapping(cls, space: DiscreteMeasureSpace, phi: Mapping[str, str],
                     w: Mapping[str, complex] | None = None) -> "WcoSystem":
        """Build from id mappings. Missing ``w`` entries are 0; missing ``phi`` entries are an error."""
        missing = [a for a in space.ids if a not in phi]
        if missing:
            raise InputError(f"phi undefined at {missing[0]!r}")
        extra = [a for a in phi if a not in space._index]
        if extra:
            raise InputError(f"unknown atom id {extra[0]!r} in phi")
        idx = np.array([space.index(phi[a]) for a in space.ids], dtype=int)
        return cls(space, idx, space.field(w))

    def __len__(self) -> int:
        return len(self.space)

    @property
    def masses(self) -> np.ndarray:
        return self.space.masses

    @property
    def mu_w(self) -> np.ndarray:
        """Atom masses of ``mu_w``, i.e. ``|w(x)|^2 mu({x})``."""
        return np.abs(self.w) ** 2 * self.space.masses

    @property
    def ae_w(self) -> AeContext:
        return AeContext(self.mu_w)

    def with_weight(self, w) -> "WcoSystem":
        return WcoSystem(self.space, self.phi, w)

    def scaled(self, c: complex) -> "WcoSystem":
        return WcoSystem(self.space, self.phi, self.w * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WcoSystem):
            return NotImplemented
        return (self.space == other.space and np.array_equal(self.phi, other.phi)
                and np.array_equal(self.w, other.w))

    __hash__ = None


@dataclass(frozen=True)
class RadonNikodymData:
    h: np.ndarray
    support: frozenset[int]


@dataclass(frozen=True)
class FiberPartition:
    fibers: dict[int, list[int]]

    def of(self, z: int) -> list[int]:
        return self.fibers.get(z, [])


def fibers(sys: WcoSystem) -> FiberPartition:
    out: dict[int, list[int]] = {}
    for y, z in enumerate(sys.phi):
        out.setdefault(int(z), []).append(y)
    return FiberPartition(out)


def rn_values(sys: WcoSystem) -> np.ndarray:
    """``h(x) = mu_w(phi^{-1}{x}) / mu({x})`` as a float array."""
    pushed = np.bincount(sys.phi, weights=sys.mu_w, minlength=len(sys))
    return pushed / sys.masses


def radon_nikodym(sys: WcoSystem) -> RadonNikodymData:
    h = rn_values(sys)
    return RadonNikodymData(_readonly(h), frozenset(np.flatnonzero(h > 0).tolist()))


def _fiber_averages(sys: WcoSystem, f: np.ndarray) -> np.ndarray:
    # g(z) = sum_{phi(y)=z} mu_w(y) f(y) / mu_w(phi^{-1}{z}), 0 on null fibers
    f = np.asarray(f)
    n = len(sys)
    mw = sys.mu_w
    denom = np.bincount(sys.phi, weights=mw, minlength=n)
    if np.iscomplexobj(f):
        num = (np.bincount(sys.phi, weights=mw * f.real, minlength=n)
               + 1j * np.bincount(sys.phi, weights=mw * f.imag, minlength=n))
    else:
        num = np.bincount(sys.phi, weights=mw * f, minlength=n)
    out = np.zeros(n, dtype=num.dtype)
    pos = denom > 0
    out[pos] = num[pos] / denom[pos]
    return out


def _extended_fiber_averages(sys: WcoSystem, f: np.ndarray) -> np.ndarray:
    # Nonnegative extended values: a charged +inf makes the whole fiber +inf.
    f = np.asarray(f, dtype=float)
    inf = np.isinf(f)
    finite = np.where(inf, 0.0, f)
    out = _fiber_averages(sys, finite)
    charged_inf = np.bincount(sys.phi, weights=(inf & (sys.mu_w > 0)).astype(float), minlength=len(sys))
    out[charged_inf > 0] = np.inf
    return out


def conditional_expectation(sys: WcoSystem, f) -> np.ndarray:
    """Conditional expectation onto ``phi^{-1}``-measurable functions in ``L^2(mu_w)``.

    On a discrete space this is the ``mu_w``-weighted average of ``f`` over the
    fiber ``phi^{-1}(phi(x))``. Fibers of ``mu_w``-mass zero get the value 0.
    Nonnegative inputs may contain ``inf``.
    """
    f = np.asarray(f)
    if not np.iscomplexobj(f) and np.any(np.isinf(f)):
        return _extended_fiber_averages(sys, f)[sys.phi]
    return _fiber_averages(sys, f)[sys.phi]


def cond_exp_pullback(sys: WcoSystem, f) -> np.ndarray:
    """The function ``g`` with ``g o phi = E(f)`` a.e. [mu_w] and ``g = 0`` on ``{h = 0}``."""
    f = np.asarray(f)
    if not np.iscomplexobj(f) and np.any(np.isinf(f)):
        return _extended_fiber_averages(sys, f)
    return _fiber_averages(sys, f)


def weight_quotient(sys: WcoSystem, f) -> np.ndarray:
    """``f_w = chi_{w != 0} f / w``."""
    f = np.asarray(f, dtype=complex)
    out = np.zeros(len(sys), dtype=complex)
    nz = sys.w != 0
    out[nz] = f[nz] / sys.w[nz]
    return out


def apply(sys: WcoSystem, f) -> np.ndarray:
    """``C f = w * (f o phi)``."""
    return sys.w * np.asarray(f)[sys.phi]


def apply_adjoint(sys: WcoSystem, f) -> np.ndarray:
    """``C* f = h * (E(f_w) o phi^{-1})``."""
    h = rn_values(sys)
    return h * cond_exp_pullback(sys, weight_quotient(sys, f))


def operator_norm(sys: WcoSystem) -> float:
    return float(np.sqrt(np.max(rn_values(sys))))


def compose_square(sys: WcoSystem) -> WcoSystem:
    """The system ``(phi o phi, w * (w o phi))`` representing ``C^2``."""
    return WcoSystem(sys.space, sys.phi[sys.phi], sys.w * sys.w[sys.phi])
