"""Finite discrete measure spaces.

Scalar functions on a space are plain numpy arrays aligned with the declared
atom order; ``space.field(...)`` and ``space.as_dict(...)`` convert between the
array form and ``{atom_id: value}`` mappings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

DEFAULT_RTOL = 1e-9


class InputError(ValueError):
    """Malformed or inconsistent user input."""


def close(a, b, rtol: float = DEFAULT_RTOL) -> bool:
    """Scaled comparison ``|a - b| <= rtol * max(1, |a|, |b|)``; infinities match only themselves."""
    a = complex(a)
    b = complex(b)
    if np.isinf(a) or np.isinf(b):
        return a == b
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasureSpace:
    ids: tuple[str, ...]
    masses: np.ndarray
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        masses = np.array(self.masses, dtype=float).reshape(-1)
        if not ids:
            raise InputError("a measure space needs at least one atom")
        if len(ids) != masses.size:
            raise InputError("ids and masses differ in length")
        if len(set(ids)) != len(ids):
            raise InputError("atom ids must be unique")
        if not np.all(np.isfinite(masses)) or np.any(masses <= 0):
            raise InputError("every atom mass must be finite and > 0")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "masses", _readonly(masses))
        object.__setattr__(self, "_index", {a: k for k, a in enumerate(ids)})

    @classmethod
    def counting(cls, ids: Iterable) -> "DiscreteMeasureSpace":
        ids = tuple(str(i) for i in ids)
        return cls(ids, np.ones(len(ids)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, float]]) -> "DiscreteMeasureSpace":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), np.array([p[1] for p in pairs], dtype=float))

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasureSpace):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.masses, other.masses)

    def __hash__(self) -> int:
        return hash((self.ids, self.masses.tobytes()))

    def index(self, atom_id: str) -> int:
        try:
            return self._index[str(atom_id)]
        except KeyError:
            raise InputError(f"unknown atom id {atom_id!r}") from None

    def indices(self, atom_ids: Iterable[str]) -> np.ndarray:
        return np.array([self.index(a) for a in atom_ids], dtype=int)

    def mask(self, subset: Iterable[str]) -> np.ndarray:
        m = np.zeros(len(self), dtype=bool)
        m[self.indices(subset)] = True
        return m

    def field(self, values: Mapping[str, complex] | None = None, default=0.0, dtype=complex) -> np.ndarray:
        """Array aligned with atom order from a (possibly partial) mapping."""
        out = np.full(len(self), default, dtype=dtype)
        for k, v in (values or {}).items():
            out[self.index(k)] = v
        return out

    def as_dict(self, values: np.ndarray) -> dict[str, complex]:
        return {a: values[k] for k, a in enumerate(self.ids)}

    def scaled(self, c: float) -> "DiscreteMeasureSpace":
        return DiscreteMeasureSpace(self.ids, self.masses * c)


def integrate(space: DiscreteMeasureSpace, f: np.ndarray, subset: Iterable[str] | None = None) -> complex:
    """Sum of ``f(x) * mu({x})`` over ``subset`` (all atoms when omitted)."""
    f = np.asarray(f)
    if subset is None:
        return complex(np.sum(f * space.masses))
    idx = space.indices(subset)
    idx = np.unique(idx)
    return complex(np.sum(f[idx] * space.masses[idx]))


def push_forward_measure(space: DiscreteMeasureSpace, phi: np.ndarray, w: np.ndarray, target: Iterable[str]) -> float:
    """``mu_w(phi^{-1}(target))`` summed straight from the definition.

    ``phi`` is an index array (atom ``k`` maps to atom ``phi[k]``) and ``w`` the
    complex weight; ``mu_w`` has density ``|w|^2`` with respect to ``mu``.
    """
    phi = np.asarray(phi, dtype=int)
    if phi.shape != (len(space),) or np.any(phi < 0) or np.any(phi >= len(space)):
        raise InputError("phi must map every atom into the space")
    targets = set(space.indices(target).tolist())
    total = 0.0
    for y in range(len(space)):
        if int(phi[y]) in targets:
            total += abs(w[y]) ** 2 * space.masses[y]
    return float(total)


@dataclass(frozen=True)
class AeContext:
    """Reference weights ``nu({x})`` deciding which atoms count for "a.e. [nu]"."""

    reference_weights: np.ndarray

    def support(self) -> np.ndarray:
        return np.asarray(self.reference_weights) > 0

    def equal(self, f, g, rtol: float = DEFAULT_RTOL) -> bool:
        return not self.mismatches(f, g, rtol).size

    def mismatches(self, f, g, rtol: float = DEFAULT_RTOL) -> np.ndarray:
        """Indices of charged atoms where ``f`` and ``g`` differ beyond tolerance."""
        f = np.asarray(f)
        g = np.asarray(g)
        bad = [k for k in np.flatnonzero(self.support()) if not close(f[k], g[k], rtol)]
        return np.array(bad, dtype=int)
