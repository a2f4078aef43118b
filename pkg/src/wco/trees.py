"""Weighted shifts on finite (possibly truncated) directed trees."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import oracle
from .measure_space import DEFAULT_RTOL, DiscreteMeasureSpace, InputError, close
from .model import WcoSystem
from .report import PropertyReport


@dataclass(frozen=True)
class DirectedTree:
    vertices: tuple[str, ...]
    parent: Mapping[str, str]
    root: str | None = None
    # vertices whose neighbourhood was cut off by truncation
    truncated: frozenset[str] = frozenset()
    children: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        parent = {str(k): str(v) for k, v in dict(self.parent).items()}
        if not vertices:
            raise InputError("a tree needs at least one vertex")
        if len(set(vertices)) != len(vertices):
            raise InputError("vertex ids must be unique")
        vset = set(vertices)
        for v, u in parent.items():
            if v not in vset or u not in vset:
                raise InputError(f"parent edge {v!r} -> {u!r} uses an unknown vertex")
        orphans = [v for v in vertices if v not in parent]
        root = None if self.root is None else str(self.root)
        if root is None:
            if len(orphans) != 1:
                raise InputError("a finite tree has exactly one vertex without a parent")
            root = orphans[0]
        if orphans != [root]:
            raise InputError("parent must be undefined exactly at the root")
        for v in vertices:
            seen = set()
            u = v
            while u in parent:
                if u in seen:
                    raise InputError("parent map contains a cycle")
                seen.add(u)
                u = parent[u]
        truncated = frozenset(str(v) for v in self.truncated)
        if not truncated <= vset:
            raise InputError("truncation marks must name vertices")
        children: dict[str, list[str]] = {v: [] for v in vertices}
        for v in vertices:
            if v in parent:
                children[parent[v]].append(v)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "truncated", truncated)
        object.__setattr__(self, "children", {v: tuple(c) for v, c in children.items()})

    def chi(self, v: str) -> tuple[str, ...]:
        return self.children[v]

    @property
    def interior(self) -> frozenset[str]:
        return frozenset(self.vertices) - self.truncated

    def branching(self) -> list[str]:
        return [v for v in self.vertices if len(self.children[v]) >= 2]

    def checked_vertices(self, interior_only: bool) -> list[str]:
        """Vertices whose child pairs are compared by the sibling criteria."""
        if not interior_only:
            return list(self.vertices)
        inner = self.interior
        return [v for v in self.vertices if v in inner and all(u in inner for u in self.children[v])]


@dataclass(frozen=True)
class TreeShift:
    tree: DirectedTree
    lam: Mapping[str, complex]

    def __post_init__(self):
        lam = {str(k): complex(v) for k, v in dict(self.lam).items()}
        for v in lam:
            if v not in self.tree.children:
                raise InputError(f"weight given for unknown vertex {v!r}")
            if v == self.tree.root:
                raise InputError("the root carries no weight")
        object.__setattr__(self, "lam", lam)

    def weight(self, v: str) -> complex:
        return self.lam.get(v, 0j)

    def child_sum(self, v: str) -> float:
        return float(sum(abs(self.weight(u)) ** 2 for u in self.tree.chi(v)))

    def norm_bound(self) -> float:
        """``max_v sum_{u in Chi(v)} |lambda_u|^2``, the squared norm of the shift."""
        return max(self.child_sum(v) for v in self.tree.vertices)


def tree_to_wco(shift: TreeShift) -> WcoSystem:
    """Counting measure on the vertices, ``phi = parent`` (root fixed), ``w = lambda`` (0 at the root)."""
    t = shift.tree
    space = DiscreteMeasureSpace.counting(t.vertices)
    phi = {v: t.parent.get(v, v) for v in t.vertices}
    w = {v: shift.weight(v) for v in t.vertices if v != t.root}
    return WcoSystem.from_mapping(space, phi, w)


def tree_weakly_centered(shift: TreeShift, interior_only: bool = False,
                         rtol: float = DEFAULT_RTOL) -> PropertyReport:
    """Siblings with nonzero weights have equal child weight sums."""
    t = shift.tree
    for v in t.checked_vertices(interior_only):
        kids = [u for u in t.chi(v) if shift.weight(u) != 0]
        for u1, u2 in itertools.combinations(kids, 2):
            s1, s2 = shift.child_sum(u1), shift.child_sum(u2)
            if not close(s1, s2, rtol):
                witness = {"vertex": v, "pair": [u1, u2], "sums": [s1, s2]}
                return PropertyReport(False, "weakly_centered", witness, rtol)
    return PropertyReport(True, "weakly_centered", None, rtol)


def unweighted_tree_criterion(tree: DirectedTree, interior_only: bool = False) -> PropertyReport:
    """Siblings always have the same number of children (``h_phi(v) = card Chi(v)``)."""
    for v in tree.checked_vertices(interior_only):
        for u1, u2 in itertools.combinations(tree.chi(v), 2):
            c1, c2 = len(tree.chi(u1)), len(tree.chi(u2))
            if c1 != c2:
                witness = {"vertex": v, "pair": [u1, u2], "counts": [c1, c2]}
                return PropertyReport(False, "weakly_centered", witness, 0.0)
    return PropertyReport(True, "weakly_centered", None, 0.0)


def phase_is_unitary(shift: TreeShift, tol: float = 1e-9) -> PropertyReport:
    """Matrix check that the phase ``U`` of the shift satisfies ``U*U = UU* = I``.

    Only the premise of the unitary-phase classification is checked; the
    equivalence with a two-sided classical shift is not re-derived here.
    """
    T = oracle.to_matrix(tree_to_wco(shift)).entries
    U, _ = oracle.svd_polar(T)
    eye = np.eye(T.shape[0])
    gap = max(oracle.spectral_norm(U.conj().T @ U - eye), oracle.spectral_norm(U @ U.conj().T - eye))
    if gap <= tol:
        return PropertyReport(True, "phase_unitary", None, tol)
    rank = int(round(np.real(np.trace(U.conj().T @ U))))
    return PropertyReport(False, "phase_unitary", {"defect": gap, "phase_rank": rank, "dim": T.shape[0]}, tol)


def vertex_id(i: int, j: int | None = None) -> str:
    return str(i) if j is None else f"{i},{j}"


def build_t2infty(alpha: complex, depth: int) -> TreeShift:
    """Truncation of the rootless tree with one branching vertex ``0`` and two infinite branches.

    Vertices ``-depth..0`` and ``(i, j)`` for ``i in {1, 2}``, ``j <= depth``;
    ``lambda_{(2,2)} = alpha`` and every other weight is 1.
    """
    if depth < 3:
        raise InputError("depth must be at least 3")
    vertices = [vertex_id(-k) for k in range(depth, -1, -1)]
    parent = {vertex_id(-k): vertex_id(-k - 1) for k in range(depth)}
    for i in (1, 2):
        for j in range(1, depth + 1):
            vertices.append(vertex_id(i, j))
            parent[vertex_id(i, j)] = vertex_id(0) if j == 1 else vertex_id(i, j - 1)
    root = vertex_id(-depth)
    truncated = {root, vertex_id(1, depth), vertex_id(2, depth)}
    tree = DirectedTree(tuple(vertices), parent, root, frozenset(truncated))
    lam = {v: 1.0 for v in vertices if v != root}
    lam[vertex_id(2, 2)] = alpha
    return TreeShift(tree, lam)


def build_pruned_leaf_tree(depth: int) -> TreeShift:
    """Truncation of the tree with a trunk ``..., -1, 0, 1``, branches ``(1, n)``, ``(2, n)``
    from ``1`` and an extra leaf ``(3, 2)`` under ``(2, 1)`` with weight 0."""
    if depth < 3:
        raise InputError("depth must be at least 3")
    vertices = [vertex_id(-k) for k in range(depth, -1, -1)] + [vertex_id(1)]
    parent = {vertex_id(-k): vertex_id(-k - 1) for k in range(depth)}
    parent[vertex_id(1)] = vertex_id(0)
    for i in (1, 2):
        for j in range(1, depth + 1):
            vertices.append(vertex_id(i, j))
            parent[vertex_id(i, j)] = vertex_id(1) if j == 1 else vertex_id(i, j - 1)
    vertices.append(vertex_id(3, 2))
    parent[vertex_id(3, 2)] = vertex_id(2, 1)
    root = vertex_id(-depth)
    truncated = {root, vertex_id(1, depth), vertex_id(2, depth)}
    tree = DirectedTree(tuple(vertices), parent, root, frozenset(truncated))
    lam = {v: 1.0 for v in vertices if v != root}
    lam[vertex_id(3, 2)] = 0.0
    return TreeShift(tree, lam)


def path_shift(weights) -> TreeShift:
    """Classical unilateral weighted shift truncated to ``len(weights) + 1`` vertices."""
    n = len(weights) + 1
    vertices = tuple(str(k) for k in range(n))
    parent = {str(k): str(k - 1) for k in range(1, n)}
    lam = {str(k): weights[k - 1] for k in range(1, n)}
    return TreeShift(DirectedTree(vertices, parent, "0"), lam)
