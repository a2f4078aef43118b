"""Random systems and the closed-form versus matrix equivalence battery."""

from __future__ import annotations

import contextlib
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import invariant, model, oracle, properties, transforms
from .measure_space import DiscreteMeasureSpace, push_forward_measure
from .model import WcoSystem, compose_square, conditional_expectation, rn_values
from .transforms import aluthge_weight, polar

MODES = ("generic", "weakly_centered", "normal", "injective")
MODE_P = (0.4, 0.3, 0.15, 0.15)
ZERO_P = 0.25
COMMUTATOR_TOL = 1e-9
ALUTHGE_TOL = 1e-8
SPECTRAL_TOL = 1e-9


# -- generation -------------------------------------------------------------


def _components(phi: np.ndarray) -> np.ndarray:
    parent = list(range(len(phi)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for y, z in enumerate(phi):
        parent[find(y)] = find(int(z))
    return np.array([find(a) for a in range(len(phi))])


def _set_h(phi, w, masses, target) -> np.ndarray:
    """Rescale the weights on each fiber ``phi^{-1}{x}`` so that ``h(x) = target[x]`` where ``h(x) > 0``."""
    w = w.copy()
    n = len(w)
    h = np.bincount(phi, weights=np.abs(w) ** 2 * masses, minlength=n) / masses
    for y in range(n):
        x = phi[y]
        if w[y] != 0 and h[x] > 0:
            w[y] *= np.sqrt(target[x] / h[x])
    return w


def random_system(rng: np.random.Generator, max_atoms: int = 8, mode: str | None = None) -> WcoSystem:
    """Random fibers, log-uniform masses in [0.1, 10] and weights that vanish with probability 1/4.

    ``mode`` biases the draw towards structured systems: ``weakly_centered``
    rescales weights to make ``h`` fiber-constant, ``normal`` makes ``h``
    constant on the connected components of ``phi`` and prunes atoms without
    charged preimages, ``injective`` draws a permutation.
    """
    n = int(rng.integers(1, max_atoms + 1))
    if mode is None:
        mode = str(rng.choice(MODES, p=MODE_P))
    masses = np.exp(rng.uniform(np.log(0.1), np.log(10.0), n))
    if mode in ("injective",) or (mode == "normal" and rng.random() < 0.5):
        phi = rng.permutation(n)
    else:
        phi = rng.integers(0, n, n)
    mod = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))
    w = mod * np.exp(2j * np.pi * rng.random(n))
    zero_p = 0.1 if mode == "normal" else ZERO_P
    w[rng.random(n) < zero_p] = 0
    if mode == "weakly_centered":
        per_fiber = np.exp(rng.uniform(np.log(0.2), np.log(5.0), n))
        w = _set_h(phi, w, masses, per_fiber[phi])
    elif mode == "normal":
        comp = _components(phi)
        levels = np.exp(rng.uniform(np.log(0.2), np.log(5.0), n))
        target = levels[comp]
        for _ in range(2 * n + 2):
            w = _set_h(phi, w, masses, target)
            h = np.bincount(phi, weights=np.abs(w) ** 2 * masses, minlength=n) / masses
            orphan = (w != 0) & (h == 0)
            if not orphan.any():
                break
            w[orphan] = 0
    space = DiscreteMeasureSpace(tuple(f"x{k}" for k in range(n)), masses)
    return WcoSystem(space, phi, w)


def battery(count: int, seed: int, max_atoms: int = 8) -> list[WcoSystem]:
    """Deterministic list of random systems; system ``k`` depends only on ``(seed, k)``."""
    seqs = np.random.SeedSequence(seed).spawn(count)
    return [random_system(np.random.default_rng(s), max_atoms) for s in seqs]


# -- individual equivalence checks ------------------------------------------


def check_radon_nikodym(sys: WcoSystem, rtol: float = 1e-10, rng=None) -> bool:
    h = rn_values(sys)
    n = len(sys)
    ids = sys.space.ids
    if n <= 10:
        subsets = itertools.chain.from_iterable(itertools.combinations(range(n), r) for r in range(n + 1))
    else:
        rng = rng or np.random.default_rng(0)
        subsets = (tuple(np.flatnonzero(rng.random(n) < 0.5)) for _ in range(256))
    for sub in subsets:
        lhs = push_forward_measure(sys.space, sys.phi, sys.w, [ids[k] for k in sub])
        rhs = float(np.sum(h[list(sub)] * sys.masses[list(sub)])) if sub else 0.0
        if not abs(lhs - rhs) <= rtol * max(1.0, abs(lhs), abs(rhs)):
            return False
    return True


def wc_verdicts(sys: WcoSystem, T: np.ndarray) -> dict[str, bool]:
    out = {
        "closed_form": properties.is_weakly_centered(sys).verdict,
        "commutator": oracle.weak_centered_commutator(T) <= COMMUTATOR_TOL,
        "moduli": oracle.moduli_commutator(T) <= COMMUTATOR_TOL,
    }
    for a in (0.5, 2.0, -1.0):
        out[f"alpha={a:g}"] = properties.is_weakly_centered_alpha(sys, a).verdict
    return out


def phase_quasinormal(sys: WcoSystem) -> bool:
    ph = polar(sys).phase_system(sys)
    closed = properties.is_quasinormal(ph).verdict
    return closed and oracle.quasinormal_commutator(oracle.to_matrix(ph)) <= COMMUTATOR_TOL


def aluthge_gap(sys: WcoSystem, T: np.ndarray, alpha: float) -> float:
    closed = oracle.to_matrix(aluthge_weight(sys, alpha).system(sys)).entries
    return oracle.spectral_norm(oracle.aluthge_matrix(T, alpha) - closed) / max(1.0, oracle.spectral_norm(T))


def aluthge_phase_gap(sys: WcoSystem, T: np.ndarray, alpha: float) -> float:
    U, _ = oracle.svd_polar(oracle.aluthge_matrix(T, alpha), reference=oracle.spectral_norm(T))
    closed = oracle.to_matrix(aluthge_weight(sys, alpha).phase_system(sys)).entries
    return oracle.spectral_norm(U - closed)


def polar_gaps(sys: WcoSystem, T: np.ndarray) -> tuple[float, float]:
    U, mod = oracle.svd_polar(T)
    pd = polar(sys)
    phase = oracle.to_matrix(pd.phase_system(sys)).entries
    scale = max(1.0, oracle.spectral_norm(T))
    return oracle.spectral_norm(U - phase), oracle.spectral_norm(mod - np.diag(pd.modulus_density)) / scale


def spectral_sigmas(sys: WcoSystem) -> list[list[oracle.Interval]]:
    grid = oracle.spectral_grid(sys)
    sigmas = [list(oracle.REAL_LINE)]
    sigmas += [[oracle.Interval.below(float(t))] for t in grid]
    sigmas += [[oracle.Interval.point(float(t))] for t in grid]
    sigmas.append([oracle.Interval(0.0, None, lo_closed=False)])
    return sigmas


def spectral_gaps(sys: WcoSystem, T: np.ndarray) -> tuple[float, float]:
    """Largest deviation of the closed-form spectral measures of ``T*T`` and ``TT*`` from eigenprojector sums."""
    Th = T.conj().T
    A = oracle.spectral_decomposition(T @ Th)
    B = oracle.spectral_decomposition(Th @ T)
    atol = oracle.cluster_tol(oracle.spectral_grid(sys))
    ga = gb = 0.0
    for sigma in spectral_sigmas(sys):
        gb = max(gb, oracle.spectral_norm(oracle.spectral_measure_B(sys, sigma, atol) - B.measure(sigma, atol)))
        ga = max(ga, oracle.spectral_norm(oracle.spectral_measure_A(sys, sigma, atol) - A.measure(sigma, atol)))
    return ga, gb


def intertwining_ok(sys: WcoSystem) -> bool:
    return all(oracle.intertwining_gap(sys, float(t)) <= SPECTRAL_TOL for t in oracle.spectral_grid(sys))


def invariant_ok(sys: WcoSystem) -> bool:
    found = invariant.find_invariant(sys)
    h = rn_values(sys)
    constant = len(invariant.distinct_levels(h)) < 2
    if isinstance(found, invariant.NotApplicable):
        return constant and "isometry" in found.reason
    if constant:
        return False
    return invariant.verify_invariant(sys, found).verdict and found.atoms not in (frozenset(), frozenset(sys.space.ids))


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    # observations are reported but never count as failures
    counted: bool = True


def run_checks(sys: WcoSystem) -> list[CheckResult]:
    """Every closed-form versus matrix equivalence for one system."""
    res: list[CheckResult] = []
    T = oracle.to_matrix(sys).entries
    Th = T.conj().T
    scale = max(1.0, oracle.spectral_norm(T))

    res.append(CheckResult("radon_nikodym", check_radon_nikodym(sys)))

    v = wc_verdicts(sys, T)
    wc = v["closed_form"]
    res.append(CheckResult("weak_centered_equivalence", len(set(v.values())) == 1, repr(v)))

    qn_closed = properties.is_quasinormal(sys).verdict
    qn_matrix = oracle.quasinormal_commutator(T) <= COMMUTATOR_TOL
    res.append(CheckResult("quasinormal_equivalence", qn_closed == qn_matrix))
    if qn_closed:
        res.append(CheckResult("quasinormal_implies_wc", wc))

    hy_closed = properties.is_hyponormal(sys).verdict
    hy_matrix = properties.matrix_hyponormal(sys).verdict
    res.append(CheckResult("hyponormal_equivalence", hy_closed == hy_matrix))

    if properties.is_cohyponormal(sys).verdict:
        res.append(CheckResult("cohyponormal_implies_wc", wc))

    if wc:
        charged = sys.mu_w > 0
        pq = phase_quasinormal(sys)
        if np.all(rn_values(sys)[charged] > 0):
            res.append(CheckResult("phase_quasinormal", pq))
        else:
            # h vanishes on a charged atom: the phase need not be quasinormal
            res.append(CheckResult("phase_quasinormal_h_vanishes", pq, counted=False))

    gu, gm = polar_gaps(sys, T)
    res.append(CheckResult("polar", gu <= 1e-8 and gm <= 1e-8, f"{gu:.2e} {gm:.2e}"))

    for a in (0.25, 0.5, 1.0):
        g = aluthge_gap(sys, T, a)
        res.append(CheckResult(f"aluthge_{a:g}", g <= ALUTHGE_TOL, f"{g:.2e}"))
        gp = aluthge_phase_gap(sys, T, a)
        res.append(CheckResult(f"aluthge_phase_{a:g}", gp <= 1e-7, f"{gp:.2e}"))

    P = oracle.projection_matrix(sys)
    herm = oracle.spectral_norm(P - P.conj().T) <= 1e-10 and oracle.spectral_norm(P @ P - P) <= 1e-10
    res.append(CheckResult("projection_P", herm))
    h = rn_values(sys)
    a_gap = oracle.spectral_norm(T @ Th - np.diag(h[sys.phi]) @ P) / scale**2
    res.append(CheckResult("A_equals_MP", a_gap <= 1e-9, f"{a_gap:.2e}"))

    ga, gb = spectral_gaps(sys, T)
    res.append(CheckResult("spectral_measures", ga <= SPECTRAL_TOL and gb <= SPECTRAL_TOL, f"{ga:.2e} {gb:.2e}"))

    sq = oracle.to_matrix(compose_square(sys)).entries
    res.append(CheckResult("compose_square", oracle.spectral_norm(sq - T @ T) <= 1e-12 * scale**2))

    h2 = rn_values(compose_square(sys))
    chain = conditional_expectation(sys, h) * h[sys.phi]
    res.append(CheckResult("square_density_chain", sys.ae_w.equal(h2[sys.phi], chain)))

    if wc and hy_closed:
        res.append(CheckResult("olson_order", oracle.olson_order_check(sys).verdict))
        if oracle.co_kernel_dim(T) == 0:
            res.append(CheckResult("intertwining", intertwining_ok(sys)))
        res.append(CheckResult("invariant_subspace", invariant_ok(sys)))
        bound = h**2
        res.append(CheckResult("square_density_bound",
                               all(h2[sys.phi][k] <= bound[k] * (1 + 1e-9) + 1e-12 for k in np.flatnonzero(sys.mu_w > 0))))
    return res


# -- battery ----------------------------------------------------------------

MUTANTS: dict[str, Callable[[WcoSystem], np.ndarray]] = {
    # |w|^2 replaced by Re(w^2): a sign error on the imaginary part
    "h-sign": lambda sys: np.bincount(sys.phi, weights=(sys.w**2).real * sys.masses, minlength=len(sys)) / sys.masses,
}


@contextlib.contextmanager
def mutated_h(mutant: str | None):
    """Swap the Radon-Nikodym routine in every consumer (mutation self-test)."""
    if mutant is None:
        yield
        return
    fn = MUTANTS[mutant]
    targets = [model, transforms, properties, oracle, invariant]
    saved = [m.rn_values for m in targets]
    try:
        for m in targets:
            m.rn_values = fn
        globals()["rn_values"] = fn
        yield
    finally:
        for m, f in zip(targets, saved):
            m.rn_values = f
        globals()["rn_values"] = model.rn_values


@dataclass
class FuzzSummary:
    count: int
    passed: dict[str, int] = field(default_factory=dict)
    failed: dict[str, int] = field(default_factory=dict)
    observed: dict[str, list[int]] = field(default_factory=dict)
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(self.failed.values())


def _safe_checks(sys: WcoSystem) -> list[CheckResult]:
    with np.errstate(all="ignore"):
        try:
            return run_checks(sys)
        except (ValueError, np.linalg.LinAlgError, FloatingPointError) as exc:
            return [CheckResult("exception", False, repr(exc))]


def _worker(args) -> list[tuple[int, list[CheckResult]]]:
    seed, indices, count, max_atoms, mutant = args
    seqs = np.random.SeedSequence(seed).spawn(count)
    out = []
    with mutated_h(mutant):
        for k in indices:
            sys = random_system(np.random.default_rng(seqs[k]), max_atoms)
            out.append((k, _safe_checks(sys)))
    return out


def minimize(sys: WcoSystem, still_fails: Callable[[WcoSystem], bool]) -> WcoSystem:
    """Greedy shrink: drop atoms nobody else maps to, then zero weights, while the failure persists."""
    changed = True
    while changed:
        changed = False
        n = len(sys)
        for k in range(n):
            if n == 1 or any(sys.phi[y] == k for y in range(n) if y != k):
                continue
            keep = [y for y in range(n) if y != k]
            remap = {old: new for new, old in enumerate(keep)}
            space = DiscreteMeasureSpace(tuple(sys.space.ids[y] for y in keep), sys.masses[keep])
            phi = [remap[int(sys.phi[y])] if sys.phi[y] != k else remap[y] for y in keep]
            cand = WcoSystem(space, phi, sys.w[keep])
            if still_fails(cand):
                sys, changed = cand, True
                break
        if changed:
            continue
        for k in np.flatnonzero(sys.w != 0):
            w = sys.w.copy()
            w[k] = 0
            cand = sys.with_weight(w)
            if still_fails(cand):
                sys, changed = cand, True
                break
    return sys


def run_battery(count: int, seed: int = 42, max_atoms: int = 8, workers: int = 1,
                mutant: str | None = None, max_counterexamples: int = 3) -> FuzzSummary:
    summary = FuzzSummary(count)
    if count <= 0:
        return summary
    workers = max(1, int(workers))
    chunks = [list(range(count))[i::workers] for i in range(workers)]
    jobs = [(seed, c, count, max_atoms, mutant) for c in chunks if c]
    if workers == 1:
        results = _worker(jobs[0])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_worker, jobs) for r in part]
    results.sort(key=lambda r: r[0])
    seqs = np.random.SeedSequence(seed).spawn(count)
    for k, checks in results:
        bad = [c for c in checks if not c.ok and c.counted]
        for c in checks:
            if not c.counted:
                tally = summary.observed.setdefault(c.name, [0, 0])
                tally[0 if c.ok else 1] += 1
                continue
            bucket = summary.failed if not c.ok else summary.passed
            bucket[c.name] = bucket.get(c.name, 0) + 1
        if bad and len(summary.counterexamples) < max_counterexamples:
            from .io import system_to_json

            names = {c.name for c in bad}
            with mutated_h(mutant):
                sys = random_system(np.random.default_rng(seqs[k]), max_atoms)
                small = minimize(sys, lambda s: bool(names & {c.name for c in _safe_checks(s) if not c.ok and c.counted}))
            summary.counterexamples.append({"index": k, "checks": sorted(names), "system": system_to_json(small)})
    return summary
