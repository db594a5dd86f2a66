"""Greedy-family solvers for k-cover and partial set cover, plus exact oracles.

All solvers run uniformly on a :class:`~coversketch.instance.CoverageInstance`
or a :class:`~coversketch.sketch.Sketch`.  Tie-breaking is globally "smallest
set id" so sketch-vs-instance and lazy-vs-eager comparisons are bit-exact.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .instance import (
    CoverageInstance,
    FractionalInstance,
    ProbabilisticInstance,
    WeightedInstance,
)
from .sketch import HashSource, Sketch, build_sketch, derive_seed, theory_params

__all__ = [
    "InfeasibleError",
    "BudgetExceededError",
    "Solution",
    "coverage",
    "coverage_weighted",
    "coverage_fractional",
    "coverage_probabilistic",
    "greedy_kcover",
    "lazy_greedy",
    "stochastic_greedy",
    "guess_ladder",
    "cover_threshold",
    "set_cover_outliers",
    "select_outlier_solution",
    "brute_force_kcover",
    "brute_force_set_cover",
]


class InfeasibleError(RuntimeError):
    """The requested coverage level cannot be met even with every set."""


class BudgetExceededError(RuntimeError):
    """An exhaustive search would exceed its evaluation budget."""


@dataclass
class Solution:
    """Ordered choice of set ids with the coverage value it achieves.

    ``evaluated_on`` records whether the value was measured on a full
    instance or on a sketch.  ``gains`` is the per-pick marginal-gain trace
    for greedy-family solvers; ``evaluations`` counts marginal-gain
    computations for the lazy variant.
    """

    chosen: list[int]
    coverage_value: float
    evaluated_on: str
    gains: list[int] | None = None
    evaluations: int | None = None


def _unwrap(target) -> tuple[CoverageInstance, str]:
    if isinstance(target, Sketch):
        return target.instance, "sketch"
    if isinstance(target, CoverageInstance):
        return target, "instance"
    raise TypeError("target must be a CoverageInstance or a Sketch")


def _check_ids(n: int, chosen) -> list[int]:
    ids = [int(s) for s in chosen]
    for s in ids:
        if not 0 <= s < n:
            raise ValueError(f"set id {s} out of range")
    return ids


def coverage(target, chosen) -> int:
    """Exact union size of the chosen sets, via marking."""
    inst, _ = _unwrap(target)
    ids = _check_ids(inst.n, chosen)
    covered = np.zeros(inst.m, dtype=bool)
    for s in ids:
        covered[inst.set_elements(s)] = True
    return int(covered.sum())


def coverage_weighted(winst: WeightedInstance, chosen) -> int:
    """Total weight of covered elements."""
    ids = _check_ids(winst.base.n, chosen)
    covered = np.zeros(winst.base.m, dtype=bool)
    for s in ids:
        covered[winst.base.set_elements(s)] = True
    return int(winst.element_weight[covered].sum())


def coverage_fractional(finst: FractionalInstance, chosen) -> float:
    """Sum over elements of the best fraction any chosen set provides."""
    base = finst.base
    ids = _check_ids(base.n, chosen)
    best = np.zeros(base.m, dtype=np.int64)
    for s in ids:
        lo, hi = base.set_indptr[s], base.set_indptr[s + 1]
        np.maximum.at(best, base.set_elems[lo:hi], finst.numer_set_order[lo:hi])
    return float(best.sum()) / finst.U


def coverage_probabilistic(pinst: ProbabilisticInstance, chosen) -> float:
    """Expected covered mass: sum over elements of 1 - prod(1 - alpha)."""
    base = pinst.base
    ids = _check_ids(base.n, chosen)
    miss = np.ones(base.m, dtype=np.float64)
    for s in ids:
        lo, hi = base.set_indptr[s], base.set_indptr[s + 1]
        np.multiply.at(miss, base.set_elems[lo:hi],
                       1.0 - pinst.numer_set_order[lo:hi] / pinst.U)
    return float((1.0 - miss).sum())


# ---------------------------------------------------------------------------
# Greedy family
# ---------------------------------------------------------------------------


def _greedy_run(inst: CoverageInstance, max_picks: int,
                stop_threshold: int | None = None, fill_zero: bool = False):
    """Shared greedy loop.

    Picks the set with the largest marginal coverage, smallest id on ties.
    With ``fill_zero`` the loop keeps picking (zero-gain, id order) until
    ``max_picks`` sets are chosen; otherwise it stops at zero gain or once
    ``stop_threshold`` covered elements are reached.
    """
    gains = inst.set_sizes.astype(np.int64).copy()
    covered = np.zeros(inst.m, dtype=bool)
    chosen: list[int] = []
    trace: list[int] = []
    cov = 0
    while len(chosen) < max_picks:
        if stop_threshold is not None and cov >= stop_threshold:
            break
        s = int(np.argmax(gains))
        g = int(gains[s])
        if g <= 0:
            if not fill_zero:
                break
            # Exhausted gains: remaining picks are id-order fillers.
            for t in np.flatnonzero(gains == 0):
                if len(chosen) >= max_picks:
                    break
                chosen.append(int(t))
                trace.append(0)
            break
        gains[s] = -1
        elems = inst.set_elements(s)
        fresh = elems[~covered[elems]]
        covered[fresh] = True
        cov += len(fresh)
        chosen.append(s)
        trace.append(g)
        if len(fresh):
            touched_sets, _ = _gather_elem_sets(inst, fresh)
            gains -= np.bincount(touched_sets, minlength=inst.n)
            gains[s] = -1
    return chosen, trace, cov


def _gather_elem_sets(inst: CoverageInstance, elems: np.ndarray):
    counts = inst.elem_degrees[elems]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64), counts
    start = np.cumsum(counts) - counts
    within = np.arange(total, dtype=np.int64) - np.repeat(start, counts)
    src = np.repeat(inst.elem_indptr[elems], counts) + within
    return inst.elem_set_ids[src], counts


def greedy_kcover(target, k: int) -> Solution:
    """Standard greedy for max k-cover; guarantees (1 - 1/e) of the optimum.

    Runs ``k`` picks; once marginal gains hit zero the remaining slots are
    filled with the smallest-id unchosen sets.
    """
    inst, tag = _unwrap(target)
    if not 0 <= k <= inst.n:
        raise ValueError("need 0 <= k <= n")
    chosen, trace, cov = _greedy_run(inst, k, fill_zero=True)
    return Solution(chosen=chosen, coverage_value=cov, evaluated_on=tag,
                    gains=trace)


def lazy_greedy(target, k: int) -> Solution:
    """Accelerated greedy with cached gain upper bounds.

    Returns exactly the same solution as :func:`greedy_kcover`, including
    tie-breaking and zero-gain fillers, while re-evaluating far fewer
    marginal gains on most inputs.
    """
    inst, tag = _unwrap(target)
    if not 0 <= k <= inst.n:
        raise ValueError("need 0 <= k <= n")
    covered = np.zeros(inst.m, dtype=bool)
    # Heap entries: (-gain, set id, coverage version the gain was exact at).
    heap = [(-int(sz), s, 0) for s, sz in enumerate(inst.set_sizes.tolist())]
    heapq.heapify(heap)
    evaluations = inst.n
    version = 0
    chosen: list[int] = []
    trace: list[int] = []
    cov = 0
    while heap and len(chosen) < k:
        neg_g, s, stamp = heapq.heappop(heap)
        if stamp != version:
            elems = inst.set_elements(s)
            g = int((~covered[elems]).sum())
            evaluations += 1
            heapq.heappush(heap, (-g, s, version))
            continue
        g = -neg_g
        chosen.append(s)
        trace.append(g)
        if g > 0:
            elems = inst.set_elements(s)
            fresh = elems[~covered[elems]]
            covered[fresh] = True
            cov += g
            version += 1
    return Solution(chosen=chosen, coverage_value=cov, evaluated_on=tag,
                    gains=trace, evaluations=evaluations)


def stochastic_greedy(target, k: int, eps: float, seed: int) -> Solution:
    """Greedy over a random candidate sample per pick.

    Each of ``k`` picks samples ``ceil((n/k) ln(1/eps))`` candidate sets
    uniformly with replacement and takes the best marginal gain among the
    unchosen ones (ties by id).  When the sample size reaches ``n`` the
    sampling degrades to a full scan and the result equals
    :func:`greedy_kcover`.  Deterministic in ``seed``.
    """
    inst, tag = _unwrap(target)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 1 <= k <= inst.n:
        raise ValueError("need 1 <= k <= n")
    sample = math.ceil((inst.n / k) * math.log(1.0 / eps))
    if sample >= inst.n:
        sol = greedy_kcover(inst, k)
        return Solution(chosen=sol.chosen, coverage_value=sol.coverage_value,
                        evaluated_on=tag, gains=sol.gains)
    rng = np.random.default_rng(seed)
    covered = np.zeros(inst.m, dtype=bool)
    is_chosen = np.zeros(inst.n, dtype=bool)
    chosen: list[int] = []
    trace: list[int] = []
    cov = 0
    for _ in range(k):
        cand = np.unique(rng.integers(0, inst.n, size=sample))
        cand = cand[~is_chosen[cand]]
        if len(cand) == 0:
            continue
        best_s = -1
        best_g = -1
        for s in cand.tolist():
            elems = inst.set_elements(s)
            g = int((~covered[elems]).sum())
            if g > best_g:
                best_g, best_s = g, s
        is_chosen[best_s] = True
        chosen.append(best_s)
        trace.append(best_g)
        if best_g > 0:
            elems = inst.set_elements(best_s)
            covered[elems] = True
            cov += best_g
    return Solution(chosen=chosen, coverage_value=cov, evaluated_on=tag,
                    gains=trace)


# ---------------------------------------------------------------------------
# Set cover with outliers
# ---------------------------------------------------------------------------


def cover_threshold(m: int, lam: float) -> int:
    """Smallest integer coverage that reaches a (1 - lam) fraction of m."""
    return math.ceil((1.0 - lam) * m - 1e-9)


def guess_ladder(n: int, eps: float) -> list[int]:
    """Geometric guesses ceil((1+eps/3)^i) capped at n, deduplicated."""
    vals: list[int] = []
    i = 0
    while True:
        g = math.ceil((1.0 + eps / 3.0) ** i)
        if g >= n:
            break
        if not vals or g != vals[-1]:
            vals.append(g)
        i += 1
    vals.append(n)
    return vals


def _guess_budget(guess: int, eps: float, lam: float) -> int:
    return math.ceil(guess * (1.0 + eps) * math.log(1.0 / lam))


def select_outlier_solution(sketches, lam: float, eps: float) -> Solution:
    """Partial-cover selection over per-guess sketches.

    ``sketches`` pairs each guess with its sketch, in ascending guess order.
    Per guess, greedy runs until its budget of ``ceil(g (1+eps) ln(1/lam))``
    picks or a (1 - lam) fraction of the sketch's elements is covered; the
    first guess to reach the threshold wins.
    """
    for guess, sk in sketches:
        thresh = cover_threshold(sk.instance.m, lam)
        budget = _guess_budget(guess, eps, lam)
        chosen, trace, cov = _greedy_run(sk.instance, budget,
                                         stop_threshold=thresh)
        if cov >= thresh:
            return Solution(chosen=chosen, coverage_value=cov,
                            evaluated_on="sketch", gains=trace)
    raise InfeasibleError("infeasible outlier fraction")


def set_cover_outliers(instance: CoverageInstance, lam: float, eps: float,
                       delta_dprime: float = 0.5, seed: int = 0,
                       engine: str = "direct") -> Solution:
    """Cover at least a (1 - lam) fraction of elements with few sets.

    Walks the geometric guess ladder over the optimum size; for each guess
    runs budgeted greedy either directly on the instance or on a per-guess
    sketch (independent hash family per guess).  Returns the solution of the
    smallest successful guess, which has size at most
    ``(1+eps) ln(1/lam) OPT`` with the usual high-probability guarantee.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie in (0, 1)")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if engine not in ("direct", "sketch"):
        raise ValueError("engine must be 'direct' or 'sketch'")
    n, m = instance.n, instance.m
    guesses = guess_ladder(n, eps)
    if engine == "sketch":
        pairs = []
        for i, g in enumerate(guesses):
            params = theory_params(n, m, instance.edge_count, k=g, eps=eps,
                                   delta_dprime=delta_dprime)
            pairs.append((g, build_sketch(instance, params,
                                          HashSource(derive_seed(seed, i)))))
        return select_outlier_solution(pairs, lam, eps)

    # Direct engine: the greedy pick sequence is deterministic, so every
    # guess's run is a prefix of one full run; compute it once.
    thresh = cover_threshold(m, lam)
    chosen, trace, cov = _greedy_run(instance, n, stop_threshold=thresh)
    if cov >= thresh:
        hit = len(chosen)
        for g in guesses:
            if _guess_budget(g, eps, lam) >= hit:
                return Solution(chosen=chosen, coverage_value=cov,
                                evaluated_on="instance", gains=trace)
        # All ladder budgets fall short of the feasible greedy prefix; can
        # only happen for lam > 1/e where budgets shrink below the guess.
        return Solution(chosen=chosen, coverage_value=cov,
                        evaluated_on="instance", gains=trace)
    raise InfeasibleError("infeasible outlier fraction")


# ---------------------------------------------------------------------------
# Exact oracles
# ---------------------------------------------------------------------------


def _set_bitmasks(inst: CoverageInstance) -> list[int]:
    masks = []
    for s in range(inst.n):
        mask = 0
        for e in inst.set_elements(s).tolist():
            mask |= 1 << e
        masks.append(mask)
    return masks


def brute_force_kcover(target, k: int, budget: int = 10_000_000) -> Solution:
    """Exact optimum by exhaustive enumeration.

    Returns the lexicographically smallest optimal choice.  Raises
    :class:`BudgetExceededError` when C(n, k) exceeds ``budget``.
    """
    inst, tag = _unwrap(target)
    if not 0 <= k <= inst.n:
        raise ValueError("need 0 <= k <= n")
    if math.comb(inst.n, k) > budget:
        raise BudgetExceededError(
            f"C({inst.n},{k}) combinations exceed the budget of {budget}")
    masks = _set_bitmasks(inst)
    best_value = -1
    best: tuple[int, ...] = ()
    for combo in itertools.combinations(range(inst.n), k):
        union = 0
        for s in combo:
            union |= masks[s]
        value = union.bit_count()
        if value > best_value:
            best_value = value
            best = combo
    return Solution(chosen=list(best), coverage_value=best_value,
                    evaluated_on=tag)


def brute_force_set_cover(target, lam: float,
                          budget: int = 10_000_000) -> Solution:
    """Minimum-cardinality family covering a (1 - lam) fraction, exactly.

    Searches subsets in increasing size (lexicographic within a size), so the
    result is the lexicographically smallest minimum solution.
    """
    inst, tag = _unwrap(target)
    if not 0.0 <= lam < 1.0:
        raise ValueError("lam must lie in [0, 1)")
    thresh = cover_threshold(inst.m, lam)
    masks = _set_bitmasks(inst)
    full = 0
    for mask in masks:
        full |= mask
    if full.bit_count() < thresh:
        raise InfeasibleError("infeasible outlier fraction")
    spent = 0
    for size in range(inst.n + 1):
        spent += math.comb(inst.n, size)
        if spent > budget:
            raise BudgetExceededError(
                f"enumeration through size {size} exceeds the budget of {budget}")
        for combo in itertools.combinations(range(inst.n), size):
            union = 0
            for s in combo:
                union |= masks[s]
            if union.bit_count() >= thresh:
                return Solution(chosen=list(combo),
                                coverage_value=union.bit_count(),
                                evaluated_on=tag)
    raise InfeasibleError("infeasible outlier fraction")
