"""Bipartite coverage instances: data model, file formats, generators, reductions.

A coverage instance is a bipartite incidence structure between ``n`` sets and
``m`` elements.  Both sides use dense 0-based integer ids, and the adjacency is
stored in both directions (CSR style) so solvers can scan by set or by element.
Instances are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ParseError",
    "CoverageInstance",
    "WeightedInstance",
    "FractionalInstance",
    "ProbabilisticInstance",
    "InstanceStats",
    "load_edge_list",
    "loads_edge_list",
    "serialize_edge_list",
    "load_weighted_edge_list",
    "serialize_weighted_edge_list",
    "load_fractional_edge_list",
    "load_probabilistic_edge_list",
    "serialize_fractional_edge_list",
    "khop_dominating_instance",
    "generate_planted",
    "generate_adversarial",
    "feature_pairs_instance",
    "stats",
]


class ParseError(ValueError):
    """Malformed input; the message carries the 1-based line number."""


def _ceil_exact(x: float) -> int:
    # Guard against float noise like 1.2 * 100 -> 120.00000000000001.
    return math.ceil(x - 1e-9)


class CoverageInstance:
    """Immutable set/element incidence structure.

    Attributes
    ----------
    n : int
        Number of sets.
    m : int
        Number of elements.
    edge_count : int
        Number of distinct (set, element) incidences.
    element_labels : list[int] | None
        Optional external ids for elements (display only, e.g. encoded row
        pairs from :func:`feature_pairs_instance`).
    """

    __slots__ = (
        "n",
        "m",
        "edge_count",
        "set_indptr",
        "set_elems",
        "elem_indptr",
        "elem_set_ids",
        "set_sizes",
        "elem_degrees",
        "element_labels",
    )

    def __init__(self, n, m, set_indptr, set_elems, elem_indptr, elem_set_ids,
                 element_labels=None):
        self.n = int(n)
        self.m = int(m)
        self.set_indptr = set_indptr
        self.set_elems = set_elems
        self.elem_indptr = elem_indptr
        self.elem_set_ids = elem_set_ids
        self.edge_count = int(len(set_elems))
        self.set_sizes = np.diff(set_indptr)
        self.elem_degrees = np.diff(elem_indptr)
        self.element_labels = element_labels
        if len(set_indptr) != self.n + 1 or len(elem_indptr) != self.m + 1:
            raise ValueError("inconsistent index pointers")
        if len(elem_set_ids) != self.edge_count:
            raise ValueError("adjacency mismatch between set and element views")

    @classmethod
    def from_edges(cls, n, m, set_ids, elem_ids, element_labels=None):
        """Build an instance from parallel edge arrays, deduplicating pairs.

        Ids must lie in ``[0, n)`` and ``[0, m)``.  Duplicate (set, element)
        pairs are collapsed; coverage is set-semantic.
        """
        n = int(n)
        m = int(m)
        if n < 1:
            raise ValueError("instance needs at least one set")
        set_ids = np.asarray(set_ids, dtype=np.int64)
        elem_ids = np.asarray(elem_ids, dtype=np.int64)
        if set_ids.shape != elem_ids.shape:
            raise ValueError("edge arrays must have equal length")
        if set_ids.size:
            if set_ids.min() < 0 or set_ids.max() >= n:
                raise ValueError("set id out of range")
            if elem_ids.min() < 0 or elem_ids.max() >= m:
                raise ValueError("element id out of range")
        # Canonical order is (set, element); drop duplicate pairs.
        order = np.lexsort((elem_ids, set_ids))
        s = set_ids[order]
        e = elem_ids[order]
        if s.size:
            keep = np.empty(s.size, dtype=bool)
            keep[0] = True
            keep[1:] = (s[1:] != s[:-1]) | (e[1:] != e[:-1])
            s = s[keep]
            e = e[keep]
        return cls._from_sorted_pairs(n, m, s, e, element_labels)

    @classmethod
    def _from_sorted_pairs(cls, n, m, set_ids, elem_ids, element_labels=None):
        # Assumes pairs already sorted by (set, element) and unique.
        set_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(set_ids, minlength=n), out=set_indptr[1:])
        eorder = np.lexsort((set_ids, elem_ids))
        elem_indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(elem_ids, minlength=m), out=elem_indptr[1:])
        return cls(n, m, set_indptr, elem_ids, elem_indptr, set_ids[eorder],
                   element_labels)

    def set_elements(self, s: int) -> np.ndarray:
        """Sorted element ids contained in set ``s``."""
        return self.set_elems[self.set_indptr[s]:self.set_indptr[s + 1]]

    def element_sets(self, v: int) -> np.ndarray:
        """Sorted set ids containing element ``v``."""
        return self.elem_set_ids[self.elem_indptr[v]:self.elem_indptr[v + 1]]

    @property
    def set_edges(self) -> list[np.ndarray]:
        return [self.set_elements(s) for s in range(self.n)]

    @property
    def element_edges(self) -> list[np.ndarray]:
        return [self.element_sets(v) for v in range(self.m)]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge arrays (set_ids, elem_ids) in canonical (set, element) order."""
        set_ids = np.repeat(np.arange(self.n, dtype=np.int64), self.set_sizes)
        return set_ids, self.set_elems

    def __eq__(self, other):
        if not isinstance(other, CoverageInstance):
            return NotImplemented
        return (self.n == other.n and self.m == other.m
                and np.array_equal(self.set_indptr, other.set_indptr)
                and np.array_equal(self.set_elems, other.set_elems))

    def __hash__(self):  # identity hashing; instances are reference-compared
        return id(self)

    def __repr__(self):
        return (f"CoverageInstance(n={self.n}, m={self.m}, "
                f"edge_count={self.edge_count})")


@dataclass(frozen=True, eq=False)
class WeightedInstance:
    """Coverage instance with a positive integer weight per element."""

    base: CoverageInstance
    element_weight: np.ndarray
    U: int

    def __post_init__(self):
        w = np.asarray(self.element_weight, dtype=np.int64)
        object.__setattr__(self, "element_weight", w)
        if len(w) != self.base.m:
            raise ValueError("one weight per element required")
        if self.base.m and (w.min() < 1 or w.max() > self.U):
            raise ValueError("weights must be integers in [1, U]")


@dataclass(frozen=True, eq=False)
class FractionalInstance:
    """Coverage instance where set S covers a fraction alpha of element v.

    Fractions are stored exactly as integer numerators: ``alpha = numer / U``
    with ``numer`` in ``[0, U]``.  Two parallel arrays hold the numerators in
    the two adjacency orders of the base instance.
    """

    base: CoverageInstance
    numer_set_order: np.ndarray   # aligned with base.edges() / set_elems
    numer_elem_order: np.ndarray  # aligned with base.elem_set_ids
    U: int

    def __post_init__(self):
        a = np.asarray(self.numer_set_order, dtype=np.int64)
        b = np.asarray(self.numer_elem_order, dtype=np.int64)
        object.__setattr__(self, "numer_set_order", a)
        object.__setattr__(self, "numer_elem_order", b)
        if self.U < 1:
            raise ValueError("U must be a positive integer")
        for arr in (a, b):
            if len(arr) != self.base.edge_count:
                raise ValueError("one numerator per edge required")
            if arr.size and (arr.min() < 0 or arr.max() > self.U):
                raise ValueError("numerators must lie in [0, U]")

    @classmethod
    def from_edges(cls, n, m, set_ids, elem_ids, numer, U):
        """Build base instance and aligned numerators in one pass.

        Edges must be unique; duplicates are rejected rather than merged since
        they would carry conflicting fractions.
        """
        set_ids = np.asarray(set_ids, dtype=np.int64)
        elem_ids = np.asarray(elem_ids, dtype=np.int64)
        numer = np.asarray(numer, dtype=np.int64)
        order = np.lexsort((elem_ids, set_ids))
        s, e, a = set_ids[order], elem_ids[order], numer[order]
        if s.size > 1 and np.any((s[1:] == s[:-1]) & (e[1:] == e[:-1])):
            raise ValueError("duplicate edge with fractional coverage")
        base = CoverageInstance._from_sorted_pairs(int(n), int(m), s, e)
        eorder = np.lexsort((s, e))
        return cls(base, a, a[eorder], int(U))

    @property
    def alpha_set_order(self) -> np.ndarray:
        return self.numer_set_order / self.U

    @property
    def alpha_elem_order(self) -> np.ndarray:
        return self.numer_elem_order / self.U


class ProbabilisticInstance(FractionalInstance):
    """Same shape as :class:`FractionalInstance`; alpha is an independent
    coverage probability per (set, element) edge."""


@dataclass(frozen=True)
class InstanceStats:
    """Summary statistics for a coverage instance."""

    n: int
    m: int
    edge_count: int
    max_element_degree: int
    max_set_size: int
    element_degree_hist: tuple[int, ...]
    set_size_hist: tuple[int, ...]

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "edge_count": self.edge_count,
                "max_element_degree": self.max_element_degree,
                "max_set_size": self.max_set_size,
                "element_degree_hist": list(self.element_degree_hist),
                "set_size_hist": list(self.set_size_hist),
            },
            separators=(",", ":"),
        )


def stats(instance: CoverageInstance) -> InstanceStats:
    """Consistent summary statistics; histograms are indexed by degree."""
    deg = instance.elem_degrees
    size = instance.set_sizes
    return InstanceStats(
        n=instance.n,
        m=instance.m,
        edge_count=instance.edge_count,
        max_element_degree=int(deg.max()) if instance.m else 0,
        max_set_size=int(size.max()) if instance.n else 0,
        element_degree_hist=tuple(np.bincount(deg).tolist()) if instance.m else (),
        set_size_hist=tuple(np.bincount(size).tolist()),
    )


# ---------------------------------------------------------------------------
# Edge-list text format
#
# One edge per line: `<set-id> <element-id>`, whitespace separated, with
# optional `#`-prefixed comment lines.  Weighted variants carry a third
# integer column (the element weight, or the numerator of alpha*U together
# with a `#U <int>` header line).
# ---------------------------------------------------------------------------


def _iter_lines(source):
    """Yield (lineno, text) from a path, byte/str content wrapper, or file."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    elif hasattr(source, "read"):
        data = source.read()
    else:
        raise TypeError("source must be a path, bytes, or file object")
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    for i, line in enumerate(data.splitlines(), start=1):
        yield i, line


def _parse_rows(source, columns):
    """Parse integer rows of fixed width; returns (rows, headers)."""
    rows = []
    headers = {}
    for lineno, raw in _iter_lines(source):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if len(tokens) == 2 and tokens[0] == "U":
                try:
                    headers["U"] = int(tokens[1])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad #U header") from None
            continue
        tokens = line.split()
        if len(tokens) != columns:
            raise ParseError(
                f"line {lineno}: expected {columns} fields, got {len(tokens)}")
        try:
            row = [int(t) for t in tokens]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token") from None
        if row[0] < 0 or row[1] < 0:
            raise ParseError(f"line {lineno}: negative id")
        rows.append(row)
    return rows, headers


def load_edge_list(source) -> CoverageInstance:
    """Load an unweighted edge list.

    ``n`` and ``m`` are one past the largest ids seen; ids are positional and
    never compacted.  Duplicate edges are deduplicated.
    """
    rows, _ = _parse_rows(source, 2)
    if not rows:
        raise ValueError("empty instance")
    arr = np.asarray(rows, dtype=np.int64)
    n = int(arr[:, 0].max()) + 1
    m = int(arr[:, 1].max()) + 1
    return CoverageInstance.from_edges(n, m, arr[:, 0], arr[:, 1])


def loads_edge_list(text: str) -> CoverageInstance:
    """Load an edge list from a string."""
    return load_edge_list(text.encode("utf-8"))


def serialize_edge_list(instance: CoverageInstance, sink=None,
                        header_lines=()) -> str | None:
    """Write the canonical (set-major) edge list; returns text if sink is None."""
    parts = [f"#{h}" if not h.startswith("#") else h for h in header_lines]
    set_ids, elem_ids = instance.edges()
    parts.extend(f"{s} {e}" for s, e in zip(set_ids.tolist(), elem_ids.tolist()))
    text = "\n".join(parts) + "\n"
    if sink is None:
        return text
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)
    return None


def load_weighted_edge_list(source) -> WeightedInstance:
    """Load a 3-column edge list where the third column is the element weight.

    Every edge of an element must repeat the same weight.  ``U`` defaults to
    the maximum weight and may be declared with a `#U <int>` header.
    """
    rows, headers = _parse_rows(source, 3)
    if not rows:
        raise ValueError("empty instance")
    arr = np.asarray(rows, dtype=np.int64)
    n = int(arr[:, 0].max()) + 1
    m = int(arr[:, 1].max()) + 1
    base = CoverageInstance.from_edges(n, m, arr[:, 0], arr[:, 1])
    weight = np.ones(m, dtype=np.int64)
    seen = np.zeros(m, dtype=bool)
    for s, e, w in rows:
        if w < 1:
            raise ValueError(f"element {e}: weight must be >= 1")
        if seen[e] and weight[e] != w:
            raise ValueError(f"element {e}: conflicting weights")
        weight[e] = w
        seen[e] = True
    U = headers.get("U", int(weight.max()))
    return WeightedInstance(base, weight, U)


def serialize_weighted_edge_list(winst: WeightedInstance, sink=None,
                                 header_lines=()) -> str | None:
    parts = [f"#{h}" for h in header_lines]
    parts.append(f"#U {winst.U}")
    set_ids, elem_ids = winst.base.edges()
    w = winst.element_weight
    parts.extend(f"{s} {e} {w[e]}"
                 for s, e in zip(set_ids.tolist(), elem_ids.tolist()))
    text = "\n".join(parts) + "\n"
    if sink is None:
        return text
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)
    return None


def _load_alpha_edge_list(source, cls):
    rows, headers = _parse_rows(source, 3)
    if not rows:
        raise ValueError("empty instance")
    if "U" not in headers:
        raise ParseError("missing #U header for fractional coverage values")
    U = headers["U"]
    arr = np.asarray(rows, dtype=np.int64)
    n = int(arr[:, 0].max()) + 1
    m = int(arr[:, 1].max()) + 1
    return cls.from_edges(n, m, arr[:, 0], arr[:, 1], arr[:, 2], U)


def load_fractional_edge_list(source) -> FractionalInstance:
    """Load a 3-column edge list of alpha numerators with a `#U` header."""
    return _load_alpha_edge_list(source, FractionalInstance)


def load_probabilistic_edge_list(source) -> ProbabilisticInstance:
    """Same format as the fractional loader; probabilistic interpretation."""
    return _load_alpha_edge_list(source, ProbabilisticInstance)


def serialize_fractional_edge_list(finst: FractionalInstance, sink=None,
                                   header_lines=()) -> str | None:
    parts = [f"#{h}" for h in header_lines]
    parts.append(f"#U {finst.U}")
    set_ids, elem_ids = finst.base.edges()
    numer = finst.numer_set_order
    parts.extend(
        f"{s} {e} {a}" for s, e, a in
        zip(set_ids.tolist(), elem_ids.tolist(), numer.tolist()))
    text = "\n".join(parts) + "\n"
    if sink is None:
        return text
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)
    return None


# ---------------------------------------------------------------------------
# Reductions and synthetic generators
# ---------------------------------------------------------------------------


def khop_dominating_instance(adjacency, hops: int) -> CoverageInstance:
    """Reduce multi-hop dominating set to coverage.

    Vertices double as both sets and elements: set ``a`` contains element
    ``b`` iff ``b == a`` or ``b`` is reachable from ``a`` within ``hops``
    edges.  Any k-cover / partial-cover solution on the result is a dominating
    solution of the same value.  Source graphs are assumed simple and
    undirected; self-loops are ignored (every vertex dominates itself anyway).
    """
    if hops not in (1, 2, 3):
        raise ValueError("hops must be 1, 2, or 3")
    nv = len(adjacency)
    if nv == 0:
        raise ValueError("empty instance")
    set_ids = []
    elem_ids = []
    for a in range(nv):
        seen = {a}
        frontier = [a]
        for _ in range(hops):
            nxt = []
            for u in frontier:
                for w in adjacency[u]:
                    w = int(w)
                    if w < 0 or w >= nv:
                        raise ValueError(f"neighbor id {w} out of range")
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            if not nxt:
                break
            frontier = nxt
        covered = sorted(seen)
        set_ids.extend([a] * len(covered))
        elem_ids.extend(covered)
    return CoverageInstance.from_edges(nv, nv, set_ids, elem_ids)


def generate_planted(k: int, m: int, k_prime: int, eps: float,
                     seed: int) -> tuple[CoverageInstance, list[int]]:
    """Planted partial-cover benchmark with a known optimum.

    ``k`` planted sets partition the ground set into consecutive blocks of
    size ``m/k``; ``k_prime`` decoy sets each hold ``ceil((1+eps) * m/k)``
    distinct elements drawn uniformly, independently across decoys.  Set ids
    are assigned by a seeded permutation so the hidden optimum does not align
    with smallest-id tie-breaking.  Returns the instance and the planted set
    ids (ascending).
    """
    if k < 1 or m < 1 or k_prime < 0:
        raise ValueError("k, m must be positive; k_prime nonnegative")
    if m % k != 0:
        raise ValueError("k must divide m so planted sets partition evenly")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    block = m // k
    decoy_size = _ceil_exact((1.0 + eps) * block)
    if decoy_size > m:
        raise ValueError("decoy sets larger than the ground set")
    rng = np.random.default_rng(seed)
    set_chunks = [np.repeat(np.arange(k, dtype=np.int64), block)]
    elem_chunks = [np.arange(m, dtype=np.int64)]
    for i in range(k_prime):
        picks = rng.choice(m, size=decoy_size, replace=False)
        set_chunks.append(np.full(decoy_size, k + i, dtype=np.int64))
        elem_chunks.append(np.asarray(picks, dtype=np.int64))
    perm = rng.permutation(k + k_prime).astype(np.int64)
    inst = CoverageInstance.from_edges(
        k + k_prime, m, perm[np.concatenate(set_chunks)],
        np.concatenate(elem_chunks))
    return inst, sorted(int(s) for s in perm[:k])


def generate_adversarial(n: int, k: int, beta: float,
                         seed: int = 0) -> CoverageInstance:
    """Bonus-set construction on which uniform edge sampling provably fails.

    ``n`` normal elements (ids ``0..n-1``) belong to every set.  ``beta * n``
    bonus elements follow in id order, split into ``k`` groups; group ``i`` is
    attached only to bonus set ``n-k+i``.  Bonus sets take the largest ids so
    that smallest-id tie-breaking favors normal sets, realizing the
    "arbitrary optimum" in the hardness argument.  The optimal k-cover picks
    the k bonus sets and covers all ``(beta+1) * n`` elements.  Construction
    is deterministic; ``seed`` is accepted for generator API uniformity.
    """
    if n < 2 or k < 1 or 2 * k > n:
        raise ValueError("need 1 <= k <= n/2")
    if beta < 1:
        raise ValueError("beta must be >= 1")
    group_f = beta * n / k
    group = int(round(group_f))
    if abs(group - group_f) > 1e-9 or group < 1:
        raise ValueError("beta*n/k must be a positive integer")
    total_bonus = group * k
    m = n + total_bonus
    normal_sets = np.repeat(np.arange(n, dtype=np.int64), n)
    normal_elems = np.tile(np.arange(n, dtype=np.int64), n)
    bonus_sets = np.repeat(np.arange(n - k, n, dtype=np.int64), group)
    bonus_elems = np.arange(n, m, dtype=np.int64)
    return CoverageInstance.from_edges(
        n, m,
        np.concatenate([normal_sets, bonus_sets]),
        np.concatenate([normal_elems, bonus_elems]))


def feature_pairs_instance(matrix) -> CoverageInstance:
    """Coverage view of column subset selection on a binary matrix.

    Columns become sets; elements are unordered row pairs ``{r1, r2}``
    (``r1 < r2``) that at least one column is active on, labelled by the code
    ``r1 * R + r2``.  Column ``c`` covers a pair iff it is active on both
    rows.  Only covered pairs are materialized; their dense element ids are
    assigned in increasing code order, with codes kept in
    ``element_labels``.
    """
    mat = np.asarray(matrix)
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    if not np.isin(mat, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    nrows, ncols = mat.shape
    col_codes = []
    for c in range(ncols):
        active = np.flatnonzero(mat[:, c])
        if len(active) < 2:
            col_codes.append(np.empty(0, dtype=np.int64))
            continue
        a, b = np.triu_indices(len(active), k=1)
        col_codes.append(active[a].astype(np.int64) * nrows + active[b])
    all_codes = np.unique(np.concatenate(col_codes)) if col_codes else np.empty(0)
    if all_codes.size == 0:
        raise ValueError("empty instance")
    set_ids = np.repeat(np.arange(ncols, dtype=np.int64),
                        [len(c) for c in col_codes])
    elem_ids = np.searchsorted(all_codes, np.concatenate(col_codes))
    return CoverageInstance.from_edges(
        ncols, len(all_codes), set_ids, elem_ids,
        element_labels=all_codes.tolist())
