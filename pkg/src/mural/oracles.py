"""Sampling oracles U_g / O_g with seeded streams and query accounting.

Batches of ``n`` i.i.d. draws from a region are represented by per-point
counts (a multinomial draw over the renormalized marginal) and per-point
label tallies (binomial in eta). Empirical losses depend on the sample only
through these tallies, so this is distributionally identical to drawing the
points one at a time, and ``LabeledSet.samples()`` expands it on demand.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .regions import Region


class OracleContractError(ValueError):
    """A label was requested for a point outside the group's support."""


class QueryLedger:
    """Per-group counts of label-oracle and unlabeled-oracle calls."""

    def __init__(self, n_groups: int):
        self.label_queries = np.zeros(n_groups, dtype=np.int64)
        self.unlabeled_queries = np.zeros(n_groups, dtype=np.int64)

    @property
    def n_groups(self) -> int:
        return len(self.label_queries)

    def charge_labels(self, g: int, n: int = 1):
        if n < 0:
            raise ValueError("ledger counts are monotone")
        self.label_queries[g] += n

    def charge_unlabeled(self, g: int, n: int = 1):
        if n < 0:
            raise ValueError("ledger counts are monotone")
        self.unlabeled_queries[g] += n

    @property
    def total_labels(self) -> int:
        return int(self.label_queries.sum())

    def absorb(self, other: "QueryLedger", group_map=None):
        """Add another ledger's counts; ``group_map[i]`` is the target of its group i."""
        group_map = range(other.n_groups) if group_map is None else group_map
        for src, dst in enumerate(group_map):
            self.label_queries[dst] += other.label_queries[src]
            self.unlabeled_queries[dst] += other.unlabeled_queries[src]

    def copy(self) -> "QueryLedger":
        out = QueryLedger(self.n_groups)
        out.absorb(self)
        return out

    def snapshot(self) -> dict:
        return {
            "label_queries": [int(v) for v in self.label_queries],
            "unlabeled_queries": [int(v) for v in self.unlabeled_queries],
        }

    def __repr__(self):
        return f"QueryLedger(labels={self.label_queries.tolist()}, unlabeled={self.unlabeled_queries.tolist()})"


@dataclass(frozen=True)
class Sample:
    point: int
    group: int
    label: int | None = None


@dataclass(frozen=True, eq=False)
class LabeledSet:
    """``n`` labeled draws from one group, stored as tallies per distinct point."""

    group: int
    points: np.ndarray
    pos: np.ndarray
    neg: np.ndarray

    @classmethod
    def empty(cls, group: int) -> "LabeledSet":
        z = np.zeros(0, dtype=np.int64)
        return cls(group, z, z, z)

    @classmethod
    def from_samples(cls, samples, group: int | None = None) -> "LabeledSet":
        samples = list(samples)
        if group is None:
            group = samples[0].group if samples else 0
        tally: dict[int, list[int]] = {}
        for s in samples:
            if s.label not in (-1, 1):
                raise ValueError(f"sample at point {s.point} has no label")
            slot = tally.setdefault(s.point, [0, 0])
            slot[0 if s.label == 1 else 1] += 1
        pts = np.array(sorted(tally), dtype=np.int64)
        pos = np.array([tally[p][0] for p in pts], dtype=np.int64)
        neg = np.array([tally[p][1] for p in pts], dtype=np.int64)
        return cls(group, pts, pos, neg)

    def __len__(self) -> int:
        return int(self.pos.sum() + self.neg.sum())

    def samples(self) -> Iterator[Sample]:
        for x, p, q in zip(self.points.tolist(), self.pos.tolist(), self.neg.tolist()):
            for _ in range(p):
                yield Sample(x, self.group, 1)
            for _ in range(q):
                yield Sample(x, self.group, -1)

    def mistakes(self, labels: np.ndarray) -> np.ndarray:
        """Mistake counts for each row of a (k, |X|) label matrix (or one vector)."""
        sub = np.asarray(labels)[..., self.points]
        return (sub == 1).astype(np.int64) @ self.neg + (sub == -1).astype(np.int64) @ self.pos


def stream_seed(seed: int, *phase) -> np.random.SeedSequence:
    """Deterministic child seed for a named phase, e.g. ``("agnostic", 3, "in", g)``."""
    key = tuple(zlib.crc32(str(p).encode()) if not isinstance(p, int) else p for p in phase)
    return np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)


def make_rng(seed: int, *phase) -> np.random.Generator:
    return np.random.default_rng(stream_seed(seed, *phase))


def _conditional_pmf(inst, g: int, region: Region):
    marginal = inst.groups[g].marginal
    idx = region.indices
    w = np.asarray(marginal[idx], dtype=np.float64)
    mass = w.sum()
    if mass <= 0.0:
        return idx, None
    return idx, w / mass


def unlabeled_sample(inst, g: int, region: Region, rng: np.random.Generator,
                     ledger: QueryLedger | None = None) -> int | None:
    """One draw from D_g conditioned on ``region``; None if the region has zero mass."""
    if region.universe != inst.domain.size:
        raise ValueError("region is not over the instance domain")
    if ledger is not None:
        ledger.charge_unlabeled(g)
    idx, p = _conditional_pmf(inst, g, region)
    if p is None:
        return None
    return int(idx[rng.choice(len(idx), p=p)])


def label_query(inst, g: int, x: int, rng: np.random.Generator,
                ledger: QueryLedger | None = None) -> int:
    """Rademacher draw with P(+1) = eta_g(x); only defined on supp(g)."""
    grp = inst.groups[g]
    if not grp.marginal[x] > 0:
        raise OracleContractError(f"point {x} is outside the support of group {g}")
    if ledger is not None:
        ledger.charge_labels(g)
    return 1 if rng.random() < float(grp.eta[x]) else -1


def draw_unlabeled_counts(inst, g: int, region: Region, n: int, rng: np.random.Generator,
                          ledger: QueryLedger | None = None):
    """``n`` draws from U_g(region) as (points, counts), or None when the region
    has zero mass (a single call that returned None is charged)."""
    if n < 0:
        raise ValueError("sample count must be non-negative")
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    idx, p = _conditional_pmf(inst, g, region)
    if p is None:
        if ledger is not None:
            ledger.charge_unlabeled(g)
        return None
    if ledger is not None:
        ledger.charge_unlabeled(g, n)
    counts = rng.multinomial(n, p)
    keep = counts > 0
    return idx[keep].astype(np.int64), counts[keep].astype(np.int64)


def label_counts(inst, g: int, points: np.ndarray, counts: np.ndarray, rng: np.random.Generator,
                 ledger: QueryLedger | None = None) -> LabeledSet:
    """Query O_g once per drawn point, returned as tallies."""
    eta = np.asarray(inst.groups[g].eta, dtype=np.float64)
    pos = rng.binomial(counts, eta[points]) if len(points) else np.zeros(0, dtype=np.int64)
    if ledger is not None:
        ledger.charge_labels(g, int(counts.sum()))
    return LabeledSet(g, points, pos.astype(np.int64), counts - pos)


def draw_labeled_set(inst, g: int, region: Region, n: int, rng: np.random.Generator,
                     ledger: QueryLedger | None = None) -> LabeledSet:
    """``n`` labeled draws from region, or an empty set (no label charges) when
    the region carries no mass under group g."""
    drawn = draw_unlabeled_counts(inst, g, region, n, rng, ledger)
    if drawn is None or n == 0:
        return LabeledSet.empty(g)
    return label_counts(inst, g, *drawn, rng, ledger)


class Oracles:
    """U_g and O_g for every group of an instance, sharing one ledger.

    Randomness comes from independent streams keyed by (phase, group), all
    derived from one 64-bit run seed, so call order across groups or phases
    never changes the draws.
    """

    def __init__(self, inst, seed: int, ledger: QueryLedger | None = None):
        self.inst = inst
        self.seed = int(seed)
        self.ledger = ledger if ledger is not None else QueryLedger(inst.n_groups)
        self._streams: dict[tuple, np.random.Generator] = {}

    def stream(self, *phase) -> np.random.Generator:
        rng = self._streams.get(phase)
        if rng is None:
            rng = self._streams[phase] = make_rng(self.seed, *phase)
        return rng

    def unlabeled(self, g: int, region: Region, phase=("u",)) -> int | None:
        return unlabeled_sample(self.inst, g, region, self.stream(*phase, g), self.ledger)

    def label(self, g: int, x: int, phase=("o",)) -> int:
        return label_query(self.inst, g, x, self.stream(*phase, g), self.ledger)

    def labeled_set(self, g: int, region: Region, n: int, phase) -> LabeledSet:
        return draw_labeled_set(self.inst, g, region, n, self.stream(*phase, g), self.ledger)

    def unlabeled_counts(self, g: int, region: Region, n: int, phase):
        return draw_unlabeled_counts(self.inst, g, region, n, self.stream(*phase, g), self.ledger)
