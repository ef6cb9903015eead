"""Empirical loss estimators and their deviation bound.

The two-part estimate of a hypothesis' loss on group g splits the domain into
a region R (usually the disagreement region of the version space) and its
complement. On R each hypothesis is scored on its own labeled sample; on the
complement every surviving hypothesis predicts identically, so one shared
representative is scored once and its loss reused for all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracles import LabeledSet
from .regions import Region, VersionSpace

EMPTY_SAMPLE_LOSS = 1.0


def _as_labeled_set(samples) -> LabeledSet:
    if isinstance(samples, LabeledSet):
        return samples
    return LabeledSet.from_samples(samples)


def _labels(h) -> np.ndarray:
    return np.asarray(getattr(h, "labels", h))


def empirical_loss(h, samples) -> float:
    """Mean 0-1 loss of ``h`` on ``samples``; exactly 1 on an empty sample."""
    s = _as_labeled_set(samples)
    n = len(s)
    if n == 0:
        return EMPTY_SAMPLE_LOSS
    return float(s.mistakes(_labels(h))) / n


def empirical_losses(labels: np.ndarray, samples) -> np.ndarray:
    """``empirical_loss`` for every row of a label matrix."""
    s = _as_labeled_set(samples)
    n = len(s)
    if n == 0:
        return np.full(len(labels), EMPTY_SAMPLE_LOSS)
    return s.mistakes(labels) / n


@dataclass(frozen=True)
class TwoPartEstimate:
    """Per-group two-part estimates for every hypothesis in ``ids``."""

    ids: np.ndarray
    per_group: np.ndarray  # shape (G, len(ids))
    region: Region
    representative: int

    @property
    def max_over_groups(self) -> np.ndarray:
        return self.per_group.max(axis=0)

    def of(self, h: int) -> np.ndarray:
        return self.per_group[:, int(np.searchsorted(self.ids, h))]


def _masses(inst, g, region):
    w = np.asarray(inst.groups[g].marginal, dtype=np.float64)
    p_in = float(w[region.mask].sum())
    p_out = float(w[~region.mask].sum())
    return p_in, p_out


def two_part_loss(inst, g: int, h, vs: VersionSpace, region: Region, s_in, s_out) -> float:
    hid = int(getattr(h, "id", h))
    if hid not in vs:
        raise ValueError(f"hypothesis {hid} is not in the version space")
    p_in, p_out = _masses(inst, g, region)
    rep = inst.hclass.labels[vs.representative]
    return p_in * empirical_loss(inst.hclass.labels[hid], s_in) + p_out * empirical_loss(rep, s_out)


def two_part_losses(inst, g: int, vs: VersionSpace, region: Region, s_in, s_out) -> np.ndarray:
    """Two-part estimate for every member of ``vs`` (in id order)."""
    p_in, p_out = _masses(inst, g, region)
    labels = inst.hclass.labels[vs.mask]
    shared = p_out * empirical_loss(inst.hclass.labels[vs.representative], s_out)
    return p_in * empirical_losses(labels, s_in) + shared


def estimate_all(inst, vs: VersionSpace, region: Region, samples_by_group) -> TwoPartEstimate:
    """``samples_by_group[g] = (s_in, s_out)``."""
    per_group = np.stack([
        two_part_losses(inst, g, vs, region, s_in, s_out)
        for g, (s_in, s_out) in enumerate(samples_by_group)
    ])
    return TwoPartEstimate(vs.indices, per_group, region, vs.representative)


def max_loss_estimate(inst, h, vs: VersionSpace, region: Region, samples_by_group) -> float:
    return max(two_part_loss(inst, g, h, vs, region, s_in, s_out)
               for g, (s_in, s_out) in enumerate(samples_by_group))


def gamma_bound(delta: float, region_mass_g: float, complement_mass_g: float,
                d: int, m: float, m_prime: float) -> float:
    """Uniform deviation bound for the two-part estimate on one group.

    Three cases, by which of the region / complement carry mass. For m < d the
    VC growth term d*ln(2em/d) is undefined as a bound and the trivial growth
    count ln(2^(2m)) is used instead.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    in_pos, out_pos = region_mass_g > 0, complement_mass_g > 0
    if not (in_pos or out_pos):
        raise ValueError("region and complement cannot both have zero mass")

    def inside() -> float:
        if m <= 0:
            raise ValueError("in-region sample size must be positive")
        growth = d * math.log(2 * math.e * m / d) if m >= d else 2 * m * math.log(2)
        return 1.0 / m + math.sqrt((math.log(8 / delta) + growth) / m)

    def outside() -> float:
        if m_prime <= 0:
            raise ValueError("complement sample size must be positive")
        return math.sqrt(math.log(4 / delta) / (2 * m_prime))

    if in_pos and out_pos:
        return region_mass_g * inside() + outside()
    if in_pos:
        return inside()
    return outside()


def sufficient_sample_sizes(gamma: float, delta: float, d: int, region_mass_g: float) -> tuple[float, float]:
    """Sufficient (m, m') making ``gamma_bound`` fall below ``gamma``."""
    m = 16 * region_mass_g ** 2 / gamma ** 2 * (2 * d * math.log(8 / gamma) + math.log(8 / delta))
    m_prime = 2 * math.log(4 / delta) / gamma ** 2
    return m, m_prime
