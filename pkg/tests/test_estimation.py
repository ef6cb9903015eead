import itertools
import math

import numpy as np
import pytest

from mural.domain import true_group_loss
from mural.estimation import (
    EMPTY_SAMPLE_LOSS, empirical_loss, empirical_losses, estimate_all, gamma_bound,
    sufficient_sample_sizes, max_loss_estimate, two_part_loss, two_part_losses,
)
from mural.oracles import LabeledSet, Sample, draw_labeled_set, make_rng
from mural.regions import Region, VersionSpace, disagreement_region


def test_empty_sample_loss_is_one():
    assert empirical_loss(np.array([1, -1]), []) == EMPTY_SAMPLE_LOSS == 1.0
    np.testing.assert_array_equal(empirical_losses(np.ones((3, 2)), LabeledSet.empty(0)), [1, 1, 1])


def test_empirical_loss_three_of_eight():
    # 3 of 8 samples disagree with the all-positive hypothesis
    samples = [Sample(0, 0, 1)] * 5 + [Sample(1, 0, -1)] * 3
    assert empirical_loss(np.array([1, 1]), samples) == 0.375


def test_two_part_loss_rejects_outsiders(gadget):
    vs = VersionSpace.from_indices([0, 1], 3)
    region = disagreement_region(gadget.hclass, vs)
    with pytest.raises(ValueError):
        two_part_loss(gadget, 0, 2, vs, region, [], [])


def test_two_part_loss_region_edge_cases(gadget):
    n = gadget.domain.size
    vs = VersionSpace.full(3)
    rng = make_rng(0, "edge")
    full_s = draw_labeled_set(gadget, 0, Region.full(n), 500, rng)
    # region is everything: only the in-part counts
    est = two_part_loss(gadget, 0, 1, vs, Region.full(n), full_s, [])
    assert est == pytest.approx(empirical_loss(gadget.hclass.labels[1], full_s))
    # region is empty: the representative's complement loss for everyone
    ests = two_part_losses(gadget, 0, vs, Region.empty(n), [], full_s)
    assert np.allclose(ests, empirical_loss(gadget.hclass.labels[0], full_s))


def test_estimate_all_and_max_loss_estimate_agree(gadget):
    vs = VersionSpace.from_indices([0, 1], 3)
    region = disagreement_region(gadget.hclass, vs)
    rng = make_rng(1, "agree")
    sets = [(draw_labeled_set(gadget, g, region, 300, rng), draw_labeled_set(gadget, g, ~region, 300, rng))
            for g in range(2)]
    est = estimate_all(gadget, vs, region, sets)
    for h in (0, 1):
        assert est.max_over_groups[h] == pytest.approx(max_loss_estimate(gadget, h, vs, region, sets))


def test_two_part_estimate_is_unbiased(thresholds10):
    inst = thresholds10
    t = inst.meta["threshold"]
    vs = VersionSpace.from_indices(range(max(t - 2, 0), t + 3), len(inst.hclass))
    region = disagreement_region(inst.hclass, vs)
    reps = 10_000
    rng = make_rng(2, "unbiased")
    for g in range(inst.n_groups):
        draws = np.array([
            two_part_losses(inst, g, vs, region,
                            draw_labeled_set(inst, g, region, 4, rng),
                            draw_labeled_set(inst, g, ~region, 4, rng))
            for _ in range(reps)
        ])
        exact = np.array([float(true_group_loss(inst, h, g)) for h in vs.indices])
        se = draws.std(axis=0, ddof=1) / math.sqrt(reps)
        assert np.all(np.abs(draws.mean(axis=0) - exact) <= 3 * se + 1e-12)


def test_gamma_cases():
    d, m, mp = 2, 200, 300
    inside = 1 / m + math.sqrt((math.log(8 / 0.1) + d * math.log(2 * math.e * m / d)) / m)
    outside = math.sqrt(math.log(4 / 0.1) / (2 * mp))
    assert gamma_bound(0.1, 0.4, 0.6, d, m, mp) == pytest.approx(0.4 * inside + outside)
    assert gamma_bound(0.1, 1.0, 0.0, d, m, mp) == pytest.approx(inside)
    assert gamma_bound(0.1, 0.0, 1.0, d, m, mp) == pytest.approx(outside)
    with pytest.raises(ValueError):
        gamma_bound(0.1, 0.0, 0.0, d, m, mp)
    with pytest.raises(ValueError):
        gamma_bound(1.5, 0.5, 0.5, d, m, mp)


def test_gamma_monotone_in_sample_sizes():
    vals = [gamma_bound(0.1, 0.5, 0.5, 3, m, m) for m in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    vals = [gamma_bound(dl, 0.5, 0.5, 3, 500, 500) for dl in (0.5, 0.1, 0.01)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_sufficient_sizes_hold_across_a_sweep():
    checked = 0
    for gamma, delta, d, p in itertools.product((0.02, 0.05, 0.1, 0.2, 0.4), (0.01, 0.1, 0.5),
                                                (1, 2, 5, 10), (0.05, 0.2, 0.5, 1.0)):
        m, mp = sufficient_sample_sizes(gamma, delta, d, p)
        m, mp = math.ceil(m), math.ceil(mp)
        if m < d:
            continue
        assert gamma_bound(delta, p, 1 - p, d, m, mp) <= gamma + 1e-12
        checked += 1
    assert checked > 150
