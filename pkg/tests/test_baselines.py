from fractions import Fraction as F

import numpy as np
import pytest

from mural.baselines import brute_force_optimum, minimax_erm, passive_sample_size, run_passive
from mural.oracles import LabeledSet
from mural.scenarios import random_instance


def reversed_loop_optimum(inst):
    """Independent oracle: loops over groups outer, hypotheses inner."""
    n_h = len(inst.hclass)
    worst = [None] * n_h
    for grp in reversed(inst.groups):
        for h in reversed(range(n_h)):
            loss = 0
            for x, y in enumerate(inst.hclass.labels[h]):
                loss += grp.marginal[x] * ((1 - grp.eta[x]) if y == 1 else grp.eta[x])
            worst[h] = loss if worst[h] is None else max(worst[h], loss)
    nu = min(worst)
    return nu, [h for h in range(n_h) if worst[h] <= nu + 1e-12]


def test_example1_optimum(gadget_exact):
    opt = brute_force_optimum(gadget_exact)
    assert opt.h == 1 and opt.nu == F(1, 4)
    assert opt.nu_g == (F(1, 8), F(1, 4))


@pytest.mark.parametrize("seed", range(5))
def test_optimum_matches_reversed_loops(seed):
    inst = random_instance((10, 20, 3), seed=seed)
    nu, tied = reversed_loop_optimum(inst)
    opt = brute_force_optimum(inst)
    assert float(opt.nu) == pytest.approx(nu, abs=1e-12)
    assert list(opt.tied_ids) == tied


def test_minimax_erm_breaks_ties_by_lowest_id():
    labels = np.array([[1, 1], [1, -1], [-1, 1]])
    sets = [LabeledSet(0, np.array([0]), np.array([1]), np.array([0])),
            LabeledSet(1, np.array([1]), np.array([0]), np.array([0]))]
    # group 1 is empty (loss 1 for everyone); group 0 is perfect for h0 and h1
    assert minimax_erm(labels, sets) == 0


def test_passive_sample_size():
    assert passive_sample_size(0.1, 0.1, 1, 2) == int(np.ceil(800 * (2 * np.log(130) + np.log(80))))


def test_passive_is_consistent():
    hits = 0
    for seed in range(20):
        inst = random_instance((16, 32, 3), seed=100 + seed, noise=0.1)
        hits += run_passive(inst, 0.1, 0.1, seed).excess_true_loss <= 0.1
    assert hits >= 18
