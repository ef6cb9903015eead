import numpy as np
import pytest

from mural.cal import NotRealizableError, cal_budget, is_realizable, run_cal
from mural.domain import make_instance, true_group_loss
from mural.oracles import Oracles
from mural.scenarios import threshold_instance


def test_singleton_class_needs_no_labels():
    inst = make_instance([[0.5, 0.5]], [[1.0, 0.0]], [[1, -1]])
    res = run_cal(inst, 0, 0.1, 0.1, seed=0)
    assert res.h == 0 and res.label_queries == 0
    assert res.inferred == res.n_draws == cal_budget(0.1, 0.1, inst.vc_dim)


def test_non_realizable_group_is_rejected():
    inst = threshold_instance(16, noise_spec={"kind": "agnostic", "nu": [0.1]})
    assert not is_realizable(inst, 0)
    with pytest.raises(NotRealizableError) as err:
        run_cal(inst, 0, 0.1, 0.1, seed=0)
    assert err.value.group == 0


def test_thresholds_learned_with_few_labels():
    inst = threshold_instance(256, seed=5)
    for seed in range(5):
        orc = Oracles(inst, seed)
        res = run_cal(inst, 0, 0.05, 0.1, oracles=orc)
        assert true_group_loss(inst, res.h, 0) <= 0.05
        # binary search behaviour: about log2(257) labels, far below the budget
        assert res.label_queries <= 20
        assert orc.ledger.label_queries[0] == res.label_queries
        assert orc.ledger.unlabeled_queries[0] == res.n_draws


def test_queries_only_inside_disagreement_region():
    inst = threshold_instance(64, seed=2)
    res = run_cal(inst, 0, 0.05, 0.1, seed=4)
    labels = inst.hclass.labels
    vs = np.ones(len(labels), dtype=bool)
    for x in res.query_points:
        rows = labels[vs]
        assert np.any(rows[:, x] != rows[0, x]), "queried a point every survivor agrees on"
        t = inst.meta["threshold"]
        y = 1 if x >= t else -1
        vs &= labels[:, x] == y
