import numpy as np
import pytest

from mural.estimation import empirical_loss
from mural.reduction import counterfactual_sets, relabel_sample_size, run_approximation, run_group_realizable
from mural.scenarios import adversarial_instance, threshold_instance


@pytest.fixture(scope="module")
def shifted():
    return threshold_instance(128, G=2, noise_spec={"kind": "group_realizable", "offsets": [-6, 6]}, seed=1)


def test_relabeling_charges_no_labels(shifted):
    rep = run_group_realizable(shifted, 0.1, 0.1, seed=0)
    assert rep.total_labels == rep.diagnostics["labels_after_phase1"]
    assert rep.total_labels == sum(s["label_queries"] for s in rep.subreports)
    n = relabel_sample_size(0.1, 0.1, 1, 2)
    assert rep.ledger.unlabeled_queries.min() >= n


def test_group_learners_are_group_optimal(shifted):
    rep = run_group_realizable(shifted, 0.1, 0.1, seed=2)
    losses = [s["h"] for s in rep.subreports]
    from mural.domain import true_group_loss
    for g, h in enumerate(losses):
        assert true_group_loss(shifted, h, g) <= 0.1 / 6 + 1e-12


def test_counterfactual_inequality(shifted):
    rep = run_group_realizable(shifted, 0.1, 0.1, seed=3)
    labels = shifted.hclass.labels
    truly = counterfactual_sets(shifted, rep, seed=3)
    for g, (art, real) in enumerate(zip(rep.artifacts["artificial"], truly)):
        hat = labels[rep.artifacts["hat_h"][g]]
        slack = empirical_loss(hat, real)
        for h in range(len(labels)):
            assert abs(empirical_loss(labels[h], real) - empirical_loss(labels[h], art)) <= slack + 1e-12


def test_group_realizable_consistency(shifted):
    assert all(run_group_realizable(shifted, 0.1, 0.1, seed=s).excess_true_loss <= 0.1 for s in range(5))


def test_approximation_on_adversarial_instance():
    rep = run_approximation(adversarial_instance(), 0.1, 0.1, seed=0)
    assert rep.artifacts["hat_h"] == [0, 1]
    assert rep.output_h == 1
    assert rep.excess_true_loss == pytest.approx(0.15)
    assert rep.excess_true_loss <= rep.diagnostics["approximation_bound"]
    assert rep.total_labels == sum(s["label_queries"] for s in rep.subreports)
