"""Realizable single-distribution active learner (query inside the disagreement
region of the consistent version space, infer everywhere else)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import loss_matrix
from .oracles import Oracles, label_query
from .regions import VersionSpace, disagreement_region

REALIZABLE_TOL = 1e-12


class NotRealizableError(ValueError):
    def __init__(self, g: int, detail: str = ""):
        self.group = g
        super().__init__(f"group {g} is not realizable by the hypothesis class{': ' + detail if detail else ''}")


@dataclass
class CalResult:
    h: int
    group: int
    n_draws: int
    label_queries: int
    inferred: int
    version_space: VersionSpace
    query_points: list


def cal_budget(eps: float, delta: float, d: int) -> int:
    """Unlabeled draws for a realizable PAC guarantee: (4/eps)(d ln(12/eps) + ln(2/delta))."""
    return math.ceil(4 / eps * (d * math.log(12 / eps) + math.log(2 / delta)))


def is_realizable(inst, g: int) -> bool:
    return float(min(loss_matrix(inst)[:, g])) <= REALIZABLE_TOL


def run_cal(inst, g: int, eps: float, delta: float, seed: int | None = None,
            oracles: Oracles | None = None, phase: tuple = ("cal",)) -> CalResult:
    """Returns the lowest-id hypothesis consistent with every label seen.

    Labels are requested only for draws inside the disagreement region of the
    current version space; outside it every member predicts the same label, so
    the inferred label eliminates nothing and costs nothing.
    """
    if not is_realizable(inst, g):
        raise NotRealizableError(g)
    if oracles is None:
        oracles = Oracles(inst, 0 if seed is None else seed)
    labels = inst.hclass.labels
    n = cal_budget(eps, delta, inst.vc_dim)
    w = np.asarray(inst.groups[g].marginal, dtype=np.float64)
    support = np.flatnonzero(w > 0)
    rng_u = oracles.stream(*phase, "u", g)
    rng_o = oracles.stream(*phase, "o", g)
    seq = support[rng_u.choice(len(support), size=n, p=w[support] / w[support].sum())]
    oracles.ledger.charge_unlabeled(g, n)

    vs = np.ones(len(labels), dtype=bool)
    region = disagreement_region(inst.hclass, VersionSpace(vs)).mask
    queries = []
    j = 0
    while j < n:
        hits = np.flatnonzero(region[seq[j:]])
        if not len(hits):
            break
        k = j + int(hits[0])
        x = int(seq[k])
        y = label_query(inst, g, x, rng_o, oracles.ledger)
        queries.append(x)
        vs &= labels[:, x] == y
        if not vs.any():
            raise NotRealizableError(g, f"no hypothesis consistent after {len(queries)} labels")
        region = disagreement_region(inst.hclass, VersionSpace(vs)).mask
        j = k + 1
    final = VersionSpace(vs)
    return CalResult(final.representative, g, n, len(queries), n - len(queries), final, queries)
