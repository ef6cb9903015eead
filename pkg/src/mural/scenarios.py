"""Deterministic instance generators."""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

from .domain import Instance, InstanceError, make_instance

DESK_LIMITS = {"points": 256, "hypotheses": 512, "groups": 8}

# Example-1 gadget layout. Points a1, a2 sit in the disagreement region on
# group 1's support, b1, b2 on group 2's, c and d outside it.
#   a1: h != h'        (eta 59/100)
#   a2: h == h' != h'' (eta 91/100)
#   b1: h != h'        (eta 0)
#   b2: h == h' != h'' (eta 1)
#   c : all agree      (eta 1)
#   d : all agree      (eta 1/2)
# Two atoms per cell are needed: on a point where h and h' disagree their
# conditional losses sum to one, which 1/4 and 34/100 do not.
EXAMPLE1_POINTS = ("a1", "a2", "b1", "b2", "c", "d")
EXAMPLE1_MARGINALS = (
    (F(1, 4), F(1, 4), F(0), F(0), F(1, 2), F(0)),
    (F(0), F(0), F(1, 6), F(1, 3), F(0), F(1, 2)),
)
EXAMPLE1_ETA = (F(59, 100), F(91, 100), F(0), F(1), F(1), F(1, 2))
EXAMPLE1_HYPOTHESES = (
    (+1, +1, +1, +1, +1, +1),  # h
    (-1, +1, -1, +1, +1, +1),  # h'
    (-1, -1, -1, -1, +1, +1),  # h'' (dominated; widens the disagreement region)
)
EXAMPLE1_DELTA = (0, 1, 2, 3)


def example1_gadget(exact: bool = False) -> Instance:
    """Two groups where the disagreement-region-only surrogate prefers h while
    h' wins the true multi-group objective by 1/6.

    With ``exact=True`` all probabilities are Fractions.
    """
    conv = (lambda v: v) if exact else float
    marginals = [np.array([conv(p) for p in m], dtype=object if exact else float) for m in EXAMPLE1_MARGINALS]
    eta = np.array([conv(e) for e in EXAMPLE1_ETA], dtype=object if exact else float)
    return make_instance(marginals, [eta, eta], EXAMPLE1_HYPOTHESES, name="example1",
                         meta={"points": list(EXAMPLE1_POINTS), "h": 0, "h_prime": 1, "h_dominated": 2})


def adversarial_instance() -> Instance:
    """Relabeling with each group's optimum hides group 1's noise and flips
    the minimax ERM to the wrong hypothesis.

    Group 1: p1 (0.15, h_A right, h_B wrong), p2 (0.6, eta 1/2), p3 (0.25).
    Group 2: q1 (0.25, h_B right, h_A wrong), q2 (0.75).
    True max losses: h_A 0.30, h_B 0.45.  Relabeled: h_A 0.25, h_B 0.15.
    """
    marginals = [[0.15, 0.6, 0.25, 0.0, 0.0], [0.0, 0.0, 0.0, 0.25, 0.75]]
    eta = [1.0, 0.5, 1.0, 0.0, 1.0]
    hyps = [[+1, +1, +1, +1, +1], [-1, +1, +1, -1, +1]]
    return make_instance(marginals, [eta, eta], hyps, vc_dim=1, name="adversarial")


def threshold_labels(n_points: int) -> np.ndarray:
    """All n+1 thresholds on an n-point line: h_t(j) = +1 iff j >= t."""
    j = np.arange(n_points)
    t = np.arange(n_points + 1)[:, None]
    return np.where(j >= t, 1, -1).astype(np.int8)


def threshold_instance(n_points: int, G: int = 1, noise_spec="realizable", seed: int = 0,
                       windows=None) -> Instance:
    """1-D thresholds over a uniform grid.

    ``noise_spec`` is ``"realizable"`` or a dict with ``kind`` one of
    ``realizable``, ``group_realizable`` (``offsets``: per-group threshold
    shifts in grid units) or ``agnostic`` (``nu``: per-group noise targets,
    optional ``offsets``). Under ``agnostic`` labels flip with constant
    probability nu_g, so the group optimum is exactly nu_g. ``windows`` lists a
    per-group (lo, hi) index range carrying that group's uniform marginal.
    """
    if n_points < 2:
        raise InstanceError("threshold instances need at least 2 points")
    if G < 1:
        raise InstanceError("need at least one group")
    spec = {"kind": noise_spec} if isinstance(noise_spec, str) else dict(noise_spec)
    kind = spec.get("kind", "realizable")
    rng = np.random.default_rng(seed)
    t_star = int(spec.get("threshold", rng.integers(n_points // 4, 3 * n_points // 4 + 1)))
    offsets = list(spec.get("offsets", [0] * G))
    if len(offsets) != G:
        raise InstanceError("need one offset per group")
    if kind == "realizable" and any(offsets):
        raise InstanceError("realizable spec admits no offsets")
    if kind == "agnostic":
        nus = list(spec.get("nu", []))
        if len(nus) != G:
            raise InstanceError("agnostic spec needs one nu target per group")
        for v in nus:
            if not 0 <= v < 0.5:
                raise InstanceError(f"noise target {v} is not achievable (need 0 <= nu_g < 1/2)")
    elif kind in ("realizable", "group_realizable"):
        nus = [0.0] * G
    else:
        raise InstanceError(f"unknown noise kind {kind!r}")

    j = np.arange(n_points)
    marginals, etas = [], []
    for g in range(G):
        lo, hi = (0, n_points) if windows is None else windows[g]
        if not 0 <= lo < hi <= n_points:
            raise InstanceError(f"bad window {(lo, hi)} for group {g}")
        m = np.zeros(n_points)
        m[lo:hi] = 1.0 / (hi - lo)
        t_g = int(np.clip(t_star + offsets[g], 0, n_points))
        eta = np.where(j >= t_g, 1.0 - nus[g], nus[g])
        marginals.append(m)
        etas.append(eta)
    return make_instance(marginals, etas, threshold_labels(n_points), vc_dim=1, name="threshold",
                         meta={"threshold": t_star, "noise": spec, "n_points": n_points})


def random_instance(sizes=(16, 32, 3), seed: int = 0, noise: float | None = None) -> Instance:
    """Seeded random marginals, eta and label vectors.

    With ``noise`` set, eta follows a planted hypothesis (row 0) with per-point
    flip probabilities drawn from U(0, noise), so nu <= noise.
    """
    n_points, n_hyp, G = sizes
    if not (1 <= n_points <= DESK_LIMITS["points"] and 1 <= n_hyp <= DESK_LIMITS["hypotheses"]
            and 1 <= G <= DESK_LIMITS["groups"]):
        raise InstanceError(f"sizes {sizes} exceed desk-scale limits {DESK_LIMITS}")
    rng = np.random.default_rng(seed)
    labels = rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_hyp, n_points))
    marginals = [rng.dirichlet(np.ones(n_points)) for _ in range(G)]
    if noise is None:
        etas = [rng.random(n_points) for _ in range(G)]
    else:
        if not 0 <= noise < 0.5:
            raise InstanceError("noise must lie in [0, 1/2)")
        planted = labels[0]
        etas = []
        for _ in range(G):
            flip = rng.uniform(0.0, noise, n_points)
            etas.append(np.where(planted == 1, 1.0 - flip, flip))
    return make_instance(marginals, etas, labels, name="random",
                         meta={"sizes": list(sizes), "seed": seed, "noise": noise})


def _no_leftovers(name, params):
    if params:
        raise InstanceError(f"unknown {name} parameters: {sorted(params)}")


def _example1(params):
    return example1_gadget()


def _threshold(params):
    p = dict(params)
    inst = threshold_instance(int(p.pop("n_points", 64)), int(p.pop("G", 1)), p.pop("noise_spec", "realizable"),
                              int(p.pop("seed", 0)), p.pop("windows", None))
    _no_leftovers("threshold", p)
    return inst


def _random(params):
    p = dict(params)
    inst = random_instance(tuple(p.pop("sizes", (16, 32, 3))), int(p.pop("seed", 0)), p.pop("noise", None))
    _no_leftovers("random", p)
    return inst


def _adversarial(params):
    return adversarial_instance()


SCENARIOS = {
    "example1": _example1,
    "threshold": _threshold,
    "random": _random,
    "adversarial": _adversarial,
}


def build_scenario(name: str, params: dict | None = None) -> Instance:
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise InstanceError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return builder(params or {})
