"""Finite multi-group learning instances and exact loss computation.

Every distribution is a finite pmf, so group losses, region masses and the
minimax value are computed exactly rather than estimated. Arrays may hold
``float64`` values or, for exact checks, ``fractions.Fraction`` objects
(object dtype); all arithmetic below works for both.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .regions import Region

MASS_TOL = 1e-12


class InstanceError(ValueError):
    """An instance violates a structural invariant."""


@dataclass(frozen=True)
class FiniteDomain:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InstanceError("domain must contain at least one point")

    @property
    def points(self) -> range:
        return range(self.size)


@dataclass(frozen=True, eq=False)
class GroupDistribution:
    """Marginal pmf over the domain plus per-point P(Y=+1 | X=x)."""

    marginal: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        marginal = _as_prob_array(self.marginal)
        eta = _as_prob_array(self.eta)
        if marginal.ndim != 1 or eta.shape != marginal.shape:
            raise InstanceError("marginal and eta must be 1-D and of equal length")
        if any(p < 0 for p in marginal):
            raise InstanceError("marginal has negative entries")
        if abs(sum(marginal) - 1) > MASS_TOL:
            raise InstanceError(f"marginal sums to {float(sum(marginal))!r}, not 1")
        if any(e < 0 or e > 1 for e in eta):
            raise InstanceError("eta entries must lie in [0, 1]")
        object.__setattr__(self, "marginal", marginal)
        object.__setattr__(self, "eta", eta)

    @property
    def support(self) -> Region:
        return Region(np.asarray([p > 0 for p in self.marginal], dtype=bool))

    @property
    def is_exact(self) -> bool:
        return self.marginal.dtype == object


def _as_prob_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = arr.copy()
    else:
        arr = arr.astype(np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Hypothesis:
    id: int
    labels: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.labels[x])


@dataclass(frozen=True, eq=False)
class HypothesisClass:
    """Materialized label vectors, one row per hypothesis.

    Duplicate label vectors are collapsed on construction (first occurrence
    keeps its relative order), so ids are dense and distinct.
    """

    labels: np.ndarray
    vc_dim: int = 0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8)
        if labels.ndim != 2 or labels.shape[0] < 1 or labels.shape[1] < 1:
            raise InstanceError("hypothesis class needs a non-empty 2-D label matrix")
        if not np.all(np.abs(labels) == 1):
            raise InstanceError("labels must be -1 or +1")
        _, first = np.unique(labels, axis=0, return_index=True)
        if len(first) != labels.shape[0]:
            labels = labels[np.sort(first)]
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        vc_dim = self.vc_dim or default_vc_dim(labels.shape[0])
        if vc_dim < 1:
            raise InstanceError("vc_dim must be a positive integer")
        object.__setattr__(self, "vc_dim", int(vc_dim))

    def __len__(self) -> int:
        return self.labels.shape[0]

    def __getitem__(self, i: int) -> Hypothesis:
        return Hypothesis(int(i), self.labels[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def domain_size(self) -> int:
        return self.labels.shape[1]


def default_vc_dim(n_hypotheses: int) -> int:
    """ceil(log2 |H|), floored at 1; a valid upper bound for any finite class."""
    return max(1, math.ceil(math.log2(n_hypotheses)))


@dataclass(frozen=True, eq=False)
class Instance:
    domain: FiniteDomain
    groups: tuple[GroupDistribution, ...]
    hclass: HypothesisClass
    name: str = "instance"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        if not self.groups:
            raise InstanceError("an instance needs at least one group")
        for g, grp in enumerate(self.groups):
            if len(grp.marginal) != self.domain.size:
                raise InstanceError(f"group {g} is not defined over the instance domain")
        if self.hclass.domain_size != self.domain.size:
            raise InstanceError("hypothesis label vectors do not match the domain size")

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def vc_dim(self) -> int:
        return self.hclass.vc_dim

    def subinstance(self, g: int) -> "Instance":
        """The single-group instance for group ``g`` alone."""
        return Instance(self.domain, (self.groups[g],), self.hclass, f"{self.name}[g={g}]", dict(self.meta))

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "domain_size": self.domain.size,
            "groups": [
                {"marginal": [float(p) for p in grp.marginal], "eta": [float(e) for e in grp.eta]}
                for grp in self.groups
            ],
            "hypotheses": self.hclass.labels.astype(int).tolist(),
            "vc_dim": self.vc_dim,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, name: str = "instance") -> "Instance":
        try:
            size = int(data["domain_size"])
            groups = [GroupDistribution(np.asarray(gd["marginal"], float), np.asarray(gd["eta"], float))
                      for gd in data["groups"]]
            hclass = HypothesisClass(np.asarray(data["hypotheses"]), int(data.get("vc_dim") or 0))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed instance document: {exc}") from exc
        return cls(FiniteDomain(size), tuple(groups), hclass, name)

    @classmethod
    def from_json(cls, text: str, name: str = "instance") -> "Instance":
        return cls.from_dict(json.loads(text), name)


def _labels_of(inst: Instance, h) -> np.ndarray:
    if isinstance(h, Hypothesis):
        return h.labels
    return inst.hclass.labels[int(h)]


def pointwise_error(grp: GroupDistribution, labels: np.ndarray) -> np.ndarray:
    """P(h(x) != y | x) under the group's eta."""
    eta = grp.eta
    if grp.is_exact:
        return np.array([1 - e if lab == 1 else e for e, lab in zip(eta, labels)], dtype=object)
    return np.where(labels == 1, 1.0 - eta, eta)


def true_group_loss(inst: Instance, h, g: int):
    """Exact 0-1 error of ``h`` on group ``g``."""
    grp = inst.groups[g]
    return grp.marginal.dot(pointwise_error(grp, _labels_of(inst, h)))


def true_max_loss(inst: Instance, h):
    return max(true_group_loss(inst, h, g) for g in range(inst.n_groups))


def loss_matrix(inst: Instance) -> np.ndarray:
    """Exact losses for every (hypothesis, group) pair, shape (|H|, G)."""
    H = inst.hclass.labels
    cols = []
    for grp in inst.groups:
        if grp.is_exact:
            cols.append(np.array([grp.marginal.dot(pointwise_error(grp, row)) for row in H], dtype=object))
        else:
            # err(h, x) = eta(x) + [h(x)=+1] * (1 - 2 eta(x))
            base = grp.marginal.dot(grp.eta)
            cols.append(base + (H == 1).astype(np.float64) @ (grp.marginal * (1.0 - 2.0 * grp.eta)))
    return np.stack(cols, axis=1)


def max_loss_vector(inst: Instance) -> np.ndarray:
    return loss_matrix(inst).max(axis=1)


def region_mass(inst: Instance, g: int, region: Region):
    mask = region.mask
    if len(mask) != inst.domain.size:
        raise InstanceError("region is not over the instance domain")
    grp = inst.groups[g]
    if not mask.any():
        return 0 if grp.is_exact else 0.0
    return grp.marginal[mask].sum()


def region_masses(inst: Instance, region: Region) -> list:
    return [region_mass(inst, g, region) for g in range(inst.n_groups)]


def make_instance(marginals: Sequence, etas: Sequence, hypotheses, vc_dim: int = 0,
                  name: str = "instance", meta: dict | None = None) -> Instance:
    groups = tuple(GroupDistribution(m, e) for m, e in zip(marginals, etas, strict=True))
    hclass = HypothesisClass(np.asarray(hypotheses), vc_dim)
    return Instance(FiniteDomain(hclass.domain_size), groups, hclass, name, dict(meta or {}))
