"""Bit-indexed regions and version spaces, disagreement regions, balls and
disagreement coefficients."""

from __future__ import annotations

from typing import Iterable

import numpy as np


class _Mask:
    """Immutable subset of ``range(n)`` backed by a boolean array."""

    __slots__ = ("mask",)

    def __init__(self, mask):
        mask = np.array(mask, dtype=bool)
        if mask.ndim != 1:
            raise ValueError("membership mask must be 1-D")
        mask.setflags(write=False)
        self.mask = mask

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int):
        mask = np.zeros(n, dtype=bool)
        mask[list(indices)] = True
        return cls(mask)

    @classmethod
    def full(cls, n: int):
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def empty(cls, n: int):
        return cls(np.zeros(n, dtype=bool))

    @property
    def universe(self) -> int:
        return len(self.mask)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self):
        return int(self.mask.sum())

    def __bool__(self):
        return bool(self.mask.any())

    def __iter__(self):
        return iter(self.indices.tolist())

    def __contains__(self, i) -> bool:
        return 0 <= i < len(self.mask) and bool(self.mask[i])

    def _check(self, other):
        if type(other) is not type(self) or other.universe != self.universe:
            raise TypeError(f"incompatible operand {other!r}")

    def __and__(self, other):
        self._check(other)
        return type(self)(self.mask & other.mask)

    def __or__(self, other):
        self._check(other)
        return type(self)(self.mask | other.mask)

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.mask & ~other.mask)

    def __invert__(self):
        return type(self)(~self.mask)

    def __le__(self, other) -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)

    def __eq__(self, other):
        return type(other) is type(self) and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((type(self).__name__, self.mask.tobytes()))

    def __repr__(self):
        idx = self.indices
        body = ", ".join(map(str, idx[:12])) + (", ..." if len(idx) > 12 else "")
        return f"{type(self).__name__}({{{body}}}/{self.universe})"


class Region(_Mask):
    """Subset of domain points."""

    def complement(self) -> "Region":
        return ~self


class VersionSpace(_Mask):
    """Subset of hypothesis ids."""

    @property
    def representative(self) -> int:
        """Lowest surviving id; the shared hypothesis of the two-part estimator."""
        if not self:
            raise ValueError("empty version space has no representative")
        return int(self.indices[0])


class EmptyVersionSpaceError(ValueError):
    pass


def disagreement_region(hclass, vs: VersionSpace) -> Region:
    """Points on which some pair of hypotheses in ``vs`` disagree."""
    if not vs:
        raise EmptyVersionSpaceError("disagreement region of an empty version space")
    rows = hclass.labels[vs.mask]
    return Region(np.any(rows != rows[0], axis=0))


def rho(inst, g: int, h1, h2):
    """Mass under group g of the points where h1 and h2 disagree."""
    a = inst.hclass.labels[_hid(h1)]
    b = inst.hclass.labels[_hid(h2)]
    marginal = inst.groups[g].marginal
    diff = a != b
    if not diff.any():
        return 0 if inst.groups[g].is_exact else 0.0
    return marginal[diff].sum()


def rho_matrix(inst, g: int) -> np.ndarray:
    """All pairwise rho_g distances, shape (|H|, |H|), float64."""
    H = inst.hclass.labels.astype(np.float64)
    w = np.asarray(inst.groups[g].marginal, dtype=np.float64)
    # [h != h'] = (1 - h h') / 2 for +-1 labels
    agree = (H * w) @ H.T
    out = 0.5 * (w.sum() - agree)
    np.clip(out, 0.0, 1.0, out=out)
    return out


def ball(inst, g: int, center, r: float) -> VersionSpace:
    if r < 0:
        raise ValueError("radius must be non-negative")
    c = inst.hclass.labels[_hid(center)]
    w = np.asarray(inst.groups[g].marginal, dtype=np.float64)
    dist = (inst.hclass.labels != c).astype(np.float64) @ w
    return VersionSpace(dist <= r + 1e-12)


def _hid(h) -> int:
    return int(getattr(h, "id", h))


def disagreement_coefficient(inst, g: int, nu: float, eps: float) -> float:
    """Exact sup over centers h and radii r >= 2 nu + eps of
    P_g(Delta(B_g(h, r))) / r.

    The numerator is a right-continuous step function of r whose jumps sit at
    the distances rho_g(h, h'), so the sup over r is attained on the finite set
    {r0} U {rho_g(h, h') >= r0}.
    """
    r0 = 2.0 * float(nu) + float(eps)
    if r0 <= 0:
        raise ValueError("2*nu + eps must be positive")
    H = inst.hclass.labels
    w = np.asarray(inst.groups[g].marginal, dtype=np.float64)
    dist = rho_matrix(inst, g)
    best = 0.0
    for c in range(len(H)):
        order = np.argsort(dist[c], kind="stable")
        d_sorted = dist[c][order]
        # Delta of a ball containing its center = union of disagreements with it
        diff = H[order] != H[c]
        covered = np.logical_or.accumulate(diff, axis=0)
        masses = covered.astype(np.float64) @ w
        radii = np.concatenate(([r0], d_sorted[d_sorted > r0]))
        # ball of radius r holds every id up to the last one at distance <= r
        last = np.searchsorted(d_sorted, radii + 1e-12, side="right") - 1
        best = max(best, float((masses[last] / radii).max()))
    return best


def disagreement_coefficient_max(inst, nu: float, eps: float) -> float:
    return max(disagreement_coefficient(inst, g, nu, eps) for g in range(inst.n_groups))


def disagreement_coefficients(inst, nu: float, eps: float) -> list[float]:
    return [disagreement_coefficient(inst, g, nu, eps) for g in range(inst.n_groups)]
