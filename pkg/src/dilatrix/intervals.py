"""Finite unions of intervals on the real line and their exact t-dilation.

The t-dilation of a set F (for t > 1) consists of every point x admitting
an interval I containing x with |I| < (t+1)/2 * |F and I|.  For a finite
union of intervals the dilation is again a finite union of open intervals
and is computed in closed form by enumerating component pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Components whose endpoints coincide up to this tolerance are merged when
# normalizing closed-convention sets; dilation outputs keep exact ties as
# genuine measure-zero holes.
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed bounded interval [lo, hi] with lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: lo={self.lo} > hi={self.hi}")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def clip_length(self, lo: float, hi: float) -> float:
        return max(0.0, min(self.hi, hi) - max(self.lo, lo))


@dataclass(frozen=True)
class IntervalSet:
    """Sorted union of disjoint positive-length intervals.

    ``closed`` selects the boundary convention: closed sets contain their
    endpoints and merge touching components; open sets (the convention for
    dilation outputs) use strict membership and components may share an
    endpoint, which marks a genuine hole of measure zero.
    """

    components: tuple[Interval, ...]
    closed: bool = True

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def measure(self) -> float:
        return float(sum(c.length for c in self.components))

    @property
    def span(self) -> Interval:
        if self.is_empty:
            raise ValueError("empty interval set has no span")
        return Interval(self.components[0].lo, self.components[-1].hi)

    def contains(self, x: float) -> bool:
        if self.closed:
            return any(c.lo <= x <= c.hi for c in self.components)
        return any(c.lo < x < c.hi for c in self.components)

    def endpoints(self) -> np.ndarray:
        return np.array([e for c in self.components for e in (c.lo, c.hi)])

    def affine(self, a: float, b: float) -> "IntervalSet":
        """Image a*F + b, exact on endpoints (a != 0)."""
        if a == 0:
            raise ValueError("affine map must be invertible (a != 0)")
        mapped = [(a * c.lo + b, a * c.hi + b) for c in self.components]
        ivs = [Interval(min(p, q), max(p, q)) for p, q in mapped]
        return normalize(ivs, closed=self.closed)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for c in self.components:
            for d in other.components:
                lo, hi = max(c.lo, d.lo), min(c.hi, d.hi)
                if hi > lo:
                    out.append(Interval(lo, hi))
        return normalize(out, closed=self.closed and other.closed)

    def subset_of(self, other: "IntervalSet", tol: float = 0.0) -> bool:
        """Whether every component is covered by a single component of other."""
        return all(
            any(d.lo <= c.lo + tol and c.hi - tol <= d.hi for d in other.components)
            for c in self.components
        )

    def to_json(self) -> str:
        return json.dumps({"components": [[c.lo, c.hi] for c in self.components]})

    @classmethod
    def from_json(cls, text: str) -> "IntervalSet":
        data = json.loads(text)
        return normalize([Interval(lo, hi) for lo, hi in data["components"]])


def normalize(raw: Iterable[Interval | Sequence[float]], closed: bool = True) -> IntervalSet:
    """Union of the inputs as a sorted disjoint positive-length IntervalSet.

    Closed convention merges touching components (and endpoints coinciding
    up to MERGE_TOL); open convention merges only strict overlaps so that
    exact endpoint ties survive as holes.  Zero-length inputs are dropped:
    they carry no Lebesgue mass and never affect dilation.
    """
    ivs = [c if isinstance(c, Interval) else Interval(float(c[0]), float(c[1])) for c in raw]
    ivs = sorted((c for c in ivs if c.length > 0.0), key=lambda c: (c.lo, c.hi))
    merged: list[list[float]] = []
    for c in ivs:
        if merged:
            gap_ok = c.lo <= merged[-1][1] + MERGE_TOL if closed else c.lo < merged[-1][1]
            if gap_ok:
                merged[-1][1] = max(merged[-1][1], c.hi)
                continue
        merged.append([c.lo, c.hi])
    return IntervalSet(tuple(Interval(lo, hi) for lo, hi in merged), closed=closed)


def measure_and_intersection(F: IntervalSet, I: Interval) -> tuple[float, float]:
    """Total length |F| and clipped length |F and I|, both exact."""
    total = F.measure
    inter = float(sum(c.clip_length(I.lo, I.hi) for c in F.components))
    return total, inter


def intersection_measure(A: IntervalSet, B: IntervalSet) -> float:
    out = 0.0
    for c in A.components:
        for d in B.components:
            out += max(0.0, min(c.hi, d.hi) - max(c.lo, d.lo))
    return out


def symmetric_difference_measure(A: IntervalSet, B: IntervalSet) -> float:
    return A.measure + B.measure - 2.0 * intersection_measure(A, B)


def _check_t(t: float) -> float:
    if not (t > 1.0 and math.isfinite(t)):
        raise ValueError(f"dilation requires t > 1, got t={t}")
    return 0.5 * (t + 1.0)


def dilate_exact(F: IntervalSet, t: float) -> IntervalSet:
    """Exact t-dilation of F as a union of open intervals.

    With components [p_k, q_k] and tau = (t+1)/2, a pair i <= j with
    q_j - p_i < tau * c_ij (c_ij the mass of components i..j) contributes
    the open interval (q_j - tau*c_ij, p_i + tau*c_ij); the dilation is
    the normalized union over qualifying pairs.  The pair inequality is
    strict, matching the strict inequality in the dilation definition.
    """
    tau = _check_t(t)
    if F.is_empty:
        return IntervalSet((), closed=False)
    p = np.array([c.lo for c in F.components])
    q = np.array([c.hi for c in F.components])
    m = len(p)
    csum = np.concatenate(([0.0], np.cumsum(q - p)))
    i_idx, j_idx = np.triu_indices(m)
    c_ij = csum[j_idx + 1] - csum[i_idx]
    reach = tau * c_ij
    keep = (q[j_idx] - p[i_idx]) < reach
    los = q[j_idx][keep] - reach[keep]
    his = p[i_idx][keep] + reach[keep]
    return normalize([Interval(lo, hi) for lo, hi in zip(los, his)], closed=False)


def dilate_grid_oracle(F: IntervalSet, t: float, step: float) -> IntervalSet:
    """Brute-force grid approximation of the t-dilation.

    Tests the dilation definition at every grid point x by maximizing
    |F and I| / |I| over intervals I = [a, b] containing x whose free
    endpoints range over {x} and all component endpoints.  That candidate
    family is exhaustive: extending an endpoint inside F never lowers the
    ratio and trimming gap tails never lowers it.  The grid is anchored at
    integer multiples of ``step`` so the output is resolution-limited but
    deterministic.
    """
    tau = _check_t(t)
    if F.is_empty:
        return IntervalSet((), closed=False)
    if step <= 0:
        raise ValueError("step must be positive")
    min_len = min(c.length for c in F.components)
    if step > min_len:
        raise ValueError(f"step {step} exceeds smallest component length {min_len}")

    E = F.endpoints()
    total = F.measure
    lo_bound = F.components[0].lo - tau * total
    hi_bound = F.components[-1].hi + tau * total
    ks = np.arange(math.floor(lo_bound / step), math.ceil(hi_bound / step) + 1)
    xs = ks * step

    # Cumulative mass C(x) of F below x; phi(x) = x - tau*C(x) turns the
    # ratio test |I| < tau*|F and I| for I = [a, x] into phi(x) < phi(a),
    # and for I = [x, b] into phi(b) < phi(x).
    def cum(v: np.ndarray) -> np.ndarray:
        p = np.array([c.lo for c in F.components])
        q = np.array([c.hi for c in F.components])
        out = np.zeros_like(v, dtype=float)
        for pk, qk in zip(p, q):
            out += np.clip(v, pk, qk) - pk
        return out

    phi_x = xs - tau * cum(xs)
    phi_e = E - tau * cum(E)
    # best left endpoint at or below x / best right endpoint at or above x
    pref_max = np.maximum.accumulate(phi_e)
    suf_min = np.minimum.accumulate(phi_e[::-1])[::-1]
    left_idx = np.searchsorted(E, xs, side="right") - 1
    right_idx = np.searchsorted(E, xs, side="left")
    best_left = np.where(left_idx >= 0, pref_max[np.clip(left_idx, 0, None)], -np.inf)
    best_right = np.where(right_idx < len(E), suf_min[np.clip(right_idx, None, len(E) - 1)], np.inf)

    member = (phi_x < best_left) | (phi_x > best_right) | (best_left > best_right)

    # assemble maximal runs of member grid points
    idx = np.flatnonzero(member)
    if idx.size == 0:
        return IntervalSet((), closed=False)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [idx.size - 1]))
    segs = [Interval(xs[idx[a]], xs[idx[b]]) for a, b in zip(starts, ends) if idx[b] > idx[a]]
    return normalize(segs, closed=False)


def alpha_1d(F: IntervalSet, x: float) -> float:
    """Generalized Minkowski functional inf{t > 1 : x in F_t}, clamped to 1.

    Closed form: over component pairs i <= j the smallest admissible
    tau is max(q_j - x, x - p_i, q_j - p_i) / c_ij, and alpha = 2*tau - 1.
    Consistent with dilate_exact: x in F_t iff alpha_1d(F, x) < t.
    """
    if F.is_empty:
        raise ValueError("alpha is undefined for an empty set")
    p = np.array([c.lo for c in F.components])
    q = np.array([c.hi for c in F.components])
    m = len(p)
    csum = np.concatenate(([0.0], np.cumsum(q - p)))
    i_idx, j_idx = np.triu_indices(m)
    c_ij = csum[j_idx + 1] - csum[i_idx]
    need = np.maximum.reduce([q[j_idx] - x, x - p[i_idx], q[j_idx] - p[i_idx]]) / c_ij
    return max(1.0, 2.0 * float(need.min()) - 1.0)
