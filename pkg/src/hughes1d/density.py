"""Piecewise-constant densities on the line.

A density is stored as strictly increasing breakpoints ``b_0 < ... < b_k``
with one value per interval ``[b_i, b_{i+1})`` and is implicitly zero
outside ``[b_0, b_k]``.  All integrals on this representation are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOMAIN = (-1.0, 1.0)


@dataclass(frozen=True)
class PiecewiseConstantDensity:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.atleast_1d(np.asarray(self.breakpoints, dtype=float))
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        if bp.size != vals.size + 1:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if bp.size < 2:
            raise ValueError("need at least one interval")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(~np.isfinite(bp)) or np.any(~np.isfinite(vals)):
            raise ValueError("breakpoints and values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("density values must be nonnegative")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_segments(cls, segments, domain=DOMAIN) -> "PiecewiseConstantDensity":
        """Build from (left, right, value) triples, zero-filling gaps.

        Segments must be non-overlapping and contained in ``domain``; the
        result covers the whole domain.
        """
        lo, hi = float(domain[0]), float(domain[1])
        segs = sorted((float(a), float(b), float(v)) for a, b, v in segments)
        bp = [lo]
        vals = []
        for a, b, v in segs:
            if b <= a:
                raise ValueError(f"empty segment ({a}, {b})")
            if a < lo - 1e-14 or b > hi + 1e-14:
                raise ValueError(f"segment ({a}, {b}) outside domain {domain}")
            if a < bp[-1] - 1e-14:
                raise ValueError(f"segment ({a}, {b}) overlaps a previous one")
            if a > bp[-1] + 1e-14:
                bp.append(a)
                vals.append(0.0)
            bp.append(b)
            vals.append(v)
        if hi > bp[-1] + 1e-14:
            bp.append(hi)
            vals.append(0.0)
        else:
            bp[-1] = hi
        return cls(np.array(bp), np.array(vals))

    @property
    def support(self) -> tuple[float, float]:
        """Endpoints of the smallest interval carrying all the mass."""
        pos = self.values > 0.0
        if not np.any(pos):
            return (self.breakpoints[0], self.breakpoints[0])
        idx = np.nonzero(pos)[0]
        return (float(self.breakpoints[idx[0]]),
                float(self.breakpoints[idx[-1] + 1]))

    def mass(self) -> float:
        return float(np.dot(self.values, np.diff(self.breakpoints)))

    def value_at(self, x):
        """Density at positions ``x`` (zero outside the breakpoint range)."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.where(inside, self.values[np.clip(idx, 0, self.values.size - 1)], 0.0)
        return float(out) if np.ndim(x) == 0 else out

    def integrate(self, lo: float, hi: float) -> float:
        """Exact integral of the density over [lo, hi]."""
        if hi <= lo:
            return 0.0
        left = np.maximum(self.breakpoints[:-1], lo)
        right = np.minimum(self.breakpoints[1:], hi)
        overlap = np.maximum(right - left, 0.0)
        return float(np.dot(self.values, overlap))

    def clip(self, lo: float, hi: float) -> "PiecewiseConstantDensity":
        """Restriction to [lo, hi]; pieces are truncated, values kept."""
        bp = np.clip(self.breakpoints, lo, hi)
        keep = np.diff(bp) > 0.0
        if not np.any(keep):
            return PiecewiseConstantDensity(np.array([lo, hi]), np.array([0.0]))
        idx = np.nonzero(keep)[0]
        new_bp = np.concatenate((bp[:-1][idx], [bp[idx[-1] + 1]]))
        return PiecewiseConstantDensity(new_bp, self.values[idx])

    def pad_to(self, lo: float, hi: float) -> "PiecewiseConstantDensity":
        """Extend the breakpoint range to cover [lo, hi] with zero values."""
        bp = self.breakpoints
        vals = self.values
        if lo < bp[0]:
            bp = np.concatenate(([lo], bp))
            vals = np.concatenate(([0.0], vals))
        if hi > bp[-1]:
            bp = np.concatenate((bp, [hi]))
            vals = np.concatenate((vals, [0.0]))
        return PiecewiseConstantDensity(bp, vals)


def merged_grid(a: PiecewiseConstantDensity,
                b: PiecewiseConstantDensity) -> np.ndarray:
    """Sorted union of both breakpoint sets (duplicates removed)."""
    return np.unique(np.concatenate((a.breakpoints, b.breakpoints)))


def l1_distance(a: PiecewiseConstantDensity,
                b: PiecewiseConstantDensity) -> float:
    """Exact integral of |a - b| over the union of the supports."""
    grid = merged_grid(a, b)
    mids = 0.5 * (grid[:-1] + grid[1:])
    diff = np.abs(a.value_at(mids) - b.value_at(mids))
    return float(np.dot(diff, np.diff(grid)))


def total_variation(d: PiecewiseConstantDensity) -> float:
    """Total variation of the zero extension of ``d`` to the whole line.

    Counts all interior jumps plus the two boundary jumps down to the
    zero extension outside the breakpoint range.
    """
    padded = np.concatenate(([0.0], d.values, [0.0]))
    return float(np.sum(np.abs(np.diff(padded))))


def symmetrize(d: PiecewiseConstantDensity) -> PiecewiseConstantDensity:
    """Even part (d(x) + d(-x)) / 2 on a mirror-symmetric breakpoint set."""
    bp = np.unique(np.concatenate((d.breakpoints, -d.breakpoints)))
    mids = 0.5 * (bp[:-1] + bp[1:])
    vals = 0.5 * (d.value_at(mids) + d.value_at(-mids))
    return PiecewiseConstantDensity(bp, vals)
