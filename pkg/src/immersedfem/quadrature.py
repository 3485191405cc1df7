"""Gauss-Legendre rules on reference cells and recursively split rules for
cells crossed by the interface, where integrands are only piecewise smooth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def gauss_points_1d(n: int):
    """Gauss-Legendre nodes/weights on [0, 1]; weights sum to one."""
    if n < 1:
        raise ValueError(f"need at least one point, got {n}")
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes + 1.0), 0.5 * weights


@dataclass(frozen=True)
class CellQuadrature:
    """Tensor rule on the reference cell [0, 1]^dim.

    Exact for tensor-product polynomials of degree 2*points_per_axis - 1 per
    axis; weights sum to one (the reference cell volume).
    """

    dim: int
    points_per_axis: int
    points: np.ndarray   # (n_q, dim)
    weights: np.ndarray  # (n_q,)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def gauss_rule(dim: int, points_per_axis: int) -> CellQuadrature:
    """Tensor Gauss-Legendre rule on [0, 1]^dim."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    x, w = gauss_points_1d(points_per_axis)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    # first axis varies fastest, matching the local dof ordering
    points = np.column_stack([g.ravel(order="F") for g in grids])
    weights = np.ones(points.shape[0])
    for axis in range(dim):
        wg = np.meshgrid(*([w] * dim), indexing="ij")[axis]
        weights = weights * wg.ravel(order="F")
    return CellQuadrature(dim=dim, points_per_axis=points_per_axis,
                          points=points, weights=weights)


@dataclass(frozen=True)
class SplitCellQuadrature:
    """Recursively bisected rule for a cell crossed by the interface.

    Leaves produced before the depth limit lie entirely on one side of the
    surface; leaves forced at ``max_depth`` may still be cut and carry the
    side of their centre (``cut`` marks them).  Each leaf is integrated with
    the base rule scaled to the sub-box, so leaf volumes add up to the cell
    volume exactly.
    """

    lows: np.ndarray    # (n_leaf, dim)
    sizes: np.ndarray   # (n_leaf,) edge length of each sub-box
    sides: np.ndarray   # (n_leaf,) -1 interior, +1 exterior
    cut: np.ndarray     # (n_leaf,) True where the leaf was forced at max_depth
    rule: CellQuadrature
    max_depth: int

    @property
    def n_leaves(self) -> int:
        return self.lows.shape[0]

    def points_weights(self):
        """Expanded rule: (points (n, dim), weights (n,), side per point).

        Weights include the sub-box volumes, so summing them gives the cell
        volume; sides repeat each leaf's tag over its quadrature points.
        """
        nq = self.rule.n_points
        pts = self.lows[:, None, :] + self.sizes[:, None, None] * self.rule.points[None, :, :]
        dim = self.lows.shape[1]
        w = self.rule.weights[None, :] * self.sizes[:, None] ** dim
        side = np.repeat(self.sides, nq)
        return pts.reshape(-1, dim), w.reshape(-1), side


def split_cut_cell(cell_low, cell_size: float, interface, base_rule: CellQuadrature,
                   max_depth: int) -> SplitCellQuadrature:
    """Bisect a cell recursively until sub-boxes clear the interface.

    A sub-box becomes a leaf once its closed box no longer meets the surface
    (its exact distance range excludes the radius) or the depth limit is
    reached.  Children are emitted in lexicographic corner order, so the
    leaf sequence is deterministic.
    """
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    cell_low = np.asarray(cell_low, dtype=float)
    dim = cell_low.shape[0]
    offsets = _corner_offsets(dim)

    lows = cell_low[None, :]
    size = float(cell_size)
    leaf_lows, leaf_sizes, leaf_sides, leaf_cut = [], [], [], []
    for depth in range(max_depth + 1):
        high = lows + size
        is_cut = interface.cuts_box(lows, high)
        done = ~is_cut if depth < max_depth else np.ones(len(lows), dtype=bool)
        if np.any(done):
            centers = lows[done] + 0.5 * size
            leaf_lows.append(lows[done])
            leaf_sizes.append(np.full(int(done.sum()), size))
            leaf_sides.append(interface.side(centers))
            leaf_cut.append(is_cut[done])
        lows = lows[~done]
        if lows.shape[0] == 0:
            break
        size *= 0.5
        lows = (lows[:, None, :] + size * offsets[None, :, :]).reshape(-1, dim)

    return SplitCellQuadrature(
        lows=np.concatenate(leaf_lows),
        sizes=np.concatenate(leaf_sizes),
        sides=np.concatenate(leaf_sides),
        cut=np.concatenate(leaf_cut),
        rule=base_rule,
        max_depth=max_depth,
    )


def _corner_offsets(dim: int) -> np.ndarray:
    grids = np.meshgrid(*([np.array([0.0, 1.0])] * dim), indexing="ij")
    return np.column_stack([g.ravel(order="F") for g in grids])
