"""Distance-weighted error norms and empirical convergence orders.

The L2 and H1 errors are weighted by d(x)^(2*alpha) with d the exact distance
to the interface.  Cells crossed by the interface are integrated with a
recursively split rule whose sub-boxes carry a side tag, so the piecewise
exact solution is always evaluated on a single branch per quadrature point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, CellClassification
from .quadrature import gauss_rule, split_cut_cell
from .space import FeSpace


def default_cut_depth(dim: int) -> int:
    # bisecting a cut cell costs O(2^((dim-1)*depth)) leaves, so 3D uses a
    # shallower default; the mis-attributed sliver shrinks like 2^-depth and
    # scales with the same power of h as the layer error itself
    return 6 if dim == 2 else 4


def default_norm_points(degree: int) -> int:
    return degree + 3


@dataclass
class WeightedNormParams:
    """Weight exponent, derivative order, and quadrature configuration."""

    alpha: float
    m: int = 0
    quad_points: int | None = None  # per axis; defaults to degree + 3
    cut_depth: int | None = None    # defaults to 6 (2D) / 4 (3D)

    def __post_init__(self):
        if not -0.5 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (-1/2, 1/2), got {self.alpha}")
        if self.m not in (0, 1):
            raise ValueError(f"derivative order m must be 0 or 1, got {self.m}")


class RadialSolution:
    """Piecewise field: constant inside the surface, radial outside.

    ``outer_value``/``outer_slope`` are vectorised functions of the distance
    to the centre; the gradient is zero inside and radial outside.  Values
    of the two branches agree on the surface, so the field is continuous.
    """

    def __init__(self, interface, outer_value, outer_slope, inner_value: float):
        self.interface = interface
        self.dim = interface.dim
        self._outer_value = outer_value
        self._outer_slope = outer_slope
        self._inner_value = float(inner_value)

    def values(self, points, side=None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        outer = self._outer_mask(points, side)
        rho = np.linalg.norm(points - self.interface.center, axis=-1)
        out = np.full(points.shape[0], self._inner_value)
        out[outer] = self._outer_value(rho[outer])
        return out

    def gradients(self, points, side=None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        outer = self._outer_mask(points, side)
        r = points - self.interface.center
        rho = np.linalg.norm(r, axis=-1)
        grad = np.zeros_like(points)
        grad[outer] = (self._outer_slope(rho[outer]) / rho[outer])[:, None] * r[outer]
        return grad

    def _outer_mask(self, points, side):
        if side is None:
            side = self.interface.side(points)
        side = np.broadcast_to(np.asarray(side), (points.shape[0],))
        return side > 0

    def value(self, x) -> float:
        """Pointwise value; points on the surface take the outside branch."""
        return float(self.values(np.asarray(x, dtype=float)[None, :])[0])

    def gradient(self, x) -> np.ndarray:
        return self.gradients(np.asarray(x, dtype=float)[None, :])[0]


def reference_solution(interface) -> RadialSolution:
    """The harmonic validation fields: -log|r| outside a circle (constant
    -log R inside), 1/|r| outside a sphere (constant 1/R inside)."""
    radius = interface.radius
    if interface.dim == 2:
        return RadialSolution(interface,
                              outer_value=lambda rho: -np.log(rho),
                              outer_slope=lambda rho: -1.0 / rho,
                              inner_value=-math.log(radius))
    return RadialSolution(interface,
                          outer_value=lambda rho: 1.0 / rho,
                          outer_slope=lambda rho: -1.0 / rho**2,
                          inner_value=1.0 / radius)


def layer_source_strength(interface) -> float:
    """Constant flux-jump density reproducing the reference solution."""
    return 1.0 / interface.radius ** (interface.dim - 1)


@dataclass
class ConvergenceRecord:
    """Weighted errors of one refinement level at one weight exponent."""

    dim: int
    n_cells_per_axis: int
    h: float
    n_dofs: int
    alpha: float
    err_l2: float
    err_h1_semi: float
    err_h1_full: float
    eoc_l2: float | None = None
    eoc_h1: float | None = None


def weighted_errors(space: FeSpace, coeffs, exact, interface, alphas,
                    quad_points: int | None = None, cut_depth: int | None = None,
                    cell_ids=None) -> dict:
    """Weighted L2 and H1-seminorm errors for several exponents at once.

    Returns {(alpha, m): error} for m in {0, 1}.  The quadrature samples and
    distances are computed once and reused across exponents.  ``cell_ids``
    restricts the integration to a subset of cells (broken norms).
    """
    alphas = [float(a) for a in alphas]
    for a in alphas:
        WeightedNormParams(alpha=a)
    mesh = space.mesh
    coeffs = np.asarray(coeffs, dtype=float)
    q = quad_points if quad_points is not None else default_norm_points(space.degree)
    depth = cut_depth if cut_depth is not None else default_cut_depth(mesh.dim)
    rule = gauss_rule(mesh.dim, q)
    values_tab, grads_tab = space.tabulate(rule.points)

    cells = np.arange(mesh.n_cells) if cell_ids is None else np.asarray(cell_ids, dtype=int)
    cut = interface.cuts_box(mesh.cell_lows[cells], mesh.cell_lows[cells] + mesh.edge)
    acc = {(a, m): 0.0 for a in alphas for m in (0, 1)}

    plain = cells[~cut]
    if plain.size:
        low = mesh.cell_lows[plain]
        pts = (low[:, None, :] + mesh.edge * rule.points[None, :, :]).reshape(-1, mesh.dim)
        local = coeffs[space.cell_dofs[plain]]
        uh = (local @ values_tab.T).ravel()
        guh = np.einsum("cj,qjk->cqk", local, grads_tab).reshape(-1, mesh.dim) / mesh.edge
        side = np.repeat(interface.side(low + 0.5 * mesh.edge), rule.n_points)
        w = np.tile(rule.weights, plain.size) * mesh.edge ** mesh.dim
        _accumulate(acc, alphas, interface, exact, pts, w, side, uh, guh)

    for cell in cells[cut]:
        split = split_cut_cell(mesh.cell_lows[cell], mesh.edge, interface, rule, depth)
        pts, w, side = split.points_weights()
        ref = (pts - mesh.cell_lows[cell]) / mesh.edge
        values, grads = space.tabulate(ref)
        local = coeffs[space.cell_dofs[cell]]
        uh = values @ local
        guh = np.einsum("j,pjk->pk", local, grads) / mesh.edge
        _accumulate(acc, alphas, interface, exact, pts, w, side, uh, guh)

    return {key: math.sqrt(value) for key, value in acc.items()}


def _accumulate(acc, alphas, interface, exact, pts, w, side, uh, guh):
    e0 = exact.values(pts, side=side) - uh
    e1 = exact.gradients(pts, side=side) - guh
    we0 = w * e0**2
    we1 = w * np.sum(e1**2, axis=-1)
    d = interface.distance(pts)
    for a in alphas:
        weight = np.power(d, 2.0 * a) if a != 0.0 else 1.0
        acc[(a, 0)] += float(np.sum(we0 * weight))
        acc[(a, 1)] += float(np.sum(we1 * weight))


def weighted_error(space: FeSpace, coeffs, exact, interface,
                   params: WeightedNormParams) -> float:
    """Single weighted error norm: m = 0 gives the weighted L2 norm of the
    error, m = 1 the weighted H1 seminorm."""
    errs = weighted_errors(space, coeffs, exact, interface, [params.alpha],
                           quad_points=params.quad_points, cut_depth=params.cut_depth)
    return errs[(params.alpha, params.m)]


def weight_integral(interface, alpha: float, mesh: Mesh,
                    quad_points: int = 4, cut_depth: int | None = None) -> float:
    """Integral of the weight d(x)^(2*alpha) over the unit box (diagnostic)."""
    if 2.0 * alpha <= -1.0:
        raise ValueError(f"weight exponent 2*alpha must exceed -1, got {2 * alpha}")
    depth = cut_depth if cut_depth is not None else default_cut_depth(mesh.dim)
    rule = gauss_rule(mesh.dim, quad_points)
    cut = interface.cuts_box(mesh.cell_lows, mesh.cell_lows + mesh.edge)
    total = 0.0

    low = mesh.cell_lows[~cut]
    pts = (low[:, None, :] + mesh.edge * rule.points[None, :, :]).reshape(-1, mesh.dim)
    w = np.tile(rule.weights, low.shape[0]) * mesh.edge ** mesh.dim
    total += float(np.sum(w * np.power(interface.distance(pts), 2.0 * alpha)))

    for cell in np.nonzero(cut)[0]:
        split = split_cut_cell(mesh.cell_lows[cell], mesh.edge, interface, rule, depth)
        pts, w, _ = split.points_weights()
        total += float(np.sum(w * np.power(interface.distance(pts), 2.0 * alpha)))
    return total


def discrete_norm(space: FeSpace, coeffs, classification: CellClassification,
                  alpha: float) -> float:
    """Cellwise weighted norm: sum over cells of dist_max^(2*alpha) times the
    squared L2 norm of the FE function on the cell.

    At alpha = 0 this is the plain L2 norm (0^0 counts as 1); cells sitting
    on the surface contribute nothing when alpha > 0."""
    WeightedNormParams(alpha=alpha)
    mesh = space.mesh
    rule = gauss_rule(mesh.dim, space.degree + 2)
    values_tab, _ = space.tabulate(rule.points)
    local = np.asarray(coeffs, dtype=float)[space.cell_dofs]
    uh = local @ values_tab.T  # (n_cells, n_q)
    cell_sq = mesh.edge ** mesh.dim * (uh**2 @ rule.weights)
    return math.sqrt(float(np.sum(np.power(classification.dist_max, 2.0 * alpha) * cell_sq)))


def eoc(errors) -> list:
    """Empirical convergence orders from (h, error) pairs under halving.

    The mesh sizes must halve exactly from one entry to the next; the rate
    between levels k-1 and k is log2(e_{k-1} / e_k), or None when either
    error vanishes."""
    pairs = list(errors)
    if len(pairs) < 1:
        raise ValueError("need at least one (h, error) pair")
    hs = [float(h) for h, _ in pairs]
    es = [float(e) for _, e in pairs]
    for coarse, fine in zip(hs[:-1], hs[1:]):
        if abs(2.0 * fine - coarse) > 1e-9 * coarse:
            raise ValueError(f"mesh sizes do not halve: {coarse} -> {fine}")
    rates = []
    for e_coarse, e_fine in zip(es[:-1], es[1:]):
        if e_coarse == 0.0 or e_fine == 0.0:
            rates.append(None)
        else:
            rates.append(math.log2(e_coarse / e_fine))
    return rates
