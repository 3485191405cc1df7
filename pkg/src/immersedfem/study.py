"""Convergence studies: solve the layer-source model problem on a sequence of
halved meshes, evaluate weighted errors for a grid of exponents, and render
the records as CSV or markdown tables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import apply_dirichlet, assemble_interface_load, assemble_stiffness
from .geometry import SphericalInterface, immersed_quadrature
from .mesh import build_uniform_mesh
from .norms import (ConvergenceRecord, layer_source_strength, reference_solution,
                    weighted_errors)
from .solver import cg_solve
from .space import FeSpace

CSV_HEADER = ("dim,n_cells_per_axis,h,n_dofs,alpha,"
              "err_L2_alpha,err_H1semi_alpha,eoc_L2,eoc_H1")


class ConfigError(ValueError):
    """Invalid study configuration (CLI exit code 1)."""


class StudyError(RuntimeError):
    """Solver failure during a study (CLI exit code 2)."""


@dataclass
class StudyConfig:
    """Parameters of a convergence study over meshes n_c = 2^min_exp ... 2^max_exp.

    Unset fields fall back to dimension-dependent defaults: levels 8..256 in
    2D and 4..32 in 3D, sigma = sqrt(dim), error quadrature of degree + 3
    points per axis, and the dimension's cut-cell bisection depth.
    """

    dim: int = 2
    min_exp: int | None = None
    max_exp: int | None = None
    alphas: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.49)
    degree: int = 1
    sigma: float | None = None
    cg_tol: float = 1e-10
    quad_points: int | None = None
    cut_depth: int | None = None
    center: tuple | None = None
    radius: float = 0.2
    fmt: str = "csv"
    out: str | None = None
    surface_order: int = 4

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        if self.min_exp is None:
            self.min_exp = 3 if self.dim == 2 else 2
        if self.max_exp is None:
            self.max_exp = 8 if self.dim == 2 else 5
        if self.min_exp < 2:
            raise ConfigError(f"min-exp must be >= 2, got {self.min_exp}")
        if self.max_exp < self.min_exp:
            raise ConfigError("max-exp must not be smaller than min-exp")
        alphas = tuple(sorted(float(a) for a in self.alphas))
        if not alphas:
            raise ConfigError("need at least one alpha")
        if any(not 0.0 <= a < 0.5 for a in alphas):
            raise ConfigError(f"alphas must lie in [0, 0.5), got {alphas}")
        self.alphas = alphas
        if self.degree < 1:
            raise ConfigError(f"degree must be >= 1, got {self.degree}")
        if self.sigma is None:
            self.sigma = math.sqrt(self.dim)
        if self.sigma <= 0.0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.cg_tol <= 0.0:
            raise ConfigError(f"cg-tol must be positive, got {self.cg_tol}")
        if self.quad_points is not None and self.quad_points < 1:
            raise ConfigError("quad-points must be >= 1")
        if self.cut_depth is not None and self.cut_depth < 0:
            raise ConfigError("cut-depth must be >= 0")
        if self.center is None:
            self.center = (0.3,) * self.dim
        self.center = tuple(float(c) for c in self.center)
        if len(self.center) != self.dim:
            raise ConfigError(f"center must have {self.dim} coordinates")
        if self.radius <= 0.0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if any(c - self.radius <= 0.0 or c + self.radius >= 1.0 for c in self.center):
            raise ConfigError("interface must lie strictly inside the unit box")
        if self.fmt not in ("csv", "markdown"):
            raise ConfigError(f"format must be csv or markdown, got {self.fmt!r}")


def run_study(config: StudyConfig):
    """Solve every refinement level and return records sorted by (n_c, alpha).

    Each level assembles the layer-source problem with the constant jump
    density of the reference solution and its trace as Dirichlet data, solves
    with Jacobi-preconditioned CG, and evaluates both weighted error norms
    for every exponent.  Raises StudyError if CG fails to converge.
    """
    interface = SphericalInterface(config.center, config.radius)
    exact = reference_solution(interface)
    density = layer_source_strength(interface)

    def density_fn(points):
        return np.full(np.atleast_2d(points).shape[0], density)

    records = []
    previous = {}
    for exponent in range(config.min_exp, config.max_exp + 1):
        n_c = 2 ** exponent
        mesh = build_uniform_mesh(config.dim, n_c)
        space = FeSpace(mesh, config.degree)
        quad = immersed_quadrature(interface, mesh, order=config.surface_order)
        stiffness = assemble_stiffness(space)
        load = assemble_interface_load(space, quad, density_fn)
        matrix, rhs = apply_dirichlet(stiffness, load, space, exact.value)
        solution, report = cg_solve(matrix, rhs, tol=config.cg_tol,
                                    preconditioner="jacobi")
        if not report.converged:
            raise StudyError(
                f"CG failed at n_c = {n_c}: residual {report.final_relative_residual:.3e} "
                f"after {report.iterations} iterations"
            )
        errors = weighted_errors(space, solution, exact, interface, config.alphas,
                                 quad_points=config.quad_points,
                                 cut_depth=config.cut_depth)
        for alpha in config.alphas:
            e0, e1 = errors[(alpha, 0)], errors[(alpha, 1)]
            prev = previous.get(alpha)
            record = ConvergenceRecord(
                dim=config.dim,
                n_cells_per_axis=n_c,
                h=mesh.h_cell,
                n_dofs=space.n_dofs,
                alpha=alpha,
                err_l2=e0,
                err_h1_semi=e1,
                err_h1_full=math.hypot(e0, e1),
                eoc_l2=_rate(prev[0], e0) if prev else None,
                eoc_h1=_rate(prev[1], e1) if prev else None,
            )
            records.append(record)
            previous[alpha] = (e0, e1)
    return records


def _rate(coarse: float, fine: float):
    if coarse == 0.0 or fine == 0.0:
        return None
    return math.log2(coarse / fine)


def _num(value: float) -> str:
    return f"{value:.16e}"


def emit_table(records, fmt: str = "csv") -> str:
    """Render records as CSV (fixed column schema, 17 significant digits so
    rates recompute exactly from the file) or as one markdown table per
    exponent."""
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in records:
            lines.append(",".join([
                str(r.dim), str(r.n_cells_per_axis), _num(r.h), str(r.n_dofs),
                _num(r.alpha), _num(r.err_l2), _num(r.err_h1_semi),
                "" if r.eoc_l2 is None else _num(r.eoc_l2),
                "" if r.eoc_h1 is None else _num(r.eoc_h1),
            ]))
        return "\n".join(lines) + "\n"
    if fmt != "markdown":
        raise ValueError(f"format must be csv or markdown, got {fmt!r}")
    lines = []
    for alpha in sorted({r.alpha for r in records}):
        lines.append(f"## alpha = {alpha:g}")
        lines.append("")
        lines.append("| h | n_dofs | err_L2_alpha | eoc_L2 | err_H1semi_alpha | eoc_H1 |")
        lines.append("|---|---|---|---|---|---|")
        group = [r for r in records if r.alpha == alpha]
        for r in sorted(group, key=lambda rec: -rec.h):
            lines.append("| {h:.6e} | {n} | {e0:.6e} | {r0} | {e1:.6e} | {r1} |".format(
                h=r.h, n=r.n_dofs, e0=r.err_l2,
                r0="-" if r.eoc_l2 is None else f"{r.eoc_l2:.3f}",
                e1=r.err_h1_semi,
                r1="-" if r.eoc_h1 is None else f"{r.eoc_h1:.3f}",
            ))
        lines.append("")
    return "\n".join(lines)
