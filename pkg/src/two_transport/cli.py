"""Batch front end: validate cocycle files, run transports, compute holonomy.

Output formatting is fixed (12 significant digits, scientific residuals) so
identical inputs and flags produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import lie_core as lc
from .cocycle import validate_cocycle
from .cocycle_io import ParseError, load_bigon, load_cocycle, load_path, load_surface
from .cover import CoverError
from .holonomy import (abelian_oracle, base_point_dependence, change_loop,
                       contraction_independence, mapped_bigon, surface_holonomy,
                       SurfaceError)
from .reconstruct import lift_path, transport_bigon_global_full, transport_path_global
from .transport import (Bigon, Path, TransportError, target_law_residual,
                        transport_bigon_lattice, transport_bigon_ode)


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def format_matrix(m: np.ndarray) -> str:
    rows = ["  ".join(_fmt_complex(v) for v in row) for row in np.atleast_2d(m)]
    return "[" + "; ".join(rows) + "]"


def _emit(args, line: str, essential: bool = False):
    if essential or not args.quiet:
        print(line)


def cmd_validate(args) -> int:
    c = load_cocycle(args.cocycle)
    rep = validate_cocycle(c, grid_n=args.grid, fd_step=args.fd_step,
                           tol=args.tol, tol_exact=args.tol_exact)
    for clause in rep.clauses:
        status = "vacuous" if clause.vacuous else ("pass" if clause.passed else "FAIL")
        _emit(args, f"{clause.name:<28s} residual {clause.residual:.3e}  "
              f"tol {clause.tolerance:.1e}  {status}",
              essential=not clause.passed)
    failing = rep.failing()
    if failing:
        _emit(args, f"FAILED: {', '.join(cl.name for cl in failing)}", essential=True)
        return 1
    _emit(args, f"ok: {len(rep.clauses)} clauses, worst residual {rep.worst():.3e}",
          essential=True)
    return 0


def cmd_transport_path(args) -> int:
    c = load_cocycle(args.cocycle)
    path = load_path(args.path, c.cover.chart)
    dec = lift_path(c.cover, path)
    value = transport_path_global(c, path, steps_per_segment=args.steps)
    _emit(args, f"group {c.cm.G.name}  segments {len(dec.segments)}  "
          f"jumps {len(dec.jumps)}  steps/segment {args.steps}")
    _emit(args, f"patches {'-'.join(str(s.patch) for s in dec.segments)}")
    _emit(args, f"transport {format_matrix(value.matrix)}", essential=True)
    return 0


def cmd_transport_surface(args) -> int:
    c = load_cocycle(args.cocycle)
    bigon = load_bigon(args.bigon, c.cover.chart)
    if args.method == "ode":
        if c.cover.size != 1:
            _emit(args, "error: the ode method needs a single-patch cocycle",
                  essential=True)
            return 1
        m = transport_bigon_ode(c.cm, c.A[0], c.B[0], bigon, args.cells,
                                check_endpoints=False)
        residual = target_law_residual(c.cm, c.A[0], m, bigon,
                                       steps=max(256, 2 * args.cells))
    else:
        res = transport_bigon_global_full(c, bigon, args.cells, check_endpoints=False)
        m, residual = res.morphism, res.target_residual
    _emit(args, f"method {args.method}  cells {args.cells}")
    _emit(args, f"source g      {format_matrix(m.source.matrix)}", essential=True)
    _emit(args, f"fiber h       {format_matrix(m.h.matrix)}", essential=True)
    _emit(args, f"target t(h)g  {format_matrix(m.target.matrix)}", essential=True)
    _emit(args, f"target-law residual {residual:.3e}", essential=True)
    return 0


def cmd_holonomy(args) -> int:
    c = load_cocycle(args.cocycle)
    phi, fb, file_cells = load_surface(args.surface, c.cover.chart)
    cells = args.cells if args.cells else file_cells
    method = "ode" if (args.method == "auto" and c.cover.size == 1) else \
        ("lattice" if args.method == "auto" else args.method)
    res = surface_holonomy(c, phi, fb, cells=cells, method=method)
    _emit(args, f"genus {fb.genus}  cells {cells}  method {method}")
    _emit(args, f"holonomy fiber {format_matrix(res.fiber.matrix)}", essential=True)
    _emit(args, f"boundary transport {format_matrix(res.morphism.source.matrix)}")
    _emit(args, f"target-law residual {res.target_residual:.3e}", essential=True)
    rng = np.random.default_rng(args.seed)
    for check in args.check:
        if check == "oracle":
            val = abelian_oracle(c, phi, fb, quadrature=max(96, cells))
            _emit(args, f"oracle value {format_matrix(val.matrix)}")
            _emit(args, f"oracle distance {lc.distance(res.fiber, val):.3e}",
                  essential=True)
        elif check == "base-point":
            x = c.cover.chart.wrap(np.asarray(phi(fb.base_vertex), dtype=float))
            step = 0.2 + 0.1 * rng.random(c.cover.chart.dim)
            gamma = Path(c.cover.chart, lambda t, x=x, step=step: x + t * t * step)
            out = base_point_dependence(c, phi, fb, gamma, cells=cells, method=method)
            _emit(args, f"base-point law residual {out.residual:.3e}", essential=True)
        elif check == "loop-change":
            alpha = Path(c.cover.chart,
                         lambda t: np.asarray(phi(fb.edge_point(0, t)), dtype=float))
            amp = 0.05 + 0.02 * rng.random()
            bump = np.zeros(c.cover.chart.dim)
            bump[-1] = 1.0

            def prime(t, amp=amp):
                return alpha.point(t) + amp * np.sin(np.pi * t) * bump
            alpha_prime = Path(c.cover.chart, prime)
            delta = Bigon(c.cover.chart,
                          lambda s, t: (1 - s) * prime(t) + s * alpha.point(t))
            out = change_loop(c, phi, fb, alpha_prime, delta, cells=cells,
                              method=method)
            _emit(args, f"loop-change residual {out.residual:.3e}", essential=True)
        elif check == "contraction":
            d = contraction_independence(c, phi, fb, cells=cells, method=method)
            _emit(args, f"contraction distance {d:.3e}", essential=True)
    return 0


def cmd_compare_oracle(args) -> int:
    c = load_cocycle(args.cocycle)
    if c.cover.size != 1:
        _emit(args, "error: the cross-oracle comparison needs a single-patch cocycle",
              essential=True)
        return 1
    bigon = load_bigon(args.bigon, c.cover.chart)
    cells = [int(v) for v in args.cells_list.split(",")]
    _emit(args, f"{'N':>6s}  {'ode-vs-lattice':>15s}  {'target-law':>12s}",
          essential=True)
    for n in cells:
        m1 = transport_bigon_ode(c.cm, c.A[0], c.B[0], bigon, n, check_endpoints=False)
        m2 = transport_bigon_lattice(c.cm, c.A[0], c.B[0], bigon, n,
                                     check_endpoints=False)
        gap = lc.distance(m1.h, m2.h)
        law = target_law_residual(c.cm, c.A[0], m2, bigon, steps=max(512, 2 * n))
        _emit(args, f"{n:>6d}  {gap:>15.3e}  {law:>12.3e}", essential=True)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="two-transport",
        description="Surface transport and holonomy over crossed-module cocycles")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fd-step", type=float, default=1e-4)
    common.add_argument("--tol", type=float, default=1e-4)
    common.add_argument("--tol-exact", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="run the cocycle condition validator")
    p.add_argument("cocycle")
    p.add_argument("--grid", type=int, default=6)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("transport-path", parents=[common],
                       help="global path transport")
    p.add_argument("cocycle")
    p.add_argument("path")
    p.add_argument("--steps", type=int, default=128)
    p.set_defaults(fn=cmd_transport_path)

    p = sub.add_parser("transport-surface", parents=[common],
                       help="surface transport of a bigon")
    p.add_argument("cocycle")
    p.add_argument("bigon")
    p.add_argument("--cells", type=int, default=64)
    p.add_argument("--method", choices=("ode", "lattice"), default="lattice")
    p.set_defaults(fn=cmd_transport_surface)

    p = sub.add_parser("holonomy", parents=[common],
                       help="surface holonomy and dependence laws")
    p.add_argument("cocycle")
    p.add_argument("surface")
    p.add_argument("--cells", type=int, default=0)
    p.add_argument("--method", choices=("auto", "ode", "lattice"), default="auto")
    p.add_argument("--check", action="append", default=[],
                   choices=("base-point", "loop-change", "contraction", "oracle"))
    p.set_defaults(fn=cmd_holonomy)

    p = sub.add_parser("compare-oracle", parents=[common],
                       help="ODE vs lattice convergence table")
    p.add_argument("cocycle")
    p.add_argument("bigon")
    p.add_argument("--cells-list", default="16,32,64,128")
    p.set_defaults(fn=cmd_compare_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, CoverError, TransportError, SurfaceError, lc.LieError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
