"""Command-line interface.

Exit codes: 0 when every flag passes, 2 when a flag fails, 1 on usage,
input or validation errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import grid as _grid
from . import report as _report
from .duality import (ATTAIN_TOL, DualConfig, check_RA1, duality_report, phi_from_point)
from .equivalence import GAP, EquivConfig, equivalence_check
from .errors import RCDualError
from .functions import GridConjugate, conjugate_closed
from .primal import REFINE_ROUNDS, GridTable, primal_estimate
from .problem import Program, read_program
from .reduction import load_reduction, verify_reduction

log = logging.getLogger("rcdual")

COMMANDS = ("solve", "dual", "reduce", "equivalence", "conjugate", "verify-chain")
LEMMA_SAMPLES = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunConfig:
    grid: int | None = None
    eps_strict: list = field(default_factory=lambda: [0.0, 1e-9])
    seed: int = 0
    tol: float = 1e-4
    budget: int = _grid.DEFAULT_BUDGET

    def resolved_grid(self, n: int) -> int:
        return _grid.default_points_per_axis(n) if self.grid is None else self.grid

    def to_dict(self, n: int) -> dict:
        return {
            "grid": self.resolved_grid(n),
            "eps_strict": list(self.eps_strict),
            "seed": self.seed,
            "tol": self.tol,
            "budget": self.budget,
            "refine_rounds": REFINE_ROUNDS,
            "attain_tol": ATTAIN_TOL,
        }


def _eps_list(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("eps levels must be nonnegative")
    return vals


def _vector(text: str) -> list:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("problem", help="problem file (JSON)")
    common.add_argument("--grid", type=int, default=None, metavar="N", help="grid points per axis")
    common.add_argument("--eps-strict", type=_eps_list, default=[0.0, 1e-9], metavar="v[,v...]",
                        help="strictness thresholds for '>' constraints (default 0,1e-9)")
    common.add_argument("--seed", type=int, default=0, metavar="S")
    common.add_argument("--tol", type=float, default=1e-4, metavar="T",
                        help="tolerance for value agreement checks")
    common.add_argument("--budget", type=int, default=_grid.DEFAULT_BUDGET, metavar="B",
                        help="maximum number of grid points")
    common.add_argument("--report", default=None, metavar="path", help="write the report here")
    common.add_argument("--format", choices=("text", "json"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="rcdual", description="Duality analysis of reverse convex programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="primal estimates")
    sub.add_parser("dual", parents=[common], help="dual value and duality report")
    sub.add_parser("verify-chain", parents=[common], help="full value-chain check suite")
    sub.add_parser("reduce", parents=[common], help="set-constraint reduction and its check")
    sub.add_parser("equivalence", parents=[common], help="strict vs non-strict infimum")
    conj = sub.add_parser("conjugate", parents=[common], help="closed-form vs grid conjugate")
    conj.add_argument("--function", default="objective",
                      help="'objective' or 'h<t>' for constraint t (0-based)")
    conj.add_argument("--y", type=_vector, required=True, metavar="v[,v...]")
    return parser


def _problem_info(name: str, n: int) -> dict:
    return {"name": name, "dimension": n}


def _flag(passed, **detail):
    return {"passed": bool(passed), "detail": detail}


def _load(args, cfg) -> Program:
    p = read_program(args.problem)
    _grid.check_budget(p.n, cfg.resolved_grid(p.n), cfg.budget)
    return p


def cmd_solve(args, cfg):
    p = _load(args, cfg)
    table = GridTable(p.f, p.lower, p.upper, cfg.resolved_grid(p.n), cfg.budget)
    as_posed = {repr(e): primal_estimate(p, eps_strict=e, mode="as_posed", table=table)
                for e in cfg.eps_strict}
    strict = primal_estimate(p, mode="strict", table=table)
    nonstrict = primal_estimate(p, mode="nonstrict", table=table)
    bound = strict.grid_bound + nonstrict.grid_bound
    s, ns = float(strict.value), float(nonstrict.value)
    ok = s >= ns - bound or strict.value == nonstrict.value
    flags = {"strict_ge_nonstrict": _flag(ok, strict=s, nonstrict=ns, bound=bound)}
    results = {
        "as_posed": {k: v.to_dict() for k, v in as_posed.items()},
        "strict": strict.to_dict(),
        "nonstrict": nonstrict.to_dict(),
    }
    notes = []
    if nonstrict.unbounded:
        notes.append("non-strict program appears unbounded below (estimate < -1e12)")
    return p.name, p.n, results, flags, notes


def _dual_common(args, cfg):
    p = _load(args, cfg)
    dc = DualConfig(N=cfg.resolved_grid(p.n), seed=cfg.seed, tol=cfg.tol,
                    eps_levels=tuple(cfg.eps_strict))
    rep = duality_report(p, dc)
    results = rep.to_dict()
    flags = results.pop("chain_flags")
    notes = results.pop("notes")
    return p, rep, results, flags, notes


def cmd_dual(args, cfg):
    p, _, results, flags, notes = _dual_common(args, cfg)
    return p.name, p.n, results, flags, notes


def cmd_verify_chain(args, cfg):
    p, rep, results, flags, notes = _dual_common(args, cfg)
    # constructive half of the feasibility lemma on seeded strictly feasible points
    rng = np.random.default_rng(cfg.seed)
    X = p.lower + (p.upper - p.lower) * rng.random((20 * LEMMA_SAMPLES, p.n))
    X = X[p.feasible_mask(X, "strict") & np.isfinite(p.f.values(X))][:LEMMA_SAMPLES]
    worst, ra1_fail = 0.0, 0
    for x in X:
        phi = phi_from_point(p, x)
        lin = phi.vectors @ x - phi.conj_values
        worst = max(worst, float(np.max(np.abs(lin - p.margins(x[None])[0]))))
        ra1_fail += not check_RA1(p, phi)
    results["lemma_samples"] = int(len(X))
    flags["lemma_sampled_margins"] = _flag(worst <= 1e-9 and len(X) > 0, samples=len(X),
                                           max_abs_error=worst)
    flags["ra1_sampled"] = _flag(ra1_fail == 0 and len(X) > 0, failures=ra1_fail)
    return p.name, p.n, results, flags, notes


def cmd_reduce(args, cfg):
    with open(args.problem, encoding="utf-8") as fh:
        rp = load_reduction(fh.read())
    N = cfg.resolved_grid(rp.f.n)
    _grid.check_budget(rp.f.n, N, cfg.budget)
    rep = verify_reduction(rp.f, rp.T_lin, rp.D, rp.box, N, rp.x_tilde)
    results = rep.to_dict()
    flags, notes = {}, []
    res = rep.result
    if res.verdict == "reduced":
        h = res.program.constraints[0].h
        hx = float(h.values(res.x_tilde[None])[0])
        flags["h_at_x_tilde_is_minus_one"] = _flag(hx == -1.0, value=hx)
        flags["pairwise_agreement"] = _flag(rep.agree, **rep.pairwise)
        rng = np.random.default_rng(cfg.seed)
        X = rp.lower + (rp.upper - rp.lower) * rng.random((10**4, rp.f.n))
        outside = ~rp.D.in_interior(X @ rp.T_lin.T)
        g = h.values(X) + 1.0
        tie = np.abs(g - 1.0) <= 1e-12
        mismatch = int(np.sum((outside != (g >= 1.0)) & ~tie))
        flags["separation_equivalence_sampled"] = _flag(mismatch == 0, samples=10**4,
                                                        mismatches=mismatch)
        notes.append("strict and non-strict reduced infima coincide because h(x~) = -1 < 0 "
                     "supplies a Slater point")
    else:
        notes.append("T x~ is not interior to D: x~ already solves the set-constrained problem")
        tx = rp.T_lin @ res.x_tilde
        flags["x_tilde_outside_int_D"] = _flag(not bool(rp.D.in_interior(tx)[0]),
                                               T_x_tilde=tx.tolist())
    return rp.name, rp.f.n, results, flags, notes


def cmd_equivalence(args, cfg):
    p = _load(args, cfg)
    rep = equivalence_check(p, EquivConfig(N=cfg.resolved_grid(p.n), seed=cfg.seed))
    results = rep.to_dict()
    notes = results.pop("notes")
    failed_hyp = [k for k, v in rep.hypotheses.items() if not v]
    flags = {
        "verdict_soundness": _flag(rep.verdict != GAP or bool(failed_hyp), verdict=rep.verdict,
                                   failed_hypotheses=failed_hyp),
    }
    s, ns = float(rep.inf_strict.value), float(rep.inf_nonstrict.value)
    ok = rep.inf_strict.value == rep.inf_nonstrict.value or s >= ns - rep.bounds
    flags["strict_ge_nonstrict"] = _flag(ok, strict=s, nonstrict=ns, bound=rep.bounds)
    if rep.strictified is not None:
        fx = float(p.f.values(rep.strictified[None])[0])
        fb = float(p.f.values(rep.inf_nonstrict.witness[None])[0])
        flags["strictify"] = _flag(bool(p.feasible_mask(rep.strictified[None], "strict")[0])
                                   and fx <= fb + 1e-6, f_strictified=fx, f_x_bar=fb)
    return p.name, p.n, results, flags, notes


def cmd_conjugate(args, cfg):
    p = _load(args, cfg)
    name = args.function
    if name == "objective":
        g = p.f
    elif name.startswith("h") and name[1:].isdigit() and int(name[1:]) < p.m:
        g = p.constraints[int(name[1:])].h
    else:
        raise UsageError(f"unknown function {name!r}; use 'objective' or h0..h{p.m - 1}")
    y = np.asarray(args.y, dtype=float)
    if y.size != p.n:
        raise UsageError(f"--y needs {p.n} components")
    N = cfg.resolved_grid(p.n)
    gr = GridConjugate(g, p.lower, p.upper, N, cfg.budget)(y)
    results = {"function": name, "kind": g.kind, "y": y.tolist(),
               "grid": {"value": gr.value.to_json(), "exact": gr.exact,
                        "lower_bound_gap": gr.lower_bound_gap}}
    flags, notes = {}, []
    if g.has_closed_conjugate:
        cl = conjugate_closed(g, y)
        results["closed"] = {"value": cl.to_json(), "exact": True, "lower_bound_gap": 0.0}
        c, v = float(cl), float(gr.value)
        flags["grid_le_closed"] = _flag(v <= c + 1e-12, grid=v, closed=c)
        if cl.is_finite:
            flags["closed_within_gap"] = _flag(c - v <= gr.lower_bound_gap, shortfall=c - v,
                                               gap=gr.lower_bound_gap)
        else:
            notes.append("closed-form conjugate is +inf; the grid value is only a lower bound")
    else:
        results["closed"] = None
        notes.append(f"{g.kind} has no closed-form conjugate; grid value reported alone")
    return p.name, p.n, results, flags, notes


HANDLERS = {
    "solve": cmd_solve,
    "dual": cmd_dual,
    "verify-chain": cmd_verify_chain,
    "reduce": cmd_reduce,
    "equivalence": cmd_equivalence,
    "conjugate": cmd_conjugate,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the command, emit the report; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(str(e), file=stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    cfg = RunConfig(args.grid, args.eps_strict, args.seed, args.tol, args.budget)
    try:
        name, n, results, flags, notes = HANDLERS[args.command](args, cfg)
    except UsageError as e:
        print(f"rcdual: error: {e}", file=stderr)
        return 1
    except (OSError, RCDualError, ValueError) as e:
        print(f"rcdual {args.command}: {e}", file=stderr)
        return 1
    rep = _report.envelope(args.command, _problem_info(name, n), cfg.to_dict(n), results,
                           flags, notes)
    text = _report.dumps(rep) if args.format == "json" else _report.render_text(rep)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(_report.dumps(rep))
    stdout.write(text)
    return 0 if rep["all_passed"] else 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
