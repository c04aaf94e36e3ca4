"""Command line front end.

One JSON input file per job; results go to --output (or stdout) as JSON
with a "schema": "slm/1" tag, figures as SVG. Exit codes: 0 success,
2 validation problem (bad input, violated precondition), 3 numeric failure
(no convergence, lost path). Errors are reported as JSON on stderr.

State indices (anchor, subsets J, DPP states) are 1-based on the command
line and in emitted JSON, matching the labeling of the input rows.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import jsonio
from .arrangement import characteristic_polynomial, enumerate_regions, ml_degree
from .degeneration import (
    DEFAULT_EPS_GRID,
    TropicalData,
    estimate_valuations,
    tropical_predictions,
    unit_data_solutions,
)
from .dpp import dpp_ml_degree_l2, dpp_probabilities, linear_projection_arrangement
from .errors import NumericError, SqlinearError, ValidationError
from .geometry import (
    chamber_arrangement,
    dual_polytope,
    lognormal_polytope,
    log_voronoi_scan,
    swap_candidates,
)
from .jsonio import SCHEMA
from .mle import SolveOptions, solve_all, _thread_cap
from .model import (
    minor_space_dimension,
    singular_subspaces,
    veronese_generators,
)
from .plotting import Overlays, plot_arrangement

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqlinear",
        description="Likelihood geometry of squared linear statistical models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "regions": "enumerate regions with witnesses",
        "charpoly": "characteristic polynomial of the arrangement",
        "mldegree": "ML degree and characteristic polynomial",
        "mle": "critical points and the MLE for the data in the input",
        "degenerate": "closed-form critical points at a unit data vector",
        "tropical": "tropical predictions and path-tracked valuations",
        "lognormal": "log-normal polytope and its dual at the input point",
        "chamber": "chamber arrangement of the model",
        "voronoi": "log-Voronoi membership scan along a data segment",
        "dpp": "linear projection DPP: arrangement and ML degree",
        "ideal": "implicit generators (linear forms and quadric matrix)",
        "singular": "singular subspaces of the model",
        "plot": "SVG figure of the arrangement with overlays",
    }
    for name, help_text in commands.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--input", required=True, help="path to the JSON input")
        cmd.add_argument("--output", help="output path (default: stdout)")
        cmd.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
        cmd.add_argument("--seed", type=int, default=0, help="seed for sampled work")
        cmd.add_argument("--anchor", type=int, help="1-based anchor state index")
        cmd.add_argument(
            "--eps-grid", help="comma-separated decreasing eps values for tracking"
        )
        cmd.add_argument("--samples", type=int, default=20, help="sample count")
        cmd.add_argument("--svg", help="also write an SVG figure to this path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _load_input(args.input)
        handler = _HANDLERS[args.command]
        result = handler(doc, args)
    except ValidationError as err:
        _emit_error("validation", err)
        return EXIT_VALIDATION
    except NumericError as err:
        _emit_error("numeric", err)
        return EXIT_NUMERIC
    except SqlinearError as err:
        _emit_error("error", err)
        return EXIT_VALIDATION
    if isinstance(result, str):
        _write(args.output, result)
    else:
        result["schema"] = SCHEMA
        _write(args.output, jsonio.dumps(result))
    return EXIT_OK


def _load_input(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as err:
        raise ValidationError(f"cannot read input: {err}") from err
    except json.JSONDecodeError as err:
        raise ValidationError(f"input is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise ValidationError("input must be a JSON object")
    return doc


def _write(path, text: str):
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_error(kind: str, err: Exception):
    payload = {
        "schema": SCHEMA,
        "error": {"kind": kind, "type": type(err).__name__, "message": str(err)},
    }
    sys.stderr.write(json.dumps(payload) + "\n")


def _need(doc, key):
    if key not in doc:
        raise ValidationError(f"this command needs key {key!r} in the input")
    return doc[key]


def _anchor_index(args, n) -> int:
    if args.anchor is None:
        raise ValidationError("this command needs --anchor (1-based state index)")
    if not 1 <= args.anchor <= n:
        raise ValidationError(f"--anchor must be in 1..{n}")
    return args.anchor - 1


def _eps_grid(args):
    if not args.eps_grid:
        return DEFAULT_EPS_GRID
    try:
        values = tuple(float(v) for v in args.eps_grid.split(","))
    except ValueError as err:
        raise ValidationError(f"bad --eps-grid: {err}") from err
    return values


def _solve_options(args) -> SolveOptions:
    if args.tol <= 0:
        raise ValidationError("--tol must be positive")
    return SolveOptions(tol=args.tol)


def _cmd_regions(doc, args):
    arr = jsonio.arrangement_from_json(doc)
    regions = enumerate_regions(arr)
    out = {
        "regions": [
            {"sign": str(r.sign), "witness": jsonio.rationals_to_json(r.witness)}
            for r in regions
        ],
        "count": len(regions),
    }
    if args.svg:
        model = jsonio.model_from_json(doc)
        overlays = Overlays(region_labels=[(r.witness, str(r.sign)) for r in regions])
        _write(args.svg, plot_arrangement(model, overlays))
    return out


def _cmd_charpoly(doc, args):
    arr = jsonio.arrangement_from_json(doc)
    chi = characteristic_polynomial(arr)
    return {"char_poly": list(chi.coeffs)}


def _cmd_mldegree(doc, args):
    arr = jsonio.arrangement_from_json(doc)
    chi = characteristic_polynomial(arr)
    return {"ml_degree": ml_degree(arr), "char_poly": list(chi.coeffs)}


def _cmd_mle(doc, args):
    model = jsonio.model_from_json(doc)
    s = [float(v) for v in jsonio.parse_vector(_need(doc, "s"), "s")]
    result = solve_all(model, s, _solve_options(args), max_workers=_thread_cap())
    if result.failures:
        tags = ", ".join(str(region.sign) for region, _ in result.failures)
        raise NumericError(f"regions failed to converge: {tags}")
    out = {
        "critical_points": [jsonio.critical_point_to_json(p) for p in result.points],
        "mle_index": result.mle_index,
        "ml_degree": len(result.points),
    }
    if args.svg:
        overlays = Overlays(critical_points=[p.x for p in result.points])
        _write(args.svg, plot_arrangement(model, overlays))
    return out


def _cmd_degenerate(doc, args):
    model = jsonio.model_from_json(doc)
    anchor = _anchor_index(args, model.n)
    solutions = unit_data_solutions(model, anchor)
    return {
        "anchor": anchor + 1,
        "solutions": [
            {
                "J": [j + 1 for j in sol.J],
                "y": jsonio.rationals_to_json(sol.y) if sol.y else None,
                "generic": sol.generic_flag,
                **({"error": sol.error} if sol.error else {}),
            }
            for sol in solutions
        ],
    }


def _cmd_tropical(doc, args):
    model = jsonio.model_from_json(doc)
    w = jsonio.parse_vector(_need(doc, "w"), "w")
    anchor = _anchor_index(args, model.n)
    trop = TropicalData(w=w, anchor=anchor)
    predictions = tropical_predictions(model, trop, check_generic=False)
    estimates = estimate_valuations(model, trop, eps_grid=_eps_grid(args))
    out = {
        "w": jsonio.rationals_to_json(w),
        "anchor": anchor + 1,
        "predictions": [
            {"J": [j + 1 for j in p.J], "z": jsonio.rationals_to_json(p.z)}
            for p in predictions
        ],
        "estimates": [
            {
                "region": str(e.region.sign),
                "z_hat": jsonio.rationals_to_json(e.point.z),
                "slopes": [float(v) for v in e.slopes],
                "residual": float(e.residual),
            }
            for e in estimates
        ],
    }
    if args.svg:
        _write(args.svg, _tropical_figure(model, trop, estimates))
    return out


def _tropical_figure(model, trop, estimates):
    solutions = unit_data_solutions(model, trop.anchor)
    return plot_arrangement(
        model, _plot_overlays_from_tracking(model, estimates, solutions)
    )


def _cmd_lognormal(doc, args):
    model = jsonio.model_from_json(doc)
    y = jsonio.parse_vector(_need(doc, "y"), "y")
    poly = lognormal_polytope(model, y)
    dual = dual_polytope(model, y)
    swaps = swap_candidates(model, y)
    return {
        "y": jsonio.rationals_to_json(y),
        "polytope": jsonio.polytope_to_json(poly),
        "dual_f_vector": list(dual.f_vector),
        "swap_candidates": [
            {
                "i": c.i + 1,
                "j": c.j + 1,
                "sigma": "".join("+" if v > 0 else "-" for v in c.sigma),
                "image": jsonio.rationals_to_json(c.image),
            }
            for c in swaps
        ],
    }


def _cmd_chamber(doc, args):
    model = jsonio.model_from_json(doc)
    chamber = chamber_arrangement(model)
    return {
        "count": chamber.arrangement.n,
        "forms": jsonio.matrix_to_json(chamber.arrangement.A),
        "labels": list(chamber.arrangement.labels),
        "duplicates": [
            {"kept": kept, "dropped": list(dropped)}
            for kept, dropped in chamber.duplicates
        ],
    }


def _cmd_voronoi(doc, args):
    model = jsonio.model_from_json(doc)
    y = jsonio.parse_vector(_need(doc, "y"), "y")
    segment = _need(doc, "segment")
    if not isinstance(segment, dict) or "start" not in segment or "end" not in segment:
        raise ValidationError("segment must be an object with 'start' and 'end'")
    start = jsonio.parse_vector(segment["start"], "segment.start")
    end = jsonio.parse_vector(segment["end"], "segment.end")
    profile = log_voronoi_scan(
        model, y, start, end, steps=args.samples, opts=_solve_options(args)
    )
    return {
        "profile": [
            {"t": float(t), "region": tag}
            for t, tag in zip(profile.parameters, profile.tags)
        ],
        "crossings": [
            {"t": float(t), "from": before, "to": after}
            for t, before, after in profile.crossings
        ],
    }


def _cmd_dpp(doc, args):
    dpp = jsonio.dpp_from_json(doc)
    disc = linear_projection_arrangement(dpp)
    out = {
        "states": [[i + 1 for i in sigma] for sigma in disc.states],
        "hyperplanes": jsonio.matrix_to_json(disc.arrangement.A),
        "ml_degree": ml_degree(disc.arrangement),
    }
    if dpp.n - dpp.k == 2:
        out["ml_degree_formula"] = dpp_ml_degree_l2(dpp.n)
    if "Theta" in doc:
        Theta = [[float(v) for v in row] for row in jsonio.parse_matrix(doc["Theta"], "Theta")]
        dist = dpp_probabilities(np.array(Theta))
        out["distribution"] = [
            {"sigma": [i + 1 for i in sigma], "prob": float(p)}
            for sigma, p in zip(dist.states, dist.probs)
        ]
    return out


def _cmd_ideal(doc, args):
    model = jsonio.model_from_json(doc)
    gens = veronese_generators(model)
    return {
        "n_linear_forms": len(gens.linear_forms),
        "linear_forms": [jsonio.rationals_to_json(f) for f in gens.linear_forms],
        "R": [
            [jsonio.rationals_to_json(entry) for entry in row]
            for row in gens.R
        ],
        "monomials": [[i + 1, j + 1] for i, j in gens.monomials],
        "minor_space_dim": minor_space_dimension(model.d),
    }


def _cmd_singular(doc, args):
    model = jsonio.model_from_json(doc)
    subspaces = singular_subspaces(model)
    return {
        "count": len(subspaces),
        "subspaces": [
            {
                "I": [i + 1 for i in sorted(sub.I)],
                "J": [j + 1 for j in sorted(sub.J)],
                "projective_dimension": sub.projective_dimension,
                "basis": [jsonio.rationals_to_json(v) for v in sub.basis],
            }
            for sub in subspaces
        ],
    }


def _cmd_plot(doc, args):
    model = jsonio.model_from_json(doc)
    overlays = Overlays()
    if "w" in doc and args.anchor is not None:
        trop = TropicalData(
            w=jsonio.parse_vector(doc["w"], "w"), anchor=_anchor_index(args, model.n)
        )
        estimates = estimate_valuations(model, trop, eps_grid=_eps_grid(args))
        solutions = unit_data_solutions(model, trop.anchor)
        overlays = _plot_overlays_from_tracking(model, estimates, solutions)
    if "s" in doc:
        s = [float(v) for v in jsonio.parse_vector(doc["s"], "s")]
        result = solve_all(model, s, _solve_options(args))
        overlays.critical_points = [p.x for p in result.points]
    if "y" in doc and model.n == 3:
        overlays.lognormal = lognormal_polytope(
            model, jsonio.parse_vector(doc["y"], "y")
        )
    return plot_arrangement(model, overlays)


def _plot_overlays_from_tracking(model, estimates, solutions):
    from . import ratlin

    gram = ratlin.matmul(ratlin.transpose(model.arr.A), model.arr.A)

    def param_of(yvec):
        rhs = ratlin.matvec(
            ratlin.transpose(model.arr.A), tuple(ratlin.as_fraction(v) for v in yvec)
        )
        x = ratlin.solve(gram, rhs)
        return None if x is None else [float(v) for v in x]

    limits = []
    for sol in solutions:
        if sol.y:
            x = param_of(sol.y)
            if x is not None:
                limits.append(x)
    arcs = []
    for est in estimates:
        arc = [[float(v) for v in est.region.witness]]
        for yvec in est.y_track:
            x = param_of(yvec)
            if x is not None:
                arc.append(x)
        arcs.append(arc)
    return Overlays(arcs=arcs, limit_points=limits)


_HANDLERS = {
    "regions": _cmd_regions,
    "charpoly": _cmd_charpoly,
    "mldegree": _cmd_mldegree,
    "mle": _cmd_mle,
    "degenerate": _cmd_degenerate,
    "tropical": _cmd_tropical,
    "lognormal": _cmd_lognormal,
    "chamber": _cmd_chamber,
    "voronoi": _cmd_voronoi,
    "dpp": _cmd_dpp,
    "ideal": _cmd_ideal,
    "singular": _cmd_singular,
    "plot": _cmd_plot,
}


if __name__ == "__main__":
    sys.exit(main())
