"""Degenerate critical points and tropical maximum likelihood.

At a unit data vector e_i every region's critical point degenerates onto a
coordinate subspace: the vanishing coordinates J range over the subsets of
size < d avoiding i, and on each such support the point is cut out by the
kernel constraints in closed form. Tropically, data valuations w with a
strict minimum at i map to critical-point valuations z = sum_{j in J}
(w_j - w_i) e_j. Both facts are checked numerically by tracking each
region's solution along a data curve s(eps) = (eps^w_1, ..., eps^w_n)
and fitting the decay slopes.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlin
from .arrangement import enumerate_regions
from .errors import (
    AnchorNotUnique,
    NoConvergence,
    PathLost,
    RankDeficient,
    ValidationError,
)
from .mle import SolveOptions, solve_region
from .model import SquaredLinearModel

DEFAULT_EPS_GRID = (1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5)


@dataclass(frozen=True)
class DegenerateSolution:
    """Closed-form critical point for data e_anchor with support complement J.

    ``y`` is the primitive integer representative with positive anchor
    coordinate; B y = 0 holds exactly and y_j = 0 exactly on J.
    """

    J: tuple
    y: tuple
    anchor: int
    generic_flag: bool
    error: str | None = None


@dataclass(frozen=True)
class TropicalData:
    """Rational valuation vector w with a strict minimum at ``anchor``."""

    w: tuple
    anchor: int

    def __post_init__(self):
        w = tuple(ratlin.as_fraction(v) for v in self.w)
        object.__setattr__(self, "w", w)
        low = min(w)
        support = [i for i, v in enumerate(w) if v == low]
        if len(support) != 1:
            raise AnchorNotUnique(f"minimum of w attained at positions {support}")
        if support[0] != self.anchor:
            raise AnchorNotUnique(
                f"anchor {self.anchor} is not the strict minimum of w"
            )


@dataclass(frozen=True)
class TropicalPoint:
    """Valuation vector modulo all-ones shifts, canonicalized by z_anchor = 0."""

    z: tuple
    J: tuple


@dataclass(frozen=True)
class ValuationEstimate:
    region: object
    slopes: tuple
    point: TropicalPoint
    residual: float
    y_track: tuple  # anchor-normalized y at each eps, largest eps first

    @property
    def y_limit(self) -> tuple:
        return self.y_track[-1]


def admissible_supports(n: int, anchor: int, d: int):
    """Subsets J of [n] - {anchor} with |J| <= d-1, largest first, lex within."""
    others = [j for j in range(n) if j != anchor]
    out = []
    for size in range(d - 1, -1, -1):
        out.extend(itertools.combinations(others, size))
    return out


def unit_data_solutions(model: SquaredLinearModel, anchor: int) -> list:
    """All degenerate critical points for data s = e_anchor, exactly.

    For each admissible support J the remaining coordinates are the unique
    combination of the kernel rows hitting -b_anchor, computed through the
    Gram matrix of the selected columns. ``generic_flag`` is False on an
    entry when its free coordinates contain an unexpected zero or when it
    collides with another entry, which is exactly the failure of the
    genericity hypothesis for distinct supports.
    """
    arr = model.arr
    n, d = arr.n, arr.d
    if arr.rank() != d:
        raise RankDeficient("degenerate solutions need an essential arrangement")
    if not 0 <= anchor < n:
        raise RankDeficient(f"anchor {anchor} out of range for n = {n}")
    B = model.B.B
    Bcols = ratlin.transpose(B)
    solutions = []
    for J in admissible_supports(n, anchor, d):
        keep = [k for k in range(n) if k != anchor and k not in J]
        BK = ratlin.transpose(tuple(Bcols[k] for k in keep))
        gram = ratlin.matmul(BK, ratlin.transpose(BK))
        rhs = Bcols[anchor]
        u = ratlin.solve(gram, rhs) if gram else None
        if u is None:
            solutions.append(
                DegenerateSolution(
                    J=J, y=(), anchor=anchor, generic_flag=False,
                    error="singular Gram matrix",
                )
            )
            continue
        yK = ratlin.matvec(ratlin.transpose(BK), ratlin.scale(u, Fraction(-1)))
        y = [Fraction(0)] * n
        y[anchor] = Fraction(1)
        for k, value in zip(keep, yK):
            y[k] = value
        assert ratlin.is_zero(ratlin.matvec(B, y)), "kernel constraint violated"
        flag = all(y[k] != 0 for k in keep)
        prim = ratlin.primitive(y)
        if prim[anchor] < 0:
            prim = tuple(-v for v in prim)
        solutions.append(
            DegenerateSolution(J=J, y=prim, anchor=anchor, generic_flag=flag)
        )
    # Collisions between supports break genericity for all involved entries.
    groups = {}
    for idx, sol in enumerate(solutions):
        if sol.y:
            groups.setdefault(sol.y, []).append(idx)
    flagged = list(solutions)
    for idxs in groups.values():
        if len(idxs) > 1:
            for idx in idxs:
                sol = flagged[idx]
                flagged[idx] = DegenerateSolution(
                    J=sol.J, y=sol.y, anchor=sol.anchor, generic_flag=False,
                    error=sol.error or "support collision",
                )
    return flagged


def tropical_predictions(
    model: SquaredLinearModel, trop: TropicalData, check_generic: bool = True
) -> list:
    """The mu predicted valuation vectors z = sum_{j in J} (w_j - w_anchor) e_j.

    The formula is proved for generic kernel pairs only; when the closed-form
    degenerations collide, a warning is attached and the caller should trust
    only supports whose ``generic_flag`` holds.
    """
    n, d = model.n, model.d
    w = trop.w
    anchor = trop.anchor
    if check_generic and not model_is_generic(model, anchor):
        warnings.warn(
            "model is not generic for degenerate data: some predicted "
            "valuations may not be realized",
            stacklevel=2,
        )
    points = []
    for J in admissible_supports(n, anchor, d):
        z = [Fraction(0)] * n
        for j in J:
            z[j] = w[j] - w[anchor]
        points.append(TropicalPoint(z=tuple(z), J=J))
    return points


def model_is_generic(model: SquaredLinearModel, anchor: int = 0) -> bool:
    return all(sol.generic_flag for sol in unit_data_solutions(model, anchor))


def estimate_valuations(
    model: SquaredLinearModel,
    trop: TropicalData,
    eps_grid=DEFAULT_EPS_GRID,
    opts: SolveOptions | None = None,
) -> list:
    """Estimate critical-point valuations by tracking solutions in eps.

    For each region, the critical point of s(eps) = (eps^w_1, ..., eps^w_n)
    is solved with warm starts down the decreasing eps grid. The slope of
    log|y_j| against log eps (least squares over the whole grid, which
    suppresses next-order series terms) estimates the valuation of each
    coordinate; slopes are rounded to the only values the theory allows,
    namely 0 or w_j - w_anchor, and the largest pre-rounding deviation is
    reported as the residual.
    """
    eps_grid = tuple(float(e) for e in eps_grid)
    if len(eps_grid) < 3:
        raise ValidationError("need at least three eps values for a slope fit")
    if any(e <= 0 for e in eps_grid) or any(
        a <= b for a, b in zip(eps_grid, eps_grid[1:])
    ):
        raise ValidationError("eps grid must be positive and strictly decreasing")
    spread = float(max(trop.w) - trop.w[trop.anchor])
    if eps_grid[-1] ** spread < 1e-14:
        raise ValidationError(
            "grid too deep for double precision: the smallest coordinate "
            f"would reach {eps_grid[-1] ** spread:.1e}; raise the last eps or "
            "shrink the valuation range"
        )
    w = np.array([float(v) for v in trop.w])
    anchor = trop.anchor
    regions = enumerate_regions(model.arr)
    opts = opts or SolveOptions(adaptive_floor=True)

    tracks = {str(r.sign): [] for r in regions}
    starts = {str(r.sign): None for r in regions}
    for eps in eps_grid:
        s = eps**w
        for region in regions:
            key = str(region.sign)
            try:
                point = solve_region(model, s, region, opts, start=starts[key])
            except NoConvergence as err:
                raise PathLost(
                    f"tracking lost region {key} at eps = {eps:g}: {err}"
                ) from err
            if point.region.signs != region.sign.signs:
                raise PathLost(f"region {key} jumped at eps = {eps:g}")
            starts[key] = point.x
            tracks[key].append(point.y / point.y[anchor])

    log_eps = np.log(np.array(eps_grid))
    estimates = []
    for region in regions:
        ys = np.array(tracks[str(region.sign)])
        slopes = []
        for j in range(model.n):
            if j == anchor:
                slopes.append(0.0)
                continue
            logs = np.log(np.abs(ys[:, j]))
            slope = np.polyfit(log_eps, logs, 1)[0]
            slopes.append(float(slope))
        z = []
        residual = 0.0
        for j, slope in enumerate(slopes):
            targets = {Fraction(0), trop.w[j] - trop.w[anchor]}
            best = min(targets, key=lambda t: abs(slope - float(t)))
            residual = max(residual, abs(slope - float(best)))
            z.append(best)
        J = tuple(j for j, v in enumerate(z) if v != 0)
        estimates.append(
            ValuationEstimate(
                region=region,
                slopes=tuple(slopes),
                point=TropicalPoint(z=tuple(z), J=J),
                residual=residual,
                y_track=tuple(tuple(float(v) for v in row) for row in ys),
            )
        )
    return estimates


def match_supports(estimates, solutions) -> dict:
    """Map each tracked region to the degenerate solution with its support.

    Returns {region sign string -> DegenerateSolution}; raises PathLost if a
    tracked support has no closed-form counterpart (non-bijective matching).
    """
    by_support = {tuple(sol.J): sol for sol in solutions}
    matched = {}
    used = set()
    for est in estimates:
        key = est.point.J
        if key not in by_support or key in used:
            raise PathLost(f"tracked support {key} is not matched bijectively")
        used.add(key)
        matched[str(est.region.sign)] = by_support[key]
    return matched


def limit_distance(estimate: ValuationEstimate, solution: DegenerateSolution) -> float:
    """Distance between the tracked limit and the closed-form point,
    both scaled to anchor coordinate one."""
    y_exact = np.array([float(v) for v in solution.y])
    y_exact = y_exact / y_exact[solution.anchor]
    y_num = np.array(estimate.y_limit)
    return float(np.max(np.abs(y_exact - y_num)))
