"""Log-normal polytopes, their polar-dual combinatorics, and log-Voronoi scans.

For a model point with square-root coordinates y (no zeros, B y = 0), the
data vectors for which y is critical form the log-normal polytope: the part
of the probability simplex inside the row span of [y^2; B diag(y)]. Its
combinatorics is polar-dual to the convex hull of the columns of
B diag(y)^(-1), and stays constant while y moves inside a region of the
chamber arrangement (the original hyperplanes plus one determinantal
hyperplane per column subset of size n-d+1).

All polytopes here are desk-scale, so vertices come from brute-force ray
enumeration and facets from subset enumeration, exactly over the rationals
whenever y is rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlin
from .arrangement import Arrangement, SignVector, enumerate_regions, interior_samples
from .errors import (
    DegenerateMinor,
    EmptyPolytope,
    RankDeficient,
    ValidationError,
    ZeroCoordinate,
)
from .mle import SolveOptions, solve_all
from .model import SquaredLinearModel


@dataclass(frozen=True)
class Polytope:
    """Paired V/H description with the face-count vector.

    ``H_rep`` holds (normal, offset) pairs meaning normal . x >= offset;
    ``incidence[k]`` is the frozenset of vertex indices on facet k.
    ``f_vector[i]`` counts faces of dimension i for i = 0 .. dim-1.
    """

    ambient_dim: int
    dim: int
    V_rep: tuple
    H_rep: tuple
    f_vector: tuple
    incidence: tuple

    @property
    def n_vertices(self) -> int:
        return len(self.V_rep)

    def vertex_facet_degrees(self):
        """Sorted multiset: how many facets each vertex lies on."""
        degrees = [0] * len(self.V_rep)
        for facet in self.incidence:
            for v in facet:
                degrees[v] += 1
        return tuple(sorted(degrees))

    def signature(self):
        """Combinatorial-type fingerprint: (f-vector, facet-degree multiset)."""
        return (self.f_vector, self.vertex_facet_degrees())

    def is_simple(self) -> bool:
        codim = self.dim
        return all(deg == codim for deg in self.vertex_facet_degrees())


@dataclass(frozen=True)
class ChamberHyperplane:
    subset: tuple
    normal: tuple


@dataclass(frozen=True)
class ChamberArrangement:
    arrangement: Arrangement
    originals: tuple
    extras: tuple  # ChamberHyperplane records before deduplication
    duplicates: tuple  # groups of labels that collapsed to one hyperplane


@dataclass(frozen=True)
class SwapCandidate:
    i: int
    j: int
    sigma: tuple
    image: tuple


@dataclass(frozen=True)
class VoronoiProfile:
    parameters: tuple
    tags: tuple
    crossings: tuple  # (t_refined, tag_before, tag_after)


def _affine_rank(points) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [ratlin.sub(p, base) for p in points[1:]]
    return ratlin.rank(diffs)


def _face_lattice(num_vertices, facet_sets):
    """All proper nonempty faces as vertex sets, closed under intersection."""
    faces = set(facet_sets)
    frontier = list(facet_sets)
    while frontier:
        face = frontier.pop()
        for facet in facet_sets:
            meet = face & facet
            if meet and meet != face and meet not in faces:
                faces.add(meet)
                frontier.append(meet)
    return faces


def _f_vector(vertices, facet_sets, dim):
    faces = _face_lattice(len(vertices), facet_sets)
    counts = [0] * dim
    for face in faces:
        fdim = _affine_rank([vertices[i] for i in sorted(face)])
        if fdim < dim:
            counts[fdim] += 1
    return tuple(counts)


def _check_kernel_point(model: SquaredLinearModel, y, slack: float = 1e-9):
    """Validate y in ker(B) with no zero coordinate, exactly.

    Floating input (e.g. from a numeric solve) is rationalized and then
    projected exactly onto the kernel, provided its residual is below the
    slack; the polytope combinatorics is locally constant, so the tiny
    exact move is harmless and keeps a single exact code path.
    """
    y = tuple(ratlin.as_fraction(v) for v in y)
    if len(y) != model.n:
        raise ValidationError(f"y must have length n = {model.n}")
    B = model.B.B
    residual = ratlin.matvec(B, y)
    if not ratlin.is_zero(residual):
        scale = max(abs(float(v)) for v in y)
        if max(abs(float(v)) for v in residual) > slack * max(scale, 1.0):
            raise ValidationError("y is not in the kernel of B")
        gram = ratlin.matmul(B, ratlin.transpose(B))
        u = ratlin.solve(gram, residual)
        y = ratlin.sub(y, ratlin.matvec(ratlin.transpose(B), u))
    if any(v == 0 for v in y):
        raise ZeroCoordinate("model point has a zero coordinate")
    return y


def lognormal_polytope(model: SquaredLinearModel, y) -> Polytope:
    """Data polytope of the model point with square roots y.

    Realized through the cone {z : z^T Btilde >= 0} with Btilde = [1; B Y^-1]:
    extreme rays are enumerated over column subsets of size n-d, mapped to
    data space by s = z^T [y^2; B Y], and normalized to unit coordinate sum.
    Facets are the simplex facets s_i >= 0 that cut the affine hull properly.
    """
    y = _check_kernel_point(model, y)
    n, d = model.n, model.d
    B = model.B.B
    btilde = [tuple(Fraction(1) for _ in range(n))]
    for row in B:
        btilde.append(tuple(v / yi for v, yi in zip(row, y)))
    btilde_cols = ratlin.transpose(btilde)
    wmat = [tuple(v * v for v in y)]
    for row in B:
        wmat.append(tuple(v * yi for v, yi in zip(row, y)))

    rays = set()
    for subset in itertools.combinations(range(n), n - d):
        cols = [btilde_cols[c] for c in subset]
        kernel = ratlin.nullspace(cols, ncols=n - d + 1)
        if len(kernel) != 1:
            continue
        ray = kernel[0]
        values = ratlin.matvec(btilde_cols, ray)
        if all(v >= 0 for v in values):
            rays.add(ratlin.primitive(ray))
        elif all(v <= 0 for v in values):
            rays.add(ratlin.primitive(ratlin.scale(ray, Fraction(-1))))
    if not rays:
        raise EmptyPolytope("no ray of the data cone survives the sign test")

    vertices = set()
    for ray in sorted(rays):
        s = ratlin.matvec(ratlin.transpose(wmat), ray)
        total = sum(s)
        if total == 0:
            continue
        vertices.add(tuple(v / total for v in s))
    vertices = sorted(vertices)
    dim = _affine_rank(vertices)

    h_rep = []
    incidence = []
    for i in range(n):
        on_i = frozenset(k for k, v in enumerate(vertices) if v[i] == 0)
        if on_i and _affine_rank([vertices[k] for k in sorted(on_i)]) == dim - 1:
            normal = tuple(Fraction(int(j == i)) for j in range(n))
            h_rep.append((normal, Fraction(0)))
            incidence.append(on_i)
    f_vec = _f_vector(vertices, incidence, dim)
    return Polytope(
        ambient_dim=n,
        dim=dim,
        V_rep=tuple(vertices),
        H_rep=tuple(h_rep),
        f_vector=f_vec,
        incidence=tuple(incidence),
    )


def polytope_from_points(points, ambient_dim=None) -> Polytope:
    """Convex hull combinatorics of a rational point configuration.

    Facets come from enumerating supporting hyperplanes through point
    subsets; faces and the f-vector follow from facet incidences. Points
    inside the hull simply never appear in a zero-dimensional face.
    """
    points = [tuple(ratlin.as_fraction(v) for v in p) for p in points]
    if ambient_dim is None:
        ambient_dim = len(points[0])
    dim = _affine_rank(points)
    base = points[0]
    if dim < ambient_dim:
        # Work in coordinates on the affine hull.
        diffs = [ratlin.sub(p, base) for p in points[1:]]
        echelon, pivots = ratlin.rref(diffs)
        frame = [echelon[r] for r in range(dim)]
        gram = [[ratlin.dot(u, v) for v in frame] for u in frame]
        coords = []
        for p in points:
            rhs = [ratlin.dot(ratlin.sub(p, base), u) for u in frame]
            coords.append(ratlin.solve(gram, rhs))
        work = coords
    else:
        work = points

    facet_sets = {}
    for subset in itertools.combinations(range(len(work)), dim):
        chosen = [work[k] for k in subset]
        if _affine_rank(chosen) != dim - 1:
            continue
        rows = [ratlin.sub(p, chosen[0]) for p in chosen[1:]]
        kernel = ratlin.nullspace(rows, ncols=dim) if rows else ratlin.nullspace([], ncols=dim)
        if len(kernel) != 1:
            continue
        normal = kernel[0]
        offset = ratlin.dot(normal, chosen[0])
        values = [ratlin.dot(normal, p) - offset for p in work]
        if all(v >= 0 for v in values):
            pass
        elif all(v <= 0 for v in values):
            normal = ratlin.scale(normal, Fraction(-1))
            offset = -offset
            values = [-v for v in values]
        else:
            continue
        members = frozenset(k for k, v in enumerate(values) if v == 0)
        facet_sets[members] = (normal, offset)

    incidence = sorted(facet_sets, key=sorted)
    f_vec = _f_vector(work, incidence, dim)
    vertex_set = set()
    faces = _face_lattice(len(work), set(incidence))
    for face in faces:
        if _affine_rank([work[k] for k in sorted(face)]) == 0:
            vertex_set.update(face)
    h_rep = tuple(facet_sets[m] for m in incidence)
    return Polytope(
        ambient_dim=ambient_dim,
        dim=dim,
        V_rep=tuple(points[k] for k in sorted(vertex_set)),
        H_rep=h_rep,
        f_vector=f_vec,
        incidence=tuple(incidence),
    )


def dual_polytope(model: SquaredLinearModel, y) -> Polytope:
    """Convex hull Q of the columns of B diag(y)^(-1).

    Its reversed f-vector equals the f-vector of the log-normal polytope at
    the same point, and for y off the chamber arrangement Q is simplicial.
    """
    y = _check_kernel_point(model, y)
    cols = ratlin.transpose(model.B.B)
    points = [ratlin.scale(cols[i], 1 / y[i]) for i in range(model.n)]
    return polytope_from_points(points, ambient_dim=model.n - model.d)


def chamber_forms(model: SquaredLinearModel):
    """The determinantal linear forms (in x) indexed by (n-d+1)-subsets."""
    arr = model.arr
    n, d = arr.n, arr.d
    Bcols = ratlin.transpose(model.B.B)
    extras = []
    for subset in itertools.combinations(range(n), n - d + 1):
        normal = [Fraction(0)] * d
        for t, j in enumerate(subset):
            rest = [Bcols[k] for k in subset if k != j]
            minor = ratlin.det(ratlin.transpose(rest)) if rest else Fraction(1)
            sign = -1 if t % 2 else 1
            coeff = sign * minor
            if coeff != 0:
                for c in range(d):
                    normal[c] += coeff * arr.A[j][c]
        if all(v == 0 for v in normal):
            raise DegenerateMinor(
                f"chamber determinant for subset {subset} vanishes identically"
            )
        extras.append(ChamberHyperplane(subset=subset, normal=tuple(normal)))
    return extras


def chamber_arrangement(model: SquaredLinearModel) -> ChamberArrangement:
    """Original hyperplanes plus the chamber walls, deduplicated with a report."""
    arr = model.arr
    extras = chamber_forms(model)
    rows = []
    labels = []
    seen = {}
    duplicates = {}
    for i, row in enumerate(arr.A):
        prim = ratlin.primitive(row)
        seen[prim] = arr.label(i)
        rows.append(tuple(Fraction(v) for v in prim))
        labels.append(arr.label(i))
    for extra in extras:
        prim = ratlin.primitive(extra.normal)
        label = "ch{" + ",".join(str(j + 1) for j in extra.subset) + "}"
        if prim in seen:
            duplicates.setdefault(seen[prim], []).append(label)
            continue
        seen[prim] = label
        rows.append(tuple(Fraction(v) for v in prim))
        labels.append(label)
    deduped = Arrangement(A=tuple(rows), labels=tuple(labels))
    dup_report = tuple(
        (kept, tuple(dropped)) for kept, dropped in sorted(duplicates.items())
    )
    return ChamberArrangement(
        arrangement=deduped,
        originals=arr.A,
        extras=tuple(extras),
        duplicates=dup_report,
    )


def swap_candidates(model: SquaredLinearModel, y) -> list:
    """Coordinate swaps-with-signs taking y to another kernel point.

    A candidate certifies that the swapped-and-signed vector squares into
    the model; only sign vectors different from y's are reported, since
    those are the ones that can bound the log-Voronoi cell linearly.
    """
    y = _check_kernel_point(model, y)
    n = model.n
    B = model.B.B
    base_sign = SignVector.from_values(y)
    out = []
    for i, j in itertools.combinations(range(n), 2):
        swapped = list(y)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        for bits in itertools.product((1, -1), repeat=n - 1):
            sigma = (1,) + bits
            image = tuple(s * v for s, v in zip(sigma, swapped))
            if not ratlin.is_zero(ratlin.matvec(B, image)):
                continue
            if SignVector.from_values(image).signs == base_sign.signs:
                continue
            out.append(SwapCandidate(i=i, j=j, sigma=sigma, image=image))
    return out


def combinatorial_type_scan(model: SquaredLinearModel, samples_per_region: int = 3, seed: int = 0):
    """Signature of the log-normal polytope across chamber regions.

    For every region of the chamber arrangement, the polytope is evaluated
    at several exact interior points; the signature must not change inside a
    region. Returns {region sign string: signature}.
    """
    import random

    if model.d not in (2, 3):
        raise RankDeficient("chamber-region scan is desk-scale: d must be 2 or 3")
    chamber = chamber_arrangement(model)
    regions = enumerate_regions(chamber.arrangement)
    rng = random.Random(seed)
    report = {}
    for region in regions:
        points = [region.witness]
        points.extend(
            interior_samples(chamber.arrangement, region, samples_per_region - 1, rng)
        )
        signatures = set()
        for x in points:
            yvec = model.arr.form_values(x)
            signatures.add(lognormal_polytope(model, yvec).signature())
        if len(signatures) != 1:
            raise AssertionError(
                f"signature not constant on chamber region {region.key()}"
            )
        report[region.key()] = signatures.pop()
    return report


def log_voronoi_scan(
    model: SquaredLinearModel,
    y,
    start,
    end,
    steps: int = 20,
    refine_tol: float = 1e-4,
    opts: SolveOptions | None = None,
) -> VoronoiProfile:
    """Which region owns the MLE along a data segment inside the polytope.

    The segment from ``start`` to ``end`` (both strictly positive points of
    the log-normal polytope of y) is sampled at steps+1 parameters; at each
    data point the global maximizer's region tag is recorded, and each tag
    switch is localized by bisection down to ``refine_tol`` in the segment
    parameter. Log-Voronoi boundaries are generally not algebraic, so
    sampling plus bisection is the honest tool here.
    """
    y = _check_kernel_point(model, y)
    start = tuple(ratlin.as_fraction(v) for v in start)
    end = tuple(ratlin.as_fraction(v) for v in end)
    for point, name in ((start, "start"), (end, "end")):
        if any(v <= 0 for v in point):
            raise ValidationError(f"{name} point must be strictly positive")
        if not _in_row_span(model, y, point):
            raise ValidationError(f"{name} point is outside the log-normal span")
    regions = enumerate_regions(model.arr)
    opts = opts or SolveOptions()

    def tag_at(t: float) -> str:
        s = np.array([float(a) + t * (float(b) - float(a)) for a, b in zip(start, end)])
        result = solve_all(model, s, opts, regions=regions)
        return str(result.mle.region)

    params = [k / steps for k in range(steps + 1)]
    tags = [tag_at(t) for t in params]
    crossings = []
    for k in range(steps):
        if tags[k] != tags[k + 1]:
            lo, hi = params[k], params[k + 1]
            tag_lo = tags[k]
            while hi - lo > refine_tol:
                mid = (lo + hi) / 2
                if tag_at(mid) == tag_lo:
                    lo = mid
                else:
                    hi = mid
            crossings.append(((lo + hi) / 2, tags[k], tags[k + 1]))
    return VoronoiProfile(
        parameters=tuple(params), tags=tuple(tags), crossings=tuple(crossings)
    )


def _in_row_span(model: SquaredLinearModel, y, s) -> bool:
    wmat = [tuple(v * v for v in y)]
    for row in model.B.B:
        wmat.append(tuple(v * yi for v, yi in zip(row, y)))
    return ratlin.rank(list(wmat) + [tuple(s)]) == ratlin.rank(wmat)
