"""Exact combinatorics of central hyperplane arrangements.

An arrangement is an n x d rational matrix A whose rows are the coefficient
vectors of linear forms l_1, ..., l_n. Everything in this module is computed
in exact rational (or integer) arithmetic: kernel complements, subset ranks,
characteristic polynomials, flats, and region enumeration with interior
witness points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import ratlin
from .errors import BudgetExceeded, ParallelRows, RankDeficient
from .simplex import feasible_point

SUBSET_BUDGET = 24


@dataclass(frozen=True)
class Arrangement:
    """Central arrangement given by rows of exact rational coefficients."""

    A: tuple
    labels: tuple | None = None

    def __post_init__(self):
        rows = ratlin.frac_matrix(self.A)
        object.__setattr__(self, "A", rows)
        if not rows or not rows[0]:
            raise RankDeficient("arrangement needs at least one row and one column")
        for i, row in enumerate(rows):
            if ratlin.is_zero(row):
                raise RankDeficient(f"row {i} of the coefficient matrix is zero")
        if self.labels is not None:
            labels = tuple(str(v) for v in self.labels)
            if len(labels) != len(rows):
                raise RankDeficient("labels must match the number of rows")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def d(self) -> int:
        return len(self.A[0])

    def rank(self) -> int:
        return ratlin.rank(self.A)

    def is_essential(self) -> bool:
        return self.rank() == self.d

    def form_values(self, x):
        """Values (l_1(x), ..., l_n(x)); exact when x is rational."""
        return tuple(ratlin.dot(row, x) for row in self.A)

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return f"l{i + 1}"


@dataclass(frozen=True)
class KernelComplement:
    """(n-d) x n matrix B with B A = 0 and full row rank."""

    B: tuple
    n: int
    d: int


@dataclass(frozen=True)
class SignVector:
    """Element of {+1,-1}^n modulo global negation, first entry fixed to +1."""

    signs: tuple

    @staticmethod
    def canonical(signs):
        signs = tuple(int(s) for s in signs)
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("sign vectors must have entries +-1")
        if signs and signs[0] < 0:
            signs = tuple(-s for s in signs)
        return SignVector(signs)

    @staticmethod
    def from_values(values):
        """Canonical sign vector of a list of nonzero numbers."""
        if any(v == 0 for v in values):
            raise ValueError("cannot take the sign vector of a zero value")
        return SignVector.canonical(tuple(1 if v > 0 else -1 for v in values))

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @staticmethod
    def parse(text: str) -> "SignVector":
        return SignVector.canonical(tuple(1 if ch == "+" else -1 for ch in text))


@dataclass(frozen=True)
class Region:
    """Region of the projective arrangement complement with a rational witness.

    The witness satisfies sign(l_i(witness)) == sign_i exactly and is scaled
    so that its largest absolute coordinate equals 1.
    """

    sign: SignVector
    witness: tuple

    def key(self) -> str:
        return str(self.sign)


@dataclass(frozen=True)
class CharacteristicPolynomial:
    """chi(t) with integer coefficients, stored leading coefficient first."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: int) -> int:
        value = 0
        for c in self.coeffs:
            value = value * t + c
        return value


@dataclass(frozen=True)
class Flat:
    """Closed subset of row indices together with its intersection subspace."""

    subset: frozenset
    rank: int
    basis: tuple

    def sort_key(self):
        return (self.rank, tuple(sorted(self.subset)))


def _require_essential(arr: Arrangement):
    if not arr.is_essential():
        raise RankDeficient(
            f"operation needs rank(A) = d = {arr.d}, got rank {arr.rank()}"
        )


def _parallel_pairs(arr: Arrangement):
    prims = [ratlin.primitive(row) for row in arr.A]
    seen = {}
    pairs = []
    for i, p in enumerate(prims):
        if p in seen:
            pairs.append((seen[p], i))
        else:
            seen[p] = i
    return pairs


def kernel_complement(arr: Arrangement) -> KernelComplement:
    """Deterministic B with B A = 0, rank n - d.

    B is read off the reduced row echelon form of A^T, with rows scaled to
    primitive integer vectors whose first nonzero entry is positive. That
    normalization reproduces the usual textbook bases, e.g. (1, 1, 1, -1)
    for the four-line Steiner arrangement.
    """
    _require_essential(arr)
    basis = ratlin.nullspace(ratlin.transpose(arr.A), ncols=arr.n)
    rows = tuple(tuple(Fraction(v) for v in ratlin.primitive(vec)) for vec in basis)
    return KernelComplement(B=rows, n=arr.n, d=arr.d)


def characteristic_polynomial(arr: Arrangement) -> CharacteristicPolynomial:
    """chi(t) = sum over subsets S of (-1)^|S| t^(d - rank S) (Whitney).

    Subsets are walked depth-first while an integer echelon form of the
    included rows is carried along, so each subset costs one row reduction.
    """
    n, d = arr.n, arr.d
    if n > SUBSET_BUDGET:
        raise BudgetExceeded(f"n = {n} exceeds the 2^n enumeration budget ({SUBSET_BUDGET})")
    rows = ratlin.int_rows(arr.A)
    acc = [0] * (d + 1)

    def walk(i, echelon, sign):
        if i == n:
            acc[echelon.rank] += sign
            return
        walk(i + 1, echelon, sign)
        grown = echelon.copy()
        grown.insert(rows[i])
        walk(i + 1, grown, -sign)

    walk(0, ratlin.IntEchelon(), 1)
    coeffs = [0] * (d + 1)
    for r, value in enumerate(acc):
        coeffs[r] = value  # exponent d - r, descending order
    return CharacteristicPolynomial(coeffs=tuple(coeffs))


def ml_degree(arr: Arrangement) -> int:
    """|chi(-1)| / 2: the number of projective regions, hence of critical points."""
    _require_essential(arr)
    chi = characteristic_polynomial(arr)
    value = abs(chi(-1))
    if value % 2 != 0:
        raise RankDeficient("chi(-1) odd; arrangement cannot be central and essential")
    return value // 2


def generic_ml_degree(d: int, n: int) -> int:
    """Critical-point count for n generic hyperplanes in d unknowns.

    Computed twice: as sum_{i<d} C(n-1, i) and as the z^(d-1) coefficient of
    1 / ((1-z)^(n-d) (1-2z)); the two must agree.
    """
    if not n > d > 1:
        raise RankDeficient(f"need n > d > 1, got (d, n) = ({d}, {n})")
    binomial_sum = sum(comb(n - 1, i) for i in range(d))
    coeff = sum(comb(d - 1 - b + n - d - 1, n - d - 1) * 2**b for b in range(d)) if n > d else 0
    if binomial_sum != coeff:
        raise AssertionError(
            f"binomial sum {binomial_sum} disagrees with generating function {coeff}"
        )
    return binomial_sum


def enumerate_regions(arr: Arrangement) -> list:
    """All regions of the projective complement, as canonical sign vectors.

    Hyperplanes are inserted one at a time. A region survives unsplit when
    the opposite side of the new hyperplane is infeasible for its cone; the
    feasibility questions are exact rational LPs from :mod:`.simplex`, so
    near-degenerate arrangements cannot be misclassified. Regions come back
    sorted by sign string; the count always equals ``ml_degree(arr)``.
    """
    _require_essential(arr)
    pairs = _parallel_pairs(arr)
    if pairs:
        raise ParallelRows(pairs)
    A = arr.A
    first = A[0]
    w0 = ratlin.scale(first, 1 / ratlin.dot(first, first))
    regions = [((1,), w0)]
    for h in range(1, arr.n):
        row = A[h]
        grown = []
        for signs, witness in regions:
            cone = [ratlin.scale(A[i], signs[i]) for i in range(h)]
            value = ratlin.dot(row, witness)
            if value != 0:
                side = 1 if value > 0 else -1
                other = feasible_point(cone + [ratlin.scale(row, -side)])
                grown.append((signs + (side,), witness))
                if other is not None:
                    grown.append((signs + (-side,), other))
            else:
                # Witness sits on the new hyperplane: both sides are cut out.
                for side in (1, -1):
                    point = feasible_point(cone + [ratlin.scale(row, side)])
                    if point is not None:
                        grown.append((signs + (side,), point))
        regions = grown
    result = []
    for signs, witness in regions:
        top = max(abs(v) for v in witness)
        scaled = tuple(v / top for v in witness)
        result.append(Region(sign=SignVector(signs), witness=scaled))
    result.sort(key=Region.key)
    return result


def flats(arr: Arrangement, max_codim: int) -> list:
    """All closure-closed subsets of rank <= max_codim.

    Every rank-r flat is the closure of r independent rows, so it suffices
    to close all subsets of size <= max_codim. The basis field spans the
    intersection of the flat's hyperplanes (all of R^d for the empty flat).
    """
    A = arr.A
    n, d = arr.n, arr.d
    seen = {}
    for size in range(0, max_codim + 1):
        for subset in itertools.combinations(range(n), size):
            sub_rows = [A[i] for i in subset]
            r = ratlin.rank(sub_rows)
            if r != size or r > max_codim:
                continue
            closure = frozenset(
                i for i in range(n) if ratlin.rank(sub_rows + [A[i]]) == r
            )
            if closure in seen:
                continue
            if sub_rows:
                basis = ratlin.nullspace(sub_rows, ncols=d)
            else:
                basis = tuple(
                    tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)
                )
            seen[closure] = Flat(subset=closure, rank=r, basis=basis)
    return sorted(seen.values(), key=Flat.sort_key)


@dataclass(frozen=True)
class SncReport:
    """Per-flat transversality verdicts for the partition-function quadric."""

    verdicts: tuple  # pairs (Flat, bool)

    @property
    def all_pass(self) -> bool:
        return all(ok for _, ok in self.verdicts)


def snc_check(arr: Arrangement) -> SncReport:
    """Check the sum-of-squares quadric against every flat of codim <= d-1.

    For a flat with subspace basis V the quadric restricts to V^T (A^T A) V;
    transversality of the quadric hypersurface with the flat amounts to that
    symmetric matrix being nondegenerate, which we decide by an exact
    determinant. Over the reals this passes for every essential arrangement,
    because the restricted form is positive definite.
    """
    _require_essential(arr)
    gram = ratlin.matmul(ratlin.transpose(arr.A), arr.A)
    verdicts = []
    for flat in flats(arr, arr.d - 1):
        basis = flat.basis
        restricted = [
            [ratlin.dot(u, ratlin.matvec(gram, v)) for v in basis] for u in basis
        ]
        verdicts.append((flat, ratlin.det(restricted) != 0))
    return SncReport(verdicts=tuple(verdicts))


def interior_samples(arr: Arrangement, region: Region, count: int, rng) -> list:
    """Extra exact interior points of a region, for start-independence tests
    and per-region sampling. Steps from the witness stop halfway to the first
    hyperplane crossing, so every sample keeps the region's sign vector.
    """
    samples = []
    witness = region.witness
    signs = region.sign.signs
    attempts = 0
    while len(samples) < count and attempts < 50 * count:
        attempts += 1
        direction = tuple(Fraction(rng.randint(-9, 9)) for _ in range(arr.d))
        if ratlin.is_zero(direction):
            continue
        bound = None
        for i, row in enumerate(arr.A):
            move = signs[i] * ratlin.dot(row, direction)
            if move < 0:
                slack = signs[i] * ratlin.dot(row, witness)
                t = -slack / move
                bound = t if bound is None else min(bound, t)
        step = Fraction(1) if bound is None else bound / 2
        point = ratlin.add(witness, ratlin.scale(direction, step))
        values = arr.form_values(point)
        if any(v == 0 for v in values):
            continue
        if tuple(1 if signs[i] * values[i] > 0 else -1 for i in range(arr.n)) == tuple([1] * arr.n):
            samples.append(point)
    return samples
