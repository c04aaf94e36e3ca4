"""The squared linear model: evaluation, likelihood, implicit generators.

State probabilities are p_i(x) = l_i(x)^2 / q(x) with q the sum of all
squared forms. Numeric evaluation is done with numpy; the implicit-ideal
constructions (kernel of the squared-forms matrix, rank-one symmetric matrix
of linear entries, singular subspaces) are exact rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlin
from .arrangement import Arrangement, KernelComplement, kernel_complement
from .errors import (
    DegenerateLeadingBlock,
    OnHyperplane,
    RankDeficient,
    ValidationError,
    ZeroPoint,
)


@dataclass(frozen=True)
class SquaredLinearModel:
    arr: Arrangement
    B: KernelComplement

    def __post_init__(self):
        if not self.arr.n > self.arr.d > 1:
            raise RankDeficient(
                f"model needs n > d > 1, got n = {self.arr.n}, d = {self.arr.d}"
            )

    @property
    def n(self) -> int:
        return self.arr.n

    @property
    def d(self) -> int:
        return self.arr.d

    @property
    def N(self) -> int:
        """Dimension of the space of quadrics in d variables, d(d+1)/2."""
        return self.d * (self.d + 1) // 2

    @property
    def A_float(self) -> np.ndarray:
        return np.array(self.arr.A, dtype=float)

    @property
    def B_float(self) -> np.ndarray:
        return np.array(self.B.B, dtype=float)


def make_model(arr: Arrangement) -> SquaredLinearModel:
    return SquaredLinearModel(arr=arr, B=kernel_complement(arr))


def normalize_parameter(x) -> np.ndarray:
    """Unit-norm representative with positive first nonzero coordinate."""
    x = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ZeroPoint("zero vector is not a projective point")
    x = x / norm
    for v in x:
        if abs(v) > 1e-12:
            if v < 0:
                x = -x
            break
    return x


def evaluate(model: SquaredLinearModel, x) -> np.ndarray:
    """Probability vector p(x); entries sum to one."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ZeroPoint("zero vector is not a projective point")
    squares = (model.A_float @ x) ** 2
    return squares / squares.sum()


def evaluate_exact(model: SquaredLinearModel, x):
    """Rational probability vector for rational x."""
    values = model.arr.form_values(tuple(ratlin.as_fraction(v) for v in x))
    squares = [v * v for v in values]
    total = sum(squares)
    if total == 0:
        raise ZeroPoint("zero vector is not a projective point")
    return tuple(v / total for v in squares)


def log_likelihood(model: SquaredLinearModel, s, x) -> float:
    """sum_i s_i log p_i(x); -inf when x sits on a hyperplane with s_i > 0.

    Invariant under rescaling x (the model is degree-zero homogeneous).
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    values = model.A_float @ x
    q = float(np.dot(values, values))
    if q == 0.0:
        raise ZeroPoint("zero vector is not a projective point")
    total = 0.0
    for si, li in zip(s, values):
        if si == 0.0:
            continue
        if li == 0.0:
            return -math.inf
        total += 2.0 * si * math.log(abs(li))
    return total - float(s.sum()) * math.log(q)


def gradient(model: SquaredLinearModel, s, x) -> np.ndarray:
    """Gradient of the log-likelihood in the ambient coordinates.

    grad = sum_i (2 s_i / l_i(x)) A_i - (2 sum_j s_j / q(x)) A^T A x,
    which is orthogonal to x by homogeneity.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    A = model.A_float
    values = A @ x
    if np.any((values == 0.0) & (s != 0.0)):
        raise OnHyperplane("gradient undefined on a hyperplane with positive weight")
    q = float(np.dot(values, values))
    weights = np.where(s != 0.0, 2.0 * s / np.where(values == 0.0, 1.0, values), 0.0)
    return weights @ A - (2.0 * s.sum() / q) * (A.T @ (A @ x))


def hessian(model: SquaredLinearModel, s, x) -> np.ndarray:
    """Ambient-coordinate Hessian of the log-likelihood."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    A = model.A_float
    values = A @ x
    if np.any((values == 0.0) & (s != 0.0)):
        raise OnHyperplane("hessian undefined on a hyperplane with positive weight")
    q = float(np.dot(values, values))
    gram = A.T @ A
    u = gram @ x
    safe = np.where(values == 0.0, 1.0, values)
    diag = np.where(s != 0.0, 2.0 * s / safe**2, 0.0)
    total = float(s.sum())
    return -(A.T * diag) @ A - (2.0 * total / q) * gram + (4.0 * total / q**2) * np.outer(u, u)


def quadric_monomials(d: int):
    """Pairs (i, j), i <= j, ordering the monomial basis x_i x_j of quadrics.

    Ordered by the larger index first: (x1^2, x1x2, x2^2, x1x3, ...), so the
    entries of the symmetric matrix built from them fill in column by column.
    """
    return tuple((i, j) for j in range(d) for i in range(j + 1))


def squared_form_row(row, monomials):
    """Coefficients of l(x)^2 in the quadric monomial basis, for l = row . x."""
    coeffs = []
    for i, j in monomials:
        if i == j:
            coeffs.append(row[i] * row[i])
        else:
            coeffs.append(2 * row[i] * row[j])
    return tuple(coeffs)


@dataclass(frozen=True)
class VeroneseGenerators:
    """Implicit generators for n >= d(d+1)/2: linear forms plus 2x2 minors.

    ``linear_forms`` is a basis (length-n coefficient vectors) of the linear
    part of the ideal; ``R`` is the d x d symmetric matrix whose (i, j) entry
    is a linear form in p_1..p_N, stored as its length-N coefficient vector.
    R has rank one on the model, so all its 2x2 minors vanish there.
    """

    L: tuple
    Lprime: tuple
    linear_forms: tuple
    R: tuple
    monomials: tuple

    def r_matrix_at(self, p):
        """Evaluate R at a probability vector (exact for rational input)."""
        d = len(self.R)
        return tuple(
            tuple(sum(c * pv for c, pv in zip(self.R[i][j], p)) for j in range(d))
            for i in range(d)
        )


def veronese_generators(model: SquaredLinearModel) -> VeroneseGenerators:
    """Generators of the implicit ideal in the large-n regime.

    Needs n >= N = d(d+1)/2 and the squares of the first N forms linearly
    independent; otherwise a row permutation that repairs the leading block
    is reported rather than silently applied, so row labels stay meaningful.
    """
    d, n, N = model.d, model.n, model.N
    if n < N:
        raise ValidationError(f"need n >= d(d+1)/2 = {N}, got n = {n}")
    monomials = quadric_monomials(d)
    L = tuple(squared_form_row(row, monomials) for row in model.arr.A)
    Lprime = tuple(L[:N])
    if ratlin.det(Lprime) == 0:
        perm = _repair_permutation(L, N)
        raise DegenerateLeadingBlock(
            "squares of the first N forms are linearly dependent",
            permutation=perm,
        )
    identity = tuple(
        tuple(Fraction(int(i == j)) for j in range(N)) for i in range(N)
    )
    inverse_rows = tuple(ratlin.solve(ratlin.transpose(Lprime), col) for col in identity)
    # inverse_rows[k] is row k of Lprime^{-1}; entry (i,j) of R is the row of
    # the inverse attached to monomial x_i x_j, as a linear form in p_1..p_N.
    index = {mon: k for k, mon in enumerate(monomials)}
    R = tuple(
        tuple(inverse_rows[index[(min(i, j), max(i, j))]] for j in range(d))
        for i in range(d)
    )
    kernel = ratlin.nullspace(ratlin.transpose(L), ncols=n)
    linear_forms = tuple(tuple(Fraction(v) for v in ratlin.primitive(vec)) for vec in kernel)
    return VeroneseGenerators(
        L=L, Lprime=Lprime, linear_forms=linear_forms, R=R, monomials=monomials
    )


def _repair_permutation(L, N):
    """Greedy row order whose leading N x N block is invertible, if any."""
    chosen = []
    echelon = ratlin.IntEchelon()
    for i, row in enumerate(L):
        if echelon.insert(ratlin.primitive(row)):
            chosen.append(i)
        if len(chosen) == N:
            break
    if len(chosen) < N:
        return None
    rest = [i for i in range(len(L)) if i not in chosen]
    return tuple(chosen + rest)


def r_minors_residual(vg: VeroneseGenerators, p) -> float:
    """Largest 2x2 minor of R at p, scale-free (p normalized to unit sum)."""
    p = np.asarray(p, dtype=float)
    p = p / p.sum()
    d = len(vg.R)
    R = np.array(
        [[np.dot(np.array(vg.R[i][j], dtype=float), p[: len(vg.R[0][0])]) for j in range(d)] for i in range(d)]
    )
    scale = max(1.0, float(np.abs(R).max()) ** 2)
    worst = 0.0
    for i, k in itertools.combinations(range(d), 2):
        for j, l in itertools.combinations(range(d), 2):
            worst = max(worst, abs(R[i, j] * R[k, l] - R[i, l] * R[k, j]) / scale)
    return worst


def steiner_quartic(p) -> float:
    """The degree-4 equation of the four-line model in P^3.

    Accepts Fractions (exact) or floats. Symmetric in the coordinates;
    vanishes on the model, takes the value 1 at unit vectors.
    """
    p = tuple(p)
    if len(p) != 4:
        raise ValidationError("the quartic lives on P^3: need a length-4 vector")
    total = sum(v**4 for v in p)
    total += 6 * sum(p[i] ** 2 * p[j] ** 2 for i, j in itertools.combinations(range(4), 2))
    total -= 4 * sum(p[i] ** 3 * p[j] for i in range(4) for j in range(4) if i != j)
    total += 4 * sum(
        p[i] ** 2 * p[j] * p[k]
        for i in range(4)
        for j, k in itertools.combinations([t for t in range(4) if t != i], 2)
    )
    total -= 40 * p[0] * p[1] * p[2] * p[3]
    return total


def minor_space_dimension(d: int) -> int:
    """Rank of the span of all 2x2 minors of a symmetric d x d matrix.

    Each minor is a quadratic with at most two monomials in the matrix
    entries, so the coefficient matrix is eliminated sparsely. The result
    equals (d+1) d^2 (d-1) / 12.
    """
    if d < 2:
        raise ValidationError("need d >= 2")
    var = {}
    for i in range(d):
        for j in range(i, d):
            var[(i, j)] = var[(j, i)] = (i, j)

    def monomial(a, b):
        return tuple(sorted((a, b)))

    rows = []
    for i, k in itertools.combinations(range(d), 2):
        for j, l in itertools.combinations(range(d), 2):
            coeffs = {}
            m1 = monomial(var[(i, j)], var[(k, l)])
            m2 = monomial(var[(i, l)], var[(k, j)])
            coeffs[m1] = coeffs.get(m1, 0) + 1
            coeffs[m2] = coeffs.get(m2, 0) - 1
            row = {m: c for m, c in coeffs.items() if c != 0}
            if row:
                rows.append(row)
    # Sparse elimination; rows keep at most two terms throughout.
    pivots = {}
    rank = 0
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            if lead not in pivots:
                pivots[lead] = row
                rank += 1
                break
            base = pivots[lead]
            f = Fraction(row[lead], base[lead])
            for m, c in base.items():
                row[m] = row.get(m, 0) - f * c
            row = {m: c for m, c in row.items() if c != 0}
    expected = (d + 1) * d**2 * (d - 1) // 12
    if rank != expected:
        raise AssertionError(f"minor-space rank {rank} != closed form {expected}")
    return rank


@dataclass(frozen=True)
class SingularSubspace:
    """Partition (I, J) of the states with the subspace ker(B A_{I,J})."""

    I: frozenset
    J: frozenset
    basis: tuple

    @property
    def projective_dimension(self) -> int:
        return len(self.basis) - 1


def singular_subspaces(model: SquaredLinearModel) -> list:
    """Subspaces where the squaring parametrization is non-injective.

    One subspace for each unordered partition I | J of the states with
    |I|, |J| <= d-1 and ker(B A_{I,J}) nontrivial; empty when n > 2d-2.
    Sign-flipping the forms indexed by J maps each subspace point to a
    different parameter with the same probability vector.
    """
    arr = model.arr
    n, d = arr.n, arr.d
    if arr.rank() != d:
        raise RankDeficient("singular subspaces need an essential arrangement")
    if n > 2 * d - 2:
        return []
    out = []
    for size in range(n - (d - 1), d):
        for J in itertools.combinations(range(n), size):
            Jset = frozenset(J)
            if 0 in Jset:
                continue  # fix 0 in I to pick one representative of (I,J) ~ (J,I)
            rows = tuple(
                tuple(-v for v in row) if i in Jset else row
                for i, row in enumerate(arr.A)
            )
            product = ratlin.matmul(model.B.B, rows)
            kernel = ratlin.nullspace(product, ncols=d)
            if kernel:
                out.append(
                    SingularSubspace(
                        I=frozenset(range(n)) - Jset, J=Jset, basis=kernel
                    )
                )
    out.sort(key=lambda s: tuple(sorted(s.J)))
    return out


def noninjectivity_witness(subspace: SingularSubspace, model: SquaredLinearModel):
    """Exact pair (x, x') with x != +-x' but identical probability vectors.

    x is taken on the subspace; x' solves A x' = A_{I,J} x, which exists
    because B A_{I,J} x = 0 puts A_{I,J} x in the image of A.
    """
    arr = model.arr
    flipped = tuple(
        tuple(-v for v in row) if i in subspace.J else row
        for i, row in enumerate(arr.A)
    )
    gram = ratlin.matmul(ratlin.transpose(arr.A), arr.A)
    for weights in itertools.chain(
        [(1,) * len(subspace.basis)],
        itertools.product((1, 2, 3), repeat=len(subspace.basis)),
    ):
        x = tuple(
            sum(Fraction(w) * b[k] for w, b in zip(weights, subspace.basis))
            for k in range(arr.d)
        )
        if ratlin.is_zero(x):
            continue
        target = ratlin.matvec(ratlin.transpose(arr.A), ratlin.matvec(flipped, x))
        xp = ratlin.solve(gram, target)
        if xp is None:
            continue
        if ratlin.primitive(x) != ratlin.primitive(xp):
            return x, xp
    raise ValidationError("no non-injectivity witness found on this subspace")
