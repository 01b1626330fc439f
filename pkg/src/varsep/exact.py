"""Exact separability decisions and factor extraction for rational polynomials.

Two independent routes decide whether a polynomial F factors into a product
of polynomials in disjoint variable blocks:

* the differential route: the pair test F*F_ij - F_i*F_j == 0 (as an exact
  polynomial identity), whose nonzero pairs form a graph whose connected
  components are the finest separating partition;
* the coefficient route: for total separability, every coefficient of the
  dense index box must equal the product of the corresponding axis slices
  through the leading corner, homogenized by powers of the leading product
  coefficient so arbitrary (non-monic) inputs stay in exact integer
  arithmetic.

Factor extraction uses either coefficient slices (total separation) or
margins at an anchor point where F does not vanish (partition separation).
Every emitted factorization is re-verified by exact multiplication.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .partition import Partition, UnionFind
from .poly import Polynomial, Scalar, ZeroPolynomialError, _fraction


class Verdict(enum.Enum):
    SEPARABLE = "separable"
    NOT_SEPARABLE = "not separable"
    INCONCLUSIVE = "inconclusive"


class NotSeparableError(Exception):
    """The requested factorization does not exist for this input."""


class VerificationError(Exception):
    """A produced factorization failed exact re-multiplication.

    Unreachable when the criteria hold; raising it signals an internal
    inconsistency, never a property of the input.
    """


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of the coefficient-tensor criterion."""

    verdict: Verdict
    violation: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SepMatrixReport:
    """Pairwise vanishing table of F*F_ij - F_i*F_j and the derived partition.

    The diagonal entries are computed for completeness but never consulted:
    F*F_ii - F_i^2 == 0 characterizes exponential-type behavior along x_i,
    not separability.
    """

    names: tuple[str, ...]
    vanishes: tuple[tuple[bool, ...], ...]
    partition: Partition


@dataclass(frozen=True)
class SeparationResult:
    """A verified factorization: constant * product of monic block factors."""

    constant: Fraction
    factors: tuple[tuple[tuple[int, ...], Polynomial], ...]
    verified: bool

    def product(self, vars: Sequence[str]) -> Polynomial:
        result = Polynomial.constant(self.constant, vars)
        for _, factor in self.factors:
            result = result * factor
        return result


def _require_nonzero(poly: Polynomial) -> None:
    if poly.is_zero:
        raise ZeroPolynomialError("the zero polynomial is degenerate for separability tests")


def sep_matrix_entry(poly: Polynomial, i: int, j: int) -> Polynomial:
    """The exact polynomial F*F_ij - F_i*F_j for distinct variable indexes.

    Identically zero exactly when F is separable across the pair (i, j);
    symmetric in its indexes.
    """
    _require_nonzero(poly)
    n = poly.var_count
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"pair ({i}, {j}) out of range for {n} variables")
    if i == j:
        raise ValueError("diagonal entries are not separability conditions; pass i != j")
    fi = poly.partial_derivative(i)
    fj = poly.partial_derivative(j)
    return poly * fi.partial_derivative(j) - fi * fj


def finest_partition(poly: Polynomial) -> SepMatrixReport:
    """Finest partition according to which the polynomial separates.

    Builds the graph on variables with an edge wherever the pair polynomial
    F*F_ij - F_i*F_j is not identically zero and returns its connected
    components.  F separates according to a partition Q if and only if Q is
    a coarsening of the result.
    """
    _require_nonzero(poly)
    n = poly.var_count
    partials = [poly.partial_derivative(i) for i in range(n)]
    vanishes = [[True] * n for _ in range(n)]
    uf = UnionFind(n)
    for i in range(n):
        vanishes[i][i] = (poly * partials[i].partial_derivative(i) - partials[i] * partials[i]).is_zero
        for j in range(i + 1, n):
            entry = poly * partials[i].partial_derivative(j) - partials[i] * partials[j]
            zero = entry.is_zero
            vanishes[i][j] = vanishes[j][i] = zero
            if not zero:
                uf.union(i, j)
    return SepMatrixReport(
        names=poly.vars,
        vanishes=tuple(tuple(row) for row in vanishes),
        partition=uf.partition(),
    )


def anomalous_precheck(poly: Polynomial) -> Verdict:
    """Fast refutation: a totally separable polynomial must contain its leading
    product monomial x_1^N_1 ... x_n^N_n (N_i the per-variable maximum degrees).

    Returns NOT_SEPARABLE when that coefficient is zero, INCONCLUSIVE otherwise.
    """
    _require_nonzero(poly)
    degrees = poly.degree_vector()
    if poly.coefficient(degrees) == 0:
        return Verdict.NOT_SEPARABLE
    return Verdict.INCONCLUSIVE


def _axis_slices(poly: Polynomial, degrees: tuple[int, ...]) -> list[list[Fraction]]:
    """slice[r][i] = coefficient at the leading corner with axis r lowered to i."""
    slices = []
    for r, nr in enumerate(degrees):
        column = []
        for i in range(nr + 1):
            index = degrees[:r] + (i,) + degrees[r + 1:]
            column.append(poly.coefficient(index))
        slices.append(column)
    return slices


def coeff_criterion_total(poly: Polynomial) -> CriterionReport:
    """Coefficient-tensor test for total separability.

    Checks L^(n-1) * c[i_1,...,i_n] == prod_r c[N_1,...,i_r,...,N_n] over the
    full dense index box, where L is the leading product coefficient.  The
    homogenized form avoids normalizing the input.  It is also decisive when
    L is zero (anomalous polynomials): either the scan meets an index whose
    slice product is nonzero, or, when every slice product vanishes too, the
    absent leading monomial x_1^N_1...x_n^N_n is itself the violation, since
    a totally separable polynomial always contains it.
    """
    _require_nonzero(poly)
    degrees = poly.degree_vector()
    n = len(degrees)
    leading = poly.coefficient(degrees)
    slices = _axis_slices(poly, degrees)
    # leading is nonzero whenever n == 0 or n == 1, so the power is always defined
    scale = leading ** (n - 1)
    for index in itertools.product(*(range(nr + 1) for nr in degrees)):
        expected = Fraction(1)
        for r, i in enumerate(index):
            expected *= slices[r][i]
        if scale * poly.coefficient(index) != expected:
            return CriterionReport(Verdict.NOT_SEPARABLE, violation=index)
    if leading == 0:
        return CriterionReport(Verdict.NOT_SEPARABLE, violation=degrees)
    return CriterionReport(Verdict.SEPARABLE)


def separate_total(poly: Polynomial) -> SeparationResult:
    """Extract univariate factors of a totally separable polynomial.

    The factor for variable r is the coefficient slice through the leading
    corner, normalized monic; the leading product coefficient becomes the
    overall constant.  The factorization is re-verified by exact
    multiplication before it is returned.
    """
    report = coeff_criterion_total(poly)
    if report.verdict is not Verdict.SEPARABLE:
        raise NotSeparableError(
            f"not totally separable: coefficient condition fails at index {report.violation}"
        )
    degrees = poly.degree_vector()
    leading = poly.coefficient(degrees)
    slices = _axis_slices(poly, degrees)
    factors = []
    for r, name in enumerate(poly.vars):
        univariate = Polynomial((name,), {(i,): c for i, c in enumerate(slices[r]) if c})
        factors.append(((r,), univariate / leading))
    result = SeparationResult(constant=leading, factors=tuple(factors), verified=False)
    if result.product(poly.vars) != poly:
        raise VerificationError("total separation failed exact re-multiplication")
    return SeparationResult(constant=leading, factors=tuple(factors), verified=True)


def anchor_search(poly: Polynomial) -> tuple[Fraction, ...]:
    """First point of the integer grid prod_i {0,...,N_i} where F is nonzero.

    Scans in lexicographic order.  A nonzero polynomial cannot vanish on a
    grid offering N_i + 1 distinct values per variable, so the scan always
    succeeds.
    """
    _require_nonzero(poly)
    degrees = poly.degree_vector()
    for candidate in itertools.product(*(range(n + 1) for n in degrees)):
        point = tuple(Fraction(c) for c in candidate)
        if poly.evaluate(point) != 0:
            return point
    raise AssertionError("unreachable: nonzero polynomial vanished on its whole degree grid")


def separate_by_partition(
    poly: Polynomial,
    partition: Partition,
    anchor: Sequence[Scalar] | None = None,
) -> SeparationResult:
    """Factor the polynomial according to a partition of its variables.

    Uses the margin construction at an anchor point a with F(a) != 0: for r
    blocks, F(a)^(r-1) * F equals the product over blocks of the margins of F
    with the other blocks frozen at a.  Each margin is normalized monic and
    the scalars are folded into the constant.  The partition must be a
    coarsening of the finest partition; the result is re-verified by exact
    multiplication.
    """
    _require_nonzero(poly)
    n = poly.var_count
    if partition.var_count != n:
        raise ValueError(f"partition covers {partition.var_count} variables, polynomial has {n}")
    finest = finest_partition(poly).partition
    if not partition.is_coarsening_of(finest):
        raise NotSeparableError(
            f"polynomial does not separate according to {partition.blocks}; "
            f"finest partition is {finest.blocks}"
        )
    if anchor is None:
        point = anchor_search(poly)
    else:
        point = tuple(_fraction(v) for v in anchor)
        if len(point) != n:
            raise ValueError(f"anchor has {len(point)} coordinates, expected {n}")
    value = poly.evaluate(point)
    if value == 0:
        raise ValueError("anchor point must not be a zero of the polynomial")
    constant = value ** (1 - partition.block_count)
    factors = []
    for block in partition.blocks:
        fixed = {i: point[i] for i in range(n) if i not in block}
        raw = poly.margin(fixed)
        lead = raw.leading_coefficient()
        constant *= lead
        factors.append((block, raw / lead))
    result = SeparationResult(constant=constant, factors=tuple(factors), verified=False)
    if result.product(poly.vars) != poly:
        raise VerificationError("partition separation failed exact re-multiplication")
    return SeparationResult(constant=constant, factors=tuple(factors), verified=True)


def refute_by_derivative(poly: Polynomial, order: Sequence[int]) -> Verdict:
    """Refutation through a mixed partial derivative.

    Every partial derivative of a separable function is separable, so a
    non-totally-separable derivative proves the input is not totally
    separable.  A separable (or vanishing) derivative proves nothing:
    x^2 + y^2 has all derivatives separable yet is not separable itself.
    """
    _require_nonzero(poly)
    if len(order) != poly.var_count:
        raise ValueError(f"derivative order has {len(order)} entries, expected {poly.var_count}")
    if any(k < 0 for k in order):
        raise ValueError("derivative orders must be nonnegative")
    derivative = poly
    for i, k in enumerate(order):
        for _ in range(k):
            derivative = derivative.partial_derivative(i)
    if derivative.is_zero:
        return Verdict.INCONCLUSIVE
    if finest_partition(derivative).partition.is_all_singletons:
        return Verdict.INCONCLUSIVE
    return Verdict.NOT_SEPARABLE


def additive_separability(poly: Polynomial) -> Verdict:
    """SEPARABLE when the polynomial is a sum of univariate pieces,
    i.e. every monomial involves at most one variable."""
    for exps in poly.terms:
        if sum(1 for e in exps if e > 0) > 1:
            return Verdict.NOT_SEPARABLE
    return Verdict.SEPARABLE
