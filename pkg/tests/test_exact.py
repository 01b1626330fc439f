import itertools
import random

import pytest

from conftest import (
    P43_FACTOR_X,
    P43_FACTOR_Y,
    P234_FACTORS,
    all_partitions,
    oracle_finest,
    oracle_partition_valid,
    rand_block_separable,
    rand_poly,
    rand_separable_product,
    random_partition,
)
from varsep import (
    NotSeparableError,
    Partition,
    Polynomial,
    Verdict,
    ZeroPolynomialError,
    additive_separability,
    anchor_search,
    anomalous_precheck,
    coeff_criterion_total,
    finest_partition,
    parse_polynomial,
    refute_by_derivative,
    sep_matrix_entry,
    separate_by_partition,
    separate_total,
)


def P(source, vars=None):
    return parse_polynomial(source, vars)


FOUR_VAR_PRODUCT = P("(x1*x2 + 1)*(x3 + x4)", ("x1", "x2", "x3", "x4"))


# --------------------------------------------------------------------- pair matrix


def test_pair_entry_vanishes_on_the_minimal_product():
    assert sep_matrix_entry(P("x*y"), 0, 1).is_zero


def test_pair_entry_of_sum_of_squares():
    assert sep_matrix_entry(P("x^2 + y^2"), 0, 1) == P("-4*x*y")


def test_pair_entry_of_difference_of_squares():
    transformed = P("x*y").apply_affine_transform([[1, 1], [1, -1]], [0, 0])
    assert transformed == P("x^2 - y^2")
    assert sep_matrix_entry(transformed, 0, 1) == P("4*x*y")


def test_pair_entry_rejects_diagonal_and_zero():
    with pytest.raises(ValueError):
        sep_matrix_entry(P("x*y"), 1, 1)
    with pytest.raises(ZeroPolynomialError):
        sep_matrix_entry(Polynomial.zero(("x", "y")), 0, 1)
    with pytest.raises(IndexError):
        sep_matrix_entry(P("x*y"), 0, 5)


def test_pair_entry_is_symmetric():
    rng = random.Random(7)
    for _ in range(25):
        p = rand_poly(rng, ("x", "y", "z"))
        assert sep_matrix_entry(p, 0, 2) == sep_matrix_entry(p, 2, 0)


def test_pair_identity_holds_on_separable_inputs():
    # the r = s = 1 case of the derivative identity for separable functions
    rng = random.Random(11)
    for _ in range(25):
        product, _, _ = rand_separable_product(rng, ("x", "y", "z"), max_deg=3)
        for i in range(3):
            for j in range(i + 1, 3):
                assert sep_matrix_entry(product, i, j).is_zero


# --------------------------------------------------------------------- finest partition


def test_finest_partition_of_two_block_product():
    report = finest_partition(FOUR_VAR_PRODUCT)
    assert report.partition.blocks == ((0, 1), (2, 3))
    assert oracle_finest(FOUR_VAR_PRODUCT) == report.partition


def test_finest_partition_of_monomial_is_all_singletons():
    report = finest_partition(P("x*y*z"))
    assert report.partition.is_all_singletons


def test_finest_partition_of_sum_of_squares_is_one_block():
    report = finest_partition(P("x^2 + y^2"))
    assert report.partition.blocks == ((0, 1),)


def test_report_matrix_is_symmetric_with_untrusted_diagonal():
    report = finest_partition(P("x^2 + y^2"))
    assert report.vanishes[0][1] is False
    assert report.vanishes[1][0] is False
    # diagonal entries are present but the partition ignores them
    assert len(report.vanishes) == 2 and len(report.vanishes[0]) == 2


def test_absent_variable_is_its_own_singleton():
    p = P("x*y + 1", ("x", "y", "z"))
    report = finest_partition(p)
    assert ((2,) in report.partition.blocks)


def test_finest_partition_matches_oracle_on_random_inputs():
    rng = random.Random(23)
    names = ("a", "b", "c", "d")
    for _ in range(40):
        p = rand_poly(rng, names, max_deg=2, max_terms=5, lo=-2, hi=2)
        assert finest_partition(p).partition == oracle_finest(p)


def test_binary_split_oracle_agrees_with_partition_for_small_n():
    # all 2^(n-1) - 1 binary splits, checked through margins, versus the
    # component structure of the pair matrix
    rng = random.Random(31)
    for n, names in ((2, ("x", "y")), (3, ("x", "y", "z")), (4, ("a", "b", "c", "d"))):
        for _ in range(15):
            p = rand_poly(rng, names, max_deg=3, max_terms=5, lo=-2, hi=2)
            blocks = finest_partition(p).partition.blocks
            seen = set()
            for size in range(1, n):
                for combo in itertools.combinations(range(n), size):
                    left = frozenset(combo)
                    key = min(left, frozenset(range(n)) - left, key=sorted)
                    if key in seen:
                        continue
                    seen.add(key)
                    by_margin = oracle_partition_valid(
                        p, [sorted(left), sorted(set(range(n)) - left)]
                    )
                    # the split is valid iff no finest block straddles it
                    by_matrix = all(
                        set(block) <= left or set(block).isdisjoint(left) for block in blocks
                    )
                    assert by_margin == by_matrix, (p, sorted(left))
            assert len(seen) == 2 ** (n - 1) - 1


# --------------------------------------------------------------------- anomalous forms and the coefficient route


def test_anomalous_precheck_examples():
    assert anomalous_precheck(P("x^2*y^4 + x^3*y^3")) is Verdict.NOT_SEPARABLE
    assert anomalous_precheck(P("x^3*y^3 + x*y^4")) is Verdict.NOT_SEPARABLE
    assert anomalous_precheck(P("x*y")) is Verdict.INCONCLUSIVE


def test_coeff_criterion_accepts_reference_polynomials(p43, p234):
    assert coeff_criterion_total(p43).verdict is Verdict.SEPARABLE
    assert coeff_criterion_total(p234).verdict is Verdict.SEPARABLE


def test_coeff_criterion_rejects_mixed_quartic():
    report = coeff_criterion_total(P("x^3*y + x^2*y^2 + x*y + y^2"))
    assert report.verdict is Verdict.NOT_SEPARABLE
    assert report.violation is not None
    assert report.violation <= (2, 2)


def test_coeff_criterion_handles_vanishing_leading_product_coefficient():
    for source in ("x^2*y^4 + x^3*y^3", "x^3*y^3 + x*y^4", "x^2*y + x*y^2"):
        report = coeff_criterion_total(P(source))
        assert report.verdict is Verdict.NOT_SEPARABLE, source


def test_route_equivalence_on_random_polynomials():
    rng = random.Random(43)
    for _ in range(300):
        n = rng.randint(1, 3)
        p = rand_poly(rng, ("x", "y", "z")[:n], max_deg=4, max_terms=6, lo=-2, hi=2)
        by_matrix = finest_partition(p).partition.is_all_singletons
        by_coeffs = coeff_criterion_total(p).verdict is Verdict.SEPARABLE
        assert by_matrix == by_coeffs, p


# --------------------------------------------------------------------- total separation


def test_separate_total_reference(p43):
    result = separate_total(p43)
    assert result.verified
    assert result.constant == 1
    assert result.factors[0][1] == P(P43_FACTOR_X)
    assert result.factors[1][1] == P(P43_FACTOR_Y)


def test_separate_total_three_variables(p234):
    result = separate_total(p234)
    assert result.constant == 1
    for (block, factor), expected in zip(result.factors, P234_FACTORS):
        assert factor == P(expected)


def test_separate_total_moves_scalar_into_constant():
    result = separate_total(P("6*x*y"))
    assert result.constant == 6
    assert result.factors[0][1] == P("x")
    assert result.factors[1][1] == P("y")


def test_separate_total_raises_on_non_separable():
    with pytest.raises(NotSeparableError):
        separate_total(P("x^2 + y^2"))


def test_separate_total_round_trip_randomized():
    rng = random.Random(47)
    for _ in range(60):
        n = rng.randint(2, 4)
        names = ("x1", "x2", "x3", "x4")[:n]
        product, constant, factors = rand_separable_product(rng, names)
        result = separate_total(product)
        assert result.verified
        assert result.constant == constant
        for (_, recovered), original in zip(result.factors, factors):
            assert recovered == original


def test_factor_support_stays_inside_blocks():
    names = ("x", "y")
    result = separate_total(P("6*x*y"))
    for block, factor in result.factors:
        assert set(factor.vars) <= {names[i] for i in block}
        assert factor.leading_coefficient() == 1


# --------------------------------------------------------------------- anchors and partition separation


def test_anchor_search_examples(p43, p234):
    assert anchor_search(p43) == (0, 0)
    assert anchor_search(p234) == (0, 1, 1)
    assert anchor_search(P("x")) == (1,)


def test_anchor_search_rejects_zero():
    with pytest.raises(ZeroPolynomialError):
        anchor_search(Polynomial.zero(("x",)))


def test_separate_by_partition_two_blocks():
    partition = Partition(((0, 1), (2, 3)))
    result = separate_by_partition(FOUR_VAR_PRODUCT, partition)
    assert result.verified
    assert result.constant == 1
    assert result.factors[0][1] == P("x1*x2 + 1", ("x1", "x2"))
    assert result.factors[1][1] == P("x3 + x4", ("x3", "x4"))


def test_separate_by_partition_with_explicit_anchor():
    partition = Partition(((0, 1), (2, 3)))
    result = separate_by_partition(FOUR_VAR_PRODUCT, partition, anchor=(1, 1, 1, 0))
    assert result.constant == 1
    assert result.factors[0][1] == P("x1*x2 + 1", ("x1", "x2"))
    assert result.factors[1][1] == P("x3 + x4", ("x3", "x4"))


def test_separate_by_partition_singletons_matches_total(p43):
    result = separate_by_partition(p43, Partition.singletons(2), anchor=(0, 0))
    assert result.constant == 1
    assert result.factors[0][1] == P(P43_FACTOR_X)
    assert result.factors[1][1] == P(P43_FACTOR_Y)


def test_separate_by_partition_trivial_block():
    p = P("x^2 + y^2")
    result = separate_by_partition(p, Partition(((0, 1),)))
    assert result.constant == 1
    assert result.factors[0][1] == p


def test_separate_by_partition_rejects_non_coarsening():
    with pytest.raises(NotSeparableError):
        separate_by_partition(P("x^2 + y^2"), Partition.singletons(2))
    with pytest.raises(NotSeparableError):
        separate_by_partition(FOUR_VAR_PRODUCT, Partition(((0, 2), (1, 3))))


def test_separate_by_partition_rejects_vanishing_anchor():
    with pytest.raises(ValueError):
        separate_by_partition(P("x*y"), Partition.singletons(2), anchor=(0, 5))


def test_coarsening_contract_randomized():
    rng = random.Random(53)
    names = ("a", "b", "c", "d")
    for _ in range(25):
        blocks = random_partition(rng, 4, rng.choice((2, 3)))
        product = rand_block_separable(rng, names, blocks)
        finest = finest_partition(product).partition
        for candidate in all_partitions(list(range(4))):
            candidate_partition = Partition.from_blocks(candidate)
            if candidate_partition.is_coarsening_of(finest):
                result = separate_by_partition(product, candidate_partition)
                assert result.verified
                assert result.product(product.vars) == product
            else:
                with pytest.raises(NotSeparableError):
                    separate_by_partition(product, candidate_partition)


# --------------------------------------------------------------------- derivative refutation and identities


def test_refute_by_derivative_mixed_quartic():
    poly = P("x^3*y + x^2*y^2 + x*y + y^2")
    assert refute_by_derivative(poly, (2, 0)) is Verdict.NOT_SEPARABLE


def test_refute_by_derivative_is_inconclusive_on_sum_of_squares():
    poly = P("x^2 + y^2")
    assert refute_by_derivative(poly, (1, 0)) is Verdict.INCONCLUSIVE
    # all partial derivatives of x^2 + y^2 are separable, yet F is not
    assert finest_partition(poly).partition.blocks == ((0, 1),)


def test_refute_by_derivative_inconclusive_cases():
    assert refute_by_derivative(P("x*y"), (1, 1)) is Verdict.INCONCLUSIVE
    assert refute_by_derivative(P("x*y"), (5, 0)) is Verdict.INCONCLUSIVE  # derivative vanishes


def test_high_order_product_identity():
    # F^(n-1) * d^n F / dx_1...dx_n == F_1 * ... * F_n for separable F
    rng = random.Random(59)
    names = ("x", "y", "z")
    for _ in range(20):
        product, _, _ = rand_separable_product(rng, names, max_deg=3)
        mixed = product
        for i in range(3):
            mixed = mixed.partial_derivative(i)
        lhs = product * product * mixed
        rhs = Polynomial.constant(1, names)
        for i in range(3):
            rhs = rhs * product.partial_derivative(i)
        assert lhs == rhs


def test_high_order_product_identity_fails_on_sum_of_squares():
    p = P("x^2 + y^2 + z^2")
    mixed = p.partial_derivative(0).partial_derivative(1).partial_derivative(2)
    lhs = p * p * mixed
    rhs = p.partial_derivative(0) * p.partial_derivative(1) * p.partial_derivative(2)
    assert lhs != rhs
    assert (lhs - rhs) == P("-8*x*y*z")


# --------------------------------------------------------------------- additive route


def test_additive_separability_examples():
    assert additive_separability(P("x^2 + y^2")) is Verdict.SEPARABLE
    assert additive_separability(P("x*y")) is Verdict.NOT_SEPARABLE
    assert additive_separability(P("x^3 + 2*y + 5")) is Verdict.SEPARABLE


# --------------------------------------------------------------------- affine interplay


def test_affine_image_of_product_is_not_separable():
    image = P("x*y").apply_affine_transform([[1, 1], [1, -1]], [0, 0])
    assert finest_partition(image).partition.blocks == ((0, 1),)
    with pytest.raises(NotSeparableError):
        separate_total(image)
