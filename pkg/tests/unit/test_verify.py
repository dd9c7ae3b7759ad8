# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Unit tests for the numerical verification checks."""

from fractions import Fraction

import pytest

from app.errors import InvalidInputError, NotANodeError
from app.gw import GWForm, SquareClass
from app.verify import (
    PARALLELOGRAM_COEFFICIENTS,
    SOLITARY,
    SPLIT,
    CheckResult,
    chebyshev_check,
    chebyshev_data,
    chebyshev_polynomial,
    classify_real_node,
    deformation_pattern_check,
    deformation_trace_check,
    falgebra_of,
    node_solutions,
    normal_triangles,
    parallelogram_check,
    run_suite,
    suite_checks,
    triangle_nodes,
    triangle_trace_check,
    triangle_weight_check,
    triangle_weight_value,
    welschinger_sign,
)


@pytest.mark.unit
class TestCheckResult:
    """Test cases for check records."""

    def test_line(self):
        """Test the one-line summary."""
        result = CheckResult("sine", "m=3", True, 0.0)
        assert result.line() == "CHECK sine m=3 PASS residual=0"
        assert CheckResult("sine", "m=3", False, 0.5).line().endswith("FAIL residual=0.5")

    def test_dict_round_trip(self):
        """Test the check schema round trip."""
        result = CheckResult("traces", "m=2,D=3", False, 1.0, "c=1: mismatch")
        assert CheckResult.from_dict(result.to_dict()) == result

    def test_missing_field(self):
        """Test a record without a status."""
        with pytest.raises(InvalidInputError):
            CheckResult.from_dict({"name": "sine", "params": "m=2"})


@pytest.mark.unit
class TestTriangleChecks:
    """Test cases for curves with one node-bearing triangle."""

    def test_node_solutions(self):
        """Test (m,p,q) = (3,1,2) has one node, found twice."""
        assert len(node_solutions(3, 1, 2)) == 2
        assert len(triangle_nodes(3, 1, 2)) == 1

    def test_no_nodes(self):
        """Test a unimodular triangle has no nodes."""
        assert triangle_nodes(1, 0, 1) == []

    def test_weight_value(self):
        """Test the exact weight of (3,1,2)."""
        assert triangle_weight_value(3, 1, 2) == Fraction(3)

    def test_weight_check(self):
        """Test the numeric product against the exact value and class."""
        result, check = triangle_weight_check(3, 1, 2)
        assert check.passed
        assert complex(result.numeric).real == pytest.approx(-3)
        assert result.weight_class == SquareClass.of(-3)
        assert result.match

    @pytest.mark.parametrize("m,p,q", [(2, 0, 1), (2, 1, 2), (3, 0, 1), (3, 2, 3)])
    def test_nodeless_triangles(self, m, p, q):
        """Test triangles without interior points have weight 1."""
        result, check = triangle_weight_check(m, p, q)
        assert check.passed, check.detail
        assert result.formula == 1

    def test_falgebra(self):
        """Test degree and radicand of the beta algebra."""
        algebra = falgebra_of(3, 1, 2)
        assert (algebra.degree, algebra.radicand) == (3, Fraction(-1))
        assert algebra.step.radicand == SquareClass.of(-1)

    def test_falgebra_roots_of_unity(self):
        """Test eps1 must be a root of unity of the right order."""
        with pytest.raises(InvalidInputError):
            falgebra_of(3, 1, 2, eps1=Fraction(2))

    def test_triangle_trace(self):
        """Test the trace through the beta extension."""
        assert triangle_trace_check(3, 1, 2).passed
        assert triangle_trace_check(5, 1, 2).passed

    def test_triangle_trace_even_edge(self):
        """Test triangles with an even edge are skipped, not failed."""
        check = triangle_trace_check(2, 0, 2)
        assert check.passed
        assert check.detail.startswith("not applicable")

    def test_normal_triangles(self):
        """Test the enumeration by double area."""
        found = [(t.m, t.p, t.q) for t in normal_triangles(2)]
        assert found == [(1, 0, 1), (2, 0, 1), (2, 1, 2)]


@pytest.mark.unit
class TestParallelogramChecks:
    """Test cases for products of two binomials."""

    def test_single_node(self):
        """Test one real node whose minus Hessian is a square."""
        result, check = parallelogram_check(
            1, 0, 0, 1, Fraction(1), Fraction(-2), Fraction(3), Fraction(-1)
        )
        assert result.count == result.expected == 1
        assert result.real_squares is True
        assert check.passed

    def test_node_count_is_determinant(self):
        """Test |ad - bc| nodes."""
        result, check = parallelogram_check(1, 2, 2, 1, *PARALLELOGRAM_COEFFICIENTS)
        assert result.count == 3
        assert check.passed

    def test_parallel_sides(self):
        """Test ad = bc is rejected."""
        with pytest.raises(InvalidInputError):
            parallelogram_check(1, 2, 1, 2, *PARALLELOGRAM_COEFFICIENTS)

    def test_not_primitive(self):
        """Test non-primitive exponent pairs are rejected."""
        with pytest.raises(InvalidInputError):
            parallelogram_check(2, 2, 0, 1, *PARALLELOGRAM_COEFFICIENTS)


@pytest.mark.unit
class TestChebyshev:
    """Test cases for Chebyshev polynomials."""

    def test_coefficients(self):
        """Test T_3 = 4x^3 - 3x."""
        assert chebyshev_data(3).coefficients == (0, -3, 0, 4)
        assert chebyshev_data(3).descending() == [4, 0, -3, 0]

    def test_low_degrees(self):
        """Test T_0 and T_1."""
        assert chebyshev_polynomial(0).all_coeffs() == [1]
        assert chebyshev_polynomial(1).all_coeffs() == [1, 0]

    def test_critical_points(self):
        """Test m - 1 critical points in (-1, 1)."""
        points = chebyshev_data(5).critical_points
        assert len(points) == 4
        assert all(-1 < float(x) < 1 for x in points)

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_check(self, m):
        """Test critical values and second derivatives."""
        assert chebyshev_check(m).passed

    def test_degree_one(self):
        """Test the check needs a critical point."""
        with pytest.raises(InvalidInputError):
            chebyshev_check(1)


@pytest.mark.unit
class TestDeformation:
    """Test cases for deformation patterns of long edges."""

    @pytest.mark.parametrize(
        "m,a,b,c,product",
        [
            (2, 1, 1, 1, -16),
            (3, 1, 1, 1, 2304),
            (2, 2, -3, 8, -1024),
        ],
    )
    def test_pattern(self, m, a, b, c, product):
        """Test node count, product of minus Hessians and weight class."""
        result, check = deformation_pattern_check(m, Fraction(a), Fraction(b), Fraction(c))
        assert check.passed, check.detail
        assert result.count == m - 1
        assert complex(result.product).real == pytest.approx(product)
        assert result.class_ok is True

    def test_every_choice(self):
        """Test all m choices of the pattern for m = 4."""
        for choice in range(4):
            _, check = deformation_pattern_check(4, choice=choice)
            assert check.passed, check.detail

    def test_vacuous(self):
        """Test there is nothing to check for m = 1."""
        result, check = deformation_pattern_check(1)
        assert check.passed
        assert result.count == 0

    def test_bad_choice(self):
        """Test a choice outside 0..m-1."""
        with pytest.raises(InvalidInputError):
            deformation_pattern_check(3, choice=3)

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_trace(self, m):
        """Test the deformation weight traced from L to F."""
        assert deformation_trace_check(m).passed


@pytest.mark.unit
class TestRealNodes:
    """Test cases for real node classification."""

    def test_classify(self):
        """Test split and solitary nodes."""
        assert classify_real_node(-2) == SPLIT
        assert classify_real_node(3) == SOLITARY

    def test_degenerate(self):
        """Test a zero Hessian is not a node."""
        with pytest.raises(NotANodeError):
            classify_real_node(0)

    def test_welschinger_sign(self):
        """Test the sign counts solitary nodes."""
        assert welschinger_sign([-1, 2, 3]) == 1
        assert welschinger_sign([1]) == -1
        assert welschinger_sign([]) == 1


@pytest.mark.unit
class TestSuites:
    """Test cases for running whole suites."""

    def test_chebyshev_suite(self, settings):
        """Test the suite runs m = 2..limit."""
        results = run_suite("chebyshev", settings, 4)
        assert [r.params for r in results] == ["m=2", "m=3", "m=4"]
        assert all(r.passed for r in results)

    def test_threads_keep_order(self, settings):
        """Test results come back in canonical order with a thread pool."""
        threaded = settings.model_copy(update={"threads": 4})
        assert run_suite("sine", threaded, 6) == run_suite("sine", settings, 6)

    def test_traces_suite(self, settings):
        """Test closed-form traces against the Gram matrix oracle."""
        results = run_suite("traces", settings, 2)
        assert len(results) == 2 * 14 * 2
        assert all(r.passed for r in results)

    @pytest.mark.parametrize("name", ["triangle", "vertex", "deformation", "parallelogram"])
    def test_small_suites(self, settings, name):
        """Test small ranges of the remaining suites pass."""
        results = run_suite(name, settings, 3)
        assert results
        assert all(r.passed for r in results), [r.line() for r in results if not r.passed]

    def test_unknown_suite(self, settings):
        """Test an unknown suite name."""
        with pytest.raises(InvalidInputError):
            run_suite("bogus", settings)
        with pytest.raises(InvalidInputError):
            suite_checks("bogus", 3, settings)

    def test_bad_limit(self, settings):
        """Test a non-positive range."""
        with pytest.raises(InvalidInputError):
            run_suite("sine", settings, 0)

    @pytest.mark.slow
    def test_all_defaults(self, settings):
        """Test every suite at its default range."""
        results = run_suite("all", settings)
        assert all(r.passed for r in results), [r.line() for r in results if not r.passed]

    def test_deformation_trace_detail(self):
        """Test the traced deformation weight is hyperbolic for even m."""
        assert deformation_trace_check(4).detail.startswith(GWForm.hyperbolic(2).pretty())
