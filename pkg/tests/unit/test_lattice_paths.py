# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Unit tests for lattice path enumeration and the invariant report."""

from unittest.mock import patch

import pytest

from app.errors import InternalCheckError, InvalidInputError
from app.gw import ONE, GWForm
from app.lattice import degree_polygon, rect_polygon
from app.lattice_paths import (
    HalfCompletion,
    InvariantReport,
    LatticePath,
    PathCompleter,
    boundary_chains,
    enumerate_paths,
    invariants,
    lambda_key,
)
from app.tropical import DualSubdivision


@pytest.mark.unit
class TestLatticePaths:
    """Test cases for lambda ordering and path enumeration."""

    def test_lambda_order(self):
        """Test ties in x are broken by larger y first."""
        assert lambda_key((0, 1)) < lambda_key((0, 0)) < lambda_key((1, 0))

    def test_path_must_increase(self):
        """Test a path with a lambda-decreasing step."""
        with pytest.raises(InvalidInputError):
            LatticePath(((1, 0), (0, 0)))

    def test_boundary_chains(self):
        """Test the two chains of the degree 1 triangle."""
        upper, lower = boundary_chains(degree_polygon(1))
        assert upper == ((0, 1), (1, 0))
        assert lower == ((0, 1), (0, 0), (1, 0))

    def test_line_paths(self):
        """Test there is one two-step path in the degree 1 triangle."""
        paths = enumerate_paths(degree_polygon(1), 2)
        assert [p.points for p in paths] == [((0, 1), (0, 0), (1, 0))]
        assert len(paths[0]) == 2

    def test_path_count(self):
        """Test paths are choices of intermediate points in lambda order."""
        # 10 lattice points, 8 inner ones, choose 7
        assert len(enumerate_paths(degree_polygon(3), 8)) == 8

    def test_no_steps(self):
        """Test the step count must be positive."""
        with pytest.raises(InvalidInputError):
            enumerate_paths(degree_polygon(1), 0)

    def test_completer_memoizes(self):
        """Test repeated completion reuses the side cache."""
        completer = PathCompleter(degree_polygon(2))
        path = enumerate_paths(degree_polygon(2), 5)[0]
        first = completer.complete_path(path)
        size = completer.cache_size
        assert completer.complete_path(path) == first
        assert completer.cache_size == size

    def test_corner_cutting_chain_has_no_completion(self):
        """Test a chain skipping the corner (3,2) of the rectangle is a dead end."""
        completer = PathCompleter(rect_polygon(3, 2))
        assert completer.upper[3] == (3, 2)
        assert completer.complete_side(((0, 2), (2, 2), (3, 1), (3, 0)), 1) == ()

    def test_long_boundary_step_is_not_simple(self):
        """Test a chain along the boundary that skips only edge points."""
        completer = PathCompleter(rect_polygon(3, 2))
        result = completer.complete_side(((0, 2), (2, 2), (3, 2), (3, 0)), 1)
        assert result == (HalfCompletion((), False),)

    def test_shared_completer_across_threads(self):
        """Test one completer serving a thread pool gives the serial report."""
        polygon = rect_polygon(2, 2)
        shared = PathCompleter(polygon)
        threaded = invariants(polygon, 0, threads=4, completer=shared)
        assert threaded == invariants(polygon, 0)
        assert shared.cache_size > 0


@pytest.mark.unit
class TestInvariants:
    """Test cases for tropical counts through generic points."""

    @pytest.mark.parametrize(
        "polygon,genus_value,expected",
        [
            (degree_polygon(1), 0, (1, 1)),
            (degree_polygon(2), 0, (1, 1)),
            (degree_polygon(3), 1, (1, 1)),
            (rect_polygon(1, 1), 0, (1, 1)),
            (rect_polygon(2, 1), 0, (1, 1)),
        ],
    )
    def test_small_counts(self, polygon, genus_value, expected):
        """Test N and W on curves with a single solution."""
        report = invariants(polygon, genus_value)
        assert (report.N, report.W) == expected
        assert report.NA1 == GWForm.of(ONE)

    def test_rational_cubics(self, cubic_report):
        """Test 12 complex and 8 real rational cubics through 8 points."""
        assert cubic_report.n == 8
        assert (cubic_report.N, cubic_report.W) == (12, 8)
        assert cubic_report.NA1 == GWForm.of(*[ONE] * 8, hyper=2)
        assert cubic_report.NA1.pretty(compact=True) == "8<1>+2h"

    def test_correspondence_identity(self, cubic_report):
        """Test the enriched count is determined by N and W."""
        assert cubic_report.NA1 == cubic_report.correspondence_form()
        assert cubic_report.NA1.rank == cubic_report.N
        assert cubic_report.NA1.signature == cubic_report.W

    def test_every_curve_has_n_marks(self, cubic_report):
        """Test each record carries n marked edges and consistent multiplicities."""
        for record in cubic_report.curves:
            assert record.curve.n == cubic_report.n
            assert record.mult_a1.rank == record.mult_c
            assert record.mult_a1.signature == record.mult_r

    def test_orientation_independence(self, cubic_report):
        """Test swapping the lambda order gives the same totals."""
        swapped = invariants(degree_polygon(3), 0, orientation="yx")
        assert (swapped.N, swapped.W) == (cubic_report.N, cubic_report.W)
        assert swapped.NA1 == cubic_report.NA1
        assert swapped.orientation == "yx"

    def test_threads_do_not_change_result(self, cubic_report):
        """Test the thread pool keeps the record order."""
        threaded = invariants(degree_polygon(3), 0, threads=4)
        assert threaded.curves == cubic_report.curves

    def test_report_round_trip(self, cubic_report):
        """Test the report schema round trip."""
        assert InvariantReport.from_dict(cubic_report.to_dict()) == cubic_report

    def test_report_totals_checked(self, cubic_report):
        """Test a record whose totals disagree with its curves."""
        data = cubic_report.to_dict()
        data["N"] = 13
        with pytest.raises(InvalidInputError):
            InvariantReport.from_dict(data)

    def test_invalid_genus(self):
        """Test genus beyond the interior point count."""
        with pytest.raises(InvalidInputError):
            invariants(degree_polygon(2), 1)

    def test_invalid_orientation(self):
        """Test an unknown orientation."""
        with pytest.raises(InvalidInputError):
            invariants(degree_polygon(1), 0, orientation="zz")

    def test_simple_completions_are_filtered_first(self):
        """Test a non-simple completion is counted before any genus check."""
        triangle = degree_polygon(1)
        completer = PathCompleter(triangle)
        flat = DualSubdivision(triangle, (triangle,))
        with patch.object(completer, "complete_path", return_value=[(flat, False)]):
            with patch("app.lattice_paths.genus", return_value=7) as genus_mock:
                report = invariants(triangle, 0, completer=completer)
        assert (report.non_simple, report.reducible, report.N) == (1, 0, 0)
        genus_mock.assert_not_called()

    def test_wrong_genus_is_an_internal_error(self):
        """Test a simple irreducible completion of the wrong genus is not skipped."""
        with patch("app.lattice_paths.genus", return_value=3):
            with pytest.raises(InternalCheckError, match="genus 3"):
                invariants(degree_polygon(2), 0)

    def test_unmarked_vertex_is_an_internal_error(self):
        """Test the marked edges must reach every vertex of the subdivision."""
        with patch("app.lattice_paths.nx.is_connected", return_value=False):
            with pytest.raises(InternalCheckError, match="miss a vertex"):
                invariants(degree_polygon(1), 0)
