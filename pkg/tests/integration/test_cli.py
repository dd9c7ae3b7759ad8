# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Integration tests for the tropwitt command line."""

import json
from unittest.mock import patch

import pytest

from app.errors import InternalCheckError
from app.verify import CheckResult
from main import main


@pytest.mark.cli
class TestInvariantsCommand:
    """Test cases for the invariants and curves subcommands."""

    def test_summary_line(self, capsys):
        """Test the one-line N, W, NA1 summary for rational cubics."""
        assert main(["invariants", "--polygon", "degree:3"]) == 0
        assert capsys.readouterr().out.strip() == "N=12 W=8 NA1=8<1>+2h"

    def test_vertices_and_genus(self, capsys):
        """Test an explicit vertex list with positive genus."""
        assert main(["invariants", "--vertices", "0,0;3,0;0,3", "--genus", "1"]) == 0
        assert capsys.readouterr().out.strip() == "N=1 W=1 NA1=<1>"

    def test_json(self, capsys):
        """Test the machine-readable report."""
        assert main(["--json", "invariants", "--polygon", "degree:2"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert (data["N"], data["W"], data["n"]) == (1, 1, 5)
        assert data["NA1"]["rank"] == 1

    def test_table_and_output(self, capsys, tmp_path):
        """Test the per-curve table and the saved YAML report."""
        output = tmp_path / "report.yaml"
        assert main(["--output", str(output), "invariants", "--polygon", "rect:1,1", "--table"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "N=1 W=1 NA1=<1>"
        assert lines[1].startswith("#  cells")
        assert "mult_a1" in output.read_text()

    def test_curves_svg(self, capsys, tmp_path):
        """Test listing curves and drawing one of them."""
        figure = tmp_path / "curve.svg"
        assert main(["--svg", str(figure), "curves", "--polygon", "degree:2"]) == 0
        assert capsys.readouterr().out.splitlines()[-1] == "N=1 W=1 NA1=<1>"
        assert figure.read_text().startswith("<?xml")

    def test_curve_index_out_of_range(self, capsys, tmp_path):
        """Test drawing a curve that does not exist."""
        figure = tmp_path / "curve.svg"
        assert main(["--svg", str(figure), "curves", "--polygon", "degree:1", "--index", "3"]) == 2
        assert "out of range" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [
            ["invariants", "--polygon", "degree:0"],
            ["invariants", "--polygon", "degree:2", "--vertices", "0,0;1,0;0,1"],
            ["invariants", "--polygon", "degree:2", "--genus", "1"],
            ["invariants", "--vertices", "0,0;1,1;2,2"],
            ["invariants", "--genus", "-1"],
        ],
    )
    def test_invalid_input(self, capsys, argv):
        """Test invalid polygons and genera exit with status 2."""
        assert main(argv) == 2
        assert capsys.readouterr().out.startswith("error:")


@pytest.mark.cli
class TestVerifyCommand:
    """Test cases for the verify subcommand."""

    def test_chebyshev(self, capsys):
        """Test one CHECK line per degree and the tally."""
        assert main(["verify", "chebyshev", "--m-max", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("CHECK chebyshev m=2 PASS")
        assert lines[-1] == "2/2 checks passed"

    def test_json(self, capsys):
        """Test the JSON list of checks."""
        assert main(["--json", "verify", "sine", "--m-max", "4"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["passed"] is True
        assert [c["params"] for c in data["checks"]] == ["m=2", "m=3", "m=4"]

    def test_failure_exit_code(self, capsys):
        """Test a failed check gives status 1."""
        failed = [CheckResult("sine", "m=2", False, 1.0)]
        with patch("app.commands.run_suite", return_value=failed):
            assert main(["verify", "sine"]) == 1
        assert "0/1 checks passed" in capsys.readouterr().out

    def test_bad_precision(self, capsys):
        """Test a precision below the minimum."""
        assert main(["verify", "sine", "--precision-digits", "10"]) == 2

    def test_unknown_suite(self):
        """Test argparse rejects an unknown suite."""
        with pytest.raises(SystemExit):
            main(["verify", "bogus"])


@pytest.mark.cli
class TestTropicalizeCommand:
    """Test cases for the tropicalize subcommand."""

    def test_line_terms(self, capsys):
        """Test the tropical line from inline terms."""
        assert main(["tropicalize", "--terms", "0 0 1 / 1 0 2 / 0 1 -1"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert "vertex 0 (-1, 2)" in out
        assert "genus 0 nodal=True simple=True" in out
        assert out[-1] == "mult_C=1 mult_R=1 mult_A1=<1>"

    def test_cubic_file(self, capsys, sample_path):
        """Test the honeycomb cubic read from a file."""
        assert main(["--json", "tropicalize", sample_path("cubic.trop")]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["kinds"] == ["triangle"] * 9
        assert (data["genus"], data["mult_c"], data["mult_r"]) == (1, 1, 1)

    def test_not_nodal(self, capsys, sample_path, tmp_path):
        """Test a non-nodal curve withholds its multiplicities."""
        figure = tmp_path / "trapezoid.svg"
        assert main(["--svg", str(figure), "tropicalize", sample_path("trapezoid.trop")]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("cell other")
        assert out[-1] == "not nodal: multiplicities withheld"
        assert figure.exists()

    def test_missing_file(self, capsys):
        """Test a polynomial file that does not exist."""
        assert main(["tropicalize", "no/such/file.trop"]) == 2

    def test_needs_input(self, capsys):
        """Test tropicalize without a file or terms."""
        assert main(["tropicalize"]) == 2


@pytest.mark.cli
class TestTowerCommand:
    """Test cases for the tower subcommand."""

    def test_curve_file(self, capsys, sample_path):
        """Test the quadrilateral tower read from a file."""
        assert main(["tower", "--curve-file", sample_path("quadrilateral.yaml")]) == 0
        out = capsys.readouterr().out.splitlines()
        assert "F 3 dT_1" in out
        assert "L 3 1" in out
        assert "dim_k M = 9" in out
        assert out[-1] == "trace <1> + 4h"

    def test_enumerated_json(self, capsys):
        """Test the tower of an enumerated curve as JSON."""
        assert main(["--json", "tower", "--polygon", "degree:3", "--index", "5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["matches"] is True
        assert data["trace"]["rank"] == data["dim_M"]

    def test_index_out_of_range(self, capsys, sample_path):
        """Test a curve index past the end of the file."""
        argv = ["tower", "--curve-file", sample_path("quadrilateral.yaml"), "--index", "1"]
        assert main(argv) == 2

    def test_non_generic_marking(self, capsys, tmp_path):
        """Test a triangle with all three sides marked."""
        path = tmp_path / "line.yaml"
        path.write_text(
            "polygon: [[0, 0], [1, 0], [0, 1]]\n"
            "cells: [[[0, 0], [1, 0], [0, 1]]]\n"
            "marks: [[[0, 0], [1, 0]], [[1, 0], [0, 1]], [[0, 1], [0, 0]]]\n"
        )
        assert main(["tower", "--curve-file", str(path)]) == 2
        assert "non-generic marking" in capsys.readouterr().out

    def test_internal_failure(self, capsys, sample_path):
        """Test an internal check failure gives status 1."""
        with patch("app.commands.reconstruct", side_effect=InternalCheckError("boom")):
            assert main(["tower", "--curve-file", sample_path("quadrilateral.yaml")]) == 1
        assert "error: boom" in capsys.readouterr().out
