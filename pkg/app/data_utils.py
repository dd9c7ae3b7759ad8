# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Data utilities for loading tropical polynomials and marked curves, and saving reports."""

import json
import os
from fractions import Fraction
from typing import Any, Dict, List, Optional

import yaml

from app.errors import InvalidInputError
from app.lattice_paths import InvariantReport
from app.tropical import MarkedTropicalCurve, TropicalPolynomial


def parse_polynomial_text(text: str) -> TropicalPolynomial:
    """Parse ``i j height`` terms; ``#`` starts a comment, ``/`` separates terms."""
    heights: Dict[Any, Fraction] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        for term in _terms(line.split("#", 1)[0]):
            if len(term) != 3:
                raise InvalidInputError(
                    f"line {line_number}: expected 'i j height', got '{' '.join(term)}'"
                )
            try:
                point = (int(term[0]), int(term[1]))
                height = Fraction(term[2])
            except (ValueError, ZeroDivisionError) as e:
                raise InvalidInputError(f"line {line_number}: {e}")
            if point in heights:
                raise InvalidInputError(f"line {line_number}: monomial {point} repeated")
            heights[point] = height
    return TropicalPolynomial(tuple(heights.items()))


def _terms(line: str) -> List[List[str]]:
    """Whitespace tokens grouped at lone "/" separators; "p/q" stays one token."""
    terms: List[List[str]] = [[]]
    for token in line.split():
        if token == "/":
            terms.append([])
        else:
            terms[-1].append(token)
    return [t for t in terms if t]


class TropicalDataManager:
    """Loads polynomial and curve files and writes JSON or YAML reports."""

    def __init__(self, data_file_path: Optional[str] = None):
        """Initialize the manager; the default is the bundled sample polynomial."""
        if data_file_path is None:
            current_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            data_file_path = os.path.join(current_dir, "sample-data", "line.trop")

        self.data_file_path = data_file_path
        self._text: Optional[str] = None

    def _read(self) -> str:
        if self._text is None:
            try:
                with open(self.data_file_path, "r", encoding="utf-8") as file:
                    self._text = file.read()
            except FileNotFoundError:
                raise FileNotFoundError(f"Data file not found: {self.data_file_path}")
        return self._text

    def _load_yaml(self) -> Any:
        try:
            return yaml.safe_load(self._read())
        except yaml.YAMLError as e:
            raise InvalidInputError(f"Invalid YAML format: {e}")

    def load_polynomial(self) -> TropicalPolynomial:
        """Load a tropical polynomial file."""
        return parse_polynomial_text(self._read())

    def load_report(self) -> InvariantReport:
        """Load a saved invariant report (JSON is read as YAML)."""
        data = self._load_yaml()
        if not isinstance(data, dict) or "curves" not in data:
            raise InvalidInputError(f"{self.data_file_path} is not an invariant report")
        return InvariantReport.from_dict(data)

    def load_curves(self) -> List[MarkedTropicalCurve]:
        """Marked curves from a report, a list of curve records or a single record."""
        data = self._load_yaml()
        if isinstance(data, dict) and "curves" in data:
            return [record.curve for record in InvariantReport.from_dict(data).curves]
        if isinstance(data, dict):
            return [MarkedTropicalCurve.from_dict(data)]
        if isinstance(data, list):
            return [MarkedTropicalCurve.from_dict(item) for item in data]
        raise InvalidInputError(f"{self.data_file_path} holds no marked curves")

    @staticmethod
    def save_report(data: Dict[str, Any], output_path: str) -> None:
        """Write ``data`` as YAML for .yaml/.yml paths, JSON otherwise."""
        try:
            with open(output_path, "w", encoding="utf-8") as file:
                if output_path.endswith((".yaml", ".yml")):
                    yaml.safe_dump(data, file, default_flow_style=False, sort_keys=False)
                else:
                    json.dump(data, file, indent=2)
                    file.write("\n")
        except OSError as e:
            raise InvalidInputError(f"Failed to save report to {output_path}: {e}")
