# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Subcommand implementations behind main.py.

Each ``cmd_*`` function takes a validated :class:`CommandConfig`, prints its
result to stdout and returns the process exit code.
"""

import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from app.data_utils import TropicalDataManager, parse_polynomial_text
from app.errors import (
    InconsistentMarkingError,
    InternalCheckError,
    InvalidInputError,
    TraceResidueError,
    TropwittError,
)
from app.gw import GWForm
from app.lattice import LatticePolygon, parse_polygon_spec, parse_vertices
from app.lattice_paths import ORIENTATIONS, CurveRecord, InvariantReport, invariants
from app.settings import Settings, load_settings
from app.svg import curve_scene, subdivision_scene, write_svg
from app.tower import reconstruct
from app.tropical import (
    TropicalCurve,
    curve_multiplicities,
    curve_of,
    genus,
    is_nodal,
    is_simple,
)
from app.verify import SUITES, CheckResult, run_suite

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("invariants", "curves", "verify", "tropicalize", "tower")
AREA_SUITES = ("triangle", "vertex")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


class CommandConfig(BaseModel):
    """Parsed command line, validated before any work starts."""

    model_config = {"extra": "forbid"}

    subcommand: str
    suite: Optional[str] = None
    polygon: Optional[str] = None
    vertices: Optional[str] = None
    genus: int = 0
    orientation: str = "xy"
    json_output: bool = False
    table: bool = False
    svg: Optional[str] = None
    output: Optional[str] = None
    input: Optional[str] = None
    terms: Optional[str] = None
    curve_file: Optional[str] = None
    index: int = 0
    m_max: Optional[int] = None
    max_double_area: Optional[int] = None
    max_det: Optional[int] = None
    threads: Optional[int] = None
    precision_digits: Optional[int] = None
    tolerance_identity: Optional[float] = None
    tolerance_product: Optional[float] = None
    tolerance_hessian: Optional[float] = None
    log_level: Optional[str] = None
    config: Optional[str] = None

    @field_validator("subcommand")
    @classmethod
    def _one_subcommand(cls, value: str) -> str:
        if value not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand '{value}'")
        return value

    @field_validator("genus", "index")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"must be >= 0, got {value}")
        return value

    @field_validator("m_max", "max_double_area", "max_det")
    @classmethod
    def _positive_range(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"ranges must be positive, got {value}")
        return value

    @field_validator("orientation")
    @classmethod
    def _known_orientation(cls, value: str) -> str:
        if value not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "CommandConfig":
        if self.polygon and self.vertices:
            raise ValueError("give either --polygon or --vertices, not both")
        if self.subcommand == "verify" and self.suite not in SUITES + ("all",):
            raise ValueError(f"verify needs one of {SUITES + ('all',)}")
        if self.subcommand == "tropicalize" and not (self.input or self.terms):
            raise ValueError("tropicalize needs a polynomial file or --terms")
        return self

    @classmethod
    def build(cls, **values: Any) -> "CommandConfig":
        try:
            return cls(**values)
        except ValidationError as e:
            raise InvalidInputError(f"Invalid command line: {e}")

    def settings(self) -> Settings:
        return load_settings(
            self.config,
            threads=self.threads,
            precision_digits=self.precision_digits,
            tolerance_identity=self.tolerance_identity,
            tolerance_product=self.tolerance_product,
            tolerance_hessian=self.tolerance_hessian,
            log_level=self.log_level,
        )

    def lattice_polygon(self) -> LatticePolygon:
        if self.vertices:
            return parse_vertices(self.vertices)
        return parse_polygon_spec(self.polygon or "degree:3")


def _fmt(value: Fraction) -> str:
    return str(value)


def _print_json(data: Dict[str, Any]) -> None:
    print(json.dumps(data, indent=2))


def summary_line(report: InvariantReport) -> str:
    """``N=12 W=8 NA1=8<1>+2h``"""
    return f"N={report.N} W={report.W} NA1={report.NA1.pretty(compact=True)}"


def curve_table(records: List[CurveRecord]) -> List[str]:
    lines = ["#  cells  marks                         mult_C  mult_R  mult_A1"]
    for number, record in enumerate(records):
        marks = " ".join(f"{a}-{b}" for a, b in record.curve.marked)
        lines.append(
            f"{number:<3}{len(record.curve.subdivision.cells):<7}{marks:<30}"
            f"{record.mult_c:<8}{record.mult_r:<8}{record.mult_a1.pretty()}"
        )
    return lines


def _compute_report(config: CommandConfig, settings: Settings) -> InvariantReport:
    polygon = config.lattice_polygon()
    return invariants(polygon, config.genus, config.orientation, settings.threads)


def _save(config: CommandConfig, data: Dict[str, Any]) -> None:
    if config.output:
        TropicalDataManager.save_report(data, config.output)
        logger.info("report written to %s", config.output)


def cmd_invariants(config: CommandConfig) -> int:
    settings = config.settings()
    report = _compute_report(config, settings)
    _save(config, report.to_dict())
    if config.json_output:
        _print_json(report.to_dict())
        return EXIT_OK
    print(summary_line(report))
    if config.table:
        for line in curve_table(list(report.curves)):
            print(line)
    return EXIT_OK


def cmd_curves(config: CommandConfig) -> int:
    settings = config.settings()
    report = _compute_report(config, settings)
    records = list(report.curves)
    if config.json_output:
        _print_json({"curves": [r.to_dict() for r in records]})
    else:
        for line in curve_table(records):
            print(line)
        print(summary_line(report))
    if config.svg:
        if not records:
            raise InvalidInputError("no curves to draw")
        if config.index >= len(records):
            raise InvalidInputError(f"curve index {config.index} out of range 0..{len(records) - 1}")
        curve = records[config.index].curve
        write_svg(config.svg, [subdivision_scene(curve.subdivision, curve.marked)])
    return EXIT_OK


def _suite_limit(config: CommandConfig, suite: str) -> Optional[int]:
    if suite in AREA_SUITES:
        return config.max_double_area
    if suite == "parallelogram":
        return config.max_det
    return config.m_max


def cmd_verify(config: CommandConfig) -> int:
    settings = config.settings()
    suites = SUITES if config.suite == "all" else (str(config.suite),)
    results: List[CheckResult] = []
    for suite in suites:
        results.extend(run_suite(suite, settings, _suite_limit(config, suite)))
    passed = all(r.passed for r in results)
    data = {"checks": [r.to_dict() for r in results], "passed": passed}
    _save(config, data)
    if config.json_output:
        _print_json(data)
    else:
        for result in results:
            print(result.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if passed else EXIT_FAILURE


def tropicalize(curve: TropicalCurve) -> Dict[str, Any]:
    """Subdivision, curve, genus, flags and (when nodal) multiplicities."""
    s = curve.subdivision
    nodal = is_nodal(s)
    data: Dict[str, Any] = {
        "polygon": [list(v) for v in s.polygon.vertices],
        "cells": [[list(v) for v in c.vertices] for c in s.cells],
        "kinds": s.kinds,
        "vertices": [[_fmt(x), _fmt(y)] for x, y in curve.vertices],
        "edges": [
            {
                "dual": [list(e.dual[0]), list(e.dual[1])],
                "weight": e.weight,
                "direction": list(e.direction),
                "ray": e.is_ray,
                "cells": list(e.cells),
            }
            for e in curve.edges
        ],
        "genus": genus(s) if nodal else None,
        "nodal": nodal,
        "simple": is_simple(s),
    }
    if nodal:
        mult = curve_multiplicities(s)
        data["mult_c"] = mult.mult_c
        data["mult_r"] = mult.mult_r
        data["mult_a1"] = mult.mult_a1.to_dict()
    return data


def cmd_tropicalize(config: CommandConfig) -> int:
    if config.terms:
        f = parse_polynomial_text(config.terms)
    else:
        f = TropicalDataManager(config.input).load_polynomial()
    curve = curve_of(f)
    data = tropicalize(curve)
    _save(config, data)
    if config.svg:
        write_svg(config.svg, [curve_scene(curve), subdivision_scene(curve.subdivision)])
    if config.json_output:
        _print_json(data)
        return EXIT_OK
    for cell, kind in zip(data["cells"], data["kinds"]):
        print(f"cell {kind} {' '.join(f'{x},{y}' for x, y in cell)}")
    for number, (x, y) in enumerate(data["vertices"]):
        print(f"vertex {number} ({x}, {y})")
    for edge in data["edges"]:
        kind = "ray" if edge["ray"] else "edge"
        print(
            f"{kind} cells={edge['cells']} direction={tuple(edge['direction'])} weight={edge['weight']}"
        )
    genus_text = "-" if data["genus"] is None else data["genus"]
    print(f"genus {genus_text} nodal={data['nodal']} simple={data['simple']}")
    if data["nodal"]:
        form = GWForm.from_dict(data["mult_a1"])
        print(f"mult_C={data['mult_c']} mult_R={data['mult_r']} mult_A1={form.pretty()}")
    else:
        print("not nodal: multiplicities withheld")
    return EXIT_OK


def cmd_tower(config: CommandConfig) -> int:
    if config.curve_file:
        curves = TropicalDataManager(config.curve_file).load_curves()
    else:
        settings = config.settings()
        curves = [r.curve for r in _compute_report(config, settings).curves]
    if config.index >= len(curves):
        raise InvalidInputError(f"curve index {config.index} out of range (have {len(curves)})")
    report = reconstruct(curves[config.index])
    if config.json_output:
        _print_json(
            {
                "steps": [step.line() for step in report.tower.steps],
                "dim_F": report.tower.dim_F,
                "dim_M": report.tower.dim_M,
                "weight": report.weight.to_dict(),
                "trace": report.traced.to_dict(),
                "matches": report.matches,
            }
        )
    else:
        for line in report.lines():
            print(line)
    if config.svg:
        curve = curves[config.index]
        write_svg(config.svg, [subdivision_scene(curve.subdivision, curve.marked)])
    return EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "curves": cmd_curves,
    "verify": cmd_verify,
    "tropicalize": cmd_tropicalize,
    "tower": cmd_tower,
}


def run(config: CommandConfig) -> int:
    """Dispatch and map errors to exit codes (2 invalid input, 1 internal failure)."""
    try:
        return COMMANDS[config.subcommand](config)
    except (InternalCheckError, TraceResidueError, InconsistentMarkingError) as e:
        logger.error("internal check failed: %s", e)
        print(f"error: {e}")
        return EXIT_FAILURE
    except (TropwittError, FileNotFoundError) as e:
        logger.error("invalid input: %s", e)
        print(f"error: {e}")
        return EXIT_INVALID
