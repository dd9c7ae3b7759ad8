# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Pytest configuration and fixtures for tropwitt tests."""

import os

import pytest

from app.lattice import LatticePolygon, degree_polygon
from app.lattice_paths import invariants
from app.settings import ENV_CONFIG, ENV_LOG_LEVEL, ENV_THREADS, Settings
from app.tropical import DualSubdivision, MarkedTropicalCurve

SAMPLE_DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), "sample-data")


def _polygon(*points):
    return LatticePolygon(tuple(points))


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep user environment variables out of every test."""
    for name in (ENV_THREADS, ENV_LOG_LEVEL, ENV_CONFIG):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def settings():
    """Default settings."""
    return Settings()


@pytest.fixture
def sample_path():
    """Path builder for files in sample-data/."""

    def build(name):
        return os.path.join(SAMPLE_DATA, name)

    return build


@pytest.fixture
def quadrilateral_subdivision():
    """Two triangles of double area 3 glued along the length 3 edge (0,0)-(3,0)."""
    return DualSubdivision(
        _polygon((0, 0), (2, -1), (3, 0), (1, 1)),
        (
            _polygon((0, 0), (3, 0), (1, 1)),
            _polygon((0, 0), (2, -1), (3, 0)),
        ),
    )


@pytest.fixture
def quadrilateral_curve(quadrilateral_subdivision):
    """The quadrilateral with its three boundary marks."""
    return MarkedTropicalCurve(
        quadrilateral_subdivision,
        (((3, 0), (1, 1)), ((1, 1), (0, 0)), ((0, 0), (2, -1))),
    )


@pytest.fixture
def parallelogram_curve():
    """Two triangles with one interior point each, unimodular edges throughout."""
    subdivision = DualSubdivision(
        _polygon((0, 0), (2, 1), (3, 3), (1, 2)),
        (
            _polygon((0, 0), (2, 1), (1, 2)),
            _polygon((2, 1), (3, 3), (1, 2)),
        ),
    )
    return MarkedTropicalCurve(
        subdivision,
        (((0, 0), (2, 1)), ((1, 2), (0, 0)), ((2, 1), (3, 3))),
    )


@pytest.fixture
def line_subdivision():
    """The single triangle of degree 1."""
    polygon = degree_polygon(1)
    return DualSubdivision(polygon, (polygon,))


@pytest.fixture(scope="session")
def cubic_report():
    """Rational cubics through 8 points, computed once."""
    return invariants(degree_polygon(3), 0)
