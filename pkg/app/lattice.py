# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Lattice polygon primitives and the unimodular normal form of triangles."""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, List, Sequence, Tuple

import sympy as sp
from mpmath import mp

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from app.errors import DegenerateGeometryError, InternalCheckError, InvalidInputError

logger = logging.getLogger(__name__)

Point = Tuple[int, int]
Edge = Tuple[Point, Point]


def cross(o: Point, a: Point, b: Point) -> int:
    """Twice the signed area of the triangle o, a, b."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lattice_length(p: Point, q: Point) -> int:
    """Number of lattice points on the segment minus one."""
    if tuple(p) == tuple(q):
        raise DegenerateGeometryError(f"lattice length of a point {tuple(p)}")
    return gcd(abs(q[0] - p[0]), abs(q[1] - p[1]))


def primitive(vector: Point) -> Point:
    g = gcd(abs(vector[0]), abs(vector[1]))
    if g == 0:
        raise DegenerateGeometryError("zero vector has no direction")
    return (vector[0] // g, vector[1] // g)


def edge_key(p: Point, q: Point) -> Edge:
    """Orientation-free key for a segment."""
    return (p, q) if p <= q else (q, p)


def convex_hull(points: Iterable[Point]) -> List[Point]:
    """Counterclockwise hull vertices, collinear points dropped."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) < 3:
        return pts
    lower: List[Point] = []
    for p in pts:
        while len(lower) > 1 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) > 1 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon with counterclockwise vertices.

    Vertices are normalized on construction: collinear points are dropped
    and the list starts at the lexicographically smallest vertex.
    """

    vertices: Tuple[Point, ...]

    def __post_init__(self) -> None:
        given = [tuple(int(c) for c in v) for v in self.vertices]
        hull = convex_hull(given)
        if len(hull) < 3:
            raise DegenerateGeometryError(f"degenerate polygon {given}")
        for v in given:
            if v not in hull and not self._on_boundary(hull, v):
                raise InvalidInputError(f"vertex {v} makes the polygon non-convex")
        object.__setattr__(self, "vertices", tuple(hull))
        if self.double_area != 2 * self.interior_points + self.boundary_points - 2:
            raise InternalCheckError(f"Pick identity fails for {self.vertices}")

    @staticmethod
    def _on_boundary(hull: Sequence[Point], v: Point) -> bool:
        for a, b in zip(hull, list(hull[1:]) + [hull[0]]):
            if cross(a, b, v) == 0 and min(a, b) <= v <= max(a, b):
                return True
        return False

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "LatticePolygon":
        return cls(tuple(convex_hull(points)))

    @property
    def edges(self) -> List[Edge]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @cached_property
    def double_area(self) -> int:
        vs = self.vertices
        total = sum(
            vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
            for i in range(len(vs))
        )
        return abs(total)

    @cached_property
    def boundary_points(self) -> int:
        return sum(lattice_length(a, b) for a, b in self.edges)

    def _side_signs(self, point: Point) -> List[int]:
        return [cross(a, b, point) for a, b in self.edges]

    def contains(self, point: Point) -> bool:
        return all(s >= 0 for s in self._side_signs(point))

    def is_interior(self, point: Point) -> bool:
        return all(s > 0 for s in self._side_signs(point))

    def _bounding_box(self) -> Iterable[Point]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                yield (x, y)

    @cached_property
    def interior_points(self) -> int:
        return sum(1 for pt in self._bounding_box() if self.is_interior(pt))

    @cached_property
    def lattice_points(self) -> Tuple[Point, ...]:
        return tuple(pt for pt in self._bounding_box() if self.contains(pt))

    @cached_property
    def boundary_lattice_points(self) -> Tuple[Point, ...]:
        return tuple(pt for pt in self.lattice_points if not self.is_interior(pt))

    def on_boundary(self, p: Point, q: Point) -> bool:
        """True if the segment pq lies on one edge of the polygon."""
        return any(cross(a, b, p) == 0 and cross(a, b, q) == 0 for a, b in self.edges)

    @property
    def is_triangle(self) -> bool:
        return len(self.vertices) == 3

    @property
    def is_parallelogram(self) -> bool:
        if len(self.vertices) != 4:
            return False
        a, b, c, d = self.vertices
        return (b[0] - a[0], b[1] - a[1]) == (c[0] - d[0], c[1] - d[1])

    def translated(self, shift: Point) -> "LatticePolygon":
        return LatticePolygon(
            tuple((x + shift[0], y + shift[1]) for x, y in self.vertices)
        )

    def swapped(self) -> "LatticePolygon":
        """Mirror image under (x, y) -> (y, x)."""
        return LatticePolygon(tuple((y, x) for x, y in self.vertices))

    def to_text(self) -> str:
        return " ".join(f"{x},{y}" for x, y in self.vertices)

    def __str__(self) -> str:
        return f"Conv{{{', '.join(str(v) for v in self.vertices)}}}"


def degree_polygon(d: int) -> LatticePolygon:
    """The triangle Conv{(0,0),(d,0),(0,d)} of plane curves of degree d."""
    if d < 1:
        raise InvalidInputError(f"degree must be positive, got {d}")
    return LatticePolygon(((0, 0), (d, 0), (0, d)))


def rect_polygon(a: int, b: int) -> LatticePolygon:
    if a < 1 or b < 1:
        raise InvalidInputError(f"rectangle sides must be positive, got {a}x{b}")
    return LatticePolygon(((0, 0), (a, 0), (a, b), (0, b)))


_PAIR = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*$")


def parse_vertices(text: str) -> LatticePolygon:
    """Parse ``x,y;x,y;...`` or whitespace separated ``x,y`` pairs."""
    chunks = [c for c in re.split(r"[;\s]+", text.strip()) if c]
    points = []
    for chunk in chunks:
        match = _PAIR.match(chunk)
        if not match:
            raise InvalidInputError(f"Invalid vertex '{chunk}' in polygon '{text}'")
        points.append((int(match.group(1)), int(match.group(2))))
    return LatticePolygon(tuple(points))


def parse_polygon_spec(spec: str) -> LatticePolygon:
    """Presets ``degree:d`` and ``rect:a,b``, or an explicit vertex list."""
    spec = spec.strip()
    try:
        if spec.startswith("degree:"):
            return degree_polygon(int(spec.split(":", 1)[1]))
        if spec.startswith("rect:"):
            a, b = spec.split(":", 1)[1].split(",")
            return rect_polygon(int(a), int(b))
    except ValueError as e:
        if isinstance(e, InvalidInputError):
            raise
        raise InvalidInputError(f"Invalid polygon preset '{spec}': {e}")
    return parse_vertices(spec)


@dataclass(frozen=True)
class NormalTriangle:
    """Conv{(0,m),(p,0),(q,0)} with 0 <= p < q <= m."""

    m: int
    p: int
    q: int

    def __post_init__(self) -> None:
        if not (0 <= self.p < self.q <= self.m):
            raise InvalidInputError(
                f"need 0 <= p < q <= m, got m={self.m} p={self.p} q={self.q}"
            )

    @property
    def d_p(self) -> int:
        return gcd(self.p, self.m)

    @property
    def d_q(self) -> int:
        return gcd(self.q, self.m)

    @property
    def double_area(self) -> int:
        return self.m * (self.q - self.p)

    @property
    def edge_lengths(self) -> Tuple[int, int, int]:
        """Lattice lengths of sigma, sigma' and sigma''."""
        return (self.q - self.p, self.d_p, self.d_q)

    @property
    def polygon(self) -> LatticePolygon:
        return LatticePolygon(((self.p, 0), (self.q, 0), (0, self.m)))

    @property
    def interior_points(self) -> int:
        return self.polygon.interior_points


Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]


def _matmul(a: Matrix2, b: Matrix2) -> Matrix2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _apply(a: Matrix2, v: Point) -> Point:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


@dataclass(frozen=True)
class UnimodularMap:
    """Affine lattice map x -> A x + b with det A = +-1."""

    matrix: Matrix2 = ((1, 0), (0, 1))
    translation: Point = (0, 0)

    def __post_init__(self) -> None:
        if abs(self.det) != 1:
            raise InvalidInputError(f"matrix {self.matrix} is not unimodular")

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def __call__(self, point: Point) -> Point:
        x, y = _apply(self.matrix, point)
        return (x + self.translation[0], y + self.translation[1])

    def then(self, other: "UnimodularMap") -> "UnimodularMap":
        """Composition: apply self first, then other."""
        matrix = _matmul(other.matrix, self.matrix)
        shifted = _apply(other.matrix, self.translation)
        translation = (
            shifted[0] + other.translation[0],
            shifted[1] + other.translation[1],
        )
        return UnimodularMap(matrix, translation)

    def image(self, polygon: LatticePolygon) -> LatticePolygon:
        return LatticePolygon(tuple(self(v) for v in polygon.vertices))


def _bezout(a: int, b: int) -> Tuple[int, int]:
    x, y, g = igcdex(a, b)
    x, y, g = int(x), int(y), int(g)
    if g < 0:
        x, y = -x, -y
    if a * x + b * y != 1:
        raise InternalCheckError(f"no Bezout pair for non-primitive ({a}, {b})")
    return x, y


def normal_form(
    triangle: LatticePolygon, distinguished: Edge
) -> Tuple[UnimodularMap, NormalTriangle]:
    """Map a lattice triangle to Conv{(0,m),(p,0),(q,0)}.

    The distinguished edge lands on [(q,0),(0,m)]. Of the two remaining
    edges, the shorter one (ties: smaller far endpoint) goes to the x-axis.
    """
    if not triangle.is_triangle:
        raise DegenerateGeometryError(f"{triangle} is not a triangle")
    ends = {tuple(distinguished[0]), tuple(distinguished[1])}
    if len(ends) != 2 or not ends <= set(triangle.vertices):
        raise InvalidInputError(f"{distinguished} is not an edge of {triangle}")
    (apex,) = [v for v in triangle.vertices if v not in ends]
    far = sorted(ends, key=lambda v: (lattice_length(apex, v), v))
    short_end, long_end = far[0], far[1]
    len_short = lattice_length(apex, short_end)
    len_long = lattice_length(apex, long_end)

    a, b = primitive((short_end[0] - apex[0], short_end[1] - apex[1]))
    n, m_ = _bezout(a, b)
    bezout: Matrix2 = ((n, m_), (b, -a))
    result = UnimodularMap(bezout, _apply(bezout, (-apex[0], -apex[1])))
    w1, w2 = primitive(
        _apply(bezout, (long_end[0] - apex[0], long_end[1] - apex[1]))
    )
    if w2 < 0:
        result = result.then(UnimodularMap(((1, 0), (0, -1))))
        w2 = -w2
    shift = -((-w1) // w2)
    p = len_long * (shift * w2 - w1)
    result = result.then(UnimodularMap(((1, -shift), (0, 1)), (p, 0)))
    normal = NormalTriangle(len_long * w2, p, p + len_short)

    if result(short_end) != (normal.q, 0) or result(long_end) != (0, normal.m):
        raise InternalCheckError(f"normal form construction failed for {triangle}")
    logger.debug("normal form of %s is %s", triangle, normal)
    return result, normal


def sine_identity_check(m: int, digits: int = 40, tolerance: float = 1e-9) -> float:
    """Product of (1 - zeta_m^j) for j = 1..m-1; equals m."""
    if m < 2:
        raise InvalidInputError(f"sine identity needs m >= 2, got {m}")
    with mp.workdps(digits):
        product = mp.mpc(1)
        for j in range(1, m):
            product *= 1 - mp.expjpi(mp.mpf(2 * j) / m)
        if abs(product.imag) > tolerance:
            raise InternalCheckError(
                f"sine product for m={m} has imaginary part {mp.nstr(product.imag, 5)}"
            )
        return float(product.real)
