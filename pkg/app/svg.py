# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Scene descriptions of curves and subdivisions, and their SVG rendering."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from app.lattice import Edge, edge_key
from app.tropical import PARALLELOGRAM, TRIANGLE, DualSubdivision, TropicalCurve

XY = Tuple[float, float]

CELL_FILL = {TRIANGLE: "#dbe9f6", PARALLELOGRAM: "#f6e7c8"}
OTHER_FILL = "#f4c7c3"
MARK_STROKE = "#c0392b"
PANEL_SIZE = 320.0
MARGIN = 24.0


@dataclass(frozen=True)
class Segment:
    start: XY
    end: XY
    label: str = ""
    stroke: str = "black"
    width: float = 1.5


@dataclass(frozen=True)
class Cell:
    points: Tuple[XY, ...]
    fill: str


@dataclass
class Scene:
    """Everything one panel draws, in model coordinates (y up)."""

    title: str
    cells: List[Cell] = field(default_factory=list)
    segments: List[Segment] = field(default_factory=list)
    dots: List[XY] = field(default_factory=list)

    def points(self) -> List[XY]:
        found = list(self.dots)
        for cell in self.cells:
            found.extend(cell.points)
        for segment in self.segments:
            found.extend((segment.start, segment.end))
        return found


def _xy(point: Tuple[Fraction, Fraction]) -> XY:
    return (float(point[0]), float(point[1]))


def curve_scene(curve: TropicalCurve, ray_length: Optional[float] = None) -> Scene:
    """Bounded edges and rays with weight labels (weight 1 is left unlabeled)."""
    scene = Scene("tropical curve")
    vertices = [_xy(v) for v in curve.vertices]
    scene.dots.extend(vertices)
    if ray_length is None:
        xs = [x for x, _ in vertices]
        ys = [y for _, y in vertices]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) if vertices else 0.0
        ray_length = max(1.0, span / 2)
    for edge in curve.edges:
        label = str(edge.weight) if edge.weight > 1 else ""
        start = vertices[edge.cells[0]]
        if edge.is_ray:
            dx, dy = edge.direction
            norm = (dx * dx + dy * dy) ** 0.5
            end = (start[0] + ray_length * dx / norm, start[1] + ray_length * dy / norm)
        else:
            end = vertices[edge.cells[1]]
        scene.segments.append(Segment(start, end, label))
    return scene


def subdivision_scene(s: DualSubdivision, marked: Sequence[Edge] = ()) -> Scene:
    """Filled cells, every edge, and the marked edges drawn heavier in red."""
    scene = Scene("dual subdivision")
    for index, cell in enumerate(s.cells):
        fill = CELL_FILL.get(s.kind(index), OTHER_FILL)
        scene.cells.append(Cell(tuple((float(x), float(y)) for x, y in cell.vertices), fill))
    marked_keys = {edge_key(*e): n for n, e in enumerate(marked, start=1)}
    for key in s.edges:
        a, b = (float(key[0][0]), float(key[0][1])), (float(key[1][0]), float(key[1][1]))
        if key in marked_keys:
            scene.segments.append(Segment(a, b, f"#{marked_keys[key]}", MARK_STROKE, 3.0))
        else:
            scene.segments.append(Segment(a, b, "", "#555555", 1.0))
    scene.dots.extend((float(x), float(y)) for x, y in sorted(s.vertices))
    return scene


def _transform(scene: Scene, offset_x: float) -> Callable[[XY], XY]:
    points = scene.points() or [(0.0, 0.0)]
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    scale = (PANEL_SIZE - 2 * MARGIN) / span
    min_x, max_y = min(xs), max(ys)

    def to_svg(p: XY) -> XY:
        return (offset_x + MARGIN + (p[0] - min_x) * scale, MARGIN + (max_y - p[1]) * scale)

    return to_svg


def _panel(scene: Scene, offset_x: float) -> List[str]:
    to_svg = _transform(scene, offset_x)
    out = [f"<g><title>{scene.title}</title>"]
    for cell in scene.cells:
        pts = " ".join("%.2f,%.2f" % to_svg(p) for p in cell.points)
        out.append(f"<polygon points='{pts}' fill='{cell.fill}' stroke='none'/>")
    for seg in scene.segments:
        (x1, y1), (x2, y2) = to_svg(seg.start), to_svg(seg.end)
        out.append(
            f"<line x1='{x1:.2f}' y1='{y1:.2f}' x2='{x2:.2f}' y2='{y2:.2f}' "
            f"stroke='{seg.stroke}' stroke-width='{seg.width}'/>"
        )
        if seg.label:
            out.append(
                f"<text x='{(x1 + x2) / 2 + 4:.2f}' y='{(y1 + y2) / 2 - 4:.2f}' "
                f"font-size='12'>{seg.label}</text>"
            )
    for dot in scene.dots:
        x, y = to_svg(dot)
        out.append(f"<circle cx='{x:.2f}' cy='{y:.2f}' r='2.5' fill='black'/>")
    out.append("</g>")
    return out


def render_svg(scenes: Sequence[Scene]) -> str:
    """Scenes side by side, each scaled to its own panel."""
    width = PANEL_SIZE * max(1, len(scenes))
    lines = [
        "<?xml version='1.0'?>",
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width:.0f}' "
        f"height='{PANEL_SIZE:.0f}'>",
    ]
    for index, scene in enumerate(scenes):
        lines.extend(_panel(scene, index * PANEL_SIZE))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path: str, scenes: Sequence[Scene]) -> None:
    with open(path, "w", encoding="utf-8") as file:
        file.write(render_svg(scenes))
