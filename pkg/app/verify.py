# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Numerical checks of the node and weight lemmas behind the multiplicities.

Each check is a pure computation returning a :class:`CheckResult`; tolerance
breaches become failed records, never exceptions. Complex arithmetic runs in
mpmath at ``precision_digits`` decimal digits.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import sympy as sp
from mpmath import mp

from app.errors import (
    InternalCheckError,
    InvalidInputError,
    NotANodeError,
    TropwittError,
)
from app.gw import (
    MINUS_ONE,
    ONE,
    ExtensionStep,
    GWForm,
    SquareClass,
    trace_oracle,
    trace_step,
)
from app.lattice import NormalTriangle, sine_identity_check
from app.settings import Settings
from app.tower import vertex_trace
from app.tropical import triangle_weight_class, vertex_multiplicities

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 40

SUITES = (
    "chebyshev",
    "triangle",
    "parallelogram",
    "traces",
    "sine",
    "deformation",
    "vertex",
)

DEFAULT_RANGES = {
    "chebyshev": 12,
    "triangle": 12,
    "parallelogram": 8,
    "traces": 6,
    "sine": 12,
    "deformation": 8,
    "vertex": 12,
}

TRACE_VALUES = (1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10)

SPLIT = "split"
SOLITARY = "solitary"


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: str
    passed: bool
    residual: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} {self.params} {status} residual={self.residual:.3g}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": self.params,
            "passed": self.passed,
            "residual": self.residual,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckResult":
        try:
            return cls(
                str(data["name"]),
                str(data["params"]),
                bool(data["passed"]),
                float(data["residual"]),
                str(data.get("detail", "")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Invalid check record {data!r}: {e}")


def _root(order: int, k: int) -> Any:
    """zeta_order^k as an mpc."""
    return mp.expjpi(mp.mpf(2 * k) / order)


def _close(a: Any, b: Any, tolerance: Any) -> bool:
    return abs(a - b) <= tolerance * max(1, abs(a), abs(b))


def _to_fraction(value: Any, max_denominator: int, tolerance: float) -> Optional[Fraction]:
    """Nearest rational with bounded denominator, if it is close enough."""
    value = mp.mpf(value)
    exact = Fraction(mp.nstr(value, mp.dps))
    candidate = exact.limit_denominator(max_denominator)
    if abs(mp.mpf(candidate.numerator) / candidate.denominator - value) > tolerance * max(
        1, abs(value)
    ):
        return None
    return candidate


# ---------------------------------------------------------------------------
# curves with a triangular Newton polygon


@dataclass(frozen=True)
class NodeSolution:
    """Parameters t != s with the same image, for one ordering of the branches."""

    i: int
    j: int
    mu: Any
    nu: Any
    zeta: Any
    t: Any
    s: Any

    @property
    def local_factor(self) -> Any:
        t, s = self.t, self.s
        return (t - s) / (t * (t - 1) * s * (s - 1))


def _parametrization(t: Any, m: int, p: int, q: int) -> Tuple[Any, Any]:
    """x(t) = t^m, y(t) = t^p (t - 1)^(q - p) with alpha = beta = 1."""
    return t ** m, t ** p * (t - 1) ** (q - p)


def node_solutions(m: int, p: int, q: int, digits: int = DEFAULT_DIGITS) -> List[NodeSolution]:
    """All ordered solutions (each node appears twice)."""
    triangle = NormalTriangle(m, p, q)
    width = q - p
    order = m * width
    expected = (m - 1) * width - (triangle.d_p - 1) - (triangle.d_q - 1)
    with mp.workdps(digits):
        eps = mp.mpf(10) ** (-(digits // 2))
        found = []
        for i in range(1, m):
            mu = _root(m, i)
            for j in range(1, width + 1):
                e_zeta = (i * p + j * m) % order
                e_zeta_mu = (i * q + j * m) % order
                if e_zeta == 0 or e_zeta_mu == 0:
                    continue
                zeta = _root(order, e_zeta)
                t = (1 - zeta) / (1 - _root(order, e_zeta_mu))
                s = t * mu
                xt, yt = _parametrization(t, m, p, q)
                xs, ys = _parametrization(s, m, p, q)
                if not (_close(xt, xs, eps) and _close(yt, ys, eps)):
                    raise InternalCheckError(
                        f"parameters t={mp.nstr(t, 8)}, s={mp.nstr(s, 8)} do not "
                        f"give a node for (m,p,q)=({m},{p},{q})"
                    )
                found.append(NodeSolution(i, j, mu, _root(width, j), zeta, t, s))
    if len(found) != expected:
        raise InternalCheckError(
            f"{len(found)} node parameters for ({m},{p},{q}), expected {expected}"
        )
    return found


def triangle_nodes(m: int, p: int, q: int, digits: int = DEFAULT_DIGITS) -> List[NodeSolution]:
    """One solution per node, after pairing (t, s) with (s, t)."""
    solutions = node_solutions(m, p, q, digits)
    with mp.workdps(digits):
        eps = mp.mpf(10) ** (-(digits // 2))
        used = [False] * len(solutions)
        nodes = []
        for k, solution in enumerate(solutions):
            if used[k]:
                continue
            partner = next(
                (
                    n
                    for n in range(k + 1, len(solutions))
                    if not used[n] and _close(solutions[n].t, solution.s, eps)
                ),
                None,
            )
            if partner is None:
                raise InternalCheckError(
                    f"node parameter (i={solution.i}, j={solution.j}) has no partner"
                )
            used[k] = used[partner] = True
            nodes.append(solution)
    interior = NormalTriangle(m, p, q).interior_points
    if len(nodes) != interior:
        raise InternalCheckError(
            f"{len(nodes)} nodes for ({m},{p},{q}) but the triangle has {interior} interior points"
        )
    return nodes


def triangle_weight_value(m: int, p: int, q: int) -> Fraction:
    """Exact product over node solutions of (t-s)/(t(t-1)s(s-1))."""
    triangle = NormalTriangle(m, p, q)
    d_p, d_q, width = triangle.d_p, triangle.d_q, q - p
    m_p, m_q = m // d_p, m // d_q
    one_minus_zeta_mu = Fraction((m_q * width) ** d_q, d_p * width)
    one_minus_zeta = Fraction((m_p * width) ** d_p, d_q * width)
    one_minus_mu = Fraction(m ** width, d_p * d_q)
    return one_minus_zeta_mu ** 3 / (one_minus_zeta * one_minus_mu)


@dataclass(frozen=True)
class TriangleWeightResult:
    numeric: Any
    formula: Fraction
    residual: float
    weight_class: SquareClass
    expected_class: SquareClass

    @property
    def match(self) -> bool:
        return self.weight_class == self.expected_class


def triangle_weight_check(
    m: int, p: int, q: int, digits: int = DEFAULT_DIGITS, tolerance: float = 1e-6
) -> Tuple[TriangleWeightResult, CheckResult]:
    triangle = NormalTriangle(m, p, q)
    sign = (-1) ** triangle.interior_points
    solutions = node_solutions(m, p, q, digits)
    formula = triangle_weight_value(m, p, q)
    with mp.workdps(digits):
        product = mp.mpc(1)
        for solution in solutions:
            product *= solution.local_factor
        numeric = sign * product
        target = sign * mp.mpf(formula.numerator) / formula.denominator
        residual = float(abs(numeric - target) / abs(target))

    d_p, d_q, width = triangle.d_p, triangle.d_q, q - p
    weight_class = SquareClass.of(sign * formula)
    closed = SquareClass.of(
        sign * m ** (d_q + d_p + width) * width ** (d_p + d_q) * d_p ** d_p * d_q ** d_q
    )
    general = triangle_weight_class(triangle.polygon)
    result = TriangleWeightResult(numeric, formula, residual, weight_class, closed)
    passed = residual <= tolerance and result.match and general == closed
    check = CheckResult(
        "triangle-weight",
        f"m={m},p={p},q={q}",
        passed,
        residual,
        f"class {weight_class} expected {closed}",
    )
    return result, check


@dataclass(frozen=True)
class FAlgebra:
    """k'[beta]/(beta^degree - radicand) parametrizing the triangle curves."""

    degree: int
    radicand: Fraction

    @property
    def step(self) -> ExtensionStep:
        return ExtensionStep(self.degree, SquareClass.of(self.radicand), "beta")


def falgebra_of(
    m: int,
    p: int,
    q: int,
    a: Fraction = Fraction(1),
    b: Fraction = Fraction(1),
    eps1: Fraction = Fraction(1),
    eps2: Fraction = Fraction(1),
) -> FAlgebra:
    """Degree and radicand of the algebra of admissible beta."""
    triangle = NormalTriangle(m, p, q)
    a, b, eps1, eps2 = (Fraction(v) for v in (a, b, eps1, eps2))
    if 0 in (a, b, eps1, eps2):
        raise InvalidInputError("falgebra coefficients must be nonzero")
    width, d_p = q - p, triangle.d_p
    if eps1 ** width != 1 or eps2 ** d_p != 1:
        raise InvalidInputError(
            f"need eps1^{width} = eps2^{d_p} = 1, got eps1={eps1}, eps2={eps2}"
        )
    degree = m // d_p
    if degree * width * d_p != triangle.double_area:
        raise InternalCheckError(f"falgebra degree {degree} does not match ({m},{p},{q})")
    radicand = -eps2 * (-eps1 / a) ** (p // d_p) * (-1) ** (m * width // d_p) / b
    return FAlgebra(degree, radicand)


def triangle_trace_check(m: int, p: int, q: int) -> CheckResult:
    """Trace of the triangle weight through its beta-extension."""
    triangle = NormalTriangle(m, p, q)
    params = f"m={m},p={p},q={q}"
    lengths = triangle.edge_lengths
    if any(length % 2 == 0 for length in lengths):
        return CheckResult("triangle-trace", params, True, 0.0, "not applicable: even edge")
    sigma, sigma1, sigma2 = lengths
    sign = (-1) ** triangle.interior_points
    value = Fraction(sign * triangle.double_area, sigma * sigma1 * sigma2)
    degree = triangle.double_area // (sigma * sigma1)
    traced = trace_step(
        ExtensionStep(degree, SquareClass.atom("D"), "beta"), SquareClass.of(value), False
    )
    expected = GWForm.of(SquareClass.of(sign * sigma2), hyper=(degree - 1) // 2)
    oracle = trace_oracle(degree, 3, value)
    passed = traced == expected == oracle
    return CheckResult(
        "triangle-trace", params, passed, 0.0, f"{traced.pretty()} expected {expected.pretty()}"
    )


# ---------------------------------------------------------------------------
# parallelograms


@dataclass(frozen=True)
class ParallelogramResult:
    nodes: Tuple[Tuple[Any, Any], ...]
    expected: int
    residual: float
    real_squares: Optional[bool]

    @property
    def count(self) -> int:
        return len(self.nodes)


def parallelogram_check(
    a: int,
    b: int,
    c: int,
    d: int,
    alpha: Fraction,
    beta: Fraction,
    gamma: Fraction,
    delta: Fraction,
    digits: int = DEFAULT_DIGITS,
    tolerance: float = 1e-6,
) -> Tuple[ParallelogramResult, CheckResult]:
    """Nodes of (alpha x^a + beta y^b)(gamma x^c + delta y^d) = 0 on the torus."""
    if gcd(a, b) != 1 or gcd(c, d) != 1:
        raise InvalidInputError(f"need gcd(a,b) = gcd(c,d) = 1, got ({a},{b}), ({c},{d})")
    det = b * c - a * d
    if det == 0:
        raise InvalidInputError(f"ad = bc for ({a},{b},{c},{d})")
    alpha, beta, gamma, delta = (Fraction(v) for v in (alpha, beta, gamma, delta))
    if 0 in (alpha, beta, gamma, delta):
        raise InvalidInputError("parallelogram coefficients must be nonzero")
    params = f"a={a},b={b},c={c},d={d}"
    count = abs(det)

    with mp.workdps(digits):
        eps = mp.mpf(10) ** (-(digits // 2))

        def num(v: Fraction) -> Any:
            return mp.mpf(v.numerator) / v.denominator

        al, be, ga, de = num(alpha), num(beta), num(gamma), num(delta)
        log1 = mp.log(mp.mpc(-be / al))
        log2 = mp.log(mp.mpc(-de / ga))
        nodes: List[Tuple[Any, Any]] = []
        for k1 in range(count):
            for k2 in range(count):
                r1 = log1 + 2j * mp.pi * k1
                r2 = log2 + 2j * mp.pi * k2
                x = mp.exp((-d * r1 + b * r2) / det)
                y = mp.exp((a * r2 - c * r1) / det)
                if not any(_close(x, u, eps) and _close(y, v, eps) for u, v in nodes):
                    nodes.append((x, y))

        residual = mp.mpf(0)
        real_values = []
        for x, y in nodes:
            g1 = al * x ** a + be * y ** b
            g2 = ga * x ** c + de * y ** d
            g1x, g1xx = al * a * x ** (a - 1), al * a * (a - 1) * x ** (a - 2)
            g1y, g1yy = be * b * y ** (b - 1), be * b * (b - 1) * y ** (b - 2)
            g2x, g2xx = ga * c * x ** (c - 1), ga * c * (c - 1) * x ** (c - 2)
            g2y, g2yy = de * d * y ** (d - 1), de * d * (d - 1) * y ** (d - 2)
            gxx = g1xx * g2 + 2 * g1x * g2x + g1 * g2xx
            gyy = g1yy * g2 + 2 * g1y * g2y + g1 * g2yy
            gxy = g1x * g2y + g1y * g2x
            minus_det = -(gxx * gyy - gxy ** 2)
            square = (g1x * g2y - g1y * g2x) ** 2
            residual = max(residual, abs(minus_det - square) / max(abs(square), eps))
            residual = max(residual, abs(g1), abs(g2))
            if abs(mp.im(x)) < eps and abs(mp.im(y)) < eps:
                real_values.append(minus_det)

    real_squares: Optional[bool] = None
    if real_values:
        real_squares = all(
            abs(mp.im(v)) <= tolerance and mp.re(v) >= -tolerance for v in real_values
        )
    result = ParallelogramResult(tuple(nodes), count, float(residual), real_squares)
    passed = (
        result.count == count and result.residual <= tolerance and real_squares is not False
    )
    check = CheckResult(
        "parallelogram",
        params,
        passed,
        result.residual,
        f"{result.count} nodes, expected {count}",
    )
    return result, check


# ---------------------------------------------------------------------------
# Chebyshev polynomials and deformation patterns


@dataclass(frozen=True)
class ChebyshevData:
    m: int
    coefficients: Tuple[int, ...]
    critical_points: Tuple[Any, ...] = field(default=())

    def descending(self) -> List[int]:
        return list(reversed(self.coefficients))


def chebyshev_polynomial(m: int) -> sp.Poly:
    """T_m by the recurrence T_k = 2x T_{k-1} - T_{k-2}."""
    if m < 0:
        raise InvalidInputError(f"Chebyshev degree must be >= 0, got {m}")
    x = sp.Symbol("x")
    previous, current = sp.Poly(1, x), sp.Poly(x, x)
    if m == 0:
        return previous
    for _ in range(m - 1):
        previous, current = current, sp.Poly(2 * x, x) * current - previous
    return current


def chebyshev_data(m: int, digits: int = DEFAULT_DIGITS) -> ChebyshevData:
    poly = chebyshev_polynomial(m)
    coefficients = tuple(int(c) for c in reversed(poly.all_coeffs()))
    with mp.workdps(digits):
        points = tuple(
            mp.re((_root(2 * m, l) + _root(2 * m, -l)) / 2) for l in range(1, m)
        )
    return ChebyshevData(m, coefficients, points)


def _polyval(coefficients: Sequence[Any], x: Any, derivative: int = 0) -> Any:
    """Evaluate an ascending coefficient list or one of its derivatives."""
    total = mp.mpf(0)
    for k, coefficient in enumerate(coefficients):
        if k < derivative:
            continue
        factor = 1
        for r in range(derivative):
            factor *= k - r
        total += factor * coefficient * x ** (k - derivative)
    return total


def chebyshev_check(
    m: int, digits: int = DEFAULT_DIGITS, tolerance: float = 1e-9
) -> CheckResult:
    """Critical values and second derivatives of T_m at gamma_l."""
    if m < 2:
        raise InvalidInputError(f"Chebyshev check needs m >= 2, got {m}")
    data = chebyshev_data(m, digits)
    x = sp.Symbol("x")
    agrees = chebyshev_polynomial(m) == sp.Poly(sp.chebyshevt_poly(m, x), x)
    parity = all(c == 0 for k, c in enumerate(data.coefficients) if (m - k) % 2)
    with mp.workdps(digits):
        residual = mp.mpf(0)
        for l, gamma in enumerate(data.critical_points, start=1):
            sign = (-1) ** l
            zeta = _root(2 * m, l)
            second = sign * 4 * m ** 2 / (zeta - 1 / zeta) ** 2
            residual = max(
                residual,
                abs(_polyval(data.coefficients, gamma, 1)),
                abs(_polyval(data.coefficients, gamma) - sign),
                abs(_polyval(data.coefficients, gamma, 2) - second) / abs(second),
            )
    passed = agrees and parity and residual <= tolerance
    return CheckResult(
        "chebyshev",
        f"m={m}",
        passed,
        float(residual),
        "" if agrees and parity else "coefficients disagree with the recurrence or parity",
    )


@dataclass(frozen=True)
class DeformationResult:
    m: int
    choice: int
    nodes: Tuple[Tuple[Any, Any], ...]
    leading_gap: float
    product: Any
    expected: Any
    residual: float
    judged: bool
    class_ok: Optional[bool]

    @property
    def count(self) -> int:
        return len(self.nodes)


def _pattern(m: int, a: Any, b: Any, c: Any, choice: int) -> Tuple[List[Any], Any, Any]:
    """Ascending coefficients of g, the scale kappa and the unit u."""
    ac = a * c
    root = mp.sqrt(mp.mpc(ac))
    if m % 2:
        sign = 1
        kappa = _root(m, choice) * root
        unit = mp.mpc(1)
    else:
        sign = 1 if choice % 2 == 0 else -1
        mu = _root(2 * m, choice)
        kappa = mu * mp.root(mp.mpc(ac), 2 * m)
        unit = mu ** 2 * mp.root(mp.mpc(ac), m)
    chebyshev = chebyshev_polynomial(m).all_coeffs()[::-1]
    scale = sign * 2 * root / b
    coefficients = [scale * int(t) * kappa ** k for k, t in enumerate(chebyshev)]
    return coefficients, kappa, unit


def _critical_points(derivative: List[Any]) -> List[Any]:
    if len(derivative) == 2:
        return [-derivative[0] / derivative[1]]
    return list(mp.polyroots(derivative[::-1], maxsteps=200, extraprec=2 * mp.prec))


def deformation_pattern_check(
    m: int,
    a: Fraction = Fraction(1),
    b: Fraction = Fraction(1),
    c: Fraction = Fraction(1),
    choice: int = 0,
    digits: int = DEFAULT_DIGITS,
    tolerance: float = 1e-9,
    max_denominator: int = 10 ** 6,
) -> Tuple[DeformationResult, CheckResult]:
    """Nodes and weight of G = a y^2 + b y g(x) + c for one choice of g."""
    params = f"m={m},a={a},b={b},c={c},choice={choice}"
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if 0 in (a, b, c):
        raise InvalidInputError("deformation coefficients must be nonzero")
    if m < 2:
        vacuous = DeformationResult(m, choice, (), 0.0, 1, 1, 0.0, False, None)
        return vacuous, CheckResult("deformation", params, True, 0.0, "vacuous: m < 2")
    if not 0 <= choice < m:
        raise InvalidInputError(f"choice must lie in 0..{m - 1}, got {choice}")

    with mp.workdps(digits):
        eps = mp.mpf(10) ** (-(digits // 2))
        A, B, C = (mp.mpf(v.numerator) / v.denominator for v in (a, b, c))
        g, kappa, unit = _pattern(m, A, B, C, choice)
        leading_gap = abs(g[m - 1])
        derivative = [k * g[k] for k in range(1, m + 1)]
        nodes = []
        product = mp.mpc(1)
        residual = mp.mpf(0)
        genuine = True
        for x in _critical_points(derivative):
            gx = _polyval(g, x)
            y = -B * gx / (2 * A)
            value = A * y ** 2 + B * y * gx + C
            residual = max(residual, abs(value) / max(1, abs(C)))
            hessian = B * y * _polyval(g, x, 2) * 2 * A - (B * _polyval(g, x, 1)) ** 2
            if abs(hessian) <= eps:
                genuine = False
            nodes.append((x, y))
            product *= -hessian
        distinct = all(
            abs(nodes[i][0] - nodes[j][0]) > eps
            for i in range(len(nodes))
            for j in range(i)
        )

        ac = A * C
        chebyshev_product = (-1) ** (m - 1) * mp.mpf(4) ** (m - 1) * mp.mpf(m) ** (2 * m - 4)
        expected = (4 * ac * kappa ** 2) ** (m - 1) * chebyshev_product
        residual = max(residual, abs(product - expected) / abs(expected))

        real = abs(mp.im(product)) <= eps * abs(product) and abs(mp.im(unit)) <= eps
        class_ok: Optional[bool] = None
        if real and ac > 0:
            if m % 2:
                value = _to_fraction(mp.re(product), max_denominator, tolerance)
                class_ok = value is not None and SquareClass.of(value) == ONE
            else:
                # product = -u^(m-1) * ac * square
                value = _to_fraction(
                    mp.re(product / -(unit ** (m - 1))), max_denominator, tolerance
                )
                class_ok = value is not None and SquareClass.of(value) == SquareClass.of(a * c)

    result = DeformationResult(
        m,
        choice,
        tuple(nodes),
        float(leading_gap),
        product,
        expected,
        float(residual),
        class_ok is not None,
        class_ok,
    )
    passed = (
        result.count == m - 1
        and genuine
        and distinct
        and result.leading_gap <= tolerance
        and result.residual <= tolerance
        and class_ok is not False
    )
    if not genuine:
        detail = "degenerate critical point"
    elif result.judged:
        detail = f"{result.count} nodes, class {'ok' if class_ok else 'wrong'}"
    else:
        detail = f"{result.count} nodes, class not judged (non-real)"
    return result, CheckResult("deformation", params, passed, result.residual, detail)


def deformation_trace_check(m: int) -> CheckResult:
    """Trace of the deformation pattern weight from L down to F."""
    if m < 2:
        raise InvalidInputError(f"deformation trace needs m >= 2, got {m}")
    if m % 2:
        traced = trace_step(ExtensionStep(m, ONE, "u"), ONE, False)
        expected = GWForm.of(SquareClass.of(m), hyper=(m - 1) // 2)
        oracle = trace_oracle(m, 1, 1)
    else:
        traced = trace_step(ExtensionStep(m, SquareClass.atom("ac"), "u"), MINUS_ONE, True)
        expected = GWForm.hyperbolic(m // 2)
        oracle = trace_oracle(m, 2, -1, power=1)
    passed = traced == expected == oracle
    return CheckResult(
        "deformation-trace", f"m={m}", passed, 0.0, f"{traced.pretty()} expected {expected.pretty()}"
    )


# ---------------------------------------------------------------------------
# real nodes


def classify_real_node(hessian_det: Any) -> str:
    """split for det < 0 (x^2 - y^2), solitary for det > 0 (x^2 + y^2)."""
    if hessian_det == 0:
        raise NotANodeError()
    return SPLIT if hessian_det < 0 else SOLITARY


def welschinger_sign(hessian_dets: Sequence[Any]) -> int:
    solitary = sum(1 for det in hessian_dets if classify_real_node(det) == SOLITARY)
    return (-1) ** solitary


# ---------------------------------------------------------------------------
# suites


def normal_triangles(max_double_area: int) -> List[NormalTriangle]:
    """Every (m, p, q) with m (q - p) <= max_double_area."""
    found = []
    for m in range(1, max_double_area + 1):
        for width in range(1, min(m, max_double_area // m) + 1):
            for p in range(0, m - width + 1):
                found.append(NormalTriangle(m, p, p + width))
    return found


def _guard(name: str, params: str, check: Callable[[], CheckResult]) -> CheckResult:
    try:
        return check()
    except TropwittError as e:
        return CheckResult(name, params, False, float("inf"), str(e))


def _triangle_node_count(triangle: NormalTriangle, digits: int) -> CheckResult:
    nodes = triangle_nodes(triangle.m, triangle.p, triangle.q, digits)
    return CheckResult(
        "triangle-nodes",
        f"m={triangle.m},p={triangle.p},q={triangle.q}",
        True,
        0.0,
        f"{len(nodes)} nodes",
    )


def _falgebra(triangle: NormalTriangle) -> CheckResult:
    algebra = falgebra_of(triangle.m, triangle.p, triangle.q)
    width, d_p = triangle.edge_lengths[0], triangle.edge_lengths[1]
    passed = algebra.degree == triangle.double_area // (width * d_p)
    return CheckResult(
        "falgebra",
        f"m={triangle.m},p={triangle.p},q={triangle.q}",
        passed,
        0.0,
        f"degree {algebra.degree} radicand {algebra.radicand}",
    )


def _vertex(triangle: NormalTriangle) -> CheckResult:
    traced = vertex_trace(triangle.polygon)
    expected = vertex_multiplicities(triangle.polygon).m_a1
    return CheckResult(
        "vertex-trace",
        f"m={triangle.m},p={triangle.p},q={triangle.q}",
        traced == expected,
        0.0,
        traced.pretty(),
    )


def _trace_batch(m: int, D: int, uses_generator: bool) -> CheckResult:
    mismatches = []
    for c in TRACE_VALUES:
        step = ExtensionStep(m, SquareClass.of(D), "x")
        closed = trace_step(step, SquareClass.of(c), uses_generator)
        oracle = trace_oracle(m, D, c, power=1 if uses_generator else 0)
        if closed != oracle:
            mismatches.append(f"c={c}: {closed.pretty()} != {oracle.pretty()}")
    return CheckResult(
        "traces",
        f"m={m},D={D},generator={'yes' if uses_generator else 'no'}",
        not mismatches,
        float(len(mismatches)),
        "; ".join(mismatches),
    )


def _sine(m: int, digits: int, tolerance: float) -> CheckResult:
    value = sine_identity_check(m, digits, tolerance)
    residual = abs(value - m) / m
    return CheckResult("sine", f"m={m}", residual <= tolerance, residual)


PARALLELOGRAM_COEFFICIENTS = (Fraction(1), Fraction(-2), Fraction(3), Fraction(-1, 2))


PARALLELOGRAM_ENTRY_MAX = 3


def _parallelogram_shapes(max_det: int) -> List[Tuple[int, int, int, int]]:
    """Exponent pairs with entries in 0..3 and 0 < |ad - bc| <= max_det."""
    shapes = []
    bound = PARALLELOGRAM_ENTRY_MAX
    for a in range(0, bound + 1):
        for b in range(0, bound + 1):
            if gcd(a, b) != 1:
                continue
            for c in range(0, bound + 1):
                for d in range(0, bound + 1):
                    if gcd(c, d) != 1:
                        continue
                    if 0 < abs(a * d - b * c) <= max_det and (a, b) < (c, d):
                        shapes.append((a, b, c, d))
    return shapes


def suite_checks(name: str, limit: int, settings: Settings) -> List[Callable[[], CheckResult]]:
    """Deferred checks of one suite, in canonical order."""
    digits = settings.precision_digits
    thunks: List[Callable[[], CheckResult]] = []

    def add(check_name: str, params: str, fn: Callable[[], CheckResult]) -> None:
        thunks.append(lambda: _guard(check_name, params, fn))

    if name == "chebyshev":
        for m in range(2, limit + 1):
            add("chebyshev", f"m={m}", lambda m=m: chebyshev_check(m, digits, settings.tolerance_identity))
    elif name == "sine":
        for m in range(2, limit + 1):
            add("sine", f"m={m}", lambda m=m: _sine(m, digits, settings.tolerance_identity))
    elif name == "traces":
        for m in range(1, limit + 1):
            for D in TRACE_VALUES:
                for uses in (False, True):
                    add(
                        "traces",
                        f"m={m},D={D}",
                        lambda m=m, D=D, uses=uses: _trace_batch(m, D, uses),
                    )
    elif name == "triangle":
        for t in normal_triangles(limit):
            params = f"m={t.m},p={t.p},q={t.q}"
            add("triangle-nodes", params, lambda t=t: _triangle_node_count(t, digits))
            add(
                "triangle-weight",
                params,
                lambda t=t: triangle_weight_check(
                    t.m, t.p, t.q, digits, settings.tolerance_product
                )[1],
            )
            add("falgebra", params, lambda t=t: _falgebra(t))
    elif name == "parallelogram":
        al, be, ga, de = PARALLELOGRAM_COEFFICIENTS
        for a, b, c, d in _parallelogram_shapes(limit):
            add(
                "parallelogram",
                f"a={a},b={b},c={c},d={d}",
                lambda a=a, b=b, c=c, d=d: parallelogram_check(
                    a, b, c, d, al, be, ga, de, digits, settings.tolerance_hessian
                )[1],
            )
    elif name == "deformation":
        for m in range(2, limit + 1):
            for choice in range(m):
                add(
                    "deformation",
                    f"m={m},choice={choice}",
                    lambda m=m, choice=choice: deformation_pattern_check(
                        m,
                        choice=choice,
                        digits=digits,
                        tolerance=settings.tolerance_identity,
                        max_denominator=settings.rational_max_denominator,
                    )[1],
                )
            add(
                "deformation",
                f"m={m},a=2,b=-3,c=8",
                lambda m=m: deformation_pattern_check(
                    m,
                    Fraction(2),
                    Fraction(-3),
                    Fraction(8),
                    digits=digits,
                    tolerance=settings.tolerance_identity,
                    max_denominator=settings.rational_max_denominator,
                )[1],
            )
            add("deformation-trace", f"m={m}", lambda m=m: deformation_trace_check(m))
    elif name == "vertex":
        for t in normal_triangles(limit):
            params = f"m={t.m},p={t.p},q={t.q}"
            if not any(length % 2 == 0 for length in t.edge_lengths):
                add("triangle-trace", params, lambda t=t: triangle_trace_check(t.m, t.p, t.q))
            add("vertex-trace", params, lambda t=t: _vertex(t))
    else:
        raise InvalidInputError(f"unknown verification suite '{name}'")
    return thunks


def run_suite(
    name: str, settings: Settings, limit: Optional[int] = None
) -> List[CheckResult]:
    """Run one suite (or ``all``) and return its results in canonical order."""
    names = SUITES if name == "all" else (name,)
    if name != "all" and name not in SUITES:
        raise InvalidInputError(f"unknown verification suite '{name}'")
    if limit is not None and limit < 1:
        raise InvalidInputError(f"verification range must be positive, got {limit}")
    thunks: List[Callable[[], CheckResult]] = []
    for suite in names:
        bound = limit if limit is not None else DEFAULT_RANGES[suite]
        thunks.extend(suite_checks(suite, bound, settings))
    # mpmath precision is process global: every check uses the same digits
    with mp.workdps(settings.precision_digits):
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            results = list(pool.map(lambda thunk: thunk(), thunks))
    failed = [r for r in results if not r.passed]
    for result in failed:
        logger.warning("check failed: %s (%s)", result.line(), result.detail)
    logger.info("%d checks, %d failed", len(results), len(failed))
    return results
