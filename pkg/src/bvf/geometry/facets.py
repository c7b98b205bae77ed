"""Jump facets of piecewise-constant functions and the L2-jump product."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .arrangement import Arc, Piece, Rect, Segment, Sphere, overlay
from .shapes import BVFunction, sphere_area

JUMP_TOL = 1e-12


@dataclass(frozen=True)
class JumpFacet:
    """A maximal piece of the jump set with constant one-sided values.

    ``normal`` points from the ``minus_value`` side to the ``plus_value``
    side.  For arcs and spheres it is the normal at the carrier midpoint and
    ``orientation`` is +1 when it points away from the center, -1 otherwise.
    """

    carrier: Segment | Arc | Rect | Sphere
    normal: tuple[float, ...]
    plus_value: float
    minus_value: float
    orientation: int = 1

    @property
    def measure(self) -> float:
        return self.carrier.measure

    @property
    def jump(self) -> float:
        return self.plus_value - self.minus_value


@dataclass(frozen=True)
class FacetPair:
    facet_u: JumpFacet
    facet_v: JumpFacet
    overlap: float
    normal_dot: float


@dataclass(frozen=True)
class JumpProductResult:
    value: float
    facet_pairs: tuple[FacetPair, ...]
    exactness: str = "exact"


def _oriented(piece: Piece, k: int) -> JumpFacet:
    plus, minus = float(piece.plus[k]), float(piece.minus[k])
    sign = 1
    if plus < minus:
        plus, minus, sign = minus, plus, -1
    normal = tuple(float(a) for a in sign * piece.normal)
    return JumpFacet(piece.carrier, normal, plus, minus, sign)


def _significant(jump: float, scale: float) -> bool:
    return abs(jump) > JUMP_TOL * max(scale, 1.0)


def _merge(facets_with_group: list[tuple[int, JumpFacet]]) -> list[JumpFacet]:
    merged: list[tuple[int, JumpFacet]] = []
    for group, f in facets_with_group:
        if merged:
            g0, prev = merged[-1]
            joined = _join(prev, f) if g0 == group else None
            if joined is not None:
                merged[-1] = (group, joined)
                continue
        merged.append((group, f))
    # close arcs that wrap around 2*pi
    out = [f for _, f in merged]
    if len(merged) >= 2:
        g_first, first = merged[0]
        g_last, last = merged[-1]
        if g_first == g_last and isinstance(first.carrier, Arc):
            joined = _join(last, replace(first, carrier=replace(first.carrier,
                                                                  theta0=first.carrier.theta0 + 2 * math.pi,
                                                                  theta1=first.carrier.theta1 + 2 * math.pi)))
            if joined is not None:
                out = [joined] + out[1:-1]
    return out


def _join(f: JumpFacet, g: JumpFacet) -> JumpFacet | None:
    if (f.plus_value, f.minus_value, f.orientation) != (g.plus_value, g.minus_value, g.orientation):
        return None
    a, b = f.carrier, g.carrier
    if isinstance(a, Segment) and isinstance(b, Segment):
        if np.allclose(a.b, b.a, rtol=0, atol=1e-12) and np.allclose(f.normal, g.normal):
            return replace(f, carrier=Segment(a.a, b.b))
    if isinstance(a, Arc) and isinstance(b, Arc):
        if abs(a.theta1 - b.theta0) < 1e-12:
            arc = Arc(a.center, a.radius, a.theta0, b.theta1)
            tm = 0.5 * (arc.theta0 + arc.theta1)
            normal = tuple(f.orientation * np.array([math.cos(tm), math.sin(tm)]))
            return JumpFacet(arc, normal, f.plus_value, f.minus_value, f.orientation)
    return None


def jump_facets(u: BVFunction) -> list[JumpFacet]:
    """Decompose the jump set of ``u`` into maximal facets.

    Pieces where the one-sided values coincide are dropped.  Raises
    :class:`~bvf.errors.OverlapNotRepresentable` for unsupported overlaps.
    """
    if u.is_zero:
        return []
    scale = float(np.max(np.abs(u.weights)))
    out = []
    for piece in overlay([u]):
        if _significant(float(piece.jump[0]), scale):
            out.append((piece.group, _oriented(piece, 0)))
    return _merge(out)


def total_variation(u: BVFunction) -> float:
    """``|Du|(R^d)``; for piecewise-constant ``u`` this is the jump variation."""
    return float(sum(abs(f.jump) * f.measure for f in jump_facets(u)))


def perimeter_of(u: BVFunction) -> float:
    return total_variation(u)


def jump_product(u: BVFunction, v: BVFunction) -> JumpProductResult:
    """``J(u, v) = int_{J_u cap J_v} (u+ - u-)(v+ - v-) nu_u . nu_v dH^{d-1}``."""
    if u.is_zero or v.is_zero:
        return JumpProductResult(0.0, ())
    su = float(np.max(np.abs(u.weights)))
    sv = float(np.max(np.abs(v.weights)))
    pairs = []
    terms = []
    for piece in overlay([u, v]):
        ju, jv = float(piece.jump[0]), float(piece.jump[1])
        if not (_significant(ju, su) and _significant(jv, sv)):
            continue
        fu, fv = _oriented(piece, 0), _oriented(piece, 1)
        dot = float(fu.orientation * fv.orientation)
        pairs.append(FacetPair(fu, fv, piece.measure, dot))
        terms.append(ju * jv * piece.measure)
    return JumpProductResult(math.fsum(terms), tuple(pairs))


def _abs_cos_integral(x: float) -> float:
    # int_0^x |cos y| dy
    k = math.floor((x + math.pi / 2) / math.pi)
    return 2 * k + (-1) ** k * math.sin(x)


def facet_directional_measure(f: JumpFacet, direction) -> float:
    """``int_facet |nu . v| dH^{d-1}``."""
    v = np.asarray(direction, dtype=float)
    c = f.carrier
    if isinstance(c, Arc):
        phi = math.atan2(v[1], v[0]) if v.shape[0] == 2 else 0.0
        norm = float(np.linalg.norm(v))
        # |nu . v| = |v| |cos(theta - phi)|
        return norm * c.radius * (_abs_cos_integral(c.theta1 - phi) - _abs_cos_integral(c.theta0 - phi))
    if isinstance(c, Sphere):
        return float(np.linalg.norm(v)) * 2 * math.pi * c.radius**2
    return abs(float(np.dot(f.normal, v))) * f.measure


def directional_variation(u: BVFunction, direction) -> float:
    """``|D_v u|(R^d) = sum |u+ - u-| int |nu . v|`` over the jump facets."""
    return float(sum(abs(f.jump) * facet_directional_measure(f, direction) for f in jump_facets(u)))


def mean_abs_cosine(d: int) -> float:
    """``int_{S^{d-1}} |v_1| dsigma(v)``, the sphere average weight of ``|nu . v|``."""
    return 2.0 * math.pi ** ((d - 1) / 2) / math.gamma((d + 1) / 2)


__all__ = [
    "JumpFacet",
    "FacetPair",
    "JumpProductResult",
    "jump_facets",
    "jump_product",
    "total_variation",
    "perimeter_of",
    "directional_variation",
    "facet_directional_measure",
    "mean_abs_cosine",
    "sphere_area",
]
