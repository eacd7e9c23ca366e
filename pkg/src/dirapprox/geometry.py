"""Declarative plane geometry: compact sets, sampling, and quadrature contours.

Sets are value objects (disc, rectangle, annulus, simple polygon, or a
disjoint union of those) that know how to discretize themselves into
interior/boundary samples plus oriented quadrature contours for Cauchy
integrals.  Whether the complement is connected is declared, not
computed: the stock constructors set the flag correctly for single
pieces, unions must say so themselves.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "CompactSetSpec",
    "SampleDensity",
    "Contour",
    "DiscretizedSet",
    "disc",
    "rectangle",
    "annulus",
    "jordan_polygon",
    "union_of_disjoint",
    "discretize",
    "translate",
    "max_real_part",
    "contains",
    "contour_integral",
    "spec_to_json_dict",
    "spec_from_json_dict",
]

_KINDS = ("disc", "rectangle", "annulus", "jordan_polygon", "union-of-disjoint")


@dataclass(frozen=True)
class CompactSetSpec:
    kind: str
    center: complex = 0j
    radius: float = 0.0
    corner_lo: complex = 0j
    corner_hi: complex = 0j
    r_inner: float = 0.0
    r_outer: float = 0.0
    vertices: tuple[complex, ...] = ()
    members: tuple["CompactSetSpec", ...] = ()
    declared_complement_connected: bool = True

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown set kind {self.kind!r}")


def disc(center: complex, radius: float) -> CompactSetSpec:
    if not (radius > 0) or not math.isfinite(radius):
        raise InvalidInputError("disc radius must be positive and finite")
    return CompactSetSpec("disc", center=complex(center), radius=float(radius))


def rectangle(corner_lo: complex, corner_hi: complex) -> CompactSetSpec:
    lo, hi = complex(corner_lo), complex(corner_hi)
    if not (lo.real < hi.real and lo.imag < hi.imag):
        raise InvalidInputError("rectangle corners must satisfy lo < hi componentwise")
    return CompactSetSpec("rectangle", corner_lo=lo, corner_hi=hi)


def annulus(center: complex, r_inner: float, r_outer: float) -> CompactSetSpec:
    if not (0 < r_inner < r_outer):
        raise InvalidInputError("annulus needs 0 < r_inner < r_outer")
    return CompactSetSpec(
        "annulus",
        center=complex(center),
        r_inner=float(r_inner),
        r_outer=float(r_outer),
        declared_complement_connected=False,
    )


def _segments_properly_intersect(a, b, c, d) -> bool:
    def orient(p, q, r):
        v = (q.real - p.real) * (r.imag - p.imag) - (q.imag - p.imag) * (r.real - p.real)
        return 0 if abs(v) < 1e-14 else (1 if v > 0 else -1)

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    return False


def jordan_polygon(vertices: Sequence[complex]) -> CompactSetSpec:
    vs = tuple(complex(v) for v in vertices)
    if len(vs) < 3:
        raise InvalidInputError("polygon needs at least 3 vertices")
    n = len(vs)
    for i in range(n):
        if abs(vs[i] - vs[(i + 1) % n]) < 1e-14:
            raise InvalidInputError("polygon has a zero-length edge")
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex, skip
            c, d = vs[j], vs[(j + 1) % n]
            if _segments_properly_intersect(a, b, c, d):
                raise InvalidInputError("polygon is self-intersecting")
    # store with positive (counterclockwise) orientation
    area2 = sum(
        vs[i].real * vs[(i + 1) % n].imag - vs[(i + 1) % n].real * vs[i].imag
        for i in range(n)
    )
    if abs(area2) < 1e-14:
        raise InvalidInputError("polygon has vanishing area")
    if area2 < 0:
        vs = tuple(reversed(vs))
    return CompactSetSpec("jordan_polygon", vertices=vs)


def union_of_disjoint(
    members: Iterable[CompactSetSpec], declared_complement_connected: bool = False
) -> CompactSetSpec:
    ms = tuple(members)
    if not ms:
        raise InvalidInputError("union needs at least one member")
    if any(m.kind == "union-of-disjoint" for m in ms):
        raise InvalidInputError("nested unions are not supported; flatten first")
    # cheap disjointness screen: coarse boundary polylines must stay apart
    # and no member's reference point may lie inside another member
    polys = [_boundary_polyline(m, 64) for m in ms]
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            d = np.abs(polys[i][:, None] - polys[j][None, :]).min()
            if d < 1e-9:
                raise InvalidInputError("union members touch or overlap")
            if contains(ms[j], polys[i][0], tol=-1e-9) or contains(
                ms[i], polys[j][0], tol=-1e-9
            ):
                raise InvalidInputError("union members are nested")
    return CompactSetSpec(
        "union-of-disjoint",
        members=ms,
        declared_complement_connected=declared_complement_connected,
    )


def _boundary_polyline(spec: CompactSetSpec, n: int) -> np.ndarray:
    """Coarse closed boundary trace, for screening geometry only."""
    th = np.linspace(0, 2 * math.pi, n, endpoint=False)
    if spec.kind == "disc":
        return spec.center + spec.radius * np.exp(1j * th)
    if spec.kind == "annulus":
        return spec.center + spec.r_outer * np.exp(1j * th)
    if spec.kind == "rectangle":
        lo, hi = spec.corner_lo, spec.corner_hi
        corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        return _polyline_points(corners, n)
    if spec.kind == "jordan_polygon":
        return _polyline_points(list(spec.vertices), n)
    raise InvalidInputError(f"no boundary for kind {spec.kind!r}")


def _polyline_points(corners: list[complex], n: int) -> np.ndarray:
    lens = [abs(corners[(i + 1) % len(corners)] - corners[i]) for i in range(len(corners))]
    total = sum(lens)
    pts = []
    for i, c in enumerate(corners):
        nxt = corners[(i + 1) % len(corners)]
        k = max(1, int(round(n * lens[i] / total)))
        for t in np.arange(k) / k:
            pts.append(c + t * (nxt - c))
    return np.array(pts, dtype=complex)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def _winding_inside(vertices: tuple[complex, ...], z: np.ndarray, tol: float) -> np.ndarray:
    """Point-in-polygon with `tol` fuzz outward (negative tol shrinks)."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    vs = np.asarray(vertices, dtype=complex)
    a = vs
    b = np.roll(vs, -1)
    # distance to each edge segment
    ab = b - a
    t = np.clip(
        ((zs[:, None] - a[None, :]) * np.conj(ab[None, :])).real / (np.abs(ab) ** 2)[None, :],
        0.0,
        1.0,
    )
    proj = a[None, :] + t * ab[None, :]
    dist = np.abs(zs[:, None] - proj).min(axis=1)
    # crossing-number parity
    x, y = zs.real, zs.imag
    ax, ay, bx, by = a.real, a.imag, b.real, b.imag
    cond = (ay[None, :] > y[:, None]) != (by[None, :] > y[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = ax[None, :] + (y[:, None] - ay[None, :]) * (bx - ax)[None, :] / (by - ay)[None, :]
    crossings = np.sum(cond & (x[:, None] < xint), axis=1)
    inside = (crossings % 2) == 1
    return inside | (dist <= tol) if tol >= 0 else inside & (dist >= -tol)


def contains(spec: CompactSetSpec, z: complex | np.ndarray, tol: float = 1e-12):
    """Membership in the closed set, with `tol` of outward slack."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if spec.kind == "disc":
        out = np.abs(zs - spec.center) <= spec.radius + tol
    elif spec.kind == "rectangle":
        lo, hi = spec.corner_lo, spec.corner_hi
        out = (
            (zs.real >= lo.real - tol)
            & (zs.real <= hi.real + tol)
            & (zs.imag >= lo.imag - tol)
            & (zs.imag <= hi.imag + tol)
        )
    elif spec.kind == "annulus":
        r = np.abs(zs - spec.center)
        out = (r >= spec.r_inner - tol) & (r <= spec.r_outer + tol)
    elif spec.kind == "jordan_polygon":
        out = _winding_inside(spec.vertices, zs, tol)
    else:
        out = np.zeros(zs.shape, dtype=bool)
        for m in spec.members:
            out |= contains(m, zs, tol)
    return bool(out[0]) if np.isscalar(z) or np.asarray(z).ndim == 0 else out


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleDensity:
    """Target spacings; contours get their own panel rules."""

    boundary_spacing: float = 0.01
    interior_spacing: float = 0.05
    gauss_panel_length: float = 0.1   # composite panels along polygon edges
    gauss_order: int = 12

    def validated(self) -> "SampleDensity":
        if self.boundary_spacing <= 0 or self.interior_spacing <= 0:
            raise InvalidInputError("sampling density must be positive")
        if self.gauss_order < 2 or self.gauss_panel_length <= 0:
            raise InvalidInputError("quadrature panels need order >= 2, length > 0")
        return self


@dataclass(frozen=True)
class Contour:
    """Closed oriented loop with complex line-integral weights.

    points[0] == points[-1]; integral of f is sum(weights * f(points)).
    Endpoint duplicates may carry zero weight (Gauss panels put no nodes
    at the vertices).
    """

    points: np.ndarray
    weights: np.ndarray
    orientation: int  # +1 counterclockwise, -1 clockwise
    role: str  # "outer" or "hole"

    def __post_init__(self):
        if abs(self.points[0] - self.points[-1]) > 1e-12:
            raise InvalidInputError("contour must close (first == last point)")
        if float(np.sum(np.abs(self.weights))) <= 0:
            raise InvalidInputError("contour must carry positive total weight")

    @property
    def total_weight(self) -> float:
        return float(np.sum(np.abs(self.weights)))


def contour_integral(contour: Contour, f: Callable[[np.ndarray], np.ndarray] | np.ndarray) -> complex:
    vals = f(contour.points) if callable(f) else np.asarray(f)
    return complex(np.sum(contour.weights * vals))


@dataclass(frozen=True)
class DiscretizedSet:
    spec: CompactSetSpec
    interior_samples: np.ndarray
    boundary_samples: np.ndarray
    contours: tuple[Contour, ...]

    def all_samples(self) -> np.ndarray:
        return np.concatenate([self.boundary_samples, self.interior_samples])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("role,re,im,weight_re,weight_im\n")
        for z in self.interior_samples:
            buf.write(f"interior,{z.real:.17g},{z.imag:.17g},,\n")
        for z in self.boundary_samples:
            buf.write(f"boundary,{z.real:.17g},{z.imag:.17g},,\n")
        for c in self.contours:
            for z, w in zip(c.points, c.weights):
                buf.write(f"contour-{c.role},{z.real:.17g},{z.imag:.17g},{w.real:.17g},{w.imag:.17g}\n")
        return buf.getvalue()


def _circle_contour(center: complex, radius: float, spacing: float, orientation: int, role: str) -> Contour:
    m = max(16, int(math.ceil(2 * math.pi * radius / spacing)))
    th = 2 * math.pi * np.arange(m + 1) / m
    if orientation < 0:
        th = -th
    pts = center + radius * np.exp(1j * th)
    pts[-1] = pts[0]
    # closed trapezoid: dz = i r e^{i theta} dtheta, halved at the seam
    w = (2 * math.pi / m) * 1j * radius * np.exp(1j * th) * orientation
    w[0] *= 0.5
    w[-1] *= 0.5
    return Contour(pts, w, orientation, role)


def _gauss_polyline_contour(
    corners: list[complex], density: SampleDensity, orientation: int, role: str
) -> Contour:
    """Composite Gauss-Legendre panels along a closed polyline."""
    nodes, weights = np.polynomial.legendre.leggauss(density.gauss_order)
    pts = [np.array([corners[0]])]
    wts = [np.array([0j])]  # zero-weight anchor closes the loop
    n = len(corners)
    for i in range(n):
        a, b = corners[i], corners[(i + 1) % n]
        length = abs(b - a)
        panels = max(1, int(math.ceil(length / density.gauss_panel_length)))
        for k in range(panels):
            za = a + (b - a) * k / panels
            zb = a + (b - a) * (k + 1) / panels
            mid, half = 0.5 * (za + zb), 0.5 * (zb - za)
            pts.append(mid + half * nodes)
            wts.append(half * weights.astype(complex))
    pts.append(np.array([corners[0]]))
    wts.append(np.array([0j]))
    return Contour(np.concatenate(pts), np.concatenate(wts), orientation, role)


def _interior_grid(spec: CompactSetSpec, lo: complex, hi: complex, spacing: float) -> np.ndarray:
    nx = max(2, int(math.ceil((hi.real - lo.real) / spacing)) + 1)
    ny = max(2, int(math.ceil((hi.imag - lo.imag) / spacing)) + 1)
    xs = np.linspace(lo.real, hi.real, nx)
    ys = np.linspace(lo.imag, hi.imag, ny)
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    return grid[contains(spec, grid, tol=1e-12)]


def discretize(spec: CompactSetSpec, density: SampleDensity | None = None) -> DiscretizedSet:
    """Samples + contours; boundary spacing ≤ requested, grid interior."""
    d = (density or SampleDensity()).validated()
    sp = d.boundary_spacing

    if spec.kind == "disc":
        m = max(16, int(math.ceil(2 * math.pi * spec.radius / sp)))
        th = 2 * math.pi * np.arange(m) / m
        boundary = spec.center + spec.radius * np.exp(1j * th)
        lo = spec.center - spec.radius * (1 + 1j)
        hi = spec.center + spec.radius * (1 + 1j)
        interior = _interior_grid(spec, lo, hi, d.interior_spacing)
        contours = (_circle_contour(spec.center, spec.radius, sp, +1, "outer"),)
    elif spec.kind == "rectangle":
        lo, hi = spec.corner_lo, spec.corner_hi
        corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        per = 2 * ((hi.real - lo.real) + (hi.imag - lo.imag))
        boundary = _polyline_points(corners, max(16, int(math.ceil(per / sp))))
        interior = _interior_grid(spec, lo, hi, d.interior_spacing)
        contours = (_gauss_polyline_contour(corners, d, +1, "outer"),)
    elif spec.kind == "annulus":
        mo = max(16, int(math.ceil(2 * math.pi * spec.r_outer / sp)))
        mi = max(16, int(math.ceil(2 * math.pi * spec.r_inner / sp)))
        boundary = np.concatenate(
            [
                spec.center + spec.r_outer * np.exp(2j * math.pi * np.arange(mo) / mo),
                spec.center + spec.r_inner * np.exp(2j * math.pi * np.arange(mi) / mi),
            ]
        )
        lo = spec.center - spec.r_outer * (1 + 1j)
        hi = spec.center + spec.r_outer * (1 + 1j)
        interior = _interior_grid(spec, lo, hi, d.interior_spacing)
        contours = (
            _circle_contour(spec.center, spec.r_outer, sp, +1, "outer"),
            _circle_contour(spec.center, spec.r_inner, sp, -1, "hole"),
        )
    elif spec.kind == "jordan_polygon":
        corners = list(spec.vertices)
        per = sum(abs(corners[(i + 1) % len(corners)] - corners[i]) for i in range(len(corners)))
        boundary = _polyline_points(corners, max(16, int(math.ceil(per / sp))))
        res = np.array(corners)
        lo = complex(res.real.min(), res.imag.min())
        hi = complex(res.real.max(), res.imag.max())
        interior = _interior_grid(spec, lo, hi, d.interior_spacing)
        contours = (_gauss_polyline_contour(corners, d, +1, "outer"),)
    elif spec.kind == "union-of-disjoint":
        parts = [discretize(m, d) for m in spec.members]
        boundary = np.concatenate([p.boundary_samples for p in parts])
        interior = np.concatenate([p.interior_samples for p in parts])
        contours = tuple(c for p in parts for c in p.contours)
    else:  # pragma: no cover - kinds validated at construction
        raise InvalidInputError(f"unknown set kind {spec.kind!r}")

    return DiscretizedSet(spec, interior, boundary, contours)


# ---------------------------------------------------------------------------
# rigid motions and extents
# ---------------------------------------------------------------------------


def translate(spec: CompactSetSpec, offset: complex) -> CompactSetSpec:
    o = complex(offset)
    if spec.kind == "union-of-disjoint":
        return replace(spec, members=tuple(translate(m, o) for m in spec.members))
    return replace(
        spec,
        center=spec.center + o,
        corner_lo=spec.corner_lo + o,
        corner_hi=spec.corner_hi + o,
        vertices=tuple(v + o for v in spec.vertices),
    )


def max_real_part(spec: CompactSetSpec) -> float:
    """Exact for every kind (polygon max is attained at a vertex)."""
    if spec.kind == "disc":
        return spec.center.real + spec.radius
    if spec.kind == "rectangle":
        return spec.corner_hi.real
    if spec.kind == "annulus":
        return spec.center.real + spec.r_outer
    if spec.kind == "jordan_polygon":
        return max(v.real for v in spec.vertices)
    return max(max_real_part(m) for m in spec.members)


# ---------------------------------------------------------------------------
# JSON form
# ---------------------------------------------------------------------------


def _c2p(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def spec_to_json_dict(spec: CompactSetSpec) -> dict:
    out: dict = {"kind": spec.kind}
    if spec.kind == "disc":
        out |= {"center": _c2p(spec.center), "radius": spec.radius}
    elif spec.kind == "rectangle":
        out |= {"corner_lo": _c2p(spec.corner_lo), "corner_hi": _c2p(spec.corner_hi)}
    elif spec.kind == "annulus":
        out |= {
            "center": _c2p(spec.center),
            "r_inner": spec.r_inner,
            "r_outer": spec.r_outer,
        }
    elif spec.kind == "jordan_polygon":
        out |= {"vertices": [_c2p(v) for v in spec.vertices]}
    else:
        out |= {"members": [spec_to_json_dict(m) for m in spec.members]}
    out["declared_complement_connected"] = spec.declared_complement_connected
    return out


def spec_from_json_dict(d: dict) -> CompactSetSpec:
    try:
        kind = d["kind"]
        if kind == "disc":
            out = disc(complex(*d["center"]), d["radius"])
        elif kind == "rectangle":
            out = rectangle(complex(*d["corner_lo"]), complex(*d["corner_hi"]))
        elif kind == "annulus":
            out = annulus(complex(*d["center"]), d["r_inner"], d["r_outer"])
        elif kind == "jordan_polygon":
            out = jordan_polygon([complex(*v) for v in d["vertices"]])
        elif kind == "union-of-disjoint":
            out = union_of_disjoint(spec_from_json_dict(m) for m in d["members"])
        else:
            raise InvalidInputError(f"unknown set kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed set description: {exc}") from exc
    if "declared_complement_connected" in d:
        out = replace(out, declared_complement_connected=bool(d["declared_complement_connected"]))
    return out
