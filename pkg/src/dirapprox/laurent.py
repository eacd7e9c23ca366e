"""Cauchy-integral splitting on holed compacta and rational Dirichlet fits.

A function holomorphic on a neighborhood of a compact set whose
complement has bounded components splits as f = f_0 + sum_j f_j: f_0 is
holomorphic across the outer boundary, each f_j is holomorphic outside
the j-th hole and vanishes at infinity.  The split is computed by
quadrature of the Cauchy integral over one closed loop per boundary
curve.  Each hole piece, read through w = 1/(s - z_j) with z_j a point
inside its hole, lives on a compact set again and can be fed to the
discrete minimax fitter; reassembling the fitted pieces gives

    R(s) = P_0(s) + P_1(1/(s - z_1)) + ... + P_n(1/(s - z_n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAnchorError, InvalidInputError, PoleError
from .fit import FitOptions, FitResult, _target_values, minimax_fit_samples
from .geometry import (
    CompactSetSpec,
    Contour,
    DiscretizedSet,
    SampleDensity,
    _circle_contour,
    _gauss_polyline_contour,
)
from .series import DirichletPolynomial, evaluate, evaluate_many

_FAR_DIRECTION = 0.6 + 0.8j  # unit vector for the vanishing-at-infinity probe
_EVAL_CHUNK = 256


# ---------------------------------------------------------------------------
# quadrature loops
# ---------------------------------------------------------------------------


def _quadrature_contours(spec: CompactSetSpec, nodes: int) -> list[Contour]:
    """One closed quadrature loop per boundary curve, ~`nodes` points each.

    Circles get the closed trapezoid rule (spectral); polyline boundaries
    get composite Gauss-Legendre panels.
    """
    if spec.kind == "disc":
        return [_circle_contour(spec.center, spec.radius, 2 * math.pi * spec.radius / nodes, +1, "outer")]
    if spec.kind == "annulus":
        return [
            _circle_contour(spec.center, spec.r_outer, 2 * math.pi * spec.r_outer / nodes, +1, "outer"),
            _circle_contour(spec.center, spec.r_inner, 2 * math.pi * spec.r_inner / nodes, -1, "hole"),
        ]
    if spec.kind in ("rectangle", "jordan_polygon"):
        if spec.kind == "rectangle":
            lo, hi = spec.corner_lo, spec.corner_hi
            corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        else:
            corners = list(spec.vertices)
        per = sum(abs(corners[(i + 1) % len(corners)] - corners[i]) for i in range(len(corners)))
        density = SampleDensity(gauss_panel_length=per / max(1, nodes // 12), gauss_order=12)
        return [_gauss_polyline_contour(corners, density, +1, "outer")]
    if spec.kind == "union-of-disjoint":
        return [c for m in spec.members for c in _quadrature_contours(m, nodes)]
    raise InvalidInputError(f"unknown set kind {spec.kind!r}")  # pragma: no cover


def _inside_loop(loop_points: np.ndarray, z: complex) -> bool:
    """Ray-crossing parity of z against the closed polyline of loop nodes."""
    a = loop_points[:-1]
    b = loop_points[1:]
    ya, yb = a.imag - z.imag, b.imag - z.imag
    straddle = (ya > 0) != (yb > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = a.real + (b.real - a.real) * ya / (ya - yb)
    hits = straddle & (xcross > z.real)
    return bool(np.count_nonzero(hits) % 2)


def _distance_to_loop(loop_points: np.ndarray, z: complex) -> float:
    return float(np.abs(loop_points - z).min())


# ---------------------------------------------------------------------------
# pieces: contour-sample Cauchy data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyPiece:
    """Contour-sample Cauchy data for one split component.

    `values` holds the piece's own boundary values on `contour.points`;
    evaluation anywhere else re-applies the Cauchy kernel quadrature in
    compensated (barycentric-ratio) form, which keeps its accuracy
    arbitrarily close to the curve instead of degrading like the plain
    kernel.  Hole pieces (anchor set) evaluate through u = 1/(s-anchor),
    where the data becomes interior Cauchy data; subtracting the value
    at u = 0 makes the piece vanish at infinity identically.
    """

    contour: Contour
    values: np.ndarray
    anchor: complex | None = None  # None marks the outer piece

    def __call__(self, s):
        return evaluate_piece(self, s)


def _cauchy_transform(nodes: np.ndarray, weights: np.ndarray, values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Cauchy integral of the node data, chunked; node hits return the datum.

    Where the loop winds around t the compensated ratio
    sum(w v/(node-t)) / sum(w/(node-t)) is the interpolant of the data and
    stays accurate up to and on the curve.  The denominator approximates
    2*pi*i*winding(t), so it also serves as the dispatch: away from the loop
    (winding 0) the ratio is 0/0 noise and the plain kernel num/(2*pi*i) is
    the integral's value.
    """
    out = np.empty(targets.size, dtype=complex)
    wv = weights * values
    for start in range(0, targets.size, _EVAL_CHUNK):
        t = targets[start : start + _EVAL_CHUNK]
        diff = nodes[None, :] - t[:, None]
        hit_rows, hit_cols = np.nonzero(diff == 0)
        diff[hit_rows, hit_cols] = 1.0  # rows overwritten with the datum below
        inv = 1.0 / diff
        if hit_rows.size:
            inv[hit_rows, :] = 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            num = inv @ wv
            den = inv @ weights
            block = np.where(np.abs(den) >= math.pi, num / den, num / (2j * math.pi))
        block[hit_rows] = values[hit_cols]
        out[start : start + _EVAL_CHUNK] = block
    return out


def evaluate_piece(piece: CauchyPiece, s) -> complex | np.ndarray:
    """Apply the piece's compensated Cauchy kernel at s (scalar or array)."""
    pts = np.atleast_1d(np.asarray(s, dtype=complex))
    z, w = piece.contour.points, piece.contour.weights
    if piece.anchor is None:
        vals = _cauchy_transform(z, w, piece.values, pts)
    else:
        a = piece.anchor
        if np.any(pts == a):
            raise PoleError(f"hole piece is undefined at its anchor {a}")
        # v = 1/(zeta-a) maps the hole boundary to a loop around 0; the
        # stored clockwise traverse comes out counterclockwise there.
        v = 1.0 / (z - a)
        wv = -w / (z - a) ** 2
        u = 1.0 / (pts - a)
        at_zero = _cauchy_transform(v, wv, piece.values, np.zeros(1, dtype=complex))
        vals = _cauchy_transform(v, wv, piece.values, u) - at_zero[0]
    return vals if np.ndim(s) else complex(vals[0])


def _plain_transform(contour: Contour, values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """(1/2*pi*i) sum(w v/(node-t)): the loop's own split piece, away from it.

    The stored weights carry the boundary orientation (holes clockwise),
    so the same formula yields f_0 on outer loops and f_j on hole loops.
    """
    out = np.empty(targets.size, dtype=complex)
    wv = contour.weights * values
    for start in range(0, targets.size, _EVAL_CHUNK):
        t = targets[start : start + _EVAL_CHUNK]
        out[start : start + _EVAL_CHUNK] = (1.0 / (contour.points[None, :] - t[:, None])) @ wv
    return out / (2j * math.pi)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPieces:
    """Split f = f_0 + sum_j f_j with per-piece contour-sample data.

    `residual` is the reconstruction error max|f - sum of pieces| over
    the probe points (the discretization's own samples); `warning` is
    set when it exceeds `residual_tol`.  `far_probe[j]` is |f_j| at
    anchor_j + 1e6 * unit direction.
    """

    outer: tuple[CauchyPiece, ...]
    holes: tuple[CauchyPiece, ...]
    residual: float
    residual_tol: float
    warning: bool
    nodes_per_contour: int
    far_probe: tuple[float, ...]

    @property
    def anchors(self) -> tuple[complex, ...]:
        return tuple(p.anchor for p in self.holes)

    def f0(self, s) -> complex | np.ndarray:
        pts = np.atleast_1d(np.asarray(s, dtype=complex))
        total = sum(evaluate_piece(p, pts) for p in self.outer)
        return total if np.ndim(s) else complex(total[0])

    def hole_piece(self, j: int, s) -> complex | np.ndarray:
        return evaluate_piece(self.holes[j], s)

    def reconstruct(self, s) -> complex | np.ndarray:
        pts = np.atleast_1d(np.asarray(s, dtype=complex))
        total = sum(evaluate_piece(p, pts) for p in self.outer + self.holes)
        return total if np.ndim(s) else complex(total[0])


def _build_pieces(
    spec: CompactSetSpec, f, anchors: list[complex], nodes: int
) -> tuple[list[CauchyPiece], list[CauchyPiece]]:
    loops = _quadrature_contours(spec, nodes)
    outer_loops = [c for c in loops if c.role == "outer"]
    hole_loops = [c for c in loops if c.role == "hole"]

    if len(anchors) != len(hole_loops):
        raise InvalidAnchorError(
            f"need exactly one anchor per hole: got {len(anchors)} anchors, {len(hole_loops)} holes"
        )
    # pair anchors with holes by containment; each hole claimed once
    order: list[int] = []
    for a in anchors:
        inside = [
            k
            for k, loop in enumerate(hole_loops)
            if _inside_loop(loop.points, a) and _distance_to_loop(loop.points, a) > 1e-9
        ]
        if len(inside) != 1 or inside[0] in order:
            raise InvalidAnchorError(f"anchor {a} is not strictly inside exactly one unclaimed hole")
        order.append(inside[0])
    hole_loops = [hole_loops[k] for k in order]

    fvals = [_target_values(f, loop.points) for loop in loops]
    loop_vals = dict(zip([id(l) for l in loops], fvals))

    ordered = outer_loops + hole_loops
    own_values: list[np.ndarray] = []
    for loop in ordered:
        own = loop_vals[id(loop)].copy()
        # everything the other loops' pieces contribute on this curve is
        # subtracted; cross-curve plain quadrature is spectrally accurate
        # because the curves are separated
        for other in ordered:
            if other is loop:
                continue
            own -= _plain_transform(other, loop_vals[id(other)], loop.points)
        own_values.append(own)

    k = len(outer_loops)
    outer_pieces = [CauchyPiece(l, v) for l, v in zip(ordered[:k], own_values[:k])]
    hole_pieces = [
        CauchyPiece(l, v, anchor=complex(a)) for l, v, a in zip(ordered[k:], own_values[k:], anchors)
    ]
    return outer_pieces, hole_pieces


def laurent_decompose(
    dset: DiscretizedSet,
    f,
    anchors,
    *,
    nodes: int = 512,
    residual_tol: float = 1e-8,
    max_doublings: int = 4,
) -> LaurentPieces:
    """Split f over the set's boundary curves by Cauchy quadrature.

    `anchors` places one point strictly inside each bounded complementary
    component (hole).  Loops start at `nodes` points each and double
    until the reconstruction residual stabilizes; a residual still above
    `residual_tol` sets the warning flag rather than raising.
    """
    anchors = [complex(a) for a in np.atleast_1d(np.asarray(anchors, dtype=complex))] if np.size(anchors) else []

    probes = dset.all_samples()
    if probes.size > 2048:
        probes = probes[:: probes.size // 2048 + 1]
    ftrue = _target_values(f, probes)
    scale = max(1.0, float(np.abs(ftrue).max()))

    best: tuple[float, list[CauchyPiece], list[CauchyPiece], int] | None = None
    n = nodes
    prev_residual = math.inf
    for _ in range(max_doublings + 1):
        outer_pieces, hole_pieces = _build_pieces(dset.spec, f, anchors, n)
        recon = np.zeros_like(ftrue)
        for p in outer_pieces + hole_pieces:
            recon += evaluate_piece(p, probes)
        residual = float(np.abs(ftrue - recon).max())
        if best is None or residual < best[0]:
            best = (residual, outer_pieces, hole_pieces, n)
        if residual <= max(residual_tol * 1e-2, 1e-13 * scale):
            break
        if residual > 0.5 * prev_residual:  # doubling stopped helping
            break
        prev_residual = residual
        n *= 2

    residual, outer_pieces, hole_pieces, n = best
    far = tuple(
        float(abs(evaluate_piece(p, p.anchor + 1e6 * _FAR_DIRECTION))) for p in hole_pieces
    )
    return LaurentPieces(
        outer=tuple(outer_pieces),
        holes=tuple(hole_pieces),
        residual=residual,
        residual_tol=residual_tol,
        warning=residual > residual_tol,
        nodes_per_contour=n,
        far_probe=far,
    )


# ---------------------------------------------------------------------------
# rational Dirichlet functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalDirichletFunction:
    """P_0(s) + sum_j P_j(1/(s - z_j)) with pairwise-distinct anchors z_j."""

    p0: DirichletPolynomial
    parts: tuple[tuple[complex, DirichletPolynomial], ...] = ()

    def __post_init__(self):
        anchors = [z for z, _ in self.parts]
        if len(set(anchors)) != len(anchors):
            raise InvalidInputError("pole anchors must be pairwise distinct")
        object.__setattr__(self, "parts", tuple((complex(z), p) for z, p in self.parts))

    def __call__(self, s: complex) -> complex:
        return evaluate_rational(self, s)


def evaluate_rational(r: RationalDirichletFunction, s: complex) -> complex:
    s = complex(s)
    for z, _ in r.parts:
        if s == z:
            raise PoleError(f"evaluation point coincides with the anchor {z}")
    total = evaluate(r.p0, s)
    for z, p in r.parts:
        total += evaluate(p, 1.0 / (s - z))
    return total


def _evaluate_rational_many(r: RationalDirichletFunction, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=complex)
    total = evaluate_many(r.p0, points)
    for z, p in r.parts:
        if np.any(points == z):
            raise PoleError(f"evaluation point coincides with the anchor {z}")
        total = total + evaluate_many(p, 1.0 / (points - z))
    return total


def rational_dirichlet_fit(
    dset: DiscretizedSet,
    f,
    anchors,
    degrees,
    options: FitOptions | None = None,
    *,
    nodes: int = 512,
    residual_tol: float = 1e-8,
) -> tuple[RationalDirichletFunction, float]:
    """Split f, fit every piece by discrete minimax, reassemble.

    `degrees` gives one Dirichlet degree per piece, outer first.  Hole
    pieces are fitted in w = 1/(s - z_j); each fit carries a free
    constant that is then relocated into the outer piece, so the stored
    parts keep a_1 = 0 (they belong to pieces vanishing at infinity)
    while losing none of the fit's accuracy — without the relocation a
    hole part whose remaining terms do not sum to zero is unreachable.
    Returns the assembled function and its sampled sup error on the set.
    """
    anchors = [complex(a) for a in np.atleast_1d(np.asarray(anchors, dtype=complex))] if np.size(anchors) else []
    degrees = [int(d) for d in degrees]
    if len(degrees) != 1 + len(anchors):
        raise InvalidInputError("need one degree for the outer piece and one per anchor")
    if degrees[0] < 1 or any(d < 2 for d in degrees[1:]):
        raise InvalidInputError("outer degree must be >= 1 and hole degrees >= 2")

    pieces = laurent_decompose(dset, f, anchors, nodes=nodes, residual_tol=residual_tol)
    samples = dset.all_samples()

    parts: list[tuple[complex, DirichletPolynomial]] = []
    relocated = 0j
    for j, (z, deg) in enumerate(zip(pieces.anchors, degrees[1:])):
        w = 1.0 / (samples - z)
        yj = evaluate_piece(pieces.holes[j], samples)
        fitj = minimax_fit_samples(w, yj, deg, options)
        coeffs = fitj.polynomial.coefficients.copy()
        relocated += coeffs[0]
        coeffs[0] = 0.0
        parts.append((z, DirichletPolynomial(coeffs)))

    y0 = pieces.f0(samples) + relocated
    fit0 = minimax_fit_samples(samples, y0, degrees[0], options)

    assembled = RationalDirichletFunction(fit0.polynomial, tuple(parts))
    sup_error = float(np.abs(_evaluate_rational_many(assembled, samples) - _target_values(f, samples)).max())
    return assembled, sup_error


# ---------------------------------------------------------------------------
# JSON forms
# ---------------------------------------------------------------------------


def rational_to_json_dict(r: RationalDirichletFunction) -> dict:
    return {
        "p0": r.p0.to_pairs(),
        "parts": [{"anchor": [z.real, z.imag], "coeffs": p.to_pairs()} for z, p in r.parts],
    }


def rational_from_json_dict(d: dict) -> RationalDirichletFunction:
    try:
        p0 = DirichletPolynomial.from_pairs(d["p0"])
        parts = tuple(
            (complex(e["anchor"][0], e["anchor"][1]), DirichletPolynomial.from_pairs(e["coeffs"]))
            for e in d["parts"]
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidInputError(f"malformed rational function JSON: {exc}") from exc
    return RationalDirichletFunction(p0, parts)
