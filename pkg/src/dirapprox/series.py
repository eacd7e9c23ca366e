"""Dirichlet polynomials: evaluation, shifts, seminorms, sup norms, abscissas.

A Dirichlet polynomial is a finite sum P(s) = sum_{n=1}^{N} a_n n^{-s}.
Coefficients are stored densely for n = 1..N; the length N is a storage
bound, not a minimality claim (trailing zeros are allowed).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "DirichletPolynomial",
    "CoefficientRule",
    "Sentinel",
    "AbscissaReport",
    "SupNormPlan",
    "SupNormReport",
    "evaluate",
    "evaluate_many",
    "shift_by_delta",
    "seminorm_sigma",
    "sup_norm_halfplane",
    "sup_norm_report",
    "estimate_abscissas",
]


def _require_finite_point(s: complex) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise InvalidInputError(f"evaluation point must be finite, got {s!r}")
    return s


@dataclass(frozen=True)
class DirichletPolynomial:
    """Coefficient vector (a_1, ..., a_N) of sum a_n n^{-s}."""

    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidInputError("coefficient list must hold at least a_1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("coefficients must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)

    @property
    def degree(self) -> int:
        return int(self.coefficients.size)

    def coefficient(self, n: int) -> complex:
        """a_n, with a_n = 0 for n beyond the stored degree."""
        if n < 1:
            raise InvalidInputError("coefficient index starts at n=1")
        if n > self.degree:
            return 0.0 + 0.0j
        return complex(self.coefficients[n - 1])

    def trimmed(self) -> np.ndarray:
        """Coefficients with trailing zeros removed (at least a_1 kept)."""
        nz = np.nonzero(self.coefficients)[0]
        end = int(nz[-1]) + 1 if nz.size else 1
        return np.asarray(self.coefficients[:end])

    def is_constant(self) -> bool:
        return bool(np.all(self.coefficients[1:] == 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirichletPolynomial):
            return NotImplemented
        return np.array_equal(self.trimmed(), other.trimmed())

    def __hash__(self):
        return hash(self.trimmed().tobytes())

    def __call__(self, s: complex) -> complex:
        return evaluate(self, s)

    def __mul__(self, other) -> "DirichletPolynomial":
        """Dirichlet convolution: (p*q)_n = sum_{d | n} p_d q_{n/d}."""
        if not isinstance(other, DirichletPolynomial):
            return NotImplemented
        out = np.zeros(self.degree * other.degree, dtype=complex)
        for m in range(1, self.degree + 1):
            a = self.coefficients[m - 1]
            if a != 0:
                out[m - 1 :: m][: other.degree] += a * other.coefficients
        return DirichletPolynomial(out)

    @staticmethod
    def from_pairs(pairs: Sequence[Sequence[float]]) -> "DirichletPolynomial":
        """Build from JSON-style [[re, im], ...] coefficient pairs."""
        return DirichletPolynomial(
            np.array([complex(re, im) for re, im in pairs], dtype=complex)
        )

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coefficients]


def _log_indices(n: int) -> np.ndarray:
    return np.log(np.arange(1, n + 1, dtype=float))


def evaluate(p: DirichletPolynomial, s: complex) -> complex:
    """P(s) = sum_n a_n exp(-s log n)."""
    s = _require_finite_point(s)
    return complex(np.sum(p.coefficients * np.exp(-s * _log_indices(p.degree))))


def evaluate_many(p: DirichletPolynomial, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over an array of finite points."""
    pts = np.asarray(points, dtype=complex)
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError("evaluation points must be finite")
    logs = _log_indices(p.degree)
    flat = pts.ravel()
    # exp(-s log n) laid out points x indices; chunk to bound memory
    out = np.zeros(flat.shape, dtype=complex)
    step = max(1, 2_000_000 // max(1, p.degree))
    for lo in range(0, flat.size, step):
        block = flat[lo : lo + step, None]
        # row-wise pairwise sum rather than a matvec so each point gets
        # bit-identical arithmetic to the scalar evaluate()
        out[lo : lo + step] = (np.exp(-block * logs[None, :]) * p.coefficients[None, :]).sum(axis=1)
    return out.reshape(pts.shape)


def shift_by_delta(p: DirichletPolynomial, delta: float) -> DirichletPolynomial:
    """Polynomial of s -> P(s + delta); coefficient map a_n -> a_n n^{-delta}."""
    if not math.isfinite(delta):
        raise InvalidInputError("shift delta must be finite")
    scale = np.exp(-delta * _log_indices(p.degree))
    return DirichletPolynomial(p.coefficients * scale)


def seminorm_sigma(p: DirichletPolynomial, sigma: float) -> float:
    """Weighted coefficient norm sum |a_n| n^{-sigma}."""
    if not math.isfinite(sigma):
        raise InvalidInputError("sigma must be finite")
    weights = np.exp(-sigma * _log_indices(p.degree))
    return float(np.sum(np.abs(p.coefficients) * weights))


# ---------------------------------------------------------------------------
# sup norm on a right half plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupNormPlan:
    """Sampling plan for the half-plane sup norm.

    The grid covers [sigma0, sigma0 + width] x [0, height].  Refinement
    doubles both grid densities until the reported value changes by less
    than refine_tol.  When edge_polish is on, the vertical edge Re s =
    sigma0 (where the modulus of every basis term is largest) gets a
    denser sweep plus parabolic refinement of local maxima.
    """

    width: float = 10.0
    height: float = 2.0 * math.pi / math.log(2.0) * 16.0
    sigma_steps: int = 400
    t_steps: int = 400
    refine_tol: float = 1e-4
    max_refinements: int = 3
    edge_polish: bool = True
    edge_points: int = 200_000

    def validated(self) -> "SupNormPlan":
        if (
            self.width <= 0
            or self.height <= 0
            or self.sigma_steps < 1
            or self.t_steps < 1
        ):
            raise InvalidInputError("sup-norm sampling plan must be nonempty")
        return self


@dataclass(frozen=True)
class SupNormReport:
    value: float
    sigma_spacing: float
    t_spacing: float
    lipschitz_bound: float
    upper_bound: float
    refinements: int


def _edge_sweep_max(p: DirichletPolynomial, sigma0: float, height: float, m: int) -> float:
    """Max of |P| along Re s = sigma0, t in [0, height].

    On a uniform t grid each basis term is a geometric sequence, so
    blocks are filled by cumprod in complex64 (one exact complex128
    phase per block start keeps drift below ~1e-5), then the best grid
    candidates are polished by vectorized parabolic refinement at full
    precision.
    """
    logs = _log_indices(p.degree)
    damped = p.coefficients * np.exp(-sigma0 * logs)
    damped32 = damped.astype(np.complex64)
    n_terms = p.degree
    dt = height / max(1, m - 1)

    block_len = 131_072
    step32 = np.exp(-1j * dt * logs).astype(np.complex64)
    buf = np.empty((n_terms, block_len), dtype=np.complex64)
    cand_t: list[np.ndarray] = []
    cand_v: list[np.ndarray] = []
    per_block_keep = 8
    for lo in range(0, m, block_len):
        size = min(block_len, m - lo)
        buf[:, :size] = step32[:, None]
        buf[:, 0] = np.exp(-1j * (lo * dt) * logs).astype(np.complex64)
        powers = np.cumprod(buf[:, :size], axis=1, out=buf[:, :size])
        vals = np.abs(damped32 @ powers)
        keep = min(per_block_keep, size)
        idx = np.argpartition(vals, -keep)[-keep:]
        cand_t.append((lo + idx) * dt)
        cand_v.append(vals[idx].astype(float))

    ts = np.concatenate(cand_t)
    vs = np.concatenate(cand_v)
    order = np.argsort(vs)[-256:]
    ts = ts[order]

    def amp(tvec: np.ndarray) -> np.ndarray:
        return np.abs(np.exp(-1j * tvec[:, None] * logs[None, :]) @ damped)

    # vectorized parabolic refinement of all candidates at once
    h = np.full(ts.shape, dt)
    t = ts.copy()
    for _ in range(30):
        fm, f0, fp = amp(t - h), amp(t), amp(t + h)
        denom = fm - 2.0 * f0 + fp
        shift = np.where(denom < -1e-300, 0.5 * h * (fm - fp) / np.minimum(denom, -1e-300), 0.0)
        t = t + np.clip(shift, -h, h)
        h *= 0.5
    return float(amp(t).max(initial=0.0))


def sup_norm_report(
    p: DirichletPolynomial, sigma0: float, plan: SupNormPlan | None = None
) -> SupNormReport:
    """Grid lower bound for sup |P| over {Re s >= sigma0}, with spacing data.

    The returned value is always a lower bound of the true sup.  The
    Lipschitz bound sum |a_n| log(n) n^{-sigma0} turns the grid spacing
    into a certified upper bound.
    """
    if plan is None:
        plan = SupNormPlan()
    plan = plan.validated()
    if not math.isfinite(sigma0):
        raise InvalidInputError("sigma0 must be finite")

    logs = _log_indices(p.degree)
    damp0 = np.abs(p.coefficients) * np.exp(-sigma0 * logs)
    lipschitz = float(np.sum(damp0 * logs))

    value = 0.0
    ns, nt = plan.sigma_steps, plan.t_steps
    refinements = 0
    for level in range(plan.max_refinements + 1):
        sigmas = np.linspace(sigma0, sigma0 + plan.width, ns)
        ts = np.linspace(0.0, plan.height, nt)
        grid_best = 0.0
        step = max(1, 4_000_000 // max(1, nt * p.degree))
        basis_t = np.exp(-1j * ts[:, None] * logs[None, :])
        for lo in range(0, ns, step):
            block = sigmas[lo : lo + step]
            damped = p.coefficients[None, :] * np.exp(-block[:, None] * logs[None, :])
            vals = np.abs(basis_t @ damped.T)
            grid_best = max(grid_best, float(vals.max()))
        refinements = level
        if level > 0 and abs(grid_best - value) < plan.refine_tol:
            value = max(value, grid_best)
            break
        value = max(value, grid_best)
        ns, nt = ns * 2, nt * 2

    if plan.edge_polish:
        value = max(value, _edge_sweep_max(p, sigma0, plan.height, plan.edge_points))

    dsig = plan.width / max(1, plan.sigma_steps - 1)
    dt = plan.height / max(1, plan.t_steps - 1)
    half_diag = 0.5 * math.hypot(dsig, dt)
    return SupNormReport(
        value=value,
        sigma_spacing=dsig,
        t_spacing=dt,
        lipschitz_bound=lipschitz,
        upper_bound=value + lipschitz * half_diag,
        refinements=refinements,
    )


def sup_norm_halfplane(
    p: DirichletPolynomial, sigma0: float, plan: SupNormPlan | None = None
) -> float:
    return sup_norm_report(p, sigma0, plan).value


# ---------------------------------------------------------------------------
# coefficient rules and abscissa estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientRule:
    """Finite window onto the coefficients of a Dirichlet series.

    Kinds: "explicit-list" (finitely supported), "all-ones", "alternating"
    (a_n = (-1)^n), and "named-custom" backed by a callable n -> a_n.
    """

    kind: str
    data: np.ndarray | None = None
    fn: Callable[[int], complex] | None = None
    name: str = ""

    _KINDS = ("explicit-list", "all-ones", "alternating", "named-custom")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise InvalidInputError(f"unknown coefficient rule kind {self.kind!r}")
        if self.kind == "explicit-list":
            arr = np.asarray(self.data, dtype=complex)
            if arr.ndim != 1 or arr.size < 1:
                raise InvalidInputError("explicit-list rule needs >= 1 coefficient")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, "data", arr)
        elif self.kind == "named-custom" and self.fn is None:
            raise InvalidInputError("named-custom rule needs a coefficient callable")

    @property
    def finitely_supported(self) -> bool:
        return self.kind == "explicit-list"

    def coefficients(self, count: int) -> np.ndarray:
        """First `count` coefficients a_1..a_count."""
        n = np.arange(1, count + 1)
        if self.kind == "explicit-list":
            out = np.zeros(count, dtype=complex)
            take = min(count, self.data.size)
            out[:take] = self.data[:take]
            return out
        if self.kind == "all-ones":
            return np.ones(count, dtype=complex)
        if self.kind == "alternating":
            return ((-1.0) ** n).astype(complex)
        return np.array([complex(self.fn(int(k))) for k in n], dtype=complex)


class Sentinel(enum.Enum):
    """Signed-infinity tags kept out of floating arithmetic."""

    NEG_INF = "neg_inf"
    POS_INF = "pos_inf"

    def __repr__(self):
        return self.value


ExtendedReal = float | Sentinel


def ext_leq(a: ExtendedReal, b: ExtendedReal, tol: float = 0.0) -> bool:
    """a <= b + tol in the extended order."""
    if a is Sentinel.NEG_INF or b is Sentinel.POS_INF:
        return True
    if a is Sentinel.POS_INF:
        return b is Sentinel.POS_INF
    if b is Sentinel.NEG_INF:
        return a is Sentinel.NEG_INF
    return float(a) <= float(b) + tol


def ext_to_json(x: ExtendedReal):
    return x.value if isinstance(x, Sentinel) else float(x)


def ext_from_json(x) -> ExtendedReal:
    if x == "neg_inf":
        return Sentinel.NEG_INF
    if x == "pos_inf":
        return Sentinel.POS_INF
    return float(x)


@dataclass(frozen=True)
class AbscissaReport:
    """Estimated convergence / absolute-convergence abscissas.

    The uniform-convergence abscissa is only bracketed: it always lies
    between the plain and the absolute abscissa.
    """

    sigma_c_estimate: ExtendedReal
    sigma_a_estimate: ExtendedReal
    sigma_u_bracket: tuple[ExtendedReal, ExtendedReal]
    truncation_used: int

    ORDERING_TOL = 0.05

    def ordering_holds(self, tol: float | None = None) -> bool:
        t = self.ORDERING_TOL if tol is None else tol
        lo, hi = self.sigma_u_bracket
        chain = (
            ext_leq(self.sigma_c_estimate, lo, t)
            and ext_leq(lo, hi, t)
            and ext_leq(hi, self.sigma_a_estimate, t)
        )
        if isinstance(self.sigma_a_estimate, Sentinel) or isinstance(
            self.sigma_c_estimate, Sentinel
        ):
            gap = self.sigma_a_estimate is self.sigma_c_estimate
        else:
            gap = self.sigma_a_estimate <= self.sigma_c_estimate + 1.0 + t
        return chain and gap

    def to_json_dict(self) -> dict:
        return {
            "sigma_c_estimate": ext_to_json(self.sigma_c_estimate),
            "sigma_a_estimate": ext_to_json(self.sigma_a_estimate),
            "sigma_u_bracket": [ext_to_json(x) for x in self.sigma_u_bracket],
            "truncation_used": self.truncation_used,
        }


def _dyadic_slope(block_values: np.ndarray, block_ends: np.ndarray) -> float:
    """LSQ slope of log(values) against log(block end) over a dyadic ladder."""
    mask = block_values > 0
    if mask.sum() < 2:
        return 0.0
    x = np.log(block_ends[mask].astype(float))
    y = np.log(block_values[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def estimate_abscissas(rule: CoefficientRule, truncation: int) -> AbscissaReport:
    """Cahen-style regression estimates from a coefficient window.

    Fits the growth exponent of max |S_m| over dyadic blocks (plain
    partial sums S_m = sum_{n<=m} a_n) and of sum |a_n|.  Block maxima
    rather than endpoint values keep oscillating partial sums (which may
    vanish at block ends) from derailing the fit.
    """
    if truncation < 100:
        raise InvalidInputError("abscissa estimation needs truncation >= 100")
    if rule.finitely_supported:
        lo = Sentinel.NEG_INF
        return AbscissaReport(lo, lo, (lo, lo), truncation)

    coeffs = rule.coefficients(truncation)
    partial = np.cumsum(coeffs)
    partial_abs = np.cumsum(np.abs(coeffs))

    if not np.any(np.abs(coeffs) > 0):
        lo = Sentinel.NEG_INF
        return AbscissaReport(lo, lo, (lo, lo), truncation)

    ends = []
    m = truncation
    while m >= 16:
        ends.append(m)
        m //= 2
    ends = np.array(sorted(ends))
    starts = np.concatenate([[0], ends[:-1]])

    block_max = np.array(
        [np.max(np.abs(partial[lo:hi])) for lo, hi in zip(starts, ends)]
    )
    abs_at_end = partial_abs[ends - 1]

    sigma_c = _dyadic_slope(block_max, ends)
    sigma_a = _dyadic_slope(abs_at_end, ends)

    # project onto the admissible ordering: c <= a <= c + 1
    sigma_a = max(sigma_a, sigma_c)
    sigma_c = max(sigma_c, sigma_a - 1.0)

    return AbscissaReport(
        sigma_c_estimate=sigma_c,
        sigma_a_estimate=sigma_a,
        sigma_u_bracket=(sigma_c, sigma_a),
        truncation_used=truncation,
    )
