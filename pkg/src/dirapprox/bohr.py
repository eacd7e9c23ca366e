"""Prime-power dictionary between Dirichlet polynomials and polydisc polynomials.

Each integer n = p_1^{a_1} ... p_k^{a_k} corresponds to the monomial
z^a; under z_j = p_j^{-s} a Dirichlet polynomial of degree N becomes a
polynomial in k = pi(N) variables, and the half-plane sup norm equals
the sup over the closed unit polydisc.  This module implements the
dictionary exactly and the norm identity as a pair of sampled
lower-bound estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import minimize

from .errors import (
    InvalidInputError,
    NeedsLargerTableError,
    OutOfRangeError,
    ResourceLimitError,
)
from .series import DirichletPolynomial, SupNormPlan, sup_norm_halfplane

__all__ = [
    "PrimeTable",
    "MultiIndex",
    "LiftedPolynomial",
    "PolydiscPlan",
    "BohrGapReport",
    "factorize_to_multiindex",
    "lift",
    "unlift",
    "evaluate_lifted",
    "polydisc_sup_estimate",
    "bohr_gap_report",
]


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------

_TABLE_CACHE: dict[int, "PrimeTable"] = {}


@dataclass(frozen=True)
class PrimeTable:
    """Ascending primes, complete up to `bound`."""

    primes: tuple[int, ...]
    bound: int

    @staticmethod
    def up_to(bound: int) -> "PrimeTable":
        if bound < 1:
            raise InvalidInputError("prime table bound must be >= 1")
        cached = _TABLE_CACHE.get(bound)
        if cached is not None:
            return cached
        if bound < 2:
            table = PrimeTable((), bound)
        else:
            sieve = np.ones(bound + 1, dtype=bool)
            sieve[:2] = False
            for p in range(2, int(math.isqrt(bound)) + 1):
                if sieve[p]:
                    sieve[p * p :: p] = False
            table = PrimeTable(tuple(int(p) for p in np.nonzero(sieve)[0]), bound)
        _TABLE_CACHE[bound] = table
        return table

    def count(self) -> int:
        return len(self.primes)


def prime_count(bound: int) -> int:
    """pi(bound): number of primes <= bound."""
    return PrimeTable.up_to(max(bound, 1)).count()


# ---------------------------------------------------------------------------
# multi-indices and lifted polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiIndex:
    """Exponent tuple (a_1..a_k) with trailing zeros trimmed."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise InvalidInputError("multi-index entries must be >= 0")
        while exps and exps[-1] == 0:
            exps = exps[:-1]
        object.__setattr__(self, "exponents", exps)

    def __len__(self):
        return len(self.exponents)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        a, b = self.exponents, other.exponents
        if len(a) < len(b):
            a, b = b, a
        return MultiIndex(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))

    def prime_power(self, table: PrimeTable) -> int:
        """The integer p^alpha encoded by this index."""
        if len(self.exponents) > table.count():
            raise NeedsLargerTableError(
                f"index uses {len(self.exponents)} primes, table has {table.count()}"
            )
        n = 1
        for p, a in zip(table.primes, self.exponents):
            n *= p**a
        return n


def factorize_to_multiindex(n: int, table: PrimeTable) -> MultiIndex:
    """Exponent vector of n over the table's primes; exact factorization."""
    if n < 1:
        raise InvalidInputError("can only factorize integers n >= 1")
    exps = []
    rest = int(n)
    for p in table.primes:
        if rest == 1:
            break
        a = 0
        while rest % p == 0:
            rest //= p
            a += 1
        exps.append(a)
    if rest != 1:
        raise NeedsLargerTableError(
            f"n={n} has a prime factor beyond table bound {table.bound}"
        )
    return MultiIndex(tuple(exps))


@dataclass(frozen=True)
class LiftedPolynomial:
    """Polynomial sum_alpha c_alpha z^alpha on k variables.

    Terms hold exactly the nonzero coefficients of the source Dirichlet
    polynomial, keyed by the exponent vector of n over the first k primes.
    """

    terms: Mapping[MultiIndex, complex]
    variable_count: int

    def __post_init__(self):
        clean = {}
        for idx, c in self.terms.items():
            if not isinstance(idx, MultiIndex):
                idx = MultiIndex(tuple(idx))
            c = complex(c)
            if len(idx) > self.variable_count:
                raise InvalidInputError(
                    f"term {idx.exponents} exceeds variable count {self.variable_count}"
                )
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        if not isinstance(other, LiftedPolynomial):
            return NotImplemented
        return self.terms == other.terms  # variable counts may differ by padding

    def __mul__(self, other: "LiftedPolynomial") -> "LiftedPolynomial":
        out: dict[MultiIndex, complex] = {}
        for ia, ca in self.terms.items():
            for ib, cb in other.terms.items():
                key = ia + ib
                out[key] = out.get(key, 0) + ca * cb
        return LiftedPolynomial(out, max(self.variable_count, other.variable_count))

    def exponent_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(T x k exponent matrix, length-T coefficient vector), sorted keys."""
        keys = sorted(self.terms, key=lambda ix: (len(ix), ix.exponents))
        k = self.variable_count
        E = np.zeros((len(keys), k), dtype=float)
        c = np.zeros(len(keys), dtype=complex)
        for t, ix in enumerate(keys):
            E[t, : len(ix)] = ix.exponents
            c[t] = self.terms[ix]
        return E, c

    def to_json_list(self) -> list[dict]:
        keys = sorted(self.terms, key=lambda ix: (len(ix), ix.exponents))
        return [
            {
                "exponents": list(ix.exponents),
                "coeff": [self.terms[ix].real, self.terms[ix].imag],
            }
            for ix in keys
        ]

    @staticmethod
    def from_json_list(items: Iterable[dict], variable_count: int | None = None) -> "LiftedPolynomial":
        terms = {}
        kmax = 0
        for it in items:
            ix = MultiIndex(tuple(it["exponents"]))
            kmax = max(kmax, len(ix))
            re, im = it["coeff"]
            terms[ix] = complex(re, im)
        return LiftedPolynomial(terms, variable_count if variable_count is not None else kmax)


def lift(p: DirichletPolynomial) -> LiftedPolynomial:
    """Monomial dictionary image of p; k = number of primes <= degree."""
    table = PrimeTable.up_to(max(p.degree, 1))
    terms: dict[MultiIndex, complex] = {}
    for n in range(1, p.degree + 1):
        c = p.coefficients[n - 1]
        if c != 0:
            terms[factorize_to_multiindex(n, table)] = complex(c)
    return LiftedPolynomial(terms, table.count())


def unlift(q: LiftedPolynomial, max_degree: int = 1_000_000) -> DirichletPolynomial:
    """Inverse dictionary: coefficient of alpha lands at n = p^alpha."""
    need = max((len(ix) for ix in q.terms), default=0)
    # enough primes for the longest index: p_k <= ~k(ln k + ln ln k) for k>=6
    bound = 50 if need < 10 else int(need * (math.log(need) + math.log(math.log(need))) * 1.2) + 10
    table = PrimeTable.up_to(bound)
    entries = {}
    degree = 1
    for ix, c in q.terms.items():
        n = ix.prime_power(table)
        if n > max_degree:
            raise OutOfRangeError(
                f"term {ix.exponents} encodes n={n} beyond max_degree={max_degree}"
            )
        entries[n] = entries.get(n, 0) + c
        degree = max(degree, n)
    coeffs = np.zeros(degree, dtype=complex)
    for n, c in entries.items():
        coeffs[n - 1] = c
    return DirichletPolynomial(coeffs)


def evaluate_lifted(q: LiftedPolynomial, z: Iterable[complex]) -> complex:
    """Value of q at a point of C^k (componentwise powers; 0^0 = 1)."""
    zv = np.asarray(list(z), dtype=complex)
    if zv.size != q.variable_count:
        raise InvalidInputError(
            f"point has {zv.size} coordinates, polynomial expects {q.variable_count}"
        )
    E, c = q.exponent_matrix()
    if E.size == 0:
        return complex(np.sum(c))
    vals = np.prod(np.power(zv[None, :], E), axis=1)
    return complex(np.sum(c * vals))


# ---------------------------------------------------------------------------
# polydisc sup estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolydiscPlan:
    """Torus sampling plan.

    Tensor-product angle grids for few variables; beyond tensor_max_vars
    the grid is replaced by seeded Monte-Carlo angles with local
    gradient polish of the best candidates.  Hard cap at max_vars.
    """

    angles: int = 64
    tensor_max_vars: int = 3
    max_vars: int = 8
    mc_samples: int = 120_000
    polish_starts: int = 16
    max_refinements: int = 2
    refine_tol: float = 1e-3
    seed: int = 0

    def validated(self) -> "PolydiscPlan":
        if self.angles < 2 or self.mc_samples < 1:
            raise InvalidInputError("polydisc plan must sample at least 2 angles")
        return self


def _torus_values(E: np.ndarray, c: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """|q| at torus points exp(i theta); thetas is (B x k)."""
    phases = thetas @ E.T
    return np.abs(np.exp(1j * phases) @ c)


def _polish_on_torus(E: np.ndarray, c: np.ndarray, theta0: np.ndarray) -> float:
    """Local maximization of |q(e^{i theta})| via L-BFGS on -|q|^2."""

    def neg_sq_and_grad(theta):
        ph = np.exp(1j * (E @ theta))
        f = np.dot(c, ph)
        # d|f|^2/dtheta_j = 2 Re( conj(f) * i * sum_t c_t E_tj e^{i E_t.theta} )
        g = 2.0 * np.real(np.conj(f) * (1j * (c * ph) @ E))
        return -abs(f) ** 2, -g

    res = minimize(neg_sq_and_grad, theta0, jac=True, method="L-BFGS-B")
    return math.sqrt(max(0.0, -res.fun))


def polydisc_sup_estimate(q: LiftedPolynomial, plan: PolydiscPlan | None = None) -> float:
    """Lower-bound estimate of sup over the closed unit polydisc.

    Sampling is restricted to the distinguished boundary torus |z_j| = 1
    (the maximum principle puts the sup there).
    """
    if plan is None:
        plan = PolydiscPlan()
    plan = plan.validated()
    k = q.variable_count
    if not q.terms:
        return 0.0
    E, c = q.exponent_matrix()
    if k == 0 or np.all(E == 0):
        return float(abs(np.sum(c)))
    if k > plan.max_vars:
        raise ResourceLimitError(
            f"{k} variables exceeds plan cap {plan.max_vars}; raise max_vars knowingly"
        )

    if k <= plan.tensor_max_vars:
        best = 0.0
        m = plan.angles
        prev = -1.0
        for _ in range(plan.max_refinements + 1):
            axes = [np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)] * k
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
            vals = _torus_values(E, c, grid)
            i = int(np.argmax(vals))
            best = max(best, float(vals[i]))
            best = max(best, _polish_on_torus(E, c, grid[i]))
            if prev >= 0 and abs(best - prev) <= plan.refine_tol * max(best, 1e-30):
                break
            prev = best
            m *= 2
        return best

    rng = np.random.default_rng(plan.seed)
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=(plan.mc_samples, k))
    vals = _torus_values(E, c, thetas)
    order = np.argsort(vals)[-plan.polish_starts :]
    best = float(vals[order[-1]])
    for i in order:
        best = max(best, _polish_on_torus(E, c, thetas[i]))
    return best


# ---------------------------------------------------------------------------
# norm identity check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BohrGapReport:
    halfplane_value: float
    polydisc_value: float
    relative_gap: float
    tolerance: float

    @property
    def within_tolerance(self) -> bool:
        return self.relative_gap <= self.tolerance


def _gap_halfplane_plan(k: int) -> SupNormPlan:
    """Sweep length scaled to variable count.

    The boundary line fills the k-torus of prime phases at rate
    ~T^{1/(k-1)} per coordinate, so high k needs a long sweep to come
    within a couple of percent of the sup; low k converges fast.
    """
    height = {0: 200.0, 1: 200.0, 2: 2e4, 3: 1e5, 4: 2e5, 5: 2e6, 6: 6.5e6, 7: 1.2e7}.get(k, 3.2e7)
    dt = 0.5 if height <= 2e6 else 1.0
    return SupNormPlan(
        width=2.0,
        height=height,
        sigma_steps=20,
        t_steps=200,
        max_refinements=0,
        edge_points=int(height / dt) + 1,
    )


def bohr_gap_report(
    p: DirichletPolynomial,
    tolerance: float = 0.02,
    halfplane_plan: SupNormPlan | None = None,
    polydisc_plan: PolydiscPlan | None = None,
) -> BohrGapReport:
    """Numerical check of the half-plane / polydisc sup identity.

    Both sides are sampled lower bounds, so the gap measures estimator
    quality, not the identity itself; tolerance is a knob (default 2%).
    """
    q = lift(p)
    hp = sup_norm_halfplane(p, 0.0, halfplane_plan or _gap_halfplane_plan(q.variable_count))
    pd = polydisc_sup_estimate(q, polydisc_plan)
    scale = max(hp, pd, 1e-300)
    return BohrGapReport(hp, pd, abs(hp - pd) / scale, tolerance)
