"""Finite sections of the multiplication tuple on ``H_d^(t)``.

All matrices act on coordinates with respect to the orthonormal basis
``z^a / ||z^a||_t`` of polynomials of total degree at most ``D``.  Monomials
are ordered by total degree first, so the degree-``D'`` basis is a prefix of
the degree-``D`` basis whenever ``D' <= D``.  Everything here is double
precision; exact norms are converted when a basis is built.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .norms import SpaceParams, monomial_norm_sq
from .polyring import Polynomial

__all__ = [
    "NumericalDiagnosticError",
    "AngleDegenerateError",
    "TruncationBasis",
    "OperatorMatrix",
    "truncation_basis",
    "mult_op",
    "adjoint_mult_op",
    "orthonormal_columns",
    "generator_span",
    "ideal_projection",
    "cross_commutator",
    "schatten_norm",
    "schatten_norm_eig",
    "ScanRow",
    "essential_normality_scan",
    "fang_xia_ratio",
    "fang_xia_probe",
    "AngleReport",
    "angle_bound_check",
    "random_angle_trial",
]

RANK_RTOL = 1e-10
# singular values within this factor above the rank cut are treated as ambiguous
AMBIGUITY_BAND = 1e3


class NumericalDiagnosticError(RuntimeError):
    def __init__(self, message: str, condition: float = math.nan):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class AngleDegenerateError(NumericalDiagnosticError):
    pass


@dataclass(frozen=True, eq=False)
class TruncationBasis:
    sp: SpaceParams
    D: int
    monomials: tuple
    norms: np.ndarray  # ||z^a||_t as doubles
    degrees: np.ndarray
    index: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.monomials)

    def prefix(self, D: int) -> int:
        """Number of basis vectors of total degree at most ``D``."""
        return int(np.searchsorted(self.degrees, D, side="right"))

    def coords(self, p: Polynomial) -> np.ndarray:
        """Coordinates of ``p`` in the orthonormal basis."""
        v = np.zeros(self.size, dtype=complex)
        for m, c in p.items():
            k = self.index.get(m)
            if k is None:
                raise ValueError(f"monomial {m} exceeds truncation degree {self.D}")
            v[k] = complex(float(c.re), float(c.im)) * self.norms[k]
        return v

    def raw_coords(self, p: Polynomial) -> np.ndarray:
        """Plain coefficient vector (no norm weighting)."""
        v = np.zeros(self.size, dtype=complex)
        for m, c in p.items():
            k = self.index.get(m)
            if k is None:
                raise ValueError(f"monomial {m} exceeds truncation degree {self.D}")
            v[k] = complex(float(c.re), float(c.im))
        return v


def _monomials_upto(d: int, D: int) -> list:
    out = []
    for n in range(D + 1):
        # exponents of total degree n, lexicographically descending
        level = [a for a in itertools.product(range(n, -1, -1), repeat=d) if sum(a) == n]
        out.extend(level)
    return out


@lru_cache(maxsize=128)
def truncation_basis(sp: SpaceParams, D: int) -> TruncationBasis:
    if D < 0:
        raise ValueError("truncation degree must be non-negative")
    monos = _monomials_upto(sp.d, D)
    norms = np.array([math.sqrt(monomial_norm_sq(m, sp)) for m in monos])
    degrees = np.array([sum(m) for m in monos])
    return TruncationBasis(sp, D, tuple(monos), norms, degrees, {m: k for k, m in enumerate(monos)})


@dataclass(eq=False)
class OperatorMatrix:
    matrix: np.ndarray
    domain: TruncationBasis
    codomain: TruncationBasis
    boundary: np.ndarray | None = None  # codomain rows touching the top degree
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.size, self.domain.size):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match bases "
                f"({self.codomain.size}, {self.domain.size})"
            )

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T


def mult_op(i: int, sp: SpaceParams, D: int) -> OperatorMatrix:
    """``S_i`` (multiplication by ``z_i``, ``i`` 1-based) from degree ``<= D`` to ``<= D+1``."""
    if not 1 <= i <= sp.d:
        raise ValueError(f"variable index {i} out of range 1..{sp.d}")
    dom = truncation_basis(sp, D)
    cod = truncation_basis(sp, D + 1)
    S = np.zeros((cod.size, dom.size), dtype=complex)
    for k, a in enumerate(dom.monomials):
        b = list(a)
        b[i - 1] += 1
        r = cod.index[tuple(b)]
        S[r, k] = cod.norms[r] / dom.norms[k]
    return OperatorMatrix(S, dom, cod)


def adjoint_mult_op(j: int, sp: SpaceParams, D: int) -> OperatorMatrix:
    """``S_j^*`` on the degree ``<= D`` section; exact there since it lowers degree."""
    basis = truncation_basis(sp, D)
    A = np.zeros((basis.size, basis.size), dtype=complex)
    if D >= 1:
        S = mult_op(j, sp, D - 1).matrix  # rows: degree <= D, cols: degree <= D-1
        A[: S.shape[1], :] = S.conj().T
    return OperatorMatrix(A, basis, basis)


def orthonormal_columns(V: np.ndarray, rtol: float = RANK_RTOL):
    """Orthonormal basis of the column span of ``V`` with explicit rank detection.

    Columns are scaled to unit length first.  Returns ``(Q, info)``.  Raises
    :class:`NumericalDiagnosticError` when a singular value falls in the
    ambiguous band just above the rank cut.
    """
    if V.size == 0 or V.shape[1] == 0:
        return np.zeros((V.shape[0], 0), dtype=complex), {"rank": 0, "condition": 1.0}
    norms = np.linalg.norm(V, axis=0)
    keep = norms > 0
    W = V[:, keep] / norms[keep]
    U, s, _ = np.linalg.svd(W, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((V.shape[0], 0), dtype=complex), {"rank": 0, "condition": 1.0}
    cut = rtol * s[0]
    rank = int(np.sum(s > cut))
    cond = float(s[0] / s[rank - 1])
    ambiguous = (s > cut) & (s <= AMBIGUITY_BAND * cut)
    if np.any(ambiguous):
        raise NumericalDiagnosticError("Gram conditioning failure: no clear rank gap", cond)
    return U[:, :rank], {"rank": rank, "condition": cond, "singular_values": s}


def generator_span(gens: Sequence[Polynomial], sp: SpaceParams, D: int):
    """Columns ``z^a f_i`` (total degree ``<= D``) in orthonormal coordinates, plus block labels."""
    basis = truncation_basis(sp, D)
    cols, labels = [], []
    for i, f in enumerate(gens):
        if f.is_zero():
            raise ValueError(f"generator {i} is zero")
        if f.dim != sp.d:
            raise ValueError(f"generator {i} has {f.dim} variables, space has d = {sp.d}")
        room = D - f.total_degree()
        if room < 0:
            continue
        for a in _monomials_upto(sp.d, room):
            cols.append(basis.coords(f.shift(a)))
            labels.append(i)
    V = np.array(cols, dtype=complex).T if cols else np.zeros((basis.size, 0), dtype=complex)
    return V, np.array(labels, dtype=int)


def ideal_projection(gens: Sequence[Polynomial], sp: SpaceParams, D: int) -> OperatorMatrix:
    """Orthogonal projection onto ``span{z^a f_i : deg <= D}`` inside the degree-``D`` section."""
    if not gens:
        raise ValueError("empty generator list")
    if D < min(f.total_degree() for f in gens):
        raise ValueError(f"truncation degree {D} is below every generator degree")
    basis = truncation_basis(sp, D)
    V, _ = generator_span(gens, sp, D)
    Q, info = orthonormal_columns(V)
    P = Q @ Q.conj().T
    return OperatorMatrix(P, basis, basis, info={"rank": info["rank"], "condition": info["condition"]})


def cross_commutator(i: int, j: int, sp: SpaceParams, D: int) -> OperatorMatrix:
    """``[S_i, S_j^*] = S_i S_j^* - S_j^* S_i`` on the degree-``D`` section.

    ``S_i`` is built one degree higher so both products are exact on the
    section; rows and columns of top degree ``D`` are flagged in ``boundary``.
    """
    basis = truncation_basis(sp, D)
    big = mult_op(i, sp, D).matrix  # degree <= D -> <= D+1
    Sj_big = mult_op(j, sp, D).matrix
    n = basis.size
    Si = big[:n, :]  # compression of S_i to the section
    Sj_star = Sj_big[:n, :].conj().T
    C = Si @ Sj_star - Sj_big.conj().T @ big
    return OperatorMatrix(C, basis, basis, boundary=basis.degrees >= D)


def _as_array(A) -> np.ndarray:
    return A.matrix if isinstance(A, OperatorMatrix) else np.asarray(A)


def schatten_norm(A, p: float) -> float:
    """``(sum sigma^p)^(1/p)`` from singular values; ``p = inf`` gives the operator norm."""
    if p < 1:
        raise ValueError("Schatten norms need p >= 1")
    M = _as_array(A)
    if M.size == 0:
        return 0.0
    s = np.linalg.svd(M, compute_uv=False)
    if math.isinf(p):
        return float(s.max(initial=0.0))
    smax = s.max(initial=0.0)
    if smax == 0:
        return 0.0
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


def schatten_norm_eig(A, p: float) -> float:
    """Same quantity via the eigenvalues of ``A* A`` (independent route)."""
    if p < 1:
        raise ValueError("Schatten norms need p >= 1")
    M = _as_array(A)
    if M.size == 0:
        return 0.0
    ev = np.clip(np.linalg.eigvalsh(M.conj().T @ M), 0.0, None)
    s = np.sqrt(ev)
    if math.isinf(p):
        return float(s.max(initial=0.0))
    smax = s.max(initial=0.0)
    if smax == 0:
        return 0.0
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class ScanRow:
    D: int
    j: int
    value: float
    increment: float | None
    boundary_value: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "j": self.j,
            "schatten": self.value,
            "increment": self.increment,
            "boundary": self.boundary_value,
            "rank": self.rank,
        }


def essential_normality_scan(
    gens: Sequence[Polynomial], sp: SpaceParams, p: float, D_list: Sequence[int], js: Sequence[int] | None = None
) -> list:
    """Schatten-``2p`` norms of ``P_N^perp S_j^* P_N`` over increasing truncations.

    Descriptive only: a finite series says nothing conclusive about the
    infinite-dimensional operator.
    """
    D_list = list(D_list)
    if any(b <= a for a, b in zip(D_list, D_list[1:])):
        raise ValueError("D_list must be strictly increasing")
    if p <= sp.d:
        warnings.warn(f"p = {p} is not above d = {sp.d}; outside the expected range", stacklevel=2)
    max_deg = max(f.total_degree() for f in gens)
    if D_list and D_list[0] <= max_deg:
        raise ValueError(f"truncation {D_list[0]} too small for generator degree {max_deg}")
    js = list(js) if js is not None else list(range(1, sp.d + 1))
    rows = []
    prev = {}
    for D in D_list:
        P = ideal_projection(gens, sp, D)
        basis = P.domain
        Pm = P.matrix
        perp = np.eye(basis.size) - Pm
        top = basis.degrees >= D
        for j in js:
            A = perp @ adjoint_mult_op(j, sp, D).matrix @ Pm
            # interior compression: columns of degree <= D-1; top degree reported apart
            val = schatten_norm(A[:, ~top], 2 * p)
            bval = schatten_norm(A[:, top], 2 * p)
            inc = None if j not in prev else val - prev[j]
            prev[j] = val
            rows.append(ScanRow(D, j, val, inc, bval, P.info["rank"]))
    return rows


def _principal_complement(f: Polynomial, sp: SpaceParams, D: int) -> np.ndarray:
    P = ideal_projection([f], sp, D)
    return np.eye(P.domain.size) - P.matrix


def fang_xia_ratio(f: Polynomial, g: Polynomial, sp: SpaceParams, D: int, j: int) -> tuple:
    """``(lhs, rhs)`` with ``lhs = ||Q S_j^* (g f)||_t`` and ``rhs = ||g f||_{t+1}``."""
    gf = g * f
    if gf.is_zero():
        return 0.0, 0.0
    if gf.total_degree() > D:
        raise ValueError("truncation too small for g f")
    Q = _principal_complement(f, sp, D)
    Sj = adjoint_mult_op(j, sp, D).matrix
    lhs = float(np.linalg.norm(Q @ Sj @ truncation_basis(sp, D).coords(gf)))
    rhs = float(np.linalg.norm(truncation_basis(sp.shifted(1), D).coords(gf)))
    return lhs, rhs


def fang_xia_probe(
    f: Polynomial,
    sp: SpaceParams,
    D: int,
    samples: int = 200,
    seed: int = 0,
    js: Sequence[int] | None = None,
    vanishing_order: int = 0,
) -> dict:
    """Empirical constant ``K`` in ``||Q S_j^* g f||_t <= K ||g f||_{t+1}``.

    ``g`` has independent complex normal coefficients on monomials of total
    degree in ``[vanishing_order, D - deg f]``.  ``Q`` projects onto the
    complement of the truncated principal ideal ``<f>``.
    """
    if f.is_zero():
        raise ValueError("f must be nonzero")
    room = D - f.total_degree()
    if room < vanishing_order:
        raise ValueError("truncation too small for the requested g")
    js = list(js) if js is not None else list(range(1, sp.d + 1))
    rng = np.random.default_rng(seed)
    basis_t = truncation_basis(sp, D)
    basis_t1 = truncation_basis(sp.shifted(1), D)
    g_monos = [a for a in _monomials_upto(sp.d, room) if sum(a) >= vanishing_order]
    # raw-coefficient matrix of g -> g f
    Mf = np.zeros((basis_t.size, len(g_monos)), dtype=complex)
    for k, a in enumerate(g_monos):
        Mf[:, k] = basis_t.raw_coords(f.shift(a))
    Q = _principal_complement(f, sp, D)
    Sj = {j: adjoint_mult_op(j, sp, D).matrix for j in js}
    rows = []
    for s in range(samples):
        coef = rng.standard_normal(len(g_monos)) + 1j * rng.standard_normal(len(g_monos))
        gf = Mf @ coef
        rhs = float(np.linalg.norm(basis_t1.norms * gf))
        vt = basis_t.norms * gf
        for j in js:
            lhs = float(np.linalg.norm(Q @ (Sj[j] @ vt)))
            rows.append({"sample": s, "j": j, "lhs": lhs, "rhs": rhs,
                         "ratio": lhs / rhs if rhs > 0 else math.nan})
    ratios = [r["ratio"] for r in rows if not math.isnan(r["ratio"])]
    return {"D": D, "samples": samples, "seed": seed, "rows": rows,
            "max_ratio": max(ratios) if ratios else math.nan}


@dataclass
class AngleReport:
    c: float
    C: float
    bound_factor: float  # C * sqrt(2) * (1 - c)^(-1/2)
    samples: int
    violations: int
    intermediate_violations: int
    worst_ratio: float  # max ||T(m+n)|| / (bound_factor ||m+n||)
    steps: list = field(default_factory=list)


def angle_bound_check(M_basis, N_basis, T, samples: int = 1000, seed: int = 0, slack: float = 1e-9) -> AngleReport:
    """Sample the bound ``||T(m+n)|| <= C sqrt(2) (1-c)^(-1/2) ||m+n||``.

    ``c`` is the cosine of the angle between a unit ``v`` spanning ``N`` and
    ``M``; ``C`` bounds ``T`` on ``M`` and on ``N``.  A multi-dimensional
    ``N`` is absorbed one vector at a time, each step feeding its bound into
    the next.
    """
    Tm = _as_array(T).astype(complex)
    M = np.asarray(M_basis, dtype=complex)
    N = np.asarray(N_basis, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    if N.ndim == 1:
        N = N[:, None]
    rng = np.random.default_rng(seed)
    Qm, _ = orthonormal_columns(M) if M.shape[1] else (np.zeros((Tm.shape[1], 0)), None)
    bound_M = float(np.linalg.norm(Tm @ Qm, 2)) if Qm.shape[1] else 0.0
    steps = []
    violations = 0
    inter = 0
    worst = 0.0
    c = C = factor = 0.0
    for k in range(N.shape[1]):
        v = N[:, k] / np.linalg.norm(N[:, k])
        c = float(np.linalg.norm(Qm.conj().T @ v)) if Qm.shape[1] else 0.0
        if c >= 1 - 1e-8:
            raise AngleDegenerateError("v lies (numerically) in the closure of M", 1.0 / max(1 - c, 1e-300))
        C = max(bound_M, float(np.linalg.norm(Tm @ v)))
        factor = C * math.sqrt(2.0) / math.sqrt(1.0 - c)
        for _ in range(samples):
            a = rng.standard_normal(Qm.shape[1]) + 1j * rng.standard_normal(Qm.shape[1])
            m = Qm @ a * np.exp(rng.uniform(-3, 3))
            beta = complex(rng.standard_normal(), rng.standard_normal()) * np.exp(rng.uniform(-3, 3))
            n = beta * v
            s = m + n
            ns = float(np.linalg.norm(s))
            lhs = float(np.linalg.norm(Tm @ s))
            if lhs > factor * ns * (1 + slack) + 1e-300:
                violations += 1
            if factor * ns > 0:
                worst = max(worst, lhs / (factor * ns))
            nm2 = float(np.linalg.norm(m)) ** 2
            nn2 = float(np.linalg.norm(n)) ** 2
            if ns * ns < (1 - c) * (nm2 + nn2) * (1 - slack):
                inter += 1
        steps.append({"c": c, "C": C, "bound": factor})
        # absorb v into M for the next vector
        Qm, _ = orthonormal_columns(np.column_stack([Qm, v]))
        bound_M = factor
    return AngleReport(c, C, factor, samples * N.shape[1], violations, inter, worst, steps)


def random_angle_trial(rng: np.random.Generator, ambient: int, m_dim: int, c: float | None = None,
                       samples: int = 20, slack: float = 1e-9) -> AngleReport:
    """One random instance for :func:`angle_bound_check`.

    ``M`` is a random ``m_dim``-dimensional subspace of ``C^ambient``; the
    unit vector ``v`` makes cosine ``c`` with it (uniform in ``[0, 0.95]``
    when not given) and ``T`` is a random complex matrix.
    """
    if not 1 <= m_dim < ambient:
        raise ValueError("need 1 <= m_dim < ambient")
    if c is None:
        c = float(rng.uniform(0.0, 0.95))
    G = rng.standard_normal((ambient, m_dim + 1)) + 1j * rng.standard_normal((ambient, m_dim + 1))
    Q, _ = np.linalg.qr(G)
    M = Q[:, :m_dim]
    v = c * M[:, 0] + math.sqrt(1.0 - c * c) * Q[:, m_dim]
    T = rng.standard_normal((ambient, ambient)) + 1j * rng.standard_normal((ambient, ambient))
    seed = int(rng.integers(0, 2**31))
    return angle_bound_check(M, v, T, samples=samples, seed=seed, slack=slack)
