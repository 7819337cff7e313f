"""poscone_norms.py: l_q -> l_q operator norms of nonnegative matrices and norming vectors."""

import logging
import math

from dataclasses import dataclass

import numpy as np
from scipy.linalg import svd

from .poscone_const import (
    NORM_METHOD,
    dualExponent,
    DEFAULT_RESTARTS,
    DEFAULT_GRID_RESOLUTION,
    MAX_GRID_DIM,
    GRID_NEAR_TOL,
    GRID_CLUSTER_RADIUS,
)
from .poscone_core import (
    GeneralVector,
    PositiveVector,
    SpaceConfig,
    TruncatedPositiveOperator,
)
from .poscone_errors import (
    ContractionError,
    DegenerateInputError,
    DeltaTooLargeError,
    UnsupportedError,
)

_LOGGER = logging.getLogger(__name__)

BISECTION_STEPS = 60


@dataclass
class NormCertificate:
    value: float                # computed ||T||_{q->q}
    witness: PositiveVector     # ||witness||_q = 1
    method: NORM_METHOD
    iterations: int
    residual: float

    def converged(self, tol_rel: float) -> bool:
        return self.residual <= tol_rel * max(1.0, self.value)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness.coords.tolist(),
            "method": str(self.method),
            "iterations": self.iterations,
            "residual": self.residual,
        }


def _lqNorm(v: np.ndarray, q: float, axis=None):
    """l_q norm of an array (along axis)"""
    a = np.abs(v)
    if math.isinf(q):
        return a.max(axis=axis)
    if q == 1:
        return a.sum(axis=axis)
    return (a ** q).sum(axis=axis) ** (1.0 / q)


def vectorNorm(x: GeneralVector | np.ndarray, q: float) -> float:
    """The l_q norm (sum |x_k|^q)^(1/q); q = inf gives the sup-norm"""
    coords = x.coords if isinstance(x, GeneralVector) else np.asarray(x, dtype=float)
    return float(_lqNorm(coords, q))


def unitVectorNorm(space: SpaceConfig, k: int) -> float:
    """
    ||e_k|| in the ambient space. Always 1 on l_q; other spaces with an
    unconditional basis plug their basis constants in here.
    """
    return 1.0


def unitFunctionalNorm(space: SpaceConfig, k: int) -> float:
    """||e_k*|| in the dual space, see unitVectorNorm"""
    return 1.0


def _dualityMap(v: np.ndarray, r: float) -> np.ndarray:
    """
    Psi_r(v) = v^(r-1) on the positive cone. The limits are the support
    indicator for r = 1 and the indicator of one maximal coordinate for r = inf.
    """
    if r == 1:
        return (v > 0).astype(float)
    if math.isinf(r):
        out = np.zeros_like(v, dtype=float)
        out[int(np.argmax(v))] = 1.0
        return out
    return v ** (r - 1.0)


def _boydIteration(A: np.ndarray, q: float, x0: np.ndarray, tol_rel: float, max_iter: int):
    """
    Nonlinear power iteration x <- Psi_q*(A^T Psi_q(A x)) restricted to the positive cone.
    The norm estimate is nondecreasing along the iteration.
    Returns (value, x, iterations, residual)
    """
    qd = dualExponent(q)
    x = x0 / _lqNorm(x0, q)
    value = float(_lqNorm(A @ x, q))
    residual = math.inf

    for it in range(1, max_iter + 1):
        y = A @ x
        z = A.T @ _dualityMap(y, q)
        if not np.any(z > 0):
            return value, x, it, 0.0

        x_new = _dualityMap(z, qd)
        x_new = x_new / _lqNorm(x_new, q)
        value_new = float(_lqNorm(A @ x_new, q))

        if value_new < value:
            # no ascent left from x
            return value, x, it, 0.0
        residual = value_new - value
        x, value = x_new, value_new

        if residual < tol_rel * max(1.0, value):
            return value, x, it, residual

    return value, x, max_iter, residual


def operatorNorm(T: TruncatedPositiveOperator, method: NORM_METHOD | None = None, restarts: int = DEFAULT_RESTARTS) -> NormCertificate:
    """
    Compute ||T||_{q->q} together with a positive norming vector.
    q=1 and q=inf are exact (column / row sums), q=2 uses the largest singular value,
    other q use the cone restricted power iteration with restarts. The power iteration
    is available for every q and agrees with the exact formulas where they apply.
    A non-converged power iteration returns its best certificate with residual > tol_rel.
    """
    space = T.space
    q = space.q
    A = T.entries
    n = T.dim

    if method is None:
        if q == 1:
            method = NORM_METHOD.EXACT_L1
        elif math.isinf(q):
            method = NORM_METHOD.EXACT_LINF
        elif q == 2:
            method = NORM_METHOD.EXACT_L2
        else:
            method = NORM_METHOD.POWER

    if T.isZero():
        return NormCertificate(0.0, PositiveVector.basis(n, 0), method, 0, 0.0)

    match method:
        case NORM_METHOD.EXACT_L1:
            if q != 1:
                raise UnsupportedError(f"Column sum formula is the l_1 norm, operator has q={q}")
            sums = A.sum(axis=0)
            l = int(np.argmax(sums))
            return NormCertificate(float(sums[l]), PositiveVector.basis(n, l), method, 0, 0.0)

        case NORM_METHOD.EXACT_LINF:
            if not math.isinf(q):
                raise UnsupportedError(f"Row sum formula is the sup-norm, operator has q={q}")
            return NormCertificate(float(A.sum(axis=1).max()), PositiveVector.ones(n), method, 0, 0.0)

        case NORM_METHOD.EXACT_L2:
            if q != 2:
                raise UnsupportedError(f"Singular value formula is the l_2 norm, operator has q={q}")
            _, s, vh = svd(A)
            # |v| is norming too: A^T A is entrywise nonnegative
            witness = np.abs(vh[0])
            return NormCertificate(float(s[0]), PositiveVector(witness / np.linalg.norm(witness)), method, 0, 0.0)

        case NORM_METHOD.POWER:
            rng = np.random.default_rng(space.seed)
            starts = [np.ones(n)] + [rng.uniform(0.1, 1.0, n) for _ in range(max(0, restarts - 1))]

            best = None
            total_iter = 0
            for x0 in starts:
                value, x, iters, residual = _boydIteration(A, q, x0, space.tol_rel, space.max_iter)
                total_iter += iters
                if best is None or value > best[0]:
                    best = (value, x, residual)

            value, x, residual = best
            cert = NormCertificate(value, PositiveVector(x), method, total_iter, residual)
            if not cert.converged(space.tol_rel):
                _LOGGER.warning(f"Power method did not converge for dim {n}, q={q}: residual {residual:.3e} after {total_iter} iterations")
            else:
                _LOGGER.debug(f"Power method norm {value:.12g} for dim {n}, q={q} in {total_iter} iterations")
            return cert

    raise UnsupportedError(f"Unknown norm method '{method}'")


def isContraction(T: TruncatedPositiveOperator) -> bool:
    """||T|| <= 1 up to tol_rel"""
    return operatorNorm(T).value <= 1.0 + T.space.tol_rel


def dualNormingFunctional(x: PositiveVector, q: float) -> PositiveVector:
    """
    Positive functional x* with <x*, x> = ||x||_q and ||x*||_{q*} = 1.
    For l_q: x*_k = x_k^(q-1) / ||x||_q^(q-1); the support indicator for q = 1.
    """
    coords = x.coords
    norm = vectorNorm(x, q)
    if norm == 0:
        raise DegenerateInputError("Zero vector has no norming functional")

    if q == 1:
        return PositiveVector((coords > 0).astype(float))
    if math.isinf(q):
        k = int(np.argmax(coords))
        return PositiveVector.basis(x.dim, k)
    return PositiveVector(coords ** (q - 1.0) / norm ** (q - 1.0))


def exposingPerturbation(A: TruncatedPositiveOperator, delta: float) -> TruncatedPositiveOperator:
    """
    A + delta R0 with R0 x = <x0*, x> A x0, x0 a positive norming vector of A
    and x0* its positive norming functional.
    Throws
        DegenerateInputError if A = 0
        ContractionError if ||A|| >= 1
        DeltaTooLargeError if ||A + delta R0|| >= 1, carrying the largest admissible delta
    """
    if A.isZero():
        raise DegenerateInputError("Cannot expose the zero operator")
    if delta <= 0:
        raise DeltaTooLargeError(f"delta must be > 0, got {delta}", 0.0)

    cert = operatorNorm(A)
    if cert.value >= 1.0:
        raise ContractionError(f"Exposing perturbation needs ||A|| < 1, got {cert.value:.6g}")

    x0 = cert.witness
    x0_dual = dualNormingFunctional(x0, A.space.q)
    R0 = np.outer(A.entries @ x0.coords, x0_dual.coords)

    def perturbed(d: float) -> TruncatedPositiveOperator:
        return TruncatedPositiveOperator(A.entries + d * R0, A.space)

    result = perturbed(delta)
    value = operatorNorm(result).value
    if value < 1.0:
        _LOGGER.debug(f"Exposing perturbation with delta={delta}: norm {cert.value:.6g} -> {value:.6g}")
        return result

    lo, hi = 0.0, delta
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if operatorNorm(perturbed(mid)).value < 1.0:
            lo = mid
        else:
            hi = mid

    raise DeltaTooLargeError(f"delta={delta} gives ||A_delta|| = {value:.6g} >= 1; largest admissible delta ~ {lo:.6g}", lo)


def _positiveSphereGrid(dim: int, q: float, resolution: int, seed: int) -> np.ndarray:
    """Points of the positive part of the l_q unit sphere, one per row"""
    if dim == 2:
        t = np.linspace(0.0, 0.5 * math.pi, resolution)
        points = np.column_stack([np.cos(t), np.sin(t)])
    else:
        rng = np.random.default_rng(seed)
        points = np.abs(rng.standard_normal((resolution, dim)))
        points = np.vstack([points, np.eye(dim)])

    return points / _lqNorm(points, q, axis=1)[:, None]


def isAbsolutelyExposing(A: TruncatedPositiveOperator, grid_resolution: int = DEFAULT_GRID_RESOLUTION,
                         near_tol: float = GRID_NEAR_TOL, cluster_radius: float = GRID_CLUSTER_RADIUS) -> bool:
    """
    Heuristic test that the norming vectors of A form a single direction.
    Samples the positive unit sphere, keeps the points with ||A x|| >= ||A|| (1 - near_tol)
    and checks that they all lie within cluster_radius of the certified norming vector.
    Sampling the positive part suffices: |x| is norming whenever x is.
    Throws
        DegenerateInputError if A = 0
        UnsupportedError above MAX_GRID_DIM
    """
    if A.isZero():
        raise DegenerateInputError("The zero operator has no norming direction")
    if A.dim > MAX_GRID_DIM:
        raise UnsupportedError(f"Grid search is exponential in dimension; refusing dim {A.dim} > {MAX_GRID_DIM}")
    if A.dim == 1:
        return True

    q = A.space.q
    cert = operatorNorm(A)
    points = _positiveSphereGrid(A.dim, q, grid_resolution, A.space.seed)
    values = _lqNorm(points @ A.entries.T, q, axis=1)

    near = points[values >= cert.value * (1.0 - near_tol)]
    if near.shape[0] == 0:
        return True

    spread = float(_lqNorm(near - cert.witness.coords[None, :], q, axis=1).max())
    _LOGGER.debug(f"{near.shape[0]} near norming grid points, spread {spread:.4f} around the witness")
    return spread <= cluster_radius


def restrictedDefect(T: TruncatedPositiveOperator, lam: float, coords: list[int]) -> float:
    """
    Upper bound of ||(T - lam)|_E|| for E = span{e_c : c in coords}.
    Exact for q in {1, 2, inf}; otherwise the Riesz-Thorin bound ||B||_1^(1/q) ||B||_inf^(1-1/q).
    """
    if not coords:
        return 0.0

    B = (T.entries - lam * np.eye(T.dim))[:, list(coords)]
    q = T.space.q
    col = float(np.abs(B).sum(axis=0).max())
    row = float(np.abs(B).sum(axis=1).max())

    if q == 1:
        return col
    if math.isinf(q):
        return row
    if q == 2:
        return float(svd(B, compute_uv=False)[0])
    return col ** (1.0 / q) * row ** (1.0 - 1.0 / q)
