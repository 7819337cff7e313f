"""poscone_commutant.py: commutant of a truncated operator and cone programs over it."""

import logging
import threading

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .poscone_const import (
    DEFAULT_HORIZON,
    FEASIBILITY_TOL,
    MAX_COMMUTANT_DIM,
    NORMALIZATION,
    VERDICT,
)
from .poscone_core import (
    PositiveVector,
    TruncatedPositiveOperator,
    clampNonNegative,
)
from .poscone_errors import (
    ContractionError,
    DegenerateInputError,
    DimensionError,
    SolverError,
    UnsupportedError,
)
from .poscone_norms import isContraction, operatorNorm
from .poscone_spectral import localRadius

_LOGGER = logging.getLogger(__name__)

# weight of the diagonal on supp(y) against the rest of the diagonal in the witness search
SUPPORT_DIAGONAL_WEIGHT = 1000.0


##
## Commutant basis
##
@dataclass
class CommutantBasis:
    dim: int
    basis: list[np.ndarray]     # orthonormal in the Frobenius inner product

    @property
    def rank(self) -> int:
        return len(self.basis)

    def stacked(self) -> np.ndarray:
        """dim^2 x rank matrix with vec(B_m) (row major) as columns"""
        return np.column_stack([b.reshape(-1) for b in self.basis])

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rank": self.rank,
            "basis": [b.tolist() for b in self.basis],
        }


def commutationResidual(A: np.ndarray, T: np.ndarray) -> float:
    """||AT - TA||_F"""
    return float(np.linalg.norm(A @ T - T @ A))


def commutantBasis(T: TruncatedPositiveOperator) -> CommutantBasis:
    """
    Orthonormal basis of {A : AT = TA} as the null space of
    vec(A) -> vec(AT - TA) = (I (x) T^T - T (x) I) vec(A).
    Throws
        UnsupportedError above MAX_COMMUTANT_DIM
    """
    n = T.dim
    if n > MAX_COMMUTANT_DIM:
        raise UnsupportedError(f"Commutant system has dim^4 coefficients; refusing dim {n} > {MAX_COMMUTANT_DIM}")

    eye = np.eye(n)
    L = np.kron(eye, T.entries.T) - np.kron(T.entries, eye)
    kernel = null_space(L, rcond=T.space.tol_rel)

    basis = [kernel[:, m].reshape(n, n) for m in range(kernel.shape[1])]
    _LOGGER.debug(f"Commutant of dim {n} operator has rank {len(basis)}")
    return CommutantBasis(n, basis)


##
## Cone program records
##
@dataclass(frozen=True)
class CommutantConstraint:
    i: int
    j: int
    eta: float
    p: int

    def validate(self, dim: int):
        if not all(0 <= idx < dim for idx in (self.i, self.j, self.p)):
            raise DimensionError(f"Constraint indices ({self.i}, {self.j}, {self.p}) out of range for dim {dim}")
        if not self.eta > 0:
            raise DimensionError(f"Constraint eta must be > 0, got {self.eta}")

    @staticmethod
    def from_dict(d: dict) -> "CommutantConstraint":
        return CommutantConstraint(int(d['i']), int(d['j']), float(d['eta']), int(d['p']))

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "eta": self.eta, "p": self.p}


@dataclass
class SolverStatus:
    status: int
    message: str
    iterations: int = 0
    primal_objective: float | None = None
    dual_objective: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status == 0

    @property
    def infeasible(self) -> bool:
        return self.status == 2

    @property
    def gap(self) -> float | None:
        if self.primal_objective is None or self.dual_objective is None:
            return None
        return abs(self.primal_objective - self.dual_objective)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "message": self.message,
            "iterations": self.iterations,
            "primal_objective": self.primal_objective,
            "dual_objective": self.dual_objective,
            "gap": self.gap,
        }


@dataclass
class ConeProgramResult:
    value: float | None             # maximized <W, A>, None if infeasible
    matrix: np.ndarray | None
    status: SolverStatus


@dataclass
class FeasibilityResult:
    feasible: bool
    constraint: CommutantConstraint
    dim: int
    value: float                    # <e_j*, A e_i> after rescaling to ||A||_q <= 1
    certificate: SolverStatus
    witness: TruncatedPositiveOperator | None = None

    def to_dict(self) -> dict:
        return {
            "truncation_dim": self.dim,
            "constraint": self.constraint.to_dict(),
            "feasible": self.feasible,
            "value": self.value,
            "witness": self.witness.entries.tolist() if self.witness is not None else None,
            "certificate": self.certificate.to_dict(),
        }


##
## Solver interface
##
class CommutantSolverBase:

    def __init__(self, feasibility_tol: float = FEASIBILITY_TOL):
        self._feasibility_tol = feasibility_tol

        # Diagnostics gathering
        self._diag_lock = threading.Lock()
        self._diag_status = {}
        self._diag_iterations = {}


    def _solve(self, c: np.ndarray, A_ub: np.ndarray, b_ub: np.ndarray, A_eq: np.ndarray | None, b_eq: np.ndarray | None):
        """Minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq with free x. Returns (x | None, SolverStatus)"""
        raise NotImplementedError()


    def coneMaximize(self, T: TruncatedPositiveOperator, weights: np.ndarray, zero_diagonal: list[int] = (),
                     normalization: NORMALIZATION | None = None, total_mass: float | None = None,
                     basis: CommutantBasis | None = None) -> ConeProgramResult:
        """
        Maximize <weights, A> over A = sum c_m B_m in the commutant with
        A >= 0, a_pp = 0 for p in zero_diagonal, the polyhedral normalization
        and optionally sum(A) = total_mass.
        Throws
            SolverError on any status other than optimal / infeasible
        """
        n = T.dim
        basis = basis or commutantBasis(T)
        Bm = basis.stacked()
        cube = Bm.reshape(n, n, -1)

        if normalization is None:
            normalization = NORMALIZATION.forExponent(T.space.q)

        ub_rows = [-Bm]
        ub_rhs = [np.zeros(n * n)]
        if normalization in (NORMALIZATION.COLUMN_SUMS, NORMALIZATION.BOTH):
            ub_rows.append(cube.sum(axis=0))
            ub_rhs.append(np.ones(n))
        if normalization in (NORMALIZATION.ROW_SUMS, NORMALIZATION.BOTH):
            ub_rows.append(cube.sum(axis=1))
            ub_rhs.append(np.ones(n))

        eq_rows = [Bm[p * n + p] for p in zero_diagonal]
        eq_rhs = [0.0] * len(eq_rows)
        if total_mass is not None:
            eq_rows.append(Bm.sum(axis=0))
            eq_rhs.append(total_mass)

        c = -(np.asarray(weights, dtype=float).reshape(-1) @ Bm)
        A_eq = np.vstack(eq_rows) if eq_rows else None
        b_eq = np.asarray(eq_rhs) if eq_rows else None

        x, status = self._solve(c, np.vstack(ub_rows), np.concatenate(ub_rhs), A_eq, b_eq)
        self._addDiagnostics(status)

        if status.infeasible:
            _LOGGER.debug(f"Cone program infeasible: {status.message}")
            return ConeProgramResult(None, None, status)
        if not status.optimal:
            raise SolverError(f"Cone program failed with status {status.status}: {status.message}", status)

        matrix = clampNonNegative((Bm @ x).reshape(n, n), 10 * self._feasibility_tol, "cone program entry")
        value = float(np.sum(np.asarray(weights) * matrix))
        _LOGGER.debug(f"Cone program optimum {value:.6g} after {status.iterations} iterations (gap {status.gap})")
        return ConeProgramResult(value, matrix, status)


    def fSetMembership(self, T: TruncatedPositiveOperator, c: CommutantConstraint, basis: CommutantBasis | None = None) -> FeasibilityResult:
        """
        Decide whether some A >= 0 with AT = TA, <e_j*, A e_i> >= eta, <e_p*, A e_p> = 0
        and ||A|| <= 1 exists at this truncation.
        The LP maximizes <e_j*, A e_i> under the polyhedral normalization;
        the optimum is rescaled to ||A||_q = 1 and compared against eta.
        Deciding whether <e_j*, A e_i> can be positive at all is exact. Off q in {1, inf}
        the polyhedral set lies inside the unit ball, so a feasible verdict is always
        sound while the rescaled value is only a lower bound of the supremum.
        Throws
            ContractionError if T is not a contraction
            DimensionError on constraint indices out of range
            SolverError
        """
        c.validate(T.dim)
        if not isContraction(T):
            raise ContractionError(f"F-set membership is defined for contractions, ||T|| = {operatorNorm(T).value:.6g}")

        weights = np.zeros((T.dim, T.dim))
        weights[c.j, c.i] = 1.0
        result = self.coneMaximize(T, weights, zero_diagonal=[c.p], basis=basis)

        if result.matrix is None:
            return FeasibilityResult(False, c, T.dim, 0.0, result.status)

        lp_value = float(result.matrix[c.j, c.i])
        if lp_value <= self._feasibility_tol:
            _LOGGER.debug(f"F-set {c} at dim {T.dim}: <e_j*, A e_i> vanishes on the commutant cone -> infeasible")
            return FeasibilityResult(False, c, T.dim, lp_value, result.status)

        # the admissible set is a cone
        witness = TruncatedPositiveOperator(result.matrix, T.space)
        witness = witness.scale(1.0 / operatorNorm(witness).value)

        value = float(witness.entries[c.j, c.i])
        feasible = value >= c.eta - self._feasibility_tol
        _LOGGER.debug(f"F-set {c} at dim {T.dim}: max <e_j*, A e_i> = {value:.6g} -> {'feasible' if feasible else 'infeasible'}")
        return FeasibilityResult(feasible, c, T.dim, value, result.status, witness if feasible else None)


    def aabWitnessSearch(self, T: TruncatedPositiveOperator, y: PositiveVector, K: int = DEFAULT_HORIZON,
                         basis: CommutantBasis | None = None) -> TruncatedPositiveOperator | None:
        """
        Look for a non-zero A >= 0 commuting with T that may be quasinilpotent at y.
        A positive diagonal entry on supp(y) rules quasinilpotence out, so the LP minimizes
        the diagonal mass (supp(y) heavily weighted) over the commutant cone with sum(A) = 1.
        Returning None is not a proof that no such A exists.
        Throws
            DegenerateInputError if y = 0
            SolverError
        """
        if y.isZero(T.space.tol_abs):
            raise DegenerateInputError("Witness search needs y != 0")
        if y.dim != T.dim:
            raise DimensionError(f"Vector of dim {y.dim} does not match operator of dim {T.dim}")

        weights = -np.eye(T.dim)
        for k in y.support(T.space.tol_abs):
            weights[k, k] -= SUPPORT_DIAGONAL_WEIGHT

        result = self.coneMaximize(T, weights, normalization=NORMALIZATION.NONE, total_mass=1.0, basis=basis)
        if result.matrix is None:
            return None

        diagonal = np.diag(result.matrix)[y.support(T.space.tol_abs)]
        if diagonal.size and diagonal.max() > self._feasibility_tol:
            _LOGGER.debug(f"Every normalized commuting A >= 0 has diagonal mass on supp(y) (min {diagonal.max():.3e})")
            return None

        candidate = TruncatedPositiveOperator(result.matrix, T.space)
        if candidate.isZero():
            return None

        estimate = localRadius(candidate, y, K)
        if estimate.verdict == VERDICT.NOT_QUASINILPOTENT:
            _LOGGER.debug(f"Candidate is not quasinilpotent at y (tail minimum {estimate.tail_minimum:.3e})")
            return None

        _LOGGER.info(f"Found commuting A >= 0 with inconclusive local radius at y over K={K}")
        return candidate


    def _addDiagnostics(self, status: SolverStatus):
        with self._diag_lock:
            self._diag_status[status.status] = self._diag_status.get(status.status, 0) + 1
            self._diag_iterations[status.iterations] = self._diag_iterations.get(status.iterations, 0) + 1


    def getDiagnostics(self) -> dict:
        with self._diag_lock:
            return {
                "statistics": {
                    "status": dict(sorted(self._diag_status.items())),
                    "iterations": dict(sorted(self._diag_iterations.items())),
                }
            }


##
## Solver backed by the HiGHS dual simplex in scipy
##
class CommutantSolverHighs(CommutantSolverBase):

    def _solve(self, c, A_ub, b_ub, A_eq, b_eq):
        try:
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(None, None), method='highs')
        except ValueError as e:
            raise SolverError(f"HiGHS rejected the cone program: {e}") from None

        dual = None
        if res.status == 0:
            dual = float(b_ub @ res.ineqlin.marginals)
            if A_eq is not None:
                dual += float(b_eq @ res.eqlin.marginals)

        status = SolverStatus(
            status = int(res.status),
            message = str(res.message),
            iterations = int(getattr(res, 'nit', 0) or 0),
            primal_objective = float(res.fun) if res.status == 0 else None,
            dual_objective = dual,
        )
        return (res.x if res.status == 0 else None), status


_DEFAULT_SOLVER = CommutantSolverHighs()


def coneMaximize(T: TruncatedPositiveOperator, weights: np.ndarray, zero_diagonal: list[int] = (),
                 normalization: NORMALIZATION | None = None, total_mass: float | None = None,
                 basis: CommutantBasis | None = None) -> ConeProgramResult:
    return _DEFAULT_SOLVER.coneMaximize(T, weights, zero_diagonal, normalization, total_mass, basis)


def fSetMembership(T: TruncatedPositiveOperator, c: CommutantConstraint, basis: CommutantBasis | None = None) -> FeasibilityResult:
    return _DEFAULT_SOLVER.fSetMembership(T, c, basis)


def aabWitnessSearch(T: TruncatedPositiveOperator, y: PositiveVector, K: int = DEFAULT_HORIZON) -> TruncatedPositiveOperator | None:
    return _DEFAULT_SOLVER.aabWitnessSearch(T, y, K)
