"""poscone_constructions.py: explicit positive contractions and their verification."""

import asyncio
import logging
import math
import os

from dataclasses import dataclass, field, replace

import numpy as np

from .poscone_commutant import (
    CommutantBasis,
    CommutantConstraint,
    CommutantSolverBase,
    CommutantSolverHighs,
    FeasibilityResult,
    commutantBasis,
)
from .poscone_const import (
    DEFAULT_ETA,
    FEASIBILITY_TOL,
)
from .poscone_core import SpaceConfig, TruncatedPositiveOperator
from .poscone_errors import (
    ConsistencyError,
    ContractionError,
    DimensionError,
    PositivityError,
    RecipeError,
    RelationError,
)
from .poscone_norms import (
    operatorNorm,
    unitFunctionalNorm,
    unitVectorNorm,
    vectorNorm,
)
from .poscone_spectral import perronPair

_LOGGER = logging.getLogger(__name__)


def minimalTruncation(N: int, p: int) -> int:
    """Smallest L holding u, the shifted images and index 2N+1"""
    return 2 * N + p + 3


def defaultTruncation(N: int, p: int) -> int:
    """Three shift iterations of E_N stay inside the truncation"""
    return minimalTruncation(N, p) + 3 * (N + 1)


def scheduleLength(N: int, p: int, L: int) -> int:
    """Number of schedule entries delta_m used at truncation L (m = k - N - p - 1, k + N + 1 < L)"""
    return max(0, L - 2 * N - p - 3)


def _deltaBounds(M: TruncatedPositiveOperator, N: int, p: int, schedule_sum: float, epsilon: float) -> dict[str, float]:
    """Upper bounds on delta keyed by the inequality they come from"""
    norm_m = operatorNorm(M).value
    space = M.space
    span = range(N + p + 2)

    # ||u|| ||e_{N+p+1}*|| + sum_{k <= N+p+1} ||e_k*|| ||e_{k+N+1}||
    u_norm = vectorNorm(np.array([unitVectorNorm(space, k) for k in span]), space.q)
    denominator = u_norm * unitFunctionalNorm(space, N + p + 1) + \
        sum(unitFunctionalNorm(space, k) * unitVectorNorm(space, k + N + 1) for k in span)

    return {
        "delta_contraction": (1.0 - norm_m - schedule_sum) / denominator,
        "delta_epsilon": epsilon,
        "delta_diagonal": float(M.entries[p, p]),
    }


def maxAdmissibleDelta(M: TruncatedPositiveOperator, N: int, p: int, delta_schedule: list[float], epsilon: float, L: int | None = None) -> float:
    """
    Supremum of the admissible delta: minimum of the contraction bound,
    epsilon and <e_p*, M e_p>. Only schedule entries used at truncation L count.
    Throws
        RecipeError if ||M|| >= 1 or the bound is not positive
    """
    norm_m = operatorNorm(M).value
    if norm_m >= 1.0:
        raise RecipeError(f"||M|| = {norm_m:.6g} must be < 1", "M_contraction")

    used = delta_schedule if L is None else delta_schedule[:scheduleLength(N, p, L)]
    bounds = _deltaBounds(M, N, p, float(sum(used)), epsilon)
    name, value = min(bounds.items(), key=lambda kv: kv[1])
    if value <= 0:
        raise RecipeError(f"No admissible delta: bound {name} = {value:.6g}", name)
    return value


##
## Recipe of the banded operator T = M P + delta <e_{N+p+1}*, .> u + S
##
@dataclass(frozen=True)
class ConstructionRecipe:
    M: TruncatedPositiveOperator        # on E_N, strictly positive, ||M|| < 1
    N: int
    p: int
    delta: float
    delta_schedule: tuple[float, ...]   # delta_1, delta_2, ...
    L: int
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, 'delta_schedule', tuple(float(d) for d in self.delta_schedule))
        self.validate()

    def validate(self):
        """
        Throws
            RecipeError naming the violated inequality
        """
        M, N, p = self.M, self.N, self.p
        if N < 0 or M.dim != N + 1:
            raise RecipeError(f"M must act on E_N (dim {N + 1}), got dim {M.dim}", "M_dimension")
        if not 0 <= p <= N:
            raise RecipeError(f"p={p} must satisfy 0 <= p <= N={N}", "p_range")
        if not np.all(M.entries > 0):
            raise RecipeError("All entries of M must be > 0", "M_strictly_positive")

        norm_m = operatorNorm(M).value
        if norm_m >= 1.0:
            raise RecipeError(f"||M|| = {norm_m:.6g} must be < 1", "M_contraction")
        if self.L < minimalTruncation(N, p):
            raise RecipeError(f"L={self.L} must be >= 2N+p+3 = {minimalTruncation(N, p)}", "L_size")

        used = self.delta_schedule[:scheduleLength(N, p, self.L)]
        if len(used) < scheduleLength(N, p, self.L):
            raise RecipeError(f"Schedule has {len(self.delta_schedule)} entries, truncation L={self.L} needs {scheduleLength(N, p, self.L)}", "schedule_length")
        if any(d <= 0 for d in used):
            raise RecipeError("Schedule entries must be > 0", "schedule_positive")
        schedule_sum = float(sum(used))
        if schedule_sum >= 1.0 - norm_m:
            raise RecipeError(f"Schedule sum {schedule_sum:.6g} must be < 1 - ||M|| = {1.0 - norm_m:.6g}", "schedule_sum")

        if not self.delta > 0:
            raise RecipeError(f"delta={self.delta} must be > 0", "delta_positive")
        for name, bound in _deltaBounds(M, N, p, schedule_sum, self.epsilon).items():
            if not self.delta < bound:
                raise RecipeError(f"delta={self.delta:.6g} violates {name} (bound {bound:.6g})", name)

    @staticmethod
    def create(M: TruncatedPositiveOperator, N: int, p: int, epsilon: float, L: int | None = None) -> "ConstructionRecipe":
        """
        Default recipe: geometric schedule delta_m = c 2^-m with c = (1 - ||M||) / 2
        and delta at half its supremum against the full geometric sum c.
        """
        L = L if L is not None else defaultTruncation(N, p)
        norm_m = operatorNorm(M).value
        if norm_m >= 1.0:
            raise RecipeError(f"||M|| = {norm_m:.6g} must be < 1", "M_contraction")

        c = 0.5 * (1.0 - norm_m)
        schedule = [c * 2.0 ** -m for m in range(1, scheduleLength(N, p, L) + 1)]
        bounds = _deltaBounds(M, N, p, c, epsilon)
        delta = 0.5 * min(bounds.values())

        return ConstructionRecipe(M, N, p, delta, tuple(schedule), L, epsilon)

    def withTruncation(self, L: int) -> "ConstructionRecipe":
        """Same recipe at truncation L; the schedule is continued geometrically"""
        schedule = list(self.delta_schedule)
        needed = scheduleLength(self.N, self.p, L)
        next_value = schedule[-1] if schedule else 0.5 * (1.0 - operatorNorm(self.M).value)
        while len(schedule) < needed:
            next_value *= 0.5
            schedule.append(next_value)
        return replace(self, delta_schedule=tuple(schedule), L=L)

    @property
    def pivot(self) -> int:
        """Column N+p+1 carrying delta u"""
        return self.N + self.p + 1

    def bandWeight(self, k: int) -> float:
        """Weight of e_k -> e_{k+N+1}"""
        if k <= self.pivot:
            return self.delta
        return self.delta_schedule[k - self.pivot - 1]

    @staticmethod
    def from_dict(d: dict, space: SpaceConfig | None = None) -> "ConstructionRecipe":
        space = SpaceConfig.from_dict(d.get('space'), space)
        N = int(d['N'])
        p = int(d['p'])
        M = TruncatedPositiveOperator(np.asarray(d['M'], dtype=float), space)
        epsilon = float(d['epsilon'])
        L = int(d['L']) if d.get('L') is not None else None

        if d.get('delta') is None:
            return ConstructionRecipe.create(M, N, p, epsilon, L)

        return ConstructionRecipe(
            M = M,
            N = N,
            p = p,
            delta = float(d['delta']),
            delta_schedule = tuple(d.get('delta_schedule', ())),
            L = L if L is not None else defaultTruncation(N, p),
            epsilon = epsilon,
        )

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "M": self.M.entries.tolist(),
            "delta": self.delta,
            "delta_schedule": list(self.delta_schedule),
            "L": self.L,
            "epsilon": self.epsilon,
            "space": self.M.space.to_dict(),
        }


def buildTheoremOperator(r: ConstructionRecipe) -> TruncatedPositiveOperator:
    """
    L x L matrix of T x = M P x + delta <e_{N+p+1}*, x> u + S x with
    u = e_0 + ... + e_{N+p+1} and S e_k = w_k e_{k+N+1} (k + N + 1 < L),
    w_k = delta for k <= N+p+1 and delta_{k-N-p-1} beyond.
    Throws
        ConsistencyError if the result is not a contraction
    """
    N, L = r.N, r.L
    entries = np.zeros((L, L))
    entries[:N + 1, :N + 1] = r.M.entries
    entries[:r.pivot + 1, r.pivot] += r.delta
    for k in range(L - N - 1):
        entries[k + N + 1, k] += r.bandWeight(k)

    T = TruncatedPositiveOperator(entries, r.M.space)
    norm = operatorNorm(T).value
    if norm >= 1.0 + T.space.tol_rel:
        raise ConsistencyError(f"Built operator has norm {norm:.12g} >= 1 although the recipe validated")

    _LOGGER.info(f"Built operator of dim {L} for N={N}, p={r.p}, delta={r.delta:.6g}: norm {norm:.6g}")
    return T


def approximationError(T: TruncatedPositiveOperator, A: TruncatedPositiveOperator, N: int) -> float:
    """max over k <= N of ||(T - A) e_k||_q and ||(T - A)* e_k*||_q*, A padded to dim T"""
    if A.dim > T.dim:
        raise DimensionError(f"Approximant of dim {A.dim} exceeds operator of dim {T.dim}")
    if N >= A.dim:
        raise DimensionError(f"Index bound N={N} out of range for dim {A.dim}")

    diff = T.entries - A.pad(T.dim).entries
    q = T.space.q
    q_dual = T.space.q_dual
    columns = [vectorNorm(diff[:, k], q) for k in range(N + 1)]
    rows = [vectorNorm(diff[k, :], q_dual) for k in range(N + 1)]
    return max(columns + rows)


def strictlyPositiveApproximant(A: TruncatedPositiveOperator, epsilon: float) -> TruncatedPositiveOperator:
    """
    A + s J / dim with J the all-ones matrix (||J / dim||_q = 1) and
    s = min(epsilon, 1 - ||A||) / 2: strictly positive, norm < 1 and within epsilon of A.
    Throws
        ContractionError if ||A|| >= 1
    """
    norm = operatorNorm(A).value
    if norm >= 1.0:
        raise ContractionError(f"Approximant needs ||A|| < 1, got {norm:.6g}")
    if not epsilon > 0:
        raise PositivityError(f"epsilon must be > 0, got {epsilon}")

    s = 0.5 * min(epsilon, 1.0 - norm)
    return TruncatedPositiveOperator(A.entries + s / A.dim, A.space)


def rankOnePerturbation(T: TruncatedPositiveOperator, source: int, targets: list[int], delta: float) -> TruncatedPositiveOperator:
    """S_delta x = T x + delta <e_source*, x> sum_{j in targets} e_j"""
    if not 0 <= source < T.dim or not targets or not all(0 <= j < T.dim for j in targets):
        raise DimensionError(f"Perturbation indices {source} -> {targets} out of range for dim {T.dim}")
    if not delta > 0:
        raise PositivityError(f"delta must be > 0, got {delta}")

    entries = np.array(T.entries)
    for j in targets:
        entries[j, source] += delta
    return TruncatedPositiveOperator(entries, T.space)


def maxRankOneDelta(T: TruncatedPositiveOperator, targets: list[int]) -> float:
    """(1 - ||T||) / ||sum_{j in targets} e_j||_q"""
    norm = operatorNorm(T).value
    if norm >= 1.0:
        raise ContractionError(f"Rank one perturbation needs ||T|| < 1, got {norm:.6g}")
    q = T.space.q
    return (1.0 - norm) / (1.0 if math.isinf(q) else len(set(targets)) ** (1.0 / q))


def perronCancellationCheck(B: np.ndarray, C: np.ndarray, D: np.ndarray, delta: float, tol: float = 1e-8) -> bool:
    """
    From B C = C B + delta D with C > 0 and D >= 0: the Perron vectors x (right) and
    y (left) of C give y^T D x = 0, and x, y > 0 then force D = 0.
    Returns True iff both |y^T D x| and max|D| are numerically zero.
    Throws
        RelationError if C is not strictly positive, D not positive or the relation fails
    """
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if not (B.shape == C.shape == D.shape and C.ndim == 2 and C.shape[0] == C.shape[1]):
        raise RelationError(f"Shapes {B.shape}, {C.shape}, {D.shape} do not match")
    if not np.all(C > 0):
        raise RelationError("C must be entrywise strictly positive")
    if D.min() < -tol:
        raise RelationError(f"D must be entrywise >= 0, min entry {D.min():.3e}")
    if not delta > 0:
        raise RelationError(f"delta must be > 0, got {delta}")

    scale = max(1.0, float(np.linalg.norm(B) * np.linalg.norm(C)))
    residual = float(np.linalg.norm(B @ C - C @ B - delta * D))
    if residual > tol * scale:
        raise RelationError(f"||BC - CB - delta D||_F = {residual:.3e} exceeds {tol * scale:.3e}")

    pair = perronPair(TruncatedPositiveOperator(C))
    x = pair.right_vector.coords
    y = pair.left_vector.coords

    pairing = abs(float(y @ D @ x))
    pairing_ok = pairing <= tol * max(1.0, float(np.linalg.norm(D)))

    # D >= 0: y^T D x >= min(y) min(x) max|D|
    derived = pairing / (y.min() * x.min())
    max_entry = float(np.abs(D).max())
    collapse_ok = derived <= tol and max_entry <= tol

    _LOGGER.debug(f"Perron cancellation: |y^T D x| = {pairing:.3e}, derived bound {derived:.3e}, max|D| = {max_entry:.3e}")
    return pairing_ok and collapse_ok


##
## Commutant collapse of the built operator
##
@dataclass
class CollapseAssertion:
    name: str
    description: str
    value: float | None       # maximized masked mass
    holds: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description, "value": self.value, "holds": self.holds}


@dataclass
class CollapseReport:
    recipe: ConstructionRecipe
    truncation_dim: int
    commutant_rank: int
    results: list[FeasibilityResult] = field(default_factory=list)
    assertions: list[CollapseAssertion] = field(default_factory=list)

    @property
    def violated(self) -> bool:
        """Any feasible constraint or failing assertion"""
        return any(r.feasible for r in self.results) or not all(a.holds for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "truncation_dim": self.truncation_dim,
            "commutant_rank": self.commutant_rank,
            "violated": self.violated,
            "all_infeasible": not any(r.feasible for r in self.results),
            "recipe": self.recipe.to_dict(),
            "results": [r.to_dict() for r in self.results],
            "assertions": [a.to_dict() for a in self.assertions],
        }


def _collapseMasks(r: ConstructionRecipe) -> list[tuple[str, str, np.ndarray]]:
    """Masks whose mass must vanish on every commuting A >= 0 with a_pp = 0"""
    N, p, L = r.N, r.p, r.L
    masks = []

    mask = np.zeros((L, L))
    mask[p + N + 1, :N + 1] = 1.0
    mask[p + N + 1, p + N + 1] = 1.0
    masks.append(("row_p_N_1", "<e_{p+N+1}*, A e_k> = 0 for k <= N", mask))

    mask = np.zeros((L, L))
    mask[:N + 1, N + 1:2 * N + 2] = 1.0
    masks.append(("shifted_block", "P A e_k = 0 for N+1 <= k <= 2N+1", mask))

    mask = np.zeros((L, L))
    mask[:N + 1, :2 * N + 2] = 1.0
    masks.append(("leading_block", "P A e_k = 0 for k <= 2N+1", mask))

    masks.append(("whole_matrix", "A = 0", np.ones((L, L))))
    return masks


async def verifyTheoremCommutantCollapse(r: ConstructionRecipe, eta: float = DEFAULT_ETA, threads: int | None = None,
                                         solver: CommutantSolverBase | None = None) -> CollapseReport:
    """
    Build T from the recipe and run the F-set programs (i, j, eta, p) for all i != j <= N,
    plus the intermediate vanishing assertions, concurrently.
    A feasible verdict is flagged in the report; it is not raised.
    """
    solver = solver or CommutantSolverHighs()
    T = buildTheoremOperator(r)
    basis: CommutantBasis = await asyncio.to_thread(commutantBasis, T)

    semaphore = asyncio.Semaphore(threads or os.cpu_count() or 1)

    async def runConstraint(c: CommutantConstraint) -> FeasibilityResult:
        async with semaphore:
            return await asyncio.to_thread(solver.fSetMembership, T, c, basis)

    async def runAssertion(name: str, description: str, mask: np.ndarray) -> CollapseAssertion:
        async with semaphore:
            result = await asyncio.to_thread(solver.coneMaximize, T, mask, [r.p], None, None, basis)
        value = result.value if result.value is not None else 0.0
        return CollapseAssertion(name, description, value, value <= FEASIBILITY_TOL)

    constraints = [CommutantConstraint(i, j, eta, r.p) for i in range(r.N + 1) for j in range(r.N + 1) if i != j]
    results = await asyncio.gather(*[runConstraint(c) for c in constraints])
    assertions = await asyncio.gather(*[runAssertion(*m) for m in _collapseMasks(r)])

    report = CollapseReport(r, T.dim, basis.rank, list(results), list(assertions))
    if report.violated:
        _LOGGER.warning(f"Commutant collapse NOT observed at truncation {T.dim}; flagged for manual review")
    else:
        _LOGGER.info(f"Commutant collapse verified at truncation {T.dim} (rank {basis.rank}, {len(results)} constraints)")
    return report


async def verifyCollapseAcrossTruncations(r: ConstructionRecipe, steps: int = 3, eta: float = DEFAULT_ETA,
                                          threads: int | None = None) -> list[CollapseReport]:
    """Collapse verification at L, L + (N+1), ..., L + (steps-1)(N+1)"""
    reports = []
    for s in range(steps):
        recipe = r.withTruncation(r.L + s * (r.N + 1))
        reports.append(await verifyTheoremCommutantCollapse(recipe, eta, threads))
    return reports
