"""poscone_core.py: domain types and algebra of truncated positive operators."""

import logging
import math

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import coo_matrix

from .poscone_const import (
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    DEFAULT_MAX_ITER,
    DEFAULT_SEED,
    dualExponent,
)
from .poscone_errors import (
    ConfigError,
    DimensionError,
    PositivityError,
)

_LOGGER = logging.getLogger(__name__)


def clampNonNegative(values: np.ndarray, tol_abs: float, what: str = "entries") -> np.ndarray:
    """
    Return a copy of values with round-off negatives in (-tol_abs, 0) set to 0.
    Throws
        PositivityError if any value is below -tol_abs
    """
    arr = np.array(values, dtype=float)
    if arr.size and arr.min() < -tol_abs:
        idx = np.unravel_index(np.argmin(arr), arr.shape)
        raise PositivityError(f"Negative {what} {arr[idx]:.3e} at {tuple(int(i) for i in idx)} (tol_abs={tol_abs:.1e})")

    arr[arr < 0] = 0.0
    return arr


##
## Space configuration
##
@dataclass(frozen=True)
class SpaceConfig:
    q: float = 2.0
    tol_abs: float = DEFAULT_TOL_ABS
    tol_rel: float = DEFAULT_TOL_REL
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = DEFAULT_SEED    # randomized restarts of iterative solvers

    def __post_init__(self):
        # q = inf is only reached as the dual exponent of q = 1
        if not (self.q >= 1):
            raise ConfigError(f"Exponent q must be >= 1, got {self.q}")
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise ConfigError(f"Tolerances must be positive, got tol_abs={self.tol_abs}, tol_rel={self.tol_rel}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")

    @property
    def q_dual(self) -> float:
        return dualExponent(self.q)

    @property
    def is_sup_norm(self) -> bool:
        """True for the dual of l_1"""
        return math.isinf(self.q)

    def dual(self) -> "SpaceConfig":
        return replace(self, q=self.q_dual)

    def withQ(self, q: float) -> "SpaceConfig":
        return replace(self, q=q)

    @staticmethod
    def from_dict(d: dict | None, default: "SpaceConfig | None" = None) -> "SpaceConfig":
        base = default or SpaceConfig()
        if not d:
            return base

        q = d.get('q', base.q)
        return SpaceConfig(
            q = math.inf if q in ("inf", "Infinity") else float(q),
            tol_abs = float(d.get('tol_abs', base.tol_abs)),
            tol_rel = float(d.get('tol_rel', base.tol_rel)),
            max_iter = int(d.get('max_iter', base.max_iter)),
            seed = int(d.get('seed', base.seed)),
        )

    def to_dict(self) -> dict:
        return {
            "q": "inf" if self.is_sup_norm else self.q,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "max_iter": self.max_iter,
            "seed": self.seed,
        }


##
## Vectors
##
@dataclass(frozen=True, eq=False)
class GeneralVector:
    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DimensionError("Vector must have at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Vector coordinates must be finite")

        arr.flags.writeable = False
        object.__setattr__(self, 'coords', arr)

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    def pair(self, other: "GeneralVector") -> float:
        """Duality pairing <self, other>"""
        if other.dim != self.dim:
            raise DimensionError(f"Cannot pair vectors of dim {self.dim} and {other.dim}")
        return float(self.coords @ other.coords)

    def isZero(self, tol_abs: float = DEFAULT_TOL_ABS) -> bool:
        return bool(np.all(np.abs(self.coords) <= tol_abs))

    def support(self, tol_abs: float = DEFAULT_TOL_ABS) -> list[int]:
        return [int(k) for k in np.flatnonzero(np.abs(self.coords) > tol_abs)]

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneralVector) and np.array_equal(self.coords, other.coords)

    def __str__(self) -> str:
        return f"{type(self).__name__}({np.array2string(self.coords, precision=4)})"

    @classmethod
    def basis(cls, dim: int, k: int):
        """The basis vector e_k (or functional e_k*) of E_{dim-1}"""
        if not 0 <= k < dim:
            raise DimensionError(f"Basis index {k} out of range for dim {dim}")
        coords = np.zeros(dim)
        coords[k] = 1.0
        return cls(coords)

    @classmethod
    def ones(cls, dim: int):
        return cls(np.ones(dim))


@dataclass(frozen=True, eq=False)
class PositiveVector(GeneralVector):
    """Element of the positive cone C+"""

    def __post_init__(self):
        super().__post_init__()
        arr = clampNonNegative(self.coords, DEFAULT_TOL_ABS, "coordinate")
        arr.flags.writeable = False
        object.__setattr__(self, 'coords', arr)


##
## Truncated positive operator P_n T P_n on span(e_0..e_n)
##
@dataclass(frozen=True, eq=False)
class TruncatedPositiveOperator:
    entries: np.ndarray                  # entries[k, l] = <e_k*, T e_l>
    space: SpaceConfig = field(default_factory=SpaceConfig)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionError(f"Operator needs a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Operator entries must be finite")

        arr = clampNonNegative(arr, self.space.tol_abs)
        arr.flags.writeable = False
        object.__setattr__(self, 'entries', arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def q(self) -> float:
        return self.space.q

    @staticmethod
    def identity(dim: int, space: SpaceConfig | None = None) -> "TruncatedPositiveOperator":
        return TruncatedPositiveOperator(np.eye(dim), space or SpaceConfig())

    @staticmethod
    def zeros(dim: int, space: SpaceConfig | None = None) -> "TruncatedPositiveOperator":
        return TruncatedPositiveOperator(np.zeros((dim, dim)), space or SpaceConfig())

    @staticmethod
    def fromCoo(dim: int, triplets: list, space: SpaceConfig | None = None) -> "TruncatedPositiveOperator":
        """Build from (i, j, v) triplets; duplicates are summed"""
        if triplets:
            rows, cols, vals = zip(*triplets)
        else:
            rows, cols, vals = (), (), ()
        rows = np.asarray(rows, dtype=int)
        cols = np.asarray(cols, dtype=int)
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= dim or cols.max() >= dim):
            raise DimensionError(f"Triplet index out of range for dim {dim}")

        matrix = coo_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=(dim, dim))
        return TruncatedPositiveOperator(matrix.toarray(), space or SpaceConfig())

    def toCoo(self) -> list[tuple[int, int, float]]:
        matrix = coo_matrix(self.entries)
        return [(int(i), int(j), float(v)) for i, j, v in zip(matrix.row, matrix.col, matrix.data)]

    def withSpace(self, space: SpaceConfig) -> "TruncatedPositiveOperator":
        return TruncatedPositiveOperator(self.entries, space)

    def isZero(self) -> bool:
        return bool(np.all(self.entries <= self.space.tol_abs))

    def column(self, l: int) -> PositiveVector:
        return PositiveVector(self.entries[:, l])

    def row(self, k: int) -> PositiveVector:
        return PositiveVector(self.entries[k, :])

    def apply(self, x: GeneralVector) -> GeneralVector:
        """
        Matrix-vector product T x.
        A PositiveVector is mapped to a PositiveVector.
        Throws
            DimensionError
        """
        if x.dim != self.dim:
            raise DimensionError(f"Cannot apply operator of dim {self.dim} to vector of dim {x.dim}")

        result = self.entries @ x.coords
        if isinstance(x, PositiveVector):
            return PositiveVector(result)
        return GeneralVector(result)

    def adjoint(self) -> "TruncatedPositiveOperator":
        """
        Transpose, acting on the dual space l_{q*}.
        For q = 1 the result lives on the sup-norm space (q* = inf).
        """
        if self.space.q == 1:
            _LOGGER.debug("Adjoint of an l_1 operator acts on the sup-norm space")
        return TruncatedPositiveOperator(self.entries.T, self.space.dual())

    def compress(self, m: int) -> "TruncatedPositiveOperator":
        """P_m T P_m as the leading m x m principal block"""
        if not 1 <= m <= self.dim:
            raise DimensionError(f"Cannot compress operator of dim {self.dim} to {m}")
        return TruncatedPositiveOperator(self.entries[:m, :m], self.space)

    def extendWithScalarTail(self, target_dim: int, lam: float) -> "TruncatedPositiveOperator":
        """
        Block extension diag(T, lam * I) of size target_dim.
        Throws
            DimensionError if target_dim < dim
            PositivityError if lam < 0
        """
        if target_dim < self.dim:
            raise DimensionError(f"Cannot extend operator of dim {self.dim} to smaller dim {target_dim}")
        if lam < 0:
            raise PositivityError(f"Scalar tail lambda={lam} must be >= 0 to keep the operator positive")

        entries = np.zeros((target_dim, target_dim))
        entries[:self.dim, :self.dim] = self.entries
        tail = np.arange(self.dim, target_dim)
        entries[tail, tail] = lam
        return TruncatedPositiveOperator(entries, self.space)

    def pad(self, target_dim: int) -> "TruncatedPositiveOperator":
        """Embedding of E_n into E_{target_dim-1}"""
        return self.extendWithScalarTail(target_dim, 0.0)

    def _checkSame(self, other: "TruncatedPositiveOperator"):
        if other.dim != self.dim:
            raise DimensionError(f"Operators of dim {self.dim} and {other.dim} do not match")

    def compose(self, other: "TruncatedPositiveOperator") -> "TruncatedPositiveOperator":
        """self o other"""
        self._checkSame(other)
        return TruncatedPositiveOperator(self.entries @ other.entries, self.space)

    def add(self, other: "TruncatedPositiveOperator") -> "TruncatedPositiveOperator":
        self._checkSame(other)
        return TruncatedPositiveOperator(self.entries + other.entries, self.space)

    def scale(self, c: float) -> "TruncatedPositiveOperator":
        if c < 0:
            raise PositivityError(f"Scaling by {c} < 0 leaves the positive cone")
        return TruncatedPositiveOperator(c * self.entries, self.space)

    def power(self, n: int) -> "TruncatedPositiveOperator":
        if n < 0:
            raise DimensionError(f"Negative power {n}")
        return TruncatedPositiveOperator(np.linalg.matrix_power(self.entries, n), self.space)

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedPositiveOperator) and \
            self.space == other.space and \
            np.array_equal(self.entries, other.entries)

    def __str__(self) -> str:
        return f"TruncatedPositiveOperator(dim={self.dim}, q={self.space.q})"
