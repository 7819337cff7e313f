#! /usr/bin/env python3

##
# Definition of all enums / constants used by the poscone laboratory
##

import math
from enum import IntEnum, StrEnum


### tolerances and iteration caps
DEFAULT_TOL_ABS = 1e-10
DEFAULT_TOL_REL = 1e-8
DEFAULT_MAX_ITER = 5000
DEFAULT_SEED = 20240601

### norms
DEFAULT_RESTARTS = 8            # power method starts (all-ones + 7 random positive)
DEFAULT_GRID_RESOLUTION = 10_000
MAX_GRID_DIM = 6                # absolutely-exposing heuristic refuses above this
GRID_NEAR_TOL = 1e-4            # relative slack for "near norming" grid points
GRID_CLUSTER_RADIUS = 0.1       # l_q distance within which near norming points must cluster

### spectral
MAX_SPECTRUM_DIM = 512
DEFAULT_HORIZON = 60

### commutant
MAX_COMMUTANT_DIM = 64
FEASIBILITY_TOL = 1e-7
DEFAULT_ETA = 1e-3

### sampler
WILSON_Z = 1.959963984540054    # two sided 95%
NORM_ONE_TOL = 1e-3
ORBIT_DECAY_LEVEL = 1e-6
ORBIT_DECAY_STEPS = 200
ORBIT_DECAY_STARTS = 5

### environment
ENV_SEED = "POSCONE_SEED"


def dualExponent(q: float) -> float:
    """Exponent q* with 1/q + 1/q* = 1 (q=1 -> inf, q=inf -> 1)"""
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


class NORM_METHOD(StrEnum):
    EXACT_L1   = "exact_l1"
    EXACT_L2   = "exact_l2"
    EXACT_LINF = "exact_linf"     # sup-norm, reached through the adjoint of q=1
    POWER      = "power_method"

    @staticmethod
    def from_str(s: str, default: str|None = None):
        match s.lower():
            case 'exact_l1' | 'l1': return NORM_METHOD.EXACT_L1
            case 'exact_l2' | 'l2': return NORM_METHOD.EXACT_L2
            case 'exact_linf' | 'linf' | 'sup-norm': return NORM_METHOD.EXACT_LINF
            case 'power_method' | 'power': return NORM_METHOD.POWER
            case _:
                if default is not None:
                    return default
                else:
                    raise Exception(f"Unknown norm method: '{s}'")

    def __str__(self):
        return self.value


class VERDICT(StrEnum):
    NOT_QUASINILPOTENT = "not_quasinilpotent"
    INCONCLUSIVE       = "inconclusive"

    def __str__(self):
        return self.value


class ENSEMBLE_KIND(StrEnum):
    IID_UNIFORM_RESCALED     = "iid_uniform_rescaled"
    COLUMN_STOCHASTIC_DAMPED = "column_stochastic_damped"
    SPARSE_BAND              = "sparse_band"
    PERMUTATION              = "permutation"

    @staticmethod
    def from_str(s: str, default: str|None = None):
        match s.lower().replace('-', '_'):
            case 'iid_uniform_rescaled' | 'iid': return ENSEMBLE_KIND.IID_UNIFORM_RESCALED
            case 'column_stochastic_damped' | 'stochastic': return ENSEMBLE_KIND.COLUMN_STOCHASTIC_DAMPED
            case 'sparse_band' | 'band': return ENSEMBLE_KIND.SPARSE_BAND
            case 'permutation': return ENSEMBLE_KIND.PERMUTATION
            case _:
                if default is not None:
                    return default
                else:
                    raise Exception(f"Unknown ensemble kind: '{s}'")

    def __str__(self):
        return self.value


class MATRIX_FORMAT(StrEnum):
    DENSE = "dense"
    COO   = "coo"

    @staticmethod
    def from_str(s: str, default: str|None = None):
        match s.lower():
            case 'dense': return MATRIX_FORMAT.DENSE
            case 'coo' | 'sparse': return MATRIX_FORMAT.COO
            case _:
                if default is not None:
                    return default
                else:
                    raise Exception(f"Unknown matrix format: '{s}'")

    def __str__(self):
        return self.value


class SUBCOMMAND(StrEnum):
    NORM           = "norm"
    IDEAL_CHECK    = "ideal-check"
    SPECTRAL       = "spectral"
    COMMUTANT      = "commutant"
    F_SET          = "f-set"
    CONSTRUCT      = "construct"
    VERIFY_THEOREM = "verify-theorem"
    SAMPLE         = "sample"

    def __str__(self):
        return self.value


class EXIT_CODE(IntEnum):
    OK                = 0
    DOMAIN_ERROR      = 1
    IO_ERROR          = 2
    THEOREM_VIOLATION = 3

    def __str__(self):
        return self.name


class NORMALIZATION(StrEnum):
    """Polyhedral bound standing in for ||A|| <= 1 in the commutant cone programs"""
    COLUMN_SUMS = "column_sums"    # exactly ||A||_1 <= 1
    ROW_SUMS    = "row_sums"       # exactly ||A||_inf <= 1
    BOTH        = "both"           # implies ||A||_q <= 1 for every q
    NONE        = "none"

    @staticmethod
    def forExponent(q: float):
        if q == 1:
            return NORMALIZATION.COLUMN_SUMS
        if math.isinf(q):
            return NORMALIZATION.ROW_SUMS
        return NORMALIZATION.BOTH

    def __str__(self):
        return self.value
