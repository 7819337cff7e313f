"""poscone_sampler.py: random ensembles of positive contractions and empirical property frequencies."""

import asyncio
import logging
import math
import os

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .poscone_const import (
    ENSEMBLE_KIND,
    NORM_ONE_TOL,
    ORBIT_DECAY_LEVEL,
    ORBIT_DECAY_STARTS,
    ORBIT_DECAY_STEPS,
    WILSON_Z,
)
from .poscone_core import (
    GeneralVector,
    SpaceConfig,
    TruncatedPositiveOperator,
)
from .poscone_errors import ConfigError
from .poscone_ideals import hasDisjointColumnSupports, rtCriterion
from .poscone_norms import operatorNorm, vectorNorm
from .poscone_spectral import orbitNormDecay

_LOGGER = logging.getLogger(__name__)

DISCLAIMER = (
    "Frequencies over a chosen probability ensemble at finite truncation. "
    "Typicality of operator properties is a Baire category notion with no canonical measure; "
    "these numbers are exploratory and carry no theorem-level meaning."
)

PROPERTIES = (
    "norm_eq_one",
    "irreducible",
    "diagonal_all_positive",
    "disjoint_column_supports",
    "orbit_decay_observed",
)


@dataclass(frozen=True)
class EnsembleSpec:
    dim: int
    q: float
    kind: ENSEMBLE_KIND
    count: int
    seed: int
    density: float = 0.2        # sparse_band
    bandwidth: int = 1          # sparse_band
    damping: float = 0.9        # column_stochastic_damped

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError(f"Ensemble dim must be >= 1, got {self.dim}")
        if self.count < 1:
            raise ConfigError(f"Ensemble count must be >= 1, got {self.count}")
        if not 0 < self.density <= 1:
            raise ConfigError(f"Density must be in (0, 1], got {self.density}")
        if self.bandwidth < 0:
            raise ConfigError(f"Bandwidth must be >= 0, got {self.bandwidth}")
        if not 0 < self.damping <= 1:
            raise ConfigError(f"Damping must be in (0, 1], got {self.damping}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def space(self) -> SpaceConfig:
        return SpaceConfig(q=self.q, seed=self.seed)

    @staticmethod
    def from_dict(d: dict) -> "EnsembleSpec":
        q = d.get('q', 2.0)
        return EnsembleSpec(
            dim = int(d['dim']),
            q = math.inf if q in ("inf", "Infinity") else float(q),
            kind = ENSEMBLE_KIND.from_str(d.get('kind', 'iid_uniform_rescaled')),
            count = int(d.get('count', 100)),
            seed = int(d['seed']),
            density = float(d.get('density', 0.2)),
            bandwidth = int(d.get('bandwidth', 1)),
            damping = float(d.get('damping', 0.9)),
        )

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "q": "inf" if math.isinf(self.q) else self.q,
            "kind": str(self.kind),
            "count": self.count,
            "seed": self.seed,
            "density": self.density,
            "bandwidth": self.bandwidth,
            "damping": self.damping,
        }


def childGenerator(seed: int, *key: int) -> np.random.Generator:
    """Counter based generator for trial key; independent of evaluation order"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))))


def _rescaleToBall(entries: np.ndarray, space: SpaceConfig, always: bool) -> TruncatedPositiveOperator:
    T = TruncatedPositiveOperator(entries, space)
    norm = operatorNorm(T).value
    if norm > 0 and (always or norm > 1.0):
        T = T.scale(1.0 / norm)
    return T


def sampleOne(spec: EnsembleSpec, t: int) -> TruncatedPositiveOperator:
    """Trial t of the ensemble"""
    rng = childGenerator(spec.seed, t)
    n = spec.dim
    space = spec.space

    match spec.kind:
        case ENSEMBLE_KIND.IID_UNIFORM_RESCALED:
            return _rescaleToBall(rng.uniform(0.01, 1.0, (n, n)), space, always=True)

        case ENSEMBLE_KIND.COLUMN_STOCHASTIC_DAMPED:
            entries = rng.uniform(0.01, 1.0, (n, n))
            entries = spec.damping * entries / entries.sum(axis=0, keepdims=True)
            return _rescaleToBall(entries, space, always=False)

        case ENSEMBLE_KIND.SPARSE_BAND:
            k, l = np.indices((n, n))
            in_band = np.abs(k - l) <= spec.bandwidth
            keep = in_band & (rng.random((n, n)) < spec.density)
            entries = np.where(keep, rng.uniform(0.01, 1.0, (n, n)), 0.0)
            return _rescaleToBall(entries, space, always=False)

        case ENSEMBLE_KIND.PERMUTATION:
            entries = np.zeros((n, n))
            entries[rng.permutation(n), np.arange(n)] = 1.0
            return TruncatedPositiveOperator(entries, space)

    raise ConfigError(f"Unknown ensemble kind '{spec.kind}'")


def sample(spec: EnsembleSpec) -> Iterator[TruncatedPositiveOperator]:
    """Deterministic stream of spec.count operators"""
    for t in range(spec.count):
        yield sampleOne(spec, t)


def orbitDecayObserved(T: TruncatedPositiveOperator, rng: np.random.Generator,
                       starts: int = ORBIT_DECAY_STARTS, steps: int = ORBIT_DECAY_STEPS, level: float = ORBIT_DECAY_LEVEL) -> bool:
    """||T^n x|| drops below level within steps for every random positive unit start"""
    for _ in range(starts):
        x = rng.uniform(0.01, 1.0, T.dim)
        x = GeneralVector(x / vectorNorm(x, T.space.q))
        if min(orbitNormDecay(T, x, steps)) >= level:
            return False
    return True


def trialProperties(spec: EnsembleSpec, t: int) -> dict[str, bool]:
    T = sampleOne(spec, t)
    return {
        "norm_eq_one": abs(operatorNorm(T).value - 1.0) < NORM_ONE_TOL,
        "irreducible": rtCriterion(T).irreducible,
        "diagonal_all_positive": bool(np.all(np.diag(T.entries) > T.space.tol_abs)),
        "disjoint_column_supports": hasDisjointColumnSupports(T),
        "orbit_decay_observed": orbitDecayObserved(T, childGenerator(spec.seed, t, 1)),
    }


def wilsonRadius(successes: int, trials: int, z: float = WILSON_Z) -> float:
    """Half width of the Wilson score interval"""
    p = successes / trials
    denominator = 1.0 + z * z / trials
    return z / denominator * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))


@dataclass
class TypicalityReport:
    spec: EnsembleSpec
    trials: int
    counts: dict[str, int] = field(default_factory=dict)
    disclaimer: str = DISCLAIMER

    def frequency(self, prop: str) -> float:
        return self.counts[prop] / self.trials

    def radius(self, prop: str) -> float:
        return wilsonRadius(self.counts[prop], self.trials)

    def rows(self) -> list[dict]:
        return [
            {
                "property": prop,
                "count": self.counts[prop],
                "trials": self.trials,
                "frequency": self.frequency(prop),
                "radius": self.radius(prop),
            }
            for prop in PROPERTIES
        ]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "trials": self.trials,
            "properties": self.rows(),
            "disclaimer": self.disclaimer,
        }


async def typicalityReport(spec: EnsembleSpec, threads: int | None = None) -> TypicalityReport:
    """
    Run the property checks of every trial, at most `threads` at a time.
    Counts are summed, so the report does not depend on completion order.
    """
    semaphore = asyncio.Semaphore(threads or os.cpu_count() or 1)

    async def runTrial(t: int) -> dict[str, bool]:
        async with semaphore:
            return await asyncio.to_thread(trialProperties, spec, t)

    _LOGGER.info(f"Sampling {spec.count} trials of {spec.kind} at dim {spec.dim}, q={spec.q}")
    outcomes = await asyncio.gather(*[runTrial(t) for t in range(spec.count)])

    counts = Counter({prop: 0 for prop in PROPERTIES})
    for outcome in outcomes:
        counts.update(prop for prop, hit in outcome.items() if hit)

    report = TypicalityReport(spec, spec.count, {prop: counts[prop] for prop in PROPERTIES})
    _LOGGER.info("Typicality report: " + ", ".join(f"{r['property']}={r['frequency']:.3f}" for r in report.rows()))
    return report
