"""poscone_cli.py: command line front end."""

import argparse
import asyncio
import logging
import math
import os
import sys

import numpy as np

from .poscone_commutant import (
    CommutantConstraint,
    aabWitnessSearch,
    commutantBasis,
    fSetMembership,
)
from .poscone_const import (
    DEFAULT_ETA,
    DEFAULT_HORIZON,
    DEFAULT_SEED,
    ENV_SEED,
    ENSEMBLE_KIND,
    EXIT_CODE,
    MATRIX_FORMAT,
    MAX_GRID_DIM,
    MAX_SPECTRUM_DIM,
    NORM_METHOD,
    SUBCOMMAND,
)
from .poscone_constructions import (
    approximationError,
    buildTheoremOperator,
    maxRankOneDelta,
    rankOnePerturbation,
    verifyCollapseAcrossTruncations,
)
from .poscone_core import (
    SpaceConfig,
    TruncatedPositiveOperator,
)
from .poscone_errors import (
    ConfigError,
    DimensionError,
    InterchangeException,
    IterationLimitError,
    PosconeException,
)
from .poscone_ideals import rtCriterion, supportDigraph
from .poscone_io import (
    complexToList,
    digraphToDot,
    dumpJson,
    ensembleSpecFromDict,
    operatorToDict,
    readJson,
    readOperator,
    readRecipe,
    rowsToCsv,
    sequenceToCsv,
    vectorFromList,
    writeBytes,
    writeJson,
)
from .poscone_norms import (
    isAbsolutelyExposing,
    operatorNorm,
)
from .poscone_sampler import typicalityReport
from .poscone_spectral import (
    finiteSpectrum,
    localRadius,
    orbitNormDecay,
    perronPair,
)

_LOGGER = logging.getLogger(__name__)


def resolveSeed(flag: int | None, file_seed: int | None = None) -> int:
    """Precedence: command line flag > POSCONE_SEED > file > default"""
    if flag is not None:
        return flag
    env = os.environ.get(ENV_SEED)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{ENV_SEED}='{env}' is not an integer") from None
    if file_seed is not None:
        return file_seed
    return DEFAULT_SEED


def _parseQ(s: str) -> float:
    if s.lower() in ("inf", "infinity"):
        return math.inf
    return float(s)


def _enumArg(from_str):
    def convert(s: str):
        try:
            return from_str(s)
        except Exception as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    return convert


def _parseFloats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _parseInts(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def buildParser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result here instead of standard output")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging on standard error")
    common.add_argument("--seed", type=int, help=f"seed of randomized steps (overrides {ENV_SEED})")
    common.add_argument("--q", type=_parseQ, help="exponent of l_q (overrides the file)")

    operator = argparse.ArgumentParser(add_help=False)
    operator.add_argument("--in", dest="input", required=True, help="operator JSON (dense or coo)")

    parser = argparse.ArgumentParser(prog="poscone", description="Numerical lab for positive operators on finite sections of l_q")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(str(SUBCOMMAND.NORM), parents=[common, operator], help="operator norm with norming vector")
    p.add_argument("--method", type=_enumArg(NORM_METHOD.from_str), help="force a norm method (e.g. power)")
    p.add_argument("--absolutely-exposing", action="store_true", help=f"run the grid heuristic (dim <= {MAX_GRID_DIM})")

    p = sub.add_parser(str(SUBCOMMAND.IDEAL_CHECK), parents=[common, operator], help="closed invariant ideal criterion")
    p.add_argument("--dot", help="write the support digraph in Graphviz format")

    p = sub.add_parser(str(SUBCOMMAND.SPECTRAL), parents=[common, operator], help="Perron pair, spectrum and local radius")
    p.add_argument("--vector", type=_parseFloats, help="comma separated y >= 0 for the local radius")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--shift", type=float, default=0.0, help="Perron iteration on T + shift I")
    p.add_argument("--csv", help="write the local radius sequence as CSV")

    p = sub.add_parser(str(SUBCOMMAND.COMMUTANT), parents=[common, operator], help="commutant basis")
    p.add_argument("--vector", type=_parseFloats, help="also search a commuting A >= 0 possibly quasinilpotent at y")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)

    p = sub.add_parser(str(SUBCOMMAND.F_SET), parents=[common, operator], help="membership in F_{i,j,eta,p}")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--p", type=int, required=True)

    p = sub.add_parser(str(SUBCOMMAND.CONSTRUCT), parents=[common], help="build an explicit operator")
    p.add_argument("kind", choices=["theorem", "rank-one", "extend"])
    p.add_argument("--recipe", help="recipe JSON (theorem)")
    p.add_argument("--in", dest="input", help="operator JSON (rank-one, extend)")
    p.add_argument("--source", type=int, help="rank-one source index i")
    p.add_argument("--targets", type=_parseInts, help="rank-one target indices, comma separated")
    p.add_argument("--delta", type=float, help="rank-one size (default: half the admissible bound)")
    p.add_argument("--dim", type=int, help="extend to this dimension")
    p.add_argument("--lam", type=float, default=0.0, help="extend with scalar tail lam")
    p.add_argument("--format", type=_enumArg(MATRIX_FORMAT.from_str), default=MATRIX_FORMAT.DENSE)

    p = sub.add_parser(str(SUBCOMMAND.VERIFY_THEOREM), parents=[common], help="commutant collapse of the theorem operator")
    p.add_argument("--recipe", required=True)
    p.add_argument("--steps", type=int, default=3, help="number of truncation sizes L, L+N+1, ...")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--threads", type=int)

    p = sub.add_parser(str(SUBCOMMAND.SAMPLE), parents=[common], help="empirical property frequencies of an ensemble")
    p.add_argument("--spec", help="ensemble spec JSON; flags override")
    p.add_argument("--dim", type=int)
    p.add_argument("--kind", type=_enumArg(ENSEMBLE_KIND.from_str))
    p.add_argument("--count", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--bandwidth", type=int)
    p.add_argument("--damping", type=float)
    p.add_argument("--threads", type=int)
    p.add_argument("--csv", help="write one CSV row per property")

    return parser


async def _emit(args, obj):
    if args.out:
        await writeJson(args.out, obj)
    else:
        sys.stdout.buffer.write(dumpJson(obj))
        sys.stdout.flush()


async def _operator(args) -> TruncatedPositiveOperator:
    T = await readOperator(args.input)
    space = T.space
    if args.q is not None:
        space = space.withQ(args.q)
    seed = resolveSeed(args.seed, space.seed)
    return T.withSpace(SpaceConfig(space.q, space.tol_abs, space.tol_rel, space.max_iter, seed))


async def _runNorm(args) -> int:
    T = await _operator(args)
    cert = operatorNorm(T, args.method)
    result = {"truncation_dim": T.dim, "q": T.space.to_dict()["q"], **cert.to_dict()}
    result["is_contraction"] = cert.value <= 1.0 + T.space.tol_rel
    if args.absolutely_exposing:
        result["absolutely_exposing"] = isAbsolutelyExposing(T)

    _LOGGER.info(f"||T||_q = {cert.value:.12g} ({cert.method}, residual {cert.residual:.2e})")
    await _emit(args, result)
    return EXIT_CODE.OK


async def _runIdealCheck(args) -> int:
    T = await _operator(args)
    report = rtCriterion(T)
    if args.dot:
        await writeBytes(args.dot, digraphToDot(supportDigraph(T), report.invariant_ideal_support).encode())

    if report.irreducible:
        _LOGGER.info(f"No invariant ideal at truncation dim {T.dim}")
    else:
        _LOGGER.info(f"Invariant ideal on {report.invariant_ideal_support} at truncation dim {T.dim}, failing pair {report.failing_pair}")
    await _emit(args, report.to_dict())
    return EXIT_CODE.OK


async def _runSpectral(args) -> int:
    T = await _operator(args)
    result = {"truncation_dim": T.dim}

    shifted = T if args.shift == 0 else TruncatedPositiveOperator(T.entries + args.shift * np.eye(T.dim), T.space)
    try:
        pair = perronPair(shifted)
        result["perron"] = pair.to_dict()
        _LOGGER.info(f"Perron value {pair.value:.12g}")
    except IterationLimitError as e:
        _LOGGER.warning(f"{e}")
        result["perron"] = None
        result["perron_error"] = str(e)

    if T.dim <= MAX_SPECTRUM_DIM:
        result["spectrum"] = complexToList(finiteSpectrum(T))

    if args.vector is not None:
        y = vectorFromList(args.vector, T.dim)
        estimate = localRadius(T, y, args.horizon)
        result["local_radius"] = estimate.to_dict()
        result["orbit_norms"] = orbitNormDecay(T, y, args.horizon)
        _LOGGER.info(f"Local radius verdict at y: {estimate.verdict}")
        if args.csv:
            await writeBytes(args.csv, sequenceToCsv("local_radius", estimate.values).encode())

    await _emit(args, result)
    return EXIT_CODE.OK


async def _runCommutant(args) -> int:
    T = await _operator(args)
    basis = await asyncio.to_thread(commutantBasis, T)
    result = {"truncation_dim": T.dim, **basis.to_dict()}
    _LOGGER.info(f"Commutant rank {basis.rank} at truncation dim {T.dim}")

    if args.vector is not None:
        A = await asyncio.to_thread(aabWitnessSearch, T, vectorFromList(args.vector, T.dim), args.horizon)
        result["witness"] = operatorToDict(A) if A is not None else None
        _LOGGER.info("Witness found" if A is not None else "No witness found (not a proof of absence)")

    await _emit(args, result)
    return EXIT_CODE.OK


async def _runFSet(args) -> int:
    T = await _operator(args)
    result = await asyncio.to_thread(fSetMembership, T, CommutantConstraint(args.i, args.j, args.eta, args.p))
    _LOGGER.info(f"F-set ({args.i}, {args.j}, {args.eta}, {args.p}) at dim {T.dim}: {'feasible' if result.feasible else 'infeasible'}")
    await _emit(args, result.to_dict())
    return EXIT_CODE.OK


async def _runConstruct(args) -> int:
    match args.kind:
        case "theorem":
            if not args.recipe:
                raise ConfigError("construct theorem needs --recipe")
            recipe = await readRecipe(args.recipe)
            T = buildTheoremOperator(recipe)
            result = {
                "recipe": recipe.to_dict(),
                "operator": operatorToDict(T, args.format),
                "norm": operatorNorm(T).value,
                "approximation_error": approximationError(T, recipe.M, recipe.N),
            }

        case "rank-one":
            if not args.input or args.source is None or not args.targets:
                raise ConfigError("construct rank-one needs --in, --source and --targets")
            T = await _operator(args)
            delta = args.delta if args.delta is not None else 0.5 * maxRankOneDelta(T, args.targets)
            S = rankOnePerturbation(T, args.source, args.targets, delta)
            result = {"delta": delta, "operator": operatorToDict(S, args.format), "norm": operatorNorm(S).value}

        case "extend":
            if not args.input or args.dim is None:
                raise ConfigError("construct extend needs --in and --dim")
            T = await _operator(args)
            E = T.extendWithScalarTail(args.dim, args.lam)
            result = {"operator": operatorToDict(E, args.format), "norm": operatorNorm(E).value}

        case _:
            raise DimensionError(f"Unknown construction '{args.kind}'")

    _LOGGER.info(f"Constructed {args.kind} operator")
    await _emit(args, result)
    return EXIT_CODE.OK


async def _runVerifyTheorem(args) -> int:
    recipe = await readRecipe(args.recipe)
    reports = await verifyCollapseAcrossTruncations(recipe, args.steps, args.eta, args.threads)
    violated = any(r.violated for r in reports)

    await _emit(args, {"violated": violated, "reports": [r.to_dict() for r in reports]})
    if violated:
        _LOGGER.error(f"Theorem violation: commutant collapse not observed at {[r.truncation_dim for r in reports if r.violated]}")
        return EXIT_CODE.THEOREM_VIOLATION

    _LOGGER.info(f"All constraints infeasible at truncations {[r.truncation_dim for r in reports]}")
    return EXIT_CODE.OK


async def _runSample(args) -> int:
    d = await readJson(args.spec) if args.spec else {}
    if not isinstance(d, dict):
        raise InterchangeException("Ensemble spec must be an object")

    overrides = {
        "dim": args.dim,
        "q": args.q,
        "kind": str(args.kind) if args.kind else None,
        "count": args.count,
        "density": args.density,
        "bandwidth": args.bandwidth,
        "damping": args.damping,
    }
    d = {**d, **{k: v for k, v in overrides.items() if v is not None}}
    if "dim" not in d:
        raise ConfigError("sample needs --dim or a spec file with dim")
    d["seed"] = resolveSeed(args.seed, d.get("seed"))

    spec = ensembleSpecFromDict(d)
    report = await typicalityReport(spec, args.threads)
    if args.csv:
        await writeBytes(args.csv, rowsToCsv(report.rows()).encode())

    await _emit(args, report.to_dict())
    return EXIT_CODE.OK


_HANDLERS = {
    SUBCOMMAND.NORM: _runNorm,
    SUBCOMMAND.IDEAL_CHECK: _runIdealCheck,
    SUBCOMMAND.SPECTRAL: _runSpectral,
    SUBCOMMAND.COMMUTANT: _runCommutant,
    SUBCOMMAND.F_SET: _runFSet,
    SUBCOMMAND.CONSTRUCT: _runConstruct,
    SUBCOMMAND.VERIFY_THEOREM: _runVerifyTheorem,
    SUBCOMMAND.SAMPLE: _runSample,
}


async def runAsync(args) -> int:
    return await _HANDLERS[SUBCOMMAND(args.command)](args)


def run(argv: list[str] | None = None) -> int:
    """
    Exit codes: 0 success, 1 domain error, 2 I/O or parse error,
    3 commutant collapse not observed by verify-theorem.
    """
    parser = buildParser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(asyncio.run(runAsync(args)))

    except InterchangeException as e:
        _LOGGER.error(f"{e}")
        return EXIT_CODE.IO_ERROR
    except PosconeException as e:
        _LOGGER.error(f"{type(e).__name__}: {e}")
        return EXIT_CODE.DOMAIN_ERROR
    except OSError as e:
        _LOGGER.error(f"I/O error: {e}")
        return EXIT_CODE.IO_ERROR


def main():
    sys.exit(run())
