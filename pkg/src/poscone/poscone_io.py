"""poscone_io.py: JSON / CSV / DOT interchange of operators, recipes and reports."""

import aiofiles
import csv
import io
import logging
import orjson

import numpy as np

from .poscone_const import MATRIX_FORMAT
from .poscone_constructions import ConstructionRecipe
from .poscone_core import (
    PositiveVector,
    SpaceConfig,
    TruncatedPositiveOperator,
)
from .poscone_errors import (
    ConfigError,
    InterchangeException,
    PosconeException,
)
from .poscone_ideals import SupportDigraph
from .poscone_sampler import EnsembleSpec

_LOGGER = logging.getLogger(__name__)


def parseJson(text: str | bytes):
    try:
        return orjson.loads(text)
    except orjson.JSONDecodeError as e:
        raise InterchangeException(f"Malformed JSON: {e.msg}", e.lineno, e.colno) from None


def dumpJson(obj) -> bytes:
    return orjson.dumps(obj, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE)


def _checkEntries(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        raise InterchangeException(f"{what} contains NaN or Inf")
    if values.size and values.min() < 0:
        raise InterchangeException(f"{what} contains negative value {values.min()}")


def spaceFromDict(d: dict | None, default: SpaceConfig | None = None) -> SpaceConfig:
    try:
        return SpaceConfig.from_dict(d, default)
    except (TypeError, ValueError, ConfigError) as e:
        raise InterchangeException(f"Invalid space section: {e}") from None


def operatorFromDict(d: dict, space: SpaceConfig | None = None) -> TruncatedPositiveOperator:
    """
    Dense: {"format": "dense", "dim": n, "entries": [[...], ...]}
    COO:   {"format": "coo", "dim": n, "triplets": [[i, j, v], ...]}
    An optional "space" section overrides the given SpaceConfig.
    Throws
        InterchangeException
    """
    if not isinstance(d, dict):
        raise InterchangeException(f"Operator document must be an object, got {type(d).__name__}")

    space = spaceFromDict(d.get('space'), space)
    try:
        fmt = MATRIX_FORMAT.from_str(d.get('format', 'dense'))
    except Exception as e:
        raise InterchangeException(str(e)) from None

    try:
        match fmt:
            case MATRIX_FORMAT.DENSE:
                entries = np.asarray(d['entries'], dtype=float)
                if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
                    raise InterchangeException(f"Entries must form a square matrix, got shape {entries.shape}")
                if 'dim' in d and int(d['dim']) != entries.shape[0]:
                    raise InterchangeException(f"Declared dim {d['dim']} does not match entries of dim {entries.shape[0]}")
                _checkEntries(entries, "Operator")
                return TruncatedPositiveOperator(entries, space)

            case MATRIX_FORMAT.COO:
                dim = int(d['dim'])
                triplets = [(int(i), int(j), float(v)) for i, j, v in d.get('triplets', [])]
                _checkEntries(np.array([v for _, _, v in triplets]), "Operator")
                return TruncatedPositiveOperator.fromCoo(dim, triplets, space)

    except KeyError as e:
        raise InterchangeException(f"Operator document misses key {e}") from None
    except (TypeError, ValueError) as e:
        raise InterchangeException(f"Operator document is invalid: {e}") from None
    except PosconeException as e:
        raise InterchangeException(f"Operator document is invalid: {e}") from None


def operatorToDict(T: TruncatedPositiveOperator, fmt: MATRIX_FORMAT = MATRIX_FORMAT.DENSE) -> dict:
    d = {
        "format": str(fmt),
        "dim": T.dim,
        "space": T.space.to_dict(),
    }
    if fmt == MATRIX_FORMAT.COO:
        d["triplets"] = [[i, j, v] for i, j, v in T.toCoo()]
    else:
        d["entries"] = T.entries.tolist()
    return d


def vectorFromList(values, dim: int | None = None) -> PositiveVector:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InterchangeException(f"Vector must be a flat list, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InterchangeException(f"Vector has dim {arr.shape[0]}, expected {dim}")
    _checkEntries(arr, "Vector")
    return PositiveVector(arr)


def recipeFromDict(d: dict, space: SpaceConfig | None = None) -> ConstructionRecipe:
    """Construction recipe; delta omitted means the default recipe for (M, N, p, epsilon, L)"""
    if not isinstance(d, dict):
        raise InterchangeException("Recipe document must be an object")
    try:
        M = np.asarray(d.get('M', []), dtype=float)
        _checkEntries(M, "Recipe matrix M")
        return ConstructionRecipe.from_dict(d, space)
    except KeyError as e:
        raise InterchangeException(f"Recipe document misses key {e}") from None
    except (TypeError, ValueError, ConfigError) as e:
        raise InterchangeException(f"Recipe document is invalid: {e}") from None


def ensembleSpecFromDict(d: dict) -> EnsembleSpec:
    """
    Ensemble spec document, see EnsembleSpec.to_dict
    Throws
        InterchangeException
    """
    if not isinstance(d, dict):
        raise InterchangeException("Ensemble spec must be an object")
    try:
        return EnsembleSpec.from_dict(d)
    except KeyError as e:
        raise InterchangeException(f"Ensemble spec misses key {e}") from None
    except (TypeError, ValueError, ConfigError) as e:
        raise InterchangeException(f"Ensemble spec is invalid: {e}") from None
    except Exception as e:
        # unknown enum names
        raise InterchangeException(f"Ensemble spec is invalid: {e}") from None


async def readJson(path: str):
    try:
        async with aiofiles.open(path, "rb") as file:
            text = await file.read()
    except OSError as e:
        raise InterchangeException(f"Cannot read '{path}': {e.strerror}") from None

    return parseJson(text)


async def readOperator(path: str, space: SpaceConfig | None = None) -> TruncatedPositiveOperator:
    T = operatorFromDict(await readJson(path), space)
    _LOGGER.debug(f"Read operator of dim {T.dim} from '{path}'")
    return T


async def readRecipe(path: str, space: SpaceConfig | None = None) -> ConstructionRecipe:
    return recipeFromDict(await readJson(path), space)


async def writeBytes(path: str, data: bytes):
    try:
        async with aiofiles.open(path, "wb") as file:
            await file.write(data)
    except OSError as e:
        raise InterchangeException(f"Cannot write '{path}': {e.strerror}") from None


async def writeJson(path: str, obj):
    await writeBytes(path, dumpJson(obj))
    _LOGGER.debug(f"Wrote '{path}'")


def rowsToCsv(rows: list[dict]) -> str:
    """One CSV line per row dict, header from the first row"""
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def sequenceToCsv(name: str, values: list[float]) -> str:
    """k,<name> lines for k = 1..len(values)"""
    return rowsToCsv([{"k": k, name: v} for k, v in enumerate(values, start=1)])


def digraphToDot(graph: SupportDigraph, highlight: list[int] | None = None) -> str:
    """Graphviz rendering; highlighted coordinates are filled"""
    marked = set(highlight or [])
    lines = ["digraph support {"]
    for k in range(graph.dim):
        style = ' [style=filled, fillcolor="lightblue"]' if k in marked else ""
        lines.append(f"  {k}{style};")
    for l, k in sorted(graph.arcs):
        lines.append(f"  {l} -> {k};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def complexToList(values) -> list[list[float]]:
    """Complex numbers as [re, im] pairs"""
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


