import math
import numpy as np
import pytest

from poscone import SpaceConfig, TruncatedPositiveOperator, MATRIX_FORMAT, ENSEMBLE_KIND, InterchangeException
from poscone import operatorFromDict, operatorToDict, recipeFromDict, ensembleSpecFromDict, readOperator, readRecipe, writeJson
from poscone.poscone_ideals import supportDigraph
from poscone.poscone_io import parseJson, dumpJson, vectorFromList, readJson, rowsToCsv, sequenceToCsv, digraphToDot, complexToList
from . import backwardShift, exampleRecipe


def test_parse_json_position():
    with pytest.raises(InterchangeException) as excinfo:
        parseJson('{\n  "format": "dense",\n  "entries": [[1, 0],, [0, 1]]\n}')
    assert excinfo.value.line == 3
    assert excinfo.value.column is not None
    assert "line 3" in str(excinfo.value)


def test_dump_json():
    data = dumpJson({"entries": np.eye(2), "value": 0.5})
    assert data.endswith(b"\n")
    assert parseJson(data) == {"entries": [[1.0, 0.0], [0.0, 1.0]], "value": 0.5}


@pytest.mark.parametrize(
    "fixture, doc, exp_entries",
    [
        ("dense",        {"format": "dense", "dim": 2, "entries": [[0.5, 0.0], [0.1, 0.2]]}, [[0.5, 0.0], [0.1, 0.2]]),
        ("no format",    {"entries": [[1.0]]},                                               [[1.0]]),
        ("coo",          {"format": "coo", "dim": 3, "triplets": [[0, 1, 0.5], [2, 2, 1.0]]}, [[0, 0.5, 0], [0, 0, 0], [0, 0, 1.0]]),
        ("sparse alias", {"format": "sparse", "dim": 2, "triplets": []},                      [[0, 0], [0, 0]]),
    ]
)
def test_operator_from_dict(fixture: str, doc: dict, exp_entries: list):
    T = operatorFromDict(doc)
    assert T.entries == pytest.approx(np.array(exp_entries, dtype=float))


@pytest.mark.parametrize(
    "fixture, doc",
    [
        ("not an object",  [[1.0]]),
        ("nan",            {"entries": [[math.nan]]}),
        ("inf",            {"entries": [[math.inf]]}),
        ("negative",       {"entries": [[1.0, -0.5], [0.0, 1.0]]}),
        ("negative coo",   {"format": "coo", "dim": 2, "triplets": [[0, 0, -1.0]]}),
        ("not square",     {"entries": [[1.0, 0.0]]}),
        ("dim mismatch",   {"dim": 3, "entries": [[1.0]]}),
        ("no entries",     {"format": "dense"}),
        ("no dim",         {"format": "coo", "triplets": []}),
        ("coo range",      {"format": "coo", "dim": 2, "triplets": [[0, 2, 1.0]]}),
        ("bad format",     {"format": "csr", "entries": [[1.0]]}),
        ("bad space",      {"entries": [[1.0]], "space": {"q": 0.5}}),
    ]
)
def test_operator_from_dict_errors(fixture: str, doc):
    with pytest.raises(InterchangeException):
        operatorFromDict(doc)


def test_operator_space_section():
    T = operatorFromDict({"entries": [[1.0]], "space": {"q": "inf", "seed": 4}})
    assert T.space.is_sup_norm
    assert T.space.seed == 4

    # the section overrides only the fields it names
    T = operatorFromDict({"entries": [[1.0]], "space": {"tol_rel": 1e-6}}, SpaceConfig(q=3.0))
    assert T.q == 3.0
    assert T.space.tol_rel == 1e-6


def test_operator_to_dict():
    T = backwardShift(3, SpaceConfig(q=1.0))

    d = operatorToDict(T, MATRIX_FORMAT.COO)
    assert d["format"] == "coo"
    assert sorted(d["triplets"]) == [[0, 1, 1.0], [1, 2, 1.0]]
    assert d["space"]["q"] == 1.0
    assert operatorFromDict(d) == T

    d = operatorToDict(T)
    assert d["entries"] == T.entries.tolist()


def test_vector_from_list():
    assert vectorFromList([1.0, 0.0, 2.0], 3).support() == [0, 2]
    with pytest.raises(InterchangeException):
        vectorFromList([1.0, 0.0], 3)
    with pytest.raises(InterchangeException):
        vectorFromList([1.0, -1.0])
    with pytest.raises(InterchangeException):
        vectorFromList([[1.0]])


@pytest.mark.parametrize(
    "fixture, doc",
    [
        ("not an object", [1, 2]),
        ("missing N",     {"p": 0, "M": [[0.3]], "epsilon": 0.5}),
        ("negative M",    {"N": 0, "p": 0, "M": [[-0.3]], "epsilon": 0.5}),
        ("bad number",    {"N": "one", "p": 0, "M": [[0.3, 0.1], [0.1, 0.2]], "epsilon": 0.5}),
        ("ragged M",      {"N": 1, "p": 0, "M": [[0.3, 0.1], [0.1]], "epsilon": 0.5}),
        ("text M",        {"N": 1, "p": 0, "M": "identity", "epsilon": 0.5}),
    ]
)
def test_recipe_from_dict_errors(fixture: str, doc):
    with pytest.raises(InterchangeException):
        recipeFromDict(doc)


def test_recipe_from_dict_default_delta():
    r = recipeFromDict({"N": 1, "p": 0, "M": [[0.3, 0.1], [0.1, 0.2]], "epsilon": 0.5, "L": 8})
    assert r == exampleRecipe()


@pytest.mark.parametrize(
    "fixture, doc",
    [
        ("not an object", [4]),
        ("missing dim",   {"kind": "iid", "seed": 1}),
        ("missing seed",  {"dim": 4}),
        ("unknown kind",  {"dim": 4, "kind": "bogus", "seed": 1}),
        ("text dim",      {"dim": "three", "seed": 1}),
        ("zero count",    {"dim": 4, "count": 0, "seed": 1}),
        ("null density",  {"dim": 4, "density": None, "seed": 1}),
    ]
)
def test_ensemble_spec_from_dict_errors(fixture: str, doc):
    with pytest.raises(InterchangeException):
        ensembleSpecFromDict(doc)


def test_ensemble_spec_from_dict():
    spec = ensembleSpecFromDict({"dim": 3, "kind": "permutation", "count": 5, "seed": 2})
    assert spec.dim == 3
    assert spec.kind == ENSEMBLE_KIND.PERMUTATION
    assert spec.count == 5


@pytest.mark.asyncio
async def test_read_write(tmp_path):
    T = backwardShift(4)
    path = str(tmp_path / "T.json")
    await writeJson(path, operatorToDict(T))
    assert await readOperator(path) == T

    path = str(tmp_path / "recipe.json")
    await writeJson(path, exampleRecipe().to_dict())
    assert await readRecipe(path) == exampleRecipe()


@pytest.mark.asyncio
async def test_read_missing(tmp_path):
    with pytest.raises(InterchangeException):
        await readJson(str(tmp_path / "missing.json"))
    with pytest.raises(InterchangeException):
        await writeJson(str(tmp_path / "no" / "such" / "dir.json"), {})


def test_csv():
    assert rowsToCsv([]) == ""
    assert rowsToCsv([{"a": 1, "b": 2.5}, {"a": 3, "b": 0.0}]) == "a,b\n1,2.5\n3,0.0\n"
    assert sequenceToCsv("value", [0.5, 0.25]) == "k,value\n1,0.5\n2,0.25\n"


def test_dot():
    text = digraphToDot(supportDigraph(backwardShift(3)), highlight=[0])
    lines = text.splitlines()

    assert lines[0] == "digraph support {"
    assert lines[-1] == "}"
    assert '  0 [style=filled, fillcolor="lightblue"];' in lines
    assert "  2;" in lines
    assert "  1 -> 0;" in lines
    assert "  2 -> 1;" in lines


def test_complex_to_list():
    assert complexToList([1 + 2j, 3.0]) == [[1.0, 2.0], [3.0, 0.0]]
