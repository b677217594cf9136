import json

import numpy as np
import pytest

from aeset.cli import main
from aeset.serialize import dumps, stateset_from_json, stateset_to_json

from conftest import random_partitioned_set


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(dumps(data))
    return str(path)


def test_table1(capsys):
    code, out = run(capsys, "table1")
    assert code == 0 and out["match"]
    assert out["excluded_count"] == 15
    assert [len(r["roots"]) for r in out["rows"]] == [7, 7, 7]
    assert all(r["printed_relative_sign"] == -1 for r in out["rows"])


def test_construct_ex1(capsys):
    code, out = run(capsys, "construct", "ex1", "--x", "0.5")
    assert code == 0 and out["dim"] == 4 and len(out["states"]) == 5
    for v in stateset_from_json(out).states:
        assert abs(np.linalg.norm(v) - 1) < 1e-12


def test_construct_thm1_and_thm2(capsys):
    code, out = run(capsys, "construct", "thm1", "--d", "4", "--a", "0.8", "--b", "0.6", "--random-basis", "--seed", "3")
    assert code == 0 and out["construction"]["lambda_star"] == pytest.approx(0.28125)
    code, out = run(capsys, "construct", "thm2", "--n", "2", "--p", "8", "--x", "0.9")
    assert code == 0 and len(out["states"]) == 5


def test_check_prop1(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"dim": 4, "states": [[[1, 0], [0, 0], [0, 0], [0, 0]],
                                                           [[0, 0], [1, 0], [0, 0], [0, 0]],
                                                           [[0, 0], [0, 0], [1, 0], [0, 0]]]})
    code, out = run(capsys, "check", "prop1", "--input", path, "--bipartition", "2x2")
    assert code == 1 and not out["passed"]
    assert [e["dim"] for e in out["entries"]] == [2, 2, 2]
    code, out = run(capsys, "construct", "ex1", "--x", "0.5")
    path = write(tmp_path, "ex1.json", out)
    code, out = run(capsys, "check", "prop1", "--input", path, "--bipartition", "2x2")
    assert code == 0 and out["passed"]


def test_embed_prop2(tmp_path, capsys):
    pset = random_partitioned_set(np.random.default_rng(1))
    sizes = np.cumsum([0] + [len(p.states) for p in pset.parts])
    parts = [list(range(a, b)) for a, b in zip(sizes[:-1].tolist(), sizes[1:].tolist())]
    path = write(tmp_path, "p.json", stateset_to_json(pset.all_states(), parts))
    code, out = run(capsys, "embed", "prop2", "--input", path, "--bipartition", str(pset.bip))
    assert code == 0 and out["all_product"]
    assert max(out["image_defects"]) < 1e-10


def test_witness_prop1(tmp_path, capsys):
    e = np.eye(4)
    rows = (e[0], e[1], (e[0] + e[1] + e[2]) / np.sqrt(3))
    path = write(tmp_path, "w.json", {"dim": 4, "states": [[[x, 0] for x in row] for row in rows]})
    code, out = run(capsys, "witness", "prop1", "--input", path, "--index", "3", "--bipartition", "2x2")
    assert code == 0 and out["case"] == "ii" and out["all_product"]


def test_poly_commands(capsys):
    code, out = run(capsys, "poly", "pair", "--p", "2", "--indices", "1,2,3,4", "--roots")
    assert code == 0 and out["terms"] == 14 and len(out["roots"]) == 7
    code, out = run(capsys, "poly", "general", "--p", "7", "--h", "1,2", "--g", "3,4")
    assert code == 0 and out["nonzero"] and out["diagonal_cancelled"]
    assert out["matching_exponents"] == 4


def test_excluded(capsys):
    code, out = run(capsys, "excluded")
    assert code == 0 and out["count"] == 15


def test_search_bell(tmp_path, capsys):
    path = write(tmp_path, "b.json", {"dim": 4, "states": [[[1, 0], [0, 0], [0, 0], [1, 0]]]})
    code, out = run(capsys, "search", "--input", path, "--bipartition", "2x2", "--restarts", "3")
    assert code == 0 and out["verdict"] == "ProductMappingFound"
    assert out["best_objective"] < 1e-8
    assert len(out["restarts"]) == 3


def test_feng_pipeline(tmp_path, capsys):
    code, gen = run(capsys, "feng", "gen", "--n", "3", "--partition", "2,1", "--seed", "5")
    assert code == 0
    path = write(tmp_path, "f.json", gen)
    code, out = run(capsys, "feng", "validate", "--input", path)
    assert code == 0 and out["passed"]
    code, out = run(capsys, "feng", "decompose", "--input", path)
    assert code == 0 and out["partition"] == [2, 1]
    bell = {"dim": 4, "states": [[[1, 0], [0, 0], [0, 0], [1, 0]], [[1, 0], [0, 0], [0, 0], [-1, 0]],
                                 [[0, 0], [1, 0], [1, 0], [0, 0]], [[0, 0], [1, 0], [-1, 0], [0, 0]]]}
    code, out = run(capsys, "feng", "decompose", "--input", write(tmp_path, "bell.json", bell))
    assert code == 1 and "not all product" in out["error"]


@pytest.mark.parametrize("argv", [
    ["construct", "ex1"],
    ["construct", "thm1", "--d", "5", "--a", "0.8", "--b", "0.6"],
    ["check", "prop1", "--input", "/nonexistent.json", "--bipartition", "2x2"],
    ["search", "--input", "x.json", "--bipartition", "2by2"],
    ["poly", "pair", "--p", "2", "--indices", "1,2,3"],
    ["feng", "gen", "--n", "3", "--partition", "1,1"],
])
def test_bad_input_exits_2(argv, capsys):
    assert main(argv) == 2


def test_output_is_byte_identical(capsys):
    argv = ["construct", "thm1", "--d", "4", "--a", "0.8", "--b", "0.6", "--random-basis", "--seed", "9"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
