import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from pureic.cli import run
from pureic.formats import decode_basis_set, decode_vector, dumps, encode_basis_set
from pureic.qlinalg import OrthonormalBasis, random_basis, random_ket
from pureic.spin1 import EXAMPLE_DIRECTIONS

GOLDEN = Path(__file__).parent / "golden"


def call(argv, stdin=None, monkeypatch=None, capsys=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cli(monkeypatch, capsys):
    return lambda argv, stdin=None: call(argv, stdin, monkeypatch, capsys)


def test_bounds_markdown_golden(cli):
    code, out, _ = cli(["bounds", "--table", "7", "--markdown"])
    assert code == 0
    assert out == (GOLDEN / "bounds_table7.md").read_text()


def test_bounds_json_golden(cli):
    code, out, _ = cli(["bounds", "--table", "7"])
    assert code == 0
    got, want = json.loads(out), json.loads((GOLDEN / "bounds_table7.json").read_text())
    assert [r["s_lower"] for r in got["rows"]] == [r["s_lower"] for r in want["rows"]]
    assert got["rows"] == want["rows"]
    assert got["f_minimizer"] == pytest.approx(want["f_minimizer"], abs=1e-12)


def test_bounds_single_dim(cli):
    code, out, _ = cli(["bounds", "--dim", "9"])
    assert code == 0 and json.loads(out)["rows"][0]["s_lower"] == 31
    assert cli(["bounds"])[0] == 2
    assert cli(["bounds", "--dim", "1"])[0] == 2


def test_jaming_then_certify_d3(cli):
    code, bases_json, _ = cli(["jaming", "--dim", "3"])
    assert code == 0
    data = json.loads(bases_json)
    assert data["format"] == 1 and len(data["bases"]) == 4
    code, out, _ = cli(["certify", "--d3"], stdin=bases_json)
    assert code == 0 and json.loads(out)["status"] == "IC"
    code, out, _ = cli(["certify"], stdin=bases_json)
    assert code == 0 and json.loads(out)["status"] == "IC"


def test_certify_two_bases_not_ic(cli, rng):
    text = dumps(encode_basis_set([random_basis(3, rng) for _ in range(2)]))
    code, out, _ = cli(["certify", "--seed", "1"], stdin=text)
    res = json.loads(out)
    assert code == 0 and res["status"] == "NotIC"
    assert res["witness"]["residual"] < 1e-9


def test_certify_inconclusive_exit_3(cli):
    code, bases_json, _ = cli(["jaming", "--dim", "4"])
    code, out, err = cli(["certify", "--restarts", "8"], stdin=bases_json)
    assert code == 3
    assert json.loads(out)["status"] == "Inconclusive"
    assert "inconclusive" in err


def test_counterexample(cli, rng, tmp_path):
    bases = [random_basis(4, rng) for _ in range(2)]
    path = tmp_path / "bases.json"
    path.write_text(dumps(encode_basis_set(bases)))
    code, out, _ = cli(["counterexample", "--bases", str(path)])
    assert code == 0
    res = json.loads(out)
    assert res["residual"] < 1e-10 and res["overlap"] < 1 - 1e-6
    a, b = decode_vector(res["psi_plus"]), decode_vector(res["psi_minus"])
    for B in bases:
        np.testing.assert_allclose(np.abs(B.vectors.conj() @ a) ** 2, np.abs(B.vectors.conj() @ b) ** 2, atol=1e-10)


def test_counterexample_needs_two(cli):
    text = dumps(encode_basis_set([OrthonormalBasis.standard(2)]))
    assert cli(["counterexample"], stdin=text)[0] == 2


def test_simulate_reconstruct_pipeline(cli, rng):
    psi = random_ket(4, rng)
    state = json.dumps({"state": [[float(z.real), float(z.imag)] for z in psi]})
    code, table, _ = cli(["simulate", "--family", "legendre"], stdin=state)
    assert code == 0
    assert json.loads(table)["family"] == "legendre"
    code, out, _ = cli(["reconstruct"], stdin=table)
    assert code == 0
    res = json.loads(out)
    got = decode_vector(res["state"])
    assert abs(np.vdot(psi, got)) ** 2 > 1 - 1e-10
    assert res["residual"] < 1e-10


def test_reconstruct_inconsistent_exit_2(cli):
    table = {"dim": 2, "alpha": 1.0, "family": "hermite", "table": [[1, 0], [0, 1], [1, 0], [0, 1]]}
    code, _, err = cli(["reconstruct"], stdin=json.dumps(table))
    assert code == 2 and "inconsistent" in err


def test_reconstruct_dim_mismatch(cli):
    table = {"dim": 3, "table": [[1, 0], [1, 0], [1, 0], [1, 0]]}
    assert cli(["reconstruct"], stdin=json.dumps(table))[0] == 2


def test_spin1(cli):
    code, out, _ = cli(["spin1"], stdin=json.dumps({"directions": [list(d) for d in EXAMPLE_DIRECTIONS]}))
    res = json.loads(out)
    assert code == 0 and res["rank_M"] == 4 and res["verdict"]["status"] == "IC"
    code, out, _ = cli(["spin1"], stdin=json.dumps({"directions": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1]]}))
    assert code == 0 and json.loads(out)["verdict"]["status"] == "NotIC"
    assert cli(["spin1"], stdin=json.dumps({"directions": [[1, 0, 0]] * 3}))[0] == 2
    assert cli(["spin1"], stdin=json.dumps({"directions": [[1, 1, 0]] * 4}))[0] == 2


def test_product_collide(cli, rng):
    dirs = rng.standard_normal((8, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    payload = json.dumps({"pairs": [{"m": dirs[2 * j].tolist(), "n": dirs[2 * j + 1].tolist()} for j in range(4)]})
    code, out, _ = cli(["product-collide", "--seed", "3"], stdin=payload)
    assert code == 0
    res = json.loads(out)
    assert res["probability_gap"] < 1e-8 and res["state_overlap"] <= 1 - 1e-3
    assert np.asarray(res["probabilities1"]).shape == (4, 4)
    code, _, _ = cli(["product-collide", "--restarts", "1", "--separation", "0.6"], stdin=payload)
    assert code == 3


@pytest.mark.parametrize(
    "argv,stdin",
    [
        (["certify"], "{not json"),
        (["certify"], json.dumps({"format": 2, "bases": []})),
        (["certify"], json.dumps({"format": 1, "bases": [{"dim": 2, "vectors": [[1, 0], [1, 0]]}]})),
        (["certify"], json.dumps({"format": 1, "bases": [{"dim": 3, "vectors": [[1, 0], [0, 1]]}]})),
        (["spin1"], json.dumps({"dirs": []})),
        (["product-collide"], json.dumps({"pairs": [{"m": [0, 0, 1]}] * 4})),
        (["nonsense"], None),
        (["jaming"], None),
        (["jaming", "--dim", "3", "--family", "laguerre"], None),
    ],
)
def test_invalid_input_exit_2(cli, argv, stdin):
    assert cli(argv, stdin=stdin)[0] == 2


def test_malformed_json_reports_location(cli):
    code, _, err = cli(["certify"], stdin='{\n  "format": 1,\n  "bases": [,]\n}')
    assert code == 2 and "line 3" in err


def test_missing_file(cli):
    assert cli(["certify", "--in", "/nonexistent/bases.json"])[0] == 2


def test_out_file_and_determinism(cli, tmp_path, rng):
    text = dumps(encode_basis_set([random_basis(3, rng) for _ in range(3)]))
    outs = []
    for k in range(2):
        p = tmp_path / f"out{k}.json"
        assert cli(["certify", "--seed", "4", "--out", str(p)], stdin=text)[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "pureic", "bounds", "--dim", "3"], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0 and json.loads(res.stdout)["rows"][0]["s_lower"] == 7


def test_jaming_round_trips_through_formats(cli):
    _, out, _ = cli(["jaming", "--dim", "5", "--family", "chebyshev", "--alpha", "0.5"])
    bases = decode_basis_set(json.loads(out))
    assert len(bases) == 4 and all(b.orthonormality_error() < 1e-9 for b in bases)
