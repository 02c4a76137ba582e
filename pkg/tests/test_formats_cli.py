import json
import random

import pytest
from gmpy2 import mpq

from couplingkit import formats
from couplingkit.algebra import Poly
from couplingkit.cli import run
from couplingkit.coupling import INF, SolutionPair, solve, verify
from couplingkit.errors import DuplicateLambda, SchemaError, ZeroLambda
from couplingkit.instances import random_admissible
from couplingkit.string_app import DiscreteString, string_spectrum


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_parse_problem_examples():
    d = formats.parse_problem(b'{"sigma":["1"],"eta":["inf"],"kind":"rational"}')
    assert d.sigma == (1,) and d.eta == (INF,)
    d = formats.parse_problem(b'{"sigma":["3","9"],"eta":["1","-1"],"kind":"rational"}')
    assert d.sigma == (3, 9) and d.eta == (1, -1)
    with pytest.raises(ZeroLambda):
        formats.parse_problem(b'{"sigma":["0"],"eta":["1"],"kind":"rational"}')
    with pytest.raises(DuplicateLambda):
        formats.parse_problem(b'{"sigma":["2","4/2"],"eta":["1","1"]}')


def test_parse_problem_schema_paths():
    with pytest.raises(SchemaError, match="eta"):
        formats.parse_problem(b'{"sigma":["1"]}')
    with pytest.raises(SchemaError, match=r"eta\[0\]"):
        formats.parse_problem(b'{"sigma":["1"],"eta":["x"]}')
    with pytest.raises(SchemaError, match="kind"):
        formats.parse_problem(b'{"sigma":["1"],"eta":["1"],"kind":"complex"}')
    with pytest.raises(SchemaError):
        formats.parse_problem(b"not json")


def test_round_trips():
    rng = random.Random(0)
    for _ in range(10):
        d = random_admissible(rng, rng.randint(0, 6), degenerate=True)
        assert formats.parse_problem(formats.emit_problem(d)) == d
        sol = solve(d)
        back = formats.parse_solution(formats.emit_solution(sol))
        assert back.phi_minus == sol.phi_minus and back.phi_plus == sol.phi_plus
        assert back.trace.n0 == sol.trace.n0 and back.trace.delta == sol.trace.delta
        assert back.trace.cf.triples == sol.trace.cf.triples
        assert formats.emit_solution(back) == formats.emit_solution(sol)
        rep = verify(d, sol)
        assert formats.parse_report(formats.emit_report(rep)).checks == rep.checks
    s = DiscreteString((mpq(1, 5), mpq(1, 2)), (mpq(2), mpq(1, 2)))
    assert formats.parse_string(formats.emit_string(s)) == s
    spec = string_spectrum(s)
    again = formats.parse_spectral(formats.emit_spectral(spec))
    assert again.eigenvalues == spec.eigenvalues and again.wronskian == spec.wronskian


def test_emit_report_examples():
    d = formats.parse_problem(b'{"sigma":["1"],"eta":["2"]}')
    doc = json.loads(formats.emit_report(verify(d, solve(d))))
    assert doc["checks"] == {"C": "pass", "G": "pass", "N": "pass", "bound": "pass", "residue_signs": "pass"}
    doc = json.loads(formats.emit_report(verify(d, SolutionPair(Poly.one(), Poly.one()))))
    assert doc["checks"]["C"] == "fail"
    assert doc["failures"]["C"][0]["lam"] == "1" and doc["failures"]["C"][0]["eta_phi_plus"] == "2"
    tr = json.loads(formats.emit_report(solve(d).trace))
    assert tr["n0"] == 1 and tr["delta"] == "1/3" and tr["l"] == ["4/3", "2/3"]


def test_emit_is_deterministic():
    d = formats.parse_problem(b'{"sigma":["-3","5","2"],"eta":["1/2","inf","7"]}')
    assert formats.emit_solution(solve(d)) == formats.emit_solution(solve(d))


def test_cli_solve_example(tmp_path):
    prob = write(tmp_path / "p.json", {"sigma": ["1"], "eta": ["2"], "kind": "rational"})
    out = tmp_path / "sol.json"
    assert run(["solve", "--in", prob, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["phi_minus"] == ["1"] and doc["phi_plus"] == ["1", "-1/2"]


def test_cli_exit_codes(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", {"sigma": ["1"], "eta": ["-1"], "kind": "rational"})
    assert run(["solve", "--in", bad]) == 2
    assert run(["solve", "--in", bad, "--general"]) == 3
    prob = write(tmp_path / "p.json", {"sigma": ["1"], "eta": ["2"]})
    sol = write(tmp_path / "s.json", {"phi_minus": ["1"], "phi_plus": ["1", "-1/3"], "trace": {}})
    assert run(["verify", "--problem", prob, "--solution", sol]) == 4
    good = write(tmp_path / "g.json", {"phi_minus": ["1"], "phi_plus": ["1", "-1/2"]})
    assert run(["verify", "--problem", prob, "--solution", good]) == 0
    assert run(["solve", "--in", str(tmp_path / "missing.json")]) == 74
    assert run(["frobnicate"]) == 64
    assert run(["solve"]) == 64
    assert run(["solve", "--in", prob, "--prec-bits", "32"]) == 64
    assert run(["solve", "--in", prob, "--tol", "-1"]) == 64
    zero = write(tmp_path / "z.json", {"sigma": ["0"], "eta": ["1"]})
    assert run(["solve", "--in", zero]) == 64
    capsys.readouterr()


def test_cli_cf(tmp_path, capsys):
    prob = write(tmp_path / "p.json", {"sigma": ["1"], "eta": ["2"]})
    assert run(["cf", "--in", prob]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [t["l"] for t in doc] == ["4/3", "2/3"] and doc[0]["omega"] == "9/4"


def test_cli_string_pipeline(tmp_path):
    s = write(tmp_path / "s.json", {"positions": ["1/3", "2/3"], "masses": ["1", "1"]})
    spec = tmp_path / "spec.json"
    rec = tmp_path / "rec.json"
    assert run(["string-forward", "--in", s, "--out", str(spec)]) == 0
    doc = json.loads(spec.read_text())
    assert doc["eigenvalues"] == ["3", "9"] and doc["norming_sq"] == ["2/3", "2"]
    assert doc["wronskian"] == ["1", "-4/9", "1/27"]
    assert run(["string-recover", "--in", str(spec), "--out", str(rec)]) == 0
    got = json.loads(rec.read_text())
    assert [round(float(v), 9) for v in got["positions"]] == [round(1 / 3, 9), round(2 / 3, 9)]


def test_cli_peakons(tmp_path):
    pk = write(tmp_path / "pk.json", {"q": ["0"], "p": ["1"]})
    spec = tmp_path / "ch.json"
    assert run(["peakon-forward", "--in", pk, "--out", str(spec)]) == 0
    assert float(json.loads(spec.read_text())["eigenvalues"][0]) == 0.5
    field = tmp_path / "u.csv"
    assert run(["peakon-field", "--in", pk, "--grid=-1:1:3,0:1:2", "--out", str(field)]) == 0
    lines = field.read_text().splitlines()
    assert lines[0] == "t,x,u" and len(lines) == 7
    t, x, u = map(float, lines[-1].split(","))
    assert (t, x) == (1.0, 1.0) and abs(u - 1.0) < 1e-12
    assert run(["peakon-field", "--in", pk, "--grid", "nonsense"]) == 64


def test_cli_stability_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["stability", "--seed", "3", "--out", str(a)]) == 0
    assert run(["stability", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["monotone"] is True
