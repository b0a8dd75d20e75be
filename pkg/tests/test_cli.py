import io
import json
import subprocess
import sys

import pytest

from adelecovers.cli import run
from adelecovers.extensions import AbelianExtensionSpec, parse_extension


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_cover_json():
    code, out, _ = call("cover", "--ext", "quadratic:-1", "--prime", "5", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["component_count"] == 2
    assert data["residue_degree"] == 1


def test_cover_ramified_prime_exits_1():
    code, out, err = call("cover", "--ext", "quadratic:-1", "--prime", "2")
    assert code == 1
    assert "RamifiedPrime" in err
    assert out == ""


def test_ktheory_pq_instance():
    code, out, _ = call("ktheory", "--instance", "paper-pq")
    data = json.loads(out)
    assert code == 0
    assert (data["K0(A)"], data["K1(A)"]) == (3, 2)


def test_usage_errors_exit_2(capsys):
    assert call("cover", "--ext", "quadratic:-1")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("cover", "--ext", "quadratic:-1", "--prime", "5", "--bogus")[0] == 2
    err = capsys.readouterr().err
    assert "--prime" in err


def test_bad_extension_prints_flag_and_synopsis():
    code, _, err = call("cover", "--ext", "cubic:7", "--prime", "5")
    assert code == 2
    assert "--ext" in err
    assert "usage: adelecovers cover" in err


def test_echoed_extension_round_trips():
    for spec in ("quadratic:-1", "cyclotomic:15", '{"modulus": 12, "kernel": [1, 5]}'):
        _, out, _ = call("ramify", "--ext", spec)
        echoed = json.loads(out)["ext"]
        assert AbelianExtensionSpec.from_json(echoed) == parse_extension(spec)


def test_output_is_byte_identical_across_runs():
    argvs = [
        ("cover", "--ext", "cyclotomic:7", "--prime", "2"),
        ("density", "--ext", "cyclotomic:7", "--bound", "500"),
        ("ktheory", "--instance", "paper-pq"),
        ("linking-table", "--primes", "2,3,5,7", "--precision", "2"),
    ]
    for argv in argvs:
        assert call(*argv)[1] == call(*argv)[1]


def test_dot_output():
    code, out, _ = call("cover", "--ext", "quadratic:-1", "--prime", "3", "--dot")
    assert code == 0
    assert out.startswith("digraph")
    assert "len = 2·log 3 = 2.19722" in out


def test_linking_and_table():
    _, out, _ = call("linking", "--p", "2", "--q", "7", "--precision", "2")
    assert json.loads(out)["order"] == 21
    _, out, _ = call("linking-table", "--primes", "2,3", "--precision", "1")
    assert out.splitlines() == ["p\\q,2,3", "2,,2:2", "3,1:1,"]
    assert call("linking", "--p", "3", "--q", "3")[0] == 1


def test_strata_and_reduce():
    _, out, _ = call("strata", "--places", "2,3", "--adele", '{"2": "12", "3": "0", "inf": "-5/2"}')
    assert json.loads(out) == {"Z": ["3"], "nu": 1, "orbit": ["3"]}
    _, out, _ = call(
        "reduce", "--places", "2,3", "--orbit-prime", "2", "--precision", "1",
        "--adele", '{"2": "0", "3": "3", "inf": "6"}',
    )
    assert json.loads(out) == {"excluded_prime": 2, "h": {"3^1": 2}, "n": 1, "t": "1"}
    assert call("reduce", "--places", "2,3", "--orbit-prime", "2", "--adele", '{"2": "1", "3": "1", "inf": "1"}')[0] == 1


def test_config_file_sets_default_precision(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nprecision = 3\n")
    _, out, _ = call("--config", str(cfg), "linking", "--p", "2", "--q", "3")
    assert json.loads(out)["precision"] == 3
    _, out, _ = call("--config", str(cfg), "linking", "--p", "2", "--q", "3", "--precision", "1")
    assert json.loads(out)["precision"] == 1


def test_schwartz_check(tmp_path):
    table = {"places": [{"prime": 2, "j": 0, "k": 1}, {"prime": 3, "j": 0, "k": 0}], "values": [["1"], ["0"]]}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(table))
    code, out, _ = call("schwartz-check", "--table", str(path), "--glue", "2;3")
    data = json.loads(out)
    assert code == 0
    assert data["factorable"] == {"2": False, "3": True}
    assert data["glue"] == {"member": False, "premise": False, "consistent": True}


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "adelecovers.cli", "ktheory", "--instance", "paper-pq"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["K1(A)"] == 2
