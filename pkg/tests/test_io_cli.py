import json
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singerlab import cli, fixtures, io
from singerlab.amodule import trivial_module
from singerlab.errors import DescriptionError, ValidationError
from singerlab.ext import ext_chart
from singerlab.parallel import pmap, thread_count

F2 = {"prime": 2, "generators": [{"name": "a", "degree": 0}]}
SQ1_DEFECT = {
    "prime": 2,
    "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}, {"name": "c", "degree": 2}],
    "actions": [{"op": "Sq^1", "src": "a", "dst": "b"}, {"op": "Sq^1", "src": "b", "dst": "c"}],
}
SQ_AT_P3 = '{"prime": 3,\n "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}],\n' \
           ' "actions": [\n   {"op": "Sq^1", "src": "a", "dst": "b"}]}'


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=1))
        return str(path)

    return write


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- description files -----------------------------------------------------------

def test_parse_description():
    M = io.parse_description(json.dumps({
        "prime": 3,
        "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}, {"name": "c", "degree": 4}],
        "actions": [{"op": "beta", "src": "a", "dst": "b"}, {"op": "P^1", "src": "a", "dst": "2 c"}],
        "label": "X",
    }))
    assert M.prime == 3 and M.label == "X"
    assert M.act(0, {"a": 1}) == {"b": 1} and M.act(1, {"a": 1}) == {"c": 2}


def test_string_combinations():
    text = json.dumps({
        "prime": 5,
        "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 8}, {"name": "c", "degree": 8}],
        "actions": [{"op": "P^1", "src": "a", "dst": "b - 2 c"}],
    })
    assert io.parse_description(text).act(1, {"a": 1}) == {"b": 1, "c": 3}


def test_malformed_json_reports_position():
    with pytest.raises(DescriptionError) as exc:
        io.parse_description('{"prime": 2,\n "generators": [{"name": "a", "degree": 0}\n')
    assert exc.value.line is not None and exc.value.column is not None


def test_semantic_errors_report_position():
    with pytest.raises(DescriptionError) as exc:
        io.parse_description(SQ_AT_P3)
    assert (exc.value.line, exc.value.column) == (4, 4)


@pytest.mark.parametrize("doc", [
    {"prime": 4, "generators": [{"name": "a", "degree": 0}]},
    {"prime": 2, "generators": []},
    {"prime": 2, "generators": [{"name": "a", "degree": 0}, {"name": "a", "degree": 1}]},
    {"prime": 2, "generators": [{"name": "a", "degree": 0}], "actions": [{"op": "Sq^1", "src": "z", "dst": "a"}]},
    {"prime": 2, "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 2}],
     "actions": [{"op": "Sq^1", "src": "a", "dst": "b"}]},
    {"prime": 3, "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}],
     "actions": [{"op": "beta", "src": "a", "dst": "b"}, {"op": "beta", "src": "a", "dst": "b"}]},
    {"prime": 2, "generators": [{"name": "a", "degree": 0}], "actions": [{"op": "beta", "src": "a", "dst": {}}]},
    {"prime": 2, "generators": [{"name": "a", "degree": 3}], "window": [0, 1]},
])
def test_bad_descriptions(doc):
    with pytest.raises(DescriptionError):
        io.parse_description(json.dumps(doc))


def test_validation_error_carries_the_report():
    with pytest.raises(ValidationError) as exc:
        io.parse_description(json.dumps(SQ1_DEFECT))
    assert len(exc.value.report) == 1 and exc.value.prime == 2


@given(st.sampled_from([2, 3, 5]), st.integers(0, 5000))
def test_description_round_trip(p, seed):
    M = fixtures.random_module(p, seed)
    back = io.parse_description(io.description_text(M))
    assert back.prime == M.prime and back.window == M.window
    assert {(t, str(n)): {str(k): c for k, c in img.items()} for (t, n), img in M.action.items()} == back.action


def test_chart_round_trip():
    chart = ext_chart(trivial_module(2), 3, 10)
    text = io.chart_text(chart)
    lines = text.splitlines()
    assert lines[0] == "#singerlab-chart v1"
    rows = [tuple(int(x) for x in line.split("\t")[:2]) for line in lines[1:]]
    assert rows == sorted(rows)
    assert {k: v[0] for k, v in io.read_chart(text).items()} == chart.dims


# --- command line ------------------------------------------------------------------

def test_rplus(capsys, files):
    code, out, _ = run(capsys, "rplus", "--input", files("f2.json", F2), "--min-filtration", "0",
                       "--degree-window", "1:4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "#singerlab-rplus v1"
    basis = lines[lines.index("#basis") + 1: lines.index("#action")]
    assert len(basis) == 4


def test_rplus_prime_mismatch(capsys, files):
    code, _, err = run(capsys, "rplus", "--input", files("f2.json", F2), "--prime", "3",
                       "--min-filtration", "0", "--degree-window", "0:3")
    assert code == 2 and "prime" in err


def test_ext_chart_output(capsys, files):
    code, out, _ = run(capsys, "ext", "--input", files("f2.json", F2), "--max-s", "3", "--max-t", "8")
    assert code == 0
    assert io.read_chart(out).keys() == ext_chart(trivial_module(2), 3, 8).dims.keys()


def test_ext_tower_output(capsys, files):
    code, out, _ = run(capsys, "ext", "--input", files("f2.json", F2), "--max-s", "2", "--max-t", "6",
                       "--tower", "0:-24:2", "--confirm", "8")
    assert code == 0
    chart = io.read_chart(out)
    want = ext_chart(trivial_module(2), 2, 6).restrict(2, 6, 4)
    assert {k: v[0] for k, v in chart.items()} == want.dims
    assert "#stage n=-24" in out and "# stable s=0 t=0" in out


def test_tower_must_run_downwards(capsys, files):
    code, _, _ = run(capsys, "ext", "--input", files("f2.json", F2), "--max-s", "2", "--max-t", "6",
                     "--tower", "-4:0")
    assert code == 2


def test_tate_e2(capsys, files):
    code, out, _ = run(capsys, "tate-e2", "--input", files("f2.json", F2), "--s-window", "-3:3",
                       "--t-window", "0:4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "#singerlab-page v1"
    assert [line.split("\t")[:3] for line in lines[1:8]] == [[str(s), "0", "1"] for s in range(-3, 4)]
    assert "#collapse collapse certified" in lines
    assert sum(1 for line in lines if line.startswith("#rep")) == 7


def test_parse_errors_exit_2(capsys, files):
    code, _, err = run(capsys, "ext", "--input", files("mal.json", '{"prime": 2,\n "generators": ['),
                       "--max-s", "1", "--max-t", "2")
    assert code == 2 and "line" in err
    code, _, err = run(capsys, "ext", "--input", files("p3.json", SQ_AT_P3), "--max-s", "1", "--max-t", "2")
    assert code == 2 and "line 4, column 4" in err
    assert run(capsys, "ext", "--input", "/nonexistent.json", "--max-s", "1", "--max-t", "2")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "tate-e2", "--input", files("f2.json", F2), "--s-window", "x", "--t-window", "0:1")[0] == 2


def test_validation_failure_exit_3(capsys, files):
    code, _, err = run(capsys, "ext", "--input", files("bad.json", SQ1_DEFECT), "--max-s", "1", "--max-t", "3")
    assert code == 3 and "Sq^1 Sq^1" in err


def test_insufficient_window_exit_4(capsys, files):
    doc = dict(F2, window=[0, 4], truncated=True)
    code, _, err = run(capsys, "ext", "--input", files("tr.json", doc), "--max-s", "2", "--max-t", "8")
    assert code == 4 and "horizon 4" in err


def test_verify(capsys, files):
    code, out, _ = run(capsys, "verify", "coeffs", "--prime", "7")
    assert code == 0 and out.startswith("coeffs p=7 seed=0: PASS")
    code, out, _ = run(capsys, "verify", "adem", "--prime", "2", "--corrupt")
    assert code == 1 and "FAIL" in out
    code, out, _ = run(capsys, "verify", "adem", "--input", files("bad.json", SQ1_DEFECT))
    assert code == 1
    assert run(capsys, "verify", "omega", "--corrupt")[0] == 2


def test_bad_thread_setting(capsys, monkeypatch):
    monkeypatch.setenv("SINGERLAB_THREADS", "many")
    assert run(capsys, "verify", "coeffs", "--prime", "3")[0] == 2


def test_console_script(tmp_path):
    (tmp_path / "f2.json").write_text(json.dumps(F2))
    out = subprocess.run([sys.executable, "-m", "singerlab.cli", "ext", "--input", "f2.json", "--max-s", "1",
                          "--max-t", "4"], cwd=tmp_path, capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("#singerlab-chart v1\n0\t0\t1\t")


# --- threads -----------------------------------------------------------------------

def test_thread_count(monkeypatch):
    monkeypatch.setenv("SINGERLAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("SINGERLAB_THREADS", "0")
    assert thread_count() == (os.cpu_count() or 1)
    monkeypatch.setenv("SINGERLAB_THREADS", "-1")
    with pytest.raises(ValueError):
        thread_count()


@pytest.mark.parametrize("threads", ["1", "8"])
def test_pmap_keeps_order(monkeypatch, threads):
    monkeypatch.setenv("SINGERLAB_THREADS", threads)
    assert pmap(lambda x: x * x, range(50)) == [x * x for x in range(50)]


def test_outputs_do_not_depend_on_threads(capsys, files, monkeypatch):
    path = files("f2.json", F2)
    outs = []
    for threads in ("1", "8"):
        monkeypatch.setenv("SINGERLAB_THREADS", threads)
        outs.append(run(capsys, "ext", "--input", path, "--max-s", "2", "--max-t", "6", "--tower", "0:-12:2",
                        "--confirm", "4")[1])
    assert outs[0] == outs[1]
