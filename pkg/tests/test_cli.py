import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from vtrkit.cli import SEED_ENV, main
from vtrkit.render.config import EngineConfig


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def usage(capsys, *argv):
    with pytest.raises(SystemExit) as ei:
        main(list(argv))
    capsys.readouterr()
    return ei.value.code


def fixture_dataset(path):
    def marked(n_bad):
        return " ".join(["[[x]]"] * n_bad + ["ok"])

    pairs = [(2, 2), (2, 5), (0, 1), (1, 0), (0, 0)]
    rows = [{"id": f"r{i}", "level": "image", "language": "en", "gt": marked(g), "pred": marked(p)}
            for i, (g, p) in enumerate(pairs)]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


# -- score -----------------------------------------------------------------------

def test_score_examples(capsys):
    code, out, _ = run(capsys, "score", "--target", "hello", "--pred", "hello")
    assert code == 0 and "reward   1.0000" in out
    code, out, _ = run(capsys, "score", "--target", "cat", "--pred", "c[[a]]t")
    assert code == 0 and "reward   0.3333" in out
    assert usage(capsys, "score", "--target", "cat") == 2


def test_score_map_and_baseline(capsys):
    code, out, _ = run(capsys, "score", "--target", "cat", "--pred", "c[[a]]t", "--omega", "1", "--baseline",
                       "--format", "map")
    d = json.loads(out)
    assert code == 0 and d["omega"] == 1.0 and d["quality"] == pytest.approx(2 / 3)
    assert d["baseline"] == 1.0  # the marked character still reads as 'a'


def test_score_errors(capsys):
    code, _, err = run(capsys, "score", "--target", "cat", "--pred", "[[x")
    assert code == 1 and "offset 0" in err
    assert usage(capsys, "score", "--target", "a", "--pred", "a", "--omega", "-2") == 2
    assert usage(capsys, "score", "--target", "a", "--pred", "a", "--lang", "fr") == 2


# -- eval ------------------------------------------------------------------------

def test_eval_fixture(capsys, tmp_path):
    path = fixture_dataset(tmp_path / "d.jsonl")
    code, out, _ = run(capsys, "eval", "--dataset", str(path))
    assert code == 0 and out.count("0.3333") == 3 and "delta=0.7" in out
    code, out, _ = run(capsys, "eval", "--dataset", str(path), "--format", "map")
    (rep,) = json.loads(out)
    assert rep["delta"] == 0.7 and rep["tsap"]["precision"] == pytest.approx(1 / 3)


def test_eval_errors(capsys, tmp_path):
    path = fixture_dataset(tmp_path / "d.jsonl")
    code, _, err = run(capsys, "eval", "--dataset", str(path), "--level", "box")
    assert code == 1 and "no records" in err
    bad = tmp_path / "bad.jsonl"
    bad.write_text(path.read_text() + "{oops\n")
    code, _, err = run(capsys, "eval", "--dataset", str(bad))
    assert code == 1 and "line 6" in err
    code, _, _ = run(capsys, "eval", "--dataset", str(tmp_path / "missing.jsonl"))
    assert code == 1
    assert usage(capsys, "eval") == 2
    assert usage(capsys, "eval", "--dataset", str(path), "--delta", "0") == 2


# -- synth -----------------------------------------------------------------------

SMALL = {"canvas_size": [320, 320], "elements_per_sample": [1, 3], "text_len": [1, 5], "font_size_px": [24, 36],
         "h_spacing_px": [10, 20], "margin_px": 8}


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL))
    return p


def test_synth_deterministic(capsys, tmp_path, small_config, monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    for name in ("a", "b"):
        code, _, _ = run(capsys, "synth", "--config", str(small_config), "--n", "4", "--seed", "7",
                         "--out", str(tmp_path / name))
        assert code == 0
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert a == b and a["seed"] == 7 and a["n_samples"] == 4


def test_synth_env_seed_overrides(capsys, tmp_path, small_config, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "11")
    code, out, _ = run(capsys, "synth", "--config", str(small_config), "--n", "1", "--seed", "7",
                       "--out", str(tmp_path / "e"), "--format", "map")
    assert code == 0 and json.loads(out)["seed"] == 11


def test_synth_empty_and_defaults(capsys, tmp_path):
    code, out, err = run(capsys, "synth", "--n", "0", "--out", str(tmp_path / "z"), "--format", "map")
    m = json.loads((tmp_path / "z" / "manifest.json").read_text())
    assert code == 0 and m["n_samples"] == 0 and (tmp_path / "z" / "labels.jsonl").read_text() == ""
    assert m["config"] == EngineConfig(seed=m["seed"]).to_dict()
    assert json.loads(out)["missing_characters"] == ["见"]


def test_synth_errors(capsys, tmp_path, small_config):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "synth", "--config", str(small_config), "--n", "1", "--out", str(blocker / "sub"))
    assert code == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"flow_prob": 0.3}))
    code, _, err = run(capsys, "synth", "--config", str(bad), "--n", "1", "--out", str(tmp_path / "o"))
    assert code == 1 and "flow_prob" in err
    assert usage(capsys, "synth", "--n", "1") == 2


# -- inspect ---------------------------------------------------------------------

def test_inspect_delete(capsys, tmp_path):
    args = ("inspect", "--glyph", "国", "--op", "delete", "--seed", "3", "--out", str(tmp_path), "--format", "map")
    code, out, _ = run(capsys, *args)
    d = json.loads(out)
    (op,) = d["operations"]
    assert code == 0 and d["strokes_before"] == 8 and op["kind"] == "delete"
    assert d["strokes_after"] == 8 - len(op["strokes"])
    assert (tmp_path / "before.png").exists() and (tmp_path / "after.png").exists()
    assert run(capsys, *args)[1] == out


def test_inspect_errors(capsys, tmp_path):
    code, _, err = run(capsys, "inspect", "--glyph", "一", "--op", "swap", "--out", str(tmp_path))
    assert code == 1 and "swap" in err
    code, _, err = run(capsys, "inspect", "--glyph", "鬱", "--out", str(tmp_path))
    assert code == 1 and "not in the stroke database" in err


# -- serve -----------------------------------------------------------------------

def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_healthy(url, proc, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if proc.poll() is not None:
            raise AssertionError(f"server exited with {proc.returncode}")
        try:
            return httpx.get(url, timeout=1.0).json()
        except httpx.HTTPError:
            time.sleep(0.2)
    raise AssertionError("server did not come up")


@pytest.mark.slow
def test_serve_health_and_occupied_port():
    port = free_port()
    cmd = [sys.executable, "-m", "vtrkit", "serve", "--port", str(port), "--omega", "1", "--log-level", "warning"]
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
    try:
        h = wait_healthy(f"http://127.0.0.1:{port}/healthz", proc)
        assert h["status"] == "ok" and h["omega"] == 1.0
        r = httpx.post(f"http://127.0.0.1:{port}/score", json={"target": "cat", "prediction": "c[[a]]t",
                                                                 "language": "en"})
        assert r.json()["quality"] == pytest.approx(2 / 3)
        second = subprocess.run(cmd, capture_output=True, text=True, timeout=60)
        assert second.returncode == 1 and "cannot bind" in second.stderr
    finally:
        proc.terminate()
        proc.wait(timeout=10)
