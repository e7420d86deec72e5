import json

import numpy as np

import seqdisc
from seqdisc.serialize import read_json, render_csv, render_json, write_sidecar, write_text
from seqdisc.verify import run_verify, verify_injected_c


def test_csv_layout():
    text = render_csv(("a", "b", "c"), [(1, 0.1 + 0.2, True), (np.int64(2), np.float64(1 / 3), "x")],
                      {"seed": 5, "n": 3})
    lines = text.split("\n")
    assert lines[0] == f"# tool: seqdisc {seqdisc.__version__}"
    assert json.loads(lines[1][len("# config: "):]) == {"n": 3, "seed": 5}
    assert lines[2] == "# seed: 5"
    assert lines[3] == "a,b,c"
    assert lines[4] == "1,0.3,true"
    assert lines[5] == "2,0.333333333333,x"
    assert text.endswith("\n") and "\r" not in text


def test_json_payload_and_sidecar(tmp_path):
    text = render_json({"x": np.arange(3), "ok": np.bool_(True)}, {"seed": 9})
    path = tmp_path / "out.json"
    write_text(path, text)
    write_sidecar(path, {"seed": 9})
    payload = read_json(path)
    assert payload["data"] == {"x": [0, 1, 2], "ok": True}
    assert payload["seed"] == 9 and payload["version"] == seqdisc.__version__
    meta = read_json(f"{path}.meta.json")
    assert "created" in meta and "created" not in payload


def test_verify_records():
    records, ok = run_verify([(3, 0.5, 0.5)], [(3, 1, 0.2, 0.6, 0.04, 0.36)])
    assert ok
    names = {r["invariant"] for r in records}
    assert {"boundary_min_eigenvalue", "analytic_spectrum", "class_floors"} <= names
    bad = verify_injected_c(3, 0.5, 0.8)[0]
    assert not bad["pass"] and bad["value"] < 0


def test_public_api():
    fam = seqdisc.build_equal_overlap(3, 0.25)
    assert seqdisc.build_measurement(fam, 0.5).t == 0.5
    assert set(seqdisc.__all__) <= set(dir(seqdisc))
