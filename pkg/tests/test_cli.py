import csv
import hashlib
import json
import math

import numpy as np

from diracsp import load_complex
from diracsp.cli import main


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_generate_smallest_complex(tmp_path, capsys):
    out = tmp_path / "c.txt"
    assert main(["generate", "--triangles", "1", "--out", str(out)]) == 0
    assert out.read_text() == "0 1 2\n"
    assert "N=3 E=3 T=1" in capsys.readouterr().out


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        assert main(["generate", "--triangles", "25", "--seed", "4", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_zero_triangles(tmp_path, capsys):
    rc = main(["generate", "--triangles", "0", "--out", str(tmp_path / "c.txt")])
    assert rc == 1
    assert "usage error" in capsys.readouterr().err


def test_generate_load_dump_roundtrip(tmp_path):
    first = tmp_path / "c.txt"
    assert main(["generate", "--triangles", "12", "--seed", "1", "--out", str(first)]) == 0
    complex = load_complex(first)
    assert complex.num_triangles == 12
    from diracsp import dump_complex
    second = tmp_path / "again.txt"
    dump_complex(complex, second)
    assert first.read_bytes() == second.read_bytes()


def test_spectrum_filled_triangle(tmp_path):
    cpath = _write(tmp_path / "c.txt", "0 1 2\n")
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--complex", cpath, "--normalization", "none",
                 "--out", str(out)]) == 0
    rows = _read_rows(out)
    assert rows[0][:3] == ["family", "alignment", "eigenvalue"]
    assert len(rows) == 8
    evs = [float(r[2]) for r in rows[1:]]
    assert evs == sorted(evs)
    root3 = math.sqrt(3.0)
    assert abs(evs[0] + root3) <= 1e-6
    assert abs(evs[-1] - root3) <= 1e-6


def test_spectrum_normalized_eigenvalues_bounded(tmp_path):
    cpath = tmp_path / "c.txt"
    assert main(["generate", "--triangles", "30", "--seed", "2", "--out", str(cpath)]) == 0
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--complex", str(cpath), "--out", str(out)]) == 0
    evs = [float(r[2]) for r in _read_rows(out)[1:]]
    assert max(abs(e) for e in evs) <= 1.0 + 1e-12


def test_spectrum_rejects_malformed_complex(tmp_path, capsys):
    cpath = _write(tmp_path / "bad.txt", "0 0 1\n")
    rc = main(["spectrum", "--complex", cpath, "--out", str(tmp_path / "s.csv")])
    assert rc == 2
    assert "line 1" in capsys.readouterr().err


def test_missing_complex_file_exits_2(tmp_path, capsys):
    rc = main(["spectrum", "--complex", str(tmp_path / "nope.txt"),
               "--out", str(tmp_path / "s.csv")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_filter_gamma_zero_returns_input(tmp_path):
    cpath = _write(tmp_path / "c.txt", "0 1 2\n")
    spath = _write(tmp_path / "s.csv",
                   "simplex,value\nv0,1.5\ne0-1,-0.25\nt0-1-2,2\n")
    out = tmp_path / "out.csv"
    assert main(["filter", "--complex", cpath, "--signal", spath,
                 "--z", "0.5", "--gamma", "0", "--out", str(out)]) == 0
    rows = _read_rows(out)
    assert rows[0] == ["simplex", "value"]
    got = {r[0]: r[1] for r in rows[1:]}
    assert got == {"v0": "1.5", "v1": "0", "v2": "0", "e0-1": "-0.25",
                   "e0-2": "0", "e1-2": "0", "t0-1-2": "2"}


def test_filter_passes_harmonic_signal(tmp_path):
    cpath = _write(tmp_path / "hollow.txt", "0 1\n0 2\n1 2\n")
    spath = _write(tmp_path / "s.csv",
                   "simplex,value\ne0-1,1\ne0-2,-1\ne1-2,1\n")
    out = tmp_path / "out.csv"
    assert main(["filter", "--complex", cpath, "--signal", spath,
                 "--z", "-0.5", "--gamma", "5", "--out", str(out)]) == 0
    got = {r[0]: float(r[1]) for r in _read_rows(out)[1:]}
    assert abs(got["e0-1"] - 1.0) <= 1e-10
    assert abs(got["e0-2"] + 1.0) <= 1e-10
    assert abs(got["e1-2"] - 1.0) <= 1e-10
    assert abs(got["v0"]) <= 1e-10


def test_filter_rejects_z_outside_open_interval(tmp_path, capsys):
    cpath = _write(tmp_path / "c.txt", "0 1 2\n")
    spath = _write(tmp_path / "s.csv", "simplex,value\nv0,1\n")
    rc = main(["filter", "--complex", cpath, "--signal", spath,
               "--z", "1.0", "--gamma", "1", "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "usage error" in capsys.readouterr().err


def test_filter_rejects_unknown_simplex(tmp_path, capsys):
    cpath = _write(tmp_path / "c.txt", "0 1 2\n")
    spath = _write(tmp_path / "s.csv", "simplex,value\nv9,1\n")
    rc = main(["filter", "--complex", cpath, "--signal", spath,
               "--z", "0", "--gamma", "1", "--out", str(tmp_path / "o.csv")])
    assert rc == 2
    assert "line 2" in capsys.readouterr().err


def test_filter_writes_manifest(tmp_path):
    cpath = _write(tmp_path / "c.txt", "0 1 2\n")
    spath = _write(tmp_path / "s.csv", "simplex,value\ne0-1,1\n")
    out = tmp_path / "out.csv"
    assert main(["filter", "--complex", cpath, "--signal", spath,
                 "--z", "-0.95", "--gamma", "2.82", "--out", str(out)]) == 0
    doc = json.loads((tmp_path / "out.csv.manifest.json").read_text())
    assert doc["command"] == "filter"
    assert doc["parameters"]["gamma"] == 2.82
    assert doc["version"]
    digest = hashlib.sha256((tmp_path / "c.txt").read_bytes()).hexdigest()
    assert doc["inputs"][cpath] == digest
    assert spath in doc["inputs"]
    assert doc["results"]["solve_residual"] >= 0.0


def test_decompose_components_sum_to_signal(tmp_path):
    cpath = tmp_path / "c.txt"
    assert main(["generate", "--triangles", "8", "--seed", "3", "--out", str(cpath)]) == 0
    complex = load_complex(cpath)
    from diracsp import simplex_labels
    rng = np.random.default_rng(0)
    lines = ["simplex,value"]
    values = {}
    for label in simplex_labels(complex):
        values[label] = float(rng.standard_normal())
        lines.append("%s,%.12g" % (label, values[label]))
    spath = _write(tmp_path / "s.csv", "\n".join(lines) + "\n")
    out = tmp_path / "parts.csv"
    assert main(["decompose", "--complex", str(cpath), "--signal", spath,
                 "--out", str(out)]) == 0
    rows = _read_rows(out)
    assert rows[0] == ["simplex", "s1", "s2", "s_harm"]
    for label, a, b, c in rows[1:]:
        total = float(a) + float(b) + float(c)
        assert abs(total - values[label]) <= 1e-10


def test_experiment_cli_runs_and_is_deterministic(tmp_path):
    args = ["experiment", "--triangles", "20", "--ngf-seed", "5",
            "--variant", "1", "--z-list=-0.5,0.5", "--gamma-grid", "0.1,1",
            "--realizations", "3", "--seed", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _read_rows(a)
    assert rows[0] == ["z", "gamma", "mean_delta", "std_delta"]
    assert len(rows) == 5
    doc = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert doc["command"] == "experiment"
    assert doc["seeds"] == {"master_seed": 2, "ngf_seed": 5}
    assert doc["parameters"]["z_list"] == [-0.5, 0.5]


def test_experiment_cli_matched_filter_wins(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["experiment", "--triangles", "50", "--ngf-seed", "7",
                 "--variant", "1", "--realizations", "20", "--out", str(out)]) == 0
    mins = {}
    for row in _read_rows(out)[1:]:
        z, mean = float(row[0]), float(row[2])
        mins[z] = min(mins.get(z, np.inf), mean)
    assert mins[-0.95] < mins[0.0] < mins[0.95]
    printed = capsys.readouterr().out
    assert printed.count("min mean_delta") == 3


def test_experiment_requires_a_source(capsys):
    assert main(["experiment", "--out", "x.csv"]) == 1
    assert "usage error" in capsys.readouterr().err


def test_no_command_is_a_usage_error(capsys):
    assert main([]) == 1
    assert "usage error" in capsys.readouterr().err
