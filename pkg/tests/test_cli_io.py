import json

import pytest

from schreier_lab import experiments, io
from schreier_lab.cli import main
from schreier_lab.errors import NonPlanarKind
from schreier_lab.lattice import build_grid_d
from schreier_lab.render import parse_slice, render_svg


def gen(tmp_path, *args, name="dec.json"):
    out = tmp_path / name
    code = main(["generate", *args, "--out", str(out)])
    return code, out


def test_generate_verify_round_trip(tmp_path, capsys):
    code, out = gen(tmp_path, "--pipeline", "t3464", "--dims", "16x16", "--seed", "1")
    assert code == 0
    assert "retries=0" in capsys.readouterr().out
    assert main(["verify", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1 and {e["colour"] for e in doc["edges"]} == {1, 2}


@pytest.mark.parametrize("pipeline,dims", [("square", "32x32"), ("kagome", "16x16"),
                                           ("triangular", "32x32"), ("planar", "24x24"),
                                           ("product", "12"), ("square_diag", "16x16")])
def test_replay_is_byte_identical(tmp_path, pipeline, dims):
    c1, a = gen(tmp_path, "--pipeline", pipeline, "--dims", dims, "--seed", "7", name="a.json")
    c2, b = gen(tmp_path, "--pipeline", pipeline, "--dims", dims, "--seed", "7", name="b.json")
    assert c1 == c2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["verify", str(a)]) == 0
    g, dec = io.load_decoration(a)
    assert dec.dumps(g) + "\n" == a.read_text()


def test_tampered_file_fails_with_witness(tmp_path, capsys):
    _, out = gen(tmp_path, "--pipeline", "square", "--dims", "16x16")
    doc = json.loads(out.read_text())
    e = doc["edges"][10]
    e["tail"], e["head"] = e["head"], e["tail"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(bad)]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["checks"]["schreier"]["witness"]["vertex"] in (e["tail"], e["head"])


def test_malformed_inputs_exit_2(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"schema": 1, "edges": [')
    assert main(["verify", str(bad)]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    wrong = tmp_path / "schema.json"
    wrong.write_text('{"schema": 9}')
    assert main(["verify", str(wrong)]) == 2


def test_precondition_violations_exit_2(tmp_path):
    assert gen(tmp_path, "--pipeline", "kagome", "--dims", "2x2")[0] == 2
    assert gen(tmp_path, "--pipeline", "square", "--dims", "9x8")[0] == 2
    assert gen(tmp_path, "--pipeline", "square", "--dims", "axb")[0] == 2
    assert gen(tmp_path, "--pipeline", "product", "--kind", "K7", "--dims", "12")[0] == 2


def test_retries_exhausted_exit_3(tmp_path):
    # with no retries allowed, any rejected first trial exhausts the budget
    codes = {gen(tmp_path, "--pipeline", "planar", "--kind", "square", "--dims", "8x8",
                 "--max-retries", "0", "--seed", str(s))[0] for s in range(12)}
    assert 3 in codes and codes <= {0, 3}


def test_dump_hierarchy_and_render(tmp_path):
    hpath, svg = tmp_path / "h.json", tmp_path / "d.svg"
    code, out = gen(tmp_path, "--pipeline", "square", "--dims", "16x16", "--dump-hierarchy", str(hpath),
                    "--render", str(svg))
    assert code == 0
    tree = json.loads(hpath.read_text())
    assert sum(len(c["vertices"]) for c in tree["clusters"]) == 256
    text = svg.read_text()
    assert text.count('class="edge"') == 512
    svg2 = tmp_path / "again.svg"
    assert main(["render", str(out), "--out", str(svg2)]) == 0
    assert svg2.read_bytes() == svg.read_bytes()


def test_render_slices_of_three_dimensional_grids(tmp_path):
    code, out = gen(tmp_path, "--pipeline", "grid_d", "--dims", "24", "--d", "3", "--k", "3")
    assert code == 0
    assert main(["render", str(out), "--out", str(tmp_path / "x.svg")]) == 2
    assert main(["render", str(out), "--out", str(tmp_path / "x.svg"), "--slice", "z=3"]) == 0
    assert (tmp_path / "x.svg").read_text().count('class="edge"') == 2 * 24 * 24
    g, dec = io.load_decoration(out)
    with pytest.raises(NonPlanarKind):
        render_svg(g, dec)
    assert parse_slice("z=2", 4) == {2: 2, 3: 0}


def test_experiment_suites(capsys):
    assert main(["experiment", "--suite", "no-such-suite"]) == 2
    assert main(["experiment", "--suite", "oracle-prop23"]) == 0
    out = capsys.readouterr().out
    assert "548 orientations" in out and "2116 orientations" in out


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("SCHREIER_LAB_THREADS", "1")
    assert experiments.worker_count() == 1
    monkeypatch.delenv("SCHREIER_LAB_THREADS")
    assert experiments.worker_count() >= 1


def test_run_seeds_parallel_matches_serial():
    serial = experiments.run_seeds(experiments._determinism_seed, range(2), workers=1)
    parallel = experiments.run_seeds(experiments._determinism_seed, range(2), workers=2)
    assert serial == parallel


def test_atomic_write_leaves_no_temp_files(tmp_path):
    io.write_atomic(tmp_path / "a" / "f.txt", "hello")
    assert [p.name for p in (tmp_path / "a").iterdir()] == ["f.txt"]
