import json
import os

import numpy as np
import pytest

from ergmbayes import __version__, example_path
from ergmbayes.cli import main
from ergmbayes.graph import read_edge_list
from ergmbayes.tables import read_draws, write_draws

SMALL = "n 5 undirected\n0 1\n1 2\n0 2\n2 3\n3 4\n"
ATTRS = "a\nx\nx\ny\ny\nx\n"


@pytest.fixture
def files(tmp_path):
    net = tmp_path / "net.edges"
    net.write_text(SMALL)
    attrs = tmp_path / "net.attrs"
    attrs.write_text(ATTRS)
    return str(net), str(attrs), tmp_path


def run(*argv):
    return main([str(a) for a in argv])


FIT = ["--burn-in", 5, "--main-iters", 15, "--aux-iters", 200, "--nchains", 3]


def test_fit_writes_artifacts(files, capsys):
    net, attrs, tmp = files
    out = tmp / "fit"
    assert run("fit", "--network", net, "--attrs", attrs, "--model", "edges + nodematch(a)",
               "--seed", 1, "--out", out, *FIT) == 0
    assert sorted(os.listdir(out)) == ["draws.tsv", "metadata.json", "summary.txt", "trace.svg"]
    head = (out / "draws.tsv").read_text().splitlines()[0].split("\t")
    assert head == ["chain", "iter", "theta_1", "theta_2"]
    assert read_draws(out / "draws.tsv").shape == (3, 15, 2)
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["seed"] == 1 and meta["version"] == __version__
    assert meta["labels"] == ["edges", "nodematch.a"]
    assert meta["config"]["burn_in"] == 5
    text = capsys.readouterr().out
    assert "theta2 (nodematch.a)" in text and "Acceptance rate:" in text
    assert (out / "trace.svg").read_text().lstrip().startswith("<?xml")


def test_fit_seed_recorded_when_omitted(files):
    net, _, tmp = files
    assert run("fit", "--network", net, "--model", "edges", "--out", tmp / "o", "--no-plots",
               *FIT) == 0
    assert isinstance(json.loads((tmp / "o" / "metadata.json").read_text())["seed"], int)


def test_output_dir_from_environment(files, monkeypatch):
    net, _, tmp = files
    monkeypatch.setenv("ERGMBAYES_OUT", str(tmp / "envout"))
    assert run("fit", "--network", net, "--model", "edges", "--seed", 2, "--no-plots",
               *FIT) == 0
    assert (tmp / "envout" / "draws.tsv").exists()


def test_summary_constant_column(tmp_path, capsys):
    draws = tmp_path / "draws.tsv"
    vals = np.zeros((2, 30, 2))
    vals[..., 0] = 0.75
    vals[..., 1] = np.random.default_rng(0).normal(size=(2, 30))
    write_draws(draws, vals)
    assert run("summary", "--draws", draws) == 0
    text = capsys.readouterr().out
    row = next(line for line in text.splitlines() if line.startswith("theta1"))
    assert row.split()[-3:] == ["0.7500000", "0.0000000", "0.000000000"]


def test_summary_writes_plots(files, capsys):
    net, _, tmp = files
    run("fit", "--network", net, "--model", "edges", "--seed", 3, "--out", tmp / "f",
        "--no-plots", *FIT)
    assert run("summary", "--draws", tmp / "f" / "draws.tsv", "--plots", "--out", tmp / "s") == 0
    assert (tmp / "s" / "trace.svg").exists() and (tmp / "s" / "summary.txt").exists()
    assert "Acceptance rate:" in capsys.readouterr().out


def test_gof_uses_metadata_beside_draws(files, capsys):
    net, attrs, tmp = files
    run("fit", "--network", net, "--attrs", attrs, "--model", "edges + nodematch(a)",
        "--seed", 4, "--out", tmp / "f", "--no-plots", *FIT)
    assert run("gof", "--draws", tmp / "f" / "draws.tsv", "--nsim", 10, "--aux-iters", 200,
               "--n-deg", 4, "--n-dist", 4, "--n-esp", 3, "--seed", 5, "--out", tmp / "g") == 0
    assert {"gof_degree.tsv", "gof_geodesic.tsv", "gof_esp.tsv", "gof.svg"} <= set(
        os.listdir(tmp / "g"))
    geo = (tmp / "g" / "gof_geodesic.tsv").read_text().splitlines()
    assert geo[0] == "bin\tobserved\tq05\tq50\tq95"
    assert [line.split("\t")[0] for line in geo[1:]] == ["1", "2", "3", "4", "Inf"]
    assert "coverage" in capsys.readouterr().out


def test_simulate_from_empty_graph(tmp_path):
    out = tmp_path / "sim"
    assert run("simulate", "--nodes", 12, "--model", "edges + triangle", "--theta", "-2,0.1",
               "--nsim", 3, "--aux-iters", 500, "--thin", 100, "--seed", 9, "--out", out) == 0
    rows = (out / "stats.tsv").read_text().splitlines()
    assert rows[0] == "draw\tedges\ttriangle" and len(rows) == 4
    g = read_edge_list(out / "network_0003.edges")
    assert g.n == 12 and float(rows[3].split("\t")[1]) == g.edge_count


def test_calibrate(files):
    net, attrs, tmp = files
    out = tmp / "cal"
    assert run("calibrate", "--network", net, "--attrs", attrs, "--model", "edges + nodematch(a)",
               "--iters", 30, "--aux-iters", 100, "--noisy-nsim", 20, "--noisy-thin", 10,
               "--mcmc", 200, "--hessian-nsim", 100, "--seed", 3, "--out", out,
               "--no-plots") == 0
    assert read_draws(out / "draws.tsv").shape == (1, 200, 2)
    assert read_draws(out / "pseudo_draws.tsv").shape == (1, 200, 2)
    meta = json.loads((out / "metadata.json").read_text())
    assert np.array(meta["V"]).shape == (2, 2)


def test_import_csv(tmp_path):
    (tmp_path / "e.csv").write_text('"","from","to"\n"1",1,2\n"2",2,3\n"3",3,1\n')
    (tmp_path / "v.csv").write_text('"","Grade","Sex"\n"1",7,"F"\n"2",8,"M"\n"3",7,"M"\n')
    prefix = tmp_path / "mesa"
    assert run("import", "--edges", tmp_path / "e.csv", "--vertices", tmp_path / "v.csv",
               "--drop", "", "--prefix", prefix) == 0
    g = read_edge_list(str(prefix) + ".edges")
    assert g.edge_list() == [(0, 1), (0, 2), (1, 2)]
    assert (tmp_path / "mesa.attrs").read_text().splitlines()[0].split("\t")[-2:] == \
        ["Grade", "Sex"]


def test_dev_oracle(files, capsys):
    net, _, _ = files
    assert run("dev", "logz", "--nodes", 4, "--model", "edges", "--theta", 0) == 0
    assert float(capsys.readouterr().out) == pytest.approx(6 * np.log(2))
    assert run("dev", "grid", "--network", net, "--model", "edges", "--bounds", "-6:6",
               "--num", 401) == 0
    line = capsys.readouterr().out.splitlines()[1].split("\t")
    assert line[0] == "edges" and abs(float(line[1])) < 1e-6


def test_bundled_example_loads():
    g = read_edge_list(example_path("school.edges"))
    assert g.n == 90 and g.edge_count == 97


@pytest.mark.parametrize("argv, message", [
    (["fit", "--network", "missing.edges", "--model", "edges"], "missing.edges"),
    (["fit", "--network", "{net}", "--model", "edges + nodematch(Grade)"], "Grade"),
    (["fit", "--network", "{net}", "--model", "edges + bogus"], "unknown term"),
    (["simulate", "--nodes", "5", "--model", "edges", "--theta", "1,2"], "2 values"),
    (["fit", "--network", "{net}", "--model", "edges", "--prior-sd", "0"], "positive"),
])
def test_errors_exit_nonzero(files, capsys, argv, message):
    net, _, tmp = files
    argv = [a.format(net=net) for a in argv] + ["--out", str(tmp / "x")]
    assert main(argv) == 1
    assert message in capsys.readouterr().err


def test_usage_errors_and_version(capsys):
    with pytest.raises(SystemExit) as err:
        main(["fit", "--bogus"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert __version__ in capsys.readouterr().out
