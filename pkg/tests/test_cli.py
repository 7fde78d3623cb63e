"""Driver tests: every subcommand end to end over real files, exit codes,
report stability, trace replay, and the environment budget cap."""

import json

import pytest

from tmh import tm
from tmh.cli import main
from tmh.graphs import Graph, parse_graph
from tmh.annulus import synthetic_annulus
from tmh.linkage import Linkage, _sub_annulus
from tmh.tm import BUILTIN_PATTERNS
from tmh.io import (
    build_annulus,
    build_disk_host,
    emit_annulus_index,
    emit_embedding,
    emit_graph,
    emit_linkage,
    normalize_graph,
    parse_linkage,
    report_core,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    report = json.loads(captured.out) if captured.out else None
    return code, report, captured.err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")

    def write(name, text):
        p = root / name
        p.write_text(text)
        return str(p)

    k4 = write("k4.txt", emit_graph(BUILTIN_PATTERNS["K4"]()))
    p5 = write("p5.txt", "5 4\n0 1\n1 2\n2 3\n3 4\n")
    bad = write("bad.txt", "not a graph\n")

    full = synthetic_annulus(13, 7)
    band = _sub_annulus(full, 2, 12)
    paths = {
        "k4": k4, "p5": p5, "bad": bad, "root": str(root),
        "band_graph": write("band.graph.txt",
                            emit_graph(full.embedding.graph)),
        "band_emb": write("band.emb.txt", emit_embedding(full.embedding)),
        "band_ann": write("band.ann.txt", emit_annulus_index(band)),
        "band_lnk": write("band.lnk.txt",
                          emit_linkage(Linkage([full.rails[1]]))),
    }
    paths["band_obj"] = band
    return paths


@pytest.fixture(scope="module")
def disk_bundle(tmp_path_factory):
    root = tmp_path_factory.mktemp("gen")
    prefix = str(root / "a21")
    code = main(["gen-annulus", "--r", "21", "--q", "3",
                 "--out-prefix", prefix])
    assert code == 0
    return {"graph": prefix + ".graph.txt", "emb": prefix + ".emb.txt",
            "ann": prefix + ".ann.txt", "prefix": prefix, "root": str(root)}


class TestCheckTm:
    def test_absent(self, files, capsys):
        code, rep, _ = run(capsys, "check-tm", "--graph", files["p5"],
                           "--pattern", "K3")
        assert code == 1
        assert rep["outcome"]["outcome"] == "absent"

    def test_present(self, files, capsys):
        code, rep, _ = run(capsys, "check-tm", "--graph", files["k4"],
                           "--pattern", "K3")
        assert code == 0
        assert rep["outcome"]["outcome"] == "present"


class TestSolve:
    def test_yes_with_witness(self, files, capsys):
        code, rep, _ = run(capsys, "solve", "--graph", files["k4"],
                           "--patterns", "K4", "--k", "1")
        assert code == 0
        assert rep["outcome"]["answer"] == "yes"
        assert len(rep["outcome"]["witness"]) == 1

    def test_no(self, files, capsys):
        code, rep, _ = run(capsys, "solve", "--graph", files["k4"],
                           "--patterns", "K4", "--k", "0")
        assert code == 1
        assert rep["outcome"]["answer"] == "no"
        assert rep["outcome"]["witness"] is None

    def test_report_stable_modulo_timings(self, files, capsys):
        argv = ("solve", "--graph", files["k4"], "--patterns", "K3,K4",
                "--k", "2")
        _, _, _ = run(capsys, *argv)
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert report_core(json.dumps(first[1])) \
            == report_core(json.dumps(second[1]))


class TestTraceAndVerify:
    def test_replay_reports_all_verified(self, files, capsys, tmp_path):
        trace = str(tmp_path / "run.json")
        code, _, _ = run(capsys, "solve", "--graph", files["k4"],
                         "--patterns", "K4", "--k", "1", "--trace", trace)
        assert code == 0
        code, rep, _ = run(capsys, "verify", "--trace", trace,
                           "--graph", files["k4"])
        assert code == 0
        assert rep["outcome"]["statuses_match"] is True
        assert rep["outcome"]["all_verified"] is True

    def test_tampered_payload_is_a_parse_error(self, files, capsys, tmp_path):
        trace = tmp_path / "run.json"
        run(capsys, "solve", "--graph", files["k4"], "--patterns", "K4",
            "--k", "1", "--trace", str(trace))
        lines = trace.read_text().splitlines()
        lines[1] = lines[1].replace('"width": 3', '"width": 2')
        trace.write_text("\n".join(lines))
        code, rep, err = run(capsys, "verify", "--trace", str(trace),
                             "--graph", files["k4"])
        assert code == 65 and rep is None
        assert "digest mismatch" in err

    def test_flipped_status_diverges_at_replay(self, files, capsys,
                                               tmp_path):
        # the digest covers only the payload, so a rewritten status gets
        # past parsing and the replay comparison has to catch it
        trace = tmp_path / "run.json"
        run(capsys, "solve", "--graph", files["k4"], "--patterns", "K4",
            "--k", "1", "--trace", str(trace))
        lines = trace.read_text().splitlines()
        lines[1] = lines[1].replace('"status": "verified"',
                                    '"status": "unverified"', 1)
        trace.write_text("\n".join(lines))
        code, rep, err = run(capsys, "verify", "--trace", str(trace),
                             "--graph", files["k4"])
        assert code == 2
        assert rep["outcome"]["statuses_match"] is False
        assert "diverged" in err

    def test_wrong_graph_is_a_stage_failure(self, files, capsys, tmp_path):
        trace = str(tmp_path / "run.json")
        run(capsys, "solve", "--graph", files["k4"], "--patterns", "K4",
            "--k", "1", "--trace", trace)
        code, _, err = run(capsys, "verify", "--trace", trace,
                           "--graph", files["p5"])
        assert code == 2
        assert "does not match" in err


class TestGenAnnulus:
    def test_deterministic_given_seed(self, disk_bundle, capsys, tmp_path):
        prefix = str(tmp_path / "again")
        code, rep, _ = run(capsys, "gen-annulus", "--r", "21", "--q", "3",
                           "--out-prefix", prefix)
        assert code == 0
        with open(disk_bundle["graph"]) as fh:
            first = fh.read()
        with open(prefix + ".graph.txt") as fh:
            assert fh.read() == first

    def test_bundle_parses_back(self, disk_bundle):
        with open(disk_bundle["graph"]) as fh:
            g = parse_graph(fh.read())
        with open(disk_bundle["emb"]) as fh:
            host = build_disk_host(g, fh.read())
        with open(disk_bundle["ann"]) as fh:
            a = build_annulus(host.embedding, fh.read())
        assert (a.r, a.q) == (21, 3)
        assert set(host.boundary_cycle) == set(a.cycles.cycles[0])


class TestReduce:
    def test_empty_representatives(self, disk_bundle, capsys):
        code, rep, _ = run(capsys, "reduce",
                           "--graph", disk_bundle["graph"],
                           "--embedding", disk_bundle["emb"],
                           "--annulus", disk_bundle["ann"],
                           "--k", "1", "--h", "1", "--budget-f1", "0")
        assert code == 0
        assert rep["outcome"] == {"size": 0, "vertices": []}

    def test_shallow_annulus_fails_the_stage(self, capsys, tmp_path):
        prefix = str(tmp_path / "a13")
        run(capsys, "gen-annulus", "--r", "13", "--q", "3",
            "--out-prefix", prefix)
        code, rep, err = run(capsys, "reduce",
                             "--graph", prefix + ".graph.txt",
                             "--embedding", prefix + ".emb.txt",
                             "--annulus", prefix + ".ann.txt",
                             "--k", "1", "--h", "1", "--budget-f1", "0")
        assert code == 2 and rep is None
        assert "block partition" in err


class TestFindWall:
    def test_wall_branch_with_dot(self, capsys, tmp_path):
        from tmh.decomposition import build_elementary_wall
        w = build_elementary_wall(3)
        flat, _ = normalize_graph(w.host_subgraph)
        gpath = tmp_path / "wall3.txt"
        gpath.write_text(emit_graph(flat))
        dot = tmp_path / "wall3.dot"
        code, rep, _ = run(capsys, "find-wall", "--graph", str(gpath),
                           "--height", "3", "--dot", str(dot))
        assert code == 0
        assert rep["outcome"]["branch"] == "wall"
        assert 'class="perimeter"' in dot.read_text()

    def test_decomposition_branch(self, files, capsys):
        code, rep, _ = run(capsys, "find-wall", "--graph", files["k4"],
                           "--height", "3")
        assert code == 0
        assert rep["outcome"]["branch"] == "decomposition"
        assert rep["outcome"]["width"] == 3


class TestTame:
    def test_reroute_through_files(self, files, capsys, tmp_path):
        out = tmp_path / "tamed.lnk.txt"
        code, rep, _ = run(capsys, "tame",
                           "--graph", files["band_graph"],
                           "--embedding", files["band_emb"],
                           "--annulus", files["band_ann"],
                           "--linkage", files["band_lnk"],
                           "--band", "1", "--rails", "4",
                           "--budget-f1", "0", "--out", str(out))
        assert code == 0
        assert rep["outcome"]["outcome"] == "tamed"
        tamed = parse_linkage(out.read_text())
        band = files["band_obj"]
        assert band.confines(tamed.union_graph(), 1, (4,))


class TestBench:
    def test_seeded_batch_agrees(self, capsys):
        code, rep, _ = run(capsys, "bench", "--patterns", "K3,K4",
                           "--k", "1", "--n", "12", "--seeds", "2")
        assert code == 0
        assert rep["verification"]["oracle_agreements"] == "2/2"
        assert len(rep["outcome"]["rows"]) == 2
        assert len(rep["timings"]["per_instance_s"]) == 2


class TestExitCodes:
    def test_usage_error_is_64(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["solve", "--graph"])
        assert ei.value.code == 64
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["--help"])
        assert ei.value.code == 0
        capsys.readouterr()

    def test_parse_error_is_65(self, files, capsys):
        code, rep, err = run(capsys, "solve", "--graph", files["bad"],
                             "--patterns", "K3", "--k", "0")
        assert code == 65 and rep is None
        assert "parse error" in err

    def test_bad_budget_spec_is_65(self, files, capsys):
        code, _, err = run(capsys, "solve", "--graph", files["k4"],
                           "--patterns", "K4", "--k", "1",
                           "--budget-f1", "wild")
        assert code == 65
        assert "budget spec" in err


class TestEnvironmentCap:
    def test_small_cap_fails_the_search(self, disk_bundle, capsys,
                                        monkeypatch):
        before = tm.DEFAULT_BUDGET_NODES
        monkeypatch.setenv("TMH_BUDGET_NODES", "10")
        code, _, err = run(capsys, "check-tm",
                           "--graph", disk_bundle["graph"],
                           "--pattern", "K23")
        assert code == 2
        assert "budget" in err
        assert tm.DEFAULT_BUDGET_NODES == before

    def test_junk_value_is_usage(self, files, capsys, monkeypatch):
        monkeypatch.setenv("TMH_BUDGET_NODES", "much")
        code, _, err = run(capsys, "check-tm", "--graph", files["p5"],
                           "--pattern", "K3")
        assert code == 64
        assert "TMH_BUDGET_NODES" in err
