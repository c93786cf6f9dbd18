"""End-to-end CLI behavior: exit codes, JSON shapes, and determinism."""

import json
import subprocess
import sys

import pytest

RUN = [sys.executable, "-m", "fatgraph"]


def run_cli(*args, env_extra=None, binary=False):
    import os

    env = dict(os.environ)
    env.pop("FATGRAPH_EXHAUSTIVE_LIMIT", None)
    if env_extra:
        env.update(env_extra)
    out = subprocess.run(RUN + list(args), capture_output=True, env=env)
    if binary:
        return out.returncode, out.stdout, out.stderr.decode()
    return out.returncode, out.stdout.decode(), out.stderr.decode()


class TestExitCodes:
    def test_ok(self):
        code, out, _ = run_cli("graph-mass", "--k", "1")
        assert code == 0
        assert json.loads(out)["mu_S"] == "405/512"

    def test_usage_bad_stages(self):
        code, _, err = run_cli("verify", "--depth", "3", "--stages", "3,4")
        assert code == 2
        assert json.loads(err)["error"] == "RejectParity"

    def test_usage_odd_stage_list(self):
        code, _, err = run_cli("verify", "--depth", "3", "--stages", "3,3,5")
        assert code == 2
        assert json.loads(err)["error"] == "UsageError"

    def test_verification_failure_unmeetable_target(self):
        # a 9/16 lower bound cannot clear 1 - 1/100
        code, out, _ = run_cli("report", "--depth", "3", "--epsilon", "1/100")
        assert code == 3
        doc = json.loads(out)
        assert doc["pass"] is False
        assert doc["flags"]["bound_total_above_target"] is False
        assert all(v for k, v in doc["flags"].items()
                   if k != "bound_total_above_target")

    def test_resource_limit(self):
        code, _, err = run_cli("verify", "--depth", "4",
                               env_extra={"FATGRAPH_EXHAUSTIVE_LIMIT": "100"})
        assert code == 4
        doc = json.loads(err)
        assert doc["error"] == "SweepTooLarge"
        assert "FATGRAPH_EXHAUSTIVE_LIMIT" in doc["hint"]


class TestPlan:
    def test_values(self):
        code, out, _ = run_cli("plan", "--epsilon", "1/2", "--stages", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["p"] == "4/5"
        assert doc["stages"][0]["m"] == 3

    def test_deterministic(self):
        a = run_cli("plan", "--epsilon", "1/5", "--stages", "3")
        b = run_cli("plan", "--epsilon", "1/5", "--stages", "3")
        assert a == b and a[0] == 0
        assert json.loads(a[1])["p"] == "10/11"

    def test_zero_stage_count(self):
        code, _, err = run_cli("plan", "--epsilon", "1/5", "--stages", "0")
        assert code == 2


class TestVerify:
    def test_report_shape_and_values(self):
        code, out, _ = run_cli("verify", "--depth", "5",
                               "--sample", "10", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["conditions"] == {"c1": True, "c2": True,
                                     "c3_epsilon": "3/1"}
        assert doc["ratio_bound"] == "3/1"
        assert doc["edge_pairs"]["max_divergence"] == 1
        assert doc["corner_pairs"]["max_ratio"] == "6/1"
        assert doc["corner_pairs"]["bound"] == "9/1"
        assert doc["sampled_general_ratio"]["seed"] == 3

    def test_worker_invariance(self):
        outs = {run_cli("verify", "--depth", "4", "--workers", str(w))[1]
                for w in (1, 2, 5)}
        assert len(outs) == 1

    def test_backend_invariance(self):
        outs = set()
        for be in ("python", "compiled"):
            code, out, err = run_cli("verify", "--depth", "4",
                                     "--backend", be)
            if code == 2 and "not available" in err:
                pytest.skip("compiled backend not built")
            outs.add(out)
        assert len(outs) == 1


class TestArtifacts:
    def test_graph_export_csv(self, tmp_path):
        dest = tmp_path / "graph.csv"
        code, _, _ = run_cli("graph-export", "--k", "1",
                             "--resolution", "8", "--out", str(dest))
        assert code == 0
        lines = dest.read_text().strip().splitlines()
        assert lines[0] == "x,y_lo,y_hi,y_mid"
        assert len(lines) == 9
        assert lines[1].startswith("1/16,")

    def test_heatmap_bytes(self):
        code, out, _ = run_cli("heatmap", "--depth", "4", "--pixels", "64",
                               binary=True)
        assert code == 0
        assert out.startswith(b"P5\n64 64\n255\n")
        assert len(out) == len(b"P5\n64 64\n255\n") + 64 * 64

    def test_classify_strip_point(self):
        code, out, _ = run_cli("classify", "--x", "11/1024", "--y", "515/1024",
                               "--level", "5")
        assert code == 0
        doc = json.loads(out)
        assert doc["cell"] == [5, 11, 515]
        assert doc["weights"] == ["1/1", "1/1", "1/1", "3/2", "1/1"]

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        code, out, _ = run_cli("plan", "--epsilon", "1/2", "--stages", "1",
                               "--out", str(cfg))
        assert code == 0
        code, out, _ = run_cli("graph-mass", "--k", "1", "--config", str(cfg))
        assert code == 0
        doc = json.loads(out)
        assert doc["bounds"]["stages"][0]["m"] == 3

    def test_report_pass(self):
        code, out, _ = run_cli("report", "--depth", "4", "--epsilon", "1/2")
        assert code == 0
        doc = json.loads(out)
        assert doc["pass"] is True
        assert doc["flags"]["bound_total_above_target"] is True
        assert doc["graph_mass"]["mu_S"] == "405/512"
