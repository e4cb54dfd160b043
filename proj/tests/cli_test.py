"""Exit codes, output shape and determinism of the fibrestab command line tool.

Usage: cli_test.py <path-to-fibrestab> <data-dir>
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

TOOL = None
DATA = None


def run(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([TOOL, *args], capture_output=True, text=True, env=full_env, timeout=300)


class HomologyCommand(unittest.TestCase):
    def test_catalog_name(self):
        r = run("homology", "torus")
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        self.assertEqual(out["complex"], "torus")
        self.assertEqual([g["rank"] for g in out["groups"]], [1, 2, 1])

    def test_klein_torsion(self):
        out = json.loads(run("homology", "klein").stdout)
        self.assertEqual(out["groups"][1]["torsion"], [2])

    def test_ring_and_reduced(self):
        out = json.loads(run("homology", "rp2", "--ring", "Z/2").stdout)
        self.assertEqual([g["rank"] for g in out["groups"]], [1, 1, 1])
        out = json.loads(run("homology", "s2", "--reduced").stdout)
        self.assertEqual([g["rank"] for g in out["groups"]], [0, 0, 1])

    def test_file_input_and_out_flag(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "c.json")
            with open(path, "w") as f:
                json.dump({"name": "hollow", "vertex_count": 3, "facets": [[0, 1], [1, 2], [0, 2]]}, f)
            target = os.path.join(tmp, "out.json")
            r = run("-o", target, "homology", path)
            self.assertEqual(r.returncode, 0, r.stderr)
            self.assertEqual(r.stdout, "")
            with open(target) as f:
                self.assertEqual([g["rank"] for g in json.load(f)["groups"]], [1, 1])

    def test_bad_inputs(self):
        with tempfile.TemporaryDirectory() as tmp:
            broken = os.path.join(tmp, "broken.json")
            with open(broken, "w") as f:
                f.write("{ not json")
            self.assertEqual(run("homology", broken).returncode, 2)
            invalid = os.path.join(tmp, "invalid.json")
            with open(invalid, "w") as f:
                json.dump({"name": "x", "vertex_count": 2, "facets": [[0, 5]]}, f)
            self.assertEqual(run("homology", invalid).returncode, 3)
        self.assertEqual(run("homology", "no_such_space").returncode, 2)
        self.assertEqual(run("homology", "torus", "--ring", "Z/4").returncode, 2)
        self.assertEqual(run("frobnicate").returncode, 2)


class CheckCommand(unittest.TestCase):
    def test_kunneth(self):
        r = run("check", "kunneth", "s1", "s1")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(json.loads(r.stdout)["consistent"])

    def test_mayer_vietoris_cover_file(self):
        r = run("check", "mv", os.path.join(DATA, "covers", "torus_cylinders.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(json.loads(r.stdout)["report"]["exact"])

    def test_not_a_cover(self):
        self.assertEqual(run("check", "mv", "torus", "s1", "s1").returncode, 4)

    def test_pair_sequence(self):
        r = run("check", "pair-les", "torus", "torus", "--degrees", "0..2")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(run("check", "pair-les", "s1", "torus").returncode, 4)

    def test_unknown_kind(self):
        self.assertEqual(run("check", "spectral", "s1").returncode, 2)


class ObstructCommand(unittest.TestCase):
    def verdict(self, name):
        r = run("obstruct", os.path.join(DATA, "queries", name))
        self.assertEqual(r.returncode, 0, r.stderr)
        return json.loads(r.stdout)

    def test_verdicts(self):
        self.assertEqual(self.verdict("s1_s1_one_point.json")["status"], "OBSTRUCTED")
        self.assertEqual(self.verdict("s2_global.json")["status"], "OBSTRUCTED")
        disk = self.verdict("disk_global.json")
        self.assertEqual(disk["status"], "NOT_OBSTRUCTED_BY_THESE_TESTS")
        self.assertIn("narrative", disk)


class SimulateCommand(unittest.TestCase):
    def test_incompatible_law_exits_5(self):
        r = run("simulate", os.path.join(DATA, "experiments", "incompatible.json"))
        self.assertEqual(r.returncode, 5)
        self.assertIn("compatibility", r.stderr)

    def test_patch_and_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv = os.path.join(tmp, "t.csv")
            r = run("simulate", os.path.join(DATA, "experiments", "linear_patch.json"), "--csv-out", csv)
            self.assertEqual(r.returncode, 0, r.stderr)
            out = json.loads(r.stdout)
            self.assertEqual(out["basin"]["converged_fraction"], 1.0)
            with open(csv) as f:
                self.assertEqual(f.readline().strip(), "trajectory,time,chart,angle,fibre")

    def test_byte_identical_across_runs_and_threads(self):
        exp = os.path.join(DATA, "experiments", "mobius.json")
        args = ("simulate", exp, "--duration", "10", "--step", "0.005")
        first = run(*args, "--threads", "1")
        second = run(*args, "--threads", "1")
        threaded = run(*args, "--threads", "3")
        self.assertEqual(first.returncode, 0, first.stderr)
        self.assertEqual(first.stdout, second.stdout)
        self.assertEqual(first.stdout, threaded.stdout)


if __name__ == "__main__":
    TOOL, DATA = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0], "-v"])
