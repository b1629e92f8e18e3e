import io
import os
import shutil
import tempfile
import unittest
from unittest import mock

from joulebits import cli
from joulebits import codec
from joulebits.constants import EXIT_OK, EXIT_VALIDATION, EXIT_VIOLATION

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.out = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.out)

    def run_cli(self, *argv):
        stdout = io.StringIO()
        with mock.patch('sys.stderr', new_callable=io.StringIO) as stderr:
            code = cli.run(list(argv) + ["--out", self.out], stdout)
        self.stderr = stderr.getvalue()
        return code, stdout.getvalue()

    def read(self, name):
        with open(os.path.join(self.out, name), encoding="utf-8") as f:
            return f.read()

    def write(self, name, obj):
        path = os.path.join(self.out, name)
        codec.atomic_write(path, codec.canonical_dumps(obj))
        return path


class TestEmpower(CliTestCase):

    def test_line_world_shall_write_curve_and_report(self):
        code, _ = self.run_cli("empower", "--mdp", data("line4.json"), "--budgets", "0.5,1,2",
                               "--convention", "incremental")
        self.assertEqual(code, EXIT_OK, self.stderr)
        lines = self.read("curve.csv").splitlines()
        self.assertEqual(lines[0], "budget_J,capacity_bits,lambda_bits_per_J")
        self.assertEqual(len(lines), 4)
        rep = codec.loads(self.read("report.json"))
        self.assertEqual(rep["flags"]["convention"], "incremental")
        self.assertEqual(rep["flags"]["budgets"], [0.5, 1.0, 2.0])
        self.assertEqual(rep["eta_C"]["convention"], "incremental")
        self.assertEqual(rep["checklist"]["horizon_sampling"]["tau"], 2)

    def test_runs_shall_be_byte_identical(self):
        argv = ("empower", "--mdp", data("line4.json"), "--budgets", "0.5,1,2")
        self.assertEqual(self.run_cli(*argv)[0], EXIT_OK)
        first = self.read("report.json"), self.read("curve.csv")
        self.assertEqual(self.run_cli(*argv)[0], EXIT_OK)
        self.assertEqual((self.read("report.json"), self.read("curve.csv")), first)

    def test_infeasible_budget_shall_exit_with_validation_error(self):
        code, _ = self.run_cli("empower", "--mdp", data("line4.json"), "--budgets", "0.05")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("below the minimum expected cost", self.stderr)

    def test_channel_input_shall_be_accepted(self):
        code, out = self.run_cli("empower", "--channel", data("noisy_switch.json"), "--budgets", "0.5",
                                 "--convention", "incremental")
        self.assertEqual(code, EXIT_OK, self.stderr)
        self.assertIn("empowerment efficiency", out)

    def test_unparseable_spec_shall_report_location(self):
        path = os.path.join(self.out, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write('{"states": [\n  "s0",\n}')
        code, _ = self.run_cli("empower", "--mdp", path)
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("broken.json:3:", self.stderr)

    def test_malformed_horizon_shall_exit_with_validation_error(self):
        spec = codec.load_json(data("line4.json"))
        spec["horizon"] = "two"
        code, _ = self.run_cli("empower", "--mdp", self.write("bad_horizon.json", spec))
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("error: Horizon must be a positive integer, got 'two'", self.stderr)

    def test_malformed_cost_shall_exit_with_validation_error(self):
        spec = codec.load_json(data("noisy_switch.json"))
        spec["cost_J"] = ["cheap", 1.0]
        code, _ = self.run_cli("empower", "--channel", self.write("bad_cost.json", spec))
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("error: Costed channel has a malformed field", self.stderr)


class TestChecklistEnforcement(CliTestCase):

    def test_blank_override_shall_refuse_the_report(self):
        override = self.write("override.json", {"accounting_boundary": " "})
        code, out = self.run_cli("epiplexity", "--env", data("coin_env.json"), "--checklist", override)
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("VIOLATION missing checklist section: accounting boundary", out)
        self.assertFalse(os.path.exists(os.path.join(self.out, "report.json")))

    def test_force_shall_emit_with_warnings(self):
        override = self.write("override.json", {"accounting_boundary": " "})
        with self.assertLogs(level='WARNING'):
            code, _ = self.run_cli("epiplexity", "--env", data("coin_env.json"), "--checklist", override, "--force")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.out, "report.json")))

    def test_empty_file_shall_list_seven_violations(self):
        code, out = self.run_cli("report-validate", data("empty.json"))
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertEqual(out.count("VIOLATION"), 7)

    def test_emitted_report_shall_validate(self):
        self.assertEqual(self.run_cli("epiplexity", "--env", data("coin_env.json"))[0], EXIT_OK)
        code, out = self.run_cli("report-validate", os.path.join(self.out, "report.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("valid", out)


class TestEpiplexity(CliTestCase):

    def test_coin_episode_shall_report_efficiency(self):
        code, out = self.run_cli("epiplexity", "--env", data("coin_env.json"))
        self.assertEqual(code, EXIT_OK, self.stderr)
        rep = codec.loads(self.read("report.json"))
        self.assertAlmostEqual(rep["eta_E"]["delta_I"], rep["normative"]["delta_I_bits"], places=12)
        self.assertLessEqual(rep["normative"]["delta_I_bits"], rep["normative"]["dpi_bound_bits"] + 1e-9)
        self.assertFalse(rep["checklist"]["energy_balance_terms"]["E_cons_approximates_Q_diss"])
        self.assertIn("learning efficiency", out)

    def test_fuzz_shall_use_the_seed(self):
        self.assertEqual(self.run_cli("epiplexity", "--fuzz", "12", "--seed", "4")[0], EXIT_OK)
        first = self.read("fuzz.json")
        self.assertEqual(self.run_cli("epiplexity", "--fuzz", "12", "--seed", "4")[0], EXIT_OK)
        self.assertEqual(self.read("fuzz.json"), first)
        self.assertEqual(codec.loads(first)["cases"], 12)

    def test_missing_inputs_shall_raise(self):
        self.assertEqual(self.run_cli("epiplexity")[0], EXIT_VALIDATION)

    def test_malformed_prior_shall_exit_with_validation_error(self):
        spec = codec.load_json(data("coin_env.json"))
        spec["prior"] = "uniform"
        code, _ = self.run_cli("epiplexity", "--env", self.write("bad_prior.json", spec))
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("error: ", self.stderr)
        self.assertNotIn("Traceback", self.stderr)


class TestThermoCheck(CliTestCase):

    def test_super_landauer_ledger_shall_fail_under_strict(self):
        ledger = self.write("ledger.json", {"E_cons_J": 1e-21, "Q_diss_J": 1e-21, "T_K": 300.0})
        code, out = self.run_cli("thermo-check", "--ledger", ledger, "--delta-I", "5", "--strict")
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertIn("VIOLATION landauer corollary", out)
        code, _ = self.run_cli("thermo-check", "--ledger", ledger, "--delta-I", "5")
        self.assertEqual(code, EXIT_OK)

    def test_process_shall_pass_learning_inequality(self):
        code, out = self.run_cli("thermo-check", "--process", data("two_state_process.json"), "--duration", "1.5",
                                 "--strict")
        self.assertEqual(code, EXIT_OK, out)
        result = codec.loads(self.read("thermo.json"))
        self.assertTrue(all(v["satisfied"] for v in result["verdicts"]))
        self.assertEqual(result["flags"]["duration"], 1.5)


class TestOtherCommands(CliTestCase):

    def test_open_register_shall_print_unbounded_efficiency(self):
        code, out = self.run_cli("decouple-demo", "--n", "3", "--boundary", "open", "--T", "300")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("ΔI = 3 bits, Q_diss = 0 J, η̃ unbounded", out)

    def test_mdl_shall_pick_order_one_on_alternation(self):
        code, _ = self.run_cli("mdl", "--tokens", data("alternating.txt"), "--max-order", "2", "--E-train", "1e-9")
        self.assertEqual(code, EXIT_OK, self.stderr)
        result = codec.loads(self.read("mdl.json"))
        self.assertEqual(result["mdl"]["chosen_order"], 1)
        self.assertGreater(result["eta_e_mdl_bits_per_J"], 0.0)

    def test_scaling_shall_fit_exact_points(self):
        code, _ = self.run_cli("scaling", "--points", data("scaling_exact.csv"), "--kappa", "1e-3", "--at", "1,100")
        self.assertEqual(code, EXIT_OK, self.stderr)
        result = codec.loads(self.read("scaling.json"))
        self.assertAlmostEqual(result["fit"]["alpha"], 0.5, delta=1e-5)
        self.assertEqual(len(result["marginal_bits_per_J"]), 2)

    def test_missing_token_file_shall_exit_with_validation_error(self):
        missing = os.path.join(self.out, "absent.txt")
        code, _ = self.run_cli("mdl", "--tokens", missing)
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("error: %s" % missing, self.stderr)

    def test_missing_points_file_shall_exit_with_validation_error(self):
        code, _ = self.run_cli("scaling", "--points", os.path.join(self.out, "absent.csv"), "--kappa", "1")
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertIn("absent.csv", self.stderr)

    def test_bad_flags_shall_exit_with_validation_error(self):
        with mock.patch('sys.stderr', new_callable=io.StringIO):
            self.assertEqual(cli.run(["empower", "--convention", "net"], io.StringIO()), EXIT_VALIDATION)
            self.assertEqual(cli.run(["teleport"], io.StringIO()), EXIT_VALIDATION)

class TestDeterminism(CliTestCase):

    def assert_repeatable(self, argv, names):
        self.assertEqual(self.run_cli(*argv)[0], EXIT_OK, self.stderr)
        first = [self.read(name) for name in names]
        self.assertEqual(self.run_cli(*argv)[0], EXIT_OK, self.stderr)
        self.assertEqual([self.read(name) for name in names], first)

    def test_epiplexity_runs_shall_be_byte_identical(self):
        self.assert_repeatable(("epiplexity", "--env", data("coin_env.json")), ["report.json"])

    def test_mdl_runs_shall_be_byte_identical(self):
        self.assert_repeatable(("mdl", "--tokens", data("tokens.json"), "--max-order", "2"), ["mdl.json"])

    def test_scaling_runs_shall_be_byte_identical(self):
        self.assert_repeatable(("scaling", "--points", data("scaling_exact.csv"), "--kappa", "1e-3", "--at", "1,100"),
                               ["scaling.json"])

    def test_thermo_check_runs_shall_be_byte_identical(self):
        ledger = self.write("ledger.json", {"E_cons_J": 2e-20, "Q_diss_J": 1.5e-20, "dE_store_J": 5e-21})
        self.assert_repeatable(("thermo-check", "--ledger", ledger, "--delta-I", "0.5",
                                "--process", data("two_state_process.json")), ["thermo.json"])

    def test_decouple_demo_runs_shall_be_byte_identical(self):
        self.assert_repeatable(("decouple-demo", "--n", "4", "--boundary", "closed"), ["decouple.json"])



if __name__ == '__main__':
    unittest.main()
