import os
import unittest

from joulebits import channel
from joulebits import codec
from joulebits import epiplexity
from joulebits import mdlproxy
from joulebits import report
from joulebits import thermo
from joulebits.channel import EmpowermentCurve
from joulebits.constants import BOLTZMANN, LN2, CHECKLIST_SECTIONS, checklist_titles
from joulebits.probcore import FiniteDistribution
from joulebits.report import ReportingChecklist, EfficiencyReport
from joulebits.thermo import EnergyLedger
from joulebits.types import (SchemaVersionError, UnknownFieldError, BoundVerdict, CapacityPoint, EfficiencyRecord,
                             UnitCostCapacity)
from sweep.serial import SerialRunner

DATA = os.path.join(os.path.dirname(__file__), "data")
KT_LN2 = BOLTZMANN * 300.0 * LN2


def full_checklist():
    return ReportingChecklist.decode(codec.load_json(os.path.join(DATA, "checklist.json")))


def example_report():
    cch = channel.CostedChannel.decode(codec.load_json(os.path.join(DATA, "noisy_switch.json")))
    curve = channel.empowerment_curve(cch, [0.25, 0.5, 2.0], runner=SerialRunner())
    unit_cost = channel.capacity_per_unit_cost(cch)
    ledger = EnergyLedger(2e-20, 1.5e-20, dE_store=5e-21)
    efficiency = epiplexity.learning_efficiency(0.5, ledger)
    stream = mdlproxy.TokenStream.from_text("01" * 16)
    budget = mdlproxy.ModelBudget(1)
    mdl = mdlproxy.two_part_mdl(stream, budget, SerialRunner())
    verdicts = [thermo.corollary_check(0.5, 0.0, ledger.Q_diss, ledger.temperature)]
    return report.build_report(full_checklist(), efficiency=efficiency, curve=curve, unit_cost=unit_cost,
                               endpoint=cch.endpoint, mdl=mdl, eta_mdl=1e20, mdl_budget=budget.describe(),
                               verdicts=verdicts, flags={"convention": "incremental", "seed": 0},
                               uncertainty={"capacity_tol_bits": 1e-9})


def snapshot_report():
    """A report built from literal values, so the golden summary can be written by hand."""
    inputs = FiniteDistribution(["idle", "pulse"], [0.5, 0.5])
    curve = EmpowermentCurve([CapacityPoint(0.25, 0.125, 2.0, inputs), CapacityPoint(0.5, 0.375, 0.5, inputs),
                              CapacityPoint(2.0, 0.75, None, inputs)], "incremental")
    unit_cost = UnitCostCapacity(1.5, inputs, 0.25, "incremental", False, 1.5)
    efficiency = EfficiencyRecord(0.5, 2e-20, 1.5e-20, 2.5e19, 3.125e19, 0.09, 0.0, 300.0)
    verdicts = [BoundVerdict("landauer corollary", 0.25, 1.5, True, 1.25, "J", None),
                BoundVerdict("data processing", 0.75, 0.5, False, -0.25, "bits", "constructed")]
    return report.build_report(full_checklist(), efficiency=efficiency, curve=curve, unit_cost=unit_cost,
                               endpoint="observation", mdl=mdlproxy.MdlReport(4.0, 12.0, 1), eta_mdl=1e20,
                               verdicts=verdicts)


class TestChecklist(unittest.TestCase):

    def test_empty_checklist_shall_list_seven_violations(self):
        violations = report.validate(ReportingChecklist())
        self.assertEqual(len(violations), 7)
        self.assertEqual([v.section for v in violations], [checklist_titles[s] for s in CHECKLIST_SECTIONS])
        self.assertEqual(violations[3].message, "missing checklist section: coarse-graining / noise model")

    def test_blank_values_shall_count_as_missing(self):
        checklist = full_checklist().updated()
        checklist.accounting_boundary = "   "
        checklist.baseline_policy = {"null_action": None}
        sections = [v.section for v in report.validate(checklist)]
        self.assertEqual(sections, ["accounting boundary", "baseline / null policy"])

    def test_complete_checklist_shall_validate(self):
        self.assertEqual(report.validate(full_checklist()), [])

    def test_unknown_section_shall_raise(self):
        self.assertRaises(UnknownFieldError, ReportingChecklist, budget="none")

    def test_update_shall_keep_existing_sections(self):
        checklist = ReportingChecklist(accounting_boundary="agent").updated(time_throughput="n/a")
        self.assertEqual(checklist.accounting_boundary, "agent")
        self.assertEqual(checklist.time_throughput, "n/a")


class TestEfficiencyReport(unittest.TestCase):

    def test_round_trip_shall_be_byte_stable(self):
        r = example_report()
        text = r.dumps()
        self.assertEqual(report.round_trip(r).dumps(), text)
        self.assertTrue(text.endswith("}\n"))

    def test_decode_shall_reject_other_schema_versions(self):
        obj = codec.loads(example_report().dumps())
        obj["schema_version"] = "2"
        self.assertRaises(SchemaVersionError, EfficiencyReport.decode, obj)

    def test_decode_shall_reject_unknown_fields(self):
        obj = codec.loads(example_report().dumps())
        obj["eta_C"]["bits_per_second"] = 1.0
        with self.assertRaises(UnknownFieldError) as ctx:
            EfficiencyReport.decode(obj)
        self.assertEqual(ctx.exception.fields, ["bits_per_second"])
        obj = codec.loads(example_report().dumps())
        obj["comment"] = "x"
        self.assertRaises(UnknownFieldError, EfficiencyReport.decode, obj)

    def test_report_shall_tag_conventions(self):
        obj = codec.loads(example_report().dumps())
        self.assertEqual(obj["eta_C"]["convention"], "incremental")
        self.assertEqual(obj["eta_C"]["endpoint"], "observation")
        self.assertIn("not converted", obj["mdl_companion"]["convention"])
        self.assertIn("E_cons", obj["eta_E"]["convention"])

    def test_eta_tilde_without_heat_shall_be_a_violation(self):
        record = EfficiencyRecord(1.0, 1.0, 0.0, 1.0, 1.0, None, 0.0, 300.0)
        r = EfficiencyReport(full_checklist(), eta_E=record)
        self.assertEqual([v.section for v in r.violations()], ["learning efficiency"])


class TestSummary(unittest.TestCase):

    def test_super_landauer_claim_shall_render_violation(self):
        ledger = EnergyLedger(KT_LN2, KT_LN2)
        efficiency = epiplexity.learning_efficiency(2.0, ledger)
        verdicts = [thermo.corollary_check(2.0, 0.0, ledger.Q_diss, 300.0)]
        r = report.build_report(full_checklist(), efficiency=efficiency, verdicts=verdicts)
        lines = report.render_summary(r).splitlines()
        flagged = [l for l in lines if l.startswith("VIOLATION")]
        self.assertEqual(len(flagged), 2, lines)
        self.assertTrue(any("Landauer fraction" in l for l in flagged))

    def test_missing_blocks_shall_render_not_evaluated(self):
        text = report.render_summary(EfficiencyReport(full_checklist()))
        self.assertEqual(text.count("not evaluated"), 2)
        self.assertIn("all 7 sections present", text)
        self.assertNotIn("VIOLATION", text)

    def test_summary_shall_match_snapshot(self):
        path = os.path.join(DATA, "example_summary.txt")
        self.assertTrue(os.path.exists(path), "golden summary %s is missing" % path)
        with open(path, encoding="utf-8") as f:
            self.assertEqual(report.render_summary(snapshot_report()), f.read())

    def test_summary_shall_be_stable_across_round_trips(self):
        r = example_report()
        self.assertEqual(report.render_summary(report.round_trip(r)), report.render_summary(r))


if __name__ == '__main__':
    unittest.main()
