"""
Efficiency reports: the reporting checklist, canonical serialization and
a fixed-layout text summary.
"""
import logging

from joulebits import codec
from joulebits.constants import (SCHEMA_VERSION, CHECKLIST_SECTIONS, checklist_titles)
from joulebits.channel import EmpowermentCurve
from joulebits.mdlproxy import MdlReport
from joulebits.types import (SchemaVersionError, UnknownFieldError, ValidationError, BoundVerdict,
                             EfficiencyRecord, Violation)


def _empty(value):
    if value is None:
        return True
    if isinstance(value, str):
        return not value.strip()
    if isinstance(value, dict):
        return not value or all(_empty(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return not value or all(_empty(v) for v in value)
    return False


class ReportingChecklist(object):
    """The seven conventions every bits-per-joule number is reported with.

    Each section holds free text or a JSON object, for example the ledger
    terms under ``energy_balance_terms`` or one quantizer description per
    variable under ``coarse_graining``.
    """

    def __init__(self, **sections):
        unknown = sorted(set(sections) - set(CHECKLIST_SECTIONS))
        if unknown:
            raise UnknownFieldError("Unknown checklist sections %s" % unknown, unknown)
        for name in CHECKLIST_SECTIONS:
            setattr(self, name, sections.get(name))

    def sections(self):
        return [(name, getattr(self, name)) for name in CHECKLIST_SECTIONS]

    def updated(self, **sections):
        merged = dict((name, value) for name, value in self.sections() if value is not None)
        merged.update((k, v) for k, v in sections.items() if v is not None)
        return ReportingChecklist(**merged)

    def encode(self):
        return dict(self.sections())

    @classmethod
    def decode(cls, obj):
        if not isinstance(obj, dict):
            raise ValidationError("Checklist must be a JSON object")
        return cls(**obj)


def validate(c):
    """One violation per missing or empty checklist section, in checklist order."""
    violations = []
    for name, value in c.sections():
        if _empty(value):
            title = checklist_titles[name]
            violations.append(Violation(title, "missing checklist section: %s" % title))
    return violations


_REPORT_FIELDS = ('schema_version', 'checklist', 'eta_E', 'eta_C', 'mdl_companion', 'bound_verdicts',
                  'flags', 'uncertainty', 'normative')
_ETA_C_FIELDS = ('convention', 'endpoint', 'curve', 'capacity_per_unit_cost_bits_per_J',
                 'unbounded', 'cross_check_bits_per_J')
_MDL_FIELDS = ('report', 'eta_e_mdl_bits_per_J', 'convention', 'budget')


def _check_fields(obj, allowed, where):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise UnknownFieldError("Unknown fields in %s: %s" % (where, ", ".join(unknown)), unknown)


class EfficiencyReport(object):
    """Learning and empowerment efficiencies with their checklist and bound verdicts.

    Attributes:
        eta_E (EfficiencyRecord): Learning efficiency, or None.
        eta_C (dict): Empowerment block with keys 'convention', 'endpoint',
            'curve' (EmpowermentCurve), 'capacity_per_unit_cost_bits_per_J',
            'unbounded' and 'cross_check_bits_per_J', or None.
        mdl_companion (dict): Operational block with keys 'report' (MdlReport),
            'eta_e_mdl_bits_per_J', 'convention' and 'budget', or None.
    """

    def __init__(self, checklist, eta_E=None, eta_C=None, mdl_companion=None, bound_verdicts=(),
                 flags=None, uncertainty=None, normative=None, schema_version=SCHEMA_VERSION):
        self.schema_version = schema_version
        self.checklist = checklist
        self.eta_E = eta_E
        self.eta_C = eta_C
        self.mdl_companion = mdl_companion
        self.bound_verdicts = list(bound_verdicts)
        self.flags = dict(flags or {})
        self.uncertainty = uncertainty
        self.normative = normative

    def violations(self):
        """Checklist violations plus broken report invariants."""
        found = validate(self.checklist)
        if self.eta_E is not None and self.eta_E.eta_tilde_E is not None and not self.eta_E.Q_diss > 0:
            found.append(Violation("learning efficiency", "eta_tilde_E reported without positive Q_diss"))
        return found

    def failed_verdicts(self):
        return [v for v in self.bound_verdicts if not v.satisfied]

    def encode(self):
        eta_c = None
        if self.eta_C is not None:
            eta_c = dict(self.eta_C)
            if eta_c.get('curve') is not None:
                eta_c['curve'] = eta_c['curve'].encode()
        mdl = None
        if self.mdl_companion is not None:
            mdl = dict(self.mdl_companion)
            if mdl.get('report') is not None:
                mdl['report'] = mdl['report'].encode()
        eta_e = None
        if self.eta_E is not None:
            eta_e = self.eta_E._asdict()
            eta_e['convention'] = 'declared ledger; eta_E per E_cons, eta_tilde_E per Q_diss'
        return {"schema_version": self.schema_version,
                "checklist": self.checklist.encode(),
                "eta_E": eta_e,
                "eta_C": eta_c,
                "mdl_companion": mdl,
                "bound_verdicts": [v._asdict() for v in self.bound_verdicts],
                "flags": self.flags,
                "uncertainty": self.uncertainty,
                "normative": self.normative}

    @classmethod
    def decode(cls, obj):
        """Builds a report from parsed JSON.

        Raises:
            joulebits.types.SchemaVersionError: On a different schema version.
            joulebits.types.UnknownFieldError: On fields the schema does not define.
        """
        if not isinstance(obj, dict):
            raise ValidationError("Report must be a JSON object")
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError("Report schema version %r is not supported, expected %r"
                                     % (version, SCHEMA_VERSION))
        _check_fields(obj, _REPORT_FIELDS, "report")
        eta_e = obj.get("eta_E")
        if eta_e is not None:
            eta_e = dict(eta_e)
            eta_e.pop('convention', None)
            _check_fields(eta_e, EfficiencyRecord._fields, "eta_E")
            eta_e = EfficiencyRecord(**dict((f, eta_e.get(f)) for f in EfficiencyRecord._fields))
        eta_c = obj.get("eta_C")
        if eta_c is not None:
            _check_fields(eta_c, _ETA_C_FIELDS, "eta_C")
            eta_c = dict(eta_c)
            if eta_c.get('curve') is not None:
                eta_c['curve'] = EmpowermentCurve.decode(eta_c['curve'])
        mdl = obj.get("mdl_companion")
        if mdl is not None:
            _check_fields(mdl, _MDL_FIELDS, "mdl_companion")
            mdl = dict(mdl)
            if mdl.get('report') is not None:
                mdl['report'] = MdlReport.decode(mdl['report'])
        verdicts = []
        for v in obj.get("bound_verdicts") or []:
            _check_fields(v, BoundVerdict._fields, "bound_verdicts")
            verdicts.append(BoundVerdict(**dict((f, v.get(f)) for f in BoundVerdict._fields)))
        return cls(ReportingChecklist.decode(obj.get("checklist") or {}), eta_e, eta_c, mdl, verdicts,
                   obj.get("flags"), obj.get("uncertainty"), obj.get("normative"), version)

    def dumps(self):
        return codec.canonical_dumps(self) + "\n"


def round_trip(r):
    """Serializes and parses a report back."""
    return EfficiencyReport.decode(codec.loads(r.dumps(), "<report>"))


def load_report(path):
    return EfficiencyReport.decode(codec.load_json(path))


def _num(value, unit=""):
    if value is None:
        return "n/a"
    return ("%.6g %s" % (value, unit)).rstrip()


def render_summary(r):
    """Fixed-layout plain-text summary. Failed checks start with 'VIOLATION'."""
    lines = ["joulebits efficiency report (schema %s)" % r.schema_version, "=" * 60]

    lines.append("learning efficiency")
    e = r.eta_E
    if e is None:
        lines.append("  not evaluated")
    else:
        lines.append("  %-24s %s" % ("delta_I", _num(e.delta_I, "bits")))
        lines.append("  %-24s %s" % ("eta_E [E_cons]", _num(e.eta_E, "bits/J")))
        lines.append("  %-24s %s" % ("eta_tilde_E [Q_diss]", _num(e.eta_tilde_E, "bits/J")))
        lines.append("  %-24s %s" % ("Landauer fraction", _num(e.landauer_fraction)))
        if e.landauer_fraction is not None and e.landauer_fraction > 1 and not e.dS_sys:
            lines.append("VIOLATION Landauer fraction %.6g exceeds 1 with dS_sys = 0" % e.landauer_fraction)

    lines.append("empowerment efficiency")
    c = r.eta_C
    if c is None:
        lines.append("  not evaluated")
    else:
        tag = "[%s, %s]" % (c.get('convention'), c.get('endpoint'))
        eta_c = _num(c.get('capacity_per_unit_cost_bits_per_J'), "bits/J")
        if c.get('unbounded'):
            eta_c += " (unbounded, largest finite candidate)"
        lines.append("  %-24s %s" % ("eta_C " + tag, eta_c))
        if c.get('cross_check_bits_per_J') is not None:
            lines.append("  %-24s %s" % ("relative-entropy check", _num(c['cross_check_bits_per_J'], "bits/J")))
        curve = c.get('curve')
        if curve is not None:
            lines.append("  %12s %14s %16s" % ("budget [J]", "capacity [bit]", "lambda [bit/J]"))
            for p in curve.points:
                lines.append("  %12.6g %14.6g %16s" % (p.budget, p.capacity, _num(p.multiplier)))

    if r.mdl_companion is not None:
        m = r.mdl_companion
        lines.append("operational companion (%s)" % m.get('convention', 'operational'))
        rep = m.get('report')
        if rep is not None:
            lines.append("  %-24s %d" % ("chosen order", rep.chosen_order))
            lines.append("  %-24s %s" % ("L_M", _num(rep.L_M, "bits")))
            lines.append("  %-24s %s" % ("L_X_given_M", _num(rep.L_X_given_M, "bits")))
        lines.append("  %-24s %s" % ("eta_E_MDL", _num(m.get('eta_e_mdl_bits_per_J'), "bits/J")))

    lines.append("bound verdicts")
    if not r.bound_verdicts:
        lines.append("  none")
    for v in r.bound_verdicts:
        prefix = "ok       " if v.satisfied else "VIOLATION"
        lines.append("%s %s: lhs=%s rhs=%s slack=%s%s" % (
            prefix, v.label, _num(v.lhs), _num(v.rhs), _num(v.slack, v.units),
            " (%s)" % v.note if v.note else ""))

    lines.append("checklist")
    missing = r.violations()
    if not missing:
        lines.append("  all %d sections present" % len(CHECKLIST_SECTIONS))
    for violation in missing:
        lines.append("VIOLATION %s" % violation.message)
    return "\n".join(lines) + "\n"


def build_report(checklist, efficiency=None, curve=None, unit_cost=None, endpoint=None, mdl=None,
                 eta_mdl=None, mdl_budget=None, verdicts=(), flags=None, uncertainty=None, normative=None):
    """Assembles a report from module results.

    Args:
        checklist (ReportingChecklist): The conventions used.
        efficiency (EfficiencyRecord): Learning efficiency.
        curve (EmpowermentCurve): Cost-constrained capacity curve.
        unit_cost (UnitCostCapacity): Capacity per unit cost.
        mdl (MdlReport): Operational two-part code.
    """
    eta_c = None
    if curve is not None or unit_cost is not None:
        eta_c = {"convention": (unit_cost.convention if unit_cost is not None else curve.convention),
                 "endpoint": endpoint,
                 "curve": curve,
                 "capacity_per_unit_cost_bits_per_J": unit_cost.bits_per_joule if unit_cost else None,
                 "unbounded": bool(unit_cost.unbounded) if unit_cost else False,
                 "cross_check_bits_per_J": unit_cost.cross_check if unit_cost else None}
    companion = None
    if mdl is not None:
        companion = {"report": mdl, "eta_e_mdl_bits_per_J": eta_mdl,
                     "convention": "operational (two-part MDL), not converted to I(W;Z)",
                     "budget": mdl_budget}
    report = EfficiencyReport(checklist, efficiency, eta_c, companion, verdicts, flags, uncertainty, normative)
    if report.violations():
        logging.info("Report has %d checklist violations" % len(report.violations()))
    return report
