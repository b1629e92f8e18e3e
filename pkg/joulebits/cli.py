"""
Command-line entry point.

Every subcommand is handled by a ``run_<subcommand>`` method of Commands,
looked up by name. Outputs are canonical JSON or CSV written atomically
into the ``--out`` directory, and embed the full flag set of the run.
"""
import argparse
import logging
import os
import sys

from joulebits import codec
from joulebits import channel
from joulebits import epiplexity
from joulebits import mdlproxy
from joulebits import report
from joulebits import thermo
from joulebits import thermosim
from joulebits.constants import (DEFAULT_TEMPERATURE, DEFAULT_CAPACITY_TOLERANCE, DEFAULT_SEED, CONVENTIONS,
                                 ENDPOINTS, BOUNDARIES, OPEN, TOTAL, ENDPOINT_OBSERVATION, NEGLIGIBILITY_FRACTION,
                                 EXIT_OK, EXIT_VALIDATION, EXIT_VIOLATION, CHECKLIST_SECTIONS)
from joulebits.probcore import FiniteDistribution, Quantizer, entropy
from joulebits.types import Error

SUBCOMMANDS = ('empower', 'epiplexity', 'mdl', 'thermo-check', 'decouple-demo', 'scaling', 'report-validate')

TIME_THROUGHPUT_NOTE = ("exact desk-scale computation; energies are declared ledger values, "
                        "no wall-clock or power measurement")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got %r" % text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default='.', help='output directory')
    common.add_argument('--convention', choices=CONVENTIONS, default=TOTAL, help='cost convention')
    common.add_argument('--endpoint', choices=ENDPOINTS, default=ENDPOINT_OBSERVATION, help='empowerment endpoint')
    common.add_argument('--T', type=float, default=DEFAULT_TEMPERATURE, help='bath temperature in kelvin')
    common.add_argument('--budgets', type=_floats, default=None, help='comma-separated budgets in joules')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='root seed of randomized suites')
    common.add_argument('--tol', type=float, default=DEFAULT_CAPACITY_TOLERANCE, help='capacity tolerance in bits')
    common.add_argument('--strict', action='store_true', help='exit 3 when a bound is violated')
    common.add_argument('--force', action='store_true', help='emit reports with checklist violations')
    common.add_argument('--checklist', default=None, help='JSON file overriding checklist sections')
    common.add_argument('--verbose', action='store_true', help='log progress')

    parser = argparse.ArgumentParser(prog='joulebits', description='Bits-per-joule metrics and bound checks.')
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('empower', parents=[common], help='empowerment curve and capacity per unit cost')
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--mdp', help='MDP spec JSON')
    source.add_argument('--channel', help='costed channel JSON')

    p = sub.add_parser('epiplexity', parents=[common], help='acquired epiplexity of a learning episode')
    p.add_argument('--env', help='environment and learner JSON')
    p.add_argument('--quantizers', help='JSON object of quantizers per variable')
    p.add_argument('--fuzz', type=int, default=0, help='run the data-processing fuzz on N random episodes')

    p = sub.add_parser('mdl', parents=[common], help='two-part MDL and prequential code lengths')
    p.add_argument('--tokens', required=True, help='token stream, text or JSON')
    p.add_argument('--max-order', type=int, default=2)
    p.add_argument('--resolution-bits', type=int, default=None)
    p.add_argument('--ell0', type=float, default=None, help='baseline bits per token')
    p.add_argument('--E-train', dest='E_train', type=float, default=None, help='training energy in joules')

    p = sub.add_parser('thermo-check', parents=[common], help='energy balance and Landauer bound checks')
    p.add_argument('--ledger', help='energy ledger JSON')
    p.add_argument('--delta-I', dest='delta_I', type=float, default=0.0, help='acquired bits')
    p.add_argument('--dS-sys', dest='dS_sys', type=float, default=0.0, help='system entropy change in J/K')
    p.add_argument('--negligibility', type=float, default=NEGLIGIBILITY_FRACTION)
    p.add_argument('--process', help='bipartite process JSON')
    p.add_argument('--duration', type=float, default=1.0, help='episode duration in seconds')

    p = sub.add_parser('decouple-demo', parents=[common], help='XOR register protocol')
    p.add_argument('--n', type=int, required=True, help='register bits')
    p.add_argument('--boundary', choices=BOUNDARIES, default=OPEN)
    p.add_argument('--z-dist', dest='z_dist', help='JSON distribution over words, uniform by default')

    p = sub.add_parser('scaling', parents=[common], help='power-law fit and marginal bits per joule')
    p.add_argument('--points', required=True, help="CSV with columns 'C,ell_bits_per_token'")
    p.add_argument('--kappa', type=float, required=True, help='joules per compute unit')
    p.add_argument('--N', type=int, default=1, help='evaluation tokens')
    p.add_argument('--at', type=_floats, default=None, help='compute values for marginal efficiency')

    p = sub.add_parser('report-validate', parents=[common], help='validate a report or checklist file')
    p.add_argument('path')
    return parser


class Commands(object):
    """Subcommand handlers. Each returns an exit code."""

    def __init__(self, args, stdout=None):
        self.args = args
        self.stdout = stdout or sys.stdout
        flags = dict(vars(args))
        flags.pop('func', None)
        self.flags = flags

    def run(self):
        handler = getattr(self, 'run_' + self.args.command.replace('-', '_'), None)
        if handler is None:
            raise Error("Unknown subcommand %r" % self.args.command)
        return handler()

    def _print(self, text):
        self.stdout.write(text if text.endswith("\n") else text + "\n")

    def _write(self, name, text):
        os.makedirs(self.args.out, exist_ok=True)
        path = os.path.join(self.args.out, name)
        codec.atomic_write(path, text)
        logging.info("Wrote %s" % path)
        return path

    def _write_json(self, name, obj):
        return self._write(name, codec.canonical_dumps(obj) + "\n")

    def _checklist(self, **defaults):
        checklist = report.ReportingChecklist(**defaults)
        if self.args.checklist:
            with codec.decoding("Checklist file"):
                checklist = checklist.updated(**codec.load_json(self.args.checklist))
        return checklist

    def _emit(self, rep):
        """Writes report.json unless the checklist fails without --force. Returns an exit code."""
        violations = rep.violations()
        if violations and not self.args.force:
            for v in violations:
                self._print("VIOLATION %s" % v.message)
            return EXIT_VALIDATION
        for v in violations:
            logging.warning("Emitting report despite: %s" % v.message)
        self._write("report.json", rep.dumps())
        self._print(report.render_summary(rep))
        return self._verdict_exit(rep.bound_verdicts)

    def _verdict_exit(self, verdicts):
        if self.args.strict and any(not v.satisfied for v in verdicts):
            return EXIT_VIOLATION
        return EXIT_OK

    def run_empower(self):
        args = self.args
        if args.mdp:
            mdp = channel.MdpSpec.decode(codec.load_json(args.mdp))
            cch = channel.unroll_mdp(mdp, args.endpoint, args.convention)
            horizon = {"tau": mdp.horizon, "initial_state": mdp.initial_state,
                       "episode": "open-loop action sequences of length tau",
                       "reset": "every sequence starts from the initial state"}
        else:
            cch = channel.CostedChannel.decode(codec.load_json(args.channel))
            horizon = {"episode": "one channel use", "reset": "memoryless channel"}
        costs = cch.effective_costs(args.convention)
        budgets = args.budgets or [float(costs.max())]
        curve = channel.empowerment_curve(cch, budgets, args.tol, args.convention)
        unit_cost = channel.capacity_per_unit_cost(cch, args.convention, args.tol)
        checklist = self._checklist(
            accounting_boundary="declared per-action energy costs of the agent over the horizon",
            energy_balance_terms={"source": "declared action costs", "baseline_energy_J": cch.baseline_energy,
                                  "negligibility_fraction": NEGLIGIBILITY_FRACTION},
            baseline_policy={"null_input": cch.null_input, "baseline_energy_J": cch.baseline_energy,
                             "convention": args.convention,
                             "apportioning": "full horizon baseline charged to every sequence"},
            coarse_graining={"endpoint": cch.endpoint, "quantizer": "none, finite labels"},
            horizon_sampling=horizon,
            time_throughput={"note": TIME_THROUGHPUT_NOTE},
            estimator_details={"empowerment": "Blahut-Arimoto, tol %g bits" % args.tol,
                               "slope": "Lagrange multiplier of the cost constraint",
                               "capacity_per_unit_cost": "multiplier sweep, relative-entropy cross-check"})
        rep = report.build_report(checklist, curve=curve, unit_cost=unit_cost, endpoint=cch.endpoint,
                                  flags=self.flags)
        code = self._emit(rep)
        if code != EXIT_VALIDATION:
            self._write("curve.csv", curve.to_csv())
        return code

    def run_epiplexity(self):
        args = self.args
        if args.fuzz:
            return self._fuzz()
        if not args.env:
            raise Error("epiplexity needs --env or --fuzz")
        env, learner, ledger = epiplexity.load_episode_spec(codec.load_json(args.env))
        episode = epiplexity.build_episode_joint(env, learner)
        quantizers = None
        if args.quantizers:
            with codec.decoding("Quantizer file"):
                quantizers = dict((k, Quantizer.decode(v)) for k, v in codec.load_json(args.quantizers).items())
        delta = epiplexity.acquired_epiplexity(episode)
        delta_eps = epiplexity.acquired_epiplexity(episode, quantizers) if quantizers else None
        dpi = epiplexity.dpi_verdict(episode)
        change = epiplexity.epiplexity_change(episode)
        joint = episode.joint
        dH = entropy(joint.distribution("W_post")) - entropy(joint.distribution("W_pre"))
        dS = thermo.shannon_to_physical(dH)
        verdicts = [dpi]
        efficiency = None
        if ledger is not None:
            efficiency = epiplexity.learning_efficiency(delta, ledger, dS)
            verdicts.append(thermo.corollary_check(delta, dS, ledger.Q_diss, ledger.temperature))
            balance = thermo.balance_residual(ledger)
            energy_terms = {"ledger": ledger.encode(), "residual_J": balance.residual,
                            "consistent": balance.consistent,
                            "E_cons_approximates_Q_diss": balance.approximation_justified,
                            "negligibility_fraction": balance.negligibility}
        else:
            energy_terms = "no ledger declared; efficiency not evaluated"
        coarse = {"quantizers": dict((k, q.describe()) for k, q in sorted(quantizers.items()))} if quantizers \
            else {"quantizers": "none, finite alphabets"}
        checklist = self._checklist(
            accounting_boundary="learner state W; environment latent Z declared in the benchmark file",
            energy_balance_terms=energy_terms,
            baseline_policy={"null_action": None, "baseline_energy_J": 0.0, "convention": "declared ledger"},
            coarse_graining=coarse,
            horizon_sampling={"episode": "one record X per episode", "policy_class": "passive",
                              "reset": "learner drawn from its initial distribution"},
            time_throughput={"note": TIME_THROUGHPUT_NOTE},
            estimator_details={"epiplexity": "exact enumeration of I(W_post;Z|W_pre)"})
        normative = {"delta_I_bits": delta, "delta_I_eps_bits": delta_eps,
                     "I_W_pre_Z_bits": change.before, "I_W_post_Z_bits": change.after,
                     "signed_change_bits": change.signed_change, "dpi_bound_bits": dpi.rhs}
        rep = report.build_report(checklist, efficiency=efficiency, verdicts=verdicts, flags=self.flags,
                                  normative=normative)
        return self._emit(rep)

    def _fuzz(self):
        args = self.args
        results = epiplexity.dpi_fuzz(args.fuzz, args.seed)
        worst = max(delta - bound for delta, bound in results)
        self._write_json("fuzz.json", {"flags": self.flags, "cases": len(results),
                                       "largest_excess_bits": worst,
                                       "cases_detail": [{"delta_I_bits": d, "bound_bits": b} for d, b in results]})
        self._print("data processing held on %d episodes, largest excess %.3g bits" % (len(results), worst))
        return EXIT_OK

    def run_mdl(self):
        args = self.args
        stream = mdlproxy.load_tokens(args.tokens)
        budget = mdlproxy.ModelBudget(args.max_order, args.resolution_bits)
        result = mdlproxy.two_part_mdl(stream, budget)
        n = len(stream)
        ell0 = args.ell0 if args.ell0 is not None else mdlproxy.baseline_bits_per_token(stream)
        ell = result.L_X_given_M / n
        gain = mdlproxy.compression_gain(ell0, ell, n)
        out = {"flags": self.flags, "budget": budget.describe(), "mdl": result,
               "prequential_bits": dict((str(k), mdlproxy.prequential_code_length(stream, k))
                                        for k in range(args.max_order + 1)),
               "tokens": n, "baseline_bits_per_token": ell0, "model_bits_per_token": ell,
               "compression_gain_bits": gain,
               "eta_e_mdl_bits_per_J": mdlproxy.eta_e_mdl(gain, args.E_train) if args.E_train else None}
        self._write_json("mdl.json", out)
        self._print("order %d: L_M %.6g bits, L_X|M %.6g bits, total %.6g bits"
                    % (result.chosen_order, result.L_M, result.L_X_given_M, result.total))
        return EXIT_OK

    def run_thermo_check(self):
        args = self.args
        if not args.ledger and not args.process:
            raise Error("thermo-check needs --ledger or --process")
        out = {"flags": self.flags}
        verdicts = []
        if args.ledger:
            ledger = thermo.EnergyLedger.decode(codec.load_json(args.ledger))
            balance = thermo.balance_residual(ledger, args.negligibility)
            out["balance"] = balance
            out["landauer"] = thermo.landauer_scale(ledger.temperature)
            out["entropy_production"] = thermo.entropy_production(args.dS_sys, ledger.Q_diss, ledger.temperature)
            verdicts.append(thermo.corollary_check(args.delta_I, args.dS_sys, ledger.Q_diss, ledger.temperature))
        if args.process:
            process = thermosim.BipartiteProcess.decode(codec.load_json(args.process))
            trace = thermosim.propagate_episode(process, args.duration)
            out["trace"] = trace
            verdicts.extend(thermosim.verify_learning_inequality(trace))
        out["verdicts"] = verdicts
        self._write_json("thermo.json", out)
        for v in verdicts:
            self._print("%s %s: slack %.6g %s" % ("ok       " if v.satisfied else "VIOLATION", v.label, v.slack, v.units))
        return self._verdict_exit(verdicts)

    def run_decouple_demo(self):
        args = self.args
        if args.z_dist:
            z_dist = FiniteDistribution.decode(codec.load_json(args.z_dist))
            protocol = thermosim.RegisterProtocol(args.n, z_dist, args.boundary, args.T)
        else:
            protocol = thermosim.RegisterProtocol.uniform(args.n, args.boundary, args.T)
        outcome = thermosim.run_register_protocol(protocol)
        eta = "unbounded" if outcome.unbounded else "= %.6g bits/J" % outcome.eta_tilde
        self._print("\u0394I = %.6g bits, Q_diss = %.6g J, \u03b7\u0303 %s" % (outcome.delta_I, outcome.Q_diss, eta))
        self._print("caveat: %s" % outcome.caveat)
        self._write_json("decouple.json", {"flags": self.flags, "outcome": outcome,
                                           "landauer": thermo.landauer_scale(args.T)})
        return EXIT_OK

    def run_scaling(self):
        args = self.args
        fit = mdlproxy.fit_scaling(mdlproxy.load_scaling_points(args.points), args.kappa)
        at = args.at or []
        out = {"flags": self.flags, "fit": fit,
               "marginal_bits_per_J": [{"C": c, "bits_per_J": mdlproxy.marginal_bits_per_joule(fit, c, args.N)}
                                       for c in at]}
        self._write_json("scaling.json", out)
        self._print("ell_inf %.6g, a %.6g, alpha %.6g, residual %.3g" % (fit.ell_inf, fit.a, fit.alpha, fit.residual_norm))
        if fit.warning:
            self._print("warning: %s" % fit.warning)
        return EXIT_OK

    def run_report_validate(self):
        obj = codec.load_json(self.args.path)
        if isinstance(obj, dict) and "schema_version" not in obj and set(obj) <= set(CHECKLIST_SECTIONS):
            violations = report.validate(report.ReportingChecklist.decode(obj))
            rep = None
        else:
            rep = report.EfficiencyReport.decode(obj)
            violations = rep.violations()
        for v in violations:
            self._print("VIOLATION %s" % v.message)
        if violations:
            return EXIT_VALIDATION
        self._print("valid")
        return self._verdict_exit(rep.bound_verdicts if rep else [])


def run(argv=None, stdout=None):
    """Parses arguments and runs one subcommand. Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(message)s')
    try:
        return Commands(args, stdout).run()
    except Error as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_VALIDATION


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
