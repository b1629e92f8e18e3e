"""
Energy accounting and Landauer-scale bound checks.

A declared ledger splits consumed energy as
E_cons = Q_diss + dU_sys + W_out + dE_store at a bath temperature T. The
checks here audit stated numbers and return verdicts, they never raise on
physically impossible values.
"""
import logging
import math

from joulebits import codec
from joulebits.constants import (BOLTZMANN, LN2, NEGLIGIBILITY_FRACTION, INFORMATION_TOLERANCE)
from joulebits.types import (ValidationError, BoundVerdict, LandauerBenchmark, BalanceCheck,
                             EntropyProduction)

BALANCE_TOLERANCE = 1e-9
"""Relative tolerance of the energy balance, as a fraction of the largest ledger term."""


class EnergyLedger(object):
    """Declared energy terms of an episode, in joules, at temperature T in kelvin."""

    FIELDS = ("E_cons_J", "Q_diss_J", "dU_sys_J", "W_out_J", "dE_store_J", "T_K")

    def __init__(self, E_cons, Q_diss, dU_sys=0.0, W_out=0.0, dE_store=0.0, temperature=300.0,
                 tolerance=BALANCE_TOLERANCE):
        self.E_cons = float(E_cons)
        self.Q_diss = float(Q_diss)
        self.dU_sys = float(dU_sys)
        self.W_out = float(W_out)
        self.dE_store = float(dE_store)
        self.temperature = float(temperature)
        self.tolerance = tolerance
        values = (self.E_cons, self.Q_diss, self.dU_sys, self.W_out, self.dE_store, self.temperature)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("Ledger terms must be finite")
        if self.temperature <= 0:
            raise ValidationError("Temperature must be positive, got %r K" % self.temperature)
        if self.E_cons < 0:
            raise ValidationError("Consumed energy must be nonnegative, got %r J" % self.E_cons)

    def residual(self):
        return self.E_cons - (self.Q_diss + self.dU_sys + self.W_out + self.dE_store)

    def is_consistent(self):
        scale = max(abs(self.E_cons), abs(self.Q_diss), abs(self.dU_sys), abs(self.W_out),
                    abs(self.dE_store), 1e-300)
        return abs(self.residual()) <= self.tolerance * scale

    def encode(self):
        return {"E_cons_J": self.E_cons, "Q_diss_J": self.Q_diss, "dU_sys_J": self.dU_sys,
                "W_out_J": self.W_out, "dE_store_J": self.dE_store, "T_K": self.temperature}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Ledger"):
            unknown = sorted(set(obj) - set(cls.FIELDS))
            if unknown:
                raise ValidationError("Unknown ledger fields %s" % unknown)
            return cls(obj["E_cons_J"], obj["Q_diss_J"], obj.get("dU_sys_J", 0.0), obj.get("W_out_J", 0.0),
                       obj.get("dE_store_J", 0.0), obj.get("T_K", 300.0))


def landauer_scale(T):
    """Joules per bit k_B*T*ln2 and its reciprocal at temperature T.

    Raises:
        joulebits.types.ValidationError: If T is not positive.
    """
    if not T > 0 or not math.isfinite(T):
        raise ValidationError("Temperature must be positive, got %r K" % T)
    joules = BOLTZMANN * T * LN2
    return LandauerBenchmark(float(T), joules, 1.0 / joules)


def balance_residual(ledger, negligibility=NEGLIGIBILITY_FRACTION):
    """Energy balance residual and whether E_cons ~ Q_diss is justified.

    The approximation is justified when the ledger balances and each of
    dU_sys, W_out and dE_store is below ``negligibility`` times E_cons.
    """
    residual = ledger.residual()
    consistent = ledger.is_consistent()
    limit = negligibility * abs(ledger.E_cons)
    small = all(abs(v) <= limit for v in (ledger.dU_sys, ledger.W_out, ledger.dE_store))
    if not consistent:
        logging.warning("Ledger does not balance, residual %.6g J" % residual)
    return BalanceCheck(residual, consistent, consistent and small, negligibility)


def shannon_to_physical(delta_H_bits):
    """Physical entropy change k_B*ln2*dH in J/K of a Shannon entropy change in bits."""
    return BOLTZMANN * LN2 * delta_H_bits


def entropy_production(dS_sys, Q_diss, T):
    """Total entropy production dS_sys + Q_diss/T in J/K, also divided by k_B and by k_B*ln2."""
    if not T > 0:
        raise ValidationError("Temperature must be positive, got %r K" % T)
    sigma = dS_sys + Q_diss / T
    return EntropyProduction(sigma, sigma / BOLTZMANN, sigma / (BOLTZMANN * LN2))


def _verdict(label, lhs, rhs, tolerance, units, note=None):
    slack = rhs - lhs
    return BoundVerdict(label, lhs, rhs, bool(lhs <= rhs + tolerance), slack, units, note)


def corollary_check(delta_I, dS_sys, Q_diss, T):
    """Checks Q_diss >= k_B*T*ln2*delta_I - T*dS_sys.

    In the closed-cycle case dS_sys = 0 the note compares delta_I/Q_diss with 1/(k_B*T*ln2).
    """
    bench = landauer_scale(T)
    lhs = bench.joules_per_bit * delta_I - T * dS_sys
    note = None
    if dS_sys == 0:
        if Q_diss > 0:
            note = "closed cycle: eta_tilde=%.6g bits/J against Landauer %.6g bits/J" % (
                delta_I / Q_diss, bench.bits_per_joule)
        else:
            note = "closed cycle: no dissipated heat"
    return _verdict("landauer corollary", lhs, Q_diss, INFORMATION_TOLERANCE * bench.joules_per_bit, "J", note)


def closed_cycle_budget(dI_agent, dI_env, Sigma_tot):
    """Checks dI_agent + dI_env <= Sigma_tot/(k_B*ln2) as a conceptual yardstick.

    A negative Sigma_tot breaks the second law and always fails.
    """
    rhs = Sigma_tot / (BOLTZMANN * LN2)
    if Sigma_tot < 0:
        return BoundVerdict("closed-cycle information budget", dI_agent + dI_env, rhs, False,
                            rhs - (dI_agent + dI_env), "bits",
                            "negative total entropy production %r J/K" % Sigma_tot)
    return _verdict("closed-cycle information budget", dI_agent + dI_env, rhs,
                    INFORMATION_TOLERANCE, "bits", "conceptual yardstick, not a universal identity")


def control_work_check(delta_I_env, work, T):
    """Order-of-magnitude check that work >= k_B*T*ln2 per bit written into the environment.

    The constant factors of this bound are not known, so the verdict only
    fails when the work is more than ten times below the Landauer scale.
    """
    bench = landauer_scale(T)
    rhs = work
    lhs = 0.1 * bench.joules_per_bit * delta_I_env
    return _verdict("control work (heuristic)", lhs, rhs, 0.0, "J",
                    "order of magnitude only; constant factors unspecified")


def landauer_fraction(eta, T):
    """Bits per joule as a fraction of the Landauer limit 1/(k_B*T*ln2). None passes through."""
    if eta is None:
        return None
    return eta * landauer_scale(T).joules_per_bit
