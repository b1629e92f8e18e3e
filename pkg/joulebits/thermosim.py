"""
Exactly solvable stochastic-thermodynamics testbeds.

A bipartite process holds one data symbol X fixed per episode while the
learner state W relaxes under a master equation whose rates satisfy local
detailed balance with energy E(w, x). Propagation uses matrix exponentials,
so every verdict is deterministic.

The XOR register protocol copies a latent word into a blank register with
the reversible map (z, m) -> (z, m XOR z).
"""
import collections
import logging
import math

import numpy as np
import scipy.linalg

from sweep import default_runner
from joulebits import codec
from joulebits.constants import (BOLTZMANN, LN2, INFORMATION_TOLERANCE, PROBABILITY_TOLERANCE,
                                 HEAT_MISMATCH_TOLERANCE, MAX_PROCESS_STATES, MAX_REGISTER_BITS,
                                 DEFAULT_TEMPERATURE, OPEN, CLOSED, BOUNDARIES)
from joulebits.probcore import FiniteDistribution, JointTable, conditional_mi, entropy
from joulebits.types import ValidationError, CapacityError, BoundVerdict, RegisterOutcome

DETAILED_BALANCE_TOLERANCE = 1e-9
"""Relative tolerance on rate ratios when checking local detailed balance."""

OPEN_BOUNDARY_CAVEAT = ("dissipation vanishes only in the quasistatic limit, "
                        "at diverging operation time")


class BipartiteProcess(object):
    """Learner states W coupled to a data symbol X through an energy E(w, x) in joules.

    Attributes:
        rates (numpy.ndarray): rates[x, w, w'] is the jump rate w -> w' in 1/s.
    """

    def __init__(self, w_states, x_states, energy, data_dist, w_rate_scale, temperature, w_init, rates=None):
        self.w_states = tuple(w_states)
        self.x_states = tuple(x_states)
        nw, nx = len(self.w_states), len(self.x_states)
        if nw > MAX_PROCESS_STATES or nx > MAX_PROCESS_STATES:
            raise CapacityError("Exact propagation supports at most %d states per subsystem" % MAX_PROCESS_STATES)
        self.energy = np.array(energy, dtype=float)
        if self.energy.shape != (nw, nx) or not np.all(np.isfinite(self.energy)):
            raise ValidationError("Energy table must be finite with shape %s" % ((nw, nx),))
        self.data_dist = data_dist if isinstance(data_dist, FiniteDistribution) else FiniteDistribution(self.x_states, data_dist)
        self.w_init = w_init if isinstance(w_init, FiniteDistribution) else FiniteDistribution(self.w_states, w_init)
        if self.data_dist.outcomes != self.x_states or self.w_init.outcomes != self.w_states:
            raise ValidationError("Distributions must be over the declared states")
        if not w_rate_scale > 0:
            raise ValidationError("Rate scale must be positive")
        if not temperature > 0:
            raise ValidationError("Temperature must be positive")
        self.w_rate_scale = float(w_rate_scale)
        self.temperature = float(temperature)
        kT = BOLTZMANN * self.temperature
        if rates is None:
            # rates[x, w, w'] = scale * exp(-(E(w') - E(w)) / 2kT)
            diff = self.energy.T[:, None, :] - self.energy.T[:, :, None]
            rates = self.w_rate_scale * np.exp(-diff / (2.0 * kT))
            for k in range(nx):
                np.fill_diagonal(rates[k], 0.0)
        self.rates = np.array(rates, dtype=float)
        self._check_detailed_balance(kT)

    def _check_detailed_balance(self, kT):
        nw, nx = len(self.w_states), len(self.x_states)
        if self.rates.shape != (nx, nw, nw) or np.any(self.rates < 0) or not np.all(np.isfinite(self.rates)):
            raise ValidationError("Rates must be nonnegative with shape %s" % ((nx, nw, nw),))
        for k in range(nx):
            for i in range(nw):
                for j in range(i + 1, nw):
                    forward, backward = self.rates[k, i, j], self.rates[k, j, i]
                    expected = math.exp(-(self.energy[j, k] - self.energy[i, k]) / kT)
                    if forward == 0 and backward == 0:
                        continue
                    if forward == 0 or backward == 0 or \
                            abs(forward / backward - expected) > DETAILED_BALANCE_TOLERANCE * expected:
                        raise ValidationError("Rates %r <-> %r at x=%r violate local detailed balance"
                                              % (self.w_states[i], self.w_states[j], self.x_states[k]))

    def generator(self, k):
        """Rate matrix for data symbol index k, acting on row vectors."""
        R = self.rates[k].copy()
        np.fill_diagonal(R, 0.0)
        np.fill_diagonal(R, -R.sum(axis=1))
        return R

    def gibbs(self, k):
        """Equilibrium distribution of W for data symbol index k."""
        e = self.energy[:, k] / (BOLTZMANN * self.temperature)
        w = np.exp(-(e - e.min()))
        return w / w.sum()

    def stationary_mixture(self):
        """sum_x p(x) Gibbs_x, the closed-cycle starting point."""
        return sum(p * self.gibbs(k) for k, p in enumerate(self.data_dist.probs))

    def with_init(self, w_init):
        return BipartiteProcess(self.w_states, self.x_states, self.energy, self.data_dist,
                                self.w_rate_scale, self.temperature, w_init, self.rates)

    def encode(self):
        return {"w_states": list(self.w_states), "x_states": list(self.x_states),
                "E_J": {"%s,%s" % (w, x): float(self.energy[i, k])
                        for i, w in enumerate(self.w_states) for k, x in enumerate(self.x_states)},
                "data_dist": self.data_dist.probs.tolist(), "T_K": self.temperature,
                "rate_scale_hz": self.w_rate_scale, "w_init": self.w_init.probs.tolist()}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Process spec"):
            table = obj["E_J"]
            pairs = [key.split(",", 1) for key in table]
            if any(len(p) != 2 for p in pairs):
                raise ValidationError("Energy keys must read 'w,x'")
            w_states = obj.get("w_states") or list(dict.fromkeys(p[0] for p in pairs))
            x_states = obj.get("x_states") or list(dict.fromkeys(p[1] for p in pairs))
            energy = [[table["%s,%s" % (w, x)] for x in x_states] for w in w_states]
            return cls(w_states, x_states, energy, obj["data_dist"], obj.get("rate_scale_hz", 1.0),
                       obj.get("T_K", DEFAULT_TEMPERATURE), obj["w_init"])


def two_state_process(gap_kT, rate_scale=1.0, T=DEFAULT_TEMPERATURE, data_dist=(0.5, 0.5), w_init=None):
    """Two learner states and two data symbols, aligned pairs w = x lower by gap_kT * k_B * T.

    Without ``w_init`` the process starts from its stationary mixture.
    """
    kT = BOLTZMANN * T
    energy = [[0.0, gap_kT * kT], [gap_kT * kT, 0.0]]
    process = BipartiteProcess((0, 1), (0, 1), energy, list(data_dist), rate_scale, T, (0.5, 0.5))
    if w_init is None:
        w_init = process.stationary_mixture()
    return process.with_init(list(w_init))


EpisodeTrace = collections.namedtuple('EpisodeTrace', 'duration joint_post Q_diss dS_sys info_flow '
                                                      'temperature stationary_init heat_integral')
"""
    One propagated episode. ``joint_post`` is over (W_pre, X, W_post), ``Q_diss``
    the energy-balance heat and ``heat_integral`` the integrated heat flux, both in J.
"""


def _integrated_propagator(R, t):
    """exp(R t) and its integral over [0, t] from one augmented exponential."""
    n = R.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = R
    block[:n, n:] = np.eye(n)
    full = scipy.linalg.expm(block * t)
    return full[:n, :n], full[:n, n:]


def propagate_episode(p, duration):
    """Relaxes W for ``duration`` seconds with each data symbol held fixed.

    Returns:
        EpisodeTrace: the exact post-episode joint, heat, entropy change and information flow.
    """
    if not duration >= 0 or not math.isfinite(duration):
        raise ValidationError("Duration must be a nonnegative number of seconds")
    nw, nx = len(p.w_states), len(p.x_states)
    p0 = p.w_init.probs
    cells = np.zeros((nw, nx, nw))
    heat_balance = heat_flux = 0.0
    for k, px in enumerate(p.data_dist.probs):
        R = p.generator(k)
        P, integral = _integrated_propagator(R, duration)
        P = np.clip(P, 0.0, None)
        P /= P.sum(axis=1, keepdims=True)
        cells[:, k, :] = p0[:, None] * px * P
        e = p.energy[:, k]
        heat_balance += px * (p0 @ e - (p0 @ P) @ e)
        heat_flux -= px * (p0 @ integral @ (R @ e))
    scale = BOLTZMANN * p.temperature
    if abs(heat_flux - heat_balance) > HEAT_MISMATCH_TOLERANCE * max(scale, abs(heat_balance)):
        logging.warning("Heat flux integral %.12g J differs from energy balance %.12g J" % (heat_flux, heat_balance))
    cells /= cells.sum()
    joint = JointTable(("W_pre", "X", "W_post"), (p.w_states, p.x_states, p.w_states), cells)
    h_pre = entropy(p.w_init)
    h_post = entropy(joint.distribution("W_post"))
    dS = BOLTZMANN * LN2 * (h_post - h_pre)
    info = conditional_mi(joint, "W_post", "X", "W_pre")
    stationary = bool(np.max(np.abs(p0 - p.stationary_mixture())) <= 1e-12)
    return EpisodeTrace(float(duration), joint, float(heat_balance), dS, info, p.temperature,
                        stationary, float(heat_flux))


def verify_learning_inequality(t, T=None):
    """Checks info_flow <= (dS_sys + Q_diss/T)/(k_B ln2).

    Traces started from the stationary mixture also get the closed-cycle
    check info_flow <= Q_diss/(k_B T ln2).

    Returns:
        list of BoundVerdict: the learning inequality first.
    """
    T = t.temperature if T is None else T
    if not T > 0:
        raise ValidationError("Temperature must be positive")
    bound = (t.dS_sys + t.Q_diss / T) / (BOLTZMANN * LN2)
    verdicts = [BoundVerdict("learning inequality", t.info_flow, bound,
                             bool(t.info_flow <= bound + INFORMATION_TOLERANCE), bound - t.info_flow, "bits", None)]
    if t.stationary_init:
        closed = t.Q_diss / (BOLTZMANN * T * LN2)
        verdicts.append(BoundVerdict("closed-cycle learning bound", t.info_flow, closed,
                                     bool(t.info_flow <= closed + INFORMATION_TOLERANCE), closed - t.info_flow,
                                     "bits", "stationary-mixture start, dS_sys ~ 0"))
    return verdicts


def learning_grid(gaps_kT, rate_scales, durations, T=DEFAULT_TEMPERATURE, runner=None):
    """Learning-inequality verdicts of two-state processes on a parameter grid.

    Returns:
        list: ((gap, rate, duration), verdicts) in grid order, gap outermost.
    """
    points = [(g, r, d) for g in gaps_kT for r in rate_scales for d in durations]

    def check(point):
        gap, rate, duration = point
        trace = propagate_episode(two_state_process(gap, rate, T), duration)
        return point, verify_learning_inequality(trace, T)

    runner = runner or default_runner()
    return runner.map(check, points)


def _word(outcome, n):
    if isinstance(outcome, str):
        if len(outcome) != n or set(outcome) - {"0", "1"}:
            raise ValidationError("Register word %r is not %d bits" % (outcome, n))
        return int(outcome, 2)
    value = int(outcome)
    if not 0 <= value < 2 ** n:
        raise ValidationError("Register word %r does not fit %d bits" % (outcome, n))
    return value


class RegisterProtocol(object):
    """An n-bit register, blank before the protocol, receiving a latent word Z."""

    def __init__(self, n, z_dist, boundary=OPEN, temperature=DEFAULT_TEMPERATURE):
        if int(n) != n or not 1 <= n <= MAX_REGISTER_BITS:
            raise ValidationError("Register width must be between 1 and %d bits, got %r" % (MAX_REGISTER_BITS, n))
        if boundary not in BOUNDARIES:
            raise ValidationError("Unknown boundary %r" % (boundary,))
        if not temperature > 0:
            raise ValidationError("Temperature must be positive")
        self.n = int(n)
        self.z_dist = z_dist
        self.words = np.array([_word(o, self.n) for o in z_dist.outcomes], dtype=np.int64)
        self.boundary = boundary
        self.temperature = float(temperature)
        self.m_pre = 0

    @classmethod
    def uniform(cls, n, boundary=OPEN, temperature=DEFAULT_TEMPERATURE, words=None):
        words = list(range(2 ** n)) if words is None else list(words)
        return cls(n, FiniteDistribution.uniform(words), boundary, temperature)


def _pair_information(a, b, probs):
    """I(A;B) in bits for paired samples with masses ``probs``."""
    def h(keys):
        _, inverse = np.unique(keys, return_inverse=True)
        mass = np.bincount(inverse, weights=probs)
        mass = mass[mass > 0]
        return float(-np.sum(mass * np.log2(mass)))
    return max(0.0, h(a) + h(b) - h(a * (2 ** MAX_REGISTER_BITS + 1) + b))


def run_register_protocol(r):
    """Applies (z, m) -> (z, m XOR z) to the blank register.

    Open boundary: the map is reversible, no heat is charged and the
    efficiency is unbounded. Closed boundary: the register reset costs
    n * k_B * T * ln2 joules per cycle.

    Returns:
        RegisterOutcome
    """
    probs = r.z_dist.probs
    m_pre = np.full_like(r.words, r.m_pre)
    m_post = np.bitwise_xor(m_pre, r.words)
    delta = _pair_information(m_post, r.words, probs) - _pair_information(m_pre, r.words, probs)
    if r.boundary == OPEN:
        logging.info("Open boundary register: %.6g bits acquired without dissipation" % delta)
        return RegisterOutcome(delta, 0.0, None, True, OPEN, OPEN_BOUNDARY_CAVEAT)
    heat = r.n * BOLTZMANN * r.temperature * LN2
    return RegisterOutcome(delta, heat, delta / heat, False, CLOSED,
                           "register reset charged at n*k_B*T*ln2 regardless of the word distribution")
