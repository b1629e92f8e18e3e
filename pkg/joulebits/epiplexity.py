"""
Acquired epiplexity of a learning episode.

An episode draws a latent environment instance Z, a data record X ~ p(x|z)
and updates the learner state W_pre -> W_post through a stochastic kernel.
The exact joint over (Z, W_pre, X, W_post) is enumerated densely, and the
new information about Z is the conditional mutual information
I(W_post; Z | W_pre).
"""
import itertools
import logging

import numpy as np

from sweep import default_runner
from sweep.seeds import generator
from joulebits import codec
from joulebits.constants import PROBABILITY_TOLERANCE, INFORMATION_TOLERANCE, MAX_EPISODE_CELLS
from joulebits.probcore import FiniteDistribution, JointTable, Quantizer, conditional_mi, mutual_information
from joulebits.thermo import EnergyLedger, landauer_fraction
from joulebits.types import (ValidationError, CapacityError, ConventionError, BoundVerdict, EfficiencyRecord,
                             EpiplexityChange)

EPISODE_VARIABLES = ("Z", "W_pre", "X", "W_post")


def label_key(label):
    """Text key of a label in JSON objects. Tuples are concatenated, so record (0, 1) is '01'."""
    if isinstance(label, (tuple, list)):
        return "".join(str(v) for v in label)
    return str(label)


def _distribution(value, outcomes, what):
    if isinstance(value, FiniteDistribution):
        if value.outcomes != tuple(outcomes):
            raise ValidationError("%s is over %s, expected %s" % (what, value.outcomes, tuple(outcomes)))
        return value
    return FiniteDistribution(outcomes, value)


def _check_rows(arr, what):
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError("%s has negative or non-finite entries" % what)
    sums = arr.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE):
        raise ValidationError("%s has a row summing to %.17g" % (what, sums.flat[np.argmax(np.abs(sums - 1.0))]))


class GenerativeEnv(object):
    """A latent variable Z with prior p(z) and a record model p(x|z)."""

    def __init__(self, latent, prior, records, obs_model):
        """
        Args:
            latent (list): Labels of Z.
            prior (FiniteDistribution or list of float): p(z).
            records (list): Labels of the data records X.
            obs_model (array-like): p(x|z), one row per latent value.
        """
        self.latent = tuple(latent)
        self.records = tuple(tuple(r) if isinstance(r, list) else r for r in records)
        self.prior = _distribution(prior, self.latent, "Prior")
        self.obs_model = np.array(obs_model, dtype=float)
        if self.obs_model.shape != (len(self.latent), len(self.records)):
            raise ValidationError("Observation model has shape %s, expected %s"
                                  % (self.obs_model.shape, (len(self.latent), len(self.records))))
        _check_rows(self.obs_model, "Observation model")
        self.obs_model.flags.writeable = False

    @classmethod
    def from_bernoulli(cls, biases, prior, n):
        """Biased-coin environment: Z is the heads probability, X is n flips."""
        records = list(itertools.product((0, 1), repeat=n))
        heads = np.array([sum(r) for r in records])
        rows = [np.power(b, heads) * np.power(1.0 - b, n - heads) for b in biases]
        rows = [row / row.sum() for row in rows]
        return cls(biases, prior, records, rows)

    def equivalent_latents(self):
        """Pairs of latent values with identical record distributions."""
        pairs = []
        for i, j in itertools.combinations(range(len(self.latent)), 2):
            if np.all(np.abs(self.obs_model[i] - self.obs_model[j]) <= PROBABILITY_TOLERANCE):
                pairs.append((self.latent[i], self.latent[j]))
        return pairs

    def encode(self):
        return {"latent": list(self.latent), "prior": self.prior.probs.tolist(),
                "records": [list(r) if isinstance(r, tuple) else r for r in self.records],
                "obs_model": {label_key(z): row.tolist() for z, row in zip(self.latent, self.obs_model)}}

    @classmethod
    def decode(cls, obj):
        latent = obj["latent"]
        rows = obj["obs_model"]
        try:
            matrix = [rows[label_key(z)] for z in latent]
        except KeyError as e:
            raise ValidationError("Observation model has no row for latent value %s" % e)
        records = obj.get("records", list(range(len(matrix[0]) if matrix else 0)))
        return cls(latent, obj["prior"], records, matrix)


class LearnerSpec(object):
    """A learner with states W, an initial distribution and an update kernel p(w_post|w_pre,x)."""

    def __init__(self, states, initial, records, update, ledger=None):
        self.states = tuple(states)
        self.records = tuple(tuple(r) if isinstance(r, list) else r for r in records)
        self.initial = _distribution(initial, self.states, "Initial learner distribution")
        self.update = np.array(update, dtype=float)
        shape = (len(self.states), len(self.records), len(self.states))
        if self.update.shape != shape:
            raise ValidationError("Update kernel has shape %s, expected %s" % (self.update.shape, shape))
        _check_rows(self.update, "Update kernel")
        self.update.flags.writeable = False
        self.ledger = ledger

    @classmethod
    def deterministic(cls, states, initial, records, rule, ledger=None):
        """Builds a learner whose next state is rule(w_pre, x)."""
        states = list(states)
        update = np.zeros((len(states), len(records), len(states)))
        for i, w in enumerate(states):
            for k, x in enumerate(records):
                update[i, k, states.index(rule(w, x))] = 1.0
        return cls(states, initial, records, update, ledger)

    def encode(self):
        obj = {"states": list(self.states), "initial": self.initial.probs.tolist(),
               "update": {}}
        for i, w in enumerate(self.states):
            for k, x in enumerate(self.records):
                obj["update"]["%s,%s" % (label_key(w), label_key(x))] = self.update[i, k].tolist()
        return obj

    @classmethod
    def decode(cls, obj, records, ledger=None):
        states = obj["states"]
        rows = obj["update"]
        update = []
        for w in states:
            block = []
            for x in records:
                key = "%s,%s" % (label_key(w), label_key(x))
                if key not in rows:
                    raise ValidationError("Update kernel has no row for %s" % key)
                block.append(rows[key])
            update.append(block)
        return cls(states, obj["initial"], records, update, ledger)


class EpisodeJoint(object):
    """The exact joint table over (Z, W_pre, X, W_post) of one episode."""

    def __init__(self, joint):
        missing = [v for v in EPISODE_VARIABLES if v not in joint.variables]
        if missing:
            raise ValidationError("Episode joint lacks variables %s" % missing)
        self.joint = joint.marginal(EPISODE_VARIABLES)

    def is_passive(self):
        """True when p = p(z) p(w_pre) p(x|z) p(w_post|w_pre,x) within 1e-12."""
        p = self.joint.cells
        p_zx = p.sum(axis=(1, 3))
        p_w = p.sum(axis=(0, 2, 3))
        p_wxv = p.sum(axis=0)
        p_wx = p_wxv.sum(axis=2, keepdims=True)
        with np.errstate(divide='ignore', invalid='ignore'):
            kernel = np.where(p_wx > 0, p_wxv / np.where(p_wx > 0, p_wx, 1.0), 0.0)
        rebuilt = np.einsum('zx,w,wxv->zwxv', p_zx, p_w, kernel)
        return bool(np.max(np.abs(rebuilt - p)) <= PROBABILITY_TOLERANCE)

    def encode(self):
        return self.joint.encode()

    @classmethod
    def decode(cls, obj):
        return cls(JointTable.decode(obj))


def build_episode_joint(env, learner):
    """Enumerates the episode joint from the factor kernels.

    Raises:
        joulebits.types.CapacityError: If |Z|*|W|^2*|X| exceeds the size guard.
    """
    if learner.records != env.records:
        raise ValidationError("Learner and environment disagree on the record alphabet")
    cells = len(env.latent) * len(learner.states) ** 2 * len(env.records)
    if cells > MAX_EPISODE_CELLS:
        raise CapacityError("Episode joint needs %d cells, more than %d" % (cells, MAX_EPISODE_CELLS))
    for a, b in env.equivalent_latents():
        logging.warning("Latent values %r and %r induce identical records; Z is not minimal" % (a, b))
    table = np.einsum('z,w,zx,wxv->zwxv', env.prior.probs, learner.initial.probs,
                      env.obs_model, learner.update)
    joint = JointTable(EPISODE_VARIABLES, [env.latent, learner.states, env.records, learner.states], table)
    episode = EpisodeJoint(joint)
    if not episode.is_passive():
        raise ValidationError("Episode kernels do not factor as a passive episode")
    return episode


def _coarse(joint, quantizers):
    if not quantizers:
        return joint
    quantizers = dict(quantizers)
    if "W" in quantizers:
        q = quantizers.pop("W")
        quantizers.setdefault("W_pre", q)
        quantizers.setdefault("W_post", q)
    for name in sorted(quantizers):
        if name not in EPISODE_VARIABLES:
            raise ValidationError("No episode variable %r to quantize" % name)
        q = quantizers[name]
        joint = joint.coarse_grain(name, q if isinstance(q, Quantizer) else Quantizer.decode(q))
    return joint


def acquired_epiplexity(j, quantizers=None):
    """I(W_post; Z | W_pre) in bits.

    Args:
        j (EpisodeJoint): The episode.
        quantizers (dict): Optional Quantizer per variable name. The key 'W'
            applies one quantizer to both learner states.
    """
    return conditional_mi(_coarse(j.joint, quantizers), "W_post", "Z", "W_pre")


def dpi_bound(j):
    """Acquired epiplexity and its data-processing bound I(X; Z | W_pre).

    Raises:
        joulebits.types.ConventionError: If X depends on W_pre, that is
            data generation was interactive and the policy class must be declared.
    """
    if not j.is_passive():
        raise ConventionError("Episode is not passively generated; declare the policy class "
                              "of the interactive data source")
    delta = conditional_mi(j.joint, "W_post", "Z", "W_pre")
    bound = conditional_mi(j.joint, "X", "Z", "W_pre")
    return delta, bound


def dpi_verdict(j):
    """The data-processing bound of an episode as a verdict, satisfied when delta_I <= I(X; Z | W_pre)."""
    delta, bound = dpi_bound(j)
    return BoundVerdict("data processing", delta, bound, bool(delta <= bound + INFORMATION_TOLERANCE),
                        bound - delta, "bits", None)


def epiplexity_change(j):
    """I(W_pre;Z), I(W_post;Z) and the signed difference, which is negative for forgetting learners."""
    before = mutual_information(j.joint, "W_pre", "Z")
    after = mutual_information(j.joint, "W_post", "Z")
    return EpiplexityChange(before, after, after - before)


def learning_efficiency(delta_I, ledger, dS_sys=0.0):
    """Bits per joule of consumed energy and of dissipated heat.

    Args:
        delta_I (float): Acquired epiplexity in bits.
        ledger (joulebits.thermo.EnergyLedger): Declared energy ledger.
        dS_sys (float): Entropy change of the learner in J/K, kept on the record.

    Raises:
        joulebits.types.ValidationError: If E_cons is not positive.
    """
    if not ledger.E_cons > 0:
        raise ValidationError("Consumed energy must be positive, got %r J" % ledger.E_cons)
    eta = delta_I / ledger.E_cons
    eta_tilde = fraction = None
    if ledger.Q_diss > 0:
        eta_tilde = delta_I / ledger.Q_diss
        fraction = landauer_fraction(eta_tilde, ledger.temperature)
    return EfficiencyRecord(delta_I, ledger.E_cons, ledger.Q_diss, eta, eta_tilde, fraction,
                            dS_sys, ledger.temperature)


def random_episode(rng, max_latent=3, max_records=4, max_states=3):
    """Draws a small passive environment and learner. Rows are Dirichlet draws, some made sparse."""
    def rows(shape):
        arr = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])
        if rng.random() < 0.3:
            arr = np.where(arr < 0.2, 0.0, arr)
            arr[arr.sum(axis=-1) == 0] = 1.0
            arr = arr / arr.sum(axis=-1, keepdims=True)
        return arr

    nz = int(rng.integers(2, max_latent + 1))
    nx = int(rng.integers(2, max_records + 1))
    nw = int(rng.integers(2, max_states + 1))
    env = GenerativeEnv(range(nz), rows((nz,)), range(nx), rows((nz, nx)))
    learner = LearnerSpec(range(nw), rows((nw,)), range(nx), rows((nw, nx, nw)))
    return env, learner


def dpi_fuzz(count, seed, runner=None):
    """Checks the data-processing bound on ``count`` random episodes.

    Episode i is drawn from stream i of the root seed.

    Returns:
        list of tuple: (delta_I, bound) per episode, in index order.
    """

    def check(index):
        env, learner = random_episode(generator(seed, index))
        return dpi_bound(build_episode_joint(env, learner))

    runner = runner or default_runner()
    return runner.map(check, range(count))


def load_episode_spec(obj):
    """Parses an environment file into (GenerativeEnv, LearnerSpec, EnergyLedger or None)."""
    with codec.decoding("Environment spec"):
        env = GenerativeEnv.decode(obj)
        ledger = EnergyLedger.decode(obj["ledger"]) if obj.get("ledger") is not None else None
        learner = LearnerSpec.decode(obj["learner"], env.records, ledger)
    return env, learner, ledger
