"""
Operational epiplexity through code lengths.

Models are k-th order Markov chains over a token alphabet. Two-part MDL
charges the parameters of the best order, prequential coding charges the
sequential Krichevsky-Trofimov predictions. The scaling helpers fit
ell(C) = ell_inf + a*C^(-alpha) and turn it into marginal bits per joule.
"""
import collections
import csv
import logging
import math

import numpy as np
import scipy.optimize

from sweep import default_runner
from joulebits import codec
from joulebits.constants import MAX_MODEL_PARAMETERS, FIT_RESIDUAL_WARNING
from joulebits.types import ValidationError, SpecParseError, MdlCandidate

MODEL_CLASS = "k-th order Markov chains"
"""The model class the resource budget is expressed in."""


class TokenStream(object):
    """A finite token sequence over a declared alphabet."""

    def __init__(self, alphabet, tokens):
        self.alphabet = tuple(alphabet)
        self.tokens = tuple(tokens)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("Alphabet symbols must be distinct")
        if not self.tokens:
            raise ValidationError("A token stream needs at least one token")
        index = {a: i for i, a in enumerate(self.alphabet)}
        try:
            self.indices = np.array([index[t] for t in self.tokens], dtype=np.int64)
        except KeyError as e:
            raise ValidationError("Token %s is not in the alphabet" % e)

    def __len__(self):
        return len(self.tokens)

    @classmethod
    def from_text(cls, text, alphabet=None):
        """One symbol per character. The alphabet defaults to the sorted symbols present."""
        symbols = list(text)
        return cls(alphabet if alphabet is not None else sorted(set(symbols)), symbols)

    @classmethod
    def from_json(cls, obj):
        """Accepts a token array or an object with 'tokens' and optional 'alphabet'."""
        with codec.decoding("Token stream"):
            if isinstance(obj, list):
                return cls(sorted(set(obj), key=str), obj)
            tokens = obj["tokens"]
            return cls(obj.get("alphabet") or sorted(set(tokens), key=str), tokens)


class ModelBudget(object):
    """The resource budget B: the largest Markov order and the parameter precision."""

    def __init__(self, max_order, param_resolution_bits=None, notes=""):
        if int(max_order) != max_order or max_order < 0:
            raise ValidationError("Maximum order must be a nonnegative integer")
        if param_resolution_bits is not None and (int(param_resolution_bits) != param_resolution_bits
                                                  or param_resolution_bits < 1):
            raise ValidationError("Parameter resolution must be a positive number of bits")
        self.max_order = int(max_order)
        self.param_resolution_bits = param_resolution_bits
        self.notes = notes

    def parameter_count(self, alphabet_size, order):
        return (alphabet_size - 1) * alphabet_size ** order

    def describe(self):
        resolution = "asymptotic (params/2)*log2 N" if self.param_resolution_bits is None \
            else "%d bits per parameter" % self.param_resolution_bits
        text = "%s up to order %d, parameter cost %s" % (MODEL_CLASS, self.max_order, resolution)
        return text + ("; " + self.notes if self.notes else "")

    def encode(self):
        return {"max_order": self.max_order, "param_resolution_bits": self.param_resolution_bits,
                "notes": self.notes}


class MdlReport(object):
    """Two-part code of the best order: structure bits L_M plus data bits L_X_given_M."""

    def __init__(self, L_M, L_X_given_M, chosen_order, candidates=()):
        self.L_M = float(L_M)
        self.L_X_given_M = float(L_X_given_M)
        self.total = self.L_M + self.L_X_given_M
        self.chosen_order = chosen_order
        self.candidates = list(candidates)

    def encode(self):
        return {"L_M_bits": self.L_M, "L_X_given_M_bits": self.L_X_given_M, "total_bits": self.total,
                "chosen_order": self.chosen_order, "model_class": MODEL_CLASS,
                "candidates": [c._asdict() for c in self.candidates]}

    @classmethod
    def decode(cls, obj):
        return cls(obj["L_M_bits"], obj["L_X_given_M_bits"], obj["chosen_order"],
                   [MdlCandidate(**c) for c in obj.get("candidates", [])])


def _contexts(indices, order):
    """Context key of every position; the first ``order`` positions get their shorter prefix."""
    seq = indices.tolist()
    return [tuple(seq[max(0, i - order):i]) for i in range(len(seq))]


def prequential_code_length(s, order):
    """Sequential KT code length of the stream in bits.

    Each token is coded with (n_a + 1/2) / (n + |A|/2) given the counts of its
    length-``order`` context seen so far.
    """
    if int(order) != order or order < 0:
        raise ValidationError("Order must be a nonnegative integer")
    size = len(s.alphabet)
    counts = collections.defaultdict(lambda: np.zeros(size))
    bits = 0.0
    for ctx, symbol in zip(_contexts(s.indices, int(order)), s.indices.tolist()):
        table = counts[ctx]
        bits -= math.log2((table[symbol] + 0.5) / (table.sum() + 0.5 * size))
        table[symbol] += 1.0
    return bits


def _quantized(probs, observed, resolution_bits):
    grid = 2.0 ** resolution_bits
    levels = np.round(probs * grid)
    levels = np.where(observed & (levels < 1), 1.0, levels)
    return levels / levels.sum()


def _data_code_length(s, order, resolution_bits):
    size = len(s.alphabet)
    seq = s.indices
    if order >= len(seq):
        return len(seq) * math.log2(size)
    bits = order * math.log2(size)
    counts = collections.defaultdict(lambda: np.zeros(size))
    for i in range(order, len(seq)):
        counts[tuple(seq[i - order:i].tolist())][seq[i]] += 1.0
    for table in counts.values():
        observed = table > 0
        probs = table / table.sum()
        if resolution_bits is not None:
            probs = _quantized(probs, observed, resolution_bits)
        bits -= float(np.sum(table[observed] * np.log2(probs[observed])))
    return max(0.0, bits)


def two_part_mdl(s, b, runner=None):
    """Resource-bounded two-part MDL over Markov orders 0..max_order.

    L(M) is (params/2)*log2 N, or params times the parameter resolution
    when one is set, plus log2(max_order + 1) bits to name the order.
    L(X|M) is the maximum-likelihood code length, with the first ``order``
    tokens coded uniformly.

    Returns:
        MdlReport: the minimizing order; ties go to the lower order.
    """
    size = len(s.alphabet)
    n = len(s)
    for order in range(b.max_order + 1):
        if b.parameter_count(size, order) > MAX_MODEL_PARAMETERS:
            raise ValidationError("Order %d needs %d parameters, more than %d"
                                  % (order, b.parameter_count(size, order), MAX_MODEL_PARAMETERS))
    order_code = math.log2(b.max_order + 1)

    def candidate(order):
        params = b.parameter_count(size, order)
        if b.param_resolution_bits is None:
            structure = 0.5 * params * math.log2(n) if n > 1 else 0.0
        else:
            structure = params * b.param_resolution_bits
        return MdlCandidate(order, structure + order_code, _data_code_length(s, order, b.param_resolution_bits))

    runner = runner or default_runner()
    candidates = runner.map(candidate, range(b.max_order + 1))
    best = min(candidates, key=lambda c: (c.L_M + c.L_X_given_M, c.order))
    logging.info("Two-part MDL chose order %d, %.6g + %.6g bits" % (best.order, best.L_M, best.L_X_given_M))
    return MdlReport(best.L_M, best.L_X_given_M, best.order, candidates)


def baseline_bits_per_token(s):
    """Uniform code length log2 |alphabet|."""
    return math.log2(len(s.alphabet))


def compression_gain(ell0, ell, N):
    """N*(ell0 - ell) in bits; negative when the model codes worse than the baseline."""
    if N < 1:
        raise ValidationError("Token count must be at least 1")
    return N * (ell0 - ell)


class ScalingFit(object):
    """ell(C) = ell_inf + a*C^(-alpha) with training energy kappa*C joules."""

    def __init__(self, ell_inf, a, alpha, kappa, residual_norm=0.0, warning=None):
        if not ell_inf >= 0 or not a > 0 or not alpha > 0 or not kappa > 0:
            raise ValidationError("Scaling fit needs ell_inf >= 0 and positive a, alpha, kappa; got %r %r %r %r"
                                  % (ell_inf, a, alpha, kappa))
        self.ell_inf = float(ell_inf)
        self.a = float(a)
        self.alpha = float(alpha)
        self.kappa = float(kappa)
        self.residual_norm = float(residual_norm)
        self.warning = warning

    def predict(self, C):
        return self.ell_inf + self.a * np.power(C, -self.alpha)

    def encode(self):
        return {"ell_inf": self.ell_inf, "a": self.a, "alpha": self.alpha, "kappa_J_per_unit": self.kappa,
                "residual_norm": self.residual_norm, "warning": self.warning}


def _power_law(log_c, ell, ell_inf):
    gap = ell - ell_inf
    slope, intercept = np.polyfit(log_c, np.log(gap), 1, w=gap / ell)
    return -slope, math.exp(intercept)


def fit_scaling(points, kappa):
    """Fits a power law with an offset to (C, ell) points.

    A bounded scalar search over ell_inf in [0, min ell) is combined with a
    weighted regression of log(ell - ell_inf) on log C; the search minimizes
    the relative residual in ell.

    Args:
        points (list of tuple): (compute units, bits per token), at least four.
        kappa (float): Declared joules per compute unit.

    Raises:
        joulebits.types.ValidationError: On fewer than four points or non-monotone data.
    """
    points = [(float(c), float(e)) for c, e in points]
    if len(points) < 4:
        raise ValidationError("Scaling fit needs at least four points")
    C = np.array([p[0] for p in points])
    ell = np.array([p[1] for p in points])
    if not np.all(np.isfinite(C)) or not np.all(np.isfinite(ell)) or np.any(C <= 0) or np.any(ell <= 0):
        raise ValidationError("Compute and loss values must be positive and finite")
    if np.any(np.diff(C) <= 0):
        raise ValidationError("Compute values must be strictly increasing")
    if np.any(np.diff(ell) >= 0):
        raise ValidationError("Loss values must be strictly decreasing")
    log_c = np.log(C)

    def objective(ell_inf):
        alpha, a = _power_law(log_c, ell, ell_inf)
        return float(np.sum(((ell_inf + a * C ** -alpha - ell) / ell) ** 2))

    upper = float(ell.min()) * (1.0 - 1e-12)
    result = scipy.optimize.minimize_scalar(objective, bounds=(0.0, upper), method='bounded',
                                            options={'xatol': 1e-13 * max(1.0, upper), 'maxiter': 2000})
    candidates = [(result.fun, result.x), (objective(0.0), 0.0)]
    _, ell_inf = min(candidates)
    alpha, a = _power_law(log_c, ell, ell_inf)
    residual = math.sqrt(objective(ell_inf) / len(points))
    warning = None
    if residual > FIT_RESIDUAL_WARNING:
        warning = "relative residual %.3g above %.3g; power law fits poorly" % (residual, FIT_RESIDUAL_WARNING)
        logging.warning("Scaling fit: %s" % warning)
    return ScalingFit(ell_inf, a, alpha, kappa, residual, warning)


def marginal_bits_per_joule(f, C, N):
    """N*a*alpha*C^(-(alpha+1))/kappa, the bits per joule of one more unit of compute."""
    if not C > 0:
        raise ValidationError("Compute must be positive")
    return N * f.a * f.alpha * C ** (-(f.alpha + 1.0)) / f.kappa


def eta_e_mdl(gain, E_train):
    """Compression gain per joule of training energy, sign preserved."""
    if not E_train > 0:
        raise ValidationError("Training energy must be positive, got %r J" % E_train)
    return gain / E_train


def load_scaling_points(path):
    """Reads 'C,ell_bits_per_token' rows from a CSV file."""
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            reader = csv.DictReader(f)
            rows = list(reader)
    except (OSError, UnicodeDecodeError) as e:
        raise SpecParseError("%s: %s" % (path, e), path)
    if not reader.fieldnames or not {"C", "ell_bits_per_token"} <= set(reader.fieldnames):
        raise SpecParseError("%s:1: expected columns C,ell_bits_per_token" % path, "%s:1" % path)
    points = []
    for line, row in enumerate(rows, start=2):
        try:
            points.append((float(row["C"]), float(row["ell_bits_per_token"])))
        except (KeyError, TypeError, ValueError):
            raise SpecParseError("%s:%d: expected columns C,ell_bits_per_token" % (path, line), "%s:%d" % (path, line))
    return points


def load_tokens(path):
    """Reads a token stream: a JSON file when the name ends in .json, else one token per character.

    Raises:
        joulebits.types.SpecParseError: If the file is missing or unreadable.
    """
    if path.endswith(".json"):
        return TokenStream.from_json(codec.load_json(path))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise SpecParseError("%s: %s" % (path, e), path)
    return TokenStream.from_text(text.rstrip("\n"))
