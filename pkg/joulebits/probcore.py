"""
Exact finite-alphabet probability tables and information measures.

All quantities are in bits. Tables are dense numpy arrays made read-only at
construction, so every object here can be shared between workers.
"""
import math

import numpy as np

from joulebits import codec
from joulebits.constants import (PROBABILITY_TOLERANCE, CLAMP_TO_EDGE, ERROR_POLICY,
                                 CLAMP_POLICIES)
from joulebits.types import ValidationError, UnknownVariableError, QuantizerRangeError


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _check_mass(arr, what):
    if not np.all(np.isfinite(arr)):
        raise ValidationError("%s contains non-finite mass" % what)
    if np.any(arr < 0):
        raise ValidationError("%s contains negative mass" % what)
    total = float(arr.sum())
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise ValidationError("%s sums to %.17g, expected 1" % (what, total))


class FiniteDistribution(object):
    """A probability distribution over a finite list of outcome labels."""

    def __init__(self, outcomes, probs):
        """Initializes and validates the distribution.

        Args:
            outcomes (list): Distinct outcome labels.
            probs (list of float): Probability of each outcome.

        Raises:
            joulebits.types.ValidationError: If the masses are negative, do not
                sum to one within 1e-12, or do not match the outcomes.
        """
        self.outcomes = tuple(outcomes)
        self.probs = _frozen(probs)
        if self.probs.ndim != 1 or len(self.probs) != len(self.outcomes):
            raise ValidationError("Expected %d probabilities, got shape %s"
                                  % (len(self.outcomes), self.probs.shape))
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValidationError("Outcome labels must be distinct")
        if not self.outcomes:
            raise ValidationError("A distribution needs at least one outcome")
        _check_mass(self.probs, "Distribution")

    @classmethod
    def uniform(cls, outcomes):
        outcomes = list(outcomes)
        return cls(outcomes, np.full(len(outcomes), 1.0 / len(outcomes)))

    @classmethod
    def point_mass(cls, outcomes, outcome):
        outcomes = list(outcomes)
        probs = np.zeros(len(outcomes))
        probs[outcomes.index(outcome)] = 1.0
        return cls(outcomes, probs)

    def __len__(self):
        return len(self.outcomes)

    def __eq__(self, other):
        return (isinstance(other, FiniteDistribution) and self.outcomes == other.outcomes
                and np.array_equal(self.probs, other.probs))

    def __repr__(self):
        return "FiniteDistribution(%r, %r)" % (list(self.outcomes), self.probs.tolist())

    def prob(self, outcome):
        try:
            return float(self.probs[self.outcomes.index(outcome)])
        except ValueError:
            raise UnknownVariableError("Unknown outcome %r" % (outcome,))

    def encode(self):
        return {"outcomes": list(self.outcomes), "probs": self.probs.tolist()}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Distribution"):
            outcomes = [tuple(o) if isinstance(o, list) else o for o in obj["outcomes"]]
            return cls(outcomes, obj["probs"])


class JointTable(object):
    """A dense joint probability table over named variables.

    Attributes:
        variables (tuple of str): Variable names, one per axis.
        alphabets (tuple of tuple): Outcome labels of every axis.
        cells (numpy.ndarray): Read-only probability mass, one axis per variable.
    """

    def __init__(self, variables, alphabets, cells):
        self.variables = tuple(variables)
        self.alphabets = tuple(tuple(a) for a in alphabets)
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError("Variable names must be distinct")
        if len(self.alphabets) != len(self.variables):
            raise ValidationError("Expected one alphabet per variable")
        shape = tuple(len(a) for a in self.alphabets)
        cells = np.array(cells, dtype=float)
        if cells.size != int(np.prod(shape)):
            raise ValidationError("Cell count %d does not match alphabets %s" % (cells.size, shape))
        self.cells = cells.reshape(shape)
        self.cells.flags.writeable = False
        for name, alphabet in zip(self.variables, self.alphabets):
            if len(set(alphabet)) != len(alphabet):
                raise ValidationError("Alphabet of %s has repeated labels" % name)
        _check_mass(self.cells, "Joint table")

    def __repr__(self):
        return "JointTable(%r, shape=%s)" % (self.variables, self.cells.shape)

    def axis(self, name):
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariableError("Unknown variable %r, table has %s" % (name, list(self.variables)))

    def alphabet(self, name):
        return self.alphabets[self.axis(name)]

    def marginal(self, names):
        """Returns the joint table of the named variables, in the given order.

        Raises:
            joulebits.types.UnknownVariableError: If a name is not in the table.
        """
        names = list(names)
        axes = [self.axis(n) for n in names]
        if len(set(axes)) != len(axes):
            raise ValidationError("Variable names must be distinct: %s" % names)
        others = tuple(i for i in range(len(self.variables)) if i not in axes)
        summed = self.cells.sum(axis=others) if others else self.cells
        kept = sorted(axes)
        order = [kept.index(a) for a in axes]
        return JointTable(names, [self.alphabets[a] for a in axes], np.transpose(summed, order))

    def distribution(self, name):
        """Returns the marginal of one variable as a FiniteDistribution."""
        m = self.marginal([name])
        return FiniteDistribution(m.alphabets[0], m.cells)

    def relabel(self, name, mapping):
        """Maps the outcomes of one variable to new labels, merging cells that share a label.

        Args:
            name (str): Variable to relabel.
            mapping (dict or callable): Old label to new label.

        Returns:
            JointTable: The coarser table. New labels are ordered by first appearance.
        """
        ax = self.axis(name)
        lookup = mapping if callable(mapping) else mapping.__getitem__
        new_labels = []
        index = []
        for label in self.alphabets[ax]:
            new = lookup(label)
            if new not in new_labels:
                new_labels.append(new)
            index.append(new_labels.index(new))
        moved = np.moveaxis(self.cells, ax, 0)
        merged = np.zeros((len(new_labels),) + moved.shape[1:])
        np.add.at(merged, np.array(index), moved)
        alphabets = list(self.alphabets)
        alphabets[ax] = new_labels
        return JointTable(self.variables, alphabets, np.moveaxis(merged, 0, ax))

    def coarse_grain(self, name, quantizer):
        """Applies a quantizer to a numerically labelled variable.

        The new alphabet is the full bin index range, so empty bins stay as zero mass.
        """
        ax = self.axis(name)
        labels = self.alphabets[ax]
        try:
            bins = quantize([float(l) for l in labels], quantizer)
        except (TypeError, ValueError) as e:
            if isinstance(e, QuantizerRangeError):
                raise
            raise ValidationError("Variable %s has non-numeric labels and cannot be quantized" % name)
        moved = np.moveaxis(self.cells, ax, 0)
        merged = np.zeros((quantizer.num_bins,) + moved.shape[1:])
        np.add.at(merged, np.array(bins, dtype=int), moved)
        alphabets = list(self.alphabets)
        alphabets[ax] = list(range(quantizer.num_bins))
        return JointTable(self.variables, alphabets, np.moveaxis(merged, 0, ax))

    def encode(self):
        return {"vars": list(self.variables),
                "alphabets": [list(a) for a in self.alphabets],
                "cells": self.cells.ravel().tolist()}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Joint table"):
            return cls(obj["vars"], obj["alphabets"], obj["cells"])


class Quantizer(object):
    """A fixed uniform quantizer Q_eps with left-closed bins."""

    def __init__(self, bin_width, origin=0.0, num_bins=1, clamp_policy=CLAMP_TO_EDGE):
        if not bin_width > 0 or not math.isfinite(bin_width):
            raise ValidationError("Bin width must be positive, got %r" % bin_width)
        if int(num_bins) != num_bins or num_bins < 1:
            raise ValidationError("Number of bins must be a positive integer, got %r" % num_bins)
        if clamp_policy not in CLAMP_POLICIES:
            raise ValidationError("Unknown clamp policy %r" % clamp_policy)
        self.bin_width = float(bin_width)
        self.origin = float(origin)
        self.num_bins = int(num_bins)
        self.clamp_policy = clamp_policy

    def __repr__(self):
        return "Quantizer(%r, %r, %r, %r)" % (self.bin_width, self.origin, self.num_bins, self.clamp_policy)

    def describe(self):
        """A one-line statement of the quantizer for the coarse-graining report."""
        return "eps=%g origin=%g bins=%d range=[%g, %g) policy=%s" % (
            self.bin_width, self.origin, self.num_bins, self.origin,
            self.origin + self.num_bins * self.bin_width, self.clamp_policy)

    def quantize(self, xs):
        return quantize(xs, self)

    def encode(self):
        return {"bin_width": self.bin_width, "origin": self.origin,
                "num_bins": self.num_bins, "clamp_policy": self.clamp_policy}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Quantizer"):
            return cls(obj["bin_width"], obj.get("origin", 0.0), obj.get("num_bins", 1),
                       obj.get("clamp_policy", CLAMP_TO_EDGE))


def _entropy_bits(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return max(0.0, float(-np.sum(p * np.log2(p))))


def entropy(d):
    """Shannon entropy in bits, with 0*log 0 = 0.

    Args:
        d (FiniteDistribution or list of float): The distribution. Raw
            sequences are validated first.
    """
    if not isinstance(d, FiniteDistribution):
        d = FiniteDistribution(range(len(d)), d)
    return _entropy_bits(d.probs)


def joint_entropy(j, names):
    return _entropy_bits(j.marginal(names).cells)


def conditional_entropy(j, names, given):
    """H(names | given) in bits."""
    given = list(given)
    return max(0.0, joint_entropy(j, list(names) + given) - (joint_entropy(j, given) if given else 0.0))


def _mi_from_pair(pab):
    pa = pab.sum(axis=1, keepdims=True)
    pb = pab.sum(axis=0, keepdims=True)
    mask = pab > 0
    ratio = pab[mask] / (pa * pb)[mask]
    return max(0.0, float(np.sum(pab[mask] * np.log2(ratio))))


def mutual_information(j, var_a, var_b):
    """I(A;B) in bits, other variables marginalized out.

    Raises:
        joulebits.types.UnknownVariableError: If a name is not in the table.
    """
    if var_a == var_b:
        raise ValidationError("Mutual information needs two distinct variables")
    return _mi_from_pair(j.marginal([var_a, var_b]).cells)


def conditional_mi(j, var_a, var_b, cond):
    """I(A;B|C) in bits, equal to sum_c p(c) I(A;B|C=c)."""
    if len({var_a, var_b, cond}) != 3:
        raise ValidationError("Conditional mutual information needs three distinct variables")
    p = j.marginal([var_a, var_b, cond]).cells
    pc = p.sum(axis=(0, 1), keepdims=True)
    pac = p.sum(axis=1, keepdims=True)
    pbc = p.sum(axis=0, keepdims=True)
    mask = p > 0
    ratio = (p * pc)[mask] / (pac * pbc)[mask]
    return max(0.0, float(np.sum(p[mask] * np.log2(ratio))))


def kl_divergence(p, q):
    """Relative entropy D(p||q) in bits.

    Returns math.inf when p puts mass where q has none.

    Raises:
        joulebits.types.ValidationError: If the alphabets differ.
    """
    if set(p.outcomes) != set(q.outcomes) or len(p.outcomes) != len(q.outcomes):
        raise ValidationError("KL divergence needs a common alphabet")
    qp = q.probs if p.outcomes == q.outcomes else np.array([q.prob(o) for o in p.outcomes])
    return _kl_bits(p.probs, qp)


def _kl_bits(p, q):
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return max(0.0, float(np.sum(p[mask] * np.log2(p[mask] / q[mask]))))


def quantize(xs, q):
    """Maps reals to bin indices floor((x - origin) / eps).

    Raises:
        joulebits.types.QuantizerRangeError: If a value is out of range under the error policy.
    """
    xs = np.asarray(xs, dtype=float)
    if not np.all(np.isfinite(xs)):
        raise QuantizerRangeError("Cannot quantize non-finite values")
    idx = np.floor((xs - q.origin) / q.bin_width).astype(np.int64)
    outside = (idx < 0) | (idx >= q.num_bins)
    if np.any(outside):
        if q.clamp_policy == ERROR_POLICY:
            raise QuantizerRangeError("Value %r outside quantizer range [%g, %g)" % (
                float(xs[outside][0]), q.origin, q.origin + q.num_bins * q.bin_width))
        idx = np.clip(idx, 0, q.num_bins - 1)
    return idx.tolist()
