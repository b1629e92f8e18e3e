"""
Exception definitions and record types for the joulebits toolkit.
"""

import collections


class Error(Exception):
    """
    Base exception for all joulebits failures.
    """


class ValidationError(Error, ValueError):
    """
    Raised when a distribution, kernel, ledger or spec breaks its invariants.
    """


class UnknownVariableError(Error, LookupError):
    """
    Raised when a variable name is not present in a joint table.
    """


class QuantizerRangeError(ValidationError):
    """
    Raised when a value falls outside the declared quantizer range
    and the clamp policy is 'error'.
    """


class CapacityError(Error):
    """
    Raised when an exact computation would exceed a size guard.
    """


class IterationLimitError(Error):
    """
    Raised when a fixed point iteration does not converge.

    The bracket reached so far is kept in ``lower`` and ``upper``.
    """

    def __init__(self, message, lower, upper):
        Error.__init__(self, message)
        self.lower = lower
        self.upper = upper


class InfeasibleBudgetError(Error):
    """
    Raised when a cost budget lies below the cheapest achievable expected cost.
    """

    def __init__(self, message, minimum_cost):
        Error.__init__(self, message)
        self.minimum_cost = minimum_cost


class ConfigurationError(Error):
    """
    Raised when a requested convention lacks the declarations it needs,
    for example the incremental convention without a null input.
    """


class DegenerateCostError(Error):
    """
    Raised when control is free: capacity per unit cost is not defined
    because distinguishable inputs cost nothing.
    """


class ConventionError(Error):
    """
    Raised when data generation is not passive, so the batch-learning
    conventions do not apply. The caller has to declare the policy class.
    """


class SpecParseError(Error):
    """
    Raised when an input file cannot be parsed. The message carries the location.
    """

    def __init__(self, message, location=None):
        Error.__init__(self, message)
        self.location = location


class SchemaVersionError(Error):
    """
    Raised when a report file declares an unsupported schema version.
    """


class UnknownFieldError(Error):
    """
    Raised when a report file contains fields the schema does not know.
    """

    def __init__(self, message, fields):
        Error.__init__(self, message)
        self.fields = fields


class SerializationError(Error):
    """
    Raised when a value cannot be written as canonical JSON (NaN or infinite).
    """


BoundVerdict = collections.namedtuple('BoundVerdict', 'label lhs rhs satisfied slack units note')
"""
    Outcome of a bound check. ``satisfied`` holds iff lhs <= rhs + tolerance,
    ``slack`` is rhs - lhs in the units named by ``units``.
"""

LandauerBenchmark = collections.namedtuple('LandauerBenchmark', 'temperature joules_per_bit bits_per_joule')
"""
    The Landauer scale k_B*T*ln2 at a temperature and its reciprocal.
"""

BalanceCheck = collections.namedtuple('BalanceCheck', 'residual consistent approximation_justified negligibility')
"""
    Energy balance residual of a ledger and whether E_cons ~ Q_diss may be assumed.
"""

EntropyProduction = collections.namedtuple('EntropyProduction', 'sigma dimensionless bits')
"""
    Total entropy production in J/K, divided by k_B, and divided by k_B*ln2.
"""

CapacityPoint = collections.namedtuple('CapacityPoint', 'budget capacity multiplier distribution')
"""
    One point of a cost-constrained capacity curve. ``multiplier`` is None
    where the curve has no finite slope.
"""

UnitCostCapacity = collections.namedtuple('UnitCostCapacity',
                                          'bits_per_joule distribution expected_cost convention unbounded cross_check')
"""
    Capacity per unit cost, the achieving input distribution and the
    relative-entropy cross-check value (None when no free null input exists).
"""

EfficiencyRecord = collections.namedtuple('EfficiencyRecord',
                                          'delta_I E_cons Q_diss eta_E eta_tilde_E landauer_fraction dS_sys temperature')
"""
    Learning efficiency ratios of one episode. ``eta_tilde_E`` and
    ``landauer_fraction`` are None when Q_diss is not positive.
"""

EpiplexityChange = collections.namedtuple('EpiplexityChange', 'before after signed_change')
"""
    I(W_pre;Z), I(W_post;Z) and their signed difference, in bits.
"""

RegisterOutcome = collections.namedtuple('RegisterOutcome', 'delta_I Q_diss eta_tilde unbounded boundary caveat')
"""
    Result of the XOR register protocol. ``eta_tilde`` is None when unbounded.
"""

MdlCandidate = collections.namedtuple('MdlCandidate', 'order L_M L_X_given_M')
"""
    Two-part code lengths of one Markov order.
"""

Violation = collections.namedtuple('Violation', 'section message')
"""
    A missing or empty reporting checklist section.
"""

__all__ = ['Error',
           'ValidationError',
           'UnknownVariableError',
           'QuantizerRangeError',
           'CapacityError',
           'IterationLimitError',
           'InfeasibleBudgetError',
           'ConfigurationError',
           'DegenerateCostError',
           'ConventionError',
           'SpecParseError',
           'SchemaVersionError',
           'UnknownFieldError',
           'SerializationError',
           'BoundVerdict',
           'LandauerBenchmark',
           'BalanceCheck',
           'EntropyProduction',
           'CapacityPoint',
           'UnitCostCapacity',
           'EfficiencyRecord',
           'EpiplexityChange',
           'RegisterOutcome',
           'MdlCandidate',
           'Violation']
