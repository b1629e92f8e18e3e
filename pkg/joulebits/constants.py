"""
Physical constants, numerical tolerances and naming conventions.
"""

import math

#   +------------------------+-----------------------+
#   | name                   | value                 |
#   +------------------------+-----------------------+
#   | BOLTZMANN              | 1.380649e-23 J/K      |
#   | DEFAULT_TEMPERATURE    | 300 K                 |
#   +------------------------+-----------------------+

BOLTZMANN = 1.380649e-23
"""The Boltzmann constant in J/K. Exact by the SI definition."""

LN2 = math.log(2.0)
"""Natural logarithm of two, converts nats to bits."""

DEFAULT_TEMPERATURE = 300.0
"""Bath temperature, in kelvin, used when none is declared."""

PROBABILITY_TOLERANCE = 1e-12
"""Allowed deviation of a total probability mass from one."""

INFORMATION_TOLERANCE = 1e-9
"""Slack, in bits, granted to information inequalities."""

DEFAULT_CAPACITY_TOLERANCE = 1e-9
"""Target gap, in bits, between the lower and upper capacity bounds."""

BUDGET_RESIDUAL_TOLERANCE = 1e-9
"""Relative tolerance on the expected cost when bisecting the cost multiplier."""

DEFAULT_MAX_ITERATIONS = 100000
"""Iteration cap for Blahut-Arimoto style fixed point loops."""

HEAT_MISMATCH_TOLERANCE = 1e-10
"""Relative disagreement allowed between the two heat computations."""

#   +------------------------+-----------------------+
#   | size guard             | limit                 |
#   +------------------------+-----------------------+
#   | MAX_UNROLL_PRODUCTS    | 10^7                  |
#   | MAX_EPISODE_CELLS      | 10^7                  |
#   | MAX_PROCESS_STATES     | 64                    |
#   | MAX_REGISTER_BITS      | 16                    |
#   | MAX_MODEL_PARAMETERS   | 10^6                  |
#   +------------------------+-----------------------+

MAX_UNROLL_PRODUCTS = 10 ** 7
"""Upper bound on |actions|^horizon * |states| when unrolling an MDP."""

MAX_EPISODE_CELLS = 10 ** 7
"""Upper bound on |Z| * |W|^2 * |X| for an exact learning episode."""

MAX_PROCESS_STATES = 64
"""Upper bound on the number of learner states and data symbols of a process."""

MAX_REGISTER_BITS = 16
"""Largest register width for the XOR register protocol."""

MAX_MODEL_PARAMETERS = 10 ** 6
"""Upper bound on the free parameter count of a Markov model."""

NEGLIGIBILITY_FRACTION = 0.01
"""Fraction of E_cons below which a ledger term counts as negligible."""

FIT_RESIDUAL_WARNING = 0.05
"""Relative residual norm above which a scaling fit gets a quality warning."""

FORMULA_MISMATCH_WARNING = 1e-4
"""Relative disagreement between the capacity per cost sweep and its cross-check that gets logged."""

# Cost conventions
TOTAL = 'total'
INCREMENTAL = 'incremental'
CONVENTIONS = (TOTAL, INCREMENTAL)

# Channel endpoints
ENDPOINT_OBSERVATION = 'observation'
ENDPOINT_STATE = 'state'
ENDPOINTS = (ENDPOINT_OBSERVATION, ENDPOINT_STATE)

# Register boundaries
OPEN = 'open'
CLOSED = 'closed'
BOUNDARIES = (OPEN, CLOSED)

# Quantizer clamp policies
CLAMP_TO_EDGE = 'clamp_to_edge'
ERROR_POLICY = 'error'
CLAMP_POLICIES = (CLAMP_TO_EDGE, ERROR_POLICY)

SCHEMA_VERSION = "1"
"""Version tag written into every report file."""

FLOAT_DIGITS = 17
"""Significant digits used for floats in canonical JSON."""

# Reporting checklist. A report without every section is refused unless forced.

CHECKLIST_SECTIONS = (
    'accounting_boundary',
    'energy_balance_terms',
    'baseline_policy',
    'coarse_graining',
    'horizon_sampling',
    'time_throughput',
    'estimator_details',
)
"""Checklist section keys in reporting order."""

checklist_titles = {
    'accounting_boundary': 'accounting boundary',
    'energy_balance_terms': 'energy balance terms',
    'baseline_policy': 'baseline / null policy',
    'coarse_graining': 'coarse-graining / noise model',
    'horizon_sampling': 'horizon and sampling',
    'time_throughput': 'time and throughput',
    'estimator_details': 'estimator details',
}

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3

THREADS_ENV = 'JOULEBITS_THREADS'
"""Environment variable capping the number of sweep workers."""

DEFAULT_SEED = 0
"""Root seed for every randomized suite."""
