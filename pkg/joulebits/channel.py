"""
Empowerment as channel capacity.

Open-loop action sequences of an MDP are unrolled into a discrete channel to
the endpoint variable at the horizon. Capacities are computed with
Blahut-Arimoto iterations that keep a lower and an upper bound on the
optimum, optionally penalized by a cost multiplier lambda (bits per joule).
"""
import itertools
import logging
import math

import numpy as np
import scipy.optimize

from sweep import default_runner
from joulebits import codec
from joulebits.constants import (PROBABILITY_TOLERANCE, DEFAULT_CAPACITY_TOLERANCE,
                                 DEFAULT_MAX_ITERATIONS, BUDGET_RESIDUAL_TOLERANCE,
                                 MAX_UNROLL_PRODUCTS, FORMULA_MISMATCH_WARNING,
                                 TOTAL, INCREMENTAL, CONVENTIONS,
                                 ENDPOINT_OBSERVATION, ENDPOINT_STATE, ENDPOINTS)
from joulebits.probcore import FiniteDistribution, kl_divergence
from joulebits.types import (ValidationError, CapacityError, IterationLimitError,
                             InfeasibleBudgetError, ConfigurationError, DegenerateCostError,
                             CapacityPoint, UnitCostCapacity)

_LOG_FLOOR = -1000.0
_MAX_STEP = 2.0 ** 30
_WARM_MASS = 1e-9
_COLLAPSE_FRACTION = 1e-12
_SWEEP_FLOOR = 1e-11
_INNER_FLOOR = 1e-13
_MAX_SWEEPS = 200


class DiscreteChannel(object):
    """A discrete memoryless channel with rows p(o|a).

    Attributes:
        inputs (tuple): Input labels, one per row.
        outputs (tuple): Output labels, one per column.
        matrix (numpy.ndarray): Read-only row-stochastic matrix.
    """

    def __init__(self, inputs, outputs, matrix):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.matrix = np.array(matrix, dtype=float)
        if self.matrix.shape != (len(self.inputs), len(self.outputs)):
            raise ValidationError("Channel matrix has shape %s, expected %s"
                                  % (self.matrix.shape, (len(self.inputs), len(self.outputs))))
        if len(set(self.inputs)) != len(self.inputs) or len(set(self.outputs)) != len(self.outputs):
            raise ValidationError("Channel labels must be distinct")
        if not np.all(np.isfinite(self.matrix)) or np.any(self.matrix < 0):
            raise ValidationError("Channel rows must be nonnegative")
        sums = self.matrix.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE)
        if bad.size:
            raise ValidationError("Row for input %r sums to %.17g" % (self.inputs[bad[0]], sums[bad[0]]))
        self.matrix.flags.writeable = False

    def row(self, label):
        return FiniteDistribution(self.outputs, self.matrix[self.inputs.index(label)])

    def is_degenerate(self):
        """True when every row is the same distribution."""
        return bool(np.all(np.abs(self.matrix - self.matrix[0]) <= PROBABILITY_TOLERANCE))

    def encode(self):
        return {"inputs": list(self.inputs), "outputs": list(self.outputs),
                "matrix": self.matrix.tolist()}

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Channel"):
            return cls(obj["inputs"], obj["outputs"], obj["matrix"])


class CostedChannel(object):
    """A channel with a per-input energy cost in joules.

    ``cost`` holds the energy of each input excluding the baseline. The
    baseline energy of the horizon is charged to every input under the
    total convention, and cancels under the incremental convention.
    """

    def __init__(self, channel, cost, null_input=None, baseline_energy=0.0,
                 convention=TOTAL, endpoint=ENDPOINT_OBSERVATION):
        self.channel = channel
        self.cost = np.array(cost, dtype=float)
        self.null_input = null_input
        self.baseline_energy = float(baseline_energy)
        self.convention = convention
        self.endpoint = endpoint
        if self.cost.shape != (len(channel.inputs),):
            raise ValidationError("Expected %d costs, got %d" % (len(channel.inputs), self.cost.size))
        if not np.all(np.isfinite(self.cost)) or np.any(self.cost < 0):
            raise ValidationError("Costs must be finite and nonnegative")
        if not math.isfinite(self.baseline_energy) or self.baseline_energy < 0:
            raise ValidationError("Baseline energy must be finite and nonnegative")
        if null_input is not None and null_input not in channel.inputs:
            raise ValidationError("Null input %r is not a channel input" % (null_input,))
        if convention not in CONVENTIONS:
            raise ValidationError("Unknown cost convention %r" % (convention,))
        if endpoint not in ENDPOINTS:
            raise ValidationError("Unknown endpoint %r" % (endpoint,))
        self.cost.flags.writeable = False

    def effective_costs(self, convention=None):
        """Per-input costs under a convention.

        Args:
            convention (str): 'total' adds the baseline energy to every input,
                'incremental' subtracts the cost of the null input.
                Defaults to the declared convention.

        Raises:
            joulebits.types.ConfigurationError: Incremental costs without a null input.
            joulebits.types.ValidationError: An input cheaper than the null input.
        """
        convention = convention or self.convention
        if convention == TOTAL:
            return self.cost + self.baseline_energy
        if convention != INCREMENTAL:
            raise ValidationError("Unknown cost convention %r" % (convention,))
        if self.null_input is None:
            raise ConfigurationError("The incremental convention needs a declared null input")
        costs = self.cost - self.cost[self.channel.inputs.index(self.null_input)]
        scale = max(1.0, float(np.max(self.cost)))
        if np.any(costs < -PROBABILITY_TOLERANCE * scale):
            raise ValidationError("Some inputs are cheaper than the null input %r" % (self.null_input,))
        return np.maximum(costs, 0.0)

    def encode(self):
        obj = self.channel.encode()
        obj.update({"cost_J": self.cost.tolist(), "convention": self.convention,
                    "null_input": self.null_input, "baseline_energy_J": self.baseline_energy,
                    "endpoint": self.endpoint})
        return obj

    @classmethod
    def decode(cls, obj):
        with codec.decoding("Costed channel"):
            return cls(DiscreteChannel.decode(obj), obj["cost_J"], obj.get("null_input"),
                       obj.get("baseline_energy_J", 0.0), obj.get("convention", TOTAL),
                       obj.get("endpoint", ENDPOINT_OBSERVATION))


class MdpSpec(object):
    """A finite MDP with an initial state and a horizon.

    ``transition[s][a][s']`` is p(s'|s,a). Observations are a deterministic
    function of the state.
    """

    def __init__(self, states, actions, transition, observation_map, action_cost,
                 initial_state, horizon, baseline_energy=0.0, null_action=None):
        self.states = tuple(states)
        self.actions = tuple(actions)
        self.transition = np.array(transition, dtype=float)
        self.observation_map = dict(observation_map)
        self.action_cost = dict(action_cost)
        self.initial_state = initial_state
        self.horizon = horizon
        self.baseline_energy = float(baseline_energy)
        self.null_action = null_action
        self._validate()

    def _validate(self):
        shape = (len(self.states), len(self.actions), len(self.states))
        if self.transition.shape != shape:
            raise ValidationError("Transition tensor has shape %s, expected %s" % (self.transition.shape, shape))
        if np.any(self.transition < 0) or not np.all(np.isfinite(self.transition)):
            raise ValidationError("Transition probabilities must be nonnegative")
        sums = self.transition.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE):
            s, a = np.argwhere(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE)[0]
            raise ValidationError("Transition row (%r, %r) sums to %.17g"
                                  % (self.states[s], self.actions[a], sums[s, a]))
        try:
            horizon = int(self.horizon)
        except (TypeError, ValueError, OverflowError):
            horizon = None
        if horizon is None or isinstance(self.horizon, bool) or horizon != self.horizon or horizon < 1:
            raise ValidationError("Horizon must be a positive integer, got %r" % (self.horizon,))
        self.horizon = horizon
        if self.initial_state not in self.states:
            raise ValidationError("Initial state %r is not a state" % (self.initial_state,))
        missing = [s for s in self.states if s not in self.observation_map]
        if missing:
            raise ValidationError("States without observation: %s" % missing)
        missing = [a for a in self.actions if a not in self.action_cost]
        if missing:
            raise ValidationError("Actions without cost: %s" % missing)
        if any(not (c >= 0) or not math.isfinite(c) for c in self.action_cost.values()):
            raise ValidationError("Action costs must be finite and nonnegative")
        if self.null_action is not None and self.null_action not in self.actions:
            raise ValidationError("Null action %r is not an action" % (self.null_action,))
        if not math.isfinite(self.baseline_energy) or self.baseline_energy < 0:
            raise ValidationError("Baseline energy must be finite and nonnegative")

    @classmethod
    def decode(cls, obj):
        with codec.decoding("MDP spec"):
            return cls(obj["states"], obj["actions"], obj["transition"], obj["obs"],
                       obj["action_cost"], obj["initial"], obj["horizon"],
                       obj.get("baseline_energy_J", 0.0), obj.get("null_action"))

    def encode(self):
        return {"states": list(self.states), "actions": list(self.actions),
                "transition": self.transition.tolist(), "obs": self.observation_map,
                "action_cost": self.action_cost, "initial": self.initial_state,
                "horizon": self.horizon, "baseline_energy_J": self.baseline_energy,
                "null_action": self.null_action}


class EmpowermentCurve(object):
    """Cost-constrained capacity at increasing budgets."""

    def __init__(self, points, convention):
        self.points = list(points)
        self.convention = convention

    @property
    def budgets(self):
        return [p.budget for p in self.points]

    @property
    def capacities(self):
        return [p.capacity for p in self.points]

    def slopes(self):
        """Marginal bits per joule, the multiplier of every point."""
        return [p.multiplier for p in self.points]

    def ratios(self):
        """Average bits per joule E(E0)/E0 of every point with a positive budget."""
        return [p.capacity / p.budget if p.budget > 0 else None for p in self.points]

    def is_monotone(self, tol=1e-9):
        caps = self.capacities
        return all(b >= a - tol for a, b in zip(caps, caps[1:]))

    def is_concave(self, tol=1e-6):
        """Chord slopes between consecutive points never increase, within tol bits."""
        pts = [(p.budget, p.capacity) for p in self.points]
        for (b0, c0), (b1, c1), (b2, c2) in zip(pts, pts[1:], pts[2:]):
            interpolated = c0 + (c2 - c0) * (b1 - b0) / (b2 - b0)
            if c1 < interpolated - tol:
                return False
        return True

    def to_csv(self):
        lines = ["budget_J,capacity_bits,lambda_bits_per_J"]
        for p in self.points:
            lam = '' if p.multiplier is None else '%.17g' % p.multiplier
            lines.append('%.17g,%.17g,%s' % (p.budget, p.capacity, lam))
        return '\n'.join(lines) + '\n'

    def encode(self):
        return {"convention": self.convention,
                "points": [{"budget_J": p.budget, "capacity_bits": p.capacity,
                            "lambda_bits_per_J": p.multiplier,
                            "distribution": p.distribution.encode()} for p in self.points]}

    @classmethod
    def decode(cls, obj):
        points = [CapacityPoint(p["budget_J"], p["capacity_bits"], p["lambda_bits_per_J"],
                                FiniteDistribution.decode(p["distribution"])) for p in obj["points"]]
        return cls(points, obj["convention"])


def unroll_mdp(m, endpoint=ENDPOINT_OBSERVATION, convention=TOTAL):
    """Builds the channel from open-loop action sequences to the endpoint at the horizon.

    Args:
        m (MdpSpec): The MDP.
        endpoint (str): 'observation' for O_tau, 'state' for S_tau.
        convention (str): Cost convention recorded on the result.

    Returns:
        CostedChannel: One input per action sequence, labelled by joining
            the actions with commas, in lexicographic action order.

    Raises:
        joulebits.types.CapacityError: If |actions|^tau * |states| exceeds the size guard.
    """
    if endpoint not in ENDPOINTS:
        raise ValidationError("Unknown endpoint %r" % (endpoint,))
    n_states, n_actions = len(m.states), len(m.actions)
    if n_actions ** m.horizon * n_states > MAX_UNROLL_PRODUCTS:
        raise CapacityError("Unrolling %d actions over %d steps with %d states exceeds %d products"
                            % (n_actions, m.horizon, n_states, MAX_UNROLL_PRODUCTS))
    dist = np.zeros((1, n_states))
    dist[0, m.states.index(m.initial_state)] = 1.0
    costs = np.zeros(1)
    step_cost = np.array([m.action_cost[a] for a in m.actions], dtype=float)
    for _ in range(m.horizon):
        dist = np.einsum('ks,sat->kat', dist, m.transition).reshape(-1, n_states)
        costs = (costs[:, None] + step_cost[None, :]).ravel()
    if endpoint == ENDPOINT_STATE:
        outputs = list(m.states)
        matrix = dist
    else:
        outputs = []
        for s in m.states:
            if m.observation_map[s] not in outputs:
                outputs.append(m.observation_map[s])
        indicator = np.zeros((n_states, len(outputs)))
        for i, s in enumerate(m.states):
            indicator[i, outputs.index(m.observation_map[s])] = 1.0
        matrix = dist @ indicator
    # Renormalize accumulated rounding so rows pass the 1e-12 check at long horizons.
    matrix = matrix / matrix.sum(axis=1, keepdims=True)
    labels = [",".join(str(a) for a in seq) for seq in itertools.product(m.actions, repeat=m.horizon)]
    null_input = None
    if m.null_action is not None:
        null_input = ",".join([str(m.null_action)] * m.horizon)
    logging.info("Unrolled MDP into %d action sequences and %d outputs" % (len(labels), len(outputs)))
    return CostedChannel(DiscreteChannel(labels, outputs, matrix), costs, null_input,
                         m.baseline_energy, convention, endpoint)


def _row_divergences(W, q):
    """D(W_i || q) in bits for every row, inf where q misses mass of W_i."""
    with np.errstate(divide='ignore', invalid='ignore'):
        logratio = np.where(W > 0, np.log2(np.where(W > 0, W, 1.0)) - np.log2(q)[None, :], 0.0)
    return np.sum(np.where(W > 0, W * logratio, 0.0), axis=1)


def _mutual_information(W, r):
    d = _row_divergences(W, r @ W)
    mask = r > 0
    return max(0.0, float(np.sum(r[mask] * d[mask])))


class _PenalizedResult(object):
    __slots__ = ('r', 'lower', 'upper', 'iterations', 'converged')

    def __init__(self, r, lower, upper, iterations, converged):
        self.r = r
        self.lower = lower
        self.upper = upper
        self.iterations = iterations
        self.converged = converged


def _penalized_ba(W, c, lam, r0, tol, max_iter):
    """Maximizes I(r) - lam * E_r[c] over input distributions.

    The objective at the current r is a lower bound and max_i(D_i - lam*c_i)
    an upper bound. Inputs with zero starting mass stay excluded.
    """
    active = r0 > 0
    with np.errstate(divide='ignore'):
        log_r = np.where(active, np.log2(np.where(active, r0, 1.0)), -np.inf)
    with np.errstate(invalid='ignore', over='ignore'):
        return _iterate(W, c, lam, active, log_r, tol, max_iter)


def _normalized(log_r, active):
    r = np.where(active, np.exp2(log_r - np.max(log_r[active])), 0.0)
    return r / r.sum()


def _shifted(moved, active):
    return np.where(active, np.maximum(moved - np.max(moved[active]), _LOG_FLOOR), -np.inf)


def _evaluate(W, c, lam, active, log_r):
    r = _normalized(log_r, active)
    g = _row_divergences(W, r @ W) - lam * c
    return r, g, float(np.sum(r[active] * g[active]))


def _iterate(W, c, lam, active, log_r, tol, max_iter):
    # Multiplicative updates log r += step * g. Steps above 1 are kept only
    # while they raise the objective; the plain step never lowers it.
    r, g, lower = _evaluate(W, c, lam, active, log_r)
    upper = float(np.max(g[active]))
    step = 1.0
    for iteration in range(1, max_iter + 1):
        if upper - lower <= tol:
            return _PenalizedResult(r, lower, upper, iteration, True)
        trial = _shifted(log_r + step * g, active)
        r_next, g_next, value = _evaluate(W, c, lam, active, trial)
        if step > 1.0 and not value > lower:
            step = max(1.0, step / 4.0)
            trial = _shifted(log_r + g, active)
            r_next, g_next, value = _evaluate(W, c, lam, active, trial)
        else:
            step = min(2.0 * step, _MAX_STEP)
        log_r, r, g, lower = trial, r_next, g_next, value
        upper = float(np.max(g[active]))
    return _PenalizedResult(r, lower, upper, max_iter, False)


def ba_capacity(ch, tol=DEFAULT_CAPACITY_TOLERANCE, max_iter=DEFAULT_MAX_ITERATIONS):
    """Channel capacity by Blahut-Arimoto iterations.

    Args:
        ch (DiscreteChannel): The channel.
        tol (float): Largest accepted gap, in bits, between the bounds.
        max_iter (int): Iteration cap.

    Returns:
        tuple: (capacity in bits, FiniteDistribution over inputs). The
            capacity is the lower bound, achieved by the distribution.

    Raises:
        joulebits.types.IterationLimitError: If the gap stays above tol.
    """
    if not tol > 0:
        raise ValidationError("Tolerance must be positive")
    n = len(ch.inputs)
    if ch.is_degenerate():
        return 0.0, FiniteDistribution.uniform(ch.inputs)
    res = _penalized_ba(ch.matrix, np.zeros(n), 0.0, np.full(n, 1.0 / n), tol, max_iter)
    if not res.converged:
        raise IterationLimitError("Blahut-Arimoto did not reach gap %g in %d iterations, bracket [%.12g, %.12g]"
                                  % (tol, max_iter, res.lower, res.upper), res.lower, res.upper)
    logging.info("Blahut-Arimoto converged in %d iterations, capacity %.12g bits" % (res.iterations, res.lower))
    return max(0.0, res.lower), FiniteDistribution(ch.inputs, res.r)


def _solve(W, c, lam, r0, tol, max_iter):
    res = _penalized_ba(W, c, lam, r0, tol, max_iter)
    if not res.converged:
        raise IterationLimitError("Penalized Blahut-Arimoto at lambda=%.6g did not converge, bracket [%.12g, %.12g]"
                                  % (lam, res.lower, res.upper), res.lower, res.upper)
    return res.r


def _warm(r, n):
    # Keep every input reachable from a warm start.
    mixed = r + _WARM_MASS / n
    return mixed / mixed.sum()


def _budget_exponent(log_w, cs, budget, active):
    """Smallest kappa >= 0 for which weights 2^(log_w - kappa*c) spend at most ``budget``."""

    def excess(kappa):
        e = np.where(active, log_w - kappa * cs, -np.inf)
        p = np.exp2(e - np.max(e[active]))
        return float(p @ cs) / float(p.sum()) - budget

    if excess(0.0) <= 0.0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if excess(hi) <= 0.0:
            return scipy.optimize.brentq(excess, 0.0, hi, xtol=1e-15 * hi, maxiter=500)
        hi *= 2.0
    raise IterationLimitError("Cost exponent bracket did not close", 0.0, hi)


def _constrained_ba(W, c, budget, r0, tol, max_iter):
    """Maximizes I(r) subject to E_r[c] <= budget.

    Each update re-solves the cost exponent so that the new iterate meets
    the budget, so every objective value is an achieved lower bound. The
    upper bound is lam*budget + max_i(D_i - lam*c_i) at the current
    multiplier. Costs are scaled to a unit maximum inside the loop.

    Returns:
        tuple: (r, bits, lambda in bits/J, iterations).
    """
    scale = float(np.max(c))
    cs, bs = c / scale, budget / scale
    active = r0 > 0
    with np.errstate(divide='ignore'):
        log_r = np.where(active, np.log2(np.where(active, r0, 1.0)), -np.inf)
    d = _row_divergences(W, r0 @ W)
    r, lower, upper, lam = r0, -np.inf, np.inf, 0.0
    step = 1.0
    with np.errstate(invalid='ignore', over='ignore'):
        for iteration in range(1, max_iter + 1):
            used = step
            trial, kappa = _budget_step(log_r, d, cs, bs, active, used)
            r_next = _normalized(trial, active)
            d_next = _row_divergences(W, r_next @ W)
            value = float(np.sum(r_next[active] * d_next[active]))
            if used > 1.0 and not value > lower:
                step = max(1.0, step / 4.0)
                used = 1.0
                trial, kappa = _budget_step(log_r, d, cs, bs, active, used)
                r_next = _normalized(trial, active)
                d_next = _row_divergences(W, r_next @ W)
                value = float(np.sum(r_next[active] * d_next[active]))
            else:
                step = min(2.0 * step, _MAX_STEP)
            log_r, r, d, lower = trial, r_next, d_next, value
            lam = kappa / used
            upper = lam * bs + float(np.max(d - lam * cs))
            if upper - lower <= tol:
                return r, max(0.0, lower), lam / scale, iteration
    raise IterationLimitError("Constrained Blahut-Arimoto at budget %.6g J did not converge, bracket [%.12g, %.12g]"
                              % (budget, lower, upper), lower, upper)


def _budget_step(log_r, d, cs, budget, active, step):
    moved = log_r + step * d
    kappa = _budget_exponent(np.where(active, moved, -np.inf), cs, budget, active)
    return _shifted(moved - kappa * cs, active), kappa


def cost_constrained_capacity(cch, budget, tol=DEFAULT_CAPACITY_TOLERANCE, convention=None,
                              max_iter=DEFAULT_MAX_ITERATIONS):
    """Largest I(A;O) with expected cost at most ``budget`` joules.

    Solves the unconstrained problem first. When its expected cost exceeds
    the budget, runs Blahut-Arimoto on the budget-constrained problem, where
    each update picks the cost multiplier that makes the iterate spend
    exactly the budget.

    Returns:
        tuple: (bits, FiniteDistribution, lambda in bits/J). lambda is 0 when
            the budget does not bind and None when the slope is unbounded.

    Raises:
        joulebits.types.InfeasibleBudgetError: If the budget is below the cheapest input cost.
        joulebits.types.IterationLimitError: If the bounds do not meet within max_iter updates.
    """
    W = cch.channel.matrix
    c = cch.effective_costs(convention)
    n = len(c)
    inputs = cch.channel.inputs
    c_min = float(np.min(c))
    slack = BUDGET_RESIDUAL_TOLERANCE * max(1.0, abs(budget))
    if budget < c_min - slack:
        raise InfeasibleBudgetError("Budget %.6g J is below the minimum expected cost %.6g J" % (budget, c_min), c_min)

    if cch.channel.is_degenerate():
        cheapest = np.where(c <= c_min + slack, 1.0, 0.0)
        return 0.0, FiniteDistribution(inputs, cheapest / cheapest.sum()), 0.0

    r0 = _solve(W, c, 0.0, np.full(n, 1.0 / n), tol, max_iter)
    if float(r0 @ c) <= budget + slack:
        return _mutual_information(W, r0), FiniteDistribution(inputs, r0), 0.0

    cheapest = c <= c_min + slack
    if budget <= c_min + slack:
        start = np.where(cheapest, 1.0, 0.0)
        r = _solve(W, c, 0.0, start / start.sum(), tol, max_iter) if cheapest.sum() > 1 else start
        capacity = _mutual_information(W, r)
        d = _row_divergences(W, r @ W)
        others = ~cheapest
        multiplier = float(np.max((d[others] - capacity) / (c[others] - c_min)))
        multiplier = max(0.0, multiplier) if math.isfinite(multiplier) else None
        return capacity, FiniteDistribution(inputs, r), multiplier

    r, bits, lam, iterations = _constrained_ba(W, c, budget, r0, tol, max_iter)
    logging.info("Budget %.6g J: %.12g bits at lambda %.6g bits/J after %d updates" % (budget, bits, lam, iterations))
    return bits, FiniteDistribution(inputs, r), lam


def _free_inputs(W, c, inputs):
    free = np.flatnonzero(c <= 0.0)
    if free.size and np.any(np.abs(W[free] - W[free[0]]) > PROBABILITY_TOLERANCE):
        raise DegenerateCostError("Inputs %s cost nothing but produce different outputs: control is free"
                                  % [inputs[i] for i in free])
    return free


def unit_cost_formula(cch, convention=None):
    """Relative-entropy formula max_a D(p(.|a) || p(.|null)) / c(a) for a free null input.

    Inputs with infinite divergence are skipped with a warning.

    Returns:
        tuple: (bits per joule or None, unbounded flag). None when no input
            has a finite divergence or no zero-cost input exists.
    """
    c = cch.effective_costs(convention)
    inputs = cch.channel.inputs
    free = _free_inputs(cch.channel.matrix, c, inputs)
    if not free.size:
        return None, False
    reference = cch.channel.row(inputs[free[0]])
    best, unbounded = None, False
    for i, label in enumerate(inputs):
        if c[i] <= 0.0:
            continue
        d = kl_divergence(cch.channel.row(label), reference)
        if math.isinf(d):
            logging.warning("Input %r is perfectly distinguishable from the free input, skipping it" % (label,))
            unbounded = True
            continue
        value = d / float(c[i])
        if best is None or value > best:
            best = value
    return best, unbounded


def _dinkelbach(W, c, tol, max_iter):
    """Largest ratio I(r)/E_r[c] by a sequence of penalized problems.

    Every iterate is an achieved ratio, so the result is a lower bound. The
    inner tolerance follows the penalized optimum, which shrinks as the
    ratio converges, and the sweep stops once that optimum is below
    floating-point resolution.
    """
    n = len(c)
    r = _solve(W, c, 0.0, np.full(n, 1.0 / n), tol, max_iter)
    best_r = r
    lam = _mutual_information(W, r) / float(r @ c)
    collapsed = _COLLAPSE_FRACTION * float(np.max(c))
    inner = tol
    sweeps = 0
    for sweeps in range(1, _MAX_SWEEPS + 1):
        res = _penalized_ba(W, c, lam, _warm(r, n), inner, max_iter)
        if not res.converged or res.lower <= _SWEEP_FLOOR:
            break
        r = res.r
        spent = float(r @ c)
        if spent <= collapsed:
            break
        ratio = _mutual_information(W, r) / spent
        if not ratio > lam:
            break
        lam, best_r = ratio, r
        inner = min(tol, max(_INNER_FLOOR, 1e-3 * res.lower))
    logging.info("Capacity per unit cost sweep stopped at %.12g bits/J after %d steps" % (lam, sweeps))
    return lam, best_r


def capacity_per_unit_cost(cch, convention=None, tol=DEFAULT_CAPACITY_TOLERANCE,
                           max_iter=DEFAULT_MAX_ITERATIONS):
    """Supremum over budgets of capacity(budget)/budget, in bits per joule.

    This is the largest slope of the concave capacity-cost curve through the
    origin, found by a Dinkelbach sweep over the cost multiplier of penalized
    Blahut-Arimoto. The reported value is the best ratio achieved. With a
    free null input the sweep approaches the origin, and the relative-entropy
    formula is reported alongside as a cross-check.

    Raises:
        joulebits.types.ConfigurationError: Incremental convention without a null input.
        joulebits.types.DegenerateCostError: All costs zero, or distinct free inputs.
    """
    convention = convention or cch.convention
    c = cch.effective_costs(convention)
    W = cch.channel.matrix
    inputs = cch.channel.inputs
    if np.all(c <= 0.0):
        raise DegenerateCostError("All inputs cost nothing under the %s convention" % convention)
    free = _free_inputs(W, c, inputs)

    if not free.size:
        value, r = _dinkelbach(W, c, tol, max_iter)
        return UnitCostCapacity(value, FiniteDistribution(inputs, r), float(r @ c), convention, False, None)

    formula, unbounded = unit_cost_formula(cch, convention)
    keep = np.ones(len(c), dtype=bool)
    if unbounded and formula is not None:
        # Inputs perfectly distinguishable from the free one are left out of the sweep.
        with np.errstate(divide='ignore', invalid='ignore'):
            keep = np.isfinite(_row_divergences(W, W[free[0]])) | (c <= 0.0)
    value, kept = _dinkelbach(W[keep], c[keep], tol, max_iter)
    r = np.zeros(len(c))
    r[keep] = kept
    if formula is None:
        logging.warning("Capacity per unit cost is unbounded; reporting the best achieved ratio %.6g bits/J" % value)
    else:
        if abs(value - formula) > FORMULA_MISMATCH_WARNING * max(1.0, formula):
            logging.warning("Capacity per unit cost %.12g disagrees with the relative-entropy formula %.12g"
                            % (value, formula))
        if unbounded:
            logging.warning("Capacity per unit cost is unbounded; reporting the largest finite candidate %.6g bits/J"
                            % value)
    return UnitCostCapacity(value, FiniteDistribution(inputs, r), float(r @ c), convention, unbounded, formula)


def empowerment_curve(cch, budgets, tol=DEFAULT_CAPACITY_TOLERANCE, convention=None, runner=None):
    """Cost-constrained capacity at every budget.

    Args:
        cch (CostedChannel): The costed channel.
        budgets (list of float): Strictly increasing budgets in joules.
        runner (sweep.base.SweepRunner): Evaluates budgets, serial by default.

    Returns:
        EmpowermentCurve: Points in budget order; multipliers are the marginal slopes.
    """
    budgets = [float(b) for b in budgets]
    if not budgets:
        raise ValidationError("At least one budget is needed")
    if any(b1 <= b0 for b0, b1 in zip(budgets, budgets[1:])):
        raise ValidationError("Budgets must be strictly increasing")
    convention = convention or cch.convention
    runner = runner or default_runner()

    def point(budget):
        bits, dist, lam = cost_constrained_capacity(cch, budget, tol, convention)
        return CapacityPoint(budget, bits, lam, dist)

    points = runner.map(point, budgets)
    curve = EmpowermentCurve(points, convention)
    if not curve.is_monotone() or not curve.is_concave():
        logging.warning("Empowerment curve is not monotone and concave within tolerance")
    return curve
