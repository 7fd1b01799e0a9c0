"""The evolve-and-ask experiment engine with full Bayesian branch accounting.

One experiment: prepare one of two candidate states with prior xi, then k
times (evolve for dt, measure along the fixed transverse direction and keep
only the null outcome), and finally discriminate whatever survived with the
optimal terminal measurement. Because every measurement is binary and click
branches terminate, the outcome tree has exactly k + 1 leaves: a click at
step i (i = 1..k) or survival through all k steps. All branch probabilities
are computed exactly; nothing is sampled.

Two cost ledgers are supported:

* ``Mode.EXACT``: every leaf is charged its true Bayes cost at its own
  posterior. Click leaves collapse both hypotheses onto the measurement
  direction, so their cost is min(posterior, 1 - posterior); the survived
  leaf is charged the Helstrom cost of its conditioned state pair.
* ``Mode.PAPER``: the idealized ledger in which a click costs exactly 1/2
  and full survival costs 0. Its weighted total is what the closed form
  ``total_cost_paper_mode`` approximates at second order in delta.

The gap between the two ledgers on the same exact branch probabilities is
the whole point of the laboratory.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .helstrom import (
    DiscriminationInstance,
    guess_only_cost,
    helstrom_cost,
    helstrom_pure,
    posterior_update,
)
from .qcore import (
    DegenerateBranchError,
    HamiltonianSpec,
    MeasurementDirection,
    PureState,
    ValidationError,
)

# Candidate-state normalization a^2 + (b delta)^2 = 1 is enforced to this
# tolerance; construction helpers hit it to machine precision anyway.
NORM_SLACK = 1e-9


class Mode(enum.Enum):
    """Leaf cost ledger; see the module docstring."""

    EXACT = "exact"
    PAPER = "paper"


def default_direction(dim: int = 5) -> MeasurementDirection:
    """The fixed transverse probe direction (0,1,1,0,0)/sqrt(2)."""
    if dim != 5:
        raise ValidationError("the probe direction is defined on dimension 5")
    vec = np.zeros(5, dtype=np.complex128)
    vec[1] = vec[2] = 1.0 / math.sqrt(2.0)
    return MeasurementDirection(vec)


@dataclass(frozen=True)
class ProtocolParams:
    """One complete experiment definition.

    a and b parameterize the candidate pair (a, 0, 0, 0, b*delta) and
    (0, 0, 0, a, b*delta); they must satisfy a^2 + (b*delta)^2 = 1. Use
    :meth:`from_b` or :meth:`from_a` to get the normalization right
    automatically, with dt=None solving the overlap-cancellation condition
    2*k*a*dt = b.
    """

    a: float
    b: float
    delta: float
    dt: float
    k: int
    e0: float = 1.0
    e1: float = 2.0
    prior: float = 0.5
    direction: MeasurementDirection = field(default_factory=default_direction)
    mode: Mode = Mode.EXACT

    def __post_init__(self):
        for name in ("a", "b", "delta", "dt", "e0", "e1", "prior"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val)):
                raise ValidationError(f"{name} must be a finite real number, got {val!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValidationError(f"k must be an integer >= 1, got {self.k!r}")
        if self.dt <= 0.0:
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if self.delta < 0.0:
            raise ValidationError(f"delta must be nonnegative, got {self.delta!r}")
        if not (0.0 <= self.prior <= 1.0):
            raise ValidationError(f"prior must lie in [0, 1], got {self.prior!r}")
        residual = self.a**2 + (self.b * self.delta) ** 2 - 1.0
        if abs(residual) > NORM_SLACK:
            raise ValidationError(
                f"a^2 + (b*delta)^2 = {1.0 + residual!r} violates normalization beyond {NORM_SLACK}"
            )
        if not isinstance(self.mode, Mode):
            raise ValidationError(f"mode must be a Mode, got {self.mode!r}")
        if self.direction.dim != 5:
            raise ValidationError("direction must have dimension 5")

    @classmethod
    def from_b(cls, b: float, delta: float, k: int, dt: float | None = None, **kwargs) -> "ProtocolParams":
        """Build params from (b, delta), deriving a = sqrt(1 - (b*delta)^2).

        dt=None solves 2*k*a*dt = b via :func:`solve_orthogonality`.
        """
        bd = b * delta
        if not abs(bd) <= 1.0:
            raise ValidationError(f"|b*delta| = {abs(bd)!r} exceeds 1; no valid amplitude a")
        a = math.sqrt(max(1.0 - bd * bd, 0.0))
        if dt is None:
            dt = solve_orthogonality(a, b, k)
        return cls(a=a, b=b, delta=delta, dt=float(dt), k=k, **kwargs)

    @classmethod
    def from_a(cls, a: float, delta: float, k: int, dt: float | None = None, **kwargs) -> "ProtocolParams":
        """Build params from (a, delta), deriving b = sqrt(1 - a^2)/delta."""
        if not (0.0 <= a <= 1.0):
            raise ValidationError(f"a must lie in [0, 1], got {a!r}")
        if delta > 0.0:
            b = math.sqrt(max(1.0 - a * a, 0.0)) / delta
        elif a == 1.0:
            b = 0.0
        else:
            raise ValidationError("delta = 0 requires a = 1")
        if dt is None:
            dt = solve_orthogonality(a, b, k)
        return cls(a=a, b=b, delta=delta, dt=float(dt), k=k, **kwargs)


def rescale_delta(params: ProtocolParams, delta: float, auto_dt: bool = False) -> ProtocolParams:
    """Move ``params`` to a new delta holding b fixed and re-deriving a.

    With auto_dt the spacing is re-solved from 2*k*a*dt = b; otherwise the
    original dt is kept. Used by the delta-scaling studies.
    """
    return ProtocolParams.from_b(
        params.b, delta, params.k,
        dt=None if auto_dt else params.dt,
        e0=params.e0, e1=params.e1, prior=params.prior,
        direction=params.direction, mode=params.mode,
    )


@dataclass(frozen=True)
class LeafRecord:
    """One terminal branch of the outcome tree.

    kind is "click" (with step in 1..k) or "survived" (step is None).
    p_given_h0 / p_given_h1 are the leaf probabilities conditioned on each
    hypothesis; marginal mixes them with the prior; posterior is the
    Bayes-updated weight of hypothesis 0 at this leaf. state0/state1 are the
    hypothesis-conditioned states at the leaf and leaf_cost is the expected
    0-1 cost charged there under the active ledger.
    """

    kind: str
    step: int | None
    p_given_h0: float
    p_given_h1: float
    marginal: float
    posterior: float
    state0: PureState
    state1: PureState
    leaf_cost: float


@dataclass(frozen=True)
class ProtocolReport:
    """Totals, baselines, trajectories, and the verdict for one experiment.

    verdict_vs_exact and verdict_vs_paper are the signed differences between
    total_cost and the two Helstrom baselines (positive: the protocol did
    worse than that baseline). overlap_trajectory[i] is |<s0|s1>| of the
    conditioned survival states after i steps, so entry 0 is the initial
    overlap b^2 delta^2; survival_trajectory[i] is the pair of cumulative
    survival probabilities after i steps.
    """

    params: ProtocolParams
    leaves: tuple[LeafRecord, ...]
    total_cost: float
    baseline_exact: float
    baseline_paper: float
    paper_new_cost: float
    overlap_trajectory: tuple[float, ...]
    survival_trajectory: tuple[tuple[float, float], ...]
    verdict_vs_exact: float
    verdict_vs_paper: float

    @property
    def final_overlap(self) -> float:
        return self.overlap_trajectory[-1]


def initial_states(params: ProtocolParams) -> tuple[PureState, PureState]:
    """The candidate pair (a, 0, 0, 0, b*delta) and (0, 0, 0, a, b*delta)."""
    bd = params.b * params.delta
    raw0 = np.array([params.a, 0.0, 0.0, 0.0, bd], dtype=np.complex128)
    raw1 = np.array([0.0, 0.0, 0.0, params.a, bd], dtype=np.complex128)
    # Params admit NORM_SLACK; states themselves must be exactly unit.
    return qcore.normalize(raw0), qcore.normalize(raw1)


def solve_orthogonality(a: float, b: float, k: int) -> float:
    """Spacing dt = b / (2 k a) solving the cancellation condition 2*k*a*dt = b."""
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be an integer >= 1, got {k!r}")
    if not a > 0.0:
        raise ValidationError(f"a must be positive, got {a!r}")
    if not b > 0.0:
        raise ValidationError(f"b must be positive, got {b!r}")
    return b / (2.0 * k * a)


def step(spec: HamiltonianSpec, m: MeasurementDirection, dt: float, psi: PureState
         ) -> tuple[PureState, float, float]:
    """Evolve ``psi`` for dt, then measure along ``m``.

    Returns (renormalized null-outcome state, survive_prob, click_prob).
    """
    evolved = qcore.evolve(spec, dt, psi)
    outcome = qcore.measure_binary(m, evolved)
    return outcome.post_survive_state, outcome.survive_prob, outcome.click_prob


def total_cost_paper_mode(params: ProtocolParams) -> float:
    """Closed-form idealized total cost k a^2 dt^2 delta^2 / 4.

    This is the second-order value of the PAPER ledger: k click chances of
    probability a^2 dt^2 delta^2 / 2 each costing 1/2 plus a free survived
    branch. It is independent of the exact simulation by construction.
    """
    return params.k * params.a**2 * params.dt**2 * params.delta**2 / 4.0


def _safe_posterior(prior: float, p0: float, p1: float) -> float:
    """Posterior that falls back to the prior on zero-probability leaves."""
    try:
        return posterior_update(prior, min(p0, 1.0), min(p1, 1.0))
    except DegenerateBranchError:
        return prior


def run(params: ProtocolParams,
        initial_pair: tuple[PureState, PureState] | None = None) -> ProtocolReport:
    """Evaluate the full outcome tree exactly and adjudicate the totals.

    The tree is walked depth-first and deterministically: for each step the
    click leaf is recorded and the null branch continues, and after step k
    the survived leaf receives the terminal Helstrom measurement. Survival
    branches whose probability underflows the pruning floor are recorded as
    zero-probability leaves and the walk stops early.

    initial_pair overrides the default candidate states, e.g. to check
    hypothesis-relabeling symmetry; both states must be 5-dimensional.
    """
    spec = HamiltonianSpec(e0=params.e0, e1=params.e1, delta=params.delta)
    m = params.direction
    if initial_pair is None:
        s0, s1 = initial_states(params)
    else:
        s0, s1 = initial_pair
        if s0.dim != 5 or s1.dim != 5:
            raise ValidationError("initial states must have dimension 5")
    prior = params.prior
    paper_ledger = params.mode is Mode.PAPER

    baseline_exact = helstrom_pure(DiscriminationInstance(s0, s1, prior))
    initial_overlap = abs(qcore.inner_product(s0, s1))
    baseline_paper = helstrom_cost(prior, initial_overlap)

    leaves: list[LeafRecord] = []
    overlap_traj = [initial_overlap]
    survival_traj = [(1.0, 1.0)]
    cum0, cum1 = 1.0, 1.0
    state0, state1 = s0, s1
    alive0 = alive1 = True

    for i in range(1, params.k + 1):
        ev0 = qcore.evolve(spec, params.dt, state0)
        ev1 = qcore.evolve(spec, params.dt, state1)
        click0 = click1 = 0.0
        next0, next1 = ev0, ev1
        surv0 = surv1 = 0.0
        if alive0:
            try:
                out0 = qcore.measure_binary(m, ev0)
                click0, surv0, next0 = out0.click_prob, out0.survive_prob, out0.post_survive_state
                click_state0 = out0.post_click_state
            except DegenerateBranchError:
                # Null branch dead for h0: all remaining h0 weight clicks here.
                click0, surv0, alive0 = 1.0, 0.0, False
                click_state0 = PureState(m.vector.copy())
        else:
            click_state0 = PureState(m.vector.copy())
        if alive1:
            try:
                out1 = qcore.measure_binary(m, ev1)
                click1, surv1, next1 = out1.click_prob, out1.survive_prob, out1.post_survive_state
                click_state1 = out1.post_click_state
            except DegenerateBranchError:
                click1, surv1, alive1 = 1.0, 0.0, False
                click_state1 = PureState(m.vector.copy())
        else:
            click_state1 = PureState(m.vector.copy())

        p0 = cum0 * click0
        p1 = cum1 * click1
        marginal = prior * p0 + (1.0 - prior) * p1
        post = _safe_posterior(prior, p0, p1)
        cost = 0.5 if paper_ledger else guess_only_cost(post)
        leaves.append(LeafRecord(
            kind="click", step=i, p_given_h0=p0, p_given_h1=p1,
            marginal=marginal, posterior=post,
            state0=click_state0, state1=click_state1, leaf_cost=cost,
        ))
        cum0 *= surv0
        cum1 *= surv1
        state0, state1 = next0, next1
        overlap_traj.append(abs(qcore.inner_product(state0, state1)))
        survival_traj.append((cum0, cum1))
        if not (alive0 or alive1):
            break

    marginal = prior * cum0 + (1.0 - prior) * cum1
    post = _safe_posterior(prior, cum0, cum1)
    if paper_ledger:
        survived_cost = 0.0
    else:
        survived_cost = helstrom_pure(DiscriminationInstance(state0, state1, post))
    leaves.append(LeafRecord(
        kind="survived", step=None, p_given_h0=cum0, p_given_h1=cum1,
        marginal=marginal, posterior=post,
        state0=state0, state1=state1, leaf_cost=survived_cost,
    ))

    total = math.fsum(leaf.marginal * leaf.leaf_cost for leaf in leaves)
    return ProtocolReport(
        params=params,
        leaves=tuple(leaves),
        total_cost=total,
        baseline_exact=baseline_exact,
        baseline_paper=baseline_paper,
        paper_new_cost=total_cost_paper_mode(params),
        overlap_trajectory=tuple(overlap_traj),
        survival_trajectory=tuple(survival_traj),
        verdict_vs_exact=total - baseline_exact,
        verdict_vs_paper=total - baseline_paper,
    )
