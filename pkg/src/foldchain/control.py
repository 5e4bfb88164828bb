"""Folding sequencer: timing model, encoder feedback, unfolding, scheduling.

A fold round follows four steps on the shared bus: a reset pulse, one
configuration write per half-bridge involved, commutation to the power
supply for the strap dwell, and a motor run per deforming particle.  The
round duration is

    T(N, k) = t_setup + k * t_config + t_sma + N * t_mot

with t_setup = t_reset for every round after initialization.  All times
are milliseconds on a simulated clock.

The spooler motor is shared by the whole chain, so encoder targets are
cumulative absolute counts: each fold's stopping error is overwritten by
the next fold's target and only the last one survives, keeping the final
thread position within the per-stop noise for any chain length.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Union

from .bus import BusModel, Polarity
from .errors import ChainTooShort, NotLocalized, UnbalancedChains
from .geometry import FoldDirection
from .planner import FoldPlan

SMA_MINIMUM_MS = 421.0  # full contraction needs at least this dwell


@dataclass(frozen=True)
class TimingParams:
    """Per-step time constants, in milliseconds."""

    t_setup_initial: float = 205.0
    t_reset: float = 78.0
    t_config: float = 22.0
    t_sma: float = 500.0
    t_mot: float = 1050.0
    enforce_sma_minimum: bool = True

    def __post_init__(self) -> None:
        for name in ("t_setup_initial", "t_reset", "t_config", "t_sma", "t_mot"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} cannot be negative")
        if self.enforce_sma_minimum and self.t_sma < SMA_MINIMUM_MS:
            raise ValueError(
                f"t_sma {self.t_sma:g} ms is below the {SMA_MINIMUM_MS:g} ms "
                "full-contraction minimum"
            )

    @classmethod
    def measured(cls) -> "TimingParams":
        """PWM-reduced motor speed, as validated on hardware."""
        return cls()

    @classmethod
    def nominal(cls) -> "TimingParams":
        """Unreduced 14 RPM motor speed."""
        return cls(t_mot=56.0)


TIMING_PRESETS = {
    "measured": TimingParams.measured,
    "nominal": TimingParams.nominal,
}


def folding_time(
    n_particles: int,
    k_writes: int,
    t: Optional[TimingParams] = None,
    initial: bool = False,
) -> float:
    """Duration of one fold round deforming ``n_particles`` particles.

    ``k_writes`` counts switch configuration transactions (two per
    deforming particle when driven by the sequencer).  ``initial`` charges
    the one-time setup cost instead of a plain reset.
    """
    if n_particles < 0 or k_writes < 0:
        raise ValueError("counts cannot be negative")
    t = t or TimingParams.measured()
    setup = t.t_setup_initial if initial else t.t_reset
    return setup + k_writes * t.t_config + t.t_sma + n_particles * t.t_mot


@dataclass(frozen=True)
class MotorEncoderModel:
    """Spooler geometry and quadrature feedback constants."""

    cycles_per_rev: int = 48
    gear_ratio: int = 3  # encoder turns per output shaft turn
    spool_diameter_mm: float = 40.0
    takeup_per_particle_mm: float = 99.1 / 3
    payout_per_particle_mm: float = 0.0  # opposite-side unroll, unmeasured
    noise_cycles: int = 2  # stop-position error bound, integer cycles

    def __post_init__(self) -> None:
        if self.cycles_per_rev <= 0 or self.gear_ratio <= 0:
            raise ValueError("encoder constants must be positive")
        if self.spool_diameter_mm <= 0 or self.takeup_per_particle_mm <= 0:
            raise ValueError("spool geometry must be positive")
        if self.payout_per_particle_mm < 0 or self.noise_cycles < 0:
            raise ValueError("payout and noise cannot be negative")

    @property
    def cycles_per_shaft_rev(self) -> float:
        return self.cycles_per_rev * self.gear_ratio

    @property
    def cycles_per_particle(self) -> float:
        return self.revolutions_for(1) * self.cycles_per_shaft_rev

    def revolutions_for(self, particles: int) -> float:
        return particles * self.takeup_per_particle_mm / (
            math.pi * self.spool_diameter_mm
        )

    def cycles_for(self, particles: int) -> float:
        return self.revolutions_for(particles) * self.cycles_per_shaft_rev

    def target_for(self, folds_done: int) -> int:
        """Cumulative integer encoder target after ``folds_done`` folds."""
        return math.floor(self.cycles_for(folds_done))


@dataclass(frozen=True)
class SpoolCheck:
    revolutions: float
    encoder_cycles: float
    target_cycles: int


def full_fold_spool_check(m: Optional[MotorEncoderModel] = None, particles: int = 3) -> SpoolCheck:
    """Spool travel needed to fold ``particles`` particles completely."""
    if particles < 0:
        raise ValueError("particle count cannot be negative")
    m = m or MotorEncoderModel()
    rev = m.revolutions_for(particles)
    cycles = m.cycles_for(particles)
    return SpoolCheck(revolutions=rev, encoder_cycles=cycles, target_cycles=math.floor(cycles))


def run_motor_until(
    target_cycles: int,
    m: Optional[MotorEncoderModel] = None,
    seed: Union[int, random.Random, None] = None,
    current_cycles: int = 0,
) -> int:
    """Drive the spooler until the encoder reports the target count.

    The stop position lands within ``noise_cycles`` of the target, but the
    counter itself never runs backwards: stopping early on a target at or
    below the current count leaves the count unchanged.
    """
    m = m or MotorEncoderModel()
    if target_cycles < current_cycles:
        raise ValueError("target below the current encoder count")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    noise = rng.randint(-m.noise_cycles, m.noise_cycles) if m.noise_cycles else 0
    return max(current_cycles, target_cycles + noise)


class ParticleStatus(Enum):
    STRAIGHT = "straight"
    FOLDED_LEFT = "folded_left"
    FOLDED_RIGHT = "folded_right"


_FOLDED_STATUS = {
    FoldDirection.LEFT: ParticleStatus.FOLDED_LEFT,
    FoldDirection.RIGHT: ParticleStatus.FOLDED_RIGHT,
}


@dataclass
class ChainState:
    """Mechanical bookkeeping for one chain during and after folding."""

    statuses: list[ParticleStatus]
    encoder_count: int = 0
    clock_ms: float = 0.0
    thread_wound_mm: float = 0.0
    thread_payout_mm: float = 0.0

    @classmethod
    def straight(cls, n_particles: int) -> "ChainState":
        return cls(statuses=[ParticleStatus.STRAIGHT] * n_particles)

    @property
    def folded_indices(self) -> tuple[int, ...]:
        return tuple(
            i for i, s in enumerate(self.statuses) if s is not ParticleStatus.STRAIGHT
        )


@dataclass(frozen=True)
class TimelineEvent:
    t_start_ms: float
    t_end_ms: float
    event: str  # reset | config | sma | motor
    particle: Optional[int] = None

    def to_json_obj(self) -> dict:
        return {
            "t_start_ms": self.t_start_ms,
            "t_end_ms": self.t_end_ms,
            "event": self.event,
            "particle": self.particle,
        }


@dataclass(frozen=True)
class Timeline:
    """Ordered, non-overlapping events of one sequencing run."""

    events: tuple[TimelineEvent, ...]

    def __post_init__(self) -> None:
        cursor = None
        for ev in self.events:
            if ev.t_end_ms < ev.t_start_ms:
                raise ValueError("event ends before it starts")
            if cursor is not None and ev.t_start_ms < cursor:
                raise ValueError("events overlap")
            cursor = ev.t_end_ms

    @property
    def total_ms(self) -> float:
        return self.events[-1].t_end_ms if self.events else 0.0

    def to_json_obj(self) -> list[dict]:
        return [ev.to_json_obj() for ev in self.events]


@dataclass(frozen=True)
class FoldResult:
    timeline: Timeline
    state: ChainState
    rounds: tuple[tuple[tuple[int, FoldDirection], ...], ...]


def _fold_order(plan: FoldPlan, order: str) -> list[tuple[int, FoldDirection]]:
    pairs = list(enumerate(plan.directions))
    if order == "bottom-up":
        return pairs[::-1]  # particle 0 sits at the bracket, fold far end first
    if order == "as-given":
        return pairs
    raise ValueError("order is 'bottom-up' or 'as-given'")


def _round_compatible(
    round_sels: list[tuple[int, FoldDirection]],
    candidate: tuple[int, FoldDirection],
) -> bool:
    """Whether one more strap can share the SMA dwell without conflicts."""
    demand: dict[int, Polarity] = {}
    sels = round_sels + [candidate]
    for particle, side in sels:
        lo = Polarity.UP if side is FoldDirection.LEFT else Polarity.DOWN
        hi = Polarity.DOWN if side is FoldDirection.LEFT else Polarity.UP
        for idx, want in ((particle, lo), (particle + 1, hi)):
            if demand.get(idx, want) is not want:
                return False
            demand[idx] = want
    requested = set(sels)
    indices = sorted(demand)
    for i in indices:
        pair = (demand.get(i), demand.get(i + 1))
        if pair == (Polarity.UP, Polarity.DOWN) and (i, FoldDirection.LEFT) not in requested:
            return False
        if pair == (Polarity.DOWN, Polarity.UP) and (i, FoldDirection.RIGHT) not in requested:
            return False
    return True


def _partition_rounds(
    folds: list[tuple[int, FoldDirection]], grouping: str
) -> list[list[tuple[int, FoldDirection]]]:
    if grouping == "one-per-round":
        return [[f] for f in folds]
    if grouping != "batch":
        raise ValueError("grouping is 'one-per-round' or 'batch'")
    rounds: list[list[tuple[int, FoldDirection]]] = []
    current: list[tuple[int, FoldDirection]] = []
    for fold in folds:
        if current and not _round_compatible(current, fold):
            rounds.append(current)
            current = []
        current.append(fold)
    if current:
        rounds.append(current)
    return rounds


def fold_sequence(
    plan: FoldPlan,
    bus: BusModel,
    t: Optional[TimingParams] = None,
    m: Optional[MotorEncoderModel] = None,
    order: str = "bottom-up",
    grouping: str = "one-per-round",
    seed: Union[int, random.Random, None] = None,
) -> FoldResult:
    """Execute a fold plan on a localized chain, step by step.

    Each round issues a bus reset, two half-bridge writes per deforming
    particle, a power-mode SMA dwell, and one motor run per particle to
    its cumulative encoder target.  Straps that cannot share one dwell
    (opposing demands on a shared node) are serialized into extra rounds
    automatically.  The returned timeline's total equals the round-wise
    sum of the timing model exactly.
    """
    t = t or TimingParams.measured()
    m = m or MotorEncoderModel()
    if bus.chain_order is None:
        raise NotLocalized("localize the chain before sequencing")
    if bus.particle_count < len(plan):
        raise ChainTooShort(
            f"plan folds {len(plan)} particles, chain has {bus.particle_count}"
        )
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    folds = _fold_order(plan, order)
    rounds = _partition_rounds(folds, grouping)

    state = ChainState.straight(bus.particle_count)
    events: list[TimelineEvent] = []
    cursor = 0.0
    folds_done = 0

    def emit(kind: str, duration: float, particle: Optional[int] = None) -> None:
        nonlocal cursor
        events.append(TimelineEvent(cursor, cursor + duration, kind, particle))
        cursor += duration

    if not rounds:
        bus.clock_ms = max(bus.clock_ms, cursor)
        bus.reset()
        emit("reset", t.t_reset)
        state.clock_ms = cursor
        return FoldResult(Timeline(tuple(events)), state, ())

    for round_sels in rounds:
        bus.clock_ms = max(bus.clock_ms, cursor)
        bus.reset()
        emit("reset", t.t_reset)
        for particle, side in round_sels:
            bus.select_strap(particle, side)
            emit("config", t.t_config, particle)
            emit("config", t.t_config, particle)
        bus.commutate("power")
        bus.bus_current()  # trace the dwell draw
        emit("sma", t.t_sma)
        for particle, side in round_sels:
            folds_done += 1
            target = m.target_for(folds_done)
            state.encoder_count = run_motor_until(
                target, m, seed=rng, current_cycles=state.encoder_count
            )
            state.thread_wound_mm += m.takeup_per_particle_mm
            state.thread_payout_mm += m.payout_per_particle_mm
            state.statuses[particle] = _FOLDED_STATUS[side]
            emit("motor", t.t_mot, particle)
        bus.commutate("data")

    state.clock_ms = cursor
    return FoldResult(
        Timeline(tuple(events)),
        state,
        tuple(tuple(r) for r in rounds),
    )


@dataclass(frozen=True)
class UnfoldReport:
    state: ChainState
    duration_ms: float
    released: tuple[int, ...]
    residual: tuple[int, ...]


def unfold(
    state: ChainState,
    friction: float = 0.0,
    tail_weight_g: float = 0.0,
    t_unfold_per_particle_ms: float = 56.0,
) -> UnfoldReport:
    """Release the thread and let gravity straighten the chain.

    Phenomenological model: each folded particle returns to straight when
    its restoring margin is positive.  The margin grows with the hanging
    weight below the particle and with any tail weight, and shrinks with
    the friction number; at zero friction every particle straightens.
    Duration scales linearly in the number of initially folded particles.
    """
    if friction < 0 or tail_weight_g < 0 or t_unfold_per_particle_ms < 0:
        raise ValueError("friction, tail weight and duration cannot be negative")
    n = len(state.statuses)
    folded = state.folded_indices
    new_statuses = list(state.statuses)
    released: list[int] = []
    residual: list[int] = []
    for i in folded:
        below = n - 1 - i  # particles hanging under this joint
        margin = (1.0 + 0.25 * below) + 0.05 * tail_weight_g - friction
        if margin > 0:
            new_statuses[i] = ParticleStatus.STRAIGHT
            released.append(i)
        else:
            residual.append(i)
    duration = t_unfold_per_particle_ms * len(folded)
    new_state = replace(
        state,
        statuses=new_statuses,
        clock_ms=state.clock_ms + duration,
    )
    return UnfoldReport(
        state=new_state,
        duration_ms=duration,
        released=tuple(released),
        residual=tuple(residual),
    )


@dataclass(frozen=True)
class MultiChainSchedule:
    """Lockstep rounds: every chain deforms the same count per round."""

    rounds: tuple[tuple[tuple[tuple[int, FoldDirection], ...], ...], ...]

    @property
    def round_count(self) -> int:
        return len(self.rounds)


def schedule_multi_chain(plans: Sequence[FoldPlan]) -> MultiChainSchedule:
    """Balance several chains so each round deforms equal particle counts.

    Folding in lockstep keeps the mechanical load symmetric across chains.
    With the default one-particle-per-round policy that requires equal
    fold totals; anything else cannot be balanced round by round.
    """
    if not plans:
        raise ValueError("need at least one plan")
    totals = {len(p) for p in plans}
    if len(totals) > 1:
        raise UnbalancedChains(
            f"fold totals differ across chains: {sorted(len(p) for p in plans)}"
        )
    per_chain = [_fold_order(p, "bottom-up") for p in plans]
    n_rounds = totals.pop()
    rounds = tuple(
        tuple((chain[r],) for chain in per_chain) for r in range(n_rounds)
    )
    return MultiChainSchedule(rounds=rounds)
