"""Shared-bus electronics simulator: addressable switches on one data line.

The chain's particles carry dual-channel addressable switches that share a
single two-wire bus.  A commutator at the master end feeds the line either
with the 5 V data supply (communication possible, actuator branches blocked
by their 5.6 V zener) or with a 15..20 V power supply (no communication,
selected actuator straps conduct).  Each pair of wiring-adjacent switches
forms a full H-bridge around the two antagonistic straps of the particle
between them; the two straps mount their diodes in opposite directions, so
the bridge polarity picks which one conducts.

The model tracks a simulated clock in milliseconds and writes a line-based
trace (``t=<ms> <event> key=value ...``) for every transaction, commutation
and current sample, which makes golden-trace tests straightforward.

Node identities follow the usual 64-bit layout: one family byte, a 48-bit
serial, and a CRC byte over the lower 56 bits (polynomial x^8+x^5+x^4+1,
least significant bit first).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    BusInPowerMode,
    MasterDesynced,
    NoSuchNode,
    NotAChain,
    NotLocalized,
    NoSuchParticle,
    OvervoltageDamage,
    PolarityConflict,
)
from .geometry import FoldDirection

DEFAULT_FAMILY_CODE = 0x3A  # dual-channel addressable switch

# current model, mA per conducting strap
STRAP_CURRENT_MA = {"measured": 280.0, "nominal": 180.0}

# detection threshold for localization probes: half the nominal strap
# current, comfortably above the data-mode ceiling and below either model
LOCALIZE_THRESHOLD_MA = 0.5 * STRAP_CURRENT_MA["nominal"]

DATA_SUPPLY_V = 5.0
ZENER_CUTOFF_V = 5.6
POWER_SUPPLY_RANGE_V = (15.0, 20.0)
ABSOLUTE_MAX_V = 28.0

DATA_LIMIT_MA = 5.4
DATA_IDLE_BASE_MA = 0.5   # master pull-up
DATA_PER_NODE_MA = 0.05   # harvesting draw per live node


def crc8(data: bytes) -> int:
    """Dallas/Maxim CRC-8, LSB first, reflected polynomial 0x8C."""
    crc = 0
    for byte in data:
        for _ in range(8):
            mix = (crc ^ byte) & 1
            crc >>= 1
            if mix:
                crc ^= 0x8C
            byte >>= 1
    return crc


@dataclass(frozen=True, order=True)
class RomId:
    """64-bit node identity with a self-checking layout."""

    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < 1 << 64:
            raise ValueError("rom id must fit in 64 bits")
        low = self.value.to_bytes(8, "little")[:7]
        if crc8(low) != self.crc:
            raise ValueError(f"rom id {self.value:#018x} fails its CRC")

    @property
    def family_code(self) -> int:
        return self.value & 0xFF

    @property
    def serial(self) -> int:
        return (self.value >> 8) & (1 << 48) - 1

    @property
    def crc(self) -> int:
        return self.value >> 56

    @classmethod
    def from_parts(cls, family_code: int, serial: int) -> "RomId":
        if not 0 <= family_code < 256:
            raise ValueError("family code is one byte")
        if not 0 <= serial < 1 << 48:
            raise ValueError("serial is 48 bits")
        low = family_code | (serial << 8)
        check = crc8(low.to_bytes(7, "little"))
        return cls(low | (check << 56))

    @classmethod
    def random(cls, rng: random.Random, family_code: int = DEFAULT_FAMILY_CODE) -> "RomId":
        return cls.from_parts(family_code, rng.getrandbits(48))

    def bit(self, position: int) -> int:
        return (self.value >> position) & 1

    def __str__(self) -> str:
        return f"{self.value:016x}"


class Polarity(Enum):
    """Half-bridge state a node presents to both neighbouring strap pairs."""

    UP = "up"
    DOWN = "down"
    OFF = "off"


# channel levels encoding one polarity; high/high is the power-on default
_POLARITY_LEVELS = {
    Polarity.UP: (True, False),
    Polarity.DOWN: (False, True),
    Polarity.OFF: (True, True),
}


def _levels_to_polarity(a: bool, b: bool) -> Polarity:
    if (a, b) == (True, False):
        return Polarity.UP
    if (a, b) == (False, True):
        return Polarity.DOWN
    return Polarity.OFF


@dataclass
class SwitchNode:
    """One addressable switch: two output channels plus a hold capacitor."""

    rom: RomId
    pio_a: bool = True
    pio_b: bool = True
    capacitor_ok: bool = True
    alive: bool = True

    @property
    def polarity(self) -> Polarity:
        return _levels_to_polarity(self.pio_a, self.pio_b)


@dataclass(frozen=True)
class StrapCircuit:
    """Strap between wiring neighbours i and i+1 on one diode side.

    A derived view: ``enabled`` reflects the bridge polarities at the time
    the view was taken, ``current_ma`` is what the strap draws when the
    line carries the power supply (zero when broken).
    """

    pair_index: int
    side: FoldDirection
    nodes: tuple[RomId, RomId]
    enabled: bool
    broken: bool
    current_ma: float


class BusMode(Enum):
    DATA = "data"
    POWER = "power"


@dataclass(frozen=True)
class BusSnapshot:
    """Immutable view of the bus for inspection and assertions."""

    mode: BusMode
    supply_volts: float
    master_synced: bool
    clock_ms: float
    levels: tuple[tuple[RomId, bool, bool, bool], ...]  # rom, a, b, alive
    enabled_straps: tuple[tuple[int, FoldDirection], ...]


def _fmt_ms(ms: float) -> str:
    if float(ms).is_integer():
        return str(int(ms))
    return f"{ms:.3f}"


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


class BusModel:
    """Simulated shared bus: nodes, commutator, current draw and trace."""

    def __init__(
        self,
        strap_model: str = "measured",
        t_config_ms: float = 22.0,
        t_reset_ms: float = 78.0,
        power_volts: float = 20.0,
    ):
        if strap_model not in STRAP_CURRENT_MA:
            raise ValueError(f"unknown strap model {strap_model!r}")
        self.strap_model = strap_model
        self.t_config_ms = float(t_config_ms)
        self.t_reset_ms = float(t_reset_ms)
        self.default_power_volts = float(power_volts)
        self.mode = BusMode.DATA
        self.supply_volts = DATA_SUPPLY_V
        self.master_synced = True
        self.clock_ms = 0.0
        self.trace: list[str] = []
        self.transaction_count = 0
        self.nodes: dict[RomId, SwitchNode] = {}
        self.wiring: list[RomId] = []  # physical chain order, ground truth
        self.chain_order: Optional[list[RomId]] = None
        self.broken_straps: set[tuple[int, FoldDirection]] = set()

    # ------------------------------------------------------------- plumbing

    def _log(self, event: str, **kv) -> None:
        parts = [f"t={_fmt_ms(self.clock_ms)}", event]
        parts += [f"{k}={v}" for k, v in kv.items()]
        self.trace.append(" ".join(parts))

    def attach(self, rom: RomId, capacitor_ok: bool = True) -> SwitchNode:
        """Wire one more node onto the end of the chain."""
        if rom in self.nodes:
            raise ValueError(f"node {rom} already attached")
        node = SwitchNode(rom=rom, capacitor_ok=capacitor_ok)
        self.nodes[rom] = node
        self.wiring.append(rom)
        return node

    def break_strap(self, pair_index: int, side: FoldDirection) -> None:
        """Fault-injection hook: the strap exists but never conducts."""
        if not 0 <= pair_index < max(len(self.wiring) - 1, 0):
            raise NoSuchParticle(f"no strap pair {pair_index}")
        self.broken_straps.add((pair_index, side))

    def _alive_nodes(self) -> list[SwitchNode]:
        return [self.nodes[r] for r in self.wiring if self.nodes[r].alive]

    def _node(self, rom: RomId) -> SwitchNode:
        node = self.nodes.get(rom)
        if node is None or not node.alive:
            raise NoSuchNode(f"no live node {rom}")
        return node

    def _require_data_mode(self) -> None:
        if self.mode is BusMode.POWER:
            raise BusInPowerMode("communication is blocked in power mode")

    def reset(self) -> None:
        """Reset pulse: re-synchronizes every slave with the master."""
        self._require_data_mode()
        self.clock_ms += self.t_reset_ms
        self.master_synced = True
        self.transaction_count += 1
        self._log("reset")

    def _pre_transaction(self) -> None:
        """Transactions after a power phase first need a reset."""
        self._require_data_mode()
        if not self.master_synced:
            self.reset()

    # ---------------------------------------------------------- discovery

    def search_rom(self) -> set[RomId]:
        """Enumerate all live node ids by the binary tree-walk search.

        One pass discovers one device (so a full enumeration takes exactly
        as many passes as there are devices).  Requires a synchronized
        master; callers coming out of a power phase must reset first.
        """
        self._require_data_mode()
        if not self.master_synced:
            raise MasterDesynced("reset the bus before searching")
        devices = self._alive_nodes()
        found: set[RomId] = set()
        self.transaction_count += 1
        if not devices:
            self._log("search_pass", index=0, found="none")
            return found

        last_discrepancy = 0
        pass_index = 0
        while True:
            pass_index += 1
            active = list(devices)
            rom_bits = 0
            last_zero = 0
            for bit_number in range(1, 65):
                position = bit_number - 1
                bits = {n.rom.bit(position) for n in active}
                if bits == {0, 1}:  # discrepancy: both branches populated
                    if bit_number < last_discrepancy:
                        direction = (previous >> position) & 1
                    elif bit_number == last_discrepancy:
                        direction = 1
                    else:
                        direction = 0
                    if direction == 0:
                        last_zero = bit_number
                else:
                    direction = bits.pop()
                if direction:
                    rom_bits |= 1 << position
                active = [n for n in active if n.rom.bit(position) == direction]
            rom = RomId(rom_bits)
            found.add(rom)
            previous = rom_bits
            last_discrepancy = last_zero
            self._log("search_pass", index=pass_index, found=rom)
            self.transaction_count += 1
            if last_zero == 0:
                break
        return found

    # ------------------------------------------------------------- writes

    def set_switch(self, rom: RomId, channel: str, level: Union[bool, str]) -> None:
        """Write one output channel; costs one configuration slot.

        Writing the level a channel already holds is a valid transaction
        and costs the same.  A desynchronized master resets first.
        """
        if isinstance(level, str):
            if level not in ("high", "low"):
                raise ValueError("level is 'high' or 'low'")
            level = level == "high"
        channel = channel.upper()
        if channel not in ("A", "B"):
            raise ValueError("channel is 'A' or 'B'")
        self._pre_transaction()
        node = self._node(rom)
        if channel == "A":
            node.pio_a = level
        else:
            node.pio_b = level
        self.clock_ms += self.t_config_ms
        self.transaction_count += 1
        self._log("set_switch", id=rom, ch=channel, level="high" if level else "low")

    def configure_node(self, rom: RomId, polarity: Polarity) -> None:
        """Write both channels in one transaction: one half-bridge state."""
        self._pre_transaction()
        node = self._node(rom)
        node.pio_a, node.pio_b = _POLARITY_LEVELS[polarity]
        self.clock_ms += self.t_config_ms
        self.transaction_count += 1
        self._log("configure", id=rom, pol=polarity.value)

    def read_switch(self, rom: RomId) -> tuple[bool, bool]:
        """Read back both channel levels (True = high)."""
        self._pre_transaction()
        node = self._node(rom)
        self.clock_ms += self.t_config_ms
        self.transaction_count += 1
        self._log("read_switch", id=rom)
        return (node.pio_a, node.pio_b)

    def polarity_of(self, rom: RomId) -> Polarity:
        """State inspection without a bus transaction."""
        return self._node(rom).polarity

    # ---------------------------------------------------------- commutator

    def commutate(self, target: Union[BusMode, str], volts: Optional[float] = None) -> None:
        """Switch the line between the data and power supplies.

        Entering power mode requires a supply in the 15..20 V window;
        anything above the 28 V absolute maximum destroys every live node.
        Returning to data mode leaves the master desynchronized, so the
        next transaction is preceded by a reset.  Commutating into the
        current mode is a no-op.  Nodes whose hold capacitor is broken
        lose their channel levels on any supply transition.
        """
        if isinstance(target, str):
            target = BusMode(target)
        if target is self.mode:
            return
        if target is BusMode.POWER:
            v = self.default_power_volts if volts is None else float(volts)
            if v > ABSOLUTE_MAX_V:
                for node in self._alive_nodes():
                    node.alive = False
                self.mode = BusMode.POWER
                self.supply_volts = v
                self._log("commutate", mode="power", volts=_fmt_num(v), damage="all")
                raise OvervoltageDamage(
                    f"{v:g} V exceeds the {ABSOLUTE_MAX_V:g} V absolute maximum"
                )
            lo, hi = POWER_SUPPLY_RANGE_V
            if not lo <= v <= hi:
                raise ValueError(f"power supply must be within {lo:g}..{hi:g} V")
            self.mode = BusMode.POWER
            self.supply_volts = v
        else:
            self.mode = BusMode.DATA
            self.supply_volts = DATA_SUPPLY_V
            self.master_synced = False  # slaves lost the data clock
        for node in self._alive_nodes():
            if not node.capacitor_ok:
                node.pio_a, node.pio_b = (True, True)
        self._log("commutate", mode=self.mode.value, volts=_fmt_num(self.supply_volts))

    # ------------------------------------------------------------ current

    def enabled_straps(self) -> list[tuple[int, FoldDirection]]:
        """Strap circuits whose bridge polarity matches their diode side."""
        out: list[tuple[int, FoldDirection]] = []
        for i in range(len(self.wiring) - 1):
            lo = self.nodes[self.wiring[i]]
            hi = self.nodes[self.wiring[i + 1]]
            if not (lo.alive and hi.alive):
                continue
            pair = (lo.polarity, hi.polarity)
            if pair == (Polarity.UP, Polarity.DOWN):
                out.append((i, FoldDirection.LEFT))
            elif pair == (Polarity.DOWN, Polarity.UP):
                out.append((i, FoldDirection.RIGHT))
        return out

    def straps(self) -> list[StrapCircuit]:
        """Both strap circuits of every wiring pair, as a derived view."""
        enabled = set(self.enabled_straps())
        per_strap = STRAP_CURRENT_MA[self.strap_model]
        out: list[StrapCircuit] = []
        for i in range(len(self.wiring) - 1):
            pair = (self.wiring[i], self.wiring[i + 1])
            for side in (FoldDirection.LEFT, FoldDirection.RIGHT):
                broken = (i, side) in self.broken_straps
                out.append(
                    StrapCircuit(
                        pair_index=i,
                        side=side,
                        nodes=pair,
                        enabled=(i, side) in enabled,
                        broken=broken,
                        current_ma=0.0 if broken else per_strap,
                    )
                )
        return out

    def bus_current(self) -> float:
        """Line current in mA for the present mode and switch states.

        Data mode: the 5 V supply stays under the zener cutoff of every
        actuator branch, so only the pull-up and node harvesting draw
        remains, clamped to the data-mode ceiling.  Power mode: the sum of
        one strap current per enabled, unbroken strap.
        """
        if self.mode is BusMode.DATA:
            ma = DATA_IDLE_BASE_MA + DATA_PER_NODE_MA * len(self._alive_nodes())
            ma = min(ma, DATA_LIMIT_MA)
        else:
            per_strap = STRAP_CURRENT_MA[self.strap_model]
            conducting = [
                s for s in self.enabled_straps() if s not in self.broken_straps
            ]
            ma = per_strap * len(conducting)
        self._log("current", mode=self.mode.value, ma=_fmt_num(ma))
        return ma

    # --------------------------------------------------------- localization

    def localize_chain(self, ids: Iterable[RomId]) -> list[RomId]:
        """Recover the wiring order of discovered nodes, up to reversal.

        Starting from the first id, the master configures a reference
        half-bridge, then candidate bridges one at a time with the opposite
        polarity, briefly commutates to power and watches the line current:
        a draw above half the nominal strap current means the candidate is
        wiring-adjacent to the reference.  The walk extends one end of the
        chain until no candidate responds, then grows the other end the
        same way.  Whichever strap side the polarity pair happens to enable
        carries the detection current, so the probe is side-agnostic.

        All switch states are restored afterwards.  Raises NotAChain when
        unplaced nodes remain, which covers broken straps and stray nodes.

        Pair results are memoized, so no node pair is energized twice and
        the probe count stays within n·(n-1)/2 detection cycles.
        """
        self._require_data_mode()
        order: list[RomId] = []
        remaining: list[RomId] = []
        for rom in ids:
            self._node(rom)  # raises NoSuchNode for unknown ids
            remaining.append(rom)
        if not remaining:
            return order
        saved = {r: (self.nodes[r].pio_a, self.nodes[r].pio_b) for r in self.nodes}
        probes = 0
        tested: dict[frozenset[RomId], bool] = {}

        def probe(ref: RomId, cand: RomId) -> bool:
            nonlocal probes
            pair = frozenset((ref, cand))
            if pair in tested:
                return tested[pair]
            probes += 1
            self.configure_node(cand, Polarity.DOWN)
            self.commutate(BusMode.POWER)
            ma = self.bus_current()
            self.commutate(BusMode.DATA)
            self._log("localize_probe", ref=ref, cand=cand, ma=_fmt_num(ma))
            hit = ma > LOCALIZE_THRESHOLD_MA
            if not hit:
                self.configure_node(cand, Polarity.OFF)
            tested[pair] = hit
            return hit

        def grow(end: RomId, append: bool) -> None:
            ref = end
            while remaining:
                self.configure_node(ref, Polarity.UP)
                hit = None
                for cand in list(remaining):
                    if probe(ref, cand):
                        hit = cand
                        break
                self.configure_node(ref, Polarity.OFF)
                if hit is None:
                    return
                self.configure_node(hit, Polarity.OFF)
                remaining.remove(hit)
                if append:
                    order.append(hit)
                else:
                    order.insert(0, hit)
                ref = hit

        try:
            first = remaining.pop(0)
            order.append(first)
            grow(first, append=True)   # one end of the chain
            grow(first, append=False)  # then the other
            if remaining:
                raise NotAChain(
                    f"{len(remaining)} node(s) never moved the line current"
                )
        finally:
            for rom, (a, b) in saved.items():
                node = self.nodes[rom]
                node.pio_a, node.pio_b = a, b
            self._log("localize_restore", probes=probes)
        self._log("localize_done", order="-".join(str(r) for r in order))
        return order

    # ------------------------------------------------------------- straps

    def mark_localized(self, order: Sequence[RomId]) -> None:
        """Fix the operator-confirmed chain order (bracket end first)."""
        for rom in order:
            self._node(rom)
        if len(order) != len(set(order)):
            raise ValueError("chain order repeats a node")
        self.chain_order = list(order)

    @property
    def particle_count(self) -> int:
        if self.chain_order is None:
            return 0
        return max(len(self.chain_order) - 1, 0)

    def _chain_nodes(self, particle: int) -> tuple[RomId, RomId]:
        if self.chain_order is None:
            raise NotLocalized("run localization (or mark_localized) first")
        if not 0 <= particle < self.particle_count:
            raise NoSuchParticle(f"particle {particle} outside 0..{self.particle_count - 1}")
        return (self.chain_order[particle], self.chain_order[particle + 1])

    @staticmethod
    def _strap_demand(side: FoldDirection) -> tuple[Polarity, Polarity]:
        if side is FoldDirection.LEFT:
            return (Polarity.UP, Polarity.DOWN)
        return (Polarity.DOWN, Polarity.UP)

    def select_strap(self, particle: int, side: FoldDirection) -> None:
        """Configure the two half-bridges flanking one particle.

        Two write transactions, exactly what the fold firmware issues per
        deforming particle.  No cleanup of unrelated switches happens here.
        """
        lo, hi = self._chain_nodes(particle)
        want_lo, want_hi = self._strap_demand(side)
        self.configure_node(lo, want_lo)
        self.configure_node(hi, want_hi)

    def activate_straps(
        self, selections: Sequence[tuple[int, FoldDirection]]
    ) -> None:
        """Configure switches so exactly the selected straps are enabled.

        Performs the two flanking writes per selection, then disables any
        leftover strap from earlier activity.  Raises PolarityConflict when
        two selections demand opposite polarities of one shared node, or
        when the demanded pattern would unavoidably energize an unselected
        strap (same side selected with a one-particle gap).
        """
        if self.chain_order is None:
            raise NotLocalized("run localization (or mark_localized) first")
        demand: dict[int, Polarity] = {}
        for particle, side in selections:
            self._chain_nodes(particle)  # range check
            want_lo, want_hi = self._strap_demand(side)
            for idx, want in ((particle, want_lo), (particle + 1, want_hi)):
                have = demand.get(idx)
                if have is not None and have is not want:
                    raise PolarityConflict(
                        f"node {idx} is demanded both {have.value} and {want.value}"
                    )
                demand[idx] = want

        requested = set(selections)
        for i in range(self.particle_count):
            lo, hi = demand.get(i), demand.get(i + 1)
            if (lo, hi) == (Polarity.UP, Polarity.DOWN) and (i, FoldDirection.LEFT) not in requested:
                raise PolarityConflict(f"pattern would energize strap ({i}, L)")
            if (lo, hi) == (Polarity.DOWN, Polarity.UP) and (i, FoldDirection.RIGHT) not in requested:
                raise PolarityConflict(f"pattern would energize strap ({i}, R)")

        for particle, side in selections:
            self.select_strap(particle, side)

        # stale polarities from earlier rounds may still enable a strap one
        # of whose nodes is outside the demand map; switch those off
        assert self.chain_order is not None
        index_of = {rom: i for i, rom in enumerate(self.chain_order)}
        for i, side in self.enabled_straps():
            lo_rom, hi_rom = self.wiring[i], self.wiring[i + 1]
            for rom in (lo_rom, hi_rom):
                ci = index_of.get(rom)
                if ci is not None and ci not in demand:
                    self.configure_node(rom, Polarity.OFF)

    # ------------------------------------------------------------ snapshot

    def snapshot(self) -> BusSnapshot:
        return BusSnapshot(
            mode=self.mode,
            supply_volts=self.supply_volts,
            master_synced=self.master_synced,
            clock_ms=self.clock_ms,
            levels=tuple(
                (r, self.nodes[r].pio_a, self.nodes[r].pio_b, self.nodes[r].alive)
                for r in self.wiring
            ),
            enabled_straps=tuple(self.enabled_straps()),
        )


def make_chain_bus(
    n_particles: int,
    seed: Optional[int] = None,
    strap_model: str = "measured",
    localized: bool = True,
    capacitor_ok: bool = True,
) -> BusModel:
    """Bus with ``n_particles + 1`` randomly-identified nodes in a chain.

    The wiring order is the attach order; with ``localized`` the chain
    order is pinned to it, as after a confirmed localization run.
    """
    if n_particles < 0:
        raise ValueError("particle count cannot be negative")
    rng = random.Random(seed)
    bus = BusModel(strap_model=strap_model)
    while len(bus.wiring) < n_particles + 1:
        rom = RomId.random(rng)
        if rom not in bus.nodes:
            bus.attach(rom, capacitor_ok=capacitor_ok)
    if localized:
        bus.mark_localized(list(bus.wiring))
    return bus
