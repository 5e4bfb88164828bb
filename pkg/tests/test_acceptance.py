"""End-to-end acceptance gate: one test per shipped guarantee.

Each test here states a user-visible promise of the package and verifies it
at the promised tolerance.  Everything below runs headless; nothing depends
on the browser front end.
"""

import json
import math
import random
import warnings

import pytest

from foldchain import cli, files, mechanics, service
from foldchain.bus import BusModel, Polarity, RomId, make_chain_bus
from foldchain.control import (
    ChainState,
    MotorEncoderModel,
    ParticleStatus,
    TimingParams,
    folding_time,
    full_fold_spool_check,
    run_motor_until,
    unfold,
)
from foldchain.errors import EmptyPlan
from foldchain.geometry import Curve, FoldDirection, strip_from_plan
from foldchain.mechanics import MechParams, kgf_to_n
from foldchain.planner import TruncatedBranchWarning, plan_curve

import helpers
from conftest import VERTICAL_CURVE_OBJ


def test_fold_round_duration_identity():
    """One fold with two switch writes costs 1672 ms measured, 678 nominal."""
    assert folding_time(1, 2, TimingParams.measured()) == 1672
    assert folding_time(1, 2, TimingParams.nominal()) == 678


def test_spool_arithmetic():
    """Three full folds take 0.789 spool revolutions, 113 encoder cycles."""
    check = full_fold_spool_check(particles=3)
    assert check.revolutions == pytest.approx(0.789, abs=1e-3)
    assert check.target_cycles == 113


def test_mechanical_advantage_value():
    """Default link geometry (offset 1.28 mm over 32.11 mm) levers 12.54x."""
    assert mechanics.mechanical_advantage() == pytest.approx(12.54, abs=0.01)
    # the figure usually quoted, 12.5, is the same number at h = 32 mm
    assert mechanics.mechanical_advantage(MechParams(h_mm=32.0)) == 12.5


def test_sma_lateral_force_value():
    """Two 14.7 N straps at 30 degrees pull 25.46 N sideways (2.596 kgf)."""
    force_n = mechanics.sma_lateral_force()
    assert force_n == pytest.approx(25.46, abs=0.01)
    force_kgf = force_n / mechanics.KGF_TO_N
    assert force_kgf == pytest.approx(2.596, abs=5e-4)
    # the rounded 2.59 kgf figure is this value truncated, not rounded
    assert abs(force_kgf - 2.59) < 0.01


def test_chain_length_limit():
    """Rounded inputs give a 169.65-particle limit; half of it is the
    commonly quoted 84, the same expression missing its factor of two."""
    printed = mechanics.max_particles(kgf_to_n(2.59), MechParams(h_mm=32.0))
    assert printed == pytest.approx(169.65, abs=0.01)
    bare_sqrt = math.sqrt(12.5 * 2.59 / 0.0045)
    assert bare_sqrt == pytest.approx(84.8, abs=0.05)
    assert bare_sqrt == pytest.approx(printed / 2, abs=1e-9)
    # both figures surface in the analyze report rather than only one
    report = cli.analyze_report(MechParams(h_mm=32.0), [84, 85, 169, 170])
    assert report["max_particles_printed"] == pytest.approx(printed)
    assert report["quoted_design_limit"] == 84


def test_encoder_error_self_compensation():
    """Cumulative encoder targets keep total error within the +-2 cycle
    stop noise after any number of folds, in 1000 trials out of 1000."""
    m = MotorEncoderModel()
    for n_folds in (3, 10, 84):
        for trial in range(1000):
            rng = random.Random(n_folds * 100_000 + trial)
            current = 0
            for k in range(1, n_folds + 1):
                current = run_motor_until(
                    m.target_for(k), m, seed=rng, current_cycles=current
                )
            assert abs(current - m.target_for(n_folds)) <= m.noise_cycles
    # contrast: re-based per-fold targets would drift far outside that band
    per_fold = math.floor(m.cycles_per_particle)
    assert abs(84 * per_fold - m.target_for(84)) > m.noise_cycles


def test_planner_property_suite():
    """500 random desk-scale polylines: the plan matches a dense-sampling
    oracle, strips stay edge-connected, planning is deterministic, and
    fold letters rebuild the exact strip."""
    rng = random.Random(878787)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncatedBranchWarning)
        for i in range(500):
            pts = helpers.random_simple_polyline(rng, max_folds=100)
            curve = Curve(pts)
            try:
                res = plan_curve(curve, 1.0)
            except EmptyPlan:
                assert helpers.oracle_strip_cells(pts, 1.0) == []
                continue
            again = plan_curve(curve, 1.0)
            assert res.plan == again.plan and res.strip == again.strip
            assert strip_from_plan(res.plan) == res.strip  # also re-validates
            got = [el.tri for el in res.strip]
            assert got == helpers.oracle_strip_cells(pts, 1.0), f"curve {i}: {pts}"

    # a jitter spike that re-crosses one lattice edge must cancel out
    base = [(0.2, 2.5), (0.2, 0.3)]
    spiked = [(0.2, 2.5), (0.2, 1.745), (0.17, 1.726), (0.24, 1.745), (0.24, 0.3)]
    res_base = plan_curve(Curve(base), 1.0)
    res_spiked = plan_curve(Curve(spiked), 1.0)
    assert res_spiked.plan == res_base.plan
    assert [el.tri for el in res_spiked.strip] == [el.tri for el in res_base.strip]

    # running exactly through lattice vertices plans like the curve nudged
    # an epsilon to the right of travel (downward travel: negative x)
    on_vertices = plan_curve(Curve([(0.0, -0.9), (0.0, 2.5)]), 1.0)
    nudged = plan_curve(Curve([(-3e-5, -0.9), (-3e-5, 2.5)]), 1.0)
    assert on_vertices.plan == nudged.plan
    assert [el.tri for el in on_vertices.strip] == [el.tri for el in nudged.strip]


def test_bus_suite():
    """Discovery is exact for 0..64 devices, localization recovers wiring
    in 100/100 shuffles, and line current obeys both supply modes."""
    rng = random.Random(90125)
    for n in range(65):
        bus = BusModel()
        while len(bus.wiring) < n:
            rid = RomId.random(rng)
            if rid not in bus.nodes:
                bus.attach(rid)
        assert bus.search_rom() == set(bus.wiring)

    for trial in range(100):
        n_nodes = random.Random(7000 + trial).randint(2, 64)
        bus = make_chain_bus(n_nodes - 1, seed=trial, localized=False)
        ids = list(bus.wiring)
        random.Random(trial).shuffle(ids)
        order = bus.localize_chain(ids)
        assert order == bus.wiring or order == bus.wiring[::-1]

    # data mode never exceeds 5.4 mA and straps carry nothing, whatever
    # the switches are set to
    bus = make_chain_bus(11, seed=5)
    cfg_rng = random.Random(6)
    for _ in range(50):
        for rom in bus.wiring:
            bus.configure_node(rom, cfg_rng.choice(list(Polarity)))
        assert bus.bus_current() == min(5.4, 0.5 + 0.05 * len(bus.wiring))
        assert bus.bus_current() <= 5.4
    big = make_chain_bus(119, seed=9)
    assert big.bus_current() == 5.4

    # power mode at 20 V: 280 mA for each enabled strap, measured model
    bus = make_chain_bus(5, seed=3)
    bus.activate_straps(set())
    bus.commutate("power", volts=20.0)
    assert bus.bus_current() == 0.0
    bus.commutate("data")
    bus.activate_straps({(0, FoldDirection.LEFT), (2, FoldDirection.RIGHT)})
    assert bus.bus_current() == min(5.4, 0.5 + 0.05 * len(bus.wiring))  # still data
    bus.commutate("power", volts=20.0)
    assert bus.bus_current() == 560.0
    live = [s for s in bus.straps() if s.enabled]
    assert [s.current_ma for s in live] == [280.0, 280.0]


def test_unfold_behavior():
    """Three folded particles straighten fully in 168 ms at zero friction;
    residual folds rise with friction and fall with tail weight."""

    def folded(n):
        state = ChainState.straight(n)
        for i in range(n):
            state.statuses[i] = ParticleStatus.FOLDED_LEFT
        return state

    report = unfold(folded(3), friction=0.0)
    assert report.duration_ms == 168.0
    assert report.residual == ()
    assert report.released == (0, 1, 2)

    frictions = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
    residuals = [len(unfold(folded(6), friction=f).residual) for f in frictions]
    assert residuals == sorted(residuals)
    assert residuals[0] == 0 and residuals[-1] > 0

    tails = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    stuck = [
        len(unfold(folded(6), friction=1.3, tail_weight_g=g).residual) for g in tails
    ]
    assert stuck == sorted(stuck, reverse=True)
    assert stuck[0] > stuck[-1]


def test_cli_service_byte_parity():
    """Planning, simulation and analysis answer byte-identically over HTTP
    and on the command line for a corpus of fixtures."""
    rng = random.Random(31337)
    curves = [VERTICAL_CURVE_OBJ]
    while len(curves) < 6:
        pts = helpers.random_simple_polyline(rng, max_folds=40)
        obj = {"pitch_mm": 1.0, "points": [[x, y] for x, y in pts]}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncatedBranchWarning)
                cli.plan_bytes(obj)
        except EmptyPlan:
            continue
        curves.append(obj)

    srv, _thread = service.start_background(port=0)
    try:
        host, port = srv.server_address[:2]
        import http.client

        def call(method, path, body=None):
            conn = http.client.HTTPConnection(host, port, timeout=30)
            try:
                payload = json.dumps(body).encode() if body is not None else None
                conn.request(method, path, body=payload)
                resp = conn.getresponse()
                return resp.status, resp.read()
            finally:
                conn.close()

        for curve_obj in curves:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncatedBranchWarning)
                plan_raw, _ = cli.plan_bytes(curve_obj)
            status, body = call("POST", "/plan", curve_obj)
            assert (status, body) == (200, plan_raw)

            plan_obj = json.loads(plan_raw)
            for preset, group in (("measured", "one"), ("nominal", "batch")):
                want = cli.simulate_bytes(
                    plan_obj, cli.resolve_timing(preset), group=group
                )
                status, body = call(
                    "POST", f"/simulate?timing={preset}&group={group}", plan_obj
                )
                assert (status, body) == (200, want)

        for query, mech_obj, n_range in (
            ("", None, cli.DEFAULT_N_RANGE),
            ("?h_mm=32.0&N=80:90", {"h_mm": 32.0}, "80:90"),
            ("?delta_mm=1.5&N=160:180:5", {"delta_mm": 1.5}, "160:180:5"),
        ):
            want = cli.analyze_bytes(mech_obj, n_range=n_range)
            status, body = call("GET", f"/analyze{query}")
            assert (status, body) == (200, want)
    finally:
        srv.shutdown()
        srv.server_close()
