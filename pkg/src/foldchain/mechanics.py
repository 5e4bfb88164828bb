"""Closed-form mechanical scaling model of the folding chain.

A folded particle is held by a thread loop; pulling the thread sideways by
the loop clearance unlocks it.  The lever ratio between thread tension and
lateral unlock force gives the mechanical advantage; the worst-case thread
tension of a horizontally extended uniform chain grows quadratically with
particle count; equating both yields the largest drivable chain.

All internal forces are newtons and lengths millimetres.  Gram-force and
kilogram-force appear only at the I/O boundary via the helpers below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

GF_TO_N = 9.80665e-3
KGF_TO_N = 9.80665


def gf_to_n(gf: float) -> float:
    return gf * GF_TO_N


def n_to_gf(n: float) -> float:
    return n / GF_TO_N


def kgf_to_n(kgf: float) -> float:
    return kgf * KGF_TO_N


def n_to_kgf(n: float) -> float:
    return n / KGF_TO_N


@dataclass(frozen=True)
class MechParams:
    """Measured mechanical constants of one particle design.

    delta_mm     thread loop clearance
    h_mm         lever height between loop and hinge
    l_mm         particle edge length; cancels out of every closed form
                 here and is kept only for completeness
    Wp_N         weight of one particle (stored in N, serialized in gf)
    Fsma_N       pull force of one SMA strap
    strap_angle_deg  strap angle against the folding direction
    sma_contraction  usable SMA stroke as a fraction of routed path length
    """

    delta_mm: float = 1.28
    h_mm: float = 32.11
    l_mm: Optional[float] = None
    Wp_N: float = 4.5 * GF_TO_N
    Fsma_N: float = 14.7
    strap_angle_deg: float = 30.0
    sma_contraction: float = 0.04

    def __post_init__(self) -> None:
        if self.delta_mm <= 0:
            raise ValueError("delta_mm must be positive")
        if self.h_mm <= 2 * self.delta_mm:
            raise ValueError("h_mm must exceed 2*delta_mm (advantage above 1)")
        if self.l_mm is not None and self.l_mm <= 0:
            raise ValueError("l_mm must be positive when given")
        if self.Wp_N <= 0 or self.Fsma_N <= 0:
            raise ValueError("forces must be positive")
        if not 0 < self.sma_contraction < 1:
            raise ValueError("sma_contraction must be a fraction in (0,1)")
        if not 0 < self.strap_angle_deg < 90:
            raise ValueError("strap_angle_deg must be in (0, 90)")

    def to_dict(self) -> dict:
        return {
            "delta_mm": self.delta_mm,
            "h_mm": self.h_mm,
            "l_mm": self.l_mm,
            "Wp_gf": n_to_gf(self.Wp_N),
            "Fsma_N": self.Fsma_N,
            "strap_angle_deg": self.strap_angle_deg,
            "sma_contraction": self.sma_contraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MechParams":
        return cls(
            delta_mm=float(d.get("delta_mm", 1.28)),
            h_mm=float(d.get("h_mm", 32.11)),
            l_mm=None if d.get("l_mm") is None else float(d["l_mm"]),
            Wp_N=gf_to_n(float(d.get("Wp_gf", 4.5))),
            Fsma_N=float(d.get("Fsma_N", 14.7)),
            strap_angle_deg=float(d.get("strap_angle_deg", 30.0)),
            sma_contraction=float(d.get("sma_contraction", 0.04)),
        )


def mechanical_advantage(p: MechParams = MechParams()) -> float:
    """Lever ratio h / (2 delta): thread tension per unit unlock force."""
    return p.h_mm / (2.0 * p.delta_mm)


def required_unlock_force(thread_force_n: float, p: MechParams = MechParams()) -> float:
    """Sideways force needed to unlock against a given thread tension."""
    if thread_force_n < 0:
        raise ValueError("thread force cannot be negative")
    return 2.0 * (p.delta_mm / p.h_mm) * thread_force_n


def worst_case_thread_force(n_particles: int, p: MechParams = MechParams()) -> float:
    """Thread tension of a fully extended horizontal chain, in N.

    Uniform-mass cantilever: the root moment is (N*l/2)*(N*Wp)/2, carried
    by the thread at lever arm l, so the edge length cancels and
    F_w = N^2 * Wp / 4.
    """
    if n_particles < 0:
        raise ValueError("particle count cannot be negative")
    return n_particles * n_particles * p.Wp_N / 4.0


def sma_lateral_force(p: MechParams = MechParams()) -> float:
    """Combined sideways pull of the two straps: 2 * Fsma * cos(angle)."""
    return 2.0 * p.Fsma_N * math.cos(math.radians(p.strap_angle_deg))


def max_particles(f_s_max_n: float, p: MechParams = MechParams()) -> float:
    """Largest chain whose worst-case tension the unlock force can fight.

    Inverts F_w = N^2*Wp/4 against F_w = advantage * F_s_max, keeping the
    leading factor of two from the inversion:

        N = 2 * sqrt(advantage * F_s_max / Wp)

    The commonly quoted design limit of 84 for the default constants is
    the same expression without that factor of two (i.e. sqrt(...) alone);
    both numbers are reported by the analyze command.  Independent of the
    edge length, which is why this takes no l argument.
    """
    if f_s_max_n <= 0:
        raise ValueError("available force must be positive")
    return 2.0 * math.sqrt(mechanical_advantage(p) * f_s_max_n / p.Wp_N)


def sma_stroke(path_length_mm: float, p: MechParams = MechParams()) -> float:
    """Usable stroke of a strap routed along ``path_length_mm``."""
    if path_length_mm < 0:
        raise ValueError("path length cannot be negative")
    return p.sma_contraction * path_length_mm


@dataclass(frozen=True)
class FeasibilityReport:
    """Force balance for one chain size."""

    n_particles: int
    thread_force_n: float
    unlock_required_n: float
    unlock_available_n: float
    feasible: bool


def feasibility_report(
    n_particles: int,
    p: MechParams = MechParams(),
    f_s_max_n: Optional[float] = None,
) -> FeasibilityReport:
    """Compare required and available unlock force for a chain size.

    ``f_s_max_n`` defaults to the combined SMA pull of the two straps.
    """
    avail = sma_lateral_force(p) if f_s_max_n is None else f_s_max_n
    f_w = worst_case_thread_force(n_particles, p)
    req = required_unlock_force(f_w, p)
    return FeasibilityReport(
        n_particles=n_particles,
        thread_force_n=f_w,
        unlock_required_n=req,
        unlock_available_n=avail,
        feasible=req <= avail,
    )
