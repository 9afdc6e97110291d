"""Behavioral model of the 3T-1MTJ P-Bit circuit.

The sMTJ sits between the supply and the drain node of an NMOS pull-down, so
the drain voltage is a resistive divider that moves with the junction state;
a CMOS inverter squares that up into a rail-to-rail stochastic output.  The
transistor is a one-parameter triode resistance and the inverter defaults to
an ideal comparator at v_dd / 2, with an optional logistic mode for studying
soft-switching non-idealities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit
from scipy.special import expit

from .smtj import (
    MtjState,
    SmtjParams,
    _seed_entropy,
    r_antiparallel,
    states_at,
    switching_times,
)

NMOS_OFF_RESISTANCE = 1e10  # ohm, below-threshold channel

IDEAL_GAIN = math.inf  # sentinel: inverter acts as an ideal comparator


@dataclass(frozen=True)
class NmosParams:
    """Triode-region NMOS stand-in: threshold voltage and transconductance scale."""

    v_threshold: float = 0.4
    k_factor: float = 5e-4

    def __post_init__(self) -> None:
        if self.v_threshold < 0:
            raise ValueError("v_threshold must be >= 0")
        if self.k_factor <= 0:
            raise ValueError("k_factor must be > 0")


@dataclass(frozen=True)
class InverterParams:
    """Inverter switch point and steepness; gain=inf selects the ideal comparator."""

    v_switch: float
    gain: float = IDEAL_GAIN

    def __post_init__(self) -> None:
        if self.gain < 1:
            raise ValueError("gain must be >= 1")


@dataclass(frozen=True)
class PbitParams:
    """Full 3T-1MTJ circuit parameterization."""

    smtj: SmtjParams = field(default_factory=SmtjParams)
    nmos: NmosParams = field(default_factory=NmosParams)
    inverter: InverterParams | None = None
    v_dd: float = 1.2
    c_load: float = 1e-15

    def __post_init__(self) -> None:
        if self.v_dd <= 0:
            raise ValueError("v_dd must be > 0")
        if self.c_load < 0:
            raise ValueError("c_load must be >= 0")
        if self.inverter is None:
            object.__setattr__(self, "inverter", InverterParams(v_switch=self.v_dd / 2))
        if not 0 < self.inverter.v_switch < self.v_dd:
            raise ValueError("v_switch must lie strictly inside (0, v_dd)")

    def to_json(self) -> dict:
        return {
            "smtj": self.smtj.to_json(),
            "nmos_v_threshold_V": self.nmos.v_threshold,
            "nmos_k_factor_A_per_V2": self.nmos.k_factor,
            "inverter_v_switch_V": self.inverter.v_switch,
            "inverter_gain": None if math.isinf(self.inverter.gain) else self.inverter.gain,
            "v_dd_V": self.v_dd,
            "c_load_F": self.c_load,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PbitParams":
        gain = obj.get("inverter_gain")
        return cls(
            smtj=SmtjParams.from_json(obj["smtj"]),
            nmos=NmosParams(obj["nmos_v_threshold_V"], obj["nmos_k_factor_A_per_V2"]),
            inverter=InverterParams(
                obj["inverter_v_switch_V"], IDEAL_GAIN if gain is None else gain
            ),
            v_dd=obj["v_dd_V"],
            c_load=obj["c_load_F"],
        )


@dataclass(frozen=True)
class TransferPoint:
    v_in: float
    samples: np.ndarray
    mean_v_out: float


@dataclass(frozen=True)
class TransferCurve:
    """Sampled P-Bit outputs over an input-voltage grid."""

    points: tuple

    @property
    def v_in(self) -> np.ndarray:
        return np.array([p.v_in for p in self.points])

    @property
    def means(self) -> np.ndarray:
        return np.array([p.mean_v_out for p in self.points])

    def to_samples_csv(self, file) -> None:
        file.write("v_in_V,sample_idx,v_out_V\n")
        for p in self.points:
            for k, v in enumerate(p.samples):
                file.write(f"{p.v_in:.12g},{k},{v:.12g}\n")

    def to_summary_csv(self, file) -> None:
        file.write("v_in_V,mean_v_out_V\n")
        for p in self.points:
            file.write(f"{p.v_in:.12g},{p.mean_v_out:.12g}\n")


def nmos_resistance(n: NmosParams, v_gs: float) -> float:
    """Channel resistance at gate drive v_gs: OFF value at or below threshold,
    1 / (k * (v_gs - v_threshold)) in triode above it."""
    if v_gs <= n.v_threshold:
        return NMOS_OFF_RESISTANCE
    return 1.0 / (n.k_factor * (v_gs - n.v_threshold))


def drain_voltage(p: PbitParams, v_in: float, state: MtjState) -> float:
    """Divider voltage at the sMTJ / NMOS node.

    The junction sits between v_dd and the drain, so a higher junction
    resistance (anti-parallel) pulls the drain lower.
    """
    _check_input(p, v_in)
    r_mtj = r_antiparallel(p.smtj) if state is MtjState.ANTIPARALLEL else p.smtj.r_parallel
    r_n = nmos_resistance(p.nmos, v_in)
    return p.v_dd * r_n / (r_n + r_mtj)


def output_voltage(p: PbitParams, v_in: float, state: MtjState) -> float:
    """Inverter output for a fixed junction state.

    Ideal mode returns v_dd when the drain sits below the switch point and 0
    otherwise; logistic mode softens that step with the configured gain.
    """
    v_d = drain_voltage(p, v_in, state)
    inv = p.inverter
    if math.isinf(inv.gain):
        return p.v_dd if v_d < inv.v_switch else 0.0
    return p.v_dd * float(expit(inv.gain * (inv.v_switch - v_d) / p.v_dd))


def calibrate_match(p: PbitParams) -> NmosParams:
    """NMOS sizing that centers the transfer curve at v_dd / 2.

    Sets k_factor so the channel resistance at v_gs = v_dd / 2 equals the
    geometric mean of the two junction resistances, which places the inverter
    threshold strictly between the two drain levels at midscale input.
    """
    target = math.sqrt(p.smtj.r_parallel * r_antiparallel(p.smtj))
    v_on = p.v_dd / 2 - p.nmos.v_threshold
    if v_on <= 0:
        raise ValueError("v_threshold leaves no gate drive at v_dd / 2")
    return NmosParams(v_threshold=p.nmos.v_threshold, k_factor=1.0 / (target * v_on))


def sample_output(
    p: PbitParams, v_in: float, n: int, sample_interval: float, b: float, seed
) -> np.ndarray:
    """Sampled output voltages from one sMTJ trajectory at field b.

    Records output_voltage at instants k * sample_interval for k < n.
    Warns when the interval is shorter than the mean dwell time, since
    consecutive samples are then correlated.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sample_interval <= 0:
        raise ValueError("sample_interval must be > 0")
    _check_input(p, v_in)
    if sample_interval < p.smtj.tau_mean:
        warnings.warn(
            f"sample_interval={sample_interval:g} s under tau_mean="
            f"{p.smtj.tau_mean:g} s: consecutive samples are correlated",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    state0, transitions = switching_times(p.smtj, b, n * sample_interval, rng)
    labels = states_at(state0, transitions, np.arange(n) * sample_interval)
    out_p = output_voltage(p, v_in, MtjState.PARALLEL)
    out_ap = output_voltage(p, v_in, MtjState.ANTIPARALLEL)
    return np.where(labels == MtjState.ANTIPARALLEL, out_ap, out_p)


def transfer_curve(
    p: PbitParams, v_in_grid, n_per_point: int, sample_interval: float, b: float, seed
) -> TransferCurve:
    """Sample the output at every grid input and average per point.

    Point i runs on its own stream seeded by SeedSequence((seed, i)), so
    extending the grid never perturbs existing points.
    """
    grid = [float(v) for v in v_in_grid]
    if not grid:
        raise ValueError("v_in_grid must not be empty")
    points = []
    for i, v in enumerate(grid):
        child = np.random.SeedSequence((_seed_entropy(seed), i))
        samples = sample_output(p, v, n_per_point, sample_interval, b, child)
        points.append(TransferPoint(v_in=v, samples=samples, mean_v_out=float(samples.mean())))
    return TransferCurve(points=tuple(points))


def fit_sigmoid(v_in, means, v_dd: float) -> tuple[float, float]:
    """Least-squares logistic fit mean = v_dd * expit((v - center) / width).

    Returns (center, width) in volts.
    """
    v = np.asarray(v_in, dtype=float)
    y = np.asarray(means, dtype=float)
    span = max(v.max() - v.min(), 1e-9)
    c0 = v[int(np.argmin(np.abs(y - v_dd / 2)))]
    (center, width), _ = curve_fit(
        lambda vv, c, w: v_dd * expit((vv - c) / w),
        v,
        y,
        p0=[c0, span / 20],
        bounds=([v.min() - span, 1e-6 * span], [v.max() + span, 10 * span]),
        maxfev=5000,
    )
    return float(center), float(width)


def mixed_region_span(
    curve: TransferCurve, v_dd: float, lo_frac: float = 0.2, hi_frac: float = 0.8
) -> float:
    """Input span over which the mean output is neither low- nor high-saturated."""
    v = curve.v_in
    m = curve.means
    mixed = v[(m > lo_frac * v_dd) & (m < hi_frac * v_dd)]
    if mixed.size < 2:
        return 0.0
    return float(mixed.max() - mixed.min())


def _check_input(p: PbitParams, v_in: float) -> None:
    if not 0 <= v_in <= p.v_dd:
        raise ValueError(f"v_in={v_in} outside [0, {p.v_dd}]")
