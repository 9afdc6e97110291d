"""Two-state stochastic MTJ model.

The junction resistance is an ideal random-telegraph process: it sits on one of
two levels (parallel / anti-parallel) and switches with exponentially
distributed holding times.  An in-plane bias field tunes the anti-parallel
occupancy through a logistic response centered on the 50-50 field, while the
total switching rate stays fixed so the correlation scale of the noise does
not drift across the stochastic window.

All generators are pure functions of their arguments including the seed, so
they are safe to call concurrently.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

# Occupancies closer than this to 0 or 1 are treated as pinned: the minority
# dwell time underflows and the trace degenerates to a constant level.
_OCC_PINNED = 1e-12

# The logistic field scale is window_width / OCC_WINDOW_DIVISOR, which makes
# the occupancy span roughly [0.02, 0.98] across the stated window.
OCC_WINDOW_DIVISOR = 8.0


class MtjState(enum.IntEnum):
    """Magnetization configuration. PARALLEL is the low-resistance state."""

    PARALLEL = 0
    ANTIPARALLEL = 1


@dataclass(frozen=True)
class SmtjParams:
    """Physical parameters of one stochastic MTJ.

    Defaults describe the slow reference device: 27.6 kOhm base resistance,
    14.5% TMR, 4.2 ms mean dwell, equal occupancy at -7.22 mT with a 0.6 mT
    stochastic window.

    Attributes:
        r_parallel: low-state resistance, ohm.
        tmr: (r_high - r_low) / r_low, dimensionless fraction.
        tau_mean: mean dwell time at the 50-50 point, seconds.
        b_5050: field of equal state occupancy, tesla.
        window_width: field span of the stochastic window, tesla.
    """

    r_parallel: float = 27.6e3
    tmr: float = 0.145
    tau_mean: float = 4.2e-3
    b_5050: float = -7.22e-3
    window_width: float = 0.6e-3

    def __post_init__(self) -> None:
        if self.r_parallel <= 0:
            raise ValueError(f"r_parallel must be > 0, got {self.r_parallel}")
        # tmr == 0 is allowed as the degenerate single-level device
        if self.tmr < 0:
            raise ValueError(f"tmr must be >= 0, got {self.tmr}")
        if self.tau_mean <= 0:
            raise ValueError(f"tau_mean must be > 0, got {self.tau_mean}")
        if self.window_width <= 0:
            raise ValueError(f"window_width must be > 0, got {self.window_width}")

    def to_json(self) -> dict:
        return {
            "r_parallel_ohm": self.r_parallel,
            "tmr": self.tmr,
            "tau_mean_s": self.tau_mean,
            "b_5050_T": self.b_5050,
            "window_width_T": self.window_width,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SmtjParams":
        return cls(
            r_parallel=obj["r_parallel_ohm"],
            tmr=obj["tmr"],
            tau_mean=obj["tau_mean_s"],
            b_5050=obj["b_5050_T"],
            window_width=obj["window_width_T"],
        )


@dataclass
class TelegraphTrace:
    """Uniformly sampled resistance time series.

    values holds one resistance sample per sampling instant k * sample_interval.
    labels, when present, holds the MtjState of each sample (uint8 of the enum
    value).
    """

    sample_interval: float
    values: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.sample_interval <= 0:
            raise ValueError("sample_interval must be > 0")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValueError("trace must hold at least one sample")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.uint8)
            if self.labels.shape != self.values.shape:
                raise ValueError("labels must match values in length")

    def __len__(self) -> int:
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size * self.sample_interval

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.sample_interval

    def to_csv(self, file) -> None:
        """Write `time_s,resistance_ohm,state` rows (state column only when labeled)."""
        labeled = self.labels is not None
        file.write("time_s,resistance_ohm,state\n" if labeled else "time_s,resistance_ohm\n")
        dt = self.sample_interval
        if labeled:
            for k, (r, lab) in enumerate(zip(self.values, self.labels)):
                file.write(f"{k * dt:.12g},{r:.12g},{'AP' if lab else 'P'}\n")
        else:
            for k, r in enumerate(self.values):
                file.write(f"{k * dt:.12g},{r:.12g}\n")

    @classmethod
    def from_csv(cls, file) -> "TelegraphTrace":
        """Read a trace written by to_csv. Lines starting with '#' are skipped."""
        times, values, labels = [], [], []
        header = None
        for line in file:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if header[:2] != ["time_s", "resistance_ohm"]:
                    raise ValueError(f"unexpected trace header: {line!r}")
                continue
            parts = line.split(",")
            times.append(float(parts[0]))
            values.append(float(parts[1]))
            if len(parts) > 2:
                labels.append(1 if parts[2] == "AP" else 0)
        if len(values) < 2:
            raise ValueError("trace file must hold at least two samples")
        dt = times[1] - times[0]
        lab = np.asarray(labels, dtype=np.uint8) if labels else None
        return cls(sample_interval=dt, values=np.asarray(values), labels=lab)


def r_antiparallel(p: SmtjParams) -> float:
    """High-state resistance: r_parallel * (1 + tmr)."""
    return p.r_parallel * (1.0 + p.tmr)


def occupancy_ap(p: SmtjParams, b: float) -> float:
    """Probability of the anti-parallel state at bias field b (tesla).

    Logistic in the field, equal to 0.5 at b_5050 and strictly decreasing
    with increasing b.
    """
    scale = p.window_width / OCC_WINDOW_DIVISOR
    return float(expit(-(b - p.b_5050) / scale))


def dwell_times(p: SmtjParams, b: float) -> tuple[float, float]:
    """Mean dwell times (tau_ap, tau_p) at field b.

    The split keeps tau_ap + tau_p = 2 * tau_mean at every field, so the
    occupancy ratio tau_ap / (tau_ap + tau_p) equals occupancy_ap(p, b).
    """
    occ = occupancy_ap(p, b)
    return 2.0 * p.tau_mean * occ, 2.0 * p.tau_mean * (1.0 - occ)


def switching_times(
    p: SmtjParams, b: float, duration: float, rng: np.random.Generator
) -> tuple[MtjState, np.ndarray]:
    """Draw the exact switching instants of one trajectory over [0, duration).

    The initial state is drawn from the stationary occupancy, then holding
    times alternate between the two exponential dwell distributions.  Returns
    (initial_state, ascending array of transition times).  When the occupancy
    is pinned at 0 or 1 the trajectory never switches.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    occ = occupancy_ap(p, b)
    state0 = MtjState.ANTIPARALLEL if rng.random() < occ else MtjState.PARALLEL
    if occ < _OCC_PINNED or occ > 1.0 - _OCC_PINNED:
        return state0, np.empty(0)

    tau_ap, tau_p = dwell_times(p, b)
    first, second = (tau_ap, tau_p) if state0 is MtjState.ANTIPARALLEL else (tau_p, tau_ap)

    # Chunk size is a fixed function of the arguments so the draw sequence,
    # and hence the trajectory, is reproducible.  Chunks stay even so the
    # dwell-scale alternation pattern is the same in every chunk.
    chunk = int(1.25 * duration / p.tau_mean) + 16
    chunk += chunk & 1
    scales = np.empty(chunk)
    scales[0::2] = first
    scales[1::2] = second

    pieces = []
    t_end = 0.0
    while t_end < duration:
        holds = rng.exponential(1.0, chunk) * scales
        times = t_end + np.cumsum(holds)
        pieces.append(times)
        t_end = times[-1]
    all_times = np.concatenate(pieces)
    return state0, all_times[all_times < duration]


def states_at(
    state0: MtjState, transitions: np.ndarray, instants: np.ndarray
) -> np.ndarray:
    """State labels (uint8 MtjState values) at the given sampling instants.

    A transition at exactly t is visible at the sample taken at t.  Dwells
    shorter than the sampling interval can be skipped entirely, as in a real
    sampled acquisition.
    """
    flips = np.searchsorted(transitions, instants, side="right")
    return ((flips + int(state0)) & 1).astype(np.uint8)


def _labels_on_grid(
    state0: MtjState, transitions: np.ndarray, n: int, dt: float
) -> np.ndarray:
    """states_at on the uniform grid (0, dt, ..., (n-1) dt), in O(events + n)."""
    idx = np.ceil(transitions / dt).astype(np.int64)
    idx = idx[idx < n]
    flips = np.bincount(idx, minlength=n)
    cum = np.cumsum(flips)
    return ((cum + int(state0)) & 1).astype(np.uint8)


def sample_trajectory(
    p: SmtjParams, b: float, duration: float, dt: float, seed
) -> TelegraphTrace:
    """Simulate a resistance trace sampled every dt over [0, duration).

    The two-state Markov process is generated in continuous time and then
    quantized onto the sampling grid.  Deterministic for a given seed.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if duration <= 0:
        raise ValueError("duration must be > 0")
    if duration < dt:
        raise ValueError("duration must cover at least one sample interval")
    if dt > p.tau_mean / 10.0:
        warnings.warn(
            f"dt={dt:g} s exceeds tau_mean/10={p.tau_mean / 10:g} s; "
            "sub-interval dwells will be lost",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    state0, transitions = switching_times(p, b, duration, rng)
    n = max(1, int(round(duration / dt)))
    labels = _labels_on_grid(state0, transitions, n, dt)
    values = np.where(labels == MtjState.ANTIPARALLEL, r_antiparallel(p), p.r_parallel)
    return TelegraphTrace(sample_interval=dt, values=values, labels=labels)


def simulate_field_sweep(
    p: SmtjParams, b_values, duration: float, dt: float, seed
) -> list[tuple[float, float]]:
    """Time-averaged resistance at each field point of a sweep.

    Each point runs an independent trajectory of the given duration; its seed
    derives from (seed, point index) so adding points does not perturb the
    others.  Returns a list of (b, mean resistance) pairs.
    """
    points = []
    for i, b in enumerate(b_values):
        child = np.random.SeedSequence((_seed_entropy(seed), i))
        trace = sample_trajectory(p, float(b), duration, dt, child)
        points.append((float(b), float(trace.values.mean())))
    return points


def _seed_entropy(seed) -> int:
    """Integer entropy for SeedSequence spawning from an int or SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        state = seed.entropy
        return state if isinstance(state, int) else int(state[0])
    return int(seed)
