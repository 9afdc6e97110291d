"""Trace and sweep analysis: level splitting, TMR, dwell times, stochastic window.

The dwell-time pipeline mirrors how telegraph-noise measurements are reduced:
label samples against a two-level split, estimate the autocorrelation
function, and fit a single exponential.  For a two-state Markov process the
ACF decay rate is the sum of the two escape rates, so at equal occupancy the
mean dwell time is twice the fitted correlation time; a run-length estimator
provides the independent cross check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft
from scipy.optimize import curve_fit

from .smtj import TelegraphTrace


class AnalysisError(Exception):
    """Base class for analysis failures on structurally valid input."""


class UnimodalTrace(AnalysisError):
    """Raised when a trace does not separate into two resistance levels."""


class ZeroVariance(AnalysisError):
    """Raised when a constant trace is handed to the autocorrelation."""


class FitDiverged(AnalysisError):
    """Raised when the exponential ACF fit is out of range or too poor."""


class TooFewTransitions(AnalysisError):
    """Raised when a trace holds too few runs for a direct dwell estimate."""


class NoWindow(AnalysisError):
    """Raised when a field sweep shows no stochastic window."""


@dataclass(frozen=True)
class LevelEstimate:
    """Two-level split of a trace: level means and the separating threshold."""

    r_low: float
    r_high: float
    threshold: float

    def __post_init__(self) -> None:
        if not (self.r_low <= self.threshold <= self.r_high):
            raise ValueError("threshold must lie between the levels")


@dataclass(frozen=True)
class DwellEstimate:
    """Dwell time from an exponential ACF fit.

    tau is the mean dwell averaged over both states; tau_corr is the fitted
    correlation time (tau = 2 * tau_corr at equal occupancy).
    """

    tau: float
    tau_corr: float
    fit_rmse: float

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError("tau must be > 0")


@dataclass(frozen=True)
class FieldSweep:
    """Ordered (field, time-averaged resistance) points of one sweep branch."""

    points: tuple

    def __post_init__(self) -> None:
        pts = tuple((float(b), float(r)) for b, r in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("a sweep needs at least two points")
        b = np.array([p[0] for p in pts])
        db = np.diff(b)
        if not (np.all(db > 0) or np.all(db < 0)):
            raise ValueError("field values must be strictly monotone")

    @property
    def b(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def r(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class StochasticWindow:
    """Field interval of visible fluctuation and the equal-occupancy field."""

    b_low: float
    b_high: float
    b_5050: float

    def __post_init__(self) -> None:
        if not (self.b_low < self.b_5050 < self.b_high):
            raise ValueError("b_5050 must lie inside the window")

    @property
    def width(self) -> float:
        return self.b_high - self.b_low


def threshold_states(trace: TelegraphTrace) -> tuple[LevelEstimate, TelegraphTrace]:
    """Split a bimodal trace into two levels and label every sample.

    Levels are the means of the two sample clusters found by iterating the
    intermeans threshold (deterministic, no k-means randomness); the reported
    threshold is their midpoint.  Raises UnimodalTrace when the level gap is
    under 4x the pooled intra-level standard deviation.
    """
    x = trace.values
    n = x.size
    if n < 100:
        raise ValueError("need at least 100 samples to split levels")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        raise UnimodalTrace("constant trace has no second level")

    thr = 0.5 * (lo + hi)
    m_low = m_high = None
    for _ in range(64):
        mask = x >= thr
        n_high = int(mask.sum())
        if n_high == 0 or n_high == n:
            raise UnimodalTrace("threshold collapsed onto one cluster")
        m_high = float(x[mask].mean())
        m_low = float(x[~mask].mean())
        new = 0.5 * (m_low + m_high)
        if new == thr:
            break
        thr = new

    mask = x >= thr
    ss_low = float(((x[~mask] - m_low) ** 2).sum())
    ss_high = float(((x[mask] - m_high) ** 2).sum())
    pooled = np.sqrt((ss_low + ss_high) / (n - 2))
    if (m_high - m_low) < 4.0 * pooled:
        raise UnimodalTrace(
            f"level gap {m_high - m_low:.4g} under 4x pooled sigma {pooled:.4g}"
        )
    levels = LevelEstimate(r_low=m_low, r_high=m_high, threshold=0.5 * (m_low + m_high))
    labels = (x >= levels.threshold).astype(np.uint8)
    labeled = TelegraphTrace(
        sample_interval=trace.sample_interval, values=x, labels=labels
    )
    return levels, labeled


def tmr_from_levels(levels: LevelEstimate) -> float:
    """(r_high - r_low) / r_low."""
    return (levels.r_high - levels.r_low) / levels.r_low


def autocorrelation(trace: TelegraphTrace, max_lag: int) -> np.ndarray:
    """Biased normalized autocorrelation up to max_lag.

    acf(k) = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2 with
    acf(0) = 1 exactly.  Returns an array of (lag_seconds, acf) rows.

    Exact two-level traces use a run-length path that is algebraically
    identical to the definition but costs O(runs) per lag; everything else
    goes through a zero-padded FFT.
    """
    x = np.asarray(trace.values, dtype=float)
    n = x.size
    if not 0 < max_lag < n / 4:
        raise ValueError(f"max_lag must be in (0, n/4), got {max_lag} for n={n}")
    if float(x.max()) == float(x.min()):
        raise ZeroVariance("constant trace has no correlation structure")

    levels = _two_levels_of(x)
    if levels is not None:
        z = x == levels[1]
        n_spikes = 2 * np.count_nonzero(np.diff(z))
        if n_spikes * n_spikes * max_lag <= _SPIKE_PAIR_BUDGET * n:
            acf = _acf_two_level(z, max_lag)
        else:
            acf = _acf_fft(x, max_lag)
    else:
        acf = _acf_fft(x, max_lag)
    acf[0] = 1.0
    lags = np.arange(max_lag + 1) * trace.sample_interval
    return np.column_stack([lags, acf])


def _two_levels_of(x: np.ndarray) -> tuple[float, float] | None:
    """The two distinct values of x, or None if there are more than two."""
    a = x[0]
    other = x[x != a]
    b = other[0]  # at least one exists: caller rejected constant traces
    if np.any((other != b)):
        return None
    return (a, b) if a < b else (b, a)


def _acf_fft(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = x.size
    xc = x - x.mean()
    m = scipy.fft.next_fast_len(n + max_lag + 1)
    f = scipy.fft.rfft(xc, m)
    corr = scipy.fft.irfft(f * f.conj(), m)[: max_lag + 1]
    return corr / corr[0]


def _acf_two_level(z: np.ndarray, max_lag: int) -> np.ndarray:
    """Exact biased ACF of a boolean sequence in O(runs) instead of O(n log n).

    Writes the raw correlation C(k) = sum_t z_t z_{t+k} of the zero-extended
    sequence through its second difference, which is the correlation of the
    boundary-spike train d_t = z_t - z_{t-1}: C(k+1) = 2C(k) - C(k-1) - D(k)
    with D(k) = sum_t d_t d_{t+k}.  D has one spike pair per nearby run
    boundary pair, so it costs O(runs * max_lag / mean_run).
    """
    n = z.size
    zi = z.astype(np.int8)
    change = np.flatnonzero(np.diff(zi)) + 1
    pos = change.astype(np.int64)
    sgn = (zi[change].astype(np.int64) * 2) - 1
    if z[0]:
        pos = np.concatenate([[0], pos])
        sgn = np.concatenate([[1], sgn])
    if z[-1]:
        pos = np.concatenate([pos, [n]])
        sgn = np.concatenate([sgn, [-1]])

    ones_total = int(zi.sum())
    n_ones_runs = int((sgn > 0).sum())
    zbar = ones_total / n
    denom = ones_total - n * zbar * zbar  # sum (z - zbar)^2 for a 0/1 signal

    # spike pair products D(k) for 1 <= k <= max_lag
    hi = np.searchsorted(pos, pos + max_lag, side="right")
    cnt = hi - np.arange(pos.size) - 1
    total = int(cnt.sum())
    if total > 0:
        p_idx = np.repeat(np.arange(pos.size), cnt)
        offsets = np.concatenate([[0], np.cumsum(cnt)[:-1]])
        q_idx = np.arange(total) - np.repeat(offsets, cnt) + p_idx + 1
        diffs = pos[q_idx] - pos[p_idx]
        weights = (sgn[p_idx] * sgn[q_idx]).astype(float)
        spikes = np.bincount(diffs, weights=weights, minlength=max_lag + 1)
    else:
        spikes = np.zeros(max_lag + 1)

    corr = np.empty(max_lag + 1)
    corr[0] = ones_total
    if max_lag >= 1:
        corr[1] = ones_total - n_ones_runs
    for k in range(1, max_lag):
        corr[k + 1] = 2.0 * corr[k] - corr[k - 1] - spikes[k]

    cum_ones = np.concatenate([[0], np.cumsum(zi, dtype=np.int64)])
    ks = np.arange(max_lag + 1)
    s1 = cum_ones[n - ks]               # sum of z_t over t < n-k
    s2 = ones_total - cum_ones[ks]      # sum of z_t over t >= k
    return (corr - zbar * (s1 + s2) + (n - ks) * zbar * zbar) / denom


# Above this expected spike-pair count the run-length path loses to the FFT.
_SPIKE_PAIR_BUDGET = 2e7


def fit_dwell_time(acf, dt: float, occupancy: float) -> DwellEstimate:
    """Fit exp(-t / tau_corr) to the ACF and convert to a mean dwell time.

    The fit runs over the contiguous leading lags where acf > 0.05 (beyond
    that the noise floor dominates).  For a two-state process the per-state
    dwells are tau_corr / (1 - occupancy) for the high state and
    tau_corr / occupancy for the low one; the reported tau is their average,
    tau_corr / (2 * occupancy * (1 - occupancy)), which reduces to
    2 * tau_corr at the 50-50 point.
    """
    if not 0.0 < occupancy < 1.0:
        raise ValueError("occupancy must be strictly between 0 and 1")
    arr = np.asarray(acf, dtype=float)
    t = arr[:, 0]
    a = arr[:, 1]
    below = np.flatnonzero(a <= 0.05)
    stop = int(below[0]) if below.size else a.size
    if stop < 3:
        raise FitDiverged("fewer than 3 lags above the fit floor")
    tf, af = t[:stop], a[:stop]

    crossing = np.flatnonzero(af < np.exp(-1.0))
    tau0 = tf[int(crossing[0])] if crossing.size else tf[-1]
    tau0 = max(tau0, dt)
    (tau_corr,), _ = curve_fit(
        lambda tt, tau: np.exp(-tt / tau), tf, af, p0=[tau0], maxfev=2000
    )
    rmse = float(np.sqrt(np.mean((np.exp(-tf / tau_corr) - af) ** 2)))

    span = t[-1] + dt  # longest scale this ACF can witness
    if rmse > 0.1 or not dt < tau_corr < span:
        raise FitDiverged(
            f"rmse={rmse:.3g}, tau_corr={tau_corr:.3g} s outside ({dt:g}, {span:g})"
        )
    tau = tau_corr / (2.0 * occupancy * (1.0 - occupancy))
    return DwellEstimate(tau=float(tau), tau_corr=float(tau_corr), fit_rmse=rmse)


def mean_dwell_direct(trace: TelegraphTrace) -> float:
    """Mean dwell from run lengths, averaged over both states.

    The first and last runs are censored by the acquisition window and are
    dropped to avoid a downward bias.  Needs at least 100 interior runs.
    """
    if trace.labels is None:
        raise ValueError("trace must be labeled; run threshold_states first")
    lab = trace.labels
    edges = np.concatenate([[0], np.flatnonzero(np.diff(lab)) + 1, [lab.size]])
    lengths = np.diff(edges)[1:-1]
    states = lab[edges[1:-2]] if lengths.size else np.empty(0, dtype=np.uint8)
    if lengths.size < 100:
        raise TooFewTransitions(f"only {lengths.size} interior runs, need 100")
    mean_low = lengths[states == 0].mean()
    mean_high = lengths[states == 1].mean()
    return float(0.5 * (mean_low + mean_high) * trace.sample_interval)


def extract_stochastic_window(
    sweep: FieldSweep, levels: LevelEstimate
) -> StochasticWindow:
    """Locate the stochastic window and the 50-50 field on a sweep.

    A point is inside the window when its time-averaged resistance sits
    strictly between r_low + 5% and r_high - 5% of the level gap.  The
    reported bounds are the sweep points bracketing that contiguous region
    from the outside (the window edge lies between grid points).  b_5050
    interpolates the crossing of the level midpoint.
    """
    order = np.argsort(sweep.b)
    b = sweep.b[order]
    r = sweep.r[order]
    gap = levels.r_high - levels.r_low
    lo_band = levels.r_low + 0.05 * gap
    hi_band = levels.r_high - 0.05 * gap
    inside = (r > lo_band) & (r < hi_band)
    if not inside.any():
        raise NoWindow("no sweep point lies strictly between the saturation bands")

    i0, i1 = _longest_true_block(inside)
    b_low = b[i0 - 1] if i0 > 0 else b[i0]
    b_high = b[i1 + 1] if i1 < b.size - 1 else b[i1]

    mid = 0.5 * (levels.r_low + levels.r_high)
    d = r - mid
    cross = np.flatnonzero(d[:-1] * d[1:] <= 0)
    cross = cross[(d[cross] != 0) | (d[cross + 1] != 0)]
    if cross.size == 0:
        raise NoWindow("averaged resistance never crosses the level midpoint")
    j = int(cross[0])
    if d[j] == 0:
        b_5050 = b[j]
    else:
        b_5050 = b[j] + (mid - r[j]) * (b[j + 1] - b[j]) / (r[j + 1] - r[j])
    if not b_low < b_5050 < b_high:
        raise NoWindow("midpoint crossing fell outside the fluctuating region")
    return StochasticWindow(b_low=float(b_low), b_high=float(b_high), b_5050=float(b_5050))


def _longest_true_block(mask: np.ndarray) -> tuple[int, int]:
    idx = np.flatnonzero(mask)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [idx.size - 1]])
    best = int(np.argmax(ends - starts))
    return int(idx[starts[best]]), int(idx[ends[best]])


def load_trace(
    path, bias_current: float | None = None, offset_ohm: float = 0.0
) -> TelegraphTrace:
    """Load a trace CSV, converting voltage exports to resistance if needed.

    Accepts the native `time_s,resistance_ohm[,state]` format or a two-column
    `time_s,voltage_V` oscilloscope export.  Voltage traces need the DC bias
    current, either passed here or read from a JSON sidecar `<file>.json`
    with key `bias_current_A`; resistance is V / I.  offset_ohm is subtracted
    from every sample (manual DC-offset removal).
    """
    path = Path(path)
    with open(path) as f:
        header = None
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                header = line
                break
        if header is None:
            raise ValueError(f"{path} holds no data")
        cols = header.split(",")
        f.seek(0)
        if cols[:2] == ["time_s", "resistance_ohm"]:
            trace = TelegraphTrace.from_csv(f)
        elif cols[:2] == ["time_s", "voltage_V"]:
            if bias_current is None:
                sidecar = path.with_suffix(path.suffix + ".json")
                if not sidecar.exists():
                    raise ValueError(
                        f"voltage trace needs a bias current: pass one or add {sidecar.name}"
                    )
                with open(sidecar) as sf:
                    bias_current = float(json.load(sf)["bias_current_A"])
            times, volts = [], []
            for line in f:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("time_s"):
                    continue
                t_str, v_str = line.split(",")[:2]
                times.append(float(t_str))
                volts.append(float(v_str))
            if len(volts) < 2:
                raise ValueError("trace file must hold at least two samples")
            values = np.asarray(volts) / bias_current
            trace = TelegraphTrace(
                sample_interval=times[1] - times[0], values=values
            )
        else:
            raise ValueError(f"unrecognized trace header: {header!r}")
    if offset_ohm:
        trace = TelegraphTrace(
            sample_interval=trace.sample_interval,
            values=trace.values - offset_ohm,
            labels=trace.labels,
        )
    return trace
