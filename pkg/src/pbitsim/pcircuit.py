"""Networks of coupled P-Bits with clamping and an exact Boltzmann oracle.

A circuit is a symmetric coupling matrix J, bias vector h and overall
strength i0 over bipolar nodes m in {-1, +1}.  Each update draws node i high
with probability (1 + tanh(I_i)) / 2 where I_i = i0 * (h_i + sum_j J_ij m_j),
which is exactly the Gibbs conditional of the energy
E(m) = -i0 * (sum_i h_i m_i + sum_{i<j} J_ij m_i m_j); sequential
random-permutation sweeps therefore sample the Boltzmann distribution that
boltzmann_exact enumerates.  Simultaneous parallel updates are deliberately
not offered: they break detailed balance on these graphs.

Histogram words follow the convention bit = (m + 1) / 2 with node 0 (A) as
the most significant bit.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .device import TransferCurve, fit_sigmoid

ENUMERATION_LIMIT = 20  # exact oracle enumerates at most 2**20 states

_SWEEP_BLOCK = 16384  # fixed block size keeps the draw sequence reproducible


class PCircuitError(Exception):
    """Base class for circuit-level failures."""


class AllClamped(PCircuitError):
    """Raised when a sampling run has no free node to update."""


class TooLarge(PCircuitError):
    """Raised when exact enumeration is asked for too many nodes."""


@dataclass(frozen=True)
class PCircuit:
    """Weighted P-Bit network with optional clamped nodes.

    j: symmetric zero-diagonal coupling matrix, h: bias vector, i0: overall
    coupling strength, clamps: node index -> fixed bipolar value.
    """

    j: np.ndarray
    h: np.ndarray
    i0: float
    clamps: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        j = np.asarray(self.j, dtype=float)
        h = np.asarray(self.h, dtype=float)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "h", h)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ValueError("J must be square")
        if h.shape != (j.shape[0],):
            raise ValueError("h must match J in size")
        if not np.array_equal(j, j.T):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("J must have a zero diagonal")
        if self.i0 <= 0:
            raise ValueError("i0 must be > 0")
        for node, value in self.clamps.items():
            if not 0 <= node < j.shape[0]:
                raise ValueError(f"clamp on unknown node {node}")
            if value not in (-1, 1):
                raise ValueError(f"clamp value must be -1 or +1, got {value}")

    @property
    def n(self) -> int:
        return self.j.shape[0]

    @property
    def free_nodes(self) -> list:
        return [i for i in range(self.n) if i not in self.clamps]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "J": self.j.tolist(),
            "h": self.h.tolist(),
            "i0": self.i0,
            "clamps": {str(k): v for k, v in sorted(self.clamps.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PCircuit":
        return cls(
            j=np.asarray(obj["J"], dtype=float),
            h=np.asarray(obj["h"], dtype=float),
            i0=obj["i0"],
            clamps={int(k): int(v) for k, v in obj.get("clamps", {}).items()},
        )


@dataclass(frozen=True)
class StateHistogram:
    """Counts of digitized network words accumulated over a sampling run."""

    n: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def frequencies(self) -> dict:
        total = self.total
        return {w: c / total for w, c in self.counts.items()}

    def modal_word(self) -> str:
        return max(self.counts, key=lambda w: (self.counts[w], w))

    def to_csv(self, file) -> None:
        file.write("word,count,frequency\n")
        total = self.total
        for idx in range(2**self.n):
            word = format(idx, f"0{self.n}b")
            c = self.counts.get(word, 0)
            file.write(f"{word},{c},{c / total:.12g}\n")


def word_from_state(m) -> str:
    """Binary word of a bipolar state vector; node 0 is the most significant bit."""
    return "".join("1" if v > 0 else "0" for v in m)


def synapse(c: PCircuit, m) -> np.ndarray:
    """Dimensionless inputs I_i = i0 * (h_i + sum_j J_ij m_j)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (c.n,):
        raise ValueError("state vector size must match the circuit")
    return c.i0 * (c.h + c.j @ m)


class IdealTanh:
    """Binary stochastic neuron with the ideal tanh activation."""

    def prob_high(self, i_in: float) -> float:
        return 0.5 * (1.0 + math.tanh(i_in))


class EmpiricalActivation:
    """Activation interpolated from a measured P-Bit transfer curve.

    The table maps input voltage to probability of the high output state
    (samples above v_dd / 2), cleaned to be monotone by isotonic regression.
    Dimensionless inputs map to volts as v = v_dd / 2 + scale * I, where the
    scale is the fitted tanh width of the device sigmoid so that a unit I
    corresponds to a unit argument of the ideal tanh.
    """

    def __init__(self, v_inputs, p_high, v_dd: float, scale: float):
        self.v_inputs = [float(v) for v in v_inputs]
        self.p_high = _isotonic(list(map(float, p_high)))
        self.v_dd = float(v_dd)
        self.scale = float(scale)
        if len(self.v_inputs) < 2:
            raise ValueError("activation table needs at least two points")
        if any(b <= a for a, b in zip(self.v_inputs, self.v_inputs[1:])):
            raise ValueError("activation inputs must be strictly increasing")

    @classmethod
    def from_transfer_curve(cls, curve: TransferCurve, v_dd: float) -> "EmpiricalActivation":
        # Mean output as a fraction of the rail; identical to the fraction of
        # high samples for rail-to-rail outputs and the smooth generalization
        # for soft-switching ones.
        v = [p.v_in for p in curve.points]
        p_high = [min(max(p.mean_v_out / v_dd, 0.0), 1.0) for p in curve.points]
        p_iso = _isotonic(p_high)
        _, width = fit_sigmoid(v, [q * v_dd for q in p_iso], v_dd)
        # logistic width w gives p = 0.5 * (1 + tanh((v - c) / (2w)))
        return cls(v, p_iso, v_dd, scale=2.0 * width)

    def prob_high(self, i_in: float) -> float:
        v = self.v_dd / 2 + self.scale * i_in
        xs, ps = self.v_inputs, self.p_high
        if v <= xs[0]:
            return ps[0]
        if v >= xs[-1]:
            return ps[-1]
        k = bisect_left(xs, v)
        t = (v - xs[k - 1]) / (xs[k] - xs[k - 1])
        return ps[k - 1] + t * (ps[k] - ps[k - 1])


def _isotonic(y: list) -> list:
    """Pool-adjacent-violators pass producing a non-decreasing sequence."""
    level = []  # (sum, count)
    for v in y:
        s, c = v, 1
        while level and level[-1][0] * c >= s * level[-1][1]:
            ps, pc = level.pop()
            s += ps
            c += pc
        level.append((s, c))
    out = []
    for s, c in level:
        out.extend([s / c] * c)
    return out


def pbit_update(i_in: float, act, draw: float) -> int:
    """One stochastic node update: +1 when the uniform draw lands under
    the activation probability, else -1."""
    return 1 if draw < act.prob_high(i_in) else -1


def gibbs_run(
    c: PCircuit, act, n_sweeps: int, burn_in: int = 0, seed=None
) -> StateHistogram:
    """Sequential Gibbs sampling of the circuit.

    Free nodes start uniformly at random; every sweep updates them in a fresh
    random permutation and one full word is recorded per sweep after burn_in.
    Deterministic for a given seed.
    """
    if n_sweeps < 1:
        raise ValueError("n_sweeps must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    free = c.free_nodes
    if not free:
        raise AllClamped("no free node to update")
    n, nf = c.n, len(free)
    rng = np.random.default_rng(seed)

    m = [0] * n
    for node, value in c.clamps.items():
        m[node] = value
    init = rng.integers(0, 2, nf)
    for idx, node in enumerate(free):
        m[node] = int(init[idx]) * 2 - 1

    # Python-level caches keep the inner loop free of numpy scalar overhead.
    i0 = float(c.i0)
    bias = [i0 * float(c.h[i]) for i in range(n)]
    rows = [
        [(j, i0 * float(c.j[i, j])) for j in range(n) if c.j[i, j] != 0.0]
        for i in range(n)
    ]
    bit_flip = [1 << (n - 1 - i) for i in range(n)]
    word = 0
    for i in range(n):
        if m[i] > 0:
            word |= bit_flip[i]

    prob = act.prob_high
    counts: dict[int, int] = {}
    total = burn_in + n_sweeps
    done = 0
    while done < total:
        block = min(_SWEEP_BLOCK, total - done)
        perms = rng.random((block, nf)).argsort(axis=1).tolist()
        draws = rng.random((block, nf)).tolist()
        for s in range(block):
            perm = perms[s]
            row_draws = draws[s]
            for slot in range(nf):
                node = free[perm[slot]]
                acc = bias[node]
                for j, w in rows[node]:
                    acc += w * m[j]
                new = 1 if row_draws[slot] < prob(acc) else -1
                if new != m[node]:
                    m[node] = new
                    word ^= bit_flip[node]
            if done + s >= burn_in:
                counts[word] = counts.get(word, 0) + 1
        done += block

    width = f"0{n}b"
    return StateHistogram(n=n, counts={format(w, width): v for w, v in sorted(counts.items())})


def boltzmann_exact(c: PCircuit) -> dict:
    """Exact Boltzmann distribution over clamp-consistent words.

    Enumerates the free nodes, computes E(m) = -i0 * (h . m + sum_{i<j}
    J_ij m_i m_j) and normalizes exp(-E).  Limited to 20 nodes.
    """
    if c.n > ENUMERATION_LIMIT:
        raise TooLarge(f"{c.n} nodes exceed the {ENUMERATION_LIMIT}-node enumeration limit")
    free = c.free_nodes
    if not free:
        raise AllClamped("no free node: distribution is a single clamped word")
    nf = len(free)
    k = np.arange(2**nf, dtype=np.int64)
    bits = (k[:, None] >> np.arange(nf - 1, -1, -1)) & 1
    states = np.zeros((2**nf, c.n))
    states[:, free] = bits * 2 - 1
    for node, value in c.clamps.items():
        states[:, node] = value

    energy = -c.i0 * (states @ c.h + 0.5 * np.einsum("si,ij,sj->s", states, c.j, states))
    energy -= energy.min()
    weights = np.exp(-energy)
    probs = weights / weights.sum()
    return {word_from_state(s): float(p) for s, p in zip(states, probs)}


def and_gate(i0: float) -> PCircuit:
    """Three-node invertible AND: nodes (A, B, C) with C = A and B at the
    energy minima (verified by enumeration in the test suite)."""
    return _gate(i0, h=(1.0, 1.0, -2.0))


def or_gate(i0: float) -> PCircuit:
    """Three-node invertible OR: nodes (A, B, C) with C = A or B at the
    energy minima (verified by enumeration in the test suite)."""
    return _gate(i0, h=(-1.0, -1.0, 2.0))


def _gate(i0: float, h) -> PCircuit:
    j = np.array(
        [
            [0.0, -1.0, 2.0],
            [-1.0, 0.0, 2.0],
            [2.0, 2.0, 0.0],
        ]
    )
    return PCircuit(j=j, h=np.asarray(h, dtype=float), i0=i0)


def clamp(c: PCircuit, node: int, value: int) -> PCircuit:
    """Circuit with the node pinned at bipolar 2 * value - 1 (value in {0, 1})."""
    if not 0 <= node < c.n:
        raise ValueError(f"node {node} out of range")
    if value not in (0, 1):
        raise ValueError("clamp value must be 0 or 1")
    clamps = dict(c.clamps)
    clamps[node] = 2 * value - 1
    return PCircuit(j=c.j, h=c.h, i0=c.i0, clamps=clamps)


def merge_histograms(histograms) -> StateHistogram:
    """Combine histograms from independent runs; associative and commutative."""
    histograms = list(histograms)
    if not histograms:
        raise ValueError("nothing to merge")
    n = histograms[0].n
    if any(h.n != n for h in histograms):
        raise ValueError("histograms describe different node counts")
    counts: dict[str, int] = {}
    for h in histograms:
        for word, c in h.counts.items():
            counts[word] = counts.get(word, 0) + c
    return StateHistogram(n=n, counts=dict(sorted(counts.items())))


def compare_to_oracle(hist: StateHistogram, exact: dict) -> float:
    """L1 distance between sampled frequencies and an exact distribution."""
    for word in exact:
        if len(word) != hist.n:
            raise ValueError("histogram and oracle describe different node counts")
    freqs = hist.frequencies()
    words = set(freqs) | set(exact)
    return float(sum(abs(freqs.get(w, 0.0) - exact.get(w, 0.0)) for w in words))
