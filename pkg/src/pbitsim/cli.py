"""Command line front end: reproducible experiments with CSV/JSON outputs.

Every command resolves its configuration from built-in defaults, an optional
JSON config file and explicit flags (in that order), validates it before any
file is written, and stamps each output file with a metadata header line
(tool version, seed, config hash) prefixed with '#'.

Exit codes: 0 success, 2 configuration error, 3 runtime / analysis error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    AnalysisError,
    FieldSweep,
    LevelEstimate,
    autocorrelation,
    extract_stochastic_window,
    fit_dwell_time,
    load_trace,
    mean_dwell_direct,
    threshold_states,
    tmr_from_levels,
)
from .device import (
    IDEAL_GAIN,
    InverterParams,
    NmosParams,
    PbitParams,
    TransferCurve,
    TransferPoint,
    calibrate_match,
    fit_sigmoid,
    mixed_region_span,
    sample_output,
    transfer_curve,
)
from .metrics import comparison_table, write_perf_csv
from .pcircuit import (
    EmpiricalActivation,
    IdealTanh,
    PCircuitError,
    and_gate,
    boltzmann_exact,
    clamp,
    compare_to_oracle,
    gibbs_run,
    or_gate,
)
from .smtj import SmtjParams, sample_trajectory, simulate_field_sweep
from .svg import bar_svg, line_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# Node index of the gate output C in the AND / OR presets.
GATE_OUTPUT_NODE = 2

# Entropy tag for the stream that builds the default empirical activation.
_ACTIVATION_STREAM = 999331


class ConfigError(Exception):
    """Invalid or inconsistent configuration; maps to exit code 2."""


SMTJ_DEFAULTS = {
    "r_parallel_ohm": 27.6e3,
    "tmr": 0.145,
    "tau_mean_s": 4.2e-3,
    "b_5050_T": -7.22e-3,
    "window_width_T": 0.6e-3,
}

TRACE_DEFAULTS = {
    **SMTJ_DEFAULTS,
    "seed": 1,
    "out_dir": "pbitsim_out",
    "b_field_T": None,  # defaults to b_5050_T
    "duration_s": 50.0,  # reference acquisition length
    "dt_s": 1e-5,  # 100 kHz sampling
    "input_trace": None,
    "bias_current_A": 1e-5,  # DC read current for voltage-trace conversion
    "offset_ohm": 0.0,
    "svg": False,
}

SWEEP_DEFAULTS = {
    **SMTJ_DEFAULTS,
    "seed": 1,
    "out_dir": "pbitsim_out",
    "b_min_T": -8.0e-3,
    "b_max_T": -6.44e-3,
    "b_step_T": 7.5e-5,
    "point_duration_s": 2.0,
    "dt_s": 1e-5,
    "jobs": 1,
    "svg": False,
}

TRANSFER_DEFAULTS = {
    **SMTJ_DEFAULTS,
    "seed": 1,
    "out_dir": "pbitsim_out",
    "v_dd_V": 1.2,
    "nmos_v_threshold_V": 0.4,
    "nmos_k_factor_A_per_V2": None,  # None selects resistance-matched calibration
    "inverter_v_switch_V": None,  # defaults to v_dd / 2
    "inverter_gain": None,  # None selects the ideal comparator
    "b_field_T": None,
    "v_start_V": 0.58,
    "v_stop_V": 0.62,
    "v_step_V": 0.002,
    "v_inputs_V": None,  # explicit grid overrides start/stop/step
    "n_per_point": 500,
    "sample_interval_s": 0.1,
    "jobs": 1,
    "svg": False,
}

GATE_DEFAULTS = {
    "seed": 1,
    "out_dir": "pbitsim_out",
    "gate": "and",
    "clamp_c": None,
    "i0": 2.0,
    "sweeps": 1_000_000,
    "burn_in": 1000,
    "all_modes": False,
    "activation": "ideal",
    "svg": False,
}

METRICS_DEFAULTS = {
    "seed": 0,
    "out_dir": "pbitsim_out",
}


def _resolve(defaults: dict, config_path, overrides: dict) -> dict:
    cfg = dict(defaults)
    if config_path is not None:
        try:
            with open(config_path) as f:
                file_cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    return cfg


_UNHASHED_KEYS = {"out_dir", "jobs"}  # execution details that cannot change results


def _config_hash(cfg: dict) -> str:
    hashed = {k: v for k, v in cfg.items() if k not in _UNHASHED_KEYS}
    canon = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _meta(cfg: dict) -> str:
    return f"# pbitsim {__version__} seed={cfg.get('seed')} config_sha256={_config_hash(cfg)}"


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, meta: str, obj: dict) -> None:
    with open(path, "w", newline="") as f:
        f.write(meta + "\n")
        json.dump(obj, f, sort_keys=True, indent=2)
        f.write("\n")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _smtj_from_cfg(cfg: dict) -> SmtjParams:
    try:
        return SmtjParams(
            r_parallel=cfg["r_parallel_ohm"],
            tmr=cfg["tmr"],
            tau_mean=cfg["tau_mean_s"],
            b_5050=cfg["b_5050_T"],
            window_width=cfg["window_width_T"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- smtj-trace


def cmd_smtj_trace(cfg: dict) -> None:
    smtj = _smtj_from_cfg(cfg)
    analyze_only = cfg["input_trace"] is not None
    if analyze_only:
        _require(Path(cfg["input_trace"]).exists(), f"no such trace: {cfg['input_trace']}")
        _require(cfg["bias_current_A"] > 0, "bias_current_A must be > 0")
    else:
        _require(cfg["duration_s"] > 0, "duration_s must be > 0")
        _require(cfg["dt_s"] > 0, "dt_s must be > 0")
        _require(cfg["duration_s"] >= cfg["dt_s"], "duration_s must cover one sample")
    out = _out_dir(cfg)
    meta = _meta(cfg)

    if analyze_only:
        trace = load_trace(
            cfg["input_trace"],
            bias_current=cfg["bias_current_A"],
            offset_ohm=cfg["offset_ohm"],
        )
    else:
        b = cfg["b_field_T"] if cfg["b_field_T"] is not None else smtj.b_5050
        trace = sample_trajectory(smtj, b, cfg["duration_s"], cfg["dt_s"], cfg["seed"])

    levels, labeled = threshold_states(trace)
    occupancy = float(labeled.labels.mean())
    dwell_direct = mean_dwell_direct(labeled)
    dt = labeled.sample_interval
    tau_corr_est = 2.0 * dwell_direct * occupancy * (1.0 - occupancy)
    max_lag = min(max(int(4 * tau_corr_est / dt) + 1, 8), len(labeled) // 4 - 1)
    acf = autocorrelation(labeled, max_lag)
    dwell = fit_dwell_time(acf, dt, occupancy)

    with open(out / "trace.csv", "w", newline="") as f:
        f.write(meta + "\n")
        labeled.to_csv(f)
    if cfg["svg"]:
        stride = max(1, len(labeled) // 4000)
        (out / "trace.svg").write_text(
            line_svg(
                labeled.times[::stride],
                labeled.values[::stride],
                "sMTJ resistance trace",
                "time (s)",
                "resistance (ohm)",
            )
        )
    _write_json(
        out / "analysis.json",
        meta,
        {
            "n_samples": len(labeled),
            "r_low_ohm": levels.r_low,
            "r_high_ohm": levels.r_high,
            "threshold_ohm": levels.threshold,
            "tmr": tmr_from_levels(levels),
            "occupancy_ap": occupancy,
            "dwell_acf_s": dwell.tau,
            "tau_corr_s": dwell.tau_corr,
            "acf_fit_rmse": dwell.fit_rmse,
            "dwell_direct_s": dwell_direct,
        },
    )


# --------------------------------------------------------------- field-sweep


def cmd_field_sweep(cfg: dict) -> None:
    smtj = _smtj_from_cfg(cfg)
    _require(cfg["b_step_T"] > 0, "b_step_T must be > 0")
    _require(cfg["b_max_T"] > cfg["b_min_T"], "b_max_T must exceed b_min_T")
    _require(cfg["point_duration_s"] > 0, "point_duration_s must be > 0")
    _require(cfg["dt_s"] > 0, "dt_s must be > 0")
    _require(cfg["point_duration_s"] >= cfg["dt_s"], "point_duration_s must cover one sample")
    _require(cfg["jobs"] >= 1, "jobs must be >= 1")
    count = int(np.floor((cfg["b_max_T"] - cfg["b_min_T"]) / cfg["b_step_T"] + 1e-9)) + 1
    _require(count >= 2, "sweep needs at least two field points")
    out = _out_dir(cfg)
    meta = _meta(cfg)

    grid = cfg["b_min_T"] + cfg["b_step_T"] * np.arange(count)
    if cfg["jobs"] > 1:
        tasks = [
            (smtj, float(b), cfg["point_duration_s"], cfg["dt_s"], int(cfg["seed"]), i)
            for i, b in enumerate(grid)
        ]
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            points = list(pool.map(_sweep_worker, tasks))
    else:
        points = simulate_field_sweep(
            smtj, grid, cfg["point_duration_s"], cfg["dt_s"], cfg["seed"]
        )
    r_p = smtj.r_parallel
    r_ap = r_p * (1.0 + smtj.tmr)
    levels = LevelEstimate(r_low=r_p, r_high=r_ap, threshold=0.5 * (r_p + r_ap))
    window = extract_stochastic_window(FieldSweep(points), levels)

    with open(out / "sweep.csv", "w", newline="") as f:
        f.write(meta + "\n")
        f.write("b_T,mean_resistance_ohm\n")
        for b, r in points:
            f.write(f"{b:.12g},{r:.12g}\n")
    if cfg["svg"]:
        (out / "sweep.svg").write_text(
            line_svg(
                [b for b, _ in points],
                [r for _, r in points],
                "field sweep",
                "B (T)",
                "mean resistance (ohm)",
            )
        )
    _write_json(
        out / "window.json",
        meta,
        {
            "b_low_T": window.b_low,
            "b_high_T": window.b_high,
            "b_5050_T": window.b_5050,
            "width_T": window.width,
            "r_low_ohm": levels.r_low,
            "r_high_ohm": levels.r_high,
        },
    )


# ------------------------------------------------------------------ transfer


def _pbit_from_cfg(cfg: dict) -> PbitParams:
    smtj = _smtj_from_cfg(cfg)
    try:
        v_dd = cfg["v_dd_V"]
        v_switch = cfg["inverter_v_switch_V"]
        gain = cfg["inverter_gain"]
        inverter = InverterParams(
            v_switch=v_dd / 2 if v_switch is None else v_switch,
            gain=IDEAL_GAIN if gain is None else gain,
        )
        nmos = NmosParams(v_threshold=cfg["nmos_v_threshold_V"], k_factor=1.0)
        p = PbitParams(smtj=smtj, nmos=nmos, inverter=inverter, v_dd=v_dd)
        if cfg["nmos_k_factor_A_per_V2"] is None:
            nmos = calibrate_match(p)
        else:
            nmos = NmosParams(
                v_threshold=cfg["nmos_v_threshold_V"],
                k_factor=cfg["nmos_k_factor_A_per_V2"],
            )
        return PbitParams(smtj=smtj, nmos=nmos, inverter=inverter, v_dd=v_dd)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _transfer_grid(cfg: dict) -> list:
    if cfg["v_inputs_V"] is not None:
        grid = [float(v) for v in cfg["v_inputs_V"]]
    else:
        _require(cfg["v_step_V"] > 0, "v_step_V must be > 0")
        count = int(np.floor((cfg["v_stop_V"] - cfg["v_start_V"]) / cfg["v_step_V"] + 1e-9)) + 1
        grid = [cfg["v_start_V"] + k * cfg["v_step_V"] for k in range(max(count, 0))]
    _require(len(grid) >= 1, "input grid is empty")
    v_dd = cfg["v_dd_V"]
    _require(all(0 <= v <= v_dd for v in grid), "grid inputs must lie in [0, v_dd]")
    return grid


def _transfer_worker(task):
    p, v, n_per_point, interval, b, seed, idx = task
    child = np.random.SeedSequence((seed, idx))
    return sample_output(p, v, n_per_point, interval, b, child)


def _sweep_worker(task):
    smtj, b, duration, dt, seed, idx = task
    child = np.random.SeedSequence((seed, idx))
    trace = sample_trajectory(smtj, b, duration, dt, child)
    return (b, float(trace.values.mean()))


def cmd_transfer(cfg: dict) -> None:
    p = _pbit_from_cfg(cfg)
    grid = _transfer_grid(cfg)
    _require(cfg["n_per_point"] >= 1, "n_per_point must be >= 1")
    _require(cfg["sample_interval_s"] > 0, "sample_interval_s must be > 0")
    _require(cfg["jobs"] >= 1, "jobs must be >= 1")
    out = _out_dir(cfg)
    meta = _meta(cfg)

    b = cfg["b_field_T"] if cfg["b_field_T"] is not None else p.smtj.b_5050
    if cfg["jobs"] > 1:
        tasks = [
            (p, v, cfg["n_per_point"], cfg["sample_interval_s"], b, int(cfg["seed"]), i)
            for i, v in enumerate(grid)
        ]
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            sample_sets = list(pool.map(_transfer_worker, tasks))
        points = tuple(
            TransferPoint(v_in=v, samples=s, mean_v_out=float(s.mean()))
            for v, s in zip(grid, sample_sets)
        )
        curve = TransferCurve(points=points)
    else:
        curve = transfer_curve(
            p, grid, cfg["n_per_point"], cfg["sample_interval_s"], b, cfg["seed"]
        )

    if len(grid) >= 4:
        try:
            center, width = fit_sigmoid(curve.v_in, curve.means, p.v_dd)
        except RuntimeError:
            center = width = None
    else:
        center = width = None

    with open(out / "samples.csv", "w", newline="") as f:
        f.write(meta + "\n")
        curve.to_samples_csv(f)
    with open(out / "curve.csv", "w", newline="") as f:
        f.write(meta + "\n")
        curve.to_summary_csv(f)
    if cfg["svg"] and len(grid) >= 2:
        (out / "curve.svg").write_text(
            line_svg(
                curve.v_in, curve.means,
                "P-Bit transfer curve", "v_in (V)", "mean v_out (V)",
            )
        )
    _write_json(
        out / "sigmoid.json",
        meta,
        {
            "center_V": center,
            "width_V": width,
            "mixed_span_V": mixed_region_span(curve, p.v_dd),
            "v_dd_V": p.v_dd,
            "nmos_k_factor_A_per_V2": p.nmos.k_factor,
        },
    )


# ---------------------------------------------------------------------- gate


def _default_empirical_activation(seed: int) -> EmpiricalActivation:
    """Activation table measured off the calibrated default P-Bit.

    Uses the soft-inverter mode: a hard comparator would give a three-level
    table with exactly saturated tails that pins the sampler in one state.
    """
    base = PbitParams()
    p = PbitParams(
        smtj=base.smtj,
        nmos=calibrate_match(base),
        inverter=InverterParams(v_switch=base.v_dd / 2, gain=60.0),
        v_dd=base.v_dd,
    )
    grid = [round(0.54 + 0.001 * k, 5) for k in range(121)]
    curve = transfer_curve(
        p,
        grid,
        n_per_point=2000,
        sample_interval=0.1,
        b=p.smtj.b_5050,
        seed=np.random.SeedSequence((seed, _ACTIVATION_STREAM)),
    )
    return EmpiricalActivation.from_transfer_curve(curve, p.v_dd)


def cmd_gate(cfg: dict) -> None:
    _require(cfg["gate"] in ("and", "or"), "gate must be 'and' or 'or'")
    _require(cfg["clamp_c"] in (None, 0, 1), "clamp_c must be 0, 1 or omitted")
    _require(cfg["i0"] > 0, "i0 must be > 0")
    _require(cfg["sweeps"] >= 1, "sweeps must be >= 1")
    _require(cfg["burn_in"] >= 0, "burn_in must be >= 0")
    _require(cfg["activation"] in ("ideal", "empirical"), "unknown activation")
    out = _out_dir(cfg)
    meta = _meta(cfg)

    if cfg["all_modes"]:
        modes = [("and", 0), ("and", 1), ("or", 0), ("or", 1)]
    else:
        modes = [(cfg["gate"], cfg["clamp_c"])]

    if cfg["activation"] == "ideal":
        act = IdealTanh()
    else:
        act = _default_empirical_activation(int(cfg["seed"]))

    for mode_index, (gate, clamp_c) in enumerate(modes):
        circuit = and_gate(cfg["i0"]) if gate == "and" else or_gate(cfg["i0"])
        if clamp_c is not None:
            circuit = clamp(circuit, GATE_OUTPUT_NODE, clamp_c)
        run_seed = np.random.SeedSequence((int(cfg["seed"]), mode_index))
        hist = gibbs_run(circuit, act, cfg["sweeps"], cfg["burn_in"], run_seed)
        exact = boltzmann_exact(circuit)
        l1 = compare_to_oracle(hist, exact)

        prefix = f"{gate}_{'free' if clamp_c is None else f'c{clamp_c}'}"
        with open(out / f"{prefix}_histogram.csv", "w", newline="") as f:
            f.write(meta + "\n")
            hist.to_csv(f)
        if cfg["svg"]:
            words = [format(i, f"0{hist.n}b") for i in range(2**hist.n)]
            freqs = hist.frequencies()
            (out / f"{prefix}_histogram.svg").write_text(
                bar_svg(
                    words,
                    [freqs.get(w, 0.0) for w in words],
                    f"{gate.upper()} gate, {'free' if clamp_c is None else f'C={clamp_c}'}",
                    "word (ABC)",
                    "frequency",
                )
            )
        with open(out / f"{prefix}_oracle.csv", "w", newline="") as f:
            f.write(meta + "\n")
            f.write("word,probability\n")
            for word in sorted(exact):
                f.write(f"{word},{exact[word]:.12g}\n")
        _write_json(
            out / f"{prefix}_summary.json",
            meta,
            {
                "gate": gate,
                "clamp_c": clamp_c,
                "i0": cfg["i0"],
                "sweeps": cfg["sweeps"],
                "burn_in": cfg["burn_in"],
                "activation": cfg["activation"],
                "l1_distance": l1,
                "modal_word": hist.modal_word(),
            },
        )


# ------------------------------------------------------------------- metrics


def cmd_metrics(cfg: dict) -> None:
    out = _out_dir(cfg)
    with open(out / "perf_points.csv", "w", newline="") as f:
        f.write(_meta(cfg) + "\n")
        write_perf_csv(comparison_table(), f)


# -------------------------------------------------------------------- driver


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--out-dir", dest="out_dir", help="output directory")
    sub.add_argument("--seed", type=int, help="master RNG seed")


def _add_smtj_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--r-parallel-ohm", dest="r_parallel_ohm", type=float)
    sub.add_argument("--tmr", type=float)
    sub.add_argument("--tau-mean-s", dest="tau_mean_s", type=float)
    sub.add_argument("--b-5050-T", dest="b_5050_T", type=float)
    sub.add_argument("--window-width-T", dest="window_width_T", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbitsim",
        description="Stochastic-MTJ P-Bit simulator: traces, sweeps, transfer "
        "curves, invertible gates and performance points.",
    )
    parser.add_argument("--version", action="version", version=f"pbitsim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("smtj-trace", help="simulate or analyze a telegraph trace")
    _add_common(s)
    _add_smtj_flags(s)
    s.add_argument("--b-field-T", dest="b_field_T", type=float)
    s.add_argument("--duration-s", dest="duration_s", type=float)
    s.add_argument("--dt-s", dest="dt_s", type=float)
    s.add_argument("--input-trace", dest="input_trace", help="analyze this CSV instead of simulating")
    s.add_argument("--bias-current-A", dest="bias_current_A", type=float)
    s.add_argument("--offset-ohm", dest="offset_ohm", type=float)
    s.add_argument("--svg", action="store_const", const=True, help="also render a minimal SVG plot")

    s = subs.add_parser("field-sweep", help="extract the stochastic window from a field sweep")
    _add_common(s)
    _add_smtj_flags(s)
    s.add_argument("--b-min-T", dest="b_min_T", type=float)
    s.add_argument("--b-max-T", dest="b_max_T", type=float)
    s.add_argument("--b-step-T", dest="b_step_T", type=float)
    s.add_argument("--point-duration-s", dest="point_duration_s", type=float)
    s.add_argument("--dt-s", dest="dt_s", type=float)
    s.add_argument("--jobs", type=int, help="parallel workers across field points")
    s.add_argument("--svg", action="store_const", const=True, help="also render a minimal SVG plot")

    s = subs.add_parser("transfer", help="sample the P-Bit transfer curve")
    _add_common(s)
    _add_smtj_flags(s)
    s.add_argument("--v-dd-V", dest="v_dd_V", type=float)
    s.add_argument("--nmos-v-threshold-V", dest="nmos_v_threshold_V", type=float)
    s.add_argument("--nmos-k-factor", dest="nmos_k_factor_A_per_V2", type=float)
    s.add_argument("--inverter-v-switch-V", dest="inverter_v_switch_V", type=float)
    s.add_argument("--inverter-gain", dest="inverter_gain", type=float)
    s.add_argument("--b-field-T", dest="b_field_T", type=float)
    s.add_argument("--v-start-V", dest="v_start_V", type=float)
    s.add_argument("--v-stop-V", dest="v_stop_V", type=float)
    s.add_argument("--v-step-V", dest="v_step_V", type=float)
    s.add_argument(
        "--v-inputs",
        dest="v_inputs_V",
        type=lambda text: [float(v) for v in text.split(",")],
        help="comma-separated explicit input list, overrides start/stop/step",
    )
    s.add_argument("--n-per-point", dest="n_per_point", type=int)
    s.add_argument("--sample-interval-s", dest="sample_interval_s", type=float)
    s.add_argument("--jobs", type=int, help="parallel workers across grid points")
    s.add_argument("--svg", action="store_const", const=True, help="also render a minimal SVG plot")

    s = subs.add_parser("gate", help="run the invertible AND/OR gate against the exact oracle")
    _add_common(s)
    s.add_argument("--gate", choices=["and", "or"])
    s.add_argument("--clamp-c", dest="clamp_c", type=int, choices=[0, 1])
    s.add_argument("--i0", type=float)
    s.add_argument("--sweeps", type=int)
    s.add_argument("--burn-in", dest="burn_in", type=int)
    s.add_argument("--all-modes", dest="all_modes", action="store_const", const=True)
    s.add_argument("--activation", choices=["ideal", "empirical"])
    s.add_argument("--svg", action="store_const", const=True, help="also render a minimal SVG plot")

    s = subs.add_parser("metrics", help="write the power / throughput comparison points")
    _add_common(s)

    return parser


_COMMANDS = {
    "smtj-trace": (TRACE_DEFAULTS, cmd_smtj_trace),
    "field-sweep": (SWEEP_DEFAULTS, cmd_field_sweep),
    "transfer": (TRANSFER_DEFAULTS, cmd_transfer),
    "gate": (GATE_DEFAULTS, cmd_gate),
    "metrics": (METRICS_DEFAULTS, cmd_metrics),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    defaults, runner = _COMMANDS[command]
    try:
        cfg = _resolve(defaults, config_path, args)
        runner(cfg)
    except ConfigError as exc:
        print(f"pbitsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AnalysisError, PCircuitError, ValueError) as exc:
        print(f"pbitsim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
