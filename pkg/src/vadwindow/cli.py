"""Command-line entry point: ``vadwindow <verb> [options]``.

Verbs: ``evaluate``, ``sweep-windows``, ``sweep-hysteresis``, ``make-fixtures``.
Exit codes: 0 success, 1 config error, 2 data error.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .audio import SAMPLE_RATE, load_wav
from .engines import RMS_ENGINE_ID, import_trace, score_clip_rms
from .errors import ClipShorterThanWindow, ConfigError, DataError, VadWindowError
from .fixtures import WAVEFORMS, dataset_specs, write_dataset
from .framing import MAX_WINDOW_MS, MIN_WINDOW_MS, SWEEP_WINDOWS_MS, make_grid, samples_per_window
from .hysteresis import grid_search_hysteresis
from .labels import parse_labels, window_labels
from .metrics import best_threshold, build_report, mcc_threshold_sweep, pooled, threshold_grid

log = logging.getLogger("vadwindow")

DEFAULTS = {
    "dataset": None,
    "engines": ["rms"],
    "windows_ms": None,
    "hysteresis_step": 0.05,
    "threshold_step": 0.05,
    "rms_native_ms": 50,
    "out": None,
    "seed": 0,
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    dataset_dir: Path
    engines: list
    window_sizes_ms: list
    output_dir: Path
    hysteresis_step: float = 0.05
    threshold_step: float = 0.05
    rms_native_ms: float = 50
    seed: int = 0

    def __post_init__(self):
        if not self.window_sizes_ms:
            raise ConfigError("no window sizes given")
        for w in self.window_sizes_ms:
            if not MIN_WINDOW_MS <= w <= MAX_WINDOW_MS:
                raise ConfigError(f"window {w} ms outside [{MIN_WINDOW_MS}, {MAX_WINDOW_MS}]")
            samples_per_window(w, SAMPLE_RATE)
        if not self.engines:
            raise ConfigError("no engines given")
        for e in self.engines:
            if e != "rms" and not (e.startswith("external:") and len(e) > len("external:")):
                raise ConfigError(f"unknown engine {e!r}; use rms or external:<id>")
        if len(set(self.engines)) != len(self.engines):
            raise ConfigError("engine listed twice")
        threshold_grid(self.hysteresis_step)
        threshold_grid(self.threshold_step)
        if not self.dataset_dir.is_dir():
            raise ConfigError(f"dataset directory {self.dataset_dir} does not exist")
        if not any(self.dataset_dir.glob("*.wav")):
            raise ConfigError(f"dataset directory {self.dataset_dir} holds no .wav files")


def _split_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


def _number(v):
    x = float(v)
    return int(x) if x.is_integer() else x


def resolve(args, require_dataset=True):
    """Merge defaults < config file < flags into a plain dict."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(data)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    try:
        merged["engines"] = _split_list(merged["engines"])
        if merged["windows_ms"] is not None:
            merged["windows_ms"] = [_number(v) for v in _split_list(merged["windows_ms"])]
        for key in ("hysteresis_step", "threshold_step", "rms_native_ms"):
            merged[key] = float(merged[key])
        merged["seed"] = int(merged["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad option value: {exc}") from exc
    if require_dataset and merged["dataset"] is None:
        raise ConfigError("--dataset is required")
    if merged["out"] is None:
        raise ConfigError("--out is required")
    return merged


def build_config(merged, default_windows):
    windows = merged["windows_ms"]
    if windows is None:
        windows = list(default_windows)
    return RunConfig(
        dataset_dir=Path(merged["dataset"]),
        engines=merged["engines"],
        window_sizes_ms=windows,
        output_dir=Path(merged["out"]),
        hysteresis_step=merged["hysteresis_step"],
        threshold_step=merged["threshold_step"],
        rms_native_ms=merged["rms_native_ms"],
        seed=merged["seed"],
    )


# ---------------------------------------------------------------------------
# dataset + scoring
# ---------------------------------------------------------------------------


def engine_key(engine):
    return engine.split(":", 1)[1] if engine.startswith("external:") else engine


def engine_label(engine):
    return RMS_ENGINE_ID if engine == "rms" else engine_key(engine)


@dataclass
class Item:
    name: str
    wav: Path
    labels: Path
    traces: dict = field(default_factory=dict)


def discover(cfg):
    """Pair ``<name>.wav`` with its labels and trace files; fail on gaps."""
    items = []
    missing_traces = []
    for wav in sorted(cfg.dataset_dir.glob("*.wav")):
        name = wav.stem
        lab = cfg.dataset_dir / f"{name}.labels.tsv"
        if not lab.is_file():
            raise DataError(f"missing labels file {lab} for {wav.name}")
        item = Item(name, wav, lab)
        for engine in cfg.engines:
            if engine == "rms":
                continue
            tr = cfg.dataset_dir / f"{name}.{engine_key(engine)}.trace.csv"
            if tr.is_file():
                item.traces[engine] = tr
            else:
                missing_traces.append(tr.name)
        items.append(item)
    if missing_traces:
        raise DataError("missing trace files: " + ", ".join(missing_traces))
    return items


class Dataset:
    """Loaded clips and labels, shared across engines and window sizes."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.items = discover(cfg)
        self.clips = {it.name: load_wav(it.wav) for it in self.items}
        self.segments = {it.name: parse_labels(it.labels) for it in self.items}
        self.warnings = []

    def warn(self, engine, window_ms, source_id, message):
        log.warning("%s", message)
        self.warnings.append(
            {"engine": engine, "window_ms": window_ms, "source_id": source_id, "message": message}
        )

    def score(self, engine, window_ms):
        """``{source_id: (trace, label_track)}`` for one engine and window size."""
        out = {}
        for it in self.items:
            clip = self.clips[it.name]
            try:
                grid = make_grid(len(clip), window_ms, clip.sample_rate)
            except ClipShorterThanWindow as exc:
                self.warn(engine, window_ms, it.name, f"skipped: {exc}")
                continue
            if engine == "rms":
                native = min(self.cfg.rms_native_ms, window_ms)
                trace = score_clip_rms(clip, grid, native)
            else:
                trace = import_trace(it.traces[engine], grid, engine_key(engine), it.name)
            labels = window_labels(self.segments[it.name], grid)
            for note in labels.notes:
                self.warn(engine, window_ms, it.name, note)
            out[it.name] = (trace, labels)
        if not out:
            raise DataError(f"no clip holds a full {window_ms} ms window")
        return out


def as_arrays(scored):
    return {k: (tr.scores, lab.labels) for k, (tr, lab) in scored.items()}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _wstr(w):
    return f"{w:g}"


class Writer:
    """Serialises outputs and records them for the run manifest."""

    def __init__(self, root):
        self.root = Path(root)
        self.files = {}

    def write_bytes(self, rel, data):
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        self.files[str(Path(rel).as_posix())] = hashlib.sha256(data).hexdigest()
        return path

    def write_csv(self, rel, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return self.write_bytes(rel, buf.getvalue().encode("utf-8"))

    def write_json(self, rel, obj):
        text = json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"
        return self.write_bytes(rel, text.encode("utf-8"))

    def finish(self, command, cfg_dict, warnings):
        lines = "".join(json.dumps(w, sort_keys=True) + "\n" for w in warnings)
        self.write_bytes("warnings.jsonl", lines.encode("utf-8"))
        manifest = {
            "command": command,
            "config": cfg_dict,
            "files": [{"path": p, "sha256": h} for p, h in sorted(self.files.items())],
        }
        text = json.dumps(_jsonable(manifest), indent=2) + "\n"
        (self.root / "manifest.json").write_text(text, encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return obj.as_posix()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def _cfg_dict(cfg):
    return {
        "dataset": cfg.dataset_dir.as_posix(),
        "engines": cfg.engines,
        "windows_ms": cfg.window_sizes_ms,
        "hysteresis_step": cfg.hysteresis_step,
        "threshold_step": cfg.threshold_step,
        "rms_native_ms": cfg.rms_native_ms,
    }


def _curve_rows(curve):
    return zip(curve.thresholds, curve.x, curve.y)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_evaluate(cfg):
    data = Dataset(cfg)
    out = Writer(cfg.output_dir)
    written = []
    for engine in cfg.engines:
        for w in cfg.window_sizes_ms:
            scored = data.score(engine, w)
            report = build_report(engine_label(engine), w, as_arrays(scored), cfg.threshold_step)
            for sid, fm in report.per_file.items():
                if fm.note:
                    data.warn(engine, w, sid, f"{sid}: {fm.note}")
            stem = f"{engine_key(engine)}_{_wstr(w)}ms"
            written.append(out.write_json(f"reports/{stem}.json", report.as_dict()))
            out.write_csv(f"curves/{stem}_roc.csv", ("threshold", "x", "y"), _curve_rows(report.roc))
            out.write_csv(f"curves/{stem}_pr.csv", ("threshold", "x", "y"), _curve_rows(report.pr))
    out.finish("evaluate", _cfg_dict(cfg), data.warnings)
    return written


def cmd_sweep_windows(cfg):
    if len(cfg.window_sizes_ms) < 2:
        raise ConfigError("sweep-windows needs at least two window sizes")
    data = Dataset(cfg)
    out = Writer(cfg.output_dir)
    summary, per_file, detail = [], [], []
    for engine in cfg.engines:
        for w in sorted(cfg.window_sizes_ms):
            scored = data.score(engine, w)
            try:
                report = build_report(engine_label(engine), w, as_arrays(scored), cfg.threshold_step)
            except DataError as exc:
                # e.g. every window speech at a very long window size
                data.warn(engine, w, "*", f"pooled metrics undefined: {exc}")
                _, y = pooled(as_arrays(scored))
                summary.append((engine_key(engine), w, None, None))
                detail.append({"engine": engine_key(engine), "window_ms": w, "auc": None,
                               "ap": None, "prevalence": float(np.mean(y)), "n_windows": len(y)})
                continue
            summary.append((engine_key(engine), w, report.auc, report.ap))
            detail.append({"engine": engine_key(engine), "window_ms": w, "auc": report.auc,
                           "ap": report.ap, "prevalence": report.prevalence,
                           "n_windows": report.n_windows, "mcc_best": report.mcc_best,
                           "threshold_best": report.threshold_best})
            for sid, fm in report.per_file.items():
                per_file.append((engine_key(engine), w, sid, fm.auc, fm.ap, fm.prevalence, fm.note))
    out.write_csv("sweep_windows.csv", ("engine", "window_ms", "auc", "ap"), summary)
    out.write_csv(
        "sweep_windows_per_file.csv",
        ("engine", "window_ms", "source_id", "auc", "ap", "prevalence", "note"),
        per_file,
    )
    out.write_json("sweep_windows.json", detail)
    out.finish("sweep-windows", _cfg_dict(cfg), data.warnings)
    return summary


def cmd_sweep_hysteresis(cfg):
    if len(cfg.window_sizes_ms) != 1:
        raise ConfigError("sweep-hysteresis takes exactly one window size")
    w = cfg.window_sizes_ms[0]
    data = Dataset(cfg)
    out = Writer(cfg.output_dir)
    comparison = {}
    for engine in cfg.engines:
        scored = data.score(engine, w)
        keys = sorted(scored)
        traces = [scored[k][0] for k in keys]
        tracks = [scored[k][1] for k in keys]
        search = grid_search_hysteresis(traces, tracks, cfg.hysteresis_step)
        s, y = pooled(as_arrays(scored))
        sweep = mcc_threshold_sweep(s, y, cfg.hysteresis_step)
        t_best, m_best = best_threshold(sweep)
        stem = f"hysteresis/{engine_key(engine)}_{_wstr(w)}ms"
        out.write_csv(f"{stem}_surface.csv", ("low", "high", "mcc"), search.rows())
        out.write_json(
            f"{stem}_best.json",
            {"best_low": search.best.low, "best_high": search.best.high, "best_mcc": search.best_mcc},
        )
        out.write_csv(f"{stem}_threshold.csv", ("threshold", "mcc"), sorted(sweep.items()))
        comparison[engine_key(engine)] = {
            "engine_id": engine_label(engine),
            "window_ms": w,
            "mcc": m_best,
            "threshold_best": t_best,
            "mcc_hysteresis": search.best_mcc,
            "best_low": search.best.low,
            "best_high": search.best.high,
        }
    out.write_json("hysteresis/comparison.json", comparison)
    out.finish("sweep-hysteresis", _cfg_dict(cfg), data.warnings)
    return comparison


def cmd_make_fixtures(args, merged):
    lo_b, hi_b = _pair(args.burst_dbfs)
    lo_f, hi_f = _pair(args.floor_dbfs)
    specs = dataset_specs(
        args.count,
        duration_s=args.duration_s,
        burst_ms=args.burst_ms,
        prevalence=args.prevalence,
        seed=merged["seed"],
        burst_dbfs=(lo_b, hi_b),
        floor_dbfs=(lo_f, hi_f),
        waveform=args.waveform,
    )
    out_dir = Path(merged["out"])
    pairs = write_dataset(out_dir, specs)
    out = Writer(out_dir)
    for wav, lab in pairs:
        out.files[wav.name] = hashlib.sha256(wav.read_bytes()).hexdigest()
        out.files[lab.name] = hashlib.sha256(lab.read_bytes()).hexdigest()
    cfg = {
        "count": args.count,
        "duration_s": args.duration_s,
        "burst_ms": args.burst_ms,
        "prevalence": args.prevalence,
        "burst_dbfs": [lo_b, hi_b],
        "floor_dbfs": [lo_f, hi_f],
        "waveform": args.waveform,
        "seed": merged["seed"],
    }
    (out_dir / "manifest.json").write_text(
        json.dumps({"command": "make-fixtures", "config": cfg,
                    "files": [{"path": p, "sha256": h} for p, h in sorted(out.files.items())]},
                   indent=2) + "\n",
        encoding="utf-8",
    )
    return pairs


def _pair(text):
    try:
        vals = [float(v) for v in _split_list(text)]
    except ValueError as exc:
        raise ConfigError(f"bad level range {text!r}") from exc
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or vals[0] > vals[1]:
        raise ConfigError(f"level range must be LO,HI with LO <= HI, got {text!r}")
    return vals[0], vals[1]


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p, windows_help):
    p.add_argument("--dataset", help="directory of <name>.wav + <name>.labels.tsv pairs")
    p.add_argument("--engines", help="comma list of rms and/or external:<id> (default rms)")
    p.add_argument("--windows-ms", dest="windows_ms", help=windows_help)
    p.add_argument("--hysteresis-step", dest="hysteresis_step", type=float,
                   help="grid step for hysteresis thresholds (default 0.05)")
    p.add_argument("--threshold-step", dest="threshold_step", type=float,
                   help="grid step for the MCC-vs-threshold sweep (default 0.05)")
    p.add_argument("--rms-native-ms", dest="rms_native_ms", type=float,
                   help="RMS subwindow size in ms, capped at the window size (default 50)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="recorded in the manifest; scoring uses no randomness")
    p.add_argument("--config", help="JSON file of option defaults; flags override it")


def build_parser():
    parser = _Parser(prog="vadwindow", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="metric reports and ROC/PR curves per engine and window")
    _common(p, "comma list of window sizes in ms (default 100)")

    p = sub.add_parser("sweep-windows", help="AUC/AP across window sizes")
    _common(p, f"comma list of window sizes in ms (default {','.join(map(str, SWEEP_WINDOWS_MS))})")

    p = sub.add_parser("sweep-hysteresis", help="MCC surface over hysteresis threshold pairs")
    _common(p, "one window size in ms (default 50)")

    p = sub.add_parser("make-fixtures", help="write a synthetic dataset")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="base seed; clip i uses seed*1000+i (default 0)")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.add_argument("--count", type=int, default=4, help="number of clips (default 4)")
    p.add_argument("--duration-s", dest="duration_s", type=float, default=60.0,
                   help="clip length in seconds (default 60)")
    p.add_argument("--burst-ms", dest="burst_ms", type=int, default=200,
                   help="burst length, a multiple of 10 ms (default 200)")
    p.add_argument("--prevalence", type=float, default=0.2,
                   help="fraction of each clip that is speech (default 0.2)")
    p.add_argument("--burst-dbfs", dest="burst_dbfs", default="-40,-20",
                   help="LO,HI burst level range, drawn per burst (default -40,-20)")
    p.add_argument("--floor-dbfs", dest="floor_dbfs", default="-80,-60",
                   help="LO,HI noise floor range, drawn per clip (default -80,-60)")
    p.add_argument("--waveform", choices=WAVEFORMS, default="white_noise", help="burst waveform")
    return parser


DEFAULT_WINDOWS = {
    "evaluate": [100],
    "sweep-windows": list(SWEEP_WINDOWS_MS),
    "sweep-hysteresis": [50],
}


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    log.info("kernel backend: %s", _kernels.backend())
    if args.verb == "make-fixtures":
        merged = resolve(args, require_dataset=False)
        if args.count < 1:
            raise ConfigError("--count must be at least 1")
        return cmd_make_fixtures(args, merged)
    merged = resolve(args)
    cfg = build_config(merged, DEFAULT_WINDOWS[args.verb])
    verb = {
        "evaluate": cmd_evaluate,
        "sweep-windows": cmd_sweep_windows,
        "sweep-hysteresis": cmd_sweep_hysteresis,
    }[args.verb]
    return verb(cfg)


def main(argv=None):
    try:
        run(argv)
    except VadWindowError as exc:
        print(f"vadwindow: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
