"""Command-line harness: simulate | train | evaluate | compare | shift | serve.

Every command prints an effective-config banner first, so any output can be
reproduced by feeding that banner back in as a config file.

Exit codes: 0 success, 2 bad configuration, 3 bad data, 4 threshold missed.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import FIELD_PARSERS, SimConfig, build_config, config_banner, load_config_file
from .errors import ConfigError, DataError, ThresholdError
from .metrics import emit_report
from .nn import TrainConfig, evaluate, load_model, save_model, train
from .policy import ModelPolicy, ScriptedExpert
from .simulate import report_rows, simulate_many, simulate_run
from .trajectory import FeatureSpec, read_jsonl, split_dataset, to_arrays, write_jsonl

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_THRESHOLD = 4


def _add_sim_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="FILE", help="key = value configuration file")
    for name in FIELD_PARSERS:
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, metavar="V", dest=name, default=None)


def _sim_config(args) -> SimConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {}
    for name in FIELD_PARSERS:
        raw = getattr(args, name, None)
        if raw is not None:
            try:
                overrides[name] = FIELD_PARSERS[name](raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for --{name.replace('_', '-')}: {exc}") from None
    return build_config(file_values, overrides)


def _feature_spec(cfg_n_ues: int, args) -> FeatureSpec:
    return FeatureSpec(n_ues=cfg_n_ues, include_active_ue_onehot=args.active_onehot)


def _policy_factory(args, cfg):
    if args.policy == "expert":
        return lambda i: ScriptedExpert(), None
    model = load_model(args.model)
    if model.feature_spec.n_ues != cfg.n_ues:
        raise DataError(
            f"model expects {model.feature_spec.n_ues} UEs, config has {cfg.n_ues}")
    return lambda i: ModelPolicy(model), model


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    print(config_banner(cfg))
    factory, _ = _policy_factory(args, cfg)
    source = "scripted" if args.policy == "expert" else "clone"
    results = simulate_many(cfg, factory, source=source, workers=args.workers)

    records = [rec for res in results for rec in res.records]
    if args.out_trajectories:
        n = write_jsonl(records, args.out_trajectories)
        print(f"wrote {n} trajectory records to {args.out_trajectories}")
    if args.out_metrics:
        emit_report(report_rows(args.policy, results), args.out_metrics)
        print(f"wrote per-frame metrics to {args.out_metrics}")

    delivered = sum(r.delivered for r in results)
    drops = sum(r.drops for r in results)
    sim_seconds = sum(r.sim_seconds for r in results)
    truncated = [r.run_index for r in results if r.truncated]
    print(f"runs: {len(results)}  records: {len(records)}")
    print(f"delivered: {delivered}  dropped: {drops}")
    print(f"simulated seconds: {sim_seconds:.1f}")
    if truncated:
        print(f"truncated by battery exhaustion: runs {truncated}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _train_banner(tc: TrainConfig, spec: FeatureSpec, ratio: float, split_seed: int) -> str:
    lines = ["# effective training configuration"]
    for k, v in (
        ("epochs", tc.epochs),
        ("batch_size", tc.batch_size),
        ("lr0", tc.lr0),
        ("seed", tc.seed),
        ("split_ratio", ratio),
        ("split_seed", split_seed),
        ("active_onehot", spec.include_active_ue_onehot),
        ("normalize_by", spec.normalize_by),
    ):
        lines.append(f"{k} = {v}")
    return "\n".join(lines)


def cmd_train(args) -> int:
    records = read_jsonl(args.data)
    if not records:
        raise DataError(f"{args.data}: no records")
    n_ues = len(records[0].q)
    spec = FeatureSpec(n_ues=n_ues, include_active_ue_onehot=args.active_onehot)
    tc = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                     lr0=args.lr0, seed=args.seed)
    print(_train_banner(tc, spec, args.split_ratio, args.split_seed))

    train_recs, val_recs = split_dataset(records, args.split_ratio, seed=args.split_seed)
    x_tr, y_tr = to_arrays(train_recs, spec)
    x_val, y_val = (None, None)
    if val_recs:
        x_val, y_val = to_arrays(val_recs, spec)

    def log(stats):
        print(f"epoch {stats.epoch:3d}  lr {stats.lr:.6f}  "
              f"train_loss {stats.train_loss:.4f}  train_acc {stats.train_acc:.4f}  "
              f"val_loss {stats.val_loss:.4f}  val_acc {stats.val_acc:.4f}")

    model, history = train(x_tr, y_tr, spec, tc, x_val=x_val, y_val=y_val,
                           n_classes=n_ues, log=log)
    save_model(model, args.model_out)
    print(f"wrote model to {args.model_out}")

    if args.history_out:
        import csv

        with open(args.history_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_loss", "train_acc", "val_loss", "val_acc"])
            for s in history:
                w.writerow([s.epoch, repr(s.train_loss), repr(s.train_acc),
                            repr(s.val_loss), repr(s.val_acc)])
        print(f"wrote training history to {args.history_out}")

    final = history[-1]
    print(f"final: train_acc {final.train_acc:.4f}  val_acc {final.val_acc:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def _teacher_forcing(model, data_path):
    records = read_jsonl(data_path)
    if not records:
        raise DataError(f"{data_path}: no records")
    x, y = to_arrays(records, model.feature_spec)
    return evaluate(model, x, y)


def _write_eval(report, report_out, confusion_out):
    import csv

    if report_out:
        with open(report_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["accuracy", "mean_loss", "n"])
            w.writerow([repr(report.accuracy), repr(report.mean_loss), report.n])
    if confusion_out:
        with open(confusion_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            n = report.confusion.shape[0]
            w.writerow(["true\\pred"] + [str(k) for k in range(n)])
            for i in range(n):
                w.writerow([str(i)] + [str(int(v)) for v in report.confusion[i]])


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    report = _teacher_forcing(model, args.data)
    print(f"records: {report.n}")
    print(f"teacher-forcing accuracy: {report.accuracy:.4f}")
    print(f"mean loss: {report.mean_loss:.4f}")
    print("confusion (rows true, cols predicted):")
    for row in report.confusion:
        print("  " + " ".join(f"{int(v):7d}" for v in row))
    _write_eval(report, args.report_out, args.confusion_out)
    if args.min_accuracy is not None and report.accuracy < args.min_accuracy:
        raise ThresholdError(
            f"accuracy {report.accuracy:.4f} below required {args.min_accuracy}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def _closed_loop_pair(cfg: SimConfig, model, seeds):
    """Expert and clone runs on matched seeds; returns report rows + summary."""
    rows = []
    summary = {"expert": {"energy": [], "longest": []},
               "model": {"energy": [], "longest": []}}
    for seed in seeds:
        c = replace(cfg, seed=seed, runs=1)
        for name, policy in (("expert", ScriptedExpert()), ("model", ModelPolicy(model))):
            res = simulate_run(c, 0, policy, record=False)
            rows.extend((name, seed, fm) for fm in res.frames)
            summary[name]["energy"].append(res.energy_used)
            summary[name]["longest"].append(max(f.longest_session for f in res.frames))
    return rows, summary


def cmd_compare(args) -> int:
    cfg = _sim_config(args)
    print(config_banner(cfg))
    model = load_model(args.model)
    if model.feature_spec.n_ues != cfg.n_ues:
        raise DataError(f"model expects {model.feature_spec.n_ues} UEs, config has {cfg.n_ues}")
    seeds = [cfg.seed + k for k in range(args.n_seeds)]
    rows, summary = _closed_loop_pair(cfg, model, seeds)
    if args.out:
        emit_report(rows, args.out)
        print(f"wrote comparison metrics to {args.out}")
    for name in ("expert", "model"):
        e = float(np.mean(summary[name]["energy"]))
        ls = float(np.mean(summary[name]["longest"]))
        print(f"{name:7s} mean energy {e:10.1f}  mean longest session {ls:7.1f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shift
# ---------------------------------------------------------------------------


def cmd_shift(args) -> int:
    cfg = _sim_config(args)
    model = load_model(args.model)
    if model.feature_spec.n_ues != cfg.n_ues:
        raise DataError(f"model expects {model.feature_spec.n_ues} UEs, config has {cfg.n_ues}")
    try:
        new_lambdas = FIELD_PARSERS["lambdas"](args.new_lambdas)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad --new-lambdas: {exc}") from None
    if len(new_lambdas) != cfg.n_ues:
        raise ConfigError(
            f"--new-lambdas has {len(new_lambdas)} entries, config has {cfg.n_ues} UEs")

    matched = replace(cfg, runs=args.eval_runs)
    shifted = replace(cfg, runs=args.eval_runs, lambdas=new_lambdas)
    print(config_banner(shifted))

    def accuracy_on(c: SimConfig) -> float:
        results = simulate_many(c, lambda i: ScriptedExpert())
        recs = [r for res in results for r in res.records]
        x, y = to_arrays(recs, model.feature_spec)
        return evaluate(model, x, y).accuracy

    acc_matched = accuracy_on(matched)
    acc_shifted = accuracy_on(shifted)
    drop = acc_matched - acc_shifted
    print(f"matched-rate accuracy: {acc_matched:.4f}")
    print(f"shifted-rate accuracy: {acc_shifted:.4f}")
    print(f"accuracy drop: {drop:+.4f}")

    seeds = [cfg.seed + k for k in range(args.n_seeds)]
    rows, summary = _closed_loop_pair(shifted, model, seeds)
    if args.out:
        emit_report(rows, args.out)
        print(f"wrote shifted closed-loop metrics to {args.out}")
    for name in ("expert", "model"):
        e = float(np.mean(summary[name]["energy"]))
        print(f"{name:7s} mean energy under shift {e:10.1f}")

    if args.min_drop is not None and drop < args.min_drop:
        raise ThresholdError(
            f"accuracy drop {drop:.4f} below required {args.min_drop}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------


def cmd_serve(args) -> int:
    cfg = _sim_config(args)
    print(config_banner(cfg))
    from .server import run_server

    run_server(cfg, host=args.host, port=args.port, speed=args.speed,
               trajectory_out=args.out_trajectories, static_dir=args.static_dir)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavrelay",
        description="UAV relay scheduling simulator and behavioral-cloning harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the simulator and record trajectories")
    _add_sim_flags(p)
    p.add_argument("--policy", choices=["expert", "model"], default="expert")
    p.add_argument("--model", help="model JSON (required with --policy model)")
    p.add_argument("--out-trajectories", metavar="FILE")
    p.add_argument("--out-metrics", metavar="FILE")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train a clone on a trajectory file")
    p.add_argument("--data", required=True, metavar="FILE")
    p.add_argument("--model-out", required=True, metavar="FILE")
    p.add_argument("--history-out", metavar="FILE")
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--lr0", type=float, default=TrainConfig.lr0)
    p.add_argument("--seed", type=int, default=TrainConfig.seed)
    p.add_argument("--split-ratio", type=float, default=0.8)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--active-onehot", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="teacher-forcing evaluation of a model")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--data", required=True, metavar="FILE")
    p.add_argument("--report-out", metavar="FILE")
    p.add_argument("--confusion-out", metavar="FILE")
    p.add_argument("--min-accuracy", type=float, default=None,
                   help="exit 4 if accuracy falls below this")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="expert vs clone closed-loop on matched seeds")
    _add_sim_flags(p)
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("shift", help="evaluate a model under changed arrival rates")
    _add_sim_flags(p)
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--new-lambdas", required=True, metavar="L1,L2,...")
    p.add_argument("--eval-runs", type=int, default=2)
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--min-drop", type=float, default=None,
                   help="exit 4 if the accuracy drop falls below this")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("serve", help="interactive demonstration session over WebSocket")
    _add_sim_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--speed", type=float, default=2.0, help="events per second")
    p.add_argument("--out-trajectories", metavar="FILE", default="human_trajectories.jsonl")
    p.add_argument("--static-dir", metavar="DIR", default=None,
                   help="directory with the built frontend to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "policy", None) == "model" and not getattr(args, "model", None):
        parser.error("--policy model requires --model")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ThresholdError as exc:
        print(f"threshold not met: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD


if __name__ == "__main__":
    sys.exit(main())
