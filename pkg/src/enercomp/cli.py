"""Command-line entry point for the batch pipeline and the HTTP service.

Subcommands: gen-data | train | evaluate | predict | sensitivity | tree |
timeseries | serve. A JSON run-configuration file provides defaults; flags
override file values. Exit codes: 0 success, 2 validation problem
(bad arguments, out-of-range values, missing prerequisite artifacts),
3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .design import DesignConfig, config_from_json, representative_config
from .pipeline import MissingArtifactError, RunConfig

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="run-configuration JSON file")
    p.add_argument("--workspace", help="workspace directory (overrides file)")


def _run_config(args, **overrides) -> RunConfig:
    overrides.setdefault("workspace", args.workspace)
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    clean = {k: v for k, v in overrides.items() if v is not None}
    return RunConfig(**clean)


def _load_design(args) -> tuple[DesignConfig, dict | None]:
    if getattr(args, "representative", False):
        return representative_config(), {"kind": "setback"}
    if not getattr(args, "design", None):
        raise ValueError("provide --design FILE or --representative")
    design = config_from_json(args.design)
    spec = None
    if getattr(args, "footprint", None):
        spec = json.loads(Path(args.footprint).read_text())
    return design, spec


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="enercomp",
        description="Component-based building energy surrogate pipeline")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="sample designs and simulate them")
    _add_common(p)
    p.add_argument("--train", type=int, dest="n_train",
                   help="number of Sobol training samples")
    p.add_argument("--test", type=int, dest="n_test",
                   help="number of LHS samples per test set")

    p = sub.add_parser("train", help="train component bundle and baseline")
    _add_common(p)
    p.add_argument("--seed", type=int, dest="train_seed")
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.add_argument("--patience", type=int, dest="patience")

    p = sub.add_parser("evaluate", help="run the benchmark report")
    _add_common(p)

    p = sub.add_parser("predict", help="predict one design configuration")
    _add_common(p)
    p.add_argument("--design", help="design configuration JSON file")
    p.add_argument("--footprint", help="footprint descriptor JSON file")
    p.add_argument("--representative", action="store_true",
                   help="use the built-in representative setback case")
    p.add_argument("--top", type=int, default=5,
                   help="number of largest activations to print")

    p = sub.add_parser("sensitivity", help="local sensitivity matrix")
    _add_common(p)
    p.add_argument("--design", help="base design JSON (default representative)")
    p.add_argument("--footprint")
    p.add_argument("--representative", action="store_true")
    p.add_argument("--delta", type=float, dest="dse_delta")
    p.add_argument("--samples", type=int, dest="dse_count")
    p.add_argument("--seed", type=int, dest="dse_seed")

    p = sub.add_parser("tree", help="local surrogate tree and rules")
    _add_common(p)
    p.add_argument("--design")
    p.add_argument("--footprint")
    p.add_argument("--representative", action="store_true")
    p.add_argument("--target", default="window",
                   help="component slot (window, wall, ...), node id, or 'eui'")
    p.add_argument("--depth", type=int, dest="tree_max_depth")

    p = sub.add_parser("timeseries", help="boosted-tree load forecast")
    _add_common(p)
    p.add_argument("--design")
    p.add_argument("--footprint")
    p.add_argument("--representative", action="store_true")
    p.add_argument("--quantity", default="heating",
                   choices=("cooling", "heating", "lighting"))

    p = sub.add_parser("serve", help="start the HTTP service")
    _add_common(p)
    p.add_argument("--port", type=int, dest="service_port")
    p.add_argument("--host", dest="service_host")
    return ap


def _cmd_gen_data(args) -> int:
    from . import pipeline
    over = {}
    if args.n_train is not None:
        over["n_train"] = args.n_train
    if args.n_test is not None:
        over["n_random"] = args.n_test
        over["n_setback"] = args.n_test
    cfg = _run_config(args, **over)
    manifest = pipeline.gen_data(cfg)
    print(json.dumps(manifest["counts"]))
    return EXIT_OK


def _cmd_train(args) -> int:
    from . import pipeline
    cfg = _run_config(args, train_seed=args.train_seed,
                      max_epochs=args.max_epochs, patience=args.patience)
    manifest = pipeline.train_stage(cfg)
    print(json.dumps(manifest["validation_r2"], indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    from . import pipeline
    cfg = _run_config(args)
    report = pipeline.evaluate_stage(cfg)
    for set_name, by_model in report["scores"].items():
        for model_name, sc in by_model.items():
            print(f"{set_name}/{model_name}: R2={sc['eui']['r2']:.4f} "
                  f"MAPE={sc['eui']['mape']:.2f}%")
    print(f"report: {cfg.reports_dir / 'experiment_report.json'}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    from . import pipeline
    cfg = _run_config(args)
    design, spec = _load_design(args)
    out = pipeline.predict_stage(cfg, design, spec)
    print(f"EUI: {out['eui']:.9f} kWh/m2a")
    print(f"annual energy: {out['annual_energy']:.3f} kWh/a")
    for w in out["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    acts = sorted(out["activations"], key=lambda a: abs(a["value"]),
                  reverse=True)[:args.top]
    print(f"top {args.top} activations:")
    for a in acts:
        print(f"  {a['node']}: {a['value']:.2f} {a['unit']}")
    return EXIT_OK


def _cmd_sensitivity(args) -> int:
    from . import pipeline
    cfg = _run_config(args, dse_delta=args.dse_delta,
                      dse_count=args.dse_count, dse_seed=args.dse_seed)
    design, spec = (None, None)
    if args.representative or args.design:
        design, spec = _load_design(args)
    out = pipeline.sensitivity_stage(cfg, design, spec)
    top = sorted(out["activity"].items(), key=lambda kv: kv[1], reverse=True)[:5]
    print("most active variables:")
    for name, a in top:
        print(f"  {name}: {a:.3f}")
    print(f"matrix: {out['matrix']}")
    return EXIT_OK


def _cmd_tree(args) -> int:
    from . import pipeline
    cfg = _run_config(args, tree_max_depth=args.tree_max_depth)
    design, spec = (None, None)
    if args.representative or args.design:
        design, spec = _load_design(args)
    out = pipeline.tree_stage(cfg, target=args.target, config=design,
                              footprint_spec=spec)
    for rule in out["rules"]:
        print(rule)
    print(f"tree: {out['tree']}")
    return EXIT_OK


def _cmd_timeseries(args) -> int:
    from . import pipeline
    cfg = _run_config(args)
    design, spec = (None, None)
    if args.representative or args.design:
        design, spec = _load_design(args)
    out = pipeline.timeseries_stage(cfg, config=design, footprint_spec=spec,
                                    quantity=args.quantity)
    print(f"GBDT MAPE: {out['gbdt_mape']:.2f}%  "
          f"persistence MAPE: {out['persistence_mape']:.2f}%")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from . import pipeline, service
    cfg = _run_config(args, service_port=args.service_port,
                      service_host=args.service_host)
    bundle, mono = pipeline.load_models(cfg)
    app = service.create_app(bundle, mono)
    uvicorn.run(app, host=cfg.service_host, port=cfg.service_port,
                log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "sensitivity": _cmd_sensitivity,
    "tree": _cmd_tree,
    "timeseries": _cmd_timeseries,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (MissingArtifactError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
