"""Command line interface: gen / split / eval / probe / metrics."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from purecolor.color import parse_hex
from purecolor.config import ProviderConfig, load_run_config
from purecolor.generate import (
    GenConfig,
    generalization_split,
    generate_dataset,
    read_manifest,
    stratified_split,
    write_manifest,
)
from purecolor.harness import acquire_images, emit_report, probe_suite, run_eval
from purecolor.precision import normalize_and_aggregate, pair_distances
from purecolor.purity import canny_edge_density, channel_stddev, high_freq_ratio


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="purecolor",
        description="Pure-color benchmark: dataset synthesis and dual-metric evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="synthesize the benchmark dataset")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scale", type=float, default=1.0, help="multiply default counts")
    g.add_argument("--counts", help="six comma-separated base counts (overrides --scale)")
    g.add_argument("--resolution", type=int, default=256)
    g.add_argument("--workers", type=int, default=8)
    g.add_argument("--no-images", action="store_true", help="write only the manifest")

    s = sub.add_parser("split", help="tag a manifest with train/test splits")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True)
    s.add_argument(
        "--mode", default="stratified", choices=["stratified", "prompt", "hue1", "hue2"]
    )
    s.add_argument("--ratio", type=float, default=0.8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument(
        "--variations",
        default="1",
        help="comma list of variations eligible for generalization splits",
    )

    e = sub.add_parser("eval", help="acquire images, evaluate, and report")
    e.add_argument("--manifest", required=True)
    e.add_argument("--images", help="filesystem provider root")
    e.add_argument("--endpoint", help="http provider URL")
    e.add_argument("--report", required=True, help="report output directory")
    e.add_argument("--config", help="run config file (key = value lines)")
    e.add_argument("--model-tag", default=None)
    e.add_argument("--formats", default="csv,markdown,jsonl")
    e.add_argument("--allow-downscale", action="store_true")
    _add_set_flag(e)

    p = sub.add_parser("probe", help="run a diagnostic prompt family")
    p.add_argument("--family", required=True, choices=["negation", "semantic_gravity", "spatial"])
    p.add_argument("--images", help="filesystem provider root")
    p.add_argument("--endpoint", help="http provider URL")
    p.add_argument("--report", required=True, help="output JSON path")
    p.add_argument("--config", help="run config file")
    p.add_argument("--model-tag", default=None)
    _add_set_flag(p)

    m = sub.add_parser("metrics", help="compute metrics for a color pair or an image")
    m.add_argument("--pair", nargs=2, metavar=("HEX1", "HEX2"), help="two hex colors")
    m.add_argument("--image", help="image file for purity metrics")
    m.add_argument("--target", help="hex target for image precision metrics")
    m.add_argument("--config", help="run config file")
    _add_set_flag(m)
    return parser


def _add_set_flag(sub_parser) -> None:
    sub_parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any run-config key (e.g. canny.sigma=2.0, fft.cutoff=0.3); repeatable",
    )


def _collect_overrides(args) -> dict:
    overrides: dict = {}
    for item in getattr(args, "overrides", []):
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if getattr(args, "model_tag", None):
        overrides["model_tag"] = args.model_tag
    return overrides


def _provider_from_args(args, config) -> ProviderConfig:
    base = config.provider
    if getattr(args, "endpoint", None):
        return ProviderConfig(
            kind="http", endpoint=args.endpoint, timeout=base.timeout,
            parallel=base.parallel, retries=base.retries, backoff=base.backoff,
            allow_downscale=base.allow_downscale or getattr(args, "allow_downscale", False),
        )
    if getattr(args, "images", None):
        return ProviderConfig(
            kind="filesystem", root=args.images, parallel=base.parallel,
            allow_downscale=base.allow_downscale or getattr(args, "allow_downscale", False),
        )
    if base.kind == "http" and base.endpoint:
        return base
    if base.kind == "filesystem" and base.root:
        return base
    raise ValueError("no image source: pass --images or --endpoint (or set provider.* in config)")


def _cmd_gen(args) -> int:
    if args.counts:
        counts = tuple(int(v) for v in args.counts.split(","))
        if len(counts) != 6:
            raise ValueError("--counts needs exactly six comma-separated integers")
        cfg = GenConfig(
            resolution=args.resolution, seed=args.seed, counts=counts,
            out_dir=args.out, workers=args.workers,
        )
    else:
        cfg = GenConfig(
            resolution=args.resolution, seed=args.seed, out_dir=args.out, workers=args.workers
        ).scaled(args.scale)
    if args.no_images:
        from purecolor.generate import generate_plan

        entries = generate_plan(cfg)
        write_manifest(entries, Path(args.out) / "manifest.jsonl")
    else:
        entries = generate_dataset(cfg)
    summary = {"entries": len(entries), "out": str(args.out)}
    per_var: dict[str, int] = {}
    for e in entries:
        per_var[f"var{e['variation']}"] = per_var.get(f"var{e['variation']}", 0) + 1
    summary["per_variation"] = per_var
    print(json.dumps(summary))
    return 0


def _cmd_split(args) -> int:
    entries = read_manifest(args.manifest)
    if args.mode == "stratified":
        tagged = stratified_split(entries, ratio=args.ratio, seed=args.seed)
    else:
        allowed = {int(v) for v in args.variations.split(",")}
        eligible = [e for e in entries if e["variation"] in allowed]
        tagged_eligible = generalization_split(eligible, args.mode, seed=args.seed)
        by_id = {e["id"]: e for e in tagged_eligible}
        tagged = [by_id.get(e["id"], e) for e in entries]
    write_manifest(tagged, args.out)
    counts = {"train": 0, "test": 0}
    key = "split" if args.mode == "stratified" else "gen_split"
    for e in tagged:
        if key in e:
            counts[e[key]] += 1
    print(json.dumps({"mode": args.mode, "out": args.out, **counts}))
    return 0


def _cmd_eval(args) -> int:
    config = load_run_config(args.config, _collect_overrides(args))
    provider = _provider_from_args(args, config)
    entries = read_manifest(args.manifest)
    acq = acquire_images(entries, provider, config.resolution)
    run = run_eval(entries, acq, config)
    formats = tuple(args.formats.split(","))
    written = emit_report(run, args.report, formats)
    print(
        json.dumps(
            {
                "run_id": run.run_id,
                "samples": len(run.samples),
                "coverage": run.coverage,
                "errors": len(run.errors),
                "reports": [str(p) for p in written],
            }
        )
    )
    return 0


def _cmd_probe(args) -> int:
    config = load_run_config(args.config, _collect_overrides(args))
    provider = _provider_from_args(args, config)
    report = probe_suite(args.family, provider, config)
    out = Path(args.report)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print(json.dumps({"family": args.family, "cases": len(report["cases"]), "out": str(out)}))
    return 0


def _cmd_metrics(args) -> int:
    config = load_run_config(args.config, _collect_overrides(args))
    out: dict = {}
    if args.pair:
        c1, c2 = (parse_hex(h) for h in args.pair)
        raw = pair_distances(c1, c2, use_additive_hyab=config.use_additive_hyab)
        report = normalize_and_aggregate(raw, config.precision)
        out["pair"] = {
            "colors": list(args.pair),
            "raw": report.raw,
            "normalized": report.normalized,
            "pre_mean": report.pre_mean,
        }
    if args.image:
        img = np.asarray(Image.open(args.image).convert("RGB"))
        rect = (0, 0, img.shape[1], img.shape[0])
        out["image"] = {
            "path": args.image,
            "sd": channel_stddev(img, rect),
            "ced": canny_edge_density(img, rect, config.canny),
            "hf": high_freq_ratio(img, rect, config.cutoff_fraction),
        }
        if args.target:
            from purecolor.precision import representative_color

            rep = representative_color(img, rect)
            raw = pair_distances(tuple(rep), parse_hex(args.target))
            report = normalize_and_aggregate(raw, config.precision)
            out["image"]["target"] = args.target
            out["image"]["raw"] = report.raw
            out["image"]["normalized"] = report.normalized
            out["image"]["pre_mean"] = report.pre_mean
    if not out:
        raise ValueError("metrics needs --pair or --image")
    print(json.dumps(out, indent=2))
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "split": _cmd_split,
    "eval": _cmd_eval,
    "probe": _cmd_probe,
    "metrics": _cmd_metrics,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
