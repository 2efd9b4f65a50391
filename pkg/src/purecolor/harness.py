"""Batch evaluation: image acquisition, per-variation aggregation, reports, probes.

Images are pulled from a filesystem tree (`{sample_id}.png`, plus optional
`{sample_id}.repN.png` repeat samples) or requested one-by-one from an HTTP
endpoint. Every sample is scored independently; per-sample failures are
recorded and never abort a run. Aggregates are arithmetic means over the
evaluated samples of each variation group, mirroring the benchmark's
reported table layout (six precision columns, their mean, three purity
columns, their mean).
"""

from __future__ import annotations

import io
import json
import os
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests
from PIL import Image

from purecolor.color import format_hex, parse_hex
from purecolor.config import TOKEN_ENV_VAR, ProviderConfig, RunConfig
from purecolor.precision import METRIC_NAMES, pair_distances
from purecolor.purity import PURITY_NAMES
from purecolor.regions import (
    ExactTarget,
    HorizontalSplit,
    RegionSpec,
    Full,
    evaluate_sample,
    measure_split_ratio,
    region_pixels,
    representative_color,
)

__all__ = [
    "AcquisitionRecord",
    "Acquisition",
    "EvalRun",
    "ProbeCase",
    "ProbeSpec",
    "PROBE_FAMILIES",
    "acquire_images",
    "run_eval",
    "emit_report",
    "probe_suite",
]

TABLE_COLUMNS = (
    "rgb-ed", "rgb-rm", "lab-00", "lab-hue", "lab-hyab", "lab-ch",
    "pre-mean", "sd", "ced", "hf", "pur-mean",
)
_COLUMN_KEYS = dict(zip(TABLE_COLUMNS, METRIC_NAMES + ("pre_mean",) + PURITY_NAMES + ("pur_mean",)))


@dataclass(frozen=True)
class AcquisitionRecord:
    sample_id: str
    status: str  # ok | missing-file | decode-failure | wrong-dimensions | retry-exhausted
    detail: str = ""
    resized: bool = False

    def to_json(self) -> dict:
        out = {"id": self.sample_id, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.resized:
            out["resized"] = True
        return out


@dataclass
class Acquisition:
    images: dict[str, list[np.ndarray]]
    records: list[AcquisitionRecord]

    @property
    def errors(self) -> list[AcquisitionRecord]:
        return [r for r in self.records if r.status != "ok"]


def _decode_image(data: bytes, resolution: int, allow_downscale: bool):
    img = np.asarray(Image.open(io.BytesIO(data)).convert("RGB"))
    h, w = img.shape[:2]
    if (h, w) == (resolution, resolution):
        return img, False
    if allow_downscale and h % resolution == 0 and w % resolution == 0 and h == w:
        f = h // resolution
        pooled = img.reshape(resolution, f, resolution, f, 3).mean(axis=(1, 3))
        return np.round(pooled).astype(np.uint8), True
    raise ValueError(f"image is {w}x{h}, expected {resolution}x{resolution}")


def _acquire_filesystem(entries, provider, resolution) -> Acquisition:
    root = Path(provider.root)
    if not root.is_dir():
        raise FileNotFoundError(f"provider root {root} does not exist")
    images: dict[str, list[np.ndarray]] = {}
    records: list[AcquisitionRecord] = []
    for e in entries:
        sid = e["id"]
        primary = root / f"{sid}.png"
        if not primary.exists():
            records.append(AcquisitionRecord(sid, "missing-file", str(primary)))
            continue
        paths = [primary] + sorted(root.glob(f"{sid}.rep*.png"))
        got: list[np.ndarray] = []
        resized = False
        try:
            for p in paths:
                img, was_resized = _decode_image(
                    p.read_bytes(), resolution, provider.allow_downscale
                )
                resized = resized or was_resized
                got.append(img)
        except ValueError as exc:
            records.append(AcquisitionRecord(sid, "wrong-dimensions", str(exc)))
            continue
        except Exception as exc:  # unreadable/corrupt file
            records.append(AcquisitionRecord(sid, "decode-failure", str(exc)))
            continue
        images[sid] = got
        records.append(AcquisitionRecord(sid, "ok", resized=resized))
    return Acquisition(images, records)


def _http_fetch_one(e, provider, resolution, session) -> tuple[str, list[np.ndarray] | None, AcquisitionRecord]:
    sid = e["id"]
    body = {"id": sid, "prompt": e["prompt"], "width": resolution, "height": resolution}
    headers = {}
    token = os.environ.get(TOKEN_ENV_VAR)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    last = ""
    for attempt in range(provider.retries + 1):
        try:
            resp = session.post(
                provider.endpoint, json=body, headers=headers, timeout=provider.timeout
            )
            if resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
            else:
                resp.raise_for_status()
                img, resized = _decode_image(
                    resp.content, resolution, provider.allow_downscale
                )
                return sid, [img], AcquisitionRecord(sid, "ok", resized=resized)
        except ValueError as exc:
            return sid, None, AcquisitionRecord(sid, "wrong-dimensions", str(exc))
        except requests.RequestException as exc:
            last = str(exc)
        if attempt < provider.retries:
            time.sleep(provider.backoff * (2 ** attempt))
    return sid, None, AcquisitionRecord(sid, "retry-exhausted", last)


def _acquire_http(entries, provider, resolution) -> Acquisition:
    images: dict[str, list[np.ndarray]] = {}
    by_id: dict[str, AcquisitionRecord] = {}
    session = requests.Session()
    with ThreadPoolExecutor(max_workers=provider.parallel) as pool:
        for sid, got, record in pool.map(
            lambda e: _http_fetch_one(e, provider, resolution, session), entries
        ):
            by_id[sid] = record
            if got is not None:
                images[sid] = got
    records = [by_id[e["id"]] for e in entries]
    return Acquisition(images, records)


def acquire_images(entries, provider: ProviderConfig, resolution: int = 256) -> Acquisition:
    """Collect one or more images per manifest entry; failures are per-sample."""
    if provider.kind == "filesystem":
        acq = _acquire_filesystem(entries, provider, resolution)
    else:
        if not provider.endpoint:
            raise ValueError("http provider requires an endpoint URL")
        acq = _acquire_http(entries, provider, resolution)
    if entries and not acq.images:
        raise RuntimeError("zero images acquired; aborting run")
    return acq


# --- evaluation runs ----------------------------------------------------------


def _group_label(entry) -> str:
    var = entry["variation"]
    if var == 5:
        return f"Var-5({entry['language']})"
    if var == 6:
        return f"Var-6({entry['color_space']})"
    return f"Var-{var}"


@dataclass
class EvalRun:
    run_id: str
    model_tag: str
    timestamp: str
    config_text: str
    samples: list[dict]            # per-sample records in manifest order
    groups: dict[str, dict]        # per-variation aggregates
    prompt_stats: dict[str, dict]  # repeat-sample mean/variance per prompt id
    coverage: float
    errors: list[dict]


def _aggregate(sample_records) -> dict[str, dict]:
    groups: dict[str, list[dict]] = {}
    for rec in sample_records:
        if rec["status"] == "ok":
            groups.setdefault(rec["group"], []).append(rec)
    out: dict[str, dict] = {}
    for label in sorted(groups):
        members = groups[label]
        reports = [r for rec in members for r in rec["reports"]]
        n = len(reports)
        agg = {
            "samples": n,
            "norm": {k: sum(r["norm"][k] for r in reports) / n for k in METRIC_NAMES + PURITY_NAMES},
            "raw": {k: sum(r["raw"][k] for r in reports) / n for k in METRIC_NAMES + PURITY_NAMES},
            "pre_mean": sum(r["pre_mean"] for r in reports) / n,
            "pur_mean": sum(r["pur_mean"] for r in reports) / n,
        }
        out[label] = agg
    return out


def run_eval(entries, acquisition: Acquisition, config: RunConfig) -> EvalRun:
    """Score every acquired sample and aggregate per variation group.

    Samples with several images (repeat sampling) contribute each image to
    the group aggregate and get per-prompt mean/variance statistics.
    """
    eval_cfg = config.eval_config()
    status_by_id = {r.sample_id: r for r in acquisition.records}

    def eval_one(entry):
        sid = entry["id"]
        record = status_by_id.get(sid)
        base = {
            "id": sid,
            "group": _group_label(entry),
            "variation": entry["variation"],
            "language": entry["language"],
            "color_space": entry["color_space"],
        }
        if record is None or record.status != "ok":
            base["status"] = record.status if record else "missing-file"
            return base
        regions = [RegionSpec.from_json(r) for r in entry["regions"]]
        reports = []
        try:
            for img in acquisition.images[sid]:
                reports.append(evaluate_sample(img, regions, eval_cfg).to_json())
        except ValueError as exc:
            base["status"] = "evaluation-error"
            base["detail"] = str(exc)
            return base
        base["status"] = "ok"
        if record.resized:
            base["resized"] = True
        base["reports"] = reports
        base["pre_mean"] = sum(r["pre_mean"] for r in reports) / len(reports)
        base["pur_mean"] = sum(r["pur_mean"] for r in reports) / len(reports)
        return base

    with ThreadPoolExecutor(max_workers=config.provider.parallel) as pool:
        samples = list(pool.map(eval_one, entries))

    prompt_stats: dict[str, dict] = {}
    for rec in samples:
        if rec["status"] == "ok" and len(rec["reports"]) > 1:
            stats: dict[str, dict] = {}
            for key in ("pre_mean", "pur_mean"):
                vals = np.array([r[key] for r in rec["reports"]])
                stats[key] = {"mean": float(vals.mean()), "var": float(vals.var(ddof=1))}
            for key in METRIC_NAMES + PURITY_NAMES:
                vals = np.array([r["norm"][key] for r in rec["reports"]])
                stats[key] = {"mean": float(vals.mean()), "var": float(vals.var(ddof=1))}
            stats["n"] = len(rec["reports"])
            prompt_stats[rec["id"]] = stats

    evaluated = sum(1 for rec in samples if rec["status"] == "ok")
    return EvalRun(
        run_id=uuid.uuid4().hex[:12],
        model_tag=config.model_tag,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"),
        config_text=config.to_text(),
        samples=samples,
        groups=_aggregate(samples),
        prompt_stats=prompt_stats,
        coverage=evaluated / len(entries) if entries else 0.0,
        errors=[r.to_json() for r in acquisition.errors],
    )


def emit_report(run: EvalRun, out_dir: str | Path, formats=("csv", "markdown", "jsonl")) -> list[Path]:
    """Write the run as report.csv / report.md / samples.jsonl (+ run.json)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if "csv" in formats:
        path = out / "report.csv"
        with open(path, "w", encoding="utf-8") as f:
            cols = [c.replace("-", "_") for c in TABLE_COLUMNS]
            f.write("model,variation,samples," + ",".join(cols) + "\n")
            for label, agg in run.groups.items():
                cells = [run.model_tag, label, str(agg["samples"])]
                for col in TABLE_COLUMNS:
                    key = _COLUMN_KEYS[col]
                    value = agg[key] if key in ("pre_mean", "pur_mean") else agg["norm"][key]
                    cells.append(f"{value:.12g}")
                f.write(",".join(cells) + "\n")
        written.append(path)

    if "markdown" in formats:
        path = out / "report.md"
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# Evaluation report: {run.model_tag}\n\n")
            f.write(f"Coverage: {run.coverage:.3f}\n\n")
            f.write("| Var | Model | " + " | ".join(TABLE_COLUMNS) + " |\n")
            f.write("|" + "---|" * (len(TABLE_COLUMNS) + 2) + "\n")
            for label, agg in run.groups.items():
                cells = [label, run.model_tag]
                for col in TABLE_COLUMNS:
                    key = _COLUMN_KEYS[col]
                    value = agg[key] if key in ("pre_mean", "pur_mean") else agg["norm"][key]
                    cells.append(f"{value:.3f}")
                f.write("| " + " | ".join(cells) + " |\n")
        written.append(path)

    if "jsonl" in formats:
        path = out / "samples.jsonl"
        with open(path, "w", encoding="utf-8") as f:
            for rec in run.samples:
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
        written.append(path)

    meta = out / "run.json"
    with open(meta, "w", encoding="utf-8") as f:
        json.dump(
            {
                "run_id": run.run_id,
                "model_tag": run.model_tag,
                "timestamp": run.timestamp,
                "coverage": run.coverage,
                "groups": run.groups,
                "prompt_stats": run.prompt_stats,
                "errors": run.errors,
                "config": run.config_text,
            },
            f,
            indent=2,
            ensure_ascii=False,
        )
        f.write("\n")
    written.append(meta)
    return written


# --- diagnostic probe families --------------------------------------------------


@dataclass(frozen=True)
class ProbeCase:
    name: str
    prompt: str
    regions: tuple
    requested_fraction: float | None = None

    @property
    def sample_id(self) -> str:
        return f"probe-{self.name}"


@dataclass(frozen=True)
class ProbeSpec:
    family: str
    cases: tuple[ProbeCase, ...]


_PURPLE = parse_hex("#9966CC")
_P1_BASE = "Generating a uniform pure color image with hex color code: #9966CC"
_SPLIT_LEFT = parse_hex("#AB1213")
_SPLIT_RIGHT = parse_hex("#000000")


def _full_purple():
    return (RegionSpec(Full(), ExactTarget(_PURPLE)),)


def _split_regions(fraction: float):
    return (
        RegionSpec(HorizontalSplit(fraction, "left"), ExactTarget(_SPLIT_LEFT)),
        RegionSpec(HorizontalSplit(fraction, "right"), ExactTarget(_SPLIT_RIGHT)),
    )


def _split_prompt(kind: str, left_pct: str, right_pct: str) -> str:
    lead = (
        "A common photographic composition" if kind == "third" else "A split image"
    )
    return (
        f"{lead} with two solid color blocks: the left {left_pct} is a pure solid "
        f"color with hex code #AB1213, the right {right_pct} is a pure solid color "
        f"with hex code #000000"
    )


PROBE_FAMILIES: dict[str, ProbeSpec] = {
    "negation": ProbeSpec(
        "negation",
        (
            ProbeCase("negation-base", _P1_BASE + ".", _full_purple()),
            ProbeCase(
                "negation-neg",
                _P1_BASE + ", strictly no shadows, no gradients, and no metallic textures.",
                _full_purple(),
            ),
            ProbeCase(
                "negation-ent",
                _P1_BASE + ", strictly no cloud patterns or water ripples.",
                _full_purple(),
            ),
        ),
    ),
    "semantic_gravity": ProbeSpec(
        "semantic_gravity",
        (
            ProbeCase("semantic-base", _P1_BASE + ".", _full_purple()),
            ProbeCase(
                "semantic-cons",
                _P1_BASE + ", which is the typical color of a rusted iron plate.",
                _full_purple(),
            ),
            ProbeCase(
                "semantic-conf",
                _P1_BASE + ", representing the color of a fresh potato.",
                _full_purple(),
            ),
            ProbeCase(
                "semantic-neu",
                _P1_BASE
                + ", a randomly generated color with no specific meaning or real-world counterpart.",
                _full_purple(),
            ),
        ),
    ),
    "spatial": ProbeSpec(
        "spatial",
        (
            ProbeCase("spatial-sym", _split_prompt("sym", "50%", "50%"), _split_regions(0.5), 0.5),
            ProbeCase(
                "spatial-asym", _split_prompt("asym", "31.5%", "68.5%"), _split_regions(0.315), 0.315
            ),
            ProbeCase(
                "spatial-third", _split_prompt("third", "33.3%", "66.7%"), _split_regions(1 / 3), 1 / 3
            ),
        ),
    ),
}

# measured-vs-requested split deviations beyond this are flagged as layout misses
LAYOUT_TOLERANCE = 0.02


def probe_suite(family: str, provider: ProviderConfig, config: RunConfig) -> dict:
    """Run one diagnostic prompt family and analyze the returned images."""
    if family not in PROBE_FAMILIES:
        raise ValueError(f"unknown probe family {family!r}; choose from {sorted(PROBE_FAMILIES)}")
    spec = PROBE_FAMILIES[family]
    entries = [
        {
            "id": case.sample_id,
            "variation": 1 if case.requested_fraction is None else 2,
            "language": "en",
            "color_space": "hex",
            "prompt": case.prompt,
            "regions": [r.to_json() for r in case.regions],
        }
        for case in spec.cases
    ]
    acq = acquire_images(entries, provider, config.resolution)
    eval_cfg = config.eval_config()

    results = []
    for case, entry in zip(spec.cases, entries):
        rec: dict = {"case": case.name, "prompt": case.prompt}
        if entry["id"] not in acq.images:
            status = next(r for r in acq.records if r.sample_id == entry["id"])
            rec["status"] = status.status
            results.append(rec)
            continue
        img = acq.images[entry["id"]][0]
        rec["status"] = "ok"
        if case.requested_fraction is None:
            report = evaluate_sample(img, list(case.regions), eval_cfg).to_json()
            rec["target"] = format_hex(_PURPLE)
            rec["pre_mean"] = report["pre_mean"]
            rec["pur_mean"] = report["pur_mean"]
            rec["norm"] = report["norm"]
            rec["raw"] = report["raw"]
        else:
            measured = measure_split_ratio(img, axis="horizontal")
            deviation = abs(measured.fraction - case.requested_fraction)
            boundary = round(measured.fraction * img.shape[1])
            sides = {}
            for side_name, rect, target in (
                ("left", (0, 0, boundary, img.shape[0]), _SPLIT_LEFT),
                ("right", (boundary, 0, img.shape[1], img.shape[0]), _SPLIT_RIGHT),
            ):
                if rect[0] >= rect[2]:
                    continue
                rep = representative_color(img, rect)
                sides[side_name] = {
                    "target": format_hex(target),
                    "raw": pair_distances(tuple(rep), target.as_tuple()),
                }
            rec.update(
                {
                    "requested_fraction": case.requested_fraction,
                    "measured_fraction": measured.fraction,
                    "degenerate": measured.degenerate,
                    "deviation": deviation,
                    "layout_mismatch": deviation > LAYOUT_TOLERANCE,
                    "sides": sides,
                }
            )
        results.append(rec)
    return {"family": family, "model_tag": config.model_tag, "cases": results}
