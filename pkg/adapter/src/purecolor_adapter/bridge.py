"""Drive a generation backend over a benchmark manifest.

The adapter reads a manifest (one JSON object per line with at least `id`
and `prompt`), obtains one image per entry from either a subprocess command
or an HTTP endpoint, validates it, and writes `{sample_id}.png` (8-bit RGB,
the manifest resolution) under the output root. The resulting directory is
directly consumable by the harness's filesystem provider.

Backend contracts:

- subprocess: the configured command is run with the prompt text and an
  output path appended as its two final arguments; the backend writes any
  Pillow-readable image to that path.
- http: POST `{"id", "prompt", "width", "height"}` to the endpoint; the
  response body is the image bytes.

Writes are atomic (temp file in the target directory, then rename), so an
interrupted run never leaves partial images, and `resume=True` skips ids
whose output already exists without touching it.
"""

from __future__ import annotations

import io
import json
import os
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests
from PIL import Image

__all__ = ["AdapterJob", "AdapterError", "run_adapter", "read_manifest"]

TOKEN_ENV_VAR = "PURECOLOR_API_TOKEN"


class AdapterError(RuntimeError):
    """Fatal adapter failure (bad manifest or configuration)."""


@dataclass(frozen=True)
class AdapterJob:
    manifest: str | Path
    out_root: str | Path
    backend_cmd: str = ""
    endpoint: str = ""
    resolution: int = 256
    resume: bool = False
    workers: int = 1
    timeout: float = 120.0
    retries: int = 2
    backoff: float = 0.5

    def __post_init__(self):
        if bool(self.backend_cmd) == bool(self.endpoint):
            raise AdapterError("configure exactly one backend: a command or an endpoint")
        if self.workers < 1:
            raise AdapterError("workers must be >= 1")
        if self.resolution < 8:
            raise AdapterError("resolution must be >= 8")


def read_manifest(path: str | Path) -> list[dict]:
    entries = []
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AdapterError(f"manifest line {lineno}: invalid JSON ({exc})") from exc
                if "id" not in entry or "prompt" not in entry:
                    raise AdapterError(f"manifest line {lineno}: missing 'id' or 'prompt'")
                entries.append(entry)
    except OSError as exc:
        raise AdapterError(f"cannot read manifest: {exc}") from exc
    if not entries:
        raise AdapterError("manifest is empty")
    return entries


def _normalize(data: bytes, resolution: int) -> Image.Image:
    img = Image.open(io.BytesIO(data))
    img.load()
    if img.size != (resolution, resolution):
        raise ValueError(f"image is {img.size[0]}x{img.size[1]}, expected {resolution}x{resolution}")
    return img.convert("RGB")


def _via_subprocess(job: AdapterJob, entry: dict) -> bytes:
    with tempfile.TemporaryDirectory(prefix="adapter-") as tmp:
        out_path = Path(tmp) / "out.png"
        cmd = shlex.split(job.backend_cmd) + [entry["prompt"], str(out_path)]
        proc = subprocess.run(cmd, capture_output=True, timeout=job.timeout)
        if proc.returncode != 0:
            tail = proc.stderr.decode(errors="replace").strip().splitlines()[-1:]
            raise ValueError(f"backend exited {proc.returncode}: {' '.join(tail)}")
        if not out_path.exists():
            raise ValueError("backend wrote no output file")
        return out_path.read_bytes()


def _via_http(job: AdapterJob, entry: dict, session: requests.Session) -> bytes:
    body = {
        "id": entry["id"],
        "prompt": entry["prompt"],
        "width": job.resolution,
        "height": job.resolution,
    }
    headers = {}
    token = os.environ.get(TOKEN_ENV_VAR)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    last = ""
    for attempt in range(job.retries + 1):
        try:
            resp = session.post(job.endpoint, json=body, headers=headers, timeout=job.timeout)
            if resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
            else:
                resp.raise_for_status()
                return resp.content
        except requests.RequestException as exc:
            last = str(exc)
        if attempt < job.retries:
            time.sleep(job.backoff * (2 ** attempt))
    raise ValueError(f"retry budget exhausted: {last}")


def _atomic_save(img: Image.Image, target: Path) -> None:
    fd, tmp_name = tempfile.mkstemp(suffix=".png", dir=target.parent)
    os.close(fd)
    try:
        img.save(tmp_name, format="PNG")
        os.replace(tmp_name, target)
    except BaseException:
        os.unlink(tmp_name)
        raise


def run_adapter(job: AdapterJob) -> dict:
    """Process every manifest entry; returns a summary of ids by outcome."""
    entries = read_manifest(job.manifest)
    out_root = Path(job.out_root)
    gt_dir = (Path(job.manifest).parent / "gt").resolve()
    if out_root.resolve() == gt_dir:
        raise AdapterError("output root must differ from the ground-truth directory")
    out_root.mkdir(parents=True, exist_ok=True)

    session = requests.Session() if job.endpoint else None

    def process(entry: dict) -> tuple[str, str, str]:
        sid = entry["id"]
        target = out_root / f"{sid}.png"
        if job.resume and target.exists():
            return sid, "skipped", ""
        try:
            if job.backend_cmd:
                data = _via_subprocess(job, entry)
            else:
                data = _via_http(job, entry, session)
            img = _normalize(data, job.resolution)
        except (ValueError, subprocess.TimeoutExpired, OSError) as exc:
            return sid, "failed", str(exc)
        _atomic_save(img, target)
        return sid, "ok", ""

    if job.workers == 1:
        results = [process(e) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=job.workers) as pool:
            results = list(pool.map(process, entries))

    summary = {"succeeded": [], "skipped": [], "failed": {}}
    for sid, status, detail in results:
        if status == "ok":
            summary["succeeded"].append(sid)
        elif status == "skipped":
            summary["skipped"].append(sid)
        else:
            summary["failed"][sid] = detail
    summary["total"] = len(entries)
    return summary
