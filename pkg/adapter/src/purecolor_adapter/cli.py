"""Command line entry point for the adapter."""

from __future__ import annotations

import argparse
import json
import sys

from purecolor_adapter.bridge import AdapterError, AdapterJob, run_adapter


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="purecolor-adapter",
        description="Generate one image per manifest entry via a command or HTTP backend.",
    )
    parser.add_argument("--manifest", required=True, help="benchmark manifest (jsonl)")
    parser.add_argument("--out", required=True, help="output image directory")
    parser.add_argument("--backend-cmd", default="", help="command receiving prompt and output path")
    parser.add_argument("--endpoint", default="", help="HTTP generation endpoint")
    parser.add_argument("--resolution", type=int, default=256)
    parser.add_argument("--resume", action="store_true", help="skip ids whose output exists")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--timeout", type=float, default=120.0)
    parser.add_argument("--retries", type=int, default=2)
    args = parser.parse_args(argv)

    try:
        job = AdapterJob(
            manifest=args.manifest,
            out_root=args.out,
            backend_cmd=args.backend_cmd,
            endpoint=args.endpoint,
            resolution=args.resolution,
            resume=args.resume,
            workers=args.workers,
            timeout=args.timeout,
            retries=args.retries,
        )
        summary = run_adapter(job)
    except AdapterError as exc:
        print(json.dumps({"error": "AdapterError", "message": str(exc)}), file=sys.stderr)
        return 1
    print(
        json.dumps(
            {
                "total": summary["total"],
                "succeeded": len(summary["succeeded"]),
                "skipped": len(summary["skipped"]),
                "failed": sorted(summary["failed"]),
            }
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
