"""Run configuration: a flat key=value text format covering every knob.

The same schema backs the config file, CLI flag overrides, and the snapshot
embedded in run reports, so a run can be reproduced from its own output.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from purecolor.precision import METRIC_NAMES, NormalizationConstants
from purecolor.purity import PURITY_NAMES, CannyParams, PurityNorm
from purecolor.regions import EvalConfig

__all__ = ["ProviderConfig", "RunConfig", "parse_kv", "load_run_config"]

TOKEN_ENV_VAR = "PURECOLOR_API_TOKEN"


@dataclass(frozen=True)
class ProviderConfig:
    """Where generated images come from: a directory tree or an HTTP endpoint."""

    kind: str = "filesystem"
    root: str = ""
    endpoint: str = ""
    timeout: float = 30.0
    parallel: int = 4
    retries: int = 3
    backoff: float = 0.5
    allow_downscale: bool = False

    def __post_init__(self):
        if self.kind not in ("filesystem", "http"):
            raise ValueError("provider kind must be 'filesystem' or 'http'")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        if self.retries < 0 or self.timeout <= 0:
            raise ValueError("retries must be >= 0 and timeout positive")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    resolution: int = 256
    model_tag: str = "model"
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    precision: NormalizationConstants = field(default_factory=NormalizationConstants)
    purity: PurityNorm = field(default_factory=PurityNorm)
    canny: CannyParams = field(default_factory=CannyParams)
    cutoff_fraction: float = 0.25
    erosion: int = 0
    use_additive_hyab: bool = False

    def eval_config(self) -> EvalConfig:
        return EvalConfig(
            resolution=self.resolution,
            precision=self.precision,
            purity=self.purity,
            canny=self.canny,
            cutoff_fraction=self.cutoff_fraction,
            erosion=self.erosion,
            use_additive_hyab=self.use_additive_hyab,
        )

    def to_text(self) -> str:
        lines = [
            f"seed = {self.seed}",
            f"resolution = {self.resolution}",
            f"model_tag = {self.model_tag}",
            f"provider.kind = {self.provider.kind}",
            f"provider.root = {self.provider.root}",
            f"provider.endpoint = {self.provider.endpoint}",
            f"provider.timeout = {self.provider.timeout!r}",
            f"provider.parallel = {self.provider.parallel}",
            f"provider.retries = {self.provider.retries}",
            f"provider.backoff = {self.provider.backoff!r}",
            f"provider.allow_downscale = {str(self.provider.allow_downscale).lower()}",
        ]
        for name in METRIC_NAMES:
            lines.append(f"precision.{name}.max = {self.precision.maxima[name]!r}")
            lines.append(f"precision.{name}.weight = {self.precision.weights[name]!r}")
        lines.append(f"purity.sd_max = {self.purity.sd_max!r}")
        for name in PURITY_NAMES:
            lines.append(f"purity.{name}.weight = {self.purity.weights[name]!r}")
        lines += [
            f"canny.sigma = {self.canny.sigma!r}",
            f"canny.kernel_size = {self.canny.kernel_size}",
            f"canny.low = {self.canny.low!r}",
            f"canny.high = {self.canny.high!r}",
            f"fft.cutoff = {self.cutoff_fraction!r}",
            f"erosion = {self.erosion}",
            f"hyab.additive = {str(self.use_additive_hyab).lower()}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "RunConfig":
        base = cls()
        unknown = set(kv) - _KNOWN_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")

        def get(key, cast, default):
            return cast(kv[key]) if key in kv else default

        maxima = dict(base.precision.maxima)
        weights = dict(base.precision.weights)
        for name in METRIC_NAMES:
            maxima[name] = get(f"precision.{name}.max", float, maxima[name])
            weights[name] = get(f"precision.{name}.weight", float, weights[name])
        pweights = dict(base.purity.weights)
        for name in PURITY_NAMES:
            pweights[name] = get(f"purity.{name}.weight", float, pweights[name])

        return cls(
            seed=get("seed", int, base.seed),
            resolution=get("resolution", int, base.resolution),
            model_tag=get("model_tag", str, base.model_tag),
            provider=ProviderConfig(
                kind=get("provider.kind", str, "filesystem"),
                root=get("provider.root", str, ""),
                endpoint=get("provider.endpoint", str, ""),
                timeout=get("provider.timeout", float, 30.0),
                parallel=get("provider.parallel", int, 4),
                retries=get("provider.retries", int, 3),
                backoff=get("provider.backoff", float, 0.5),
                allow_downscale=get("provider.allow_downscale", _parse_bool, False),
            ),
            precision=NormalizationConstants(maxima=maxima, weights=weights),
            purity=PurityNorm(
                sd_max=get("purity.sd_max", float, base.purity.sd_max), weights=pweights
            ),
            canny=CannyParams(
                sigma=get("canny.sigma", float, base.canny.sigma),
                kernel_size=get("canny.kernel_size", int, base.canny.kernel_size),
                low=get("canny.low", float, base.canny.low),
                high=get("canny.high", float, base.canny.high),
            ),
            cutoff_fraction=get("fft.cutoff", float, base.cutoff_fraction),
            erosion=get("erosion", int, base.erosion),
            use_additive_hyab=get("hyab.additive", _parse_bool, False),
        )


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes", "on"):
        return True
    if text.lower() in ("false", "0", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _known_keys() -> set[str]:
    keys = {
        "seed", "resolution", "model_tag",
        "provider.kind", "provider.root", "provider.endpoint", "provider.timeout",
        "provider.parallel", "provider.retries", "provider.backoff", "provider.allow_downscale",
        "purity.sd_max", "canny.sigma", "canny.kernel_size", "canny.low", "canny.high",
        "fft.cutoff", "erosion", "hyab.additive",
    }
    for name in METRIC_NAMES:
        keys |= {f"precision.{name}.max", f"precision.{name}.weight"}
    for name in PURITY_NAMES:
        keys.add(f"purity.{name}.weight")
    return keys


_KNOWN_KEYS = _known_keys()


def parse_kv(text: str) -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment, blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_run_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Load a config file (optional) and apply flag overrides on top."""
    kv: dict[str, str] = {}
    if path is not None:
        kv.update(parse_kv(Path(path).read_text("utf-8")))
    if overrides:
        kv.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_kv(kv)
