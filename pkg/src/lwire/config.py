"""Experiment configuration: a line-oriented key = value format with sections.

Grammar (INI subset, parsed with configparser):

    [physics]
    alpha = 1.0            # δ coupling, > 0
    v0 = 1.0               # bias height, >= 0

    [curve]
    kind = wedge           # wedge | filleted_wedge
    beta = 0.7853981633974483
    fillet_radius = 0.0    # > 0 required for filleted_wedge

    [bias]
    orientation = interior # interior | exterior

    [grid]
    ladder = 0.1 12, 0.05 12, 0.05 24   # comma-separated "h R" rungs
    offset = 0.0 0.0                    # box center relative to the bend
    delta_mode = cell_lumping           # cell_lumping | gaussian:WIDTH

    [scan]
    margin = auto          # auto (protocol margin) | explicit float
    seed = 1234
    tol_resid = 1e-8

All floats are written back in full precision (repr), so a parse/write
round trip is exact.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace

from .assembly import DeltaMode
from .geometry import BiasOrientation, CurveKind, CurveSpec
from .transverse import PhysicsParams

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "write_config"]


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    v0: float
    curve_kind: str              # "wedge" | "filleted_wedge"
    beta: float
    fillet_radius: float
    orientation: str             # "interior" | "exterior"
    ladder: tuple[tuple[float, float], ...]
    offset: tuple[float, float] = (0.0, 0.0)
    delta_mode: str = "cell_lumping"   # or "gaussian:<width>"
    margin: float | None = None        # None = protocol margin
    seed: int = 0
    tol_resid: float = 1e-8

    def physics(self) -> PhysicsParams:
        return PhysicsParams(self.alpha, self.v0)

    def curve(self) -> CurveSpec:
        return CurveSpec(CurveKind(self.curve_kind), self.beta,
                         self.fillet_radius)

    def bias(self) -> BiasOrientation:
        return BiasOrientation(self.orientation)

    def mode(self) -> DeltaMode:
        if self.delta_mode == "cell_lumping":
            return DeltaMode("cell_lumping")
        if self.delta_mode.startswith("gaussian:"):
            return DeltaMode("gaussian", float(self.delta_mode.split(":", 1)[1]))
        raise ConfigError(f"bad delta_mode {self.delta_mode!r}")

    def validate(self) -> "ExperimentConfig":
        """Check every module precondition reachable from the config."""
        try:
            self.physics()
            self.curve()
            self.bias()
            self.mode()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.ladder:
            raise ConfigError("grid ladder is empty")
        for h, R in self.ladder:
            if not (h > 0 and R > 0):
                raise ConfigError("ladder entries must be positive")
            ratio = 2 * R / h
            if abs(ratio - round(ratio)) > 1e-12 * ratio:
                raise ConfigError(f"h={h} does not divide the box side 2R={2*R}")
        from .assembly import max_spacing
        hmax = max_spacing(self.physics())
        for h, _ in self.ladder:
            if h > hmax * (1 + 1e-12):
                raise ConfigError(
                    f"h={h} too coarse for alpha={self.alpha}, v0={self.v0} "
                    f"(need h <= {hmax:.4g})")
        return self

    def with_axis_value(self, axis: str, value: float) -> "ExperimentConfig":
        if axis == "beta":
            return replace(self, beta=value)
        if axis == "v0":
            return replace(self, v0=value)
        if axis == "alpha":
            return replace(self, alpha=value)
        raise ConfigError(f"unknown sweep axis {axis!r}")


def _fmt(x: float) -> str:
    return repr(float(x))


def parse_config(text_or_path, from_path: bool = True) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if from_path:
            with open(text_or_path) as f:
                cp.read_file(f)
        else:
            cp.read_file(io.StringIO(text_or_path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    try:
        ladder = tuple(
            tuple(float(tok) for tok in rung.split())
            for rung in cp.get("grid", "ladder").split(","))
        if any(len(r) != 2 for r in ladder):
            raise ConfigError("each ladder rung must be 'h R'")
        off = tuple(float(t) for t in
                    cp.get("grid", "offset", fallback="0 0").split())
        if len(off) != 2:
            raise ConfigError("offset must be 'x y'")
        margin_raw = cp.get("scan", "margin", fallback="auto").strip()
        cfg = ExperimentConfig(
            alpha=cp.getfloat("physics", "alpha"),
            v0=cp.getfloat("physics", "v0"),
            curve_kind=cp.get("curve", "kind").strip(),
            beta=cp.getfloat("curve", "beta"),
            fillet_radius=cp.getfloat("curve", "fillet_radius", fallback=0.0),
            orientation=cp.get("bias", "orientation").strip(),
            ladder=ladder,
            offset=off,  # type: ignore[arg-type]
            delta_mode=cp.get("grid", "delta_mode",
                              fallback="cell_lumping").strip(),
            margin=None if margin_raw == "auto" else float(margin_raw),
            seed=cp.getint("scan", "seed", fallback=0),
            tol_resid=cp.getfloat("scan", "tol_resid", fallback=1e-8),
        )
    except (configparser.Error, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config: {exc}") from exc
    return cfg.validate()


def write_config(cfg: ExperimentConfig, path=None) -> str:
    ladder = ", ".join(f"{_fmt(h)} {_fmt(R)}" for h, R in cfg.ladder)
    text = "\n".join([
        "[physics]",
        f"alpha = {_fmt(cfg.alpha)}",
        f"v0 = {_fmt(cfg.v0)}",
        "",
        "[curve]",
        f"kind = {cfg.curve_kind}",
        f"beta = {_fmt(cfg.beta)}",
        f"fillet_radius = {_fmt(cfg.fillet_radius)}",
        "",
        "[bias]",
        f"orientation = {cfg.orientation}",
        "",
        "[grid]",
        f"ladder = {ladder}",
        f"offset = {_fmt(cfg.offset[0])} {_fmt(cfg.offset[1])}",
        f"delta_mode = {cfg.delta_mode}",
        "",
        "[scan]",
        f"margin = {'auto' if cfg.margin is None else _fmt(cfg.margin)}",
        f"seed = {cfg.seed}",
        f"tol_resid = {_fmt(cfg.tol_resid)}",
        "",
    ])
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text
