"""Scenario description, YAML loading and validation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Any

import yaml

from .camera import CameraIntrinsics
from .control import ControlGains
from .dynamics import ConstantVelocity, MobilityPattern, Stationary, TrigAccelerating, Waypoints
from .errors import ParseError, ValidationError
from .estimation import EstimatorKind, Oracle, Ukf


@dataclass(frozen=True)
class ExplicitPlacement:
    """Per-UAV positions and body Euler angles (roll, pitch, yaw) in radians."""

    positions: tuple[tuple[float, float, float], ...]
    orientations: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class RingPlacement:
    """UAVs evenly spaced around the target, each facing it.

    ``radius`` defaults to the desired camera-target distance.
    """

    radius: float | None = None
    height: float = 50.0
    phase: float = 0.0


@dataclass(frozen=True)
class Convergence:
    window: int = 10
    tol_e: float = 1e-2
    tol_v: float = 0.05
    stop: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    num_uavs: int
    dt: float = 0.1
    max_rounds: int = 200
    gains: ControlGains = field(default_factory=ControlGains)
    intrinsics: CameraIntrinsics = field(default_factory=CameraIntrinsics)
    gamma: float | None = None
    mobility: MobilityPattern = field(default_factory=TrigAccelerating)
    estimator: EstimatorKind = field(default_factory=Oracle)
    swarm_sign: str = "corrected"
    swarm_enabled: bool = True
    feature_source: str = "measured"
    placement: ExplicitPlacement | RingPlacement = field(default_factory=RingPlacement)
    target_position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    pixel_noise: float = 0.0
    convergence: Convergence = field(default_factory=Convergence)
    seed: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        _validate(self)

    @property
    def comm_range(self) -> float:
        return 2.0 * self.gains.d_u if self.gamma is None else self.gamma

    @property
    def ring_radius(self) -> float:
        p = self.placement
        return self.gains.d_q if p.radius is None else p.radius


def _validate(cfg: ScenarioConfig) -> None:
    def need(cond, msg):
        if not cond:
            raise ValidationError(msg)

    need(isinstance(cfg.num_uavs, int) and not isinstance(cfg.num_uavs, bool) and cfg.num_uavs >= 1,
         "num_uavs must be an integer >= 1")
    need(math.isfinite(cfg.dt) and cfg.dt > 0, "dt must be > 0")
    need(isinstance(cfg.max_rounds, int) and cfg.max_rounds >= 0, "max_rounds must be an integer >= 0")
    need(cfg.gamma is None or cfg.gamma > 0, "gamma must be > 0")
    need(cfg.swarm_sign in ("literal", "corrected"), "swarm_sign must be 'literal' or 'corrected'")
    need(cfg.feature_source in ("measured", "integrated"), "feature_source must be 'measured' or 'integrated'")
    need(cfg.pixel_noise >= 0, "pixel_noise must be >= 0")
    need(len(cfg.target_position) == 3 and cfg.target_position[2] == 0.0,
         "target_position must be a ground point [x, y, 0]")
    c = cfg.convergence
    need(c.window >= 1 and c.tol_e > 0 and c.tol_v > 0, "convergence window/tolerances must be positive")
    p = cfg.placement
    if isinstance(p, ExplicitPlacement):
        need(len(p.positions) == cfg.num_uavs, "initial position list length must match num_uavs")
        need(len(p.orientations) == cfg.num_uavs, "initial orientation list length must match num_uavs")
        need(all(len(v) == 3 for v in p.positions + p.orientations), "poses need 3 components each")
    else:
        need(p.radius is None or p.radius > 0, "ring radius must be > 0")


# -- loading ---------------------------------------------------------------

_TOP_KEYS = {
    "num_uavs", "dt", "max_rounds", "gains", "camera", "gamma", "mobility", "estimator",
    "swarm_sign", "swarm_enabled", "feature_source", "initial", "target", "pixel_noise",
    "convergence", "seed", "output_dir",
}
_GAIN_KEYS = {"lambda": "lam", "k": "k", "d_u": "d_u", "d_q": "d_q", "damping": "damping",
              "speed_limit": "speed_limit"}
_CAMERA_KEYS = {f.name for f in fields(CameraIntrinsics)}


def _reject_unknown(section: str, data: dict, allowed) -> None:
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ValidationError(f"unknown key(s) in {section}: {', '.join(map(str, extra))}")


def _section(data: dict, key: str) -> dict:
    val = data.get(key, {})
    if val is None:
        return {}
    if not isinstance(val, dict):
        raise ValidationError(f"{key} must be a mapping")
    return val


def _vec3(val, what: str) -> tuple[float, float, float]:
    try:
        out = tuple(float(v) for v in val)
    except (TypeError, ValueError):
        raise ValidationError(f"{what} must be a list of 3 numbers") from None
    if len(out) != 3:
        raise ValidationError(f"{what} must have 3 components")
    return out


def _build(kind, what: str, **kw):
    try:
        return kind(**kw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what}: {exc}") from None


def _mobility(data: dict) -> MobilityPattern:
    kind = data.get("kind", "trig")
    if kind == "trig":
        _reject_unknown("mobility", data, {"kind"})
        return TrigAccelerating()
    if kind == "stationary":
        _reject_unknown("mobility", data, {"kind"})
        return Stationary()
    if kind == "constant":
        _reject_unknown("mobility", data, {"kind", "velocity"})
        return _build(ConstantVelocity, "mobility", v=_vec3(data.get("velocity"), "mobility.velocity"))
    if kind == "waypoints":
        _reject_unknown("mobility", data, {"kind", "points"})
        pts = []
        for item in data.get("points") or []:
            if not isinstance(item, (list, tuple)) or len(item) != 4:
                raise ValidationError("waypoints must be [t, x, y, z] rows")
            pts.append((float(item[0]), _vec3(item[1:], "waypoint")))
        return _build(Waypoints, "mobility", points=tuple(pts))
    raise ValidationError(f"unknown mobility kind {kind!r}")


def _estimator(data: dict) -> EstimatorKind:
    kind = data.get("kind", "oracle")
    if kind == "oracle":
        _reject_unknown("estimator", data, {"kind"})
        return Oracle()
    if kind == "ukf":
        allowed = {f.name for f in fields(Ukf)}
        _reject_unknown("estimator", data, allowed | {"kind"})
        return _build(Ukf, "estimator", **{k: float(v) for k, v in data.items() if k != "kind"})
    raise ValidationError(f"unknown estimator kind {kind!r}")


def _placement(data: dict):
    kind = data.get("placement", "auto-ring")
    if kind == "explicit":
        _reject_unknown("initial", data, {"placement", "positions", "orientations"})
        pos = tuple(_vec3(p, "initial position") for p in data.get("positions") or [])
        ori = tuple(_vec3(o, "initial orientation") for o in data.get("orientations") or [])
        return ExplicitPlacement(pos, ori)
    if kind == "auto-ring":
        _reject_unknown("initial", data, {"placement", "radius", "height", "phase"})
        radius = data.get("radius")
        return RingPlacement(None if radius is None else float(radius),
                             float(data.get("height", 50.0)), float(data.get("phase", 0.0)))
    raise ValidationError(f"unknown placement {kind!r}")


def config_from_dict(data: dict | None) -> ScenarioConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError("config must be a mapping")
    _reject_unknown("config", data, _TOP_KEYS)
    if "num_uavs" not in data:
        raise ValidationError("num_uavs is required")

    g = _section(data, "gains")
    _reject_unknown("gains", g, _GAIN_KEYS)
    gains = _build(ControlGains, "gains", **{_GAIN_KEYS[k]: (None if v is None else float(v)) for k, v in g.items()})
    cam = _section(data, "camera")
    _reject_unknown("camera", cam, _CAMERA_KEYS)
    intr = _build(CameraIntrinsics, "camera", **cam)
    tgt = _section(data, "target")
    _reject_unknown("target", tgt, {"position"})
    conv = _section(data, "convergence")
    _reject_unknown("convergence", conv, {f.name for f in fields(Convergence)})

    kw: dict[str, Any] = {
        "num_uavs": data["num_uavs"],
        "gains": gains,
        "intrinsics": intr,
        "mobility": _mobility(_section(data, "mobility")),
        "estimator": _estimator(_section(data, "estimator")),
        "placement": _placement(_section(data, "initial")),
        "convergence": _build(Convergence, "convergence", **conv),
    }
    if "position" in tgt:
        kw["target_position"] = _vec3(tgt["position"], "target.position")
    for key, conv_fn in (("dt", float), ("gamma", float), ("pixel_noise", float), ("seed", int),
                         ("max_rounds", int), ("swarm_sign", str), ("feature_source", str),
                         ("swarm_enabled", bool), ("output_dir", str)):
        if key in data and data[key] is not None:
            val = data[key]
            if conv_fn is int and (isinstance(val, bool) or not isinstance(val, int)):
                raise ValidationError(f"{key} must be an integer")
            try:
                kw[key] = conv_fn(val)
            except (TypeError, ValueError):
                raise ValidationError(f"{key} has an invalid value {val!r}") from None
    try:
        return ScenarioConfig(**kw)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"{path}: malformed YAML{where}: {getattr(exc, 'problem', exc)}") from None
    return config_from_dict(data)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Canonical mapping accepted by :func:`config_from_dict`."""
    g = cfg.gains
    out: dict[str, Any] = {
        "num_uavs": cfg.num_uavs,
        "dt": cfg.dt,
        "max_rounds": cfg.max_rounds,
        "seed": cfg.seed,
        "gains": {"lambda": g.lam, "k": g.k, "d_u": g.d_u, "d_q": g.d_q, "damping": g.damping,
                  "speed_limit": g.speed_limit},
        "camera": asdict(cfg.intrinsics),
        "gamma": cfg.gamma,
        "swarm_sign": cfg.swarm_sign,
        "swarm_enabled": cfg.swarm_enabled,
        "feature_source": cfg.feature_source,
        "pixel_noise": cfg.pixel_noise,
        "target": {"position": list(cfg.target_position)},
        "convergence": asdict(cfg.convergence),
        "output_dir": cfg.output_dir,
    }
    m = cfg.mobility
    if isinstance(m, TrigAccelerating):
        out["mobility"] = {"kind": "trig"}
    elif isinstance(m, Stationary):
        out["mobility"] = {"kind": "stationary"}
    elif isinstance(m, ConstantVelocity):
        out["mobility"] = {"kind": "constant", "velocity": list(m.v)}
    else:
        out["mobility"] = {"kind": "waypoints", "points": [[t, *p] for t, p in m.points]}
    e = cfg.estimator
    out["estimator"] = {"kind": "oracle"} if isinstance(e, Oracle) else {"kind": "ukf", **asdict(e)}
    p = cfg.placement
    if isinstance(p, ExplicitPlacement):
        out["initial"] = {"placement": "explicit", "positions": [list(v) for v in p.positions],
                          "orientations": [list(v) for v in p.orientations]}
    else:
        out["initial"] = {"placement": "auto-ring", "radius": p.radius, "height": p.height, "phase": p.phase}
    return out


def dump_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
