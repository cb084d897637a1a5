"""YAML scene files <-> :class:`SimConfig`."""
from importlib import resources
from pathlib import Path

import yaml

from .errors import SceneError
from .planar_robot import DiskObstacle, RobotModel
from .simulate import Controller, SimConfig

DEFAULT_SCENE = "planar3_disk.yaml"

_KEYS = {"robot", "obstacles", "q0", "goal", "k_p", "tau", "delta", "kappa_gain",
         "controller", "max_steps", "goal_tol"}


def default_scene_path():
    return Path(str(resources.files("cbflcp") / "scenes" / DEFAULT_SCENE))


def _num(value, field, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(field, f"expected a number, got {value!r}")
    value = float(value)
    if positive and not value > 0:
        raise SceneError(field, f"must be positive, got {value}")
    return value


def _vec(value, field, length=None):
    if not isinstance(value, (list, tuple)):
        raise SceneError(field, f"expected a list of numbers, got {value!r}")
    out = tuple(_num(v, f"{field}[{i}]") for i, v in enumerate(value))
    if length is not None and len(out) != length:
        raise SceneError(field, f"expected {length} entries, got {len(out)}")
    return out


def parse_scene(data):
    if not isinstance(data, dict):
        raise SceneError("<root>", "scene must be a mapping")
    unknown = set(data) - _KEYS
    if unknown:
        raise SceneError(sorted(unknown)[0], "unknown key")
    for key in ("robot", "obstacles", "q0", "goal"):
        if key not in data:
            raise SceneError(key, "missing required key")

    robot = data["robot"]
    if not isinstance(robot, dict) or "link_lengths" not in robot:
        raise SceneError("robot.link_lengths", "missing required key")
    lengths = _vec(robot["link_lengths"], "robot.link_lengths")
    if not lengths:
        raise SceneError("robot.link_lengths", "need at least one link")
    for i, l in enumerate(lengths):
        if not l > 0:
            raise SceneError(f"robot.link_lengths[{i}]", f"link length must be positive, got {l}")
    base = _vec(robot.get("base", [0.0, 0.0]), "robot.base", 2)
    model = RobotModel(lengths, base)

    if not isinstance(data["obstacles"], list) or not data["obstacles"]:
        raise SceneError("obstacles", "expected a non-empty list")
    obstacles = []
    for i, obs in enumerate(data["obstacles"]):
        field = f"obstacles[{i}]"
        if not isinstance(obs, dict) or "center" not in obs or "radius" not in obs:
            raise SceneError(field, "needs 'center' and 'radius'")
        obstacles.append(DiskObstacle(_vec(obs["center"], field + ".center", 2),
                                      _num(obs["radius"], field + ".radius", positive=True)))

    kw = {}
    if "k_p" in data:
        kw["k_p"] = _num(data["k_p"], "k_p", positive=True)
    if "tau" in data:
        kw["tau"] = _num(data["tau"], "tau", positive=True)
    if "delta" in data:
        d = data["delta"]
        kw["delta"] = _vec(d, "delta") if isinstance(d, list) else (_num(d, "delta"),)
        for i, v in enumerate(kw["delta"]):
            if v < 0:
                raise SceneError(f"delta[{i}]", "margins must be nonnegative")
        m = model.n_links * len(obstacles)
        if len(kw["delta"]) not in (1, m):
            raise SceneError("delta", f"expected 1 or {m} margins, got {len(kw['delta'])}")
    if data.get("kappa_gain") is not None:
        kw["kappa_gain"] = _num(data["kappa_gain"], "kappa_gain", positive=True)
    if "controller" in data:
        try:
            kw["controller"] = Controller(data["controller"])
        except ValueError:
            raise SceneError("controller", f"expected one of CBF, LC, Both, got {data['controller']!r}")
    if "max_steps" in data:
        ms = data["max_steps"]
        if isinstance(ms, bool) or not isinstance(ms, int) or ms < 1:
            raise SceneError("max_steps", f"expected a positive integer, got {ms!r}")
        kw["max_steps"] = ms
    if "goal_tol" in data:
        kw["goal_tol"] = _num(data["goal_tol"], "goal_tol", positive=True)

    q0 = _vec(data["q0"], "q0", model.n_links)
    goal = _vec(data["goal"], "goal", 2)
    try:
        return SimConfig(model=model, obstacles=tuple(obstacles), q0=q0, goal=goal, **kw)
    except ValueError as exc:
        raise SceneError("<config>", str(exc)) from exc


def load_scene(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneError(str(path), f"cannot read scene file ({exc.strerror})") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else str(path)
        raise SceneError(where, f"invalid YAML: {getattr(exc, 'problem', exc)}") from exc
    return parse_scene(data)


def scene_dict(config):
    return {
        "robot": {"link_lengths": list(config.model.link_lengths), "base": list(config.model.base_position)},
        "obstacles": [{"center": list(o.center), "radius": o.radius} for o in config.obstacles],
        "q0": list(config.q0),
        "goal": list(config.goal),
        "k_p": config.k_p,
        "tau": config.tau,
        "delta": list(config.delta),
        "kappa_gain": config.kappa_gain,
        "controller": config.controller.value,
        "max_steps": config.max_steps,
        "goal_tol": config.goal_tol,
    }
