"""Planar revolute serial chains, disk obstacles and link/obstacle contact geometry."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormal, DimensionMismatch, PointOffLink
from .numkit import EPS_RANK


def rot90(v):
    return np.array([-v[1], v[0]])


@dataclass(frozen=True)
class RobotModel:
    link_lengths: tuple
    base_position: tuple = (0.0, 0.0)

    def __post_init__(self):
        lengths = tuple(float(l) for l in self.link_lengths)
        if not lengths:
            raise ValueError("robot needs at least one link")
        for i, l in enumerate(lengths):
            if not np.isfinite(l) or l <= 0:
                raise ValueError(f"link {i} length must be positive, got {l}")
        base = tuple(float(c) for c in self.base_position)
        if len(base) != 2:
            raise DimensionMismatch("base_position must be a 2-vector")
        object.__setattr__(self, "link_lengths", lengths)
        object.__setattr__(self, "base_position", base)

    @property
    def n_links(self):
        return len(self.link_lengths)

    @property
    def reach(self):
        return sum(self.link_lengths)


@dataclass(frozen=True)
class DiskObstacle:
    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in self.center)
        if len(center) != 2:
            raise DimensionMismatch("obstacle center must be a 2-vector")
        if not self.radius > 0:
            raise ValueError(f"obstacle radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class ContactPair:
    link_index: int
    p_c: np.ndarray
    p_o: np.ndarray
    normal: np.ndarray
    h: float
    jac_row: np.ndarray = field(repr=False)


def _joint_state(model, q):
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != model.n_links:
        raise DimensionMismatch(f"q has {q.shape[0]} entries for a {model.n_links}-link robot")
    return q


def forward_kinematics(model, q):
    """Joint origins from the base through the end effector, shape (n+1, 2)."""
    q = _joint_state(model, q)
    angles = np.cumsum(q)
    pts = np.empty((model.n_links + 1, 2))
    pts[0] = model.base_position
    for k, (l, a) in enumerate(zip(model.link_lengths, angles)):
        pts[k + 1] = pts[k] + l * np.array([np.cos(a), np.sin(a)])
    return pts


def end_effector(model, q):
    return forward_kinematics(model, q)[-1]


def end_effector_jacobian(model, q):
    pts = forward_kinematics(model, q)
    return _columns(pts, model.n_links - 1, pts[-1], model.n_links)


def _columns(pts, link_index, p, n):
    J = np.zeros((2, n))
    for j in range(link_index + 1):
        J[:, j] = rot90(p - pts[j])
    return J


def point_jacobian(model, q, link_index, p, tol=1e-9):
    """Jacobian of a point rigidly attached to link ``link_index``; columns past that link are zero."""
    pts = forward_kinematics(model, q)
    p = np.asarray(p, dtype=float)
    a, b = pts[link_index], pts[link_index + 1]
    _, dist = _project_on_segment(a, b, p)
    if dist > tol:
        raise PointOffLink(f"point {p} is {dist:.3e} away from link {link_index}")
    return _columns(pts, link_index, p, model.n_links)


def _project_on_segment(a, b, p):
    d = b - a
    t = float((p - a) @ d / (d @ d))
    t = min(max(t, 0.0), 1.0)
    foot = a + t * d
    return t, float(np.linalg.norm(p - foot))


def closest_point_on_segment(a, b, p):
    a, b, p = (np.asarray(v, dtype=float) for v in (a, b, p))
    t, _ = _project_on_segment(a, b, p)
    return a + t * (b - a), t


def closest_pair(model, q, link_index, obstacle, eps=EPS_RANK):
    """Closest points, signed distance and gradient row between one link and one disk."""
    pts = forward_kinematics(model, q)
    center = np.asarray(obstacle.center)
    p_c, _ = closest_point_on_segment(pts[link_index], pts[link_index + 1], center)
    offset = p_c - center
    dist = float(np.linalg.norm(offset))
    if dist <= eps:
        raise DegenerateNormal(f"obstacle center lies on link {link_index}")
    normal = offset / dist
    p_o = center + obstacle.radius * normal
    J = _columns(pts, link_index, p_c, model.n_links)
    return ContactPair(
        link_index=link_index,
        p_c=p_c,
        p_o=p_o,
        normal=normal,
        h=dist - obstacle.radius,
        jac_row=normal @ J,
    )


def contact_pairs(model, q, obstacles):
    """One pair per (obstacle, link), obstacle-major order. Never pruned by distance."""
    return [closest_pair(model, q, i, obs) for obs in obstacles for i in range(model.n_links)]
