"""Rigid registration of matched prototype sets.

Transforms follow the translate-then-rotate convention x' = R (x + t),
so t lives in the coordinates of the previous batch. The textbook Kabsch
output (R, t_k) with x' = R x + t_k corresponds to t = R^T t_k.
"""

from __future__ import annotations

import math
import typing
from dataclasses import dataclass

import numpy as np

from src.base.exceptions import RegistrationError
from src.model.assignment import NodeMapping


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.asarray(self.rotation, dtype=float)
        translation = np.asarray(self.translation, dtype=float)

        n = len(translation)
        if rotation.shape != (n, n):
            raise ValueError(
                f"rotation {rotation.shape} does not match translation of length {n}"
            )

        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls, n: int) -> RigidTransform:
        return cls(rotation=np.eye(n), translation=np.zeros(n))

    @property
    def dim(self) -> int:
        return len(self.translation)

    @property
    def is_proper(self) -> bool:
        """Orthogonal with determinant +1, within 1e-9."""
        R = self.rotation
        orthogonal = np.linalg.norm(R.T @ R - np.eye(self.dim)) <= 1e-9
        return bool(orthogonal and abs(np.linalg.det(R) - 1) <= 1e-9)

    @property
    def rotation_angle(self) -> typing.Optional[float]:
        """Rotation angle in degrees for 2-D transforms."""
        if self.dim != 2:
            return None
        return math.degrees(math.atan2(self.rotation[1, 0], self.rotation[0, 0]))

    def to_dict(self) -> dict:
        return {
            "rotation": self.rotation,
            "translation": self.translation,
            "rotation_angle": self.rotation_angle,
        }


def _matched(prev, curr, mapping: NodeMapping):
    prev = np.atleast_2d(np.asarray(prev, dtype=float))
    curr = np.atleast_2d(np.asarray(curr, dtype=float))

    if prev.shape[1] != curr.shape[1]:
        raise ValueError(f"dimension mismatch: prev {prev.shape}, curr {curr.shape}")

    return prev[mapping.prev_indices], curr[mapping.curr_indices]


def fit_rigid(
    prev: np.ndarray, curr: np.ndarray, mapping: NodeMapping
) -> RigidTransform:
    """Least-squares rotation and translation between matched prototypes.

    Minimizes sum ||R (prev[g] + t) - curr[h]||^2 over the mapping pairs
    (Kabsch-Umeyama, reflections excluded). Degenerate configurations
    (collinear or coincident points) return one of the minimizers with
    det(R) = +1.

    Raises
    ------
    RegistrationError
        With fewer than two matched pairs.
    """

    if len(mapping) < 2:
        raise RegistrationError(
            f"{len(mapping)} matched pairs, at least 2 are needed for a rigid fit"
        )

    P, Q = _matched(prev, curr, mapping)

    c_p = P.mean(axis=0)
    c_q = Q.mean(axis=0)

    H = (P - c_p).T @ (Q - c_q)
    U, _, Vt = np.linalg.svd(H)

    D = np.eye(len(c_p))
    D[-1, -1] = np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0

    R = Vt.T @ D @ U.T
    t = R.T @ c_q - c_p

    return RigidTransform(rotation=R, translation=t)


def project(points: np.ndarray, xform: RigidTransform) -> np.ndarray:
    """Applies x -> R (x + t) to every row of `points`."""

    points = np.atleast_2d(np.asarray(points, dtype=float))

    if points.shape[1] != xform.dim:
        raise ValueError(
            f"points have dimension {points.shape[1]}, transform {xform.dim}"
        )

    return (points + xform.translation) @ xform.rotation.T


def registration_residual(
    prev: np.ndarray, curr: np.ndarray, mapping: NodeMapping, xform: RigidTransform
) -> float:
    """RMS distance between projected previous points and their matches."""

    if len(mapping) == 0:
        return 0.0

    P, Q = _matched(prev, curr, mapping)

    return float(np.sqrt(np.mean(np.sum((project(P, xform) - Q) ** 2, axis=1))))
