"""Kernel dispositions and the linear kernel-neighbor correlation"""
from pathlib import Path
from typing import Union
import math
import numpy as np
from constants import DispositionKind
from exceptions import InvalidArgumentError, WriteError
from models.kernel_disposition import KernelDisposition, InfluenceRadius


def _tetrahedron() -> np.ndarray:
    # +z apex, then the base triangle at z = -1/3 starting on the +x half-plane
    ring = math.sqrt(8.0) / 3.0
    vertices = [(0.0, 0.0, 1.0)]
    for j in range(3):
        theta = 2.0 * math.pi * j / 3.0
        vertices.append((ring * math.cos(theta), ring * math.sin(theta), -1.0 / 3.0))
    return np.array(vertices)


def _octahedron() -> np.ndarray:
    # +z, equator (+x, +y, -x, -y), -z
    return np.array([
        (0.0, 0.0, 1.0),
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (-1.0, 0.0, 0.0),
        (0.0, -1.0, 0.0),
        (0.0, 0.0, -1.0),
    ])


def _icosahedron() -> np.ndarray:
    # +z, upper pentagon, lower pentagon rotated by 36 degrees, -z
    height = 1.0 / math.sqrt(5.0)
    ring = 2.0 / math.sqrt(5.0)
    vertices = [(0.0, 0.0, 1.0)]
    for j in range(5):
        theta = 2.0 * math.pi * j / 5.0
        vertices.append((ring * math.cos(theta), ring * math.sin(theta), height))
    for j in range(5):
        theta = 2.0 * math.pi * j / 5.0 + math.pi / 5.0
        vertices.append((ring * math.cos(theta), ring * math.sin(theta), -height))
    vertices.append((0.0, 0.0, -1.0))
    return np.array(vertices)


_UNIT_VERTICES = {
    DispositionKind.TETRAHEDRON: _tetrahedron,
    DispositionKind.OCTAHEDRON: _octahedron,
    DispositionKind.ICOSAHEDRON: _icosahedron,
}


def make_disposition(kind: DispositionKind, radius: float) -> KernelDisposition:
    """
    Build the center point plus the vertices of a regular polyhedron.

    Args:
        kind: Tetrahedron (5 points), Octahedron (7) or Icosahedron (13)
        radius: Distance from the center to every vertex, meters

    Returns:
        KernelDisposition whose first point is the origin and second point lies on +z
    """
    if not np.isfinite(radius) or radius <= 0:
        raise InvalidArgumentError(f"Kernel radius must be positive, got {radius}")

    kind = DispositionKind(kind)
    vertices = _UNIT_VERTICES[kind]() * float(radius)
    points = np.vstack([np.zeros((1, 3)), vertices])
    points.setflags(write=False)

    return KernelDisposition(kind=kind, points=points, radius=float(radius))


def correlation(
    rel_positions: np.ndarray,
    disp: KernelDisposition,
    delta: Union[InfluenceRadius, float]
) -> np.ndarray:
    """
    Linear correlation H[i, k] = max(0, 1 - ||x_i - x_k|| / delta).

    Args:
        rel_positions: N x 3 neighbor positions relative to the center point
        disp: Kernel disposition
        delta: Influence radius

    Returns:
        N x K matrix with entries in [0, 1]
    """
    if not isinstance(delta, InfluenceRadius):
        delta = InfluenceRadius(float(delta))

    rel_positions = np.asarray(rel_positions, dtype=np.float64)
    if rel_positions.ndim != 2 or rel_positions.shape[1] != 3:
        raise InvalidArgumentError(f"Relative positions must be N x 3, got {rel_positions.shape}")
    if not np.isfinite(rel_positions).all():
        raise InvalidArgumentError("Relative positions contain non-finite coordinates")

    diff = rel_positions[:, None, :] - disp.points[None, :, :]
    distance = np.sqrt(np.sum(diff * diff, axis=2))
    return np.maximum(0.0, 1.0 - distance / delta.delta)


def full_kpconv_params(k: int, width: int) -> int:
    """Weights of a channel-mixing kernel point convolution at constant width"""
    return k * width * width


def export_disposition_csv(disp: KernelDisposition, path: Union[str, Path]) -> Path:
    """Write one ``x,y,z`` row per kernel point"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, disp.points, fmt="%.17g", delimiter=",")
    except OSError as e:
        raise WriteError(f"Could not write disposition to {path}: {e}") from e
    return path
