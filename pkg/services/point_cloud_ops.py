"""Point cloud I/O, grid subsampling and radius neighbor search"""
from pathlib import Path
from typing import Union
import numpy as np
from scipy.spatial import cKDTree
from constants import CloudFormat
from exceptions import InvalidArgumentError, ParseError, WriteError
from models.point_cloud import PointCloud, NeighborIndex

_HEADER_BYTES = 8


def _cloud_from_rows(rows: np.ndarray) -> PointCloud:
    positions = rows[:, :3]
    if rows.shape[1] > 3:
        features = rows[:, 3:]
    else:
        features = np.ones((rows.shape[0], 1))
    return PointCloud(positions=np.ascontiguousarray(positions), features=np.ascontiguousarray(features))


def _load_ascii(path: Path) -> PointCloud:
    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Unreadable cloud file: {e}", path=str(path)) from e

    rows = []
    width = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue

        fields = stripped.split()
        if len(fields) < 3:
            raise ParseError(f"Expected at least 3 columns, got {len(fields)}", path=str(path), line=line_no)
        if width is not None and len(fields) != width:
            raise ParseError(f"Expected {width} columns, got {len(fields)}", path=str(path), line=line_no)
        width = len(fields)

        try:
            values = [float(v) for v in fields]
        except ValueError as e:
            raise ParseError(f"Malformed number: {e}", path=str(path), line=line_no) from e
        if not all(np.isfinite(values)):
            raise ParseError("Non-finite value", path=str(path), line=line_no)
        rows.append(values)

    if not rows:
        return PointCloud(positions=np.zeros((0, 3)), features=np.ones((0, 1)))
    return _cloud_from_rows(np.array(rows, dtype=np.float64))


def _load_binary(path: Path) -> PointCloud:
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ParseError(f"Unreadable cloud file: {e}", path=str(path)) from e

    if not raw:
        return PointCloud(positions=np.zeros((0, 3)), features=np.ones((0, 1)))
    if len(raw) < _HEADER_BYTES:
        raise ParseError("Truncated header", path=str(path), offset=len(raw))

    n, d = (int(v) for v in np.frombuffer(raw, dtype="<u4", count=2))
    expected = _HEADER_BYTES + n * (3 + d) * 4
    if len(raw) != expected:
        raise ParseError(
            f"Expected {expected} bytes for n={n}, d={d}, got {len(raw)}",
            path=str(path),
            offset=min(len(raw), expected)
        )

    values = np.frombuffer(raw, dtype="<f4", offset=_HEADER_BYTES).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ParseError("Non-finite value", path=str(path), offset=_HEADER_BYTES + 4 * int(bad[0]))

    return _cloud_from_rows(values.reshape(n, 3 + d))


def load_cloud(path: Union[str, Path], fmt: CloudFormat = CloudFormat.ASCII_XYZ) -> PointCloud:
    """
    Read a point cloud.

    Args:
        path: Cloud file
        fmt: ``ascii_xyz`` (``x y z [f1 ...]`` per line, ``#`` comments) or
            ``binary_f32`` (u32 n, u32 d, then n*(3+d) little-endian f32)

    Returns:
        PointCloud; features default to one all-ones column when the file has none
    """
    path = Path(path)
    if CloudFormat(fmt) == CloudFormat.BINARY_F32:
        return _load_binary(path)
    return _load_ascii(path)


def save_cloud(cloud: PointCloud, path: Union[str, Path], fmt: CloudFormat = CloudFormat.ASCII_XYZ) -> Path:
    """Write a cloud in either supported format"""
    path = Path(path)
    rows = np.hstack([cloud.positions, cloud.features])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if CloudFormat(fmt) == CloudFormat.BINARY_F32:
            header = np.array([cloud.n, cloud.d], dtype="<u4").tobytes()
            path.write_bytes(header + rows.astype("<f4").tobytes())
        else:
            np.savetxt(path, rows, fmt="%.17g", delimiter=" ")
    except OSError as e:
        raise WriteError(f"Could not write cloud to {path}: {e}") from e
    return path


def grid_subsample(cloud: PointCloud, cell: float) -> PointCloud:
    """
    Barycenter-per-cube subsampling.

    Cubes of side ``cell`` are anchored at the cloud's bounding-box minimum, so
    the result commutes with translation. Output rows follow ascending
    lexicographic cube coordinates.
    """
    if not np.isfinite(cell) or cell <= 0:
        raise InvalidArgumentError(f"Grid cell must be positive, got {cell}")
    if cloud.n == 0:
        return cloud

    origin = cloud.positions.min(axis=0)
    cubes = np.floor((cloud.positions - origin) / cell).astype(np.int64)
    _, inverse = np.unique(cubes, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    n_cells = int(inverse.max()) + 1
    counts = np.bincount(inverse, minlength=n_cells).astype(np.float64)

    def cell_mean(values: np.ndarray) -> np.ndarray:
        sums = np.zeros((n_cells, values.shape[1]))
        np.add.at(sums, inverse, values)
        return sums / counts[:, None]

    return PointCloud(positions=cell_mean(cloud.positions), features=cell_mean(cloud.features))


def radius_neighbors(queries: PointCloud, support: PointCloud, r: float, max_n: int) -> NeighborIndex:
    """
    Support points within distance ``r`` of every query.

    Rows are sorted by (distance, index), truncated to ``max_n`` and padded with
    the shadow index ``support.n``.
    """
    if not np.isfinite(r) or r <= 0:
        raise InvalidArgumentError(f"Neighborhood radius must be positive, got {r}")
    if max_n < 1:
        raise InvalidArgumentError(f"max_n must be >= 1, got {max_n}")

    shadow = support.n
    indices = np.full((queries.n, max_n), shadow, dtype=np.int64)
    counts = np.zeros(queries.n, dtype=np.int64)
    if queries.n == 0 or support.n == 0:
        return NeighborIndex(indices=indices, counts=counts, shadow=shadow)

    # The tree only proposes candidates; membership is decided on exact distances
    tree = cKDTree(support.positions)
    candidates = tree.query_ball_point(queries.positions, r * (1.0 + 1e-9))

    for i, found in enumerate(candidates):
        if not found:
            continue
        idx = np.asarray(found, dtype=np.int64)
        dist = np.linalg.norm(support.positions[idx] - queries.positions[i], axis=1)
        keep = dist <= r
        idx, dist = idx[keep], dist[keep]
        order = np.lexsort((idx, dist))[:max_n]
        counts[i] = order.size
        indices[i, :order.size] = idx[order]

    return NeighborIndex(indices=indices, counts=counts, shadow=shadow)


def nearest_index(queries: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Index of the nearest support point for every query (ties resolved by the tree)"""
    if queries.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if support.shape[0] == 0:
        raise InvalidArgumentError("Nearest-neighbor lookup needs a non-empty support set")
    _, idx = cKDTree(support).query(queries, k=1)
    return np.asarray(idx, dtype=np.int64)


def synthetic_cloud(n: int, seed: int = 0, extent: float = 2.0) -> PointCloud:
    """
    LiDAR-like layered scene: a ground plane, two walls and a few pole-like objects.

    Args:
        n: Number of points
        seed: Generator seed
        extent: Half-size of the square ground patch, meters

    Returns:
        PointCloud with the default all-ones feature column
    """
    if n < 0:
        raise InvalidArgumentError(f"Point count must be non-negative, got {n}")
    rng = np.random.default_rng(seed)

    n_ground = n // 2
    n_walls = n // 4
    n_objects = n - n_ground - n_walls

    ground = np.column_stack([
        rng.uniform(-extent, extent, n_ground),
        rng.uniform(-extent, extent, n_ground),
        np.zeros(n_ground),
    ])

    side = rng.integers(0, 2, n_walls)
    walls = np.column_stack([
        np.where(side == 0, -extent, extent),
        rng.uniform(-extent, extent, n_walls),
        rng.uniform(0.0, 1.5, n_walls),
    ])

    centers = rng.uniform(-0.7 * extent, 0.7 * extent, size=(3, 2))
    which = rng.integers(0, 3, n_objects)
    theta = rng.uniform(0.0, 2.0 * np.pi, n_objects)
    objects = np.column_stack([
        centers[which, 0] + 0.3 * np.cos(theta),
        centers[which, 1] + 0.3 * np.sin(theta),
        rng.uniform(0.0, 1.0, n_objects),
    ])

    positions = np.vstack([ground, walls, objects]) + rng.normal(0.0, 0.01, size=(n, 3))
    return PointCloud.from_positions(positions)
