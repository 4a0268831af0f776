"""Randomized target scenes and their ideal high-resolution rasterization.

Scenes live on a single target plane and mix point scatterers with filled 2-D
shapes (rectangles, disks, rings, regular polygons with an optional hole).
Hollow shapes come from boolean subtraction of a concentric interior.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from freehand_sar.errors import GenerationError
from freehand_sar.sarimage import SarImage, normalize_magnitude
from freehand_sar.seeding import split_rng

POINT_SPLAT_STD_PX = 0.75  # Gaussian blob std for point scatterers, in pixels


@dataclass(frozen=True)
class GridSpec:
    """Uniform imaging grid: nx-by-ny cells over width-by-height at plane z."""

    nx: int
    ny: int
    width: float
    height: float
    z: float

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError("need nx, ny >= 8")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("grid extent must be positive")

    @property
    def dx(self) -> float:
        return self.width / self.nx

    @property
    def dy(self) -> float:
        return self.height / self.ny

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) meshgrids of cell-center coordinates, shape (ny, nx)."""
        xs = -self.width / 2.0 + (np.arange(self.nx) + 0.5) * self.dx
        ys = -self.height / 2.0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(xs, ys, indexing="xy")


@dataclass(frozen=True)
class Rect:
    center: tuple[float, float]
    width: float
    height: float
    angle: float = 0.0  # radians, CCW
    amplitude: float = 1.0

    def mask(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        u = X - self.center[0]
        v = Y - self.center[1]
        c, s = math.cos(-self.angle), math.sin(-self.angle)
        ur = c * u - s * v
        vr = s * u + c * v
        return (np.abs(ur) <= self.width / 2.0) & (np.abs(vr) <= self.height / 2.0)


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float
    amplitude: float = 1.0

    def mask(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        r2 = (X - self.center[0]) ** 2 + (Y - self.center[1]) ** 2
        return r2 <= self.radius**2


@dataclass(frozen=True)
class Ring:
    """Disk minus a concentric disk (hollow object)."""

    center: tuple[float, float]
    r_outer: float
    r_inner: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.r_inner < self.r_outer):
            raise ValueError("need 0 <= r_inner < r_outer")

    def mask(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        r2 = (X - self.center[0]) ** 2 + (Y - self.center[1]) ** 2
        return (r2 <= self.r_outer**2) & (r2 > self.r_inner**2)


@dataclass(frozen=True)
class RegularPolygon:
    """Regular n-gon of given circumradius, with an optional concentric disk hole."""

    center: tuple[float, float]
    radius: float
    n_sides: int
    angle: float = 0.0
    hole_radius: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.n_sides < 3:
            raise ValueError("need n_sides >= 3")
        if self.hole_radius < 0:
            raise ValueError("hole_radius must be >= 0")

    def mask(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        u = X - self.center[0]
        v = Y - self.center[1]
        apothem = self.radius * math.cos(math.pi / self.n_sides)
        inside = np.ones(np.shape(u), dtype=bool)
        for i in range(self.n_sides):
            # outward edge normal of edge i
            theta = self.angle + (2 * i + 1) * math.pi / self.n_sides
            inside &= (u * math.cos(theta) + v * math.sin(theta)) <= apothem
        if self.hole_radius > 0:
            inside &= (u**2 + v**2) > self.hole_radius**2
        return inside


_SHAPE_TYPES = {"rect": Rect, "disk": Disk, "ring": Ring, "polygon": RegularPolygon}


@dataclass(frozen=True)
class Scene:
    """Target reflectivity: point scatterers plus shapes on the target plane."""

    points: tuple[tuple[tuple[float, float, float], float], ...]
    shapes: tuple
    target_plane_z: float

    def __post_init__(self):
        for _, amp in self.points:
            if amp < 0:
                raise ValueError("point amplitudes must be >= 0")
        for sh in self.shapes:
            if sh.amplitude < 0:
                raise ValueError("shape amplitudes must be >= 0")

    def to_json(self) -> str:
        def shape_doc(sh):
            name = next(k for k, v in _SHAPE_TYPES.items() if isinstance(sh, v))
            doc = {"type": name}
            doc.update({k: v for k, v in sh.__dict__.items()})
            doc["center"] = list(sh.center)
            return doc

        doc = {
            "target_plane_z": self.target_plane_z,
            "points": [{"position": list(p), "amplitude": a} for p, a in self.points],
            "shapes": [shape_doc(sh) for sh in self.shapes],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Scene":
        doc = json.loads(text)
        points = tuple(
            (tuple(float(v) for v in p["position"]), float(p["amplitude"]))
            for p in doc["points"]
        )
        shapes = []
        for sd in doc["shapes"]:
            sd = dict(sd)
            typ = _SHAPE_TYPES[sd.pop("type")]
            sd["center"] = tuple(sd["center"])
            shapes.append(typ(**sd))
        return cls(points=points, shapes=tuple(shapes), target_plane_z=float(doc["target_plane_z"]))

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as f:
            return cls.from_json(f.read())


@dataclass(frozen=True)
class RandomSceneSpec:
    """Ranges for randomized scene generation (ranges inclusive)."""

    n_points: tuple[int, int] = (1, 5)
    n_shapes: tuple[int, int] = (1, 3)
    amplitude: tuple[float, float] = (0.5, 1.0)
    min_separation: float = 0.01
    fov: tuple[float, float] = (0.2, 0.2)
    target_plane_z: float = 0.3
    max_shape_radius: float = 0.03
    min_shape_radius: float = 0.008

    def __post_init__(self):
        if self.n_points[1] < self.n_points[0] or self.n_shapes[1] < self.n_shapes[0]:
            raise ValueError("ranges must be non-empty")


_MAX_PLACEMENT_TRIES = 200


def random_scene(spec: RandomSceneSpec, seed: int) -> Scene:
    """Uniformly sampled point count/locations and shape parameters, per seed."""
    rng = split_rng(seed, 2)
    half_w, half_h = spec.fov[0] / 2.0, spec.fov[1] / 2.0
    n_points = int(rng.integers(spec.n_points[0], spec.n_points[1] + 1))
    n_shapes = int(rng.integers(spec.n_shapes[0], spec.n_shapes[1] + 1))

    margin = 0.05 * min(spec.fov)
    placed_xy: list[tuple[float, float]] = []

    def place() -> tuple[float, float]:
        for _ in range(_MAX_PLACEMENT_TRIES):
            x = rng.uniform(-half_w + margin, half_w - margin)
            y = rng.uniform(-half_h + margin, half_h - margin)
            if all(
                (x - px) ** 2 + (y - py) ** 2 >= spec.min_separation**2
                for px, py in placed_xy
            ):
                placed_xy.append((x, y))
                return x, y
        raise GenerationError("could not satisfy min_separation within bounded retries")

    points = []
    for _ in range(n_points):
        x, y = place()
        amp = float(rng.uniform(*spec.amplitude))
        points.append(((x, y, spec.target_plane_z), amp))

    shapes = []
    for _ in range(n_shapes):
        x, y = place()
        amp = float(rng.uniform(*spec.amplitude))
        r = float(rng.uniform(spec.min_shape_radius, spec.max_shape_radius))
        # keep the shape inside the field of view
        r = min(r, half_w - margin - abs(x), half_h - margin - abs(y))
        r = max(r, spec.min_shape_radius / 2.0)
        kind = rng.integers(0, 4)
        if kind == 0:
            shapes.append(Rect((x, y), 2 * r, 2 * r * float(rng.uniform(0.4, 1.0)),
                               float(rng.uniform(0, math.pi)), amp))
        elif kind == 1:
            shapes.append(Disk((x, y), r, amp))
        elif kind == 2:
            shapes.append(Ring((x, y), r, r * float(rng.uniform(0.35, 0.7)), amp))
        else:
            hole = r * float(rng.uniform(0.0, 0.5))
            shapes.append(RegularPolygon((x, y), r, int(rng.integers(3, 8)),
                                         float(rng.uniform(0, math.pi)), hole, amp))
    return Scene(points=tuple(points), shapes=tuple(shapes), target_plane_z=spec.target_plane_z)


def _shape_canvas(scene: Scene, grid: GridSpec) -> np.ndarray:
    """Max-composited shape amplitudes on the grid's cell centers."""
    X, Y = grid.cell_centers()
    canvas = np.zeros((grid.ny, grid.nx))
    for sh in scene.shapes:
        m = sh.mask(X, Y)
        canvas = np.maximum(canvas, np.where(m, sh.amplitude, 0.0))
    return canvas


def rasterize_ideal(scene: Scene, grid: GridSpec) -> SarImage:
    """Ideal high-resolution image: filled shapes plus Gaussian point splats.

    Disjoint contributions compose by pixel-wise max; the result is divided by
    its max (1 if empty) and clipped to [0, 1].
    """
    canvas = _shape_canvas(scene, grid)
    X, Y = grid.cell_centers()
    sx = POINT_SPLAT_STD_PX * grid.dx
    sy = POINT_SPLAT_STD_PX * grid.dy
    for (px, py, _pz), amp in scene.points:
        blob = amp * np.exp(-((X - px) ** 2 / (2 * sx**2) + (Y - py) ** 2 / (2 * sy**2)))
        canvas = np.maximum(canvas, blob)
    return SarImage(normalize_magnitude(canvas), (grid.width, grid.height), grid.z)


def discretize_scene(scene: Scene, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Point-scatterer cloud for the forward model: (positions (T,3), amplitudes (T,)).

    Shape interiors are sampled at one scatterer per occupied grid cell center
    with the shape's amplitude; explicit points pass through unchanged.
    """
    canvas = _shape_canvas(scene, grid)
    X, Y = grid.cell_centers()
    iy, ix = np.nonzero(canvas > 0)
    positions = []
    amplitudes = []
    for (px, py, pz), amp in scene.points:
        positions.append((px, py, pz))
        amplitudes.append(amp)
    for j, i in zip(iy, ix):
        positions.append((X[j, i], Y[j, i], scene.target_plane_z))
        amplitudes.append(canvas[j, i])
    if not positions:
        return np.zeros((0, 3)), np.zeros((0,))
    return np.asarray(positions, dtype=float), np.asarray(amplitudes, dtype=float)
