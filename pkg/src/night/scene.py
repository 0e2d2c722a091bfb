"""Parametric "look behind a corner" scene model.

Canonical frame (right-handed, meters):

* front (reflective) wall: plane x = 0, normal +x, 8 m along y, 4 m along z
  (y in [-4, 4], z in [0, 4]);
* middle (occluding) wall: plane y = 0, spanning x in [0.7, 4.0] and
  z in [0, 4] -- its near edge leaves the 0.70 m corridor gap next to the
  front wall that the indirect light travels through;
* camera/emitter at (1, -1, 1.65), optical axis (-sin 50deg, cos 50deg, 0),
  i.e. tilted 50 degrees toward the front wall, up = +z;
* hidden objects sampled with centers in x [1, 1.3], y [0.5, 1.3],
  z [1.25, 1.95] on the far side of the occluder.

The camera never sees the hidden object directly; it only sees its
reflection on the front wall.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

SCENE_SCHEMA_VERSION = 1

PRIMITIVE_KINDS = ("cube", "cylinder", "sphere", "concave_plane", "cone", "parallelepiped")

# Shell thickness of the concave_plane primitive [m].
SHELL_THICKNESS_M = 0.01

# Cap on the bounding-sphere radius of sampled primitives [m].  Keeps every
# camera-to-object segment blocked by the middle wall for centers inside the
# sampling box (see tests), while staying well under the 0.5 m^3 bound.
MAX_PRIMITIVE_RADIUS_M = 0.30

OBJECT_POSITION_RANGES = ((1.0, 1.3), (0.5, 1.3), (1.25, 1.95))
OBJECT_ROTATION_RANGE_DEG = (-90.0, 90.0)
ROUGHNESS_GRID = tuple(round(0.30 + 0.05 * i, 2) for i in range(15))
TWO_PRIMITIVE_PROBABILITY = 1.0 / 7.0


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero-length vector")
    return v / n


def euler_xyz_matrix(angles_deg) -> np.ndarray:
    """Rotation matrix for intrinsic XYZ Euler angles in degrees."""
    ax, ay, az = np.radians(np.asarray(angles_deg, dtype=np.float64))
    cx, sx = math.cos(ax), math.sin(ax)
    cy, sy = math.cos(ay), math.sin(ay)
    cz, sz = math.cos(az), math.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rz @ ry @ rx


@dataclass(frozen=True)
class Plane:
    """Infinite plane through ``point`` with unit ``normal``."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=np.float64))
        n = np.asarray(self.normal, dtype=np.float64)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("plane normal must be unit length")
        object.__setattr__(self, "normal", n)

    def signed_distance(self, p) -> float:
        return float(np.dot(np.asarray(p, dtype=np.float64) - self.point, self.normal))


@dataclass(frozen=True)
class Material:
    """Surface material: Lambertian albedo plus an optional glossy lobe.

    Exactly one of the two reflection models is active: the roughness lobe
    (alpha in [0.3, 1.0], 1.0 = pure diffuse) or the ideal specular mirror.
    """

    albedo: float = 0.8
    roughness: float = 1.0
    ideal_specular: bool = False

    def __post_init__(self):
        if not 0.0 <= self.albedo <= 1.0:
            raise ValueError("albedo must lie in [0, 1]")
        if not self.ideal_specular and not 0.3 <= self.roughness <= 1.0:
            raise ValueError("roughness must lie in [0.3, 1.0]")


@dataclass(frozen=True)
class WallRect:
    """Finite rectangular wall: center, unit normal and two half axes."""

    center: np.ndarray
    normal: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    half_u: float
    half_v: float
    material: Material = Material()

    def __post_init__(self):
        for name in ("center", "normal", "u_axis", "v_axis"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))

    @property
    def plane(self) -> Plane:
        return Plane(self.center, self.normal)


@dataclass(frozen=True)
class Primitive:
    """Hidden-object primitive with pose and kind-specific size [m].

    ``size`` per kind: cube -> (side,); sphere -> (radius,);
    cylinder/cone -> (radius, height); parallelepiped -> (sx, sy, sz);
    concave_plane -> (radius, span_deg, height) thin cylindrical shell.
    """

    kind: str
    position: np.ndarray
    rotation_deg: np.ndarray
    size: tuple

    def __post_init__(self):
        if self.kind not in PRIMITIVE_KINDS:
            raise ValueError(f"unknown primitive kind {self.kind!r}")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64))
        object.__setattr__(self, "rotation_deg", np.asarray(self.rotation_deg, dtype=np.float64))
        object.__setattr__(self, "size", tuple(float(s) for s in self.size))

    def rotation_matrix(self) -> np.ndarray:
        return euler_xyz_matrix(self.rotation_deg)

    def bounding_radius(self) -> float:
        s = self.size
        if self.kind == "sphere":
            return s[0]
        if self.kind == "cube":
            return s[0] * math.sqrt(3.0) / 2.0
        if self.kind == "parallelepiped":
            return math.sqrt(s[0] ** 2 + s[1] ** 2 + s[2] ** 2) / 2.0
        if self.kind in ("cylinder", "cone"):
            return math.sqrt(s[0] ** 2 + (s[1] / 2.0) ** 2)
        if self.kind == "concave_plane":
            return math.sqrt((s[0] + SHELL_THICKNESS_M) ** 2 + (s[2] / 2.0) ** 2)
        raise AssertionError(self.kind)


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics; vertical FoV follows from hfov and aspect."""

    width: int = 320
    height: int = 240
    hfov_deg: float = 60.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("resolution must be positive")
        if not 0 < self.hfov_deg < 180:
            raise ValueError("hfov must lie in (0, 180) degrees")

    @property
    def tan_half_hfov(self) -> float:
        return math.tan(math.radians(self.hfov_deg) / 2.0)

    @property
    def tan_half_vfov(self) -> float:
        return self.tan_half_hfov * self.height / self.width


@dataclass(frozen=True)
class Camera:
    position: np.ndarray
    forward: np.ndarray
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    intrinsics: CameraIntrinsics = CameraIntrinsics()

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64))
        object.__setattr__(self, "forward", _unit(self.forward))
        object.__setattr__(self, "up", _unit(self.up))

    def basis(self):
        """Right, up, forward unit vectors of the camera frame."""
        right = _unit(np.cross(self.forward, self.up))
        cam_up = np.cross(right, self.forward)
        return right, cam_up, self.forward


def default_front_wall(material: Material | None = None) -> WallRect:
    return WallRect(
        center=(0.0, 0.0, 2.0),
        normal=(1.0, 0.0, 0.0),
        u_axis=(0.0, 1.0, 0.0),
        v_axis=(0.0, 0.0, 1.0),
        half_u=4.0,
        half_v=2.0,
        material=material or Material(),
    )


def default_middle_wall() -> WallRect:
    return WallRect(
        center=(2.35, 0.0, 2.0),
        normal=(0.0, -1.0, 0.0),
        u_axis=(1.0, 0.0, 0.0),
        v_axis=(0.0, 0.0, 1.0),
        half_u=1.65,
        half_v=2.0,
        material=Material(albedo=0.8, roughness=1.0),
    )


def default_camera(width: int = 320, height: int = 240) -> Camera:
    tilt = math.radians(50.0)
    return Camera(
        position=(1.0, -1.0, 1.65),
        forward=(-math.sin(tilt), math.cos(tilt), 0.0),
        intrinsics=CameraIntrinsics(width=width, height=height),
    )


@dataclass(frozen=True)
class SceneDescription:
    camera: Camera
    middle_wall: WallRect
    objects: tuple
    front_wall: WallRect | None = None
    object_material: Material = Material(albedo=0.8, roughness=1.0)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))

    @property
    def wall_roughness(self) -> float | None:
        if self.front_wall is None or self.front_wall.material.ideal_specular:
            return None
        return self.front_wall.material.roughness

    def with_mirror_wall(self) -> "SceneDescription":
        """Same scene with the front wall set to an ideal mirror."""
        if self.front_wall is None:
            raise ValueError("scene has no front wall")
        wall = replace(self.front_wall, material=Material(albedo=1.0, ideal_specular=True))
        return replace(self, front_wall=wall)


def reflect_point(p, mirror: Plane):
    """Mirror a point (or an (n, 3) batch) across a plane."""
    p = np.asarray(p, dtype=np.float64)
    d = (p - mirror.point) @ mirror.normal
    return p - 2.0 * np.multiply.outer(d, mirror.normal)


def reflect_direction(d, normal):
    """Mirror a direction across a plane with the given unit normal."""
    d = np.asarray(d, dtype=np.float64)
    return d - 2.0 * np.multiply.outer(d @ normal, np.asarray(normal))


def mirror_transform(scene: SceneDescription) -> SceneDescription:
    """Apply the mirror trick: drop the front wall, flip objects across it.

    Camera, middle wall and materials are unchanged; the flipped objects
    are in direct line of sight of the camera.
    """
    if scene.front_wall is None:
        raise ValueError("scene has no front wall to mirror across")
    plane = scene.front_wall.plane
    mirrored = []
    for prim in scene.objects:
        pos = reflect_point(prim.position, plane)
        # The flipped object's local-to-world map is the reflection composed
        # with the original orientation: an improper orthogonal matrix, not
        # expressible as Euler angles.
        rot = prim.rotation_matrix()
        m = np.eye(3) - 2.0 * np.outer(plane.normal, plane.normal)
        mirrored.append(
            MirroredPrimitive(
                kind=prim.kind,
                position=pos,
                rotation_deg=prim.rotation_deg,
                size=prim.size,
                matrix=m @ rot,
            )
        )
    return replace(scene, front_wall=None, objects=tuple(mirrored))


@dataclass(frozen=True)
class MirroredPrimitive(Primitive):
    """Primitive whose orientation is given directly as a matrix.

    Reflection is an improper isometry, so the mirrored orientation is in
    general not reachable by Euler angles alone; the full linear map
    (rotation conjugated by the reflection) is kept instead.  All
    intersection and sampling code goes through ``rotation_matrix``.
    """

    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.float64))

    def rotation_matrix(self) -> np.ndarray:
        return self.matrix


# ---------------------------------------------------------------------------
# Scene sampling
# ---------------------------------------------------------------------------


def _sample_size(kind: str, rng: np.random.Generator) -> tuple:
    """Kind-specific dimensions with bounding-sphere radius <= the cap."""
    rmax = MAX_PRIMITIVE_RADIUS_M
    if kind == "sphere":
        return (rng.uniform(0.10, rmax),)
    if kind == "cube":
        side_max = 2.0 * rmax / math.sqrt(3.0)
        return (rng.uniform(0.15, side_max),)
    if kind == "parallelepiped":
        while True:
            s = rng.uniform(0.10, 0.45, size=3)
            if np.linalg.norm(s) / 2.0 <= rmax:
                return tuple(s)
    if kind in ("cylinder", "cone"):
        while True:
            r = rng.uniform(0.06, 0.25)
            h = rng.uniform(0.15, 0.55)
            if math.hypot(r, h / 2.0) <= rmax:
                return (r, h)
    if kind == "concave_plane":
        while True:
            r = rng.uniform(0.12, 0.28)
            span = rng.uniform(60.0, 150.0)
            h = rng.uniform(0.15, 0.45)
            if math.hypot(r + SHELL_THICKNESS_M, h / 2.0) <= rmax:
                return (r, span, h)
    raise AssertionError(kind)


def _sample_primitive(rng: np.random.Generator) -> Primitive:
    kind = PRIMITIVE_KINDS[rng.integers(len(PRIMITIVE_KINDS))]
    position = [rng.uniform(lo, hi) for lo, hi in OBJECT_POSITION_RANGES]
    rotation = rng.uniform(*OBJECT_ROTATION_RANGE_DEG, size=3)
    return Primitive(kind=kind, position=position, rotation_deg=rotation, size=_sample_size(kind, rng))


def sample_scene(
    seed: int, width: int = 320, height: int = 240, roughness_grid=ROUGHNESS_GRID
) -> SceneDescription:
    """Draw a random corner scene; deterministic for a given seed.

    ``roughness_grid`` restricts the wall-roughness values drawn (useful for
    per-roughness dataset slices); every value must lie on the standard grid.
    """
    if not roughness_grid or any(round(float(r), 2) not in ROUGHNESS_GRID for r in roughness_grid):
        raise ValueError("roughness_grid values must lie on the 0.30..1.00 step-0.05 grid")
    rng = np.random.default_rng(seed)
    roughness = roughness_grid[rng.integers(len(roughness_grid))]
    n_objects = 2 if rng.random() < TWO_PRIMITIVE_PROBABILITY else 1
    objects = tuple(_sample_primitive(rng) for _ in range(n_objects))
    return SceneDescription(
        camera=default_camera(width, height),
        front_wall=default_front_wall(Material(albedo=0.8, roughness=roughness)),
        middle_wall=default_middle_wall(),
        objects=objects,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Rays and intersections
# ---------------------------------------------------------------------------


def camera_ray(camera: Camera, px: int, py: int):
    """Pinhole ray through the pixel center; py = 0 is the top row.

    Returns ``(origin, unit_direction)``.
    """
    intr = camera.intrinsics
    if not (0 <= px < intr.width and 0 <= py < intr.height):
        raise ValueError("pixel index out of range")
    right, up, forward = camera.basis()
    u = (2.0 * (px + 0.5) / intr.width - 1.0) * intr.tan_half_hfov
    v = (1.0 - 2.0 * (py + 0.5) / intr.height) * intr.tan_half_vfov
    return camera.position.copy(), _unit(forward + u * right + v * up)


def camera_ray_grid(camera: Camera):
    """Unit directions for every pixel, shaped (height, width, 3)."""
    intr = camera.intrinsics
    right, up, forward = camera.basis()
    u = (2.0 * (np.arange(intr.width) + 0.5) / intr.width - 1.0) * intr.tan_half_hfov
    v = (1.0 - 2.0 * (np.arange(intr.height) + 0.5) / intr.height) * intr.tan_half_vfov
    d = (
        forward[None, None, :]
        + u[None, :, None] * right[None, None, :]
        + v[:, None, None] * up[None, None, :]
    )
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def intersect_wall_rect(wall: WallRect, origin, direction):
    """Distance to a finite rectangle, or inf on a miss."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    denom = direction @ wall.normal
    if abs(denom) < 1e-12:
        return math.inf
    t = ((wall.center - origin) @ wall.normal) / denom
    if t <= 1e-9:
        return math.inf
    hit = origin + t * direction
    rel = hit - wall.center
    if abs(rel @ wall.u_axis) > wall.half_u or abs(rel @ wall.v_axis) > wall.half_v:
        return math.inf
    return t


def _intersect_sphere_local(o, d, radius):
    b = o @ d
    c = o @ o - radius * radius
    disc = b * b - c
    if disc < 0:
        return math.inf, None
    s = math.sqrt(disc)
    for t in (-b - s, -b + s):
        if t > 1e-9:
            p = o + t * d
            return t, p / radius
    return math.inf, None


def _intersect_box_local(o, d, half):
    tmin, tmax = -math.inf, math.inf
    axis = -1
    for i in range(3):
        if abs(d[i]) < 1e-15:
            if abs(o[i]) > half[i]:
                return math.inf, None
            continue
        t1 = (-half[i] - o[i]) / d[i]
        t2 = (half[i] - o[i]) / d[i]
        lo, hi = min(t1, t2), max(t1, t2)
        if lo > tmin:
            tmin, axis = lo, i
        tmax = min(tmax, hi)
        if tmin > tmax:
            return math.inf, None
    exit_axis = axis
    if tmin > 1e-9:
        t = tmin
    elif tmax > 1e-9:
        t = tmax
        # entering from inside; face normal from the exit point
        exit_axis = None
    else:
        return math.inf, None
    p = o + t * d
    if exit_axis is None:
        exit_axis = int(np.argmax(np.abs(p) / half))
    n = np.zeros(3)
    n[exit_axis] = math.copysign(1.0, p[exit_axis])
    return t, n


def _intersect_cylinder_local(o, d, radius, height):
    hz = height / 2.0
    hits = []
    a = d[0] * d[0] + d[1] * d[1]
    if a > 1e-15:
        b = o[0] * d[0] + o[1] * d[1]
        c = o[0] * o[0] + o[1] * o[1] - radius * radius
        disc = b * b - a * c
        if disc >= 0:
            s = math.sqrt(disc)
            for t in ((-b - s) / a, (-b + s) / a):
                if t > 1e-9:
                    p = o + t * d
                    if abs(p[2]) <= hz:
                        hits.append((t, np.array([p[0] / radius, p[1] / radius, 0.0])))
    for zc, nz in ((hz, 1.0), (-hz, -1.0)):
        if abs(d[2]) > 1e-15:
            t = (zc - o[2]) / d[2]
            if t > 1e-9:
                p = o + t * d
                if p[0] * p[0] + p[1] * p[1] <= radius * radius:
                    hits.append((t, np.array([0.0, 0.0, nz])))
    if not hits:
        return math.inf, None
    return min(hits, key=lambda h: h[0])


def _intersect_cone_local(o, d, radius, height):
    # Base disc of the given radius at z = -h/2, apex at z = +h/2.
    hz = height / 2.0
    k = radius / height
    hits = []
    # Shift so the apex is at the origin pointing down -z.
    oz = o[2] - hz
    a = d[0] * d[0] + d[1] * d[1] - k * k * d[2] * d[2]
    b = o[0] * d[0] + o[1] * d[1] - k * k * oz * d[2]
    c = o[0] * o[0] + o[1] * o[1] - k * k * oz * oz
    if abs(a) > 1e-15:
        disc = b * b - a * c
        if disc >= 0:
            s = math.sqrt(disc)
            for t in ((-b - s) / a, (-b + s) / a):
                if t > 1e-9:
                    p = o + t * d
                    if -hz <= p[2] <= hz:
                        rad = math.hypot(p[0], p[1])
                        if rad > 1e-12:
                            n = np.array([p[0] / rad, p[1] / rad, k])
                            hits.append((t, n / np.linalg.norm(n)))
    if abs(d[2]) > 1e-15:
        t = (-hz - o[2]) / d[2]
        if t > 1e-9:
            p = o + t * d
            if p[0] * p[0] + p[1] * p[1] <= radius * radius:
                hits.append((t, np.array([0.0, 0.0, -1.0])))
    if not hits:
        return math.inf, None
    return min(hits, key=lambda h: h[0])


def _intersect_shell_local(o, d, radius, span_deg, height):
    # Thin cylindrical section: surfaces at radius +- thickness/2, angle
    # about +x within +-span/2, z within +-height/2.  Edge faces ignored.
    half_span = math.radians(span_deg) / 2.0
    hz = height / 2.0
    hits = []
    a = d[0] * d[0] + d[1] * d[1]
    if a < 1e-15:
        return math.inf, None
    for r in (radius - SHELL_THICKNESS_M / 2.0, radius + SHELL_THICKNESS_M / 2.0):
        b = o[0] * d[0] + o[1] * d[1]
        c = o[0] * o[0] + o[1] * o[1] - r * r
        disc = b * b - a * c
        if disc < 0:
            continue
        s = math.sqrt(disc)
        for t in ((-b - s) / a, (-b + s) / a):
            if t > 1e-9:
                p = o + t * d
                if abs(p[2]) <= hz and abs(math.atan2(p[1], p[0])) <= half_span:
                    hits.append((t, np.array([p[0] / r, p[1] / r, 0.0])))
    if not hits:
        return math.inf, None
    return min(hits, key=lambda h: h[0])


def intersect_primitive(prim: Primitive, origin, direction):
    """Nearest positive-t hit: ``(t, normal_world)`` or ``(inf, None)``."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    rot = prim.rotation_matrix()
    o = rot.T @ (origin - prim.position)
    d = rot.T @ direction
    s = prim.size
    if prim.kind == "sphere":
        t, n = _intersect_sphere_local(o, d, s[0])
    elif prim.kind == "cube":
        t, n = _intersect_box_local(o, d, np.full(3, s[0] / 2.0))
    elif prim.kind == "parallelepiped":
        t, n = _intersect_box_local(o, d, np.asarray(s) / 2.0)
    elif prim.kind == "cylinder":
        t, n = _intersect_cylinder_local(o, d, s[0], s[1])
    elif prim.kind == "cone":
        t, n = _intersect_cone_local(o, d, s[0], s[1])
    elif prim.kind == "concave_plane":
        t, n = _intersect_shell_local(o, d, s[0], s[1], s[2])
    else:
        raise AssertionError(prim.kind)
    if n is None:
        return math.inf, None
    return t, rot @ n


@dataclass(frozen=True)
class Hit:
    t: float
    point: np.ndarray
    normal: np.ndarray
    material: Material
    object_id: str


def ray_intersect(scene: SceneDescription, origin, direction) -> Hit | None:
    """Nearest hit over walls and object primitives; None on a miss.

    The returned normal always faces the incoming ray.
    """
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    best_t = math.inf
    best = None
    walls = []
    if scene.front_wall is not None:
        walls.append(("front_wall", scene.front_wall))
    walls.append(("middle_wall", scene.middle_wall))
    for name, wall in walls:
        t = intersect_wall_rect(wall, origin, direction)
        if t < best_t:
            best_t = t
            best = (t, wall.normal, wall.material, name)
    for i, prim in enumerate(scene.objects):
        t, n = intersect_primitive(prim, origin, direction)
        if t < best_t:
            best_t = t
            best = (t, n, scene.object_material, f"object_{i}")
    if best is None:
        return None
    t, n, mat, name = best
    if n @ direction > 0:
        n = -n
    return Hit(t=t, point=origin + t * direction, normal=np.asarray(n), material=mat, object_id=name)


def intersect_objects(scene: SceneDescription, origin, direction):
    """Nearest object-only hit: ``(t, normal, object_index)`` or None."""
    best = None
    for i, prim in enumerate(scene.objects):
        t, n = intersect_primitive(prim, origin, direction)
        if n is not None and (best is None or t < best[0]):
            best = (t, n, i)
    if best is None:
        return None
    t, n, i = best
    if n @ np.asarray(direction) > 0:
        n = -n
    return t, n, i


# ---------------------------------------------------------------------------
# Surface sampling (deterministic, used by the renderer and audits)
# ---------------------------------------------------------------------------


def primitive_surface_samples(prim: Primitive, n_samples: int):
    """Deterministic surface samples: ``(points, normals, areas)``.

    Points are distributed with a Fibonacci-style parametric layout per
    surface patch; areas sum to the primitive's surface area.
    """
    pts, nrm, area = _surface_samples_local(prim.kind, prim.size, n_samples)
    rot = prim.rotation_matrix()
    return pts @ rot.T + prim.position, nrm @ rot.T, area


def _fib_grid(n):
    i = np.arange(n) + 0.5
    return i / n, np.mod(i * 0.6180339887498949, 1.0)


def _surface_samples_local(kind, s, n):
    if kind == "sphere":
        r = s[0]
        u, v = _fib_grid(n)
        z = 1.0 - 2.0 * u
        phi = 2.0 * np.pi * v
        sq = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        nrm = np.stack([sq * np.cos(phi), sq * np.sin(phi), z], axis=1)
        area = np.full(n, 4.0 * np.pi * r * r / n)
        return r * nrm, nrm, area
    if kind in ("cube", "parallelepiped"):
        half = np.full(3, s[0] / 2.0) if kind == "cube" else np.asarray(s) / 2.0
        faces = []
        for axis in range(3):
            for sign in (-1.0, 1.0):
                a = [i for i in range(3) if i != axis]
                faces.append((axis, sign, 4.0 * half[a[0]] * half[a[1]], a))
        total = sum(f[2] for f in faces)
        pts, nrms, areas = [], [], []
        for axis, sign, f_area, a in faces:
            m = max(1, round(n * f_area / total))
            u, v = _fib_grid(m)
            p = np.zeros((m, 3))
            p[:, axis] = sign * half[axis]
            p[:, a[0]] = (2.0 * u - 1.0) * half[a[0]]
            p[:, a[1]] = (2.0 * v - 1.0) * half[a[1]]
            nr = np.zeros((m, 3))
            nr[:, axis] = sign
            pts.append(p)
            nrms.append(nr)
            areas.append(np.full(m, f_area / m))
        return np.concatenate(pts), np.concatenate(nrms), np.concatenate(areas)
    if kind == "cylinder":
        r, h = s
        side_area = 2.0 * np.pi * r * h
        cap_area = np.pi * r * r
        total = side_area + 2.0 * cap_area
        m_side = max(1, round(n * side_area / total))
        m_cap = max(1, round(n * cap_area / total))
        u, v = _fib_grid(m_side)
        phi = 2.0 * np.pi * u
        side = np.stack([r * np.cos(phi), r * np.sin(phi), (v - 0.5) * h], axis=1)
        side_n = np.stack([np.cos(phi), np.sin(phi), np.zeros(m_side)], axis=1)
        pts, nrms, areas = [side], [side_n], [np.full(m_side, side_area / m_side)]
        for sign in (-1.0, 1.0):
            u, v = _fib_grid(m_cap)
            rad = r * np.sqrt(u)
            phi = 2.0 * np.pi * v
            cap = np.stack([rad * np.cos(phi), rad * np.sin(phi), np.full(m_cap, sign * h / 2.0)], axis=1)
            cap_n = np.zeros((m_cap, 3))
            cap_n[:, 2] = sign
            pts.append(cap)
            nrms.append(cap_n)
            areas.append(np.full(m_cap, cap_area / m_cap))
        return np.concatenate(pts), np.concatenate(nrms), np.concatenate(areas)
    if kind == "cone":
        r, h = s
        slant = math.hypot(r, h)
        side_area = np.pi * r * slant
        base_area = np.pi * r * r
        total = side_area + base_area
        m_side = max(1, round(n * side_area / total))
        m_base = max(1, n - m_side)
        u, v = _fib_grid(m_side)
        rad = r * np.sqrt(u)  # area-uniform along the slant
        phi = 2.0 * np.pi * v
        z = h / 2.0 - h * rad / r
        k = r / h
        nr = np.stack([np.cos(phi), np.sin(phi), np.full(m_side, k)], axis=1)
        nr /= np.linalg.norm(nr, axis=1, keepdims=True)
        side = np.stack([rad * np.cos(phi), rad * np.sin(phi), z], axis=1)
        u, v = _fib_grid(m_base)
        rad = r * np.sqrt(u)
        phi = 2.0 * np.pi * v
        base = np.stack([rad * np.cos(phi), rad * np.sin(phi), np.full(m_base, -h / 2.0)], axis=1)
        base_n = np.tile([0.0, 0.0, -1.0], (m_base, 1))
        return (
            np.concatenate([side, base]),
            np.concatenate([nr, base_n]),
            np.concatenate([np.full(m_side, side_area / m_side), np.full(m_base, base_area / m_base)]),
        )
    if kind == "concave_plane":
        r, span_deg, h = s
        half_span = math.radians(span_deg) / 2.0
        face_area = 2.0 * half_span * r * h
        m = max(1, n // 2)
        out = []
        for r_face, sign in ((r + SHELL_THICKNESS_M / 2.0, 1.0), (r - SHELL_THICKNESS_M / 2.0, -1.0)):
            u, v = _fib_grid(m)
            phi = (2.0 * u - 1.0) * half_span
            p = np.stack([r_face * np.cos(phi), r_face * np.sin(phi), (v - 0.5) * h], axis=1)
            nr = np.stack([sign * np.cos(phi), sign * np.sin(phi), np.zeros(m)], axis=1)
            out.append((p, nr, np.full(m, face_area / m)))
        return (
            np.concatenate([o[0] for o in out]),
            np.concatenate([o[1] for o in out]),
            np.concatenate([o[2] for o in out]),
        )
    raise AssertionError(kind)


def scene_surface_samples(scene: SceneDescription, n_per_object: int):
    """Concatenated surface samples over all hidden objects."""
    if not scene.objects:
        return np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0)
    pts, nrms, areas = [], [], []
    for prim in scene.objects:
        p, nr, a = primitive_surface_samples(prim, n_per_object)
        pts.append(p)
        nrms.append(nr)
        areas.append(a)
    return np.concatenate(pts), np.concatenate(nrms), np.concatenate(areas)


# ---------------------------------------------------------------------------
# JSON scene files
# ---------------------------------------------------------------------------


def _wall_to_json(wall: WallRect | None):
    if wall is None:
        return None
    return {
        "center": wall.center.tolist(),
        "normal": wall.normal.tolist(),
        "u_axis": wall.u_axis.tolist(),
        "v_axis": wall.v_axis.tolist(),
        "half_u": wall.half_u,
        "half_v": wall.half_v,
        "material": {
            "albedo": wall.material.albedo,
            "roughness": wall.material.roughness,
            "ideal_specular": wall.material.ideal_specular,
        },
    }


def _wall_from_json(doc):
    if doc is None:
        return None
    m = doc["material"]
    return WallRect(
        center=doc["center"],
        normal=doc["normal"],
        u_axis=doc["u_axis"],
        v_axis=doc["v_axis"],
        half_u=doc["half_u"],
        half_v=doc["half_v"],
        material=Material(albedo=m["albedo"], roughness=m["roughness"], ideal_specular=m["ideal_specular"]),
    )


def scene_to_json(scene: SceneDescription) -> dict:
    return {
        "schema_version": SCENE_SCHEMA_VERSION,
        "camera": {
            "position": scene.camera.position.tolist(),
            "forward": scene.camera.forward.tolist(),
            "up": scene.camera.up.tolist(),
            "width": scene.camera.intrinsics.width,
            "height": scene.camera.intrinsics.height,
            "hfov_deg": scene.camera.intrinsics.hfov_deg,
        },
        "front_wall": _wall_to_json(scene.front_wall),
        "middle_wall": _wall_to_json(scene.middle_wall),
        "objects": [
            {
                "kind": p.kind,
                "position": p.position.tolist(),
                "rotation_deg": p.rotation_deg.tolist(),
                "size": list(p.size),
            }
            for p in scene.objects
        ],
        "object_material": {
            "albedo": scene.object_material.albedo,
            "roughness": scene.object_material.roughness,
        },
        "seed": scene.seed,
    }


def scene_from_json(doc: dict) -> SceneDescription:
    if "schema_version" not in doc:
        raise ValueError("scene document is missing schema_version")
    if doc["schema_version"] != SCENE_SCHEMA_VERSION:
        raise ValueError(f"unsupported scene schema version {doc['schema_version']}")
    cam = doc["camera"]
    camera = Camera(
        position=cam["position"],
        forward=cam["forward"],
        up=cam["up"],
        intrinsics=CameraIntrinsics(width=cam["width"], height=cam["height"], hfov_deg=cam["hfov_deg"]),
    )
    om = doc["object_material"]
    return SceneDescription(
        camera=camera,
        front_wall=_wall_from_json(doc["front_wall"]),
        middle_wall=_wall_from_json(doc["middle_wall"]),
        objects=tuple(
            Primitive(kind=o["kind"], position=o["position"], rotation_deg=o["rotation_deg"], size=o["size"])
            for o in doc["objects"]
        ),
        object_material=Material(albedo=om["albedo"], roughness=om["roughness"]),
        seed=doc.get("seed"),
    )


def save_scene(scene: SceneDescription, path):
    with open(path, "w") as f:
        json.dump(scene_to_json(scene), f, indent=2)


def load_scene(path) -> SceneDescription:
    with open(path) as f:
        return scene_from_json(json.load(f))
