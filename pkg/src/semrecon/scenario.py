"""Region of interest, grid discretization, transmitters and free-space truth.

The region is a box of ``roi_extent`` meters split into ``grid_dims`` cubes.
A cube is addressed either by grid coordinates (ix, iy, iz) or by its linear
index ``n = ix + Nx * (iy + Ny * iz)`` (x fastest); that ordering is the one
fixed contract every file format and matrix in this package relies on.

All quantities are SI: meters, watts, hertz. Antenna gains are linear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0


class ScenarioError(ValueError):
    """A scenario violates one of its declared invariants."""


@dataclass(frozen=True)
class AxisAlignedBox:
    """Axis-aligned building volume, corners in meters."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        lo, hi = self.min_corner, self.max_corner
        if len(lo) != 3 or len(hi) != 3:
            raise ScenarioError("box corners must be 3D")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ScenarioError(f"box min_corner must be < max_corner, got {lo} / {hi}")

    def contains(self, point) -> bool:
        return all(lo <= p <= hi for lo, p, hi in zip(self.min_corner, point, self.max_corner))


@dataclass(frozen=True)
class Transmitter:
    """RF source at an exact (not grid-snapped) position."""

    position: tuple[float, float, float]
    power_watts: float

    def __post_init__(self):
        if len(self.position) != 3:
            raise ScenarioError("transmitter position must be 3D")
        if not self.power_watts > 0:
            raise ScenarioError(f"transmitter power must be > 0, got {self.power_watts}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of a reconstruction scenario.

    noise_variance is the measurement-noise variance in watts^2 (0 = noiseless).
    """

    roi_extent: tuple[float, float, float]
    grid_dims: tuple[int, int, int]
    buildings: tuple[AxisAlignedBox, ...] = ()
    transmitters: tuple[Transmitter, ...] = ()
    frequency_hz: float = 1e9
    noise_variance: float = 0.0
    antenna_gain_tx: float = 1.0
    antenna_gain_rx: float = 1.0
    path_loss_exponent: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "buildings", tuple(self.buildings))
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        if len(self.roi_extent) != 3 or len(self.grid_dims) != 3:
            raise ScenarioError("roi_extent and grid_dims must be 3D")
        if not all(e > 0 for e in self.roi_extent):
            raise ScenarioError(f"roi_extent must be positive, got {self.roi_extent}")
        if not all(isinstance(d, (int, np.integer)) and d >= 1 for d in self.grid_dims):
            raise ScenarioError(f"grid_dims must be integers >= 1, got {self.grid_dims}")
        if not self.frequency_hz > 0:
            raise ScenarioError("frequency_hz must be > 0")
        if self.noise_variance < 0:
            raise ScenarioError("noise_variance must be >= 0")
        if self.path_loss_exponent < 1:
            raise ScenarioError("path_loss_exponent must be >= 1")
        if self.antenna_gain_tx <= 0 or self.antenna_gain_rx <= 0:
            raise ScenarioError("antenna gains must be > 0")
        for box in self.buildings:
            if not all(0 <= lo and hi <= e for lo, hi, e in
                       zip(box.min_corner, box.max_corner, self.roi_extent)):
                raise ScenarioError(f"building {box} extends outside the ROI")
        for tx in self.transmitters:
            if not all(0 <= p <= e for p, e in zip(tx.position, self.roi_extent)):
                raise ScenarioError(f"transmitter at {tx.position} is outside the ROI")

    @property
    def n_cubes(self) -> int:
        nx, ny, nz = self.grid_dims
        return nx * ny * nz

    @property
    def cell_size(self) -> tuple[float, float, float]:
        return tuple(e / d for e, d in zip(self.roi_extent, self.grid_dims))

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz


def linear_index(cfg: ScenarioConfig, ix: int, iy: int, iz: int) -> int:
    """Grid coordinates -> linear cube index (x fastest)."""
    nx, ny, nz = cfg.grid_dims
    if not (0 <= ix < nx and 0 <= iy < ny and 0 <= iz < nz):
        raise ScenarioError(f"grid coordinates ({ix}, {iy}, {iz}) out of range {cfg.grid_dims}")
    return ix + nx * (iy + ny * iz)


def grid_coords(cfg: ScenarioConfig, n: int) -> tuple[int, int, int]:
    """Linear cube index -> grid coordinates."""
    nx, ny, nz = cfg.grid_dims
    if not 0 <= n < cfg.n_cubes:
        raise ScenarioError(f"cube index {n} out of range [0, {cfg.n_cubes})")
    ix = n % nx
    iy = (n // nx) % ny
    iz = n // (nx * ny)
    return ix, iy, iz


def cube_center(cfg: ScenarioConfig, n: int) -> np.ndarray:
    """Center position (meters) of cube n."""
    ix, iy, iz = grid_coords(cfg, n)
    dx, dy, dz = cfg.cell_size
    return np.array([(ix + 0.5) * dx, (iy + 0.5) * dy, (iz + 0.5) * dz])


def cube_centers(cfg: ScenarioConfig) -> np.ndarray:
    """(N, 3) array of all cube centers, ordered by linear index."""
    nx, ny, nz = cfg.grid_dims
    dx, dy, dz = cfg.cell_size
    ix = np.arange(nx)
    iy = np.arange(ny)
    iz = np.arange(nz)
    # index order: x fastest, then y, then z
    gx, gy, gz = np.meshgrid(ix, iy, iz, indexing="ij")
    order = gx + nx * (gy + ny * gz)
    centers = np.empty((cfg.n_cubes, 3))
    centers[order.ravel(), 0] = ((gx + 0.5) * dx).ravel()
    centers[order.ravel(), 1] = ((gy + 0.5) * dy).ravel()
    centers[order.ravel(), 2] = ((gz + 0.5) * dz).ravel()
    return centers


def containing_cube(cfg: ScenarioConfig, position) -> int:
    """Linear index of the cube containing a position.

    Cells are half-open [min, max) along each axis; a point on the ROI's
    outer max face is assigned to the last cube so every in-ROI point has
    a home.
    """
    dims = cfg.grid_dims
    cell = cfg.cell_size
    idx = []
    for p, e, d, c in zip(position, cfg.roi_extent, dims, cell):
        if not 0 <= p <= e:
            raise ScenarioError(f"position {tuple(position)} is outside the ROI")
        idx.append(min(int(math.floor(p / c)), d - 1))
    return linear_index(cfg, *idx)


def sparse_truth(cfg: ScenarioConfig) -> np.ndarray:
    """Length-N vector of transmitter powers, summed per containing cube.

    Co-located transmitters add; total power is conserved.
    """
    omega = np.zeros(cfg.n_cubes)
    for tx in cfg.transmitters:
        omega[containing_cube(cfg, tx.position)] += tx.power_watts
    return omega


def euclidean_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def free_space_rss(cfg: ScenarioConfig, distance_m: float, power_watts: float) -> float:
    """Free-space received power: Gt * Gr * lambda^2 * P / ((4 pi)^2 * d^eta).

    Raises on d <= 0; callers that can hit d ~ 0 must clamp to a reference
    distance first (the dictionary builder does).
    """
    if distance_m <= 0:
        raise ScenarioError(f"free-space model requires d > 0, got {distance_m}")
    lam = cfg.wavelength
    num = cfg.antenna_gain_tx * cfg.antenna_gain_rx * lam * lam * power_watts
    return num / ((4.0 * math.pi) ** 2 * distance_m ** cfg.path_loss_exponent)


def total_rss_at(cfg: ScenarioConfig, position) -> float:
    """Sum of free-space contributions from every transmitter at a position."""
    total = 0.0
    for tx in cfg.transmitters:
        d = euclidean_distance(tx.position, position)
        if d == 0:
            raise ScenarioError(f"position coincides with transmitter at {tx.position}")
        total += free_space_rss(cfg, d, tx.power_watts)
    return total


# Default synthetic scene: a 100 m x 100 m x 50 m block on a 10 x 10 x 10 grid
# (10 m x 10 m x 5 m cells) with 1 GHz carrier and 2 W sources, plus a handful
# of box buildings so ray-traced and free-space gains genuinely differ.
DEFAULT_BUILDINGS = (
    AxisAlignedBox((10.0, 10.0, 0.0), (30.0, 30.0, 20.0)),
    AxisAlignedBox((60.0, 10.0, 0.0), (80.0, 30.0, 25.0)),
    AxisAlignedBox((10.0, 60.0, 0.0), (30.0, 80.0, 15.0)),
    AxisAlignedBox((50.0, 50.0, 0.0), (70.0, 80.0, 30.0)),
    AxisAlignedBox((40.0, 40.0, 0.0), (50.0, 50.0, 10.0)),
)


def random_transmitters(cfg: ScenarioConfig, k: int, seed: int,
                        power_watts: float = 2.0) -> tuple[Transmitter, ...]:
    """k transmitters in distinct cubes, uniform over cubes outside buildings.

    Drawing cubes without replacement keeps the support size exactly k; the
    exact position is uniform inside the chosen cube.
    """
    rng = np.random.default_rng(seed)
    centers = cube_centers(cfg)
    cell = np.array(cfg.cell_size)
    inside = np.zeros(cfg.n_cubes, dtype=bool)
    for box in cfg.buildings:
        lo = np.array(box.min_corner)
        hi = np.array(box.max_corner)
        inside |= np.all((centers >= lo) & (centers <= hi), axis=1)
    candidates = np.flatnonzero(~inside)
    if len(candidates) < k:
        raise ScenarioError(f"not enough open cubes for {k} transmitters")
    chosen = rng.choice(candidates, size=k, replace=False)
    txs = []
    for n in chosen:
        pos = centers[n] + (rng.random(3) - 0.5) * cell
        txs.append(Transmitter(tuple(pos), power_watts))
    return tuple(txs)


def default_scenario(k: int = 4, seed: int = 0, noise_variance: float = 1e-16,
                     with_buildings: bool = True) -> ScenarioConfig:
    """The bundled benchmark scene with k randomly placed 2 W transmitters."""
    base = ScenarioConfig(
        roi_extent=(100.0, 100.0, 50.0),
        grid_dims=(10, 10, 10),
        buildings=DEFAULT_BUILDINGS if with_buildings else (),
        frequency_hz=1e9,
        noise_variance=noise_variance,
    )
    txs = random_transmitters(base, k, seed)
    return ScenarioConfig(
        roi_extent=base.roi_extent,
        grid_dims=base.grid_dims,
        buildings=base.buildings,
        transmitters=txs,
        frequency_hz=base.frequency_hz,
        noise_variance=noise_variance,
    )
