"""Cube-to-cube channel-gain matrix and the ground-truth RSS map.

The dictionary is an N x N matrix of LINEAR power gains: column j holds the
map a unit-power source in cube j would produce. dB is only ever a view for
export; superposing powers happens in linear scale.

Build modes
-----------
full_rt       ray-trace every ordered cube pair, then symmetrize by averaging
sparse_rt_idw ray-trace a seeded anchor subset (diagonal band plus a
              stratified spread per column) and complete the rest by
              inverse-distance-weighted interpolation on dB values, with
              distances measured in matrix-index space:
              d = sqrt((i - gx)^2 + (j - gy)^2)
freespace     distance-law gains only (the model-free baseline dictionary)

The provenance mask records which entries were interpolated.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from . import raytrace as rtm
from .scenario import ScenarioConfig, containing_cube, cube_centers

RAY_TRACED = 0
INTERPOLATED = 1

MODES = ("full_rt", "sparse_rt_idw", "freespace")

_MAGIC = b"SEMDICT1"


class DictionaryError(ValueError):
    """Invalid dictionary construction or container."""


@dataclass
class GainDictionary:
    """N x N linear gains with provenance and build metadata."""

    gains: np.ndarray
    provenance: np.ndarray
    mode: str
    grid_dims: tuple[int, int, int]
    diag_value: float
    rho: float = 1.0
    idw_exponent: float = 2.0
    seed: int = 0
    roi_extent: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=float)
        self.provenance = np.asarray(self.provenance, dtype=np.uint8)
        n = self.gains.shape[0]
        if self.gains.shape != (n, n) or self.provenance.shape != (n, n):
            raise DictionaryError("gains and provenance must be square and equal-shaped")
        if not np.all(np.isfinite(self.gains)) or np.any(self.gains <= 0):
            raise DictionaryError("gains must be finite and strictly positive")
        if self.mode not in MODES:
            raise DictionaryError(f"unknown mode {self.mode!r}")

    @property
    def n(self) -> int:
        return self.gains.shape[0]

    def gains_db(self) -> np.ndarray:
        """Path-loss view in dB (positive numbers for attenuating links)."""
        return -10.0 * np.log10(self.gains)


def _pairwise_block_gains(cfg: ScenarioConfig, rt: rtm.RtParams,
                          centers: np.ndarray, rows: np.ndarray,
                          cols: np.ndarray, block: int = 200_000) -> np.ndarray:
    out = np.empty(len(rows))
    for start in range(0, len(rows), block):
        stop = min(start + block, len(rows))
        out[start:stop] = rtm.pair_gains(
            cfg, rt, centers[rows[start:stop]], centers[cols[start:stop]])
    return out


def _freespace_gain_of_distance(cfg: ScenarioConfig, rt: rtm.RtParams,
                                dist: np.ndarray) -> np.ndarray:
    lam = cfg.wavelength
    d = np.maximum(dist, rt.reference_distance)
    g = (cfg.antenna_gain_tx * cfg.antenna_gain_rx * lam * lam
         / ((4.0 * np.pi) ** 2 * d ** cfg.path_loss_exponent))
    return np.maximum(g, rt.gain_floor)


def _anchor_mask(n: int, rho: float, seed: int) -> np.ndarray:
    """Symmetric anchor layout: the diagonal band plus a stratified spread of
    rows in every column, targeting a fraction rho of all entries."""
    if not 0 < rho <= 1:
        raise DictionaryError(f"rho must be in (0, 1], got {rho}")
    if rho * n * n < n:
        raise DictionaryError("anchor budget below one entry per column")
    rng = np.random.default_rng(seed)
    mask = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    mask[idx, idx] = True
    mask[idx[:-1], idx[:-1] + 1] = True
    mask[idx[:-1] + 1, idx[:-1]] = True
    per_col = max(1, int(round(rho * n)))
    edges = np.linspace(0, n, per_col + 1).astype(int)
    for j in range(n):
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi > lo:
                i = int(rng.integers(lo, hi))
                mask[i, j] = True
                mask[j, i] = True
    return mask


def idw_fill(values_db: np.ndarray, known: np.ndarray, exponent: float,
             block: int = 4096) -> np.ndarray:
    """Complete a matrix by inverse-distance weighting over the known entries.

    Distances are in index space: entry (i, j) is a point on the matrix'
    integer lattice. Every known entry participates in every estimate, so
    the cost is O(missing x anchors); fine for desk-scale grids, minutes
    for a 1000-cube dictionary.
    """
    if exponent <= 0:
        raise DictionaryError(f"IDW exponent must be > 0, got {exponent}")
    out = values_db.copy()
    gi, gj = np.nonzero(known)
    anchors = values_db[gi, gj]
    mi, mj = np.nonzero(~known)
    for start in range(0, len(mi), block):
        stop = min(start + block, len(mi))
        di = mi[start:stop, None] - gi[None, :]
        dj = mj[start:stop, None] - gj[None, :]
        w = (di * di + dj * dj) ** (-exponent / 2.0)
        out[mi[start:stop], mj[start:stop]] = w @ anchors / w.sum(axis=1)
    return out


def idw_fill_cube_metric(cfg: ScenarioConfig, values_db: np.ndarray,
                         known: np.ndarray, exponent: float,
                         block: int = 2048) -> np.ndarray:
    """IDW variant measuring distance between (source cube, target cube)
    pairs in meters instead of matrix indices. Not the default."""
    if exponent <= 0:
        raise DictionaryError(f"IDW exponent must be > 0, got {exponent}")
    centers = cube_centers(cfg)
    out = values_db.copy()
    gi, gj = np.nonzero(known)
    anchors = values_db[gi, gj]
    mi, mj = np.nonzero(~known)
    for start in range(0, len(mi), block):
        stop = min(start + block, len(mi))
        d2 = (np.sum((centers[mi[start:stop], None, :] - centers[None, gi, :]) ** 2, axis=-1)
              + np.sum((centers[mj[start:stop], None, :] - centers[None, gj, :]) ** 2, axis=-1))
        w = d2 ** (-exponent / 2.0)
        out[mi[start:stop], mj[start:stop]] = w @ anchors / w.sum(axis=1)
    return out


def build_dictionary(cfg: ScenarioConfig, rt: rtm.RtParams | None = None,
                     mode: str = "full_rt", rho: float = 1.0,
                     idw_exponent: float = 2.0, seed: int = 0,
                     idw_metric: str = "index") -> GainDictionary:
    """Construct the gain dictionary for a scenario."""
    rt = rt or rtm.RtParams()
    n = cfg.n_cubes
    if n < 2:
        raise DictionaryError("dictionary needs at least two cubes")
    centers = cube_centers(cfg)
    diag = rtm.self_gain(cfg, rt)

    if mode == "freespace":
        diff = centers[:, None, :] - centers[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        gains = _freespace_gain_of_distance(cfg, rt, dist)
        np.fill_diagonal(gains, diag)
        prov = np.full((n, n), RAY_TRACED, dtype=np.uint8)
        return GainDictionary(gains, prov, mode, cfg.grid_dims, diag, seed=seed,
                              roi_extent=cfg.roi_extent)

    if mode == "full_rt" or (mode == "sparse_rt_idw" and rho >= 1.0):
        rows, cols = np.nonzero(~np.eye(n, dtype=bool))
        gains = np.full((n, n), diag)
        gains[rows, cols] = _pairwise_block_gains(cfg, rt, centers, rows, cols)
        gains = 0.5 * (gains + gains.T)
        prov = np.full((n, n), RAY_TRACED, dtype=np.uint8)
        return GainDictionary(gains, prov, "full_rt" if mode == "full_rt" else mode,
                              cfg.grid_dims, diag, rho=min(rho, 1.0),
                              idw_exponent=idw_exponent, seed=seed,
                              roi_extent=cfg.roi_extent)

    if mode != "sparse_rt_idw":
        raise DictionaryError(f"unknown mode {mode!r}")

    known = _anchor_mask(n, rho, seed)
    anchors = np.full((n, n), diag)
    off_diag = known & ~np.eye(n, dtype=bool)
    rows, cols = np.nonzero(np.triu(off_diag))
    traced = _pairwise_block_gains(cfg, rt, centers, rows, cols)
    # unordered pairs are traced once; reciprocity makes the mirror exact
    anchors[rows, cols] = traced
    anchors[cols, rows] = traced
    values_db = -10.0 * np.log10(anchors)
    if idw_metric == "index":
        filled_db = idw_fill(values_db, known, idw_exponent)
    elif idw_metric == "cube":
        filled_db = idw_fill_cube_metric(cfg, values_db, known, idw_exponent)
    else:
        raise DictionaryError(f"unknown idw_metric {idw_metric!r}")
    gains = np.power(10.0, -filled_db / 10.0)
    gains[known] = anchors[known]
    prov = np.where(known, RAY_TRACED, INTERPOLATED).astype(np.uint8)
    return GainDictionary(gains, prov, mode, cfg.grid_dims, diag,
                          rho=rho, idw_exponent=idw_exponent, seed=seed,
                          roi_extent=cfg.roi_extent)


def ground_truth_map(cfg: ScenarioConfig, rt: rtm.RtParams | None = None) -> np.ndarray:
    """True RSS (watts) in every cube from the exact transmitter positions.

    Transmitters keep their continuous coordinates; only the receiving side
    is cube-granular, so this is the full-ray-trace map the sparse model
    X = gains @ omega approximates. The cube containing a transmitter takes
    the reference self-gain (the near field diverges at the source, so the
    center-point sample is meaningless there and the cube-granular model
    pins that entry by convention).
    """
    rt = rt or rtm.RtParams()
    centers = cube_centers(cfg)
    x_true = np.zeros(cfg.n_cubes)
    own_gain = rtm.self_gain(cfg, rt)
    for tx in cfg.transmitters:
        g = rtm.gains_from_point(cfg, rt, tx.position, centers)
        g[containing_cube(cfg, tx.position)] = own_gain
        x_true += tx.power_watts * g
    return x_true


def save_dictionary(d: GainDictionary, path) -> None:
    """Binary container: magic, header struct, row-major float64 gains,
    packed provenance bits."""
    header = struct.pack(
        "<q3qB3d3dq", d.n, *d.grid_dims, MODES.index(d.mode),
        d.rho, d.idw_exponent, d.diag_value, *d.roi_extent, d.seed)
    packed = np.packbits(d.provenance.astype(bool).ravel())
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(header)
        fh.write(d.gains.astype("<f8").tobytes())
        fh.write(packed.tobytes())


def load_dictionary(path) -> GainDictionary:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:len(_MAGIC)] != _MAGIC:
        raise DictionaryError(f"{path}: not a dictionary container")
    offset = len(_MAGIC)
    fmt = "<q3qB3d3dq"
    (n, gx, gy, gz, mode_idx, rho, idw_p, diag,
     ex, ey, ez, seed) = struct.unpack_from(fmt, blob, offset)
    offset += struct.calcsize(fmt)
    count = n * n
    gains = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(n, n)
    offset += count * 8
    packed = np.frombuffer(blob, dtype=np.uint8, offset=offset)
    prov = np.unpackbits(packed, count=count).reshape(n, n).astype(np.uint8)
    return GainDictionary(gains.copy(), prov, MODES[mode_idx], (gx, gy, gz),
                          diag, rho=rho, idw_exponent=idw_p, seed=seed,
                          roi_extent=(ex, ey, ez))


def export_gains_db_csv(d: GainDictionary, path) -> None:
    """Inspection export: one `i,j,gain_db` row per entry."""
    db = d.gains_db()
    buf = io.StringIO()
    buf.write("i,j,gain_db\n")
    for i in range(d.n):
        row = db[i]
        for j in range(d.n):
            buf.write(f"{i},{j},{row[j]:.6f}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())
