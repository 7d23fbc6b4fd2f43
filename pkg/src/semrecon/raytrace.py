"""Lightweight ray tracing between points in a box scene.

Three ray families are traced: the direct path, single specular reflections
off building faces and (optionally) the ground plane via the image method,
and single diffractions around vertical building edges. Fields are complex
amplitudes relative to the field at 1 m from the source:

    direct       E = exp(-j l d) / d
    reflection   E = R * exp(-j l (d1 + d2)) / (d1 + d2)
    diffraction  E = D * sqrt(1 / (d1 d2 (d1 + d2))) * exp(-j l (d1 + d2))

with l = 2 pi / lambda the wave number. The received power follows as
G_t * G_r * (lambda / 4 pi)^2 * |sum E|^2, which collapses to the free-space
model when only the direct ray exists.

Everything here is pure; a vectorized batch API (`pair_gains`) evaluates many
point pairs at once and must agree with the scalar `channel_gain` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioConfig

# Parameter-space margin used to ignore segment endpoints in occlusion tests;
# path endpoints sit exactly on reflecting faces / diffracting edges.
_SEG_EPS = 1e-9

GAIN_FLOOR = 1e-15


class RayTraceError(ValueError):
    """Invalid ray-tracing request (e.g. coincident endpoints)."""


@dataclass(frozen=True)
class RtParams:
    """Knobs of the ray tracer.

    Reflection/diffraction coefficients are constant complex scalars, not
    material models. Spreading distances are clamped below by
    reference_distance so gains stay finite arbitrarily close to a source.
    """

    reflection_coeff: complex = 0.6 * complex(math.cos(math.pi), math.sin(math.pi))
    diffraction_coeff: complex = 0.1 + 0.0j
    max_reflections: int = 1
    max_diffractions: int = 1
    reference_distance: float = 1.0
    ground_reflection: bool = False
    gain_floor: float = GAIN_FLOOR

    def __post_init__(self):
        if abs(self.reflection_coeff) > 1 + 1e-12:
            raise RayTraceError("|reflection_coeff| must be <= 1")
        if abs(self.diffraction_coeff) > 1 + 1e-12:
            raise RayTraceError("|diffraction_coeff| must be <= 1")
        if self.reference_distance <= 0:
            raise RayTraceError("reference_distance must be > 0")


@dataclass(frozen=True)
class RayContribution:
    """One traced ray: kind is 'los', 'reflection' or 'diffraction'."""

    kind: str
    path_nodes: tuple
    path_length: float
    complex_field: complex


def _box_arrays(cfg: ScenarioConfig):
    if not cfg.buildings:
        return np.zeros((0, 3)), np.zeros((0, 3))
    lo = np.array([b.min_corner for b in cfg.buildings], dtype=float)
    hi = np.array([b.max_corner for b in cfg.buildings], dtype=float)
    return lo, hi


def segments_blocked(box_lo: np.ndarray, box_hi: np.ndarray,
                     p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """True where the open segment p->q passes through any box.

    Slab intersection, vectorized over an arbitrary leading shape of p/q.
    Endpoints are excluded (a path may touch a face or edge it interacts
    with), so grazing contact at t=0 or t=1 does not count as blocked.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    blocked = np.zeros(p.shape[:-1], dtype=bool)
    d = q - p
    for lo, hi in zip(box_lo, box_hi):
        tmin = np.full(p.shape[:-1], -np.inf)
        tmax = np.full(p.shape[:-1], np.inf)
        miss = np.zeros(p.shape[:-1], dtype=bool)
        for ax in range(3):
            da = d[..., ax]
            pa = p[..., ax]
            parallel = da == 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (lo[ax] - pa) / da
                t2 = (hi[ax] - pa) / da
            t_lo = np.minimum(t1, t2)
            t_hi = np.maximum(t1, t2)
            inside = (pa >= lo[ax]) & (pa <= hi[ax])
            miss |= parallel & ~inside
            t_lo = np.where(parallel, -np.inf, t_lo)
            t_hi = np.where(parallel, np.inf, t_hi)
            tmin = np.maximum(tmin, t_lo)
            tmax = np.minimum(tmax, t_hi)
        hit = (~miss) & (tmax >= tmin) & (tmin <= 1.0 - _SEG_EPS) & (tmax >= _SEG_EPS)
        # a degenerate touch (tmin == tmax at an endpoint) was already
        # excluded by the open-interval bounds above
        blocked |= hit
    return blocked


def _pair_fields(cfg: ScenarioConfig, rt: RtParams,
                 src: np.ndarray, dst: np.ndarray,
                 collect: list | None = None) -> np.ndarray:
    """Complex field at dst for each src->dst pair, shape (P,).

    When `collect` is a list (scalar use only, P == 1), every surviving ray
    is appended to it as a RayContribution.
    """
    src = np.atleast_2d(np.asarray(src, dtype=float))
    dst = np.atleast_2d(np.asarray(dst, dtype=float))
    box_lo, box_hi = _box_arrays(cfg)
    wave_number = 2.0 * math.pi / cfg.wavelength
    d_ref = rt.reference_distance
    field = np.zeros(src.shape[0], dtype=complex)

    # direct ray
    d_los = np.linalg.norm(dst - src, axis=-1)
    visible = ~segments_blocked(box_lo, box_hi, src, dst)
    spread = np.maximum(d_los, d_ref)
    e_los = np.where(visible, np.exp(-1j * wave_number * spread) / spread, 0.0)
    field += e_los
    if collect is not None and visible[0]:
        collect.append(RayContribution(
            "los", (tuple(src[0]), tuple(dst[0])), float(d_los[0]), complex(e_los[0])))

    # reflections: every building face, plus the ground plane if enabled.
    # Faces are (axis, plane offset, outward sign, owning box or None).
    faces = []
    for lo, hi in zip(box_lo, box_hi):
        for ax in range(3):
            faces.append((ax, lo[ax], -1.0, (lo, hi)))
            faces.append((ax, hi[ax], +1.0, (lo, hi)))
    if rt.ground_reflection:
        faces.append((2, 0.0, +1.0, None))

    if rt.max_reflections >= 1 and abs(rt.reflection_coeff) > 0:
        for ax, offset, sign, owner in faces:
            s_side = sign * (src[:, ax] - offset)
            d_side = sign * (dst[:, ax] - offset)
            ok = (s_side > 0) & (d_side > 0)
            if not ok.any():
                continue
            mirrored = src.copy()
            mirrored[:, ax] = 2.0 * offset - src[:, ax]
            seg = dst - mirrored
            denom = seg[:, ax]
            safe = denom != 0
            t = np.where(safe, (offset - mirrored[:, ax]) / np.where(safe, denom, 1.0), -1.0)
            ok &= safe & (t > 0) & (t < 1)
            h = mirrored + t[:, None] * seg
            if owner is not None:
                lo, hi = owner
                for a2 in range(3):
                    if a2 == ax:
                        continue
                    ok &= (h[:, a2] >= lo[a2]) & (h[:, a2] <= hi[a2])
            if not ok.any():
                continue
            ok &= ~segments_blocked(box_lo, box_hi, src, h)
            ok &= ~segments_blocked(box_lo, box_hi, h, dst)
            length = np.linalg.norm(seg, axis=-1)
            spread = np.maximum(length, d_ref)
            e_ref = np.where(
                ok, rt.reflection_coeff * np.exp(-1j * wave_number * spread) / spread, 0.0)
            field += e_ref
            if collect is not None and ok[0]:
                d1 = float(np.linalg.norm(h[0] - src[0]))
                d2 = float(np.linalg.norm(dst[0] - h[0]))
                collect.append(RayContribution(
                    "reflection", (tuple(src[0]), tuple(h[0]), tuple(dst[0])),
                    d1 + d2, complex(e_ref[0])))

    # diffractions around vertical box edges
    if rt.max_diffractions >= 1 and abs(rt.diffraction_coeff) > 0:
        for lo, hi in zip(box_lo, box_hi):
            corners = [(lo[0], lo[1]), (lo[0], hi[1]), (hi[0], lo[1]), (hi[0], hi[1])]
            for ex, ey in corners:
                a = np.hypot(src[:, 0] - ex, src[:, 1] - ey)
                b = np.hypot(dst[:, 0] - ex, dst[:, 1] - ey)
                ok = (a > 0) & (b > 0)
                if not ok.any():
                    continue
                with np.errstate(divide="ignore", invalid="ignore"):
                    z_star = (b * src[:, 2] + a * dst[:, 2]) / (a + b)
                z_star = np.clip(z_star, lo[2], hi[2])
                h = np.empty_like(src)
                h[:, 0] = ex
                h[:, 1] = ey
                h[:, 2] = z_star
                ok &= ~segments_blocked(box_lo, box_hi, src, h)
                ok &= ~segments_blocked(box_lo, box_hi, h, dst)
                if not ok.any():
                    continue
                d1 = np.maximum(np.linalg.norm(h - src, axis=-1), d_ref * 1e-6)
                d2 = np.maximum(np.linalg.norm(dst - h, axis=-1), d_ref * 1e-6)
                amp = np.sqrt(1.0 / (d1 * d2 * (d1 + d2)))
                e_dif = np.where(
                    ok,
                    rt.diffraction_coeff * amp * np.exp(-1j * wave_number * (d1 + d2)),
                    0.0)
                field += e_dif
                if collect is not None and ok[0]:
                    collect.append(RayContribution(
                        "diffraction", (tuple(src[0]), tuple(h[0]), tuple(dst[0])),
                        float(d1[0] + d2[0]), complex(e_dif[0])))

    return field


def trace_paths(cfg: ScenarioConfig, rt: RtParams, m, n) -> list[RayContribution]:
    """All surviving rays from m to n."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.array_equal(m, n):
        raise RayTraceError("ray tracing requires distinct endpoints")
    rays: list[RayContribution] = []
    _pair_fields(cfg, rt, m[None, :], n[None, :], collect=rays)
    return rays


def field_superposition(contributions) -> complex:
    """Coherent (complex) sum of ray fields; empty input sums to zero."""
    return complex(sum((c.complex_field for c in contributions), 0j))


def _field_to_gain(cfg: ScenarioConfig, rt: RtParams, field: np.ndarray) -> np.ndarray:
    scale = cfg.antenna_gain_tx * cfg.antenna_gain_rx * (cfg.wavelength / (4.0 * math.pi)) ** 2
    return np.maximum(scale * np.abs(field) ** 2, rt.gain_floor)


def channel_gain(cfg: ScenarioConfig, rt: RtParams, m, n) -> float:
    """Linear power gain between two distinct points, floored at gain_floor."""
    rays = trace_paths(cfg, rt, m, n)
    field = field_superposition(rays)
    return float(_field_to_gain(cfg, rt, np.array([field]))[0])


def pair_gains(cfg: ScenarioConfig, rt: RtParams,
               src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Vectorized linear gains for paired pointsets of shape (P, 3)."""
    field = _pair_fields(cfg, rt, src, dst)
    return _field_to_gain(cfg, rt, field)


def gains_from_point(cfg: ScenarioConfig, rt: RtParams, source,
                     targets: np.ndarray, block: int = 250_000) -> np.ndarray:
    """Gains from one source position to many targets, evaluated in blocks."""
    targets = np.asarray(targets, dtype=float)
    out = np.empty(len(targets))
    src = np.asarray(source, dtype=float)[None, :]
    for start in range(0, len(targets), block):
        stop = min(start + block, len(targets))
        chunk = targets[start:stop]
        out[start:stop] = pair_gains(cfg, rt, np.broadcast_to(src, chunk.shape), chunk)
    return out


def self_gain(cfg: ScenarioConfig, rt: RtParams) -> float:
    """Gain a cube assigns to itself: the free-space gain at the reference
    distance, where a source dominates its own cube."""
    lam = cfg.wavelength
    return (cfg.antenna_gain_tx * cfg.antenna_gain_rx * lam * lam
            / ((4.0 * math.pi) ** 2 * rt.reference_distance ** cfg.path_loss_exponent))
