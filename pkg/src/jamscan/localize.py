"""Directional-scan fusion: radiation pattern, heatmap accumulation, source extraction.

Each hover scan contributes per-heading band energies measured at a known
position.  Scans are fused on a planar grid by accumulating, for every cell,
the antenna gain evaluated at the angle between each scan heading and the
bearing from the scan position to the cell.  The resulting normalized heatmap
peaks where the directional evidence from all scans intersects.

The model is strictly 2-D: altitude and the scanning antenna's small
downward tilt are not modeled, which adds a minor systematic range bias on
real platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateGeometryError, InputError


def wrap_angle(a):
    """Wrap angles to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


@dataclass
class RadiationPattern:
    """Normalized antenna gain versus off-boresight angle.

    gain(0) = 1 and the pattern is symmetric, defined on all of [-pi, pi].
    Parametric form: cosine-power main lobe clamped to ``backlobe_floor``
    behind the half plane.  A tabulated pattern (angle, gain samples) can
    replace the parametric lobe via :meth:`from_table`.
    """

    beamwidth_rad: float
    backlobe_floor: float
    _table_angles: np.ndarray | None = field(default=None, repr=False)
    _table_gains: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 < self.beamwidth_rad < np.pi:
            raise ConfigurationError(
                f"beamwidth must be in (0, pi), got {self.beamwidth_rad}"
            )
        if not 0.0 <= self.backlobe_floor < 1.0:
            raise ConfigurationError(
                f"backlobe floor must be in [0, 1), got {self.backlobe_floor}"
            )

    @classmethod
    def from_table(cls, angles_rad, gains, backlobe_floor: float = 0.0):
        """Build a pattern from tabulated (angle, gain) samples.

        The table is symmetrized about zero, normalized so gain(0) = 1, and
        linearly interpolated in between.
        """
        angles = np.abs(np.asarray(angles_rad, dtype=float))
        gains = np.asarray(gains, dtype=float)
        if angles.shape != gains.shape or angles.size < 2:
            raise ConfigurationError("pattern table needs >= 2 (angle, gain) pairs")
        order = np.argsort(angles)
        angles, gains = angles[order], gains[order]
        if angles[0] > 1e-9:
            angles = np.concatenate([[0.0], angles])
            gains = np.concatenate([[gains[0]], gains])
        peak = gains.max()
        if peak <= 0:
            raise ConfigurationError("pattern table has no positive gain")
        gains = gains / peak
        half = np.interp(0.5, gains[::-1], angles[::-1]) * 2.0
        beamwidth = float(np.clip(half, 1e-6, np.pi - 1e-6))
        pat = cls(beamwidth_rad=beamwidth, backlobe_floor=backlobe_floor)
        pat._table_angles = angles
        pat._table_gains = gains
        return pat

    def gain(self, dpsi):
        """Evaluate the normalized gain at relative bearing ``dpsi`` (rad)."""
        a = np.abs(wrap_angle(dpsi))
        if self._table_angles is not None:
            g = np.interp(a, self._table_angles, self._table_gains,
                          right=self._table_gains[-1])
        else:
            # cosine-power lobe: exponent solves cos(bw/2)^k = 0.5
            k = np.log(0.5) / np.log(np.cos(self.beamwidth_rad / 2.0))
            c = np.cos(a)
            g = np.where(c > 0.0, np.power(np.maximum(c, 1e-300), k), 0.0)
        return np.maximum(g, self.backlobe_floor)


def make_pattern(beamwidth_rad: float, backlobe_floor: float = 0.0) -> RadiationPattern:
    """Parametric main-lobe pattern with gain 0.5 at half the beamwidth."""
    return RadiationPattern(beamwidth_rad=beamwidth_rad, backlobe_floor=backlobe_floor)


@dataclass
class ScanPose:
    """One hover scan: position, headings, and per-heading band energies.

    ``weight`` optionally masks headings (1 = detection at that heading,
    0 = exclude from fusion).
    """

    position: tuple[float, float]
    headings: np.ndarray
    energies: np.ndarray
    weight: np.ndarray | None = None

    def __post_init__(self):
        self.headings = np.asarray(self.headings, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.headings.shape != self.energies.shape:
            raise InputError("headings and energies must have equal length")
        if np.any(self.energies < 0):
            raise InputError("energies must be non-negative")
        if self.weight is not None:
            self.weight = np.asarray(self.weight, dtype=float)
            if self.weight.shape != self.headings.shape:
                raise InputError("weight mask must match headings length")


@dataclass
class GridSpec:
    """Planar accumulation grid: ``origin`` is the lower-left cell corner."""

    origin: tuple[float, float] = (-1500.0, -1500.0)
    cell_size: float = 10.0
    nx: int = 300
    ny: int = 300

    def __post_init__(self):
        if self.cell_size <= 0 or self.nx < 1 or self.ny < 1:
            raise ConfigurationError("grid needs positive cell size and dims")

    def cell_centers(self):
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.cell_size
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.cell_size
        return np.meshgrid(x, y, indexing="xy")


@dataclass
class Heatmap:
    """Finalized transmitter-likelihood grid (accumulated / number of scans)."""

    grid: np.ndarray
    origin: tuple[float, float]
    cell_size: float
    scans_accumulated: int

    def cell_centers(self):
        ny, nx = self.grid.shape
        x = self.origin[0] + (np.arange(nx) + 0.5) * self.cell_size
        y = self.origin[1] + (np.arange(ny) + 0.5) * self.cell_size
        return np.meshgrid(x, y, indexing="xy")


@dataclass
class SourceEstimate:
    """Extracted transmitter location with containment contour."""

    centroid: tuple[float, float]
    peak_cell: tuple[float, float]
    contour: np.ndarray
    confidence: float


def bearing(from_xy, to_x, to_y):
    """North-referenced, clockwise-positive bearing from a point to cells.

    Coincident points get bearing 0 by convention.
    """
    dx = to_x - from_xy[0]
    dy = to_y - from_xy[1]
    return np.arctan2(dx, dy)


def fuse_scans(
    poses: list[ScanPose],
    pattern: RadiationPattern,
    grid: GridSpec,
    weighted: bool = True,
    normalize_scans: bool = True,
) -> Heatmap:
    """Fuse directional scans into a transmitter-likelihood heatmap.

    For every cell the relative bearing of each scan heading is evaluated
    against the bearing from the scan position to the cell; the pattern gain
    at that angle, weighted by the measured heading energy (default) or taken
    bare (``weighted=False``), accumulates into the cell.  The final grid is
    the accumulation divided by the number of scans.

    Parameters
    ----------
    poses : scans with per-heading energies; a ``weight`` mask on a pose
        zeroes the contribution of masked-out headings.
    weighted : scale each heading's gain by its measured energy.
    normalize_scans : rescale each scan's energy vector to unit maximum so
        near and far scans contribute comparably.
    """
    if not poses:
        raise InputError("at least one scan pose is required")
    gx, gy = grid.cell_centers()
    hm = np.zeros_like(gx)
    for pose in poses:
        energies = pose.energies.copy()
        if pose.weight is not None:
            energies = energies * (pose.weight > 0)
        if normalize_scans and energies.max() > 0:
            energies = energies / energies.max()
        cell_bearing = bearing(pose.position, gx, gy)
        for psi, e in zip(pose.headings, energies):
            if weighted:
                if e == 0.0:
                    continue
                hm += e * pattern.gain(psi - cell_bearing)
            elif e > 0.0:
                hm += pattern.gain(psi - cell_bearing)
    hm /= len(poses)
    return Heatmap(grid=hm, origin=grid.origin, cell_size=grid.cell_size,
                   scans_accumulated=len(poses))


def extract_source(heatmap: Heatmap, quantile: float = 0.97) -> SourceEstimate | None:
    """Locate the transmitter from a finalized heatmap.

    The map is min-max rescaled to [0, 1]; cells at or above ``quantile``
    form the containment region.  The centroid is the likelihood-weighted
    mean of that region, the peak cell is the grid argmax (ties resolved to
    the lowest index), and the contour is the region boundary ordered by
    angle around the centroid.  Returns None when the map carries no signal.
    """
    if not 0.0 < quantile < 1.0:
        raise ConfigurationError(f"quantile must be in (0, 1), got {quantile}")
    g = heatmap.grid
    span = g.max() - g.min()
    if g.max() <= 0.0 or span <= 0.0:
        return None
    r = (g - g.min()) / span
    gx, gy = heatmap.cell_centers()

    flat_peak = int(np.argmax(g))
    py, px = np.unravel_index(flat_peak, g.shape)
    peak_cell = (float(gx[py, px]), float(gy[py, px]))

    mask = r >= quantile
    w = r[mask]
    cx = float((gx[mask] * w).sum() / w.sum())
    cy = float((gy[mask] * w).sum() / w.sum())

    contour = _region_boundary(mask, gx, gy, (cx, cy))
    confidence = float(g[mask].sum() / g.sum())
    return SourceEstimate(centroid=(cx, cy), peak_cell=peak_cell,
                          contour=contour, confidence=confidence)


def _region_boundary(mask, gx, gy, center):
    """Boundary cell centers of a region, ordered by angle around ``center``."""
    interior = (
        np.roll(mask, 1, 0) & np.roll(mask, -1, 0)
        & np.roll(mask, 1, 1) & np.roll(mask, -1, 1)
    )
    # rolled neighbours wrap; edge cells of the grid are never interior
    interior[0, :] = interior[-1, :] = False
    interior[:, 0] = interior[:, -1] = False
    edge = mask & ~interior
    bx, by = gx[edge], gy[edge]
    if bx.size == 0:
        return np.empty((0, 2))
    ang = np.arctan2(by - center[1], bx - center[0])
    order = np.argsort(ang)
    return np.column_stack([bx[order], by[order]])


def scan_energies(
    jammer_xy,
    jammer_power: float,
    pose_xy,
    headings,
    pattern: RadiationPattern,
    noise_floor: float,
    pathloss_exponent: float = 2.0,
):
    """Analytic per-heading energies for a pose near a transmitter.

    energy = power * distance^-exponent * gain(bearing - heading) + noise.
    """
    d = float(np.hypot(jammer_xy[0] - pose_xy[0], jammer_xy[1] - pose_xy[1]))
    if d == 0.0:
        raise DegenerateGeometryError("scan pose coincides with the transmitter")
    brg = bearing(pose_xy, jammer_xy[0], jammer_xy[1])
    gains = pattern.gain(brg - np.asarray(headings, dtype=float))
    return jammer_power * d ** (-pathloss_exponent) * gains + noise_floor
