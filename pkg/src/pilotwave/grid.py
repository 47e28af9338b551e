"""Uniform periodic grids over 1D and 2D configuration space.

Every field in the package lives on one of these grids. The topology is
periodic: the right endpoint qmax is excluded and identified with qmin,
index arithmetic wraps, and the FFT wavenumbers are the natural conjugate
coordinates.
"""

import numpy as np


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class SpatialGrid:
    """Uniform grid with periodic topology over [qmin, qmax) per axis.

    Parameters
    ----------
    points : int or sequence of int
        Points per axis. Each must be a power of two and at least 16.
    extent : (float, float) or sequence of (float, float)
        Half-open interval [qmin, qmax) per axis.

    2D arrays are indexed ``values[i0, i1]`` with axis 0 along the first
    coordinate (``indexing='ij'``).
    """

    def __init__(self, points, extent):
        if np.isscalar(points):
            points = (int(points),)
        else:
            points = tuple(int(p) for p in points)
        extent = np.asarray(extent, dtype=float)
        if extent.ndim == 1:
            extent = extent[None, :]
        if extent.shape != (len(points), 2):
            raise ValueError(
                f"extent shape {extent.shape} does not match {len(points)} axes"
            )
        if len(points) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        for n in points:
            if n < 16:
                raise ValueError(f"need at least 16 points per axis, got {n}")
            if not _is_power_of_two(n):
                raise ValueError(f"points per axis must be a power of two, got {n}")
        if np.any(extent[:, 1] <= extent[:, 0]):
            raise ValueError("qmax must exceed qmin on every axis")

        self.shape = points
        self.dim = len(points)
        self.qmin = extent[:, 0].copy()
        self.qmax = extent[:, 1].copy()
        self.lengths = self.qmax - self.qmin
        self.dx = self.lengths / np.asarray(points, dtype=float)
        self.cell_volume = float(np.prod(self.dx))
        self.axes = tuple(
            self.qmin[a] + self.dx[a] * np.arange(points[a]) for a in range(self.dim)
        )
        for ax in self.axes:
            ax.setflags(write=False)
        self.qmin.setflags(write=False)
        self.qmax.setflags(write=False)
        self.lengths.setflags(write=False)
        self.dx.setflags(write=False)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def coordinates(self):
        """Coordinate arrays broadcast to the grid shape (one per axis)."""
        if self.dim == 1:
            return (self.axes[0],)
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def wavenumbers(self, axis: int) -> np.ndarray:
        """Angular wavenumbers 2*pi*fftfreq for the given axis."""
        n = self.shape[axis]
        return 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx[axis])

    def integrate(self, values: np.ndarray) -> float:
        """Integral over the box: rectangle rule, exact for band-limited data."""
        return float(np.sum(values) * self.cell_volume)

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Map positions into [qmin, qmax) per axis (periodic identification)."""
        x = np.asarray(x, dtype=float)
        return self.qmin + np.mod(x - self.qmin, self.lengths)

    def to_fractional_index(self, x: np.ndarray) -> np.ndarray:
        """Positions -> fractional grid indices (for interpolation), wrapped."""
        x = np.asarray(x, dtype=float)
        return np.mod(x - self.qmin, self.lengths) / self.dx

    def __eq__(self, other):
        if not isinstance(other, SpatialGrid):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.qmin, other.qmin)
            and np.array_equal(self.qmax, other.qmax)
        )

    def __hash__(self):
        return hash((self.shape, tuple(self.qmin), tuple(self.qmax)))

    def __repr__(self):
        spans = ", ".join(
            f"[{self.qmin[a]:g}, {self.qmax[a]:g})" for a in range(self.dim)
        )
        return f"SpatialGrid(shape={self.shape}, extent={spans})"
