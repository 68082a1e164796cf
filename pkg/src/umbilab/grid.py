"""Latitude-longitude grid on the unit sphere with pole-crossing finite differences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def fejer_weights(n: int) -> np.ndarray:
    """Fejer (first kind) weights for nodes theta_k = (k + 1/2) pi / n.

    They integrate ``f(cos theta) sin theta dtheta`` over ``[0, pi]`` exactly
    for polynomials of degree < n in ``cos theta``.
    """
    theta = (np.arange(n) + 0.5) * np.pi / n
    j = np.arange(1, n // 2 + 1)
    series = np.cos(2.0 * np.outer(theta, j)) / (4.0 * j**2 - 1.0)
    return (2.0 / n) * (1.0 - 2.0 * series.sum(axis=1))


@dataclass(frozen=True, eq=False)
class SphericalGrid:
    """Tensor-product grid with half-offset colatitudes (no node on a pole).

    ``weights`` integrate against the round measure ``sin(theta) dtheta dphi``.
    """

    n_theta: int
    n_phi: int
    theta: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_theta < 8 or self.n_phi < 16:
            raise ValueError(
                f"grid {self.n_theta}x{self.n_phi} is under-resolved (need n_theta >= 8, n_phi >= 16)"
            )
        if self.n_phi % 2:
            raise ValueError(f"n_phi must be even for the antipodal pole continuation, got {self.n_phi}")
        theta = (np.arange(self.n_theta) + 0.5) * np.pi / self.n_theta
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        w = np.outer(fejer_weights(self.n_theta), np.full(self.n_phi, 2.0 * np.pi / self.n_phi))
        for name, arr in (("theta", theta), ("phi", phi), ("weights", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @property
    def dtheta(self) -> float:
        return np.pi / self.n_theta

    @property
    def dphi(self) -> float:
        return 2.0 * np.pi / self.n_phi

    @property
    def sin_theta(self) -> np.ndarray:
        return np.sin(self.theta)[:, None]

    @property
    def cos_theta(self) -> np.ndarray:
        return np.cos(self.theta)[:, None]

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def directions(self) -> np.ndarray:
        """Unit radial vectors, shape (n_theta, n_phi, 3)."""
        th, ph = self.mesh()
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Orthonormal polar frame (e_r, e_theta, e_phi) at every node."""
        th, ph = self.mesh()
        e_r = self.directions()
        e_th = np.stack([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)], axis=-1)
        e_ph = np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], axis=-1)
        return e_r, e_th, e_ph

    def integrate(self, f: np.ndarray) -> float:
        """Integral of ``f`` against the round measure of the unit sphere."""
        return float(np.sum(f * self.weights))

    def same_as(self, other: "SphericalGrid") -> bool:
        return self.n_theta == other.n_theta and self.n_phi == other.n_phi


def build_grid(n_theta: int, n_phi: int) -> SphericalGrid:
    return SphericalGrid(int(n_theta), int(n_phi))


def parse_grid(spec: str) -> SphericalGrid:
    """``"64x128"`` -> grid."""
    try:
        a, b = spec.lower().split("x")
        return build_grid(int(a), int(b))
    except ValueError as exc:
        raise ValueError(f"bad grid spec {spec!r}, expected NxM") from exc


# --- finite differences ------------------------------------------------------
# Fourth-order central stencils. Scalars continue across a pole as
# f(-theta, phi) = f(theta, phi + pi); theta-derivatives flip sign there.

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _pad_theta(f: np.ndarray, parity: float) -> np.ndarray:
    half = f.shape[1] // 2
    top = parity * np.roll(f[1::-1], -half, axis=1)
    bottom = parity * np.roll(f[-1:-3:-1], -half, axis=1)
    return np.concatenate([top, f, bottom], axis=0)


def _apply_theta(f: np.ndarray, stencil: np.ndarray, parity: float) -> np.ndarray:
    p = _pad_theta(f, parity)
    n = f.shape[0]
    return sum(c * p[k : k + n] for k, c in enumerate(stencil) if c != 0.0)


def _apply_phi(f: np.ndarray, stencil: np.ndarray) -> np.ndarray:
    # phi-derivatives ignore row constants; removing them keeps rows that are
    # (nearly) constant in phi free of round-off, which 1/sin^2 would amplify
    f = f - f[:, :1]
    return sum(c * np.roll(f, 2 - k, axis=1) for k, c in enumerate(stencil) if c != 0.0)


def d_theta(f: np.ndarray, grid: SphericalGrid, parity: float = 1.0) -> np.ndarray:
    """theta-derivative; ``parity=-1`` for fields that are themselves theta-derivatives."""
    return _apply_theta(f, _D1, parity) / grid.dtheta


def d_theta2(f: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    return _apply_theta(f, _D2, 1.0) / grid.dtheta**2


def d_phi(f: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    return _apply_phi(f, _D1) / grid.dphi


def d_phi2(f: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    return _apply_phi(f, _D2) / grid.dphi**2


def d_theta_phi(f: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    # phi-differencing is periodic, so no parity bookkeeping is needed
    return d_phi(d_theta(f, grid), grid)


def derivatives(f: np.ndarray, grid: SphericalGrid) -> dict[str, np.ndarray]:
    """All first and second coordinate derivatives of a scalar (or stacked scalars)."""
    ft = d_theta(f, grid)
    return {
        "t": ft,
        "p": d_phi(f, grid),
        "tt": d_theta2(f, grid),
        "pp": d_phi2(f, grid),
        "tp": d_phi(ft, grid),
    }


def polar_filter_mask(grid: SphericalGrid) -> np.ndarray:
    """Boolean rfft mask keeping longitudinal modes resolvable at each colatitude.

    Row ``a`` keeps ``m <= max(1, floor(sin(theta_a) * n_phi / 2))`` so the
    effective zonal spacing never drops below the equatorial one.
    """
    m = np.arange(grid.n_phi // 2 + 1)
    m_cut = np.maximum(1, np.floor(np.sin(grid.theta) * grid.n_phi / 2.0))
    return m[None, :] <= m_cut[:, None]


def polar_filter(f: np.ndarray, mask: np.ndarray) -> np.ndarray:
    spec = np.fft.rfft(f, axis=1)
    return np.fft.irfft(spec * mask, n=f.shape[1], axis=1)


def effective_spacing(grid: SphericalGrid, filtered: bool) -> float:
    """Smallest angular node spacing seen by the differencing (radians on S^2)."""
    if not filtered:
        return float(min(grid.dtheta, np.sin(grid.theta[0]) * grid.dphi))
    m_cut = np.maximum(1, np.floor(np.sin(grid.theta) * grid.n_phi / 2.0))
    zonal = np.min(np.sin(grid.theta) * np.pi / m_cut)
    return float(min(grid.dtheta, zonal))
