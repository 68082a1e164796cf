"""Space forms written as warped products dr^2 + theta(r)^2 sigma."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class AmbientSpace:
    kind: str
    warp: Callable[[np.ndarray], np.ndarray]
    dwarp: Callable[[np.ndarray], np.ndarray]
    curvature: float
    r_max: float

    def admissible(self, r) -> bool:
        r = np.asarray(r)
        return bool(np.all(r > 0) and np.all(r < self.r_max))

    def slice_curvature(self, r):
        """Principal curvature of the coordinate sphere {radius = r}."""
        return self.dwarp(r) / self.warp(r)

    def distance(self, x: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Geodesic distance and unit direction at ``q`` towards points ``x``.

        Points are geodesic normal coordinates about the pole (radius times
        direction). For the Euclidean space they are plain Cartesian vectors.
        """
        x = np.asarray(x, dtype=float)
        q = np.asarray(q, dtype=float)
        if self.kind == "euclidean":
            d = x - q
            r = np.linalg.norm(d, axis=-1)
            return r, d / r[..., None]
        s = float(np.linalg.norm(q))
        r = np.linalg.norm(x, axis=-1)
        omega = x / r[..., None]
        if self.kind == "hyperbolic":
            x0, xs = np.cosh(r), np.sinh(r)[..., None] * omega
        else:
            x0, xs = np.cos(r), np.sin(r)[..., None] * omega
        if s == 0.0:
            y0, ys = x0, xs
        else:
            xi = q / s
            dot = xs @ xi
            if self.kind == "hyperbolic":
                # boost of the hyperboloid taking q to the pole
                y0 = np.cosh(s) * x0 - np.sinh(s) * dot
                ys = xs + ((np.cosh(s) - 1.0) * dot - np.sinh(s) * x0)[..., None] * xi
            else:
                # rotation of S^3 taking q to the pole
                y0 = np.cos(s) * x0 + np.sin(s) * dot
                ys = xs + ((np.cos(s) - 1.0) * dot - np.sin(s) * x0)[..., None] * xi
        norm_s = np.linalg.norm(ys, axis=-1)
        if self.kind == "hyperbolic":
            d = np.arcsinh(norm_s)
        else:
            d = np.arctan2(norm_s, y0)
        return d, ys / norm_s[..., None]


def _ambient(kind: str) -> AmbientSpace:
    if kind == "euclidean":
        return AmbientSpace(kind, lambda r: np.asarray(r, dtype=float), np.ones_like, 0.0, np.inf)
    if kind == "hyperbolic":
        return AmbientSpace(kind, np.sinh, np.cosh, -1.0, np.inf)
    if kind == "spherecap":
        # restricted to an open hemisphere
        return AmbientSpace(kind, np.sin, np.cos, 1.0, np.pi / 2)
    raise ValueError(f"unknown ambient {kind!r}; choose euclidean, hyperbolic or spherecap")


EUCLIDEAN = _ambient("euclidean")
HYPERBOLIC = _ambient("hyperbolic")
SPHERECAP = _ambient("spherecap")

_BY_NAME = {a.kind: a for a in (EUCLIDEAN, HYPERBOLIC, SPHERECAP)}


def get_ambient(kind) -> AmbientSpace:
    if isinstance(kind, AmbientSpace):
        return kind
    key = str(kind).lower()
    if key not in _BY_NAME:
        raise ValueError(f"unknown ambient {kind!r}; choose euclidean, hyperbolic or spherecap")
    return _BY_NAME[key]
