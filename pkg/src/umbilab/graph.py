"""Radial graphs over the round sphere: construction, embedding and JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ambient import AmbientSpace, get_ambient
from .grid import SphericalGrid, build_grid
from .profiles import Profile, get_profile


@dataclass(eq=False)
class RadialGraph:
    """Hypersurface ``{r = u(x)}`` in geodesic polar coordinates about ``center``."""

    grid: SphericalGrid
    u: np.ndarray
    ambient: AmbientSpace
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.ambient = get_ambient(self.ambient)
        self.u = np.asarray(self.u, dtype=float)
        self.center = np.asarray(self.center, dtype=float).reshape(3)
        if self.u.shape != self.grid.shape:
            raise ValueError(f"u has shape {self.u.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(self.u)) or np.any(self.u <= 0):
            raise ValueError("radial function must be finite and strictly positive")
        if np.any(self.u >= self.ambient.r_max):
            raise ValueError(
                f"radial function leaves the admissible range (0, {self.ambient.r_max}) of {self.ambient.kind}"
            )

    def with_u(self, u: np.ndarray) -> "RadialGraph":
        return RadialGraph(self.grid, u, self.ambient, self.center.copy())

    def points(self) -> np.ndarray:
        """Geodesic normal coordinates of the nodes about the pole (no center offset)."""
        return self.u[..., None] * self.grid.directions()

    @property
    def osc(self) -> float:
        return float(self.u.max() - self.u.min())

    def to_dict(self) -> dict:
        return {
            "ambient": self.ambient.kind,
            "n_theta": self.grid.n_theta,
            "n_phi": self.grid.n_phi,
            "center": [float(c) for c in self.center],
            "u": [float(x) for x in self.u.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RadialGraph":
        grid = build_grid(data["n_theta"], data["n_phi"])
        u = np.asarray(data["u"], dtype=float).reshape(grid.shape)
        return cls(grid, u, get_ambient(data["ambient"]), np.asarray(data.get("center", [0, 0, 0]), float))


def write_graph(graph: RadialGraph, path) -> None:
    Path(path).write_text(json.dumps(graph.to_dict()))


def read_graph(path) -> RadialGraph:
    return RadialGraph.from_dict(json.loads(Path(path).read_text()))


def make_sphere_graph(R: float, grid: SphericalGrid, ambient) -> RadialGraph:
    ambient = get_ambient(ambient)
    if not ambient.admissible(R):
        raise ValueError(f"radius {R} outside the admissible range (0, {ambient.r_max}) of {ambient.kind}")
    return RadialGraph(grid, np.full(grid.shape, float(R)), ambient)


def make_graph_from_function(fn: Profile, grid: SphericalGrid, ambient) -> RadialGraph:
    """Graph of ``u = fn(omega)`` sampled at the grid directions."""
    return RadialGraph(grid, fn(grid.directions()), get_ambient(ambient))


def make_perturbed_graph(R: float, eps: float, profile, grid: SphericalGrid, ambient, seed: int = 0) -> RadialGraph:
    """``u = R (1 + eps * profile)``; ``profile`` is a name or a callable with sup norm <= 1."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    fn = get_profile(profile, seed) if isinstance(profile, str) else profile
    ambient = get_ambient(ambient)
    if not ambient.admissible(R * (1.0 - eps)):
        raise ValueError(f"R (1 - eps) = {R * (1 - eps)} is outside the admissible range of {ambient.kind}")
    u = R * (1.0 + eps * fn(grid.directions()))
    return RadialGraph(grid, u, ambient)


def embed_euclidean(graph: RadialGraph) -> np.ndarray:
    """Node positions ``center + u * omega`` in R^3."""
    if graph.ambient.kind != "euclidean":
        raise ValueError(f"embed_euclidean needs a Euclidean graph, got {graph.ambient.kind}")
    return graph.center + graph.points()


def euclidean_sphere_radial(grid: SphericalGrid, radius: float, offset=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Radial function about the origin of the round sphere ``|x - offset| = radius``."""
    b = np.asarray(offset, dtype=float)
    if np.linalg.norm(b) >= radius:
        raise ValueError("origin must lie inside the sphere")
    w = grid.directions()
    bw = w @ b
    return bw + np.sqrt(radius**2 - b @ b + bw**2)
