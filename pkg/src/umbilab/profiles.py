"""Smooth test profiles on S^2, evaluated on unit vectors of shape (..., 3).

Every named profile has sup norm 1 (the random field is normalised on a
fixed fine reference grid).
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

Profile = Callable[[np.ndarray], np.ndarray]

_BUMP_CENTER = np.array([0.48, -0.36, 0.8])
_BUMP_CENTER = _BUMP_CENTER / np.linalg.norm(_BUMP_CENTER)


def harmonic2(w):
    return 0.5 * (3.0 * w[..., 2] ** 2 - 1.0)


def harmonic3(w):
    z = w[..., 2]
    return 0.5 * (5.0 * z**3 - 3.0 * z)


def tesseral2(w):
    # sin^2(theta) cos(2 phi)
    return w[..., 0] ** 2 - w[..., 1] ** 2


def tesseral3(w):
    # sin^2(theta) cos(theta) sin(2 phi), scaled to unit sup norm
    return 2.0 * w[..., 0] * w[..., 1] * w[..., 2] * (3.0 * np.sqrt(3.0) / 2.0)


def bump(w, width: float = 0.45):
    return np.exp((w @ _BUMP_CENTER - 1.0) / width**2)


def _reference_directions(n: int = 181) -> np.ndarray:
    th = np.linspace(0.0, np.pi, n)
    ph = np.linspace(0.0, 2.0 * np.pi, 2 * n, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)


def random_field(seed: int = 0, degree: int = 4) -> Profile:
    """Random polynomial of degree <= ``degree`` restricted to S^2 (band-limited)."""
    rng = np.random.default_rng(seed)
    monomials = [m for k in range(1, degree + 1) for m in combinations_with_replacement(range(3), k)]
    coef = rng.standard_normal(len(monomials))

    def raw(w):
        out = np.zeros(w.shape[:-1])
        for c, m in zip(coef, monomials):
            term = np.full(w.shape[:-1], c)
            for axis in m:
                term = term * w[..., axis]
            out = out + term
        return out

    scale = np.max(np.abs(raw(_reference_directions())))

    def field(w):
        return raw(w) / scale

    return field


def rotated(profile: Profile, seed: int | None) -> Profile:
    if seed is None:
        return profile
    from scipy.spatial.transform import Rotation

    rot = Rotation.random(random_state=seed).as_matrix()
    return lambda w: profile(w @ rot)


_NAMED = {
    "harmonic2": harmonic2,
    "harmonic3": harmonic3,
    "tesseral2": tesseral2,
    "tesseral3": tesseral3,
    "bump": bump,
}

PROFILE_NAMES = tuple(_NAMED) + ("random",)


def get_profile(name: str, seed: int = 0) -> Profile:
    if name == "random":
        return random_field(seed)
    try:
        return _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; known: {', '.join(PROFILE_NAMES)}") from None


def generic_flow_profile(seed: int | None = None) -> Profile:
    """Non-round default for the flow: 0.3 * degree-2 + 0.15 * degree-3."""
    return rotated(lambda w: 0.3 * harmonic2(w) + 0.15 * tesseral3(w), seed)
