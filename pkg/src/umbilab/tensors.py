"""Per-node tensor fields on a two-dimensional surface grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTERS = "ijklmnop"


@dataclass(eq=False)
class TensorField:
    """Components of shape ``grid.shape + (2,) * rank``.

    ``variance`` has one character per index: ``"l"`` (covariant) or ``"u"``
    (contravariant); ``"ll"`` is a (0,2) tensor, ``"ul"`` a (1,1) tensor.
    """

    components: np.ndarray
    variance: str = "ll"

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if set(self.variance) - {"l", "u"}:
            raise ValueError(f"variance must use 'l'/'u', got {self.variance!r}")
        if self.components.ndim != 2 + self.rank or any(d != 2 for d in self.components.shape[2:]):
            raise ValueError(f"components of shape {self.components.shape} do not match rank {self.rank}")

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def node_shape(self) -> tuple[int, int]:
        return self.components.shape[:2]

    def _check(self, other: "TensorField"):
        if other.variance != self.variance or other.components.shape != self.components.shape:
            raise ValueError("tensor fields differ in variance or grid")

    def __add__(self, other):
        self._check(other)
        return TensorField(self.components + other.components, self.variance)

    def __sub__(self, other):
        self._check(other)
        return TensorField(self.components - other.components, self.variance)

    def __mul__(self, c):
        c = np.asarray(c, dtype=float)
        if c.ndim == 2:
            c = c.reshape(c.shape + (1,) * self.rank)
        return TensorField(self.components * c, self.variance)

    __rmul__ = __mul__

    def __neg__(self):
        return TensorField(-self.components, self.variance)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        if self.rank != 2:
            return True
        return bool(np.allclose(self.components, np.swapaxes(self.components, -1, -2), rtol=0, atol=atol))

    def symmetrized(self) -> "TensorField":
        return TensorField(0.5 * (self.components + np.swapaxes(self.components, -1, -2)), self.variance)


def squared_norm(T: TensorField, g: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Pointwise full contraction ``T_{i..}^{j..} T^{i..}_{j..}`` using ``g``/``g_inv``."""
    if T.components.shape[:2] != g.shape[:2]:
        raise ValueError("tensor field and metric live on different grids")
    if T.rank == 0:
        return T.components**2
    a = "".join(_LETTERS[k] for k in range(T.rank))
    b = "".join(_LETTERS[T.rank + k] for k in range(T.rank))
    metric_terms = [f"xy{a[k]}{b[k]}" for k in range(T.rank)]
    expr = f"xy{a},xy{b}," + ",".join(metric_terms) + "->xy"
    metrics = [g_inv if kind == "l" else g for kind in T.variance]
    return np.einsum(expr, T.components, T.components, *metrics, optimize=True)


def inverse_2x2(m: np.ndarray) -> np.ndarray:
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    det = a * d - b * c
    out = np.empty_like(m)
    out[..., 0, 0] = d / det
    out[..., 0, 1] = -b / det
    out[..., 1, 0] = -c / det
    out[..., 1, 1] = a / det
    return out


def det_2x2(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def sym2(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Stack ``[[a, b], [b, c]]`` per node."""
    return np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)
