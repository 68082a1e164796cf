"""Fundamental forms of radial graphs, Ricci tensor and first Laplace eigenvalue.

Two mean-curvature conventions are carried side by side: ``H_avg = tr_g(h)/n``
(used in the traceless part) and ``H_sum = tr_g(h)`` (used as the flow speed).
The normal is the outward one, so round spheres have positive ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import sph_harm_y

from .ambient import AmbientSpace
from .graph import RadialGraph
from .grid import SphericalGrid, derivatives
from .tensors import TensorField, det_2x2, inverse_2x2, squared_norm, sym2

DIM = 2


class GeometryError(ValueError):
    """Discrete geometry broke down (degenerate metric, tangent plane, ...)."""


@dataclass(eq=False)
class CurvatureBundle:
    grid: SphericalGrid
    ambient: AmbientSpace
    g: TensorField
    g_inv: TensorField
    h: TensorField
    v: np.ndarray
    H_avg: np.ndarray
    H_sum: np.ndarray
    A_traceless: TensorField
    area_element: np.ndarray  # density of dmu_g w.r.t. the round measure
    normal: np.ndarray  # unit normal, polar-frame components laid out in R^3

    @property
    def n(self) -> int:
        return DIM

    def integrate(self, f: np.ndarray) -> float:
        return self.grid.integrate(f * self.area_element)

    @property
    def area(self) -> float:
        return self.integrate(np.ones(self.grid.shape))

    def norm_sq(self, T: TensorField) -> np.ndarray:
        return squared_norm(T, self.g.components, self.g_inv.components)

    def shape_operator(self) -> np.ndarray:
        """Mixed tensor h^i_j per node."""
        return np.einsum("xyik,xykj->xyij", self.g_inv.components, self.h.components)

    def principal_curvatures(self) -> np.ndarray:
        S = self.shape_operator()
        tr = S[..., 0, 0] + S[..., 1, 1]
        det = det_2x2(S)
        disc = np.sqrt(np.maximum(0.25 * tr**2 - det, 0.0))
        return np.stack([0.5 * tr - disc, 0.5 * tr + disc], axis=-1)


def _assemble(grid, ambient, g, h, v, normal, area_element) -> CurvatureBundle:
    det = det_2x2(g)
    if not (np.all(np.isfinite(det)) and np.all(det > 0) and np.all(g[..., 0, 0] > 0)):
        raise GeometryError("induced metric is not positive definite at some node")
    g_inv = inverse_2x2(g)
    H_sum = np.einsum("xyij,xyij->xy", g_inv, h)
    H_avg = H_sum / DIM
    A = h - H_avg[..., None, None] * g
    return CurvatureBundle(
        grid=grid,
        ambient=ambient,
        g=TensorField(g),
        g_inv=TensorField(g_inv, "uu"),
        h=TensorField(h),
        v=v,
        H_avg=H_avg,
        H_sum=H_sum,
        A_traceless=TensorField(A),
        area_element=area_element,
        normal=normal,
    )


def curvature_from_graph(graph: RadialGraph) -> CurvatureBundle:
    """Warped-product graph formulas.

    With ``vt = warp(u)``, ``vt' = warp'(u)``:
    ``g_ij = u_i u_j + vt^2 sigma_ij``,
    ``v^2 = 1 + vt^-2 |Du|_sigma^2``,
    ``h_ij = (-u_;ij + vt vt' sigma_ij + 2 (vt'/vt) u_i u_j) / v``.
    """
    grid, amb, u = graph.grid, graph.ambient, graph.u
    if not amb.admissible(u):
        raise GeometryError(f"radial function outside the admissible range of {amb.kind}")
    d = derivatives(u, grid)
    s, c = grid.sin_theta, grid.cos_theta
    th = amb.warp(u)
    thp = amb.dwarp(u)
    ut, up = d["t"], d["p"]
    grad2 = ut**2 + up**2 / s**2
    v = np.sqrt(1.0 + grad2 / th**2)

    g = sym2(ut**2 + th**2, ut * up, up**2 + th**2 * s**2)
    hess_tt = d["tt"]
    hess_tp = d["tp"] - (c / s) * up
    hess_pp = d["pp"] + s * c * ut
    k = thp / th
    h = sym2(
        -hess_tt + th * thp + 2.0 * k * ut**2,
        -hess_tp + 2.0 * k * ut * up,
        -hess_pp + th * thp * s**2 + 2.0 * k * up**2,
    ) / v[..., None, None]

    e_r, e_t, e_p = grid.frame()
    normal = (e_r - (ut / th)[..., None] * e_t - (up / (th * s))[..., None] * e_p) / v[..., None]
    return _assemble(grid, amb, g, h, v, normal, th**2 * v)


def curvature_from_embedding(graph: RadialGraph) -> CurvatureBundle:
    """Fundamental forms of the Euclidean embedding ``X = u * omega`` by direct differencing."""
    if graph.ambient.kind != "euclidean":
        raise ValueError("curvature_from_embedding needs a Euclidean graph")
    grid = graph.grid
    X = graph.points()
    comps = [derivatives(X[..., k], grid) for k in range(3)]
    D = {key: np.stack([cmp[key] for cmp in comps], axis=-1) for key in comps[0]}
    Xt, Xp = D["t"], D["p"]
    cross = np.cross(Xt, Xp)
    cnorm = np.linalg.norm(cross, axis=-1)
    scale = np.linalg.norm(Xt, axis=-1) * np.linalg.norm(Xp, axis=-1)
    if np.any(cnorm <= 1e-12 * scale):
        raise GeometryError("degenerate tangent plane")
    nu = cross / cnorm[..., None]
    omega = grid.directions()
    radial = np.sum(nu * omega, axis=-1)
    if np.any(radial <= 0):
        raise GeometryError("surface is not a radial graph (normal not outward)")

    dot = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    g = sym2(dot(Xt, Xt), dot(Xt, Xp), dot(Xp, Xp))
    h = sym2(-dot(D["tt"], nu), -dot(D["tp"], nu), -dot(D["pp"], nu))
    area_element = np.sqrt(det_2x2(g)) / grid.sin_theta
    # express the Cartesian normal in the polar frame layout used elsewhere (identity here)
    return _assemble(grid, graph.ambient, g, h, 1.0 / radial, nu, area_element)


def ricci_from_gauss(bundle: CurvatureBundle) -> TensorField:
    """Ric from the Gauss equation in terms of H_avg and the traceless part.

    ``Ric = (n-1) H^2 g + (n-2) H A0 - A0_ik A0^k_j``, plus the ambient
    sectional-curvature term ``(n-1) K_amb g``.
    """
    n = DIM
    H = bundle.H_avg[..., None, None]
    g = bundle.g.components
    A0 = bundle.A_traceless.components
    A0_sq = np.einsum("xyik,xykl,xylj->xyij", A0, bundle.g_inv.components, A0)
    ric = (n - 1) * (H**2 + bundle.ambient.curvature) * g + (n - 2) * H * A0 - A0_sq
    return TensorField(ric)


def gauss_curvature(bundle: CurvatureBundle) -> np.ndarray:
    """Intrinsic curvature K = ambient curvature + det(shape operator)."""
    return bundle.ambient.curvature + det_2x2(bundle.shape_operator())


# --- first eigenvalue ----------------------------------------------------------


def _real_harmonics(grid: SphericalGrid, degree: int):
    """Real spherical harmonics up to ``degree`` with theta/phi derivatives at the nodes."""
    th, ph = grid.mesh()
    vals, dts, dps = [], [], []
    for l in range(degree + 1):
        for m in range(0, l + 1):
            y, dy = sph_harm_y(l, m, th, ph, diff_n=1)
            parts = [(np.real, 1.0)] if m == 0 else [(np.real, np.sqrt(2.0)), (np.imag, np.sqrt(2.0))]
            for part, c in parts:
                vals.append(c * part(y))
                dts.append(c * part(dy[..., 0]))
                dps.append(c * part(dy[..., 1]))
    return np.array(vals), np.array(dts), np.array(dps)


def lambda1_estimate(bundle: CurvatureBundle, degree: int | None = None) -> float:
    """Smallest non-zero eigenvalue of the Laplace-Beltrami operator.

    Ritz-Galerkin discretisation of the weak (divergence) form in a real
    spherical-harmonic basis, with the constants deflated by projecting the
    basis onto the mass-orthogonal complement of 1.
    """
    grid = bundle.grid
    if degree is None:
        degree = max(2, min(14, grid.n_theta // 2 - 1))
    Y, Yt, Yp = _real_harmonics(grid, degree)
    wmu = grid.weights * bundle.area_element
    gi = bundle.g_inv.components

    # deflate constants: phi_k - <phi_k, 1>_mu / <1, 1>_mu
    mean = (Y * wmu).sum(axis=(1, 2)) / wmu.sum()
    Y = Y[1:] - mean[1:, None, None]
    Yt, Yp = Yt[1:], Yp[1:]

    mass = np.einsum("axy,bxy,xy->ab", Y, Y, wmu, optimize=True)
    stiff = (
        np.einsum("axy,bxy,xy->ab", Yt, Yt, wmu * gi[..., 0, 0], optimize=True)
        + np.einsum("axy,bxy,xy->ab", Yt, Yp, wmu * gi[..., 0, 1], optimize=True)
        + np.einsum("axy,bxy,xy->ab", Yp, Yt, wmu * gi[..., 1, 0], optimize=True)
        + np.einsum("axy,bxy,xy->ab", Yp, Yp, wmu * gi[..., 1, 1], optimize=True)
    )
    stiff = 0.5 * (stiff + stiff.T)
    mass = 0.5 * (mass + mass.T)
    try:
        lam = scipy.linalg.eigh(stiff, mass, eigvals_only=True, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise GeometryError(f"eigenvalue solve failed: {exc}") from exc
    return float(lam[0])


def aubry_ricci_deficit(bundle: CurvatureBundle, p: float, Hnorm: float) -> float:
    """``|| Ric - (n-1) Hnorm^2 g ||_{p/2}`` with ``Hnorm = ||H_avg||_p``."""
    from .measures import tensor_lp_norm

    if not p > DIM:
        raise ValueError(f"exponent p must exceed n = {DIM}, got {p}")
    T = ricci_from_gauss(bundle) - bundle.g * ((DIM - 1) * Hnorm**2)
    return tensor_lp_norm(T, bundle, p / 2.0)
