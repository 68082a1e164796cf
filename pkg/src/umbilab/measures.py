"""Integral norms, sphere distances, oscillation and pinching functionals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import DIM, CurvatureBundle, GeometryError, curvature_from_graph
from .graph import RadialGraph, embed_euclidean
from .grid import d_phi, d_theta
from .tensors import TensorField


@dataclass
class SphereFit:
    center: np.ndarray
    radius: float
    hausdorff: float

    def to_dict(self) -> dict:
        return {"center": [float(c) for c in self.center], "radius": self.radius, "hausdorff": self.hausdorff}


def _as_tensor(T) -> TensorField:
    if isinstance(T, TensorField):
        return T
    return TensorField(np.asarray(T, dtype=float), "")


def tensor_lp_norm(T, bundle: CurvatureBundle, p) -> float:
    """``(int_M |T.T|_g^{p/2} dmu_g)^{1/p}``; ``p`` may be ``"sup"``/``inf``."""
    if isinstance(p, str) or np.isinf(p):
        return tensor_sup_norm(T, bundle)
    if p < 1:
        raise ValueError(f"norm exponent must be >= 1, got {p}")
    T = _as_tensor(T)
    sq = np.abs(bundle.norm_sq(T))
    return bundle.integrate(sq ** (p / 2.0)) ** (1.0 / p)


def tensor_sup_norm(T, bundle: CurvatureBundle) -> float:
    T = _as_tensor(T)
    return float(np.sqrt(np.max(np.abs(bundle.norm_sq(T)))))


def area_and_center(graph: RadialGraph, bundle: CurvatureBundle | None = None):
    """Area, and for Euclidean graphs the center of mass (``None`` otherwise)."""
    bundle = bundle or curvature_from_graph(graph)
    area = bundle.area
    if graph.ambient.kind != "euclidean":
        return area, None
    X = embed_euclidean(graph)
    xm = np.array([bundle.integrate(X[..., k]) for k in range(3)]) / area
    return area, xm


def center_of_mass(graph: RadialGraph, bundle: CurvatureBundle | None = None) -> np.ndarray:
    if graph.ambient.kind != "euclidean":
        raise ValueError("center of mass is only defined for Euclidean graphs")
    return area_and_center(graph, bundle)[1]


def rescale_to_unit_area(graph: RadialGraph) -> RadialGraph:
    """Homothety ``u -> s u`` (Euclidean) giving ``|M| = 1``."""
    if graph.ambient.kind != "euclidean":
        raise ValueError("homothetic rescaling is only available in Euclidean space")
    area = curvature_from_graph(graph).area
    return RadialGraph(graph.grid, graph.u / np.sqrt(area), graph.ambient, graph.center / np.sqrt(area))


def best_umbilic_lambda(bundle: CurvatureBundle, p: float, tol: float = 1e-10):
    """Minimise ``lam -> ||A - lam g||_p`` by golden-section search on [min H, max H]."""
    if not p > DIM:
        raise ValueError(f"exponent p must exceed n = {DIM}, got {p}")
    lo, hi = float(np.min(bundle.H_avg)), float(np.max(bundle.H_avg))
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise GeometryError("mean curvature is not finite; cannot bracket lambda")

    def f(lam):
        return tensor_lp_norm(bundle.h - bundle.g * lam, bundle, p)

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    lam = 0.5 * (a + b)
    return lam, f(lam)


def radial_about(graph: RadialGraph, q=None):
    """Geodesic distance from ``q`` to every node and the unit directions at ``q``.

    Euclidean ``q`` is an absolute position (default: the graph center);
    otherwise ``q`` is given in geodesic normal coordinates about the pole.
    Raises if the surface is not a radial graph about ``q``.
    """
    amb = graph.ambient
    if amb.kind == "euclidean":
        q = graph.center if q is None else np.asarray(q, dtype=float)
        dist, dirs = amb.distance(embed_euclidean(graph), q)
    else:
        q = np.zeros(3) if q is None else np.asarray(q, dtype=float)
        dist, dirs = amb.distance(graph.points(), q)
    if not is_star_about(graph, dirs):
        raise GeometryError("surface is not star-shaped about the requested point (re-graphing not injective)")
    return dist, dirs


def is_star_about(graph: RadialGraph, dirs: np.ndarray) -> bool:
    """Orientation test: the direction map node -> S^2 must keep a positive Jacobian."""
    grid = graph.grid
    dt = np.stack([d_theta(dirs[..., k], grid) for k in range(3)], axis=-1)
    dp = np.stack([d_phi(dirs[..., k], grid) for k in range(3)], axis=-1)
    jac = np.sum(dirs * np.cross(dt, dp), axis=-1) / grid.sin_theta
    return bool(np.all(jac > 0))


def hausdorff_to_sphere(graph: RadialGraph, center=None, R: float = 1.0) -> float:
    """``max |u_c - R|`` with ``u_c`` the radial function re-centred at ``center``."""
    dist, _ = radial_about(graph, center)
    return float(np.max(np.abs(dist - R)))


def best_fit_sphere(graph: RadialGraph, bundle: CurvatureBundle | None = None) -> SphereFit:
    """Chebyshev-optimal radius about x_M (Euclidean) or the pole."""
    if graph.ambient.kind == "euclidean":
        center = center_of_mass(graph, bundle)
    else:
        center = np.zeros(3)
    dist, _ = radial_about(graph, center)
    hi, lo = float(dist.max()), float(dist.min())
    return SphereFit(center, 0.5 * (hi + lo), 0.5 * (hi - lo))


def oscillation_about(graph: RadialGraph, q=None) -> float:
    dist, _ = radial_about(graph, q)
    return float(dist.max() - dist.min())


def default_kappa_bar(graph: RadialGraph) -> float:
    """Lower bound for the principal curvatures of the slices met by the graph."""
    return float(graph.ambient.slice_curvature(graph.u.max()))


def gradient_bound_check(graph: RadialGraph, bundle: CurvatureBundle | None = None, kappa_bar=None):
    """``(v_max, exp(kappa_bar * osc u), v_max <= bound)``."""
    bundle = bundle or curvature_from_graph(graph)
    kappa_bar = default_kappa_bar(graph) if kappa_bar is None else float(kappa_bar)
    v_max = float(np.max(bundle.v))
    bound = float(np.exp(kappa_bar * graph.osc))
    return v_max, bound, bool(np.all(bundle.v <= bound))


def is_convex(bundle: CurvatureBundle) -> bool:
    return bool(np.all(bundle.principal_curvatures() > 0))


def _parabolic_peak(fm, f0, fp):
    denom = fm - 2.0 * f0 + fp
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(denom < 0, 0.5 * (fm - fp) / denom, 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    return f0 - 0.25 * (fm - fp) * shift


def support_function(graph: RadialGraph, chunk: int = 512) -> np.ndarray:
    """``h_K(omega) = max_x <x, omega>`` at the grid directions.

    The nodal maximum is refined by separable parabolic interpolation through
    the neighbours of the maximising node.
    """
    grid = graph.grid
    X = embed_euclidean(graph)
    Xf = X.reshape(-1, 3)
    W = grid.directions().reshape(-1, 3)
    nt, npf = grid.shape
    out = np.empty(W.shape[0])
    for start in range(0, W.shape[0], chunk):
        vals = W[start : start + chunk] @ Xf.T
        idx = np.argmax(vals, axis=1)
        a, b = np.divmod(idx, npf)
        rows = np.arange(vals.shape[0])
        vals = vals.reshape(-1, nt, npf)
        f0 = vals[rows, a, b]
        # theta neighbours across the pole go through the antipode
        am, ap = a - 1, a + 1
        bm_t = np.where(am < 0, (b + npf // 2) % npf, b)
        bp_t = np.where(ap >= nt, (b + npf // 2) % npf, b)
        am = np.where(am < 0, 0, am)
        ap = np.where(ap >= nt, nt - 1, ap)
        ft = _parabolic_peak(vals[rows, am, bm_t], f0, vals[rows, ap, bp_t])
        fp = _parabolic_peak(vals[rows, a, (b - 1) % npf], f0, vals[rows, a, (b + 1) % npf])
        out[start : start + chunk] = ft + fp - f0
    return out.reshape(grid.shape)


def steiner_point(graph: RadialGraph) -> np.ndarray:
    """``(3 / 4 pi) int_{S^2} h_K(omega) omega d omega`` (Steiner point in R^3)."""
    hk = support_function(graph)
    W = graph.grid.directions()
    return np.array([graph.grid.integrate(hk * W[..., k]) for k in range(3)]) * 3.0 / (4.0 * np.pi)


def curvature_centroid(graph: RadialGraph, bundle: CurvatureBundle | None = None) -> np.ndarray:
    """Gauss-curvature weighted centroid; equals the Steiner point for smooth convex bodies."""
    bundle = bundle or curvature_from_graph(graph)
    K = np.linalg.det(bundle.shape_operator())
    X = embed_euclidean(graph)
    return np.array([bundle.integrate(K * X[..., k]) for k in range(3)]) / bundle.integrate(K)


def andrews_deviation(graph: RadialGraph, bundle: CurvatureBundle | None = None) -> float:
    """``max |<x - q, nu> - (1/8pi) int H_sum|`` with q the Steiner point."""
    if graph.ambient.kind != "euclidean":
        raise ValueError("the Andrews deviation is defined for Euclidean surfaces")
    bundle = bundle or curvature_from_graph(graph)
    if not is_convex(bundle):
        raise GeometryError("Andrews deviation needs a convex surface")
    q = steiner_point(graph)
    X = embed_euclidean(graph)
    support = np.sum((X - q) * bundle.normal, axis=-1)
    mean_width = bundle.integrate(bundle.H_sum) / (8.0 * np.pi)
    return float(np.max(np.abs(support - mean_width)))


def analysis_report(graph: RadialGraph, ps=(3, 4, 8), bundle: CurvatureBundle | None = None) -> dict:
    """Scalar functionals of one surface, as a JSON-ready dict."""
    bundle = bundle or curvature_from_graph(graph)
    area, xm = area_and_center(graph, bundle)
    A0 = bundle.A_traceless
    norms = {str(p): tensor_lp_norm(A0, bundle, p) for p in ps}
    norms["sup"] = tensor_sup_norm(A0, bundle)
    p_main = max(p for p in ps if p > DIM)
    lam, res = best_umbilic_lambda(bundle, p_main)
    report = {
        "area": area,
        "x_M": None if xm is None else [float(c) for c in xm],
        "norms": norms,
        "sphere_fit": best_fit_sphere(graph, bundle).to_dict(),
        "p": p_main,
        "lambda_star": lam,
        "residual": res,
        "andrews": None,
        "v_max": float(np.max(bundle.v)),
        "osc": graph.osc,
    }
    if graph.ambient.kind == "euclidean" and is_convex(bundle):
        report["andrews"] = andrews_deviation(graph, bundle)
    return report
