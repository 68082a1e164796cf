"""Hyperbolic space as the Poincare ball of radius 2.

``r`` is hyperbolic distance to the pole, ``rho = 2 - 4 / (e^r + 1) = 2 tanh(r/2)``
the Euclidean ball radius, and ``e^psi = 1 / (1 - rho^2 / 4)`` the conformal
factor relating the two metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import EUCLIDEAN, HYPERBOLIC
from .curvature import CurvatureBundle, GeometryError, curvature_from_graph
from .graph import RadialGraph
from .tensors import TensorField

BALL_RADIUS = 2.0


def r_to_rho(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("hyperbolic radius must be non-negative")
    return 2.0 * np.tanh(0.5 * r)


def rho_to_r(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho >= BALL_RADIUS):
        raise ValueError("ball radius must lie in [0, 2)")
    return np.log1p(0.5 * rho) - np.log1p(-0.5 * rho)


def conformal_factor(rho):
    """``e^psi`` at ball radius ``rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho >= BALL_RADIUS):
        raise ValueError("conformal factor diverges at the ball boundary")
    return 1.0 / (1.0 - 0.25 * rho**2)


@dataclass
class ConformalFrame:
    """``psi`` sampled along a ball surface, and its maximum there."""

    psi: np.ndarray
    psi_max_on_M: float

    @property
    def exp_psi_max(self) -> float:
        return float(np.exp(self.psi_max_on_M))

    @classmethod
    def from_ball_graph(cls, ball_graph: RadialGraph) -> "ConformalFrame":
        psi = np.log(conformal_factor(ball_graph.u))
        return cls(psi, float(psi.max()))

    @classmethod
    def from_w_max(cls, w_max: float) -> "ConformalFrame":
        psi = float(np.log(conformal_factor(w_max)))
        return cls(np.array([psi]), psi)


def graph_to_ball(graph: RadialGraph) -> RadialGraph:
    if graph.ambient.kind != "hyperbolic":
        raise ValueError("graph_to_ball needs a hyperbolic graph")
    return RadialGraph(graph.grid, r_to_rho(graph.u), EUCLIDEAN, graph.center.copy())


def ball_to_graph(ball_graph: RadialGraph) -> RadialGraph:
    if ball_graph.ambient.kind != "euclidean":
        raise ValueError("ball_to_graph needs a Euclidean ball graph")
    return RadialGraph(ball_graph.grid, rho_to_r(ball_graph.u), HYPERBOLIC, ball_graph.center.copy())


def pull_curvature_to_hyperbolic(
    euclid_bundle: CurvatureBundle, frame: ConformalFrame, ball_graph: RadialGraph
) -> CurvatureBundle:
    """Hyperbolic fundamental forms from the Euclidean ones of the ball surface.

    ``g = e^{2 psi} g~``, ``h = e^psi (h~ + dpsi(nu~) g~)`` and, used
    constructively, ``A0 = e^psi A0~``. In the ball ``grad psi = e^psi x / 2``.
    """
    w = ball_graph.u
    if np.any(w >= BALL_RADIUS):
        raise GeometryError("ball surface touches the ideal boundary")
    e_psi = np.exp(frame.psi)
    # <x, nu~> = w * (radial component of nu~) = w / v
    dpsi_nu = 0.5 * e_psi * w / euclid_bundle.v
    gt = euclid_bundle.g.components
    g = e_psi[..., None, None] ** 2 * gt
    h = e_psi[..., None, None] * (euclid_bundle.h.components + dpsi_nu[..., None, None] * gt)
    g_inv = euclid_bundle.g_inv.components / e_psi[..., None, None] ** 2
    H_sum = np.einsum("xyij,xyij->xy", g_inv, h)
    A0 = e_psi[..., None, None] * euclid_bundle.A_traceless.components
    return CurvatureBundle(
        grid=euclid_bundle.grid,
        ambient=HYPERBOLIC,
        g=TensorField(g),
        g_inv=TensorField(g_inv, "uu"),
        h=TensorField(h),
        v=euclid_bundle.v.copy(),
        H_avg=H_sum / 2.0,
        H_sum=H_sum,
        A_traceless=TensorField(A0),
        area_element=euclid_bundle.area_element * e_psi**2,
        normal=euclid_bundle.normal.copy(),
    )


def hyperbolic_bundle_via_ball(graph: RadialGraph):
    """(hyperbolic bundle, ball graph, Euclidean ball bundle, frame) for a hyperbolic graph."""
    ball = graph_to_ball(graph)
    eb = curvature_from_graph(ball)
    frame = ConformalFrame.from_ball_graph(ball)
    return pull_curvature_to_hyperbolic(eb, frame, ball), ball, eb, frame


def hausdorff_transfer(d_tilde: float, frame: ConformalFrame) -> float:
    """Upper bound ``e^{psi_max} d~`` for the hyperbolic Hausdorff distance."""
    return frame.exp_psi_max * float(d_tilde)


def convert_report(graph: RadialGraph, reference_radius: float | None = None) -> dict:
    """psi_max and, given a reference sphere about the pole, both Hausdorff figures.

    ``reference_radius`` is measured in the model of ``graph``.
    """
    from .measures import hausdorff_to_sphere

    if graph.ambient.kind == "hyperbolic":
        hyp, ball = graph, graph_to_ball(graph)
        ref_hyp = reference_radius
        ref_ball = None if reference_radius is None else float(r_to_rho(reference_radius))
    else:
        hyp, ball = ball_to_graph(graph), graph
        ref_ball = reference_radius
        ref_hyp = None if reference_radius is None else float(rho_to_r(reference_radius))
    frame = ConformalFrame.from_ball_graph(ball)
    report = {"psi_max": frame.psi_max_on_M, "exp_psi_max": frame.exp_psi_max}
    if reference_radius is not None:
        if ref_ball > ball.u.max():
            frame = ConformalFrame.from_w_max(ref_ball)
        d_ball = hausdorff_to_sphere(ball, np.zeros(3), ref_ball)
        report.update(
            {
                "reference_radius_ball": ref_ball,
                "reference_radius_hyperbolic": ref_hyp,
                "dH_ball": d_ball,
                "dH_hyperbolic": hausdorff_to_sphere(hyp, np.zeros(3), ref_hyp),
                "dH_hyperbolic_bound": hausdorff_transfer(d_ball, frame),
            }
        )
    return report
