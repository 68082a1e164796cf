"""Inverse mean curvature flow of radial graphs.

The graph function evolves by ``du/dt = v / H_sum`` (normal speed ``1/H``
with the outward normal). Time stepping is classical RK4 with a parabolic
step bound; longitudinal modes that the grid cannot resolve near the poles
are removed from the tendency so the bound is set by the equatorial spacing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .conformal import BALL_RADIUS, graph_to_ball
from .curvature import DIM, CurvatureBundle, curvature_from_graph
from .graph import RadialGraph
from .grid import effective_spacing, polar_filter, polar_filter_mask
from .measures import best_fit_sphere, tensor_sup_norm


class FlowBreakdown(RuntimeError):
    """The discrete flow left the mean-convex, star-shaped regime."""


@dataclass
class FlowControls:
    cfl: float = 0.2
    t_end: float = 10.0
    sample_every: float = 0.1
    dt_max: float = 0.05
    dt_min: float = 1e-12
    polar_filter: bool = True
    regrid: bool = False

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.sample_every > 0:
            raise ValueError("sample_every must be positive")
        if self.regrid:
            raise ValueError("regridding is not supported; the grid stays fixed")


@dataclass
class FlowState:
    graph: RadialGraph
    t: float
    bundle: CurvatureBundle
    dt_last: float = 0.0

    @classmethod
    def start(cls, graph: RadialGraph, t: float = 0.0) -> "FlowState":
        state = cls(graph, t, curvature_from_graph(graph))
        _check_state(state.bundle, state.graph)
        return state


def _check_state(bundle: CurvatureBundle, graph: RadialGraph):
    if not np.all(bundle.H_sum > 0):
        raise FlowBreakdown(f"mean curvature became non-positive (min H = {bundle.H_sum.min():.3e})")
    if not graph.ambient.admissible(graph.u):
        raise FlowBreakdown("radial function left the admissible range")


def stable_dt(state: FlowState, controls: FlowControls) -> float:
    """``cfl * (H_min * dx_min)^2 / v_max`` with dx_min the smallest metric spacing."""
    b = state.bundle
    dx = float(state.graph.ambient.warp(state.graph.u.min())) * effective_spacing(
        state.graph.grid, controls.polar_filter
    )
    return controls.cfl * (float(b.H_sum.min()) * dx) ** 2 / float(b.v.max())


def _speed(bundle: CurvatureBundle, mask) -> np.ndarray:
    s = bundle.v / bundle.H_sum
    return s if mask is None else polar_filter(s, mask)


def flow_step(state: FlowState, controls: FlowControls, dt: float | None = None) -> FlowState:
    """One RK4 step; ``dt`` defaults to the stability bound (capped by ``dt_max``)."""
    bound = min(stable_dt(state, controls), controls.dt_max)
    dt = bound if dt is None else min(dt, bound)
    if dt < controls.dt_min:
        raise FlowBreakdown(f"time step underflow (dt = {dt:.3e})")
    mask = polar_filter_mask(state.graph.grid) if controls.polar_filter else None
    g0 = state.graph

    def stage(u):
        gr = g0.with_u(u) if g0.ambient.admissible(u) else None
        if gr is None:
            raise FlowBreakdown("radial function left the admissible range during a stage")
        b = curvature_from_graph(gr)
        if not np.all(b.H_sum > 0):
            raise FlowBreakdown(f"mean curvature became non-positive (min H = {b.H_sum.min():.3e})")
        return _speed(b, mask)

    u = g0.u
    k1 = _speed(state.bundle, mask)
    k2 = stage(u + 0.5 * dt * k1)
    k3 = stage(u + 0.5 * dt * k2)
    k4 = stage(u + dt * k3)
    u_new = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not g0.ambient.admissible(u_new):
        raise FlowBreakdown("radial function left the admissible range")
    graph = g0.with_u(u_new)
    new = FlowState(graph, state.t + dt, curvature_from_graph(graph), dt)
    _check_state(new.bundle, new.graph)
    return new


def sphere_flow_oracle(r0: float, n: int, ambient, t: float) -> float:
    """Radius at time ``t`` of a geodesic sphere moving by IMCF."""
    kind = getattr(ambient, "kind", str(ambient)).lower()
    if kind == "euclidean":
        return r0 * math.exp(t / n)
    if kind == "hyperbolic":
        return math.asinh(math.sinh(r0) * math.exp(t / n))
    if kind == "spherecap":
        s = math.sin(r0) * math.exp(t / n)
        if s >= 1.0:
            raise ValueError("the sphere reaches the equator before time t")
        return math.asin(s)
    raise ValueError(f"unknown ambient {ambient!r}")


def rescale_state(state: FlowState) -> tuple[np.ndarray, np.ndarray | None]:
    """``u_hat = u - t/n`` and, for hyperbolic graphs, ``w_hat = (2 - w) e^{t/n}``."""
    u_hat = state.graph.u - state.t / DIM
    if state.graph.ambient.kind != "hyperbolic":
        return u_hat, None
    w = graph_to_ball(state.graph).u
    return u_hat, (BALL_RADIUS - w) * math.exp(state.t / DIM)


@dataclass
class FlowSample:
    t: float
    sup_A_trfree_hyp: float
    sup_A_trfree_ball: float
    dH_ball_bestfit: float
    dH_ball_S2: float
    osc_uhat: float
    what_min: float
    what_max: float
    H_min: float
    H_max: float
    v_max: float
    dt: float
    uhat_min: float = float("nan")
    uhat_max: float = float("nan")


CSV_COLUMNS = (
    "t",
    "sup_A_trfree_hyp",
    "sup_A_trfree_ball",
    "dH_ball_bestfit",
    "dH_ball_S2",
    "osc_uhat",
    "what_min",
    "what_max",
    "H_min",
    "H_max",
    "v_max",
    "dt",
)


@dataclass
class FlowDiagnostics:
    ambient: str
    samples: list[FlowSample] = field(default_factory=list)
    final: FlowState | None = field(default=None, repr=False)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for s in self.samples:
                w.writerow([repr(float(getattr(s, c))) for c in CSV_COLUMNS])

    def to_dict(self) -> dict:
        return {"ambient": self.ambient, "samples": [asdict(s) for s in self.samples]}


def sample_state(state: FlowState) -> FlowSample:
    graph, bundle = state.graph, state.bundle
    u_hat, w_hat = rescale_state(state)
    nan = float("nan")
    if graph.ambient.kind == "hyperbolic":
        ball = graph_to_ball(graph)
        eb = curvature_from_graph(ball)
        sup_ball = tensor_sup_norm(eb.A_traceless, eb)
        d_best = best_fit_sphere(ball, eb).hausdorff
        d_s2 = float(np.max(np.abs(ball.u - BALL_RADIUS)))
        w_lo, w_hi = float(w_hat.min()), float(w_hat.max())
        osc_hat = float(u_hat.max() - u_hat.min())
        lo, hi = float(u_hat.min()), float(u_hat.max())
    else:
        sup_ball = d_best = d_s2 = w_lo = w_hi = nan
        # Euclidean rescaling is the homothety u e^{-t/n}
        scaled = graph.u * math.exp(-state.t / DIM)
        osc_hat = float(scaled.max() - scaled.min())
        lo, hi = float(scaled.min()), float(scaled.max())
    return FlowSample(
        t=state.t,
        sup_A_trfree_hyp=tensor_sup_norm(bundle.A_traceless, bundle),
        sup_A_trfree_ball=sup_ball,
        dH_ball_bestfit=d_best,
        dH_ball_S2=d_s2,
        osc_uhat=osc_hat,
        what_min=w_lo,
        what_max=w_hi,
        H_min=float(bundle.H_sum.min()),
        H_max=float(bundle.H_sum.max()),
        v_max=float(bundle.v.max()),
        dt=state.dt_last,
        uhat_min=lo,
        uhat_max=hi,
    )


def run_flow(initial: RadialGraph, controls: FlowControls | None = None, progress=None) -> FlowDiagnostics:
    """Integrate to ``controls.t_end``, sampling every ``controls.sample_every``."""
    controls = controls or FlowControls()
    state = FlowState.start(initial)
    diag = FlowDiagnostics(initial.ambient.kind)
    diag.samples.append(sample_state(state))
    n_samples = int(math.floor(controls.t_end / controls.sample_every + 1e-9))
    targets = [controls.sample_every * (k + 1) for k in range(n_samples)]
    if not targets or targets[-1] < controls.t_end - 1e-12:
        targets.append(controls.t_end)
    for target in targets:
        while state.t < target - 1e-12:
            state = flow_step(state, controls, dt=target - state.t)
        state.t = target  # absorb round-off in the accumulated time
        diag.samples.append(sample_state(state))
        if progress is not None:
            progress(diag.samples[-1])
    diag.final = state
    return diag


@dataclass
class DecayFit:
    slope: float
    intercept: float
    residual: float
    n_samples: int

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DECAY_QUANTITIES = ("sup_A_trfree_hyp", "sup_A_trfree_ball", "dH_ball_S2", "dH_ball_bestfit")


def fit_log_slope(t: np.ndarray, y: np.ndarray) -> DecayFit:
    """Least-squares line through ``(t, log y)``; residual is the RMS misfit."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 10:
        raise ValueError(f"need at least 10 samples in the fitting window, got {t.size}")
    if np.any(~(y > 0)):
        raise ValueError("log-fit needs strictly positive values in the window")
    A = np.stack([t, np.ones_like(t)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
    resid = np.log(y) - (slope * t + intercept)
    return DecayFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), int(t.size))


def fit_decay_exponents(diag: FlowDiagnostics, window=None, quantities=DECAY_QUANTITIES) -> dict[str, DecayFit]:
    """Slope of ``log(quantity)`` against ``t`` over ``window`` (default: last half of the run)."""
    t = diag.t
    if window is None:
        window = (0.5 * t[-1], t[-1])
    lo, hi = window
    sel = (t >= lo - 1e-9) & (t <= hi + 1e-9)
    return {q: fit_log_slope(t[sel], diag.column(q)[sel]) for q in quantities}
