"""Billiard map on the boundary phase space, its lift, and the linearized
Poincare map.

Phase points are (s, theta) with s arclength and theta in (0, pi) the angle
between the outgoing ray and the forward tangent, so the unit circle maps
(s, theta) -> (s + 2 theta, theta).  The canonical fiber coordinate used for
Jacobians is sigma = -cos(theta), conjugate to s under the generating
function h(s, s') = -|x(s) - x(s')|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .chords import LinkGeometry
from .errors import GlancingRay, NotPeriodic, RootFindFailure

_GLANCING_TOL = 1e-10


@dataclass(frozen=True)
class PhasePoint:
    s: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.theta < np.pi):
            raise GlancingRay(f"theta = {self.theta} outside (0, pi)")

    @property
    def sigma(self):
        return -np.cos(self.theta)


@dataclass(frozen=True)
class PoincareMap:
    """Differential of beta^q at a periodic orbit in (s, sigma) coordinates."""

    matrix: np.ndarray

    @property
    def det(self):
        return float(np.linalg.det(self.matrix))

    def det_id_minus(self):
        return float(np.linalg.det(np.eye(2) - self.matrix))


def _forward_arc(domain, p):
    """Arclength increment to the next impact, in (0, ell)."""
    if min(p.theta, np.pi - p.theta) < _GLANCING_TOL:
        raise GlancingRay(f"theta = {p.theta} within tolerance of glancing")
    pos, tang, norm, _ = domain.sample(p.s)
    d = np.cos(p.theta) * tang + np.sin(p.theta) * norm
    kmax = float(np.max(domain.tables.curvature))

    def g(arc):
        q = domain.sample(p.s + arc)[0]
        return d[0] * (q[1] - pos[1]) - d[1] * (q[0] - pos[0])

    # the tangent turns by theta + theta' between impacts, so the arc to the
    # next impact is at least theta/kmax and at most ell - (pi - theta)/kmax
    lo = 0.9 * p.theta / kmax
    hi = domain.ell - 0.9 * (np.pi - p.theta) / kmax
    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 < ghi):
        # fall back to a dense scan for a sign change
        grid = np.linspace(lo, hi, 512)
        vals = np.array([g(a) for a in grid])
        idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
        if len(idx) == 0:
            raise RootFindFailure("no forward boundary intersection found")
        lo, hi = grid[idx[0]], grid[idx[0] + 1]
    try:
        arc = brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise RootFindFailure(str(exc)) from exc
    return arc, d


def billiard_map(domain, p):
    """One application of the billiard map; returns the next phase point."""
    arc, d = _forward_arc(domain, p)
    s_next = np.mod(p.s + arc, domain.ell)
    _, tang, _, _ = domain.sample(p.s + arc)
    cos_next = float(np.clip(np.dot(tang, d), -1.0, 1.0))
    return PhasePoint(s=float(s_next), theta=float(np.arccos(cos_next)))


def iterate(domain, p, n):
    """Iterate the billiard map n times on the continuous lift.

    Returns the list of phase points after each bounce and the winding
    number floor((s_n - s_0)/ell) accumulated on the lift normalized by
    beta(s, 0) = (s, 0).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    points = []
    lift = p.s
    cur = p
    for _ in range(n):
        arc, d = _forward_arc(domain, cur)
        lift += arc
        _, tang, _, _ = domain.sample(lift)
        cos_next = float(np.clip(np.dot(tang, d), -1.0, 1.0))
        cur = PhasePoint(s=float(np.mod(lift, domain.ell)), theta=float(np.arccos(cos_next)))
        points.append(cur)
    winding = int(np.floor((lift - p.s) / domain.ell + 1e-9))
    return points, winding


def bounce_jacobian(domain, s_a, s_b):
    """Differential of one bounce (s_a, sigma_a) -> (s_b, sigma_b).

    Uses the generating function h(s, s') = -|x(s) - x(s')| whose mixed
    partials determine the twist-map differential.
    """
    geom = LinkGeometry(domain, np.array([s_a, s_b]))
    c = geom.lengths[0]
    c_ss = (1.0 - geom.t_out[0] ** 2) / c - geom.kappa[0] * geom.n_out[0]
    c_tt = (1.0 - geom.t_in[0] ** 2) / c - geom.kappa[1] * geom.n_in[0]
    c_st = (-np.dot(geom.tangent[0], geom.tangent[1]) + geom.t_out[0] * geom.t_in[0]) / c
    return np.array(
        [
            [-c_ss / c_st, 1.0 / c_st],
            [-c_st + c_tt * c_ss / c_st, -c_tt / c_st],
        ]
    )


def linearized_poincare(domain, config, grad_tol=1e-9):
    """Product of per-bounce differentials along a closed configuration."""
    from .length import grad_length, length_functional

    S = np.asarray(config.S if hasattr(config, "S") else config, dtype=float)
    grad = grad_length(domain, S)
    if np.linalg.norm(grad) > grad_tol * max(1.0, length_functional(domain, S)):
        raise NotPeriodic(
            f"gradient norm {np.linalg.norm(grad):.2e} too large for a periodic orbit"
        )
    q = len(S)
    mat = np.eye(2)
    for i in range(q):
        mat = bounce_jacobian(domain, S[i], S[(i + 1) % q]) @ mat
    return PoincareMap(matrix=mat)
