"""Smooth strictly convex planar domains and their normal deformation families.

Boundaries are specified by a finite Fourier support function h(phi); strict
convexity is the single inequality h + h'' > 0, and the closed curve with
outward normal angle phi is x(phi) = h n(phi) + h' t(phi).  Derived domains
(normal graphs over a base boundary) reuse the same machinery through exact
Taylor jets in arclength, so curvature and its first two arclength
derivatives are available to roundoff for any nesting depth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import series as ts
from .errors import (
    ConvexityLost,
    DegenerateConstraint,
    InvalidSpec,
    Nonconvex,
    RankMismatch,
)

_DEFAULT_ORDER = 6  # highest boundary jet carried through reparametrization
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _rot90(v):
    """Rotate 2-vectors by +90 degrees (last axis is the component axis)."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


@dataclass(frozen=True)
class DomainSpec:
    """Finite Fourier coefficients of the support function h(phi).

    support_cos[m] multiplies cos(m phi), support_sin[m] multiplies
    sin(m phi); support_sin[0] is ignored.  resolution is the arclength
    table node count (None picks max(2048, 64 * highest mode)).
    """

    support_cos: tuple
    support_sin: tuple = ()
    resolution: int | None = None

    def __post_init__(self):
        cos = tuple(float(c) for c in self.support_cos)
        sin = tuple(float(c) for c in self.support_sin)
        object.__setattr__(self, "support_cos", cos)
        object.__setattr__(self, "support_sin", sin)
        if len(cos) == 0:
            raise InvalidSpec("support_cos must be non-empty")
        if not all(np.isfinite(cos)) or not all(np.isfinite(sin)):
            raise InvalidSpec("support coefficients must be finite")
        if self.resolution is not None and self.resolution <= 0:
            raise InvalidSpec("resolution must be positive")

    @property
    def max_mode(self):
        return max(len(self.support_cos), len(self.support_sin)) - 1

    def table_size(self):
        if self.resolution is not None:
            return int(self.resolution)
        return max(2048, 64 * max(1, self.max_mode))


def domain_spec_from_json(text_or_obj):
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    try:
        return DomainSpec(
            support_cos=tuple(obj["support_cos"]),
            support_sin=tuple(obj.get("support_sin", ())),
            resolution=obj.get("resolution"),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed domain spec: {exc}") from exc


def domain_spec_to_json(spec):
    return json.dumps(
        {
            "support_cos": list(spec.support_cos),
            "support_sin": list(spec.support_sin),
            "resolution": spec.resolution,
        },
        sort_keys=True,
    )


class _SupportCurve:
    """Closed convex curve from a finite-Fourier support function.

    Natural parameter is the outward normal angle phi, offset so that the
    curve starts at the point with unit tangent (1, 0); positions are
    translated so that starting point is the origin.
    """

    def __init__(self, spec):
        self.spec = spec
        n = max(len(spec.support_cos), len(spec.support_sin))
        self.a = np.zeros(n)
        self.b = np.zeros(n)
        self.a[: len(spec.support_cos)] = spec.support_cos
        self.b[: len(spec.support_sin)] = spec.support_sin
        self.modes = np.arange(n)
        self.phi0 = -0.5 * np.pi
        self.period = 2.0 * np.pi
        self.origin = np.zeros(2)
        self.origin = self._position_raw(np.array([self.phi0]))[0]

    def h_derivs(self, phi, jmax):
        """h^(j)(phi) for j = 0..jmax; shape (jmax+1, *phi.shape)."""
        phi = np.asarray(phi, dtype=float)
        out = np.zeros((jmax + 1,) + phi.shape)
        for j in range(jmax + 1):
            mj = self.modes**j
            arg = np.multiply.outer(phi, self.modes) + 0.5 * np.pi * j
            out[j] = np.cos(arg) @ (self.a * mj) + np.sin(arg) @ (self.b * mj)
        return out

    def radius_of_curvature(self, phi):
        d = self.h_derivs(phi, 2)
        return d[0] + d[2]

    def _position_raw(self, phi):
        d = self.h_derivs(phi, 1)
        n = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        t = _rot90(n)
        return d[0][..., None] * n + d[1][..., None] * t

    def arclength_of_param(self, phi):
        """Closed-form integral of h + h'' from phi0 to phi."""
        phi = np.asarray(phi, dtype=float)
        # antiderivative of (1 - m^2) (a_m cos m phi + b_m sin m phi)
        def anti(p):
            total = self.a[0] * p
            if len(self.modes) > 1:
                m = self.modes[1:]
                coeff = 1.0 - m.astype(float) ** 2
                sin_part = np.sin(np.multiply.outer(p, m)) @ (coeff * self.a[1:] / m)
                cos_part = np.cos(np.multiply.outer(p, m)) @ (coeff * self.b[1:] / m)
                total = total + sin_part - cos_part
            return total

        return anti(phi) - anti(np.asarray(self.phi0))

    def speed(self, phi):
        return self.radius_of_curvature(phi)

    def velocity(self, phi):
        phi = np.asarray(phi, dtype=float)
        t = np.stack([-np.sin(phi), np.cos(phi)], axis=-1)
        return self.radius_of_curvature(phi)[..., None] * t

    def position_series(self, phi, order):
        """Taylor coefficients of x(phi + delta) in delta; shape (order+1, n, 2)."""
        phi = np.asarray(phi, dtype=float)
        hd = self.h_derivs(phi, order + 1)
        # x^(k) = alpha_k n + beta_k t with the recursion (n' = t, t' = -n):
        #   alpha_{k+1} = alpha_k' - beta_k,  beta_{k+1} = beta_k' + alpha_k,
        # where alpha_0 = h, beta_0 = h' are linear in h-derivatives.
        n_h = order + 2
        alpha = np.zeros(n_h)
        beta = np.zeros(n_h)
        alpha[0] = 1.0
        beta[1] = 1.0
        nvec = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        tvec = _rot90(nvec)
        out = np.zeros((order + 1,) + phi.shape + (2,))
        fact = 1.0
        for k in range(order + 1):
            if k > 0:
                fact *= k
                # d/dphi maps h^(j) to h^(j+1): shift coefficient indices up
                alpha_d = np.zeros(n_h)
                beta_d = np.zeros(n_h)
                alpha_d[1:] = alpha[:-1]
                beta_d[1:] = beta[:-1]
                alpha, beta = alpha_d - beta, beta_d + alpha
            a_val = np.tensordot(alpha[: order + 2], hd, axes=(0, 0))
            b_val = np.tensordot(beta[: order + 2], hd, axes=(0, 0))
            out[k] = (a_val[..., None] * nvec + b_val[..., None] * tvec) / fact
        out[0] = out[0] - self.origin
        return out


class _NormalGraphCurve:
    """Curve y(t) = x(t) + eta(t) nu_out(t) over a base domain.

    The natural parameter t is the base domain's arclength; eta is a smooth
    periodic displacement field queried through Taylor series.
    """

    def __init__(self, base_domain, displacement):
        self.base = base_domain
        self.displacement = displacement
        self.period = base_domain.ell

    def position_series(self, t, order):
        t = np.asarray(t, dtype=float)
        xj = self.base.position_jets(t, order + 1)
        xs = ts.series_from_jets(xj)
        tangent = ts.s_derivative(xs)  # series of T(t), order entries
        nu_out = -_rot90(tangent)  # inward normal is tangent rotated +90
        eta = self.displacement.series(t, order)
        shift = np.stack(
            [ts.s_mul(eta, nu_out[..., 0]), ts.s_mul(eta, nu_out[..., 1])], axis=-1
        )
        return xs[: order + 1] + shift

    def speed(self, t):
        s = self.position_series(t, 1)
        d = s[1]
        return np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2)

    def velocity(self, t):
        return self.position_series(t, 1)[1]


@dataclass(frozen=True)
class BoundaryTables:
    """Uniform arclength samples of the boundary data."""

    s: np.ndarray
    position: np.ndarray
    tangent_angle: np.ndarray
    curvature: np.ndarray
    param: np.ndarray  # natural curve parameter at each node


class Domain:
    """Immutable convex boundary with exact arclength jets and lookup tables."""

    def __init__(self, curve, table_size, spec=None, convexity_margin=1e-12):
        self.curve = curve
        self.spec = spec
        self._build(table_size, convexity_margin)

    # -- construction -------------------------------------------------------

    def _build(self, n, margin):
        curve = self.curve
        period = curve.period
        t_nodes = np.linspace(0.0, period, n, endpoint=False)
        dt = period / n
        # per-interval 10-point Gauss-Legendre of the velocity
        mid = t_nodes[:, None] + 0.5 * dt * (1.0 + _GAUSS_NODES)[None, :]
        vel = curve.velocity(mid.ravel()).reshape(n, len(_GAUSS_NODES), 2)
        speeds = np.hypot(vel[..., 0], vel[..., 1])
        seg = 0.5 * dt * speeds @ _GAUSS_WEIGHTS
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.ell = float(cum[-1])
        closure_vec = 0.5 * dt * np.einsum("ngc,g->c", vel, _GAUSS_WEIGHTS)
        if np.max(np.abs(closure_vec)) > 1e-10:
            raise InvalidSpec(
                f"boundary fails to close: {np.max(np.abs(closure_vec)):.2e}"
            )
        self._t_nodes = t_nodes
        self._sigma_nodes = cum[:-1]
        # convexity scan at 8x resolution
        t_fine = np.linspace(0.0, period, 8 * n, endpoint=False)
        kappa_fine = self._curvature_at_param(t_fine)
        if np.min(kappa_fine) <= margin:
            raise (Nonconvex if isinstance(curve, _SupportCurve) else ConvexityLost)(
                f"curvature min {np.min(kappa_fine):.3e} not strictly positive"
            )
        s_nodes = np.linspace(0.0, self.ell, n, endpoint=False)
        t_of_s = self._invert_arclength(s_nodes)
        jets = self.position_jets_param(t_of_s, 2)
        pos = jets[0]
        tang = jets[1]
        kap = tang[:, 0] * jets[2][:, 1] - tang[:, 1] * jets[2][:, 0]
        angle = np.unwrap(np.arctan2(tang[:, 1], tang[:, 0]))
        angle -= angle[0] - np.arctan2(tang[0, 1], tang[0, 0])
        self.tables = BoundaryTables(
            s=s_nodes, position=pos, tangent_angle=angle, curvature=kap, param=t_of_s
        )
        speed_err = np.max(np.abs(np.hypot(tang[:, 0], tang[:, 1]) - 1.0))
        if speed_err > 1e-10:
            raise InvalidSpec(f"arclength parametrization off by {speed_err:.2e}")

    def _curvature_at_param(self, t):
        s = self.curve.position_series(t, 2)
        d1, d2 = s[1], 2.0 * s[2]
        speed2 = d1[..., 0] ** 2 + d1[..., 1] ** 2
        cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        return cross / speed2**1.5

    def _arclength_at_param(self, t):
        curve = self.curve
        if isinstance(curve, _SupportCurve):
            return curve.arclength_of_param(t)
        t = np.asarray(t, dtype=float)
        idx = np.clip(
            np.searchsorted(self._t_nodes, t, side="right") - 1, 0, len(self._t_nodes) - 1
        )
        t0 = self._t_nodes[idx]
        base = self._sigma_nodes[idx]
        half = 0.5 * (t - t0)
        nodes = t0[..., None] + half[..., None] * (1.0 + _GAUSS_NODES)
        sp = curve.speed(nodes.ravel()).reshape(nodes.shape)
        return base + half * (sp @ _GAUSS_WEIGHTS)

    def _invert_arclength(self, s):
        """Newton inversion of s(t), vectorized; s reduced mod ell by caller."""
        t = np.interp(s, self._sigma_nodes, self._t_nodes)
        for _ in range(6):
            resid = self._arclength_at_param(t) - s
            t = t - resid / self.curve.speed(t)
        return t

    # -- evaluation ----------------------------------------------------------

    def position_jets_param(self, t, order):
        """Jets d^k x / ds^k at the points with natural parameter t."""
        curve = self.curve
        xs = curve.position_series(t, order + 1)
        d1 = ts.s_derivative(xs)
        speed = ts.s_sqrt(ts.s_mul(d1[..., 0], d1[..., 0]) + ts.s_mul(d1[..., 1], d1[..., 1]))
        w = ts.s_integral(speed, order=order + 1)  # arclength offset series
        delta = ts.s_revert(w)
        comp = np.stack(
            [ts.s_compose(xs[..., 0], delta), ts.s_compose(xs[..., 1], delta)], axis=-1
        )
        return ts.jets_from_series(comp)[: order + 1]

    def position_jets(self, s, order):
        """Jets with respect to this domain's own arclength at s (mod ell)."""
        s = np.mod(np.asarray(s, dtype=float), self.ell)
        t = self._invert_arclength(s)
        return self.position_jets_param(t, order)

    def param_to_arclength(self, t):
        return np.mod(self._arclength_at_param(np.asarray(t, dtype=float)), self.ell)

    def sample(self, s):
        """(position, unit tangent, inward normal, curvature) at arclength s."""
        jets = self.position_jets(np.atleast_1d(s), 2)
        pos, tang, acc = jets[0], jets[1], jets[2]
        kappa = tang[..., 0] * acc[..., 1] - tang[..., 1] * acc[..., 0]
        normal = _rot90(tang)
        if np.isscalar(s) or np.ndim(s) == 0:
            return pos[0], tang[0], normal[0], float(kappa[0])
        return pos, tang, normal, kappa

    def curvature_jet(self, s, m):
        """kappa, kappa', ..., kappa^(m) with respect to arclength."""
        jets = self.position_jets(np.atleast_1d(s), m + 2)
        out = np.zeros((m + 1,) + jets.shape[1:-1])

        def cross(a, b):
            return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

        # kappa = <x', x''>_cross; derivatives follow by Leibniz on the cross
        # product of jet pairs.
        for j in range(m + 1):
            acc = 0.0
            for i in range(j + 1):
                acc = acc + _binom(j, i) * cross(jets[1 + i], jets[2 + j - i])
            out[j] = acc
        return out


def _binom(n, k):
    from math import comb

    return float(comb(n, k))


def build_domain(spec):
    """Construct a Domain from a support-function specification."""
    if isinstance(spec, dict):
        spec = domain_spec_from_json(spec)
    curve = _SupportCurve(spec)
    phi_scan = np.linspace(0.0, 2 * np.pi, 16 * spec.table_size(), endpoint=False)
    rho = curve.radius_of_curvature(phi_scan)
    if np.min(rho) <= 1e-12:
        raise Nonconvex(
            f"support function violates h + h'' > 0 (min {np.min(rho):.6f})"
        )
    return Domain(curve, spec.table_size(), spec=spec)


def unit_circle(resolution=None):
    return build_domain(DomainSpec(support_cos=(1.0,), resolution=resolution))


def sample_boundary(domain, s):
    """Position, unit tangent, inward normal and curvature at arclength s."""
    return domain.sample(s)


# ---------------------------------------------------------------------------
# Deformation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BumpSpec:
    center_s: float
    mu1: float
    half_width: float


class _BumpField:
    """Sum of compactly supported even bumps b(u) = u^2 exp(1 - 1/(1-u^2)).

    Each bump vanishes to first order at its center; the second derivative
    at the center is -mu1 so the deformed curvature there is kappa + eps*mu1.
    """

    _EDGE = 0.9995

    def __init__(self, bumps, period):
        self.bumps = tuple(bumps)
        self.period = period

    def _u_series(self, t, order, bump):
        t = np.asarray(t, dtype=float)
        d = np.mod(t - bump.center_s + 0.5 * self.period, self.period) - 0.5 * self.period
        u = np.zeros((order + 1,) + t.shape)
        u[0] = d / bump.half_width
        if order >= 1:
            u[1] = 1.0 / bump.half_width
        return u

    def series(self, t, order):
        t = np.asarray(t, dtype=float)
        total = np.zeros((order + 1,) + t.shape)
        for bump in self.bumps:
            u = self._u_series(t, order, bump)
            inside = np.abs(u[0]) < self._EDGE
            if not np.any(inside):
                continue
            ui = u[:, inside]
            one_minus = ts.s_const(np.ones(ui.shape[1:]), order) - ts.s_mul(ui, ui)
            expo = ts.s_exp(ts.s_const(np.ones(ui.shape[1:]), order) - ts.s_reciprocal(one_minus))
            profile = ts.s_mul(ts.s_mul(ui, ui), expo)
            amp = -bump.mu1 * bump.half_width**2 / 2.0
            total[:, inside] += amp * profile
        return total

    def max_abs_second_derivative(self, n=4096):
        t = np.linspace(0.0, self.period, n, endpoint=False)
        return float(np.max(np.abs(ts.jets_from_series(self.series(t, 2))[2])))


class _TrigField:
    """Trigonometric displacement field sum_m a_m cos(2 pi m t/L) + b_m sin(...).

    Used for analytic perturbations with prescribed two-jets at the
    deformation centers; unlike compact bumps it has no flat directions, so
    perturbed domains keep a finite periodic-orbit set near the base orbit.
    """

    def __init__(self, a, b, period):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.period = period
        self.modes = np.arange(len(self.a))

    def series(self, t, order):
        t = np.asarray(t, dtype=float)
        om = 2.0 * np.pi / self.period
        out = np.zeros((order + 1,) + t.shape)
        fact = 1.0
        for j in range(order + 1):
            if j > 1:
                fact *= j
            mj = (self.modes * om) ** j
            arg = np.multiply.outer(t, self.modes * om) + 0.5 * np.pi * j
            out[j] = (np.cos(arg) @ (self.a * mj) + np.sin(arg) @ (self.b * mj)) / fact
        return out

    def max_abs_second_derivative(self, n=4096):
        t = np.linspace(0.0, self.period, n, endpoint=False)
        return float(np.max(np.abs(ts.jets_from_series(self.series(t, 2))[2])))


def trig_hermite_field(centers, mu1s, period, n_modes=None):
    """Least-norm trig field with value 0, slope 0, second derivative -mu1
    at each center."""
    centers = np.asarray(centers, dtype=float)
    mu1s = np.asarray(mu1s, dtype=float)
    q = len(centers)
    if n_modes is None:
        n_modes = 3 * q + 2
    om = 2.0 * np.pi / period
    m = np.arange(n_modes + 1)
    rows = []
    rhs = []
    for c, mu in zip(centers, mu1s):
        ang = m * om * c
        rows.append(np.concatenate([np.cos(ang), np.sin(ang)[1:]]))
        rhs.append(0.0)
        rows.append(np.concatenate([-m * om * np.sin(ang), (m * om * np.cos(ang))[1:]]))
        rhs.append(0.0)
        rows.append(
            np.concatenate(
                [-((m * om) ** 2) * np.cos(ang), (-((m * om) ** 2) * np.sin(ang))[1:]]
            )
        )
        rhs.append(-mu)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    a = sol[: n_modes + 1]
    b = np.concatenate([[0.0], sol[n_modes + 1 :]])
    return _TrigField(a, b, period)


@dataclass(frozen=True)
class DeformationFamily:
    """One-parameter family Omega_eps = {x + eps * field(x) nu_out}."""

    base: Domain
    bumps: tuple
    epsilon_max: float
    profile: str = "bump"
    field: object = field(default=None, repr=False, compare=False)

    def displacement(self):
        if self.field is not None:
            return self.field
        if self.profile == "bump":
            return _BumpField(self.bumps, self.base.ell)
        if self.profile == "cosine":
            return trig_hermite_field(
                [b.center_s for b in self.bumps],
                [b.mu1 for b in self.bumps],
                self.base.ell,
            )
        raise InvalidSpec(f"unknown profile {self.profile!r}")


def make_deformation_family(base, bumps, profile="bump", epsilon_max=None):
    bumps = tuple(
        b if isinstance(b, BumpSpec) else BumpSpec(*b) for b in bumps
    )
    if profile == "bump" and len(bumps) > 1:
        # supports must be pairwise disjoint on the circle
        items = sorted(bumps, key=lambda b: b.center_s % base.ell)
        for i, bi in enumerate(items):
            bj = items[(i + 1) % len(items)]
            gap = (bj.center_s - bi.center_s) % base.ell
            if gap <= bi.half_width + bj.half_width:
                raise InvalidSpec("bump supports overlap")
    fld = None
    fam = DeformationFamily(base=base, bumps=bumps, epsilon_max=0.0, profile=profile, field=fld)
    disp = fam.displacement()
    if epsilon_max is None:
        d2 = disp.max_abs_second_derivative()
        kmin = float(np.min(base.tables.curvature))
        epsilon_max = 0.9 * kmin / max(d2, 1e-30)
    return DeformationFamily(
        base=base, bumps=bumps, epsilon_max=float(epsilon_max), profile=profile, field=disp
    )


def family_from_json(base, text_or_obj, profile="bump"):
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    try:
        bumps = [BumpSpec(b["center_s"], b["mu1"], b["half_width"]) for b in obj]
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed deformation file: {exc}") from exc
    return make_deformation_family(base, bumps, profile=profile)


def family_to_json(family):
    return json.dumps(
        [
            {"center_s": b.center_s, "mu1": b.mu1, "half_width": b.half_width}
            for b in family.bumps
        ],
        sort_keys=True,
    )


class _ScaledField:
    def __init__(self, inner, scale):
        self.inner = inner
        self.scale = scale

    def series(self, t, order):
        return self.scale * self.inner.series(t, order)


def deform(family, eps):
    """Domain obtained by displacing the base boundary by eps * field."""
    if eps < 0 or eps > family.epsilon_max:
        raise ConvexityLost(
            f"eps {eps} outside [0, {family.epsilon_max:.3g}] for this family"
        )
    if eps == 0.0:
        return family.base
    disp = _ScaledField(family.displacement(), eps)
    curve = _NormalGraphCurve(family.base, disp)
    size = len(family.base.tables.s)
    return Domain(curve, size, spec=None)


def design_perturbation(orbit, target_c, weights=None, half_width=None, profile="bump"):
    """Deformation family whose predicted c_gamma equals target_c.

    The linear constraint is Tr(adj(H0) Hdot) = target_c with
    Hdot = diag(-2 cos theta_i mu1_i); weights fixes the direction of the
    mu1 vector (defaults to the constraint gradient).
    """
    H = orbit.hessian
    q = H.shape[0]
    evals, evecs = np.linalg.eigh(H)
    order = np.argsort(np.abs(evals))
    small, rest = order[0], order[1:]
    scale = np.max(np.abs(evals))
    if np.abs(evals[order[1]]) <= orbit.degeneracy_tol * scale or (
        np.abs(evals[small]) > orbit.degeneracy_tol * scale
    ):
        raise RankMismatch("orbit Hessian must have rank exactly q - 1")
    adj_diag = np.prod(evals[rest]) * evecs[:, small] ** 2
    grad_c = -2.0 * np.cos(orbit.angles) * adj_diag
    if weights is None:
        weights = grad_c
    weights = np.asarray(weights, dtype=float)
    denom = float(grad_c @ weights)
    if abs(denom) < 1e-12 * max(1.0, float(np.linalg.norm(grad_c) * np.linalg.norm(weights))):
        raise DegenerateConstraint("weights lie in the kernel of Tr(adj(H) Hdot)")
    mu1 = weights * (target_c / denom)
    S = np.asarray(orbit.config.S)
    base = orbit.domain
    centers = np.sort(np.mod(S, base.ell))
    arc_gaps = np.diff(np.concatenate([centers, [centers[0] + base.ell]]))
    if half_width is None:
        half_width = 0.35 * float(np.min(arc_gaps))
    bumps = [BumpSpec(float(s), float(m), float(half_width)) for s, m in zip(S, mu1)]
    return make_deformation_family(base, bumps, profile=profile)
