"""Length functional on reflection configurations: closed-form derivatives,
variational periodic-orbit search, degeneracy analysis, and deformation fits.

The Hessian in arclength coordinates is cyclic tridiagonal; at a critical
point its entries reduce to the classical reflection-angle/curvature form.
Critical points are saddles, so the orbit search runs Newton on the gradient
with an eigenvalue-safeguarded pseudo-inverse step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .billiard import PhasePoint, iterate, linearized_poincare
from .chords import LinkGeometry, chord_partial, chord_taylor
from .errors import (
    CoincidentPoints,
    DegenerateFit,
    MaxIterations,
    NoBranch,
    RankMismatch,
    UnsupportedPeriod,
    WrongWinding,
)
from .geometry import deform


@dataclass(frozen=True)
class OrbitConfiguration:
    """Reflection arclengths S = (s_1 .. s_q) and winding number p."""

    S: tuple
    p: int = 1

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(float(s) for s in self.S))
        if len(self.S) < 2:
            raise ValueError("need at least two reflection points")
        if np.gcd(int(self.p), len(self.S)) != 1:
            raise ValueError("rotation number p/q must be in lowest terms")

    @property
    def q(self):
        return len(self.S)


def length_functional(domain, S):
    """Total chord length of the closed polygon with vertices x(s_i)."""
    geom = LinkGeometry(domain, _coords(S))
    return float(np.sum(geom.lengths))


def grad_length(domain, S):
    """Gradient of the length functional: dL/ds_i = T_i . (e_{i-1} - e_i)."""
    geom = LinkGeometry(domain, _coords(S))
    prev = np.roll(geom.e, 1, axis=0)
    return np.einsum("ij,ij->i", geom.tangent, prev - geom.e)


def hessian_length(domain, S):
    """Cyclic tridiagonal Hessian of the length functional.

    Valid at any configuration; at a critical point the diagonal reduces to
    cos^2(th_i)(1/l_{i-1} + 1/l_i) - 2 kappa_i cos(th_i) and the off-diagonal
    to b_i = cos(th_i) cos(th_{i+1}) / l_i.
    """
    S = _coords(S)
    q = len(S)
    if q < 3:
        raise UnsupportedPeriod("Hessian assembly requires q >= 3")
    geom = LinkGeometry(domain, S)
    c_ss, c_st, c_tt = geom.chord_second_partials()
    H = np.zeros((q, q))
    idx = np.arange(q)
    nxt = geom.nxt
    np.add.at(H, (idx, idx), c_ss)
    np.add.at(H, (nxt, nxt), c_tt)
    np.add.at(H, (idx, nxt), c_st)
    np.add.at(H, (nxt, idx), c_st)
    return H


def third_derivative_tensor(domain, S):
    """Dense symmetric q^3 tensor of third partials of the length functional."""
    return _derivative_tensor(domain, _coords(S), order=3)


def fourth_derivative_tensor(domain, S):
    return _derivative_tensor(domain, _coords(S), order=4)


def _derivative_tensor(domain, S, order):
    q = len(S)
    if q < 3:
        raise UnsupportedPeriod("derivative tensors require q >= 3")
    nxt = np.roll(np.arange(q), -1)
    taylor = chord_taylor(domain, S, S[nxt], degree=order)
    T = np.zeros((q,) * order)
    for link in range(q):
        a, b = link, nxt[link]
        for i in range(order + 1):
            j = order - i
            val = chord_partial(taylor[..., link], i, j)
            idx = (a,) * i + (b,) * j
            for perm in _distinct_permutations(idx):
                T[perm] = T[perm] + val
    return T


def _distinct_permutations(idx):
    from itertools import permutations

    return sorted(set(permutations(idx)))


def _coords(S):
    if isinstance(S, OrbitConfiguration):
        return np.asarray(S.S, dtype=float)
    return np.asarray(S, dtype=float)


# ---------------------------------------------------------------------------
# Periodic orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicOrbit:
    domain: object
    config: OrbitConfiguration
    length: float
    grad_norm: float
    hessian: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    signature: int
    angles: np.ndarray  # reflection angles from the inward normal
    link_lengths: np.ndarray
    curvatures: np.ndarray
    poincare: object
    degeneracy_tol: float

    @property
    def q(self):
        return self.config.q

    @property
    def p(self):
        return self.config.p

    def off_diagonal(self):
        """The b_i = cos(th_i) cos(th_{i+1}) / l_i entries."""
        cos = np.cos(self.angles)
        return cos * np.roll(cos, -1) / self.link_lengths


@dataclass(frozen=True)
class OrbitClassification:
    degenerate: bool
    rank: int
    signature: int | None = None
    nonzero_signature: int | None = None


def _orbit_record(domain, S, p, degeneracy_tol):
    geom = LinkGeometry(domain, S)
    q = len(S)
    H = hessian_length(domain, S)
    evals = np.sort(np.linalg.eigvalsh(H))
    scale = np.max(np.abs(evals))
    rank = int(np.sum(np.abs(evals) > degeneracy_tol * scale))
    signature = int(np.sum(evals > degeneracy_tol * scale) - np.sum(evals < -degeneracy_tol * scale))
    grad = grad_length(domain, S)
    length = float(np.sum(geom.lengths))
    cos_angle = 0.5 * (geom.n_out + np.roll(geom.n_in, 1))
    angles = np.arccos(np.clip(cos_angle, -1.0, 1.0))
    config = OrbitConfiguration(S=tuple(S), p=p)
    poincare = linearized_poincare(domain, config, grad_tol=1e-7)
    return PeriodicOrbit(
        domain=domain,
        config=config,
        length=length,
        grad_norm=float(np.linalg.norm(grad)),
        hessian=H,
        eigenvalues=evals,
        rank=rank,
        signature=signature,
        angles=angles,
        link_lengths=geom.lengths.copy(),
        curvatures=geom.kappa.copy(),
        poincare=poincare,
        degeneracy_tol=degeneracy_tol,
    )


def _winding_of(S, ell):
    """Winding number of the forward cyclic configuration."""
    arcs = np.mod(np.diff(np.append(S, S[0])), ell)
    total = np.sum(arcs)
    return int(np.round(total / ell)), float(np.abs(total / ell - np.round(total / ell)))


def _newton_orbit(domain, S0, tol, max_iter=60):
    """Saddle-capable Newton on grad L with eigenvalue-safeguarded steps."""
    S = np.array(S0, dtype=float)
    ell = domain.ell
    min_chord = 1e-6 * ell
    for _ in range(max_iter):
        try:
            g = grad_length(domain, S)
        except CoincidentPoints:
            return None
        L = length_functional(domain, S)
        gnorm = np.linalg.norm(g)
        if gnorm < tol * L:
            return S
        H = hessian_length(domain, S)
        evals, evecs = np.linalg.eigh(H)
        scale = np.max(np.abs(evals))
        inv = np.where(np.abs(evals) > 1e-10 * scale, 1.0 / np.where(evals == 0, 1.0, evals), 0.0)
        step = -evecs @ (inv * (evecs.T @ g))
        maxstep = 0.25 * ell / len(S)
        norm = np.linalg.norm(step)
        if norm > maxstep:
            step *= maxstep / norm
        # backtracking: accept only steps that do not blow up the residual
        alpha = 1.0
        for _ in range(20):
            trial = S + alpha * step
            arcs = np.mod(np.diff(np.append(trial, trial[0])), ell)
            if np.min(arcs) > min_chord:
                try:
                    gt = np.linalg.norm(grad_length(domain, trial))
                except CoincidentPoints:
                    gt = np.inf
                if gt < gnorm * (1.0 + 1e-9) or gt < tol * L * 10:
                    S = trial
                    break
            alpha *= 0.5
        else:
            return None
        gnorm_prev = gnorm
    return None


def find_periodic_orbit(
    domain,
    p,
    q,
    seed=None,
    tol=1e-9,
    degeneracy_tol=1e-8,
    n_starts=8,
    rng_seed=0,
    max_iter=60,
):
    """Locate a (p, q) periodic orbit as a critical point of the length.

    Multi-start Newton over rotation-ordered seeds; the best converged start
    (lexicographic by residual then by s_1) wins.  Raises WrongWinding if an
    explicit seed converges to a different rotation class, MaxIterations if
    no start converges.
    """
    if np.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    if q < 3:
        raise UnsupportedPeriod("orbit analysis requires q >= 3")
    ell = domain.ell
    explicit = seed is not None
    rng = np.random.default_rng(rng_seed)
    seeds = []
    if explicit:
        seeds.append(np.asarray(seed.S if hasattr(seed, "S") else seed, dtype=float))
    else:
        base = np.arange(q) * p * ell / q
        for k in range(n_starts):
            offset = k * ell / (q * n_starts)
            jitter = 0.0 if k == 0 else rng.normal(scale=0.01 * ell / q, size=q)
            seeds.append(np.mod(base + offset + jitter, ell))
    results = []
    for S0 in seeds:
        S = _newton_orbit(domain, S0, tol, max_iter=max_iter)
        if S is None:
            continue
        winding, drift = _winding_of(S, ell)
        if drift > 1e-6:
            continue
        if winding != p:
            if explicit:
                raise WrongWinding(f"converged to rotation class {winding}/{q}")
            continue
        S = np.mod(S, ell)
        gnorm = np.linalg.norm(grad_length(domain, S))
        results.append((gnorm, float(S[0]), S))
    if not results:
        if explicit:
            raise MaxIterations("Newton did not converge from the given seed")
        raise MaxIterations(f"no ({p},{q}) orbit found from {len(seeds)} starts")
    results.sort(key=lambda r: (r[0], r[1]))
    S = results[0][2]
    return _orbit_record(domain, S, p, degeneracy_tol)


def classify_orbit(orbit, degeneracy_tol=None):
    """Nondegenerate(signature) or Degenerate(rank) by relative eigenvalue size."""
    tol = orbit.degeneracy_tol if degeneracy_tol is None else degeneracy_tol
    evals = np.asarray(orbit.eigenvalues)
    scale = np.max(np.abs(evals))
    small = np.abs(evals) <= tol * scale
    rank = int(np.sum(~small))
    if np.any(small):
        nz = evals[~small]
        return OrbitClassification(
            degenerate=True,
            rank=rank,
            signature=None,
            nonzero_signature=int(np.sum(nz > 0) - np.sum(nz < 0)),
        )
    return OrbitClassification(
        degenerate=False,
        rank=rank,
        signature=int(np.sum(evals > 0) - np.sum(evals < 0)),
    )


def verify_prod_identity(orbit, floor=1e-12):
    """Relative residual of det H = (-1)^{q+1} det(Id - P) prod b_i.

    Both sides vanish together on degenerate orbits; the residual is then
    measured against the floor.  The identity holds with the signed
    det(Id - P); the absolute-value form agrees whenever det(Id - P) > 0.
    """
    q = orbit.q
    det_h = float(np.linalg.det(orbit.hessian))
    det_imp = orbit.poincare.det_id_minus()
    prod_b = float(np.prod(orbit.off_diagonal()))
    rhs = (-1.0) ** (q + 1) * det_imp * prod_b
    denom = max(abs(det_h), abs(rhs), floor)
    return abs(det_h - rhs) / denom


def adjugate_factorization(orbit):
    """Rank-1 factorization adj(H) = sigma h h^T for corank-1 Hessians."""
    H = orbit.hessian
    q = H.shape[0]
    evals, evecs = np.linalg.eigh(H)
    order = np.argsort(np.abs(evals))
    scale = np.max(np.abs(evals))
    small = order[0]
    if np.abs(evals[small]) > orbit.degeneracy_tol * scale:
        raise RankMismatch("Hessian has full rank; adjugate is not rank one")
    if np.abs(evals[order[1]]) <= orbit.degeneracy_tol * scale:
        raise RankMismatch("Hessian rank below q - 1")
    rest = np.delete(np.arange(q), small)
    c = float(np.prod(evals[rest]))
    sigma = 1 if c > 0 else -1
    v = evecs[:, small]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    h = np.sqrt(abs(c)) * v
    adj = _adjugate(H)
    residual = np.linalg.norm(adj - sigma * np.outer(h, h)) / np.linalg.norm(adj)
    return AdjugateFactorization(sigma=sigma, h=h, residual=float(residual))


@dataclass(frozen=True)
class AdjugateFactorization:
    sigma: int
    h: np.ndarray
    residual: float


def _adjugate(H):
    """Adjugate by cofactor expansion (independent of the eigen route)."""
    q = H.shape[0]
    adj = np.zeros_like(H)
    for i in range(q):
        for j in range(q):
            minor = np.delete(np.delete(H, j, axis=0), i, axis=1)
            adj[i, j] = (-1.0) ** (i + j) * np.linalg.det(minor)
    return adj


def trace_closure_residual(orbit):
    """Phase-space distance after tracing the orbit with the billiard map."""
    domain = orbit.domain
    S = np.asarray(orbit.config.S)
    geom = LinkGeometry(domain, S)
    theta0 = np.arccos(np.clip(geom.t_out[0], -1.0, 1.0))
    start = PhasePoint(s=float(S[0]), theta=float(theta0))
    pts, winding = iterate(domain, start, orbit.q)
    end = pts[-1]
    ds = min(abs(end.s - start.s), domain.ell - abs(end.s - start.s))
    return float(np.hypot(ds, end.theta - start.theta)), winding


def loop_function(domain, p, q, s, seed=None, tol=1e-10, max_iter=80):
    """Length of the (p, q) broken geodesic based at x(s).

    Solves the reflection conditions at the q-1 free points with the base
    point pinned; raises NoBranch if Newton cannot close the loop.
    """
    ell = domain.ell
    if seed is None:
        free = np.mod(s + np.arange(1, q) * p * ell / q, ell)
    else:
        free = np.array(seed, dtype=float)
    for _ in range(max_iter):
        S = np.concatenate([[s], free])
        g = grad_length(domain, S)[1:]
        if np.linalg.norm(g) < tol:
            return length_functional(domain, S)
        H = hessian_length(domain, S)[1:, 1:]
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError as exc:
            raise NoBranch(str(exc)) from exc
        norm = np.linalg.norm(step)
        cap = 0.2 * ell / q
        if norm > cap:
            step *= cap / norm
        free = free + step
    raise NoBranch(f"no ({p},{q}) branch at s = {s}")


def fit_c_gamma(family, orbit, eps_grid, degeneracy_tol=1e-8):
    """Least-squares slope of det H_eps against eps for a deformation family.

    Fits det = c eps + d eps^2 (the base orbit is degenerate so there is no
    constant term) and reports R^2, the quadratic coefficient, and the
    standard error of the slope.  Raises DegenerateFit when the slope is
    indistinguishable from zero at three standard errors.
    """
    eps_grid = np.asarray(sorted(eps_grid), dtype=float)
    if np.any(eps_grid < 0) or len(eps_grid) < 3:
        raise ValueError("need at least three nonnegative eps values")
    S_base = np.asarray(orbit.config.S)
    dets = []
    for eps in eps_grid:
        if eps == 0.0:
            dets.append(float(np.linalg.det(orbit.hessian)))
            continue
        dom_e = deform(family, eps)
        s_e = dom_e.param_to_arclength(S_base)
        found = find_periodic_orbit(dom_e, orbit.p, orbit.q, seed=tuple(s_e))
        dets.append(float(np.linalg.det(found.hessian)))
    dets = np.array(dets)
    A = np.stack([eps_grid, eps_grid**2], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, dets, rcond=None)
    fitted = A @ coef
    ss_res = float(np.sum((dets - fitted) ** 2))
    ss_tot = float(np.sum((dets - np.mean(dets)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = max(len(eps_grid) - 2, 1)
    cov = np.linalg.inv(A.T @ A) * (ss_res / dof)
    stderr = float(np.sqrt(cov[0, 0]))
    c = float(coef[0])
    if abs(c) < 3.0 * stderr:
        raise DegenerateFit(f"slope {c:.3e} within 3 sigma of zero ({stderr:.3e})")
    return CGammaFit(
        c_gamma=c,
        quadratic=float(coef[1]),
        r_squared=float(r2),
        stderr=stderr,
        eps=eps_grid,
        determinants=dets,
    )


@dataclass(frozen=True)
class CGammaFit:
    c_gamma: float
    quadratic: float
    r_squared: float
    stderr: float
    eps: np.ndarray
    determinants: np.ndarray


def predicted_c_gamma(orbit, family):
    """Jacobi-formula prediction Tr(adj(H_0) Hdot_0) for a pinned family.

    Hdot is diagonal with entries -2 cos(th_i) mu1_i induced by the curvature
    shifts at the reflection points.
    """
    H = orbit.hessian
    adj = _adjugate(H)
    mu = np.array([b.mu1 for b in family.bumps])
    centers = np.array([b.center_s for b in family.bumps])
    S = np.asarray(orbit.config.S)
    # match bumps to reflection points by arclength distance
    perm = []
    for s in S:
        d = np.abs(np.mod(centers - s + 0.5 * orbit.domain.ell, orbit.domain.ell) - 0.5 * orbit.domain.ell)
        perm.append(int(np.argmin(d)))
    mu_matched = mu[perm]
    hdot = np.diag(-2.0 * np.cos(orbit.angles) * mu_matched)
    return float(np.trace(adj @ hdot))
