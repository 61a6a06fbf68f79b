"""Chord geometry shared by the billiard map and the length functional.

For a chord from x(s) to x(s') the distance c(s, s') has the classical
second partials

    c_ss   = cos^2(th)/c  - kappa(s)  cos(th)
    c_s's' = cos^2(th')/c - kappa(s') cos(th')
    c_ss'  = cos(th) cos(th') / c

with th, th' the angles between the chord and the inward normals at the two
endpoints.  Higher partials (needed for third and fourth derivative tensors
of the length functional) come from a bivariate Taylor expansion of
|x(s'+tau) - x(s+sigma)| built on exact boundary jets.
"""

from __future__ import annotations

import numpy as np

from . import series as ts
from .errors import CoincidentPoints


class LinkGeometry:
    """Per-link data for a cyclic configuration S = (s_1 .. s_q).

    Link i joins point i to point i+1 (cyclically).  Angle conventions:
    cos_out[i] is the cosine of the angle between link i and the inward
    normal at its start point; cos_in[i] the cosine at its end point.
    """

    def __init__(self, domain, S, min_chord=None):
        S = np.asarray(S, dtype=float)
        q = len(S)
        jets = domain.position_jets(S, 2)
        self.q = q
        self.S = S
        self.pos = jets[0]
        self.tangent = jets[1]
        self.normal = np.stack([-jets[1][:, 1], jets[1][:, 0]], axis=-1)
        self.kappa = jets[1][:, 0] * jets[2][:, 1] - jets[1][:, 1] * jets[2][:, 0]
        nxt = np.roll(np.arange(q), -1)
        diff = self.pos[nxt] - self.pos
        self.lengths = np.hypot(diff[:, 0], diff[:, 1])
        floor = 1e-9 * domain.ell if min_chord is None else min_chord
        if np.min(self.lengths) < floor:
            raise CoincidentPoints(
                f"consecutive reflection points collide (min chord {np.min(self.lengths):.3e})"
            )
        self.e = diff / self.lengths[:, None]
        # tangential and normal components of the link direction at both ends
        self.t_out = np.einsum("ij,ij->i", self.tangent, self.e)
        self.n_out = np.einsum("ij,ij->i", self.normal, self.e)
        self.t_in = np.einsum("ij,ij->i", self.tangent[nxt], self.e)
        self.n_in = -np.einsum("ij,ij->i", self.normal[nxt], self.e)
        self.cos_out = self.n_out
        self.cos_in = self.n_in
        self.nxt = nxt

    def chord_second_partials(self):
        """(c_ss, c_ss', c_s's') for every link, start/end derivatives."""
        c = self.lengths
        c_ss = (1.0 - self.t_out**2) / c - self.kappa * self.n_out
        c_tt = (1.0 - self.t_in**2) / c - self.kappa[self.nxt] * self.n_in
        c_st = (-np.einsum("ij,ij->i", self.tangent, self.tangent[self.nxt]) + self.t_out * self.t_in) / c
        return c_ss, c_st, c_tt


def chord_taylor(domain, s_a, s_b, degree):
    """Bivariate Taylor array of c(sigma, tau) = |x(s_b+tau) - x(s_a+sigma)|.

    Returns coefficients T with T[i, j] the coefficient of sigma^i tau^j,
    truncated at total degree `degree`.  Vectorized over paired arrays.
    """
    s_a = np.atleast_1d(np.asarray(s_a, dtype=float))
    s_b = np.atleast_1d(np.asarray(s_b, dtype=float))
    ja = ts.series_from_jets(domain.position_jets(s_a, degree))
    jb = ts.series_from_jets(domain.position_jets(s_b, degree))
    batch = s_a.shape
    d = degree
    # chord vector as bivariate polynomial: u(sigma, tau) = x_b(tau) - x_a(sigma)
    ux = ts.b_zero(d, batch)
    uy = ts.b_zero(d, batch)
    for k in range(d + 1):
        ux[0, k] += jb[k][..., 0]
        uy[0, k] += jb[k][..., 1]
        ux[k, 0] -= ja[k][..., 0]
        uy[k, 0] -= ja[k][..., 1]
    norm2 = ts.b_mul(ux, ux) + ts.b_mul(uy, uy)
    if np.any(norm2[0, 0] <= 0.0):
        raise CoincidentPoints("chord length vanishes")
    return ts.b_sqrt(norm2)


def chord_partial(taylor, i, j):
    """Partial derivative d^{i+j} c / d s_a^i d s_b^j from a Taylor array."""
    from math import factorial

    return taylor[i, j] * (factorial(i) * factorial(j))
