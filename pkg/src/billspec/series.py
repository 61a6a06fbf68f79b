"""Truncated Taylor-series arithmetic, vectorized over trailing batch axes.

A series of order n is an ndarray of shape (n+1, *batch) holding Taylor
coefficients c[k] of sum_k c[k] t^k.  All operations truncate at the common
order.  These are the workhorse for reparametrizing boundary curves by
arclength and for chord-length derivative tensors.
"""

from __future__ import annotations

import math

import numpy as np


def s_const(value, order):
    out = np.zeros((order + 1,) + np.shape(value))
    out[0] = value
    return out


def s_mul(a, b):
    """Cauchy product of two series, truncated at the shorter order."""
    n = min(a.shape[0], b.shape[0]) - 1
    out = np.zeros((n + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(n + 1):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def s_reciprocal(a):
    """Series of 1/a; a[0] must be nonzero."""
    n = a.shape[0] - 1
    out = np.zeros_like(a)
    inv0 = 1.0 / a[0]
    out[0] = inv0
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc = acc + a[i] * out[k - i]
        out[k] = -inv0 * acc
    return out


def s_sqrt(a):
    """Series of sqrt(a); a[0] must be positive."""
    n = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.sqrt(a[0])
    half_inv = 0.5 / out[0]
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k):
            acc = acc + out[i] * out[k - i]
        out[k] = (a[k] - acc) * half_inv
    return out


def s_exp(a):
    """Series of exp(a) using e' = a' e."""
    n = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, n + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc = acc + i * a[i] * out[k - i]
        out[k] = acc / k
    return out


def s_derivative(a):
    """Series of a'(t), one order shorter."""
    n = a.shape[0] - 1
    out = np.zeros((n,) + a.shape[1:]) if n > 0 else np.zeros((1,) + a.shape[1:])
    for k in range(1, n + 1):
        out[k - 1] = k * a[k]
    return out


def s_integral(a, order=None):
    """Antiderivative with zero constant term, one order longer by default."""
    n = a.shape[0] - 1
    m = n + 1 if order is None else order
    out = np.zeros((m + 1,) + a.shape[1:])
    for k in range(min(n, m - 1) + 1):
        out[k + 1] = a[k] / (k + 1)
    return out


def s_compose(outer, inner):
    """outer(inner(t)) truncated; inner[0] must be zero."""
    n = min(outer.shape[0], inner.shape[0]) - 1
    batch = np.broadcast_shapes(outer.shape[1:], inner.shape[1:])
    res = np.zeros((n + 1,) + batch)
    res[0] = outer[n]
    for j in range(n - 1, -1, -1):
        res = s_mul(res, inner)
        res[0] = res[0] + outer[j]
    return res


def s_revert(a):
    """Compositional inverse of a series with a[0] = 0 and a[1] != 0.

    Returns g with a(g(w)) = w + O(w^{n+1}), via Newton iteration on series.
    """
    n = a.shape[0] - 1
    batch = a.shape[1:]
    g = np.zeros((n + 1,) + batch)
    g[1] = 1.0 / a[1]
    w = np.zeros((n + 1,) + batch)
    w[1] = 1.0
    da = s_derivative(a)
    da = np.concatenate([da, np.zeros((1,) + batch)], axis=0)
    steps = max(1, math.ceil(math.log2(n + 1)))
    for _ in range(steps + 1):
        err = s_compose(a, g) - w
        slope = s_compose(da, g)
        g = g - s_mul(err, s_reciprocal(slope))
    return g


def jets_from_series(series):
    """Convert Taylor coefficients to derivative values (multiply by k!)."""
    out = np.array(series, copy=True)
    fact = 1.0
    for k in range(out.shape[0]):
        if k > 1:
            fact *= k
            out[k] *= fact
    return out


def series_from_jets(jets):
    """Convert derivative values to Taylor coefficients (divide by k!)."""
    out = np.array(jets, copy=True, dtype=float)
    fact = 1.0
    for k in range(out.shape[0]):
        if k > 1:
            fact *= k
            out[k] /= fact
    return out


# ---------------------------------------------------------------------------
# Bivariate truncated Taylor polynomials in (sigma, tau), for chord lengths.
# Represented as arrays of shape (d+1, d+1, *batch) with entries beyond
# total degree d kept at zero.
# ---------------------------------------------------------------------------


def b_zero(degree, batch_shape=()):
    return np.zeros((degree + 1, degree + 1) + tuple(batch_shape))


def b_mul(a, b):
    d = a.shape[0] - 1
    batch = np.broadcast_shapes(a.shape[2:], b.shape[2:])
    out = np.zeros((d + 1, d + 1) + batch)
    for i in range(d + 1):
        for j in range(d + 1 - i):
            if not np.any(a[i, j]):
                continue
            for p in range(d + 1 - i):
                for q in range(d + 1 - i - j - p):
                    out[i + p, j + q] += a[i, j] * b[p, q]
    return out


def b_sqrt(a):
    """Bivariate series sqrt; constant term must be positive."""
    d = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0, 0] = np.sqrt(a[0, 0])
    half_inv = 0.5 / out[0, 0]
    for total in range(1, d + 1):
        for i in range(total + 1):
            j = total - i
            acc = np.zeros_like(a[0, 0])
            for p in range(i + 1):
                for q in range(j + 1):
                    if (p, q) == (0, 0) or (p, q) == (i, j):
                        continue
                    acc = acc + out[p, q] * out[i - p, j - q]
            out[i, j] = (a[i, j] - acc) * half_inv
    return out
