"""Feynman diagrams for stationary-phase coefficients.

Diagrams of order j are multigraphs with edges - vertices = j: closed
vertices of valency >= 3 carry phase derivatives, one open vertex of any
valency carries amplitude derivatives, and edges carry inverse Hessian
entries.  Combinatorial weights 1/|Aut| are exact rationals; the same
coefficients come out of the operator form of the stationary-phase lemma,
which provides the second, independent route used in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import ResourceLimit, SingularHessian

DEFAULT_ORDER_BOUND = 4


# ---------------------------------------------------------------------------
# Diagram enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeynmanDiagram:
    """Multigraph with one marked open vertex (index 0) and closed vertices.

    adjacency[i][j] is the number of edges between vertices i and j for
    i != j; adjacency[i][i] is twice the number of loops at i.
    """

    adjacency: tuple
    aut_order: int
    order: int

    @property
    def n_closed(self):
        return len(self.adjacency) - 1

    @property
    def open_valency(self):
        A = self.adjacency
        return A[0][0] + sum(A[0][1:])

    @property
    def n_edges(self):
        A = self.adjacency
        n = len(A)
        loops = sum(A[i][i] for i in range(n)) // 2
        cross = sum(A[i][j] for i in range(n) for j in range(i + 1, n))
        return loops + cross

    def closed_valencies(self):
        A = self.adjacency
        return tuple(A[i][i] + sum(A[i][k] for k in range(len(A)) if k != i) for i in range(1, len(A)))

    def edge_list(self):
        """Edges as (i, j) vertex pairs with loops repeated per loop."""
        A = self.adjacency
        n = len(A)
        out = []
        for i in range(n):
            out.extend([(i, i)] * (A[i][i] // 2))
            for j in range(i + 1, n):
                out.extend([(i, j)] * A[i][j])
        return out

    def half_edge_pairing(self):
        """A representative perfect matching on labeled half-edges.

        Half-edges are numbered per vertex in edge-list order; loops pair
        two slots of the same vertex.
        """
        counter = itertools.count()
        pairing = []
        for _ in self.edge_list():
            pairing.append((next(counter), next(counter)))
        return tuple(pairing)


def _vertex_invariant(adjacency, i):
    """Permutation-invariant local key of closed vertex i."""
    row = adjacency[i]
    degree = row[i] + sum(row[k] for k in range(len(row)) if k != i)
    return (degree, row[i], row[0], tuple(sorted(row[1:])))


def _canonical(adjacency):
    """Canonical matrix: vertices sorted by invariant, then lexicographic
    minimum over permutations within equal-invariant blocks."""
    n = len(adjacency)
    keys = {i: _vertex_invariant(adjacency, i) for i in range(1, n)}
    base = [0] + sorted(range(1, n), key=lambda i: keys[i])
    relabeled = tuple(
        tuple(adjacency[base[i]][base[j]] for j in range(n)) for i in range(n)
    )
    groups = []
    start = 1
    for i in range(2, n + 1):
        if i == n or keys[base[i]] != keys[base[start]]:
            groups.append(list(range(start, i)))
            start = i
    best = None
    group_perms = [list(itertools.permutations(g)) for g in groups]
    for combo in itertools.product(*group_perms):
        perm = list(range(n))
        for g, pg in zip(groups, combo):
            for src, dst in zip(g, pg):
                perm[src] = dst
        key = tuple(
            tuple(relabeled[perm[i]][perm[j]] for j in range(n)) for i in range(n)
        )
        if best is None or key < best:
            best = key
    return best


def _vertex_groups(adjacency):
    """Closed vertices grouped by equal invariant (for automorphism counts)."""
    n = len(adjacency)
    inv = {}
    for i in range(1, n):
        inv.setdefault(_vertex_invariant(adjacency, i), []).append(i)
    return list(inv.values())


def _enumerate_matrices(open_valency, closed_valencies):
    """All symmetric adjacency matrices with the given valencies.

    Vertex 0 is open.  Backtracks over the upper triangle with even
    diagonal entries (loops).
    """
    valencies = (open_valency,) + tuple(closed_valencies)
    n = len(valencies)
    A = [[0] * n for _ in range(n)]
    results = []

    def remaining(i):
        return valencies[i] - A[i][i] - sum(A[i][j] for j in range(n) if j != i)

    def fill(i, j):
        if i == n:
            if all(remaining(k) == 0 for k in range(n)):
                results.append(tuple(tuple(row) for row in A))
            return
        if j == n:
            if remaining(i) == 0:
                fill(i + 1, i + 1)
            return
        if i == j:
            cap = remaining(i)
            for loops2 in range(0, cap + 1, 2):
                A[i][i] = loops2
                fill(i, j + 1)
            A[i][i] = 0
            return
        cap = min(remaining(i), remaining(j))
        for m in range(cap + 1):
            A[i][j] = A[j][i] = m
            fill(i, j + 1)
        A[i][j] = A[j][i] = 0

    fill(0, 0)
    return results


def _aut_order(adjacency, groups):
    """|Aut| = vertex automorphisms x parallel-edge permutations x loop flips."""
    n = len(adjacency)
    vertex_autos = 0
    group_perms = [list(itertools.permutations(g)) for g in groups]
    for combo in itertools.product(*group_perms):
        perm = list(range(n))
        for g, pg in zip(groups, combo):
            for src, dst in zip(g, pg):
                perm[src] = dst
        if all(
            adjacency[perm[i]][perm[j]] == adjacency[i][j]
            for i in range(n)
            for j in range(i, n)
        ):
            vertex_autos += 1
    edge_factor = 1
    for i in range(n):
        loops = adjacency[i][i] // 2
        edge_factor *= 2**loops * factorial(loops)
        for j in range(i + 1, n):
            edge_factor *= factorial(adjacency[i][j])
    return vertex_autos * edge_factor


def _enumerate_classes(open_valency, closed_valencies):
    """Isomorphism classes (open vertex fixed) with automorphism orders."""
    seen = {}
    for A in _enumerate_matrices(open_valency, closed_valencies):
        key = _canonical(A)
        if key not in seen:
            seen[key] = _aut_order(key, _vertex_groups(key))
    return seen


def enumerate_diagrams(j, bound=DEFAULT_ORDER_BOUND):
    """One representative per class of 3-regular multigraphs on 2j closed
    vertices with an isolated open vertex."""
    if j < 0:
        raise ValueError("order must be nonnegative")
    if j > bound:
        raise ResourceLimit(f"diagram order {j} above configured bound {bound}")
    if j == 0:
        return [FeynmanDiagram(adjacency=((0,),), aut_order=1, order=0)]
    classes = _enumerate_classes(0, (3,) * (2 * j))
    out = [
        FeynmanDiagram(adjacency=key, aut_order=aut, order=j)
        for key, aut in sorted(classes.items())
    ]
    return out


def enumerate_order_diagrams(j, bound=DEFAULT_ORDER_BOUND):
    """All diagram classes contributing to the order-j stationary-phase term.

    Covers every (edges, closed vertices) = (mu + j, mu) split with closed
    valencies >= 3 and arbitrary open-vertex valency.
    """
    if j > bound:
        raise ResourceLimit(f"diagram order {j} above configured bound {bound}")
    if j == 0:
        return [FeynmanDiagram(adjacency=((0,),), aut_order=1, order=0)]
    out = []
    for mu in range(2 * j + 1):
        nu = mu + j
        for closed_vals in _valency_multisets(mu, 2 * nu):
            open_val = 2 * nu - sum(closed_vals)
            for key, aut in sorted(
                _enumerate_classes(open_val, closed_vals).items()
            ):
                out.append(FeynmanDiagram(adjacency=key, aut_order=aut, order=j))
    return out


def _valency_multisets(mu, total_half_edges):
    """Nonincreasing valency tuples (v_1 >= ... >= v_mu >= 3) with sum <= total."""
    if mu == 0:
        return [()]
    out = []

    def rec(prefix, remaining, cap):
        k = len(prefix)
        if k == mu:
            out.append(tuple(prefix))
            return
        lo = 3
        for v in range(min(cap, remaining - 3 * (mu - k - 1)), lo - 1, -1):
            rec(prefix + [v], remaining - v, v)

    rec([], total_half_edges, total_half_edges)
    return out


def aut_order(diagram):
    """Order of the automorphism group fixing the open vertex."""
    return diagram.aut_order


def w_of_j(j, bound=DEFAULT_ORDER_BOUND):
    """Exact rational sum of 1/|Aut| over 3-regular classes on 2j vertices."""
    return sum(
        (Fraction(1, d.aut_order) for d in enumerate_diagrams(j, bound=bound)),
        start=Fraction(0),
    )


def w_of_j_closed_form(j):
    """Pairing-count identity value (6j-1)!! / ((2j)! 6^(2j))."""
    double_fact = 1
    for m in range(6 * j - 1, 0, -2):
        double_fact *= m
    return Fraction(double_fact, factorial(2 * j) * 6 ** (2 * j))


def pairing_count_check(j, bound=DEFAULT_ORDER_BOUND):
    """Orbit-stabilizer identity: sum over classes of (2j)! 6^{2j}/|Aut|
    must equal (6j-1)!! exactly."""
    total = sum(
        Fraction(factorial(2 * j) * 6 ** (2 * j), d.aut_order)
        for d in enumerate_diagrams(j, bound=bound)
    )
    double_fact = 1
    for m in range(6 * j - 1, 0, -2):
        double_fact *= m
    return total, Fraction(double_fact)


# ---------------------------------------------------------------------------
# Phase models and amplitudes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseModel:
    """Derivative data of a phase and amplitude at a nondegenerate critical
    point.

    phase_tensors[r] is the full symmetric array of r-th partials of the
    phase (r >= 2); amp_tensors[r] the partials of the amplitude (r >= 0).
    """

    dimension: int
    phase_value: float
    phase_tensors: dict
    amp_tensors: dict
    x0: np.ndarray | None = None

    def hessian(self):
        return np.asarray(self.phase_tensors[2], dtype=float)

    def hessian_inverse(self):
        H = self.hessian()
        if np.linalg.matrix_rank(H) < self.dimension:
            raise SingularHessian("phase Hessian is singular")
        return np.linalg.inv(H)

    def condition_number(self):
        return float(np.linalg.cond(self.hessian()))


def feynman_amplitude(diagram, labeling, model, k):
    """Amplitude of one labeled diagram under the Feynman rules.

    labeling assigns an index in {1..n} (0-based here) to every half-edge,
    listed edge by edge as (i_start, i_end) pairs matching edge_list().
    """
    edges = diagram.edge_list()
    if len(labeling) != len(edges):
        raise ValueError("labeling must give an index pair per edge")
    hinv = model.hessian_inverse()
    n = diagram.n_closed
    incident = {v: [] for v in range(n + 1)}
    value = 1.0 + 0.0j
    for (a, b), (ia, ib) in zip(edges, labeling):
        value *= (1j / k) * hinv[ia, ib]
        incident[a].append(ia)
        incident[b].append(ib)
    for v in range(1, n + 1):
        idx = tuple(sorted(incident[v]))
        tensor = np.asarray(model.phase_tensors[len(idx)])
        value *= 1j * k * tensor[idx]
    open_idx = tuple(sorted(incident[0]))
    amp = np.asarray(model.amp_tensors.get(len(open_idx)))
    if amp is None:
        return 0.0 + 0.0j
    value *= amp[open_idx] if open_idx else float(amp)
    return complex(value)


def _diagram_label_sum(diagram, model, k):
    """Sum of Feynman amplitudes over all labelings, via tensor contraction."""
    edges = diagram.edge_list()
    hinv = model.hessian_inverse()
    n_edges = len(edges)
    subs = []
    operands = []
    incident = {v: [] for v in range(diagram.n_closed + 1)}
    next_sym = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    for e, (a, b) in enumerate(edges):
        sa, sb = next(next_sym), next(next_sym)
        operands.append(hinv)
        subs.append(sa + sb)
        incident[a].append(sa)
        incident[b].append(sb)
    for v in range(1, diagram.n_closed + 1):
        idx = "".join(incident[v])
        operands.append(np.asarray(model.phase_tensors[len(idx)], dtype=float))
        subs.append(idx)
    open_idx = "".join(incident[0])
    amp = model.amp_tensors.get(len(open_idx))
    if amp is None:
        return 0.0 + 0.0j
    if open_idx:
        operands.append(np.asarray(amp, dtype=float))
        subs.append(open_idx)
        contraction = float(np.einsum(",".join(subs) + "->", *operands, optimize=True))
    else:
        contraction = float(
            np.einsum(",".join(subs) + "->", *operands, optimize=True) * float(amp)
            if subs
            else float(amp)
        )
    mu = diagram.n_closed
    return (1j * k) ** mu * (1j / k) ** n_edges * contraction


def stationary_phase_expand(model, J, method="operator", bound=DEFAULT_ORDER_BOUND):
    """Coefficients C_0..C_J of the k^{-j} expansion, plus prefactor data.

    The operator route evaluates the stationary-phase differential operators
    on polynomial Taylor data; the diagram route sums Feynman amplitudes
    weighted by 1/|Aut|.  Both deliver identical coefficients.
    """
    H = model.hessian()
    evals = np.linalg.eigvalsh(H)
    if np.min(np.abs(evals)) < 1e-300:
        raise SingularHessian("phase Hessian is singular")
    sgn = int(np.sum(evals > 0) - np.sum(evals < 0))
    det = float(np.prod(evals))
    if method == "diagram":
        coeffs = []
        for j in range(J + 1):
            total = 0.0 + 0.0j
            for diagram in enumerate_order_diagrams(j, bound=bound):
                total += _diagram_label_sum(diagram, model, k=1.0) / diagram.aut_order
            coeffs.append(complex(total))
    elif method == "operator":
        coeffs = _operator_coefficients(model, J)
    else:
        raise ValueError(f"unknown method {method!r}")
    return StationaryPhaseExpansion(
        coefficients=tuple(coeffs),
        signature=sgn,
        determinant=det,
        phase_value=model.phase_value,
        dimension=model.dimension,
    )


@dataclass(frozen=True)
class StationaryPhaseExpansion:
    coefficients: tuple
    signature: int
    determinant: float
    phase_value: float
    dimension: int

    def prefactor(self, k):
        n = self.dimension
        return (
            (2 * np.pi / k) ** (n / 2)
            * np.exp(1j * k * self.phase_value)
            * np.exp(1j * np.pi * self.signature / 4)
            / np.sqrt(abs(self.determinant))
        )

    def evaluate(self, k, J=None):
        J = len(self.coefficients) - 1 if J is None else J
        series = sum(
            c * k ** (-j) for j, c in enumerate(self.coefficients[: J + 1])
        )
        return self.prefactor(k) * series


# -- operator route ---------------------------------------------------------


def _poly_from_tensors(tensors, orders, dimension):
    """Sparse polynomial {exponent tuple: coeff} from symmetric tensors."""
    poly = {}
    for r in orders:
        T = tensors.get(r)
        if T is None:
            continue
        T = np.asarray(T, dtype=float)
        if r == 0:
            poly[(0,) * dimension] = poly.get((0,) * dimension, 0.0) + float(T)
            continue
        for idx in itertools.combinations_with_replacement(range(dimension), r):
            expo = [0] * dimension
            for i in idx:
                expo[i] += 1
            denom = 1
            for e in expo:
                denom *= factorial(e)
            key = tuple(expo)
            poly[key] = poly.get(key, 0.0) + T[idx] / denom
    return poly


def _poly_mul(a, b, max_deg):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) > max_deg:
                continue
            out[e] = out.get(e, 0.0) + ca * cb
    return out


def _apply_hinv_laplacian(poly, hinv):
    """Apply sum_ab Hinv[a,b] d_a d_b to a sparse polynomial."""
    n = hinv.shape[0]
    out = {}
    for expo, c in poly.items():
        for a in range(n):
            if expo[a] == 0:
                continue
            for b in range(n):
                e1 = list(expo)
                f = e1[a]
                e1[a] -= 1
                g = e1[b]
                if g == 0:
                    continue
                e1[b] -= 1
                coeff = c * f * g * hinv[a, b]
                key = tuple(e1)
                out[key] = out.get(key, 0.0) + coeff
    return out


def _operator_coefficients(model, J):
    n = model.dimension
    hinv = model.hessian_inverse()
    coeffs = []
    max_phase_order = max(model.phase_tensors.keys())
    g_poly = _poly_from_tensors(model.phase_tensors, range(3, max_phase_order + 1), n)
    u_orders = range(0, max(model.amp_tensors.keys()) + 1)
    u_poly = _poly_from_tensors(model.amp_tensors, u_orders, n)
    zero = (0,) * n
    for j in range(J + 1):
        total = 0.0 + 0.0j
        for mu in range(0, 2 * j + 1):
            nu = mu + j
            if 2 * nu < 3 * mu:
                continue
            term = dict(u_poly)
            for _ in range(mu):
                term = _poly_mul(term, g_poly, max_deg=2 * nu)
            for _ in range(nu):
                term = _apply_hinv_laplacian(term, hinv)
            const = term.get(zero, 0.0)
            total += (
                (1j**j)
                * ((-1.0) ** mu)
                * (2.0 ** (-nu))
                * const
                / (factorial(mu) * factorial(nu))
            )
        coeffs.append(complex(total))
    return coeffs
