"""Balanced directed graphs: incidence matrices, cuts and Lewis-weight sparsification.

Vertices are numbered ``0 .. n-1`` in memory (edge-list files are 1-based).
A digraph is alpha-balanced if every directed cut satisfies
``w(S, V-S) <= alpha * w(V-S, S)``. For the incidence matrix B of such a
graph, ``||Bx||_1 <= (1 + alpha) rho_0(Bx)`` with ``rho_0(t) = max(t, 0)``,
so l_1 Lewis-weight sampling with ``a = b = 1/2`` and ``B = 1 + alpha``
preserves ``rho_0(Bx)`` for all x, and in particular every cut.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCut, NotStronglyConnected, TooLarge
from .lewis import lewis_weights
from .loss import RHO_ZERO, phi_sum
from .sampler import DEFAULT_APPROX_FACTOR, DEFAULT_C, draw_indices, make_plan

MAX_ENUM_VERTICES = 20
_SUBSET_CHUNK = 1 << 15


class WeightedDigraph:
    """Directed graph with positive edge weights and no self-loops.

    Parallel edges are allowed; they act as one edge with the summed weight
    for every cut.
    """

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise ValueError("need at least one vertex")
        edges = list(edges)
        tail = np.array([e[0] for e in edges], dtype=np.intp)
        head = np.array([e[1] for e in edges], dtype=np.intp)
        weight = np.array([e[2] for e in edges], dtype=np.float64)
        if edges:
            if tail.min() < 0 or head.min() < 0 or tail.max() >= n or head.max() >= n:
                raise ValueError(f"vertex ids must lie in [0, {n})")
            if np.any(tail == head):
                raise ValueError("self-loops are not allowed")
            if not np.all(np.isfinite(weight)) or np.any(weight <= 0):
                raise ValueError("edge weights must be positive and finite")
        self.n = n
        self.tail = tail
        self.head = head
        self.weight = weight

    @classmethod
    def from_arrays(cls, n, tail, head, weight):
        return cls(n, zip(np.asarray(tail).tolist(), np.asarray(head).tolist(),
                          np.asarray(weight, dtype=np.float64).tolist()))

    @property
    def edge_count(self):
        return int(self.tail.shape[0])

    def edges(self):
        return list(zip(self.tail.tolist(), self.head.tolist(), self.weight.tolist()))

    def _reaches_all(self, src, dst):
        adj = [[] for _ in range(self.n)]
        for u, v in zip(src.tolist(), dst.tolist()):
            adj[u].append(v)
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return bool(seen.all())

    def is_strongly_connected(self):
        """Forward and backward DFS from vertex 0 both reach every vertex."""
        return self._reaches_all(self.tail, self.head) and self._reaches_all(self.head, self.tail)

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, m={self.edge_count})"


@dataclass(frozen=True)
class SparsifierResult:
    graph: WeightedDigraph
    m_prime: int
    epsilon: float
    alpha: float
    samples: int
    source_edges: np.ndarray


@dataclass(frozen=True)
class CutReport:
    max_deviation: float
    worst_cut: tuple
    cuts_checked: int
    epsilon: float

    @property
    def passed(self):
        return self.max_deviation <= self.epsilon


def incidence(G):
    """m x n edge-vertex incidence matrix: ``+w`` at the tail, ``-w`` at the head."""
    B = np.zeros((G.edge_count, G.n))
    rows = np.arange(G.edge_count)
    B[rows, G.tail] = G.weight
    B[rows, G.head] = -G.weight
    return B


def _as_mask(G, S):
    S = np.asarray(S)
    if S.dtype == bool:
        if S.shape != (G.n,):
            raise InvalidCut(f"mask must have length {G.n}")
        mask = S.copy()
    else:
        mask = np.zeros(G.n, dtype=bool)
        ids = S.astype(np.intp).ravel()
        if ids.size and (ids.min() < 0 or ids.max() >= G.n):
            raise InvalidCut("vertex id out of range")
        mask[ids] = True
    if not mask.any() or mask.all():
        raise InvalidCut("cut side must be nonempty and proper")
    return mask


def cut_value(G, S):
    """Total weight of edges leaving vertex set `S` (ids or boolean mask)."""
    mask = _as_mask(G, S)
    return float(G.weight[mask[G.tail] & ~mask[G.head]].sum())


def _check_enumerable(G):
    if G.n > MAX_ENUM_VERTICES:
        raise TooLarge(f"cut enumeration limited to n <= {MAX_ENUM_VERTICES}, got {G.n}")
    if G.n < 2:
        raise InvalidCut("a graph with one vertex has no proper cuts")


def _subset_chunks(n):
    """Yield (subset codes, membership matrix) over all nonempty proper subsets."""
    full = (1 << n) - 1
    bits = np.arange(n, dtype=np.int64)
    for start in range(1, full, _SUBSET_CHUNK):
        codes = np.arange(start, min(start + _SUBSET_CHUNK, full), dtype=np.int64)
        yield codes, ((codes[:, None] >> bits) & 1).astype(bool)


def all_cut_values(G):
    """Forward cut capacities for every nonempty proper subset, keyed by bit code.

    Returns ``(codes, values)``; bit ``v`` of a code is set when ``v`` is in S.
    """
    _check_enumerable(G)
    codes_all, vals_all = [], []
    for codes, member in _subset_chunks(G.n):
        fwd = member[:, G.tail] & ~member[:, G.head]
        codes_all.append(codes)
        vals_all.append(fwd.astype(np.float64) @ G.weight)
    return np.concatenate(codes_all), np.concatenate(vals_all)


def _code_to_set(code, n):
    return tuple(v for v in range(n) if (int(code) >> v) & 1)


def balance_alpha(G):
    """Smallest alpha for which `G` is alpha-balanced, by enumerating all cuts.

    Raises
    ------
    TooLarge
        If n > 20.
    NotStronglyConnected
        If some cut has zero capacity in one direction.
    """
    _check_enumerable(G)
    if not G.is_strongly_connected():
        raise NotStronglyConnected("graph is not strongly connected")
    codes, fwd = all_cut_values(G)
    # The complement of code c is full ^ c, which sits at index full - 1 - c.
    full = (1 << G.n) - 1
    bwd = fwd[(full - codes) - 1]
    if np.any(bwd <= 0):
        raise NotStronglyConnected("a cut has zero reverse capacity")
    return float(np.max(fwd / bwd))


def verify_cuts(G, Gp, epsilon):
    """Max relative deviation of all ``2^n - 2`` directed cut capacities of Gp from G."""
    if G.n != Gp.n:
        raise ValueError("graphs have different vertex counts")
    codes, base = all_cut_values(G)
    _, other = all_cut_values(Gp)
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.where(base > 0, np.abs(other / base - 1.0), np.where(other > 0, np.inf, 0.0))
    k = int(np.argmax(dev))
    return CutReport(max_deviation=float(dev[k]), worst_cut=_code_to_set(codes[k], G.n),
                     cuts_checked=int(codes.size), epsilon=float(epsilon))


def check_balance_lemma(G, alpha, trials=10000, seed=0):
    """Largest observed ``||Bx||_1 / rho_0(Bx)``; at most ``1 + alpha`` for balanced G.

    Evaluated on `trials` Gaussian vectors and, when n <= 20, every 0/1
    cut indicator. Directions with ``Bx = 0`` are skipped.
    """
    if not G.is_strongly_connected():
        raise NotStronglyConnected("graph is not strongly connected")
    B = incidence(G)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((G.n, trials))
    blocks = [X]
    if G.n <= MAX_ENUM_VERTICES and G.n >= 2:
        blocks.extend(member.T.astype(np.float64) for _, member in _subset_chunks(G.n))
    worst = 0.0
    for X in blocks:
        Y = B @ X
        l1 = np.abs(Y).sum(axis=0)
        r0 = np.maximum(Y, 0.0).sum(axis=0)
        ok = l1 > 1e-12 * np.abs(B).sum()
        if ok.any():
            worst = max(worst, float(np.max(l1[ok] / r0[ok])))
    return worst


def rho0_incidence(G, x):
    """``rho_0(B x)`` for the incidence matrix B of G."""
    return phi_sum(RHO_ZERO, incidence(G) @ np.asarray(x, dtype=np.float64))


def sparsify(G, alpha, epsilon, seed=0, C=DEFAULT_C, approx_factor=DEFAULT_APPROX_FACTOR):
    """Reweighted edge subset preserving ``rho_0(Bx)`` within ``1 +/- eps``.

    Samples rows of the incidence matrix by l_1 Lewis weights with
    ``a = b = 1/2`` and ``B = alpha + 1``. An edge drawn k times with plan
    value p gets weight ``k * w / p``.

    `alpha` must be at least the true balance of G (see `balance_alpha`).
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    B = incidence(G)
    weights = lewis_weights(B, p=1.0)
    plan = make_plan(weights, RHO_ZERO, alpha + 1.0, epsilon, C=C, approx_factor=approx_factor)
    idx = draw_indices(plan, seed)
    counts = np.bincount(idx, minlength=G.edge_count)
    kept = np.flatnonzero(counts)
    new_w = counts[kept] * G.weight[kept] / plan.values[kept]
    Gp = WeightedDigraph.from_arrays(G.n, G.tail[kept], G.head[kept], new_w)
    return SparsifierResult(graph=Gp, m_prime=int(kept.size), epsilon=float(epsilon),
                            alpha=float(alpha), samples=plan.N, source_edges=kept)


def random_balanced_digraph(n, extra_pairs, max_ratio=2.0, seed=0):
    """Random strongly connected digraph with balance at most `max_ratio`.

    Every edge comes with its reverse, and each reverse weight is within a
    factor `max_ratio` of the forward one, so every cut is within that
    factor of its reverse. The pairs are a Hamiltonian cycle plus
    `extra_pairs` further random vertex pairs; there are
    ``2 * (n + extra_pairs)`` edges.
    """
    rng = np.random.default_rng(seed)
    pairs = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
    taken = {frozenset(p) for p in pairs}
    others = [(u, v) for u in range(n) for v in range(u + 1, n) if frozenset((u, v)) not in taken]
    if extra_pairs > len(others):
        raise ValueError(f"only {len(others)} extra vertex pairs available")
    pick = rng.choice(len(others), size=extra_pairs, replace=False)
    pairs += [others[k] for k in sorted(pick)]
    edges = []
    for u, v in pairs:
        w = float(rng.uniform(1.0, 2.0))
        r = float(np.exp(rng.uniform(-np.log(max_ratio), np.log(max_ratio))))
        edges.append((u, v, w))
        edges.append((v, u, w * r))
    return WeightedDigraph(n, edges)


def random_eulerian_digraph(n, cycles, seed=0):
    """Union of random directed cycles, each with one weight; in-weight equals out-weight."""
    rng = np.random.default_rng(seed)
    edges = [(i, (i + 1) % n, 1.0) for i in range(n)]
    for _ in range(cycles):
        k = int(rng.integers(2, n + 1))
        verts = rng.permutation(n)[:k].tolist()
        w = float(rng.uniform(0.5, 2.0))
        edges += [(verts[j], verts[(j + 1) % k], w) for j in range(k)]
    return WeightedDigraph(n, edges)
