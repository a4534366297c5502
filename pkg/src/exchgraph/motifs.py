"""Small-pattern statistics: cycles, feedforward triples, roots, leaves.

Counting works on the realized adjacency matrix with the diagonal ignored,
so self-edges never contribute to a pattern.  Expected counts and variances
come from first principles each call: place the pattern (or a pair of
patterns) on a canonical vertex set, tally distinct edges per sender, and
average theta powers under the mixing law.  Rows are independent and biases
iid, so the probability of a union of placements factors into per-sender
moments; the variance routine enumerates every overlap class of two triples
rather than trusting a transcribed polynomial.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import spawn_rng
from .ensemble import BitMatrix, EnsembleConfig, sample_bias_matrix
from .errors import EnumerationBudgetError, ParameterError
from .mixing import MixingSpec, log_row_prob, moment

__all__ = [
    "count_feedback_loops",
    "count_feedforward_loops",
    "count_cycles",
    "count_roots",
    "count_leaves",
    "count_isolated",
    "weak_components",
    "SubgraphPattern",
    "count_subgraph",
    "mean_feedback_loops",
    "mean_feedforward_loops",
    "mean_cycles",
    "mean_subgraph",
    "mean_roots",
    "mean_leaves",
    "var_feedback_loops",
    "var_feedforward_loops",
    "connectivity_bound",
    "MotifMcReport",
    "RootLeafMcReport",
    "mc_motifs",
    "mc_cycles",
    "mc_roots_leaves",
]

_FBL_EDGES = ((0, 1), (1, 2), (2, 0))
_FFL_EDGES = ((0, 1), (1, 2), (0, 2))


def _dense(matrix) -> np.ndarray:
    if isinstance(matrix, BitMatrix):
        return matrix.to_dense()
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ParameterError("adjacency must be a 2-d matrix")
    return arr.astype(bool)


def _square_no_diag(matrix) -> np.ndarray:
    a = _dense(matrix)
    if a.shape[0] != a.shape[1]:
        raise ParameterError(f"pattern counting needs a square matrix, got {a.shape}")
    a = a.astype(np.float64)
    np.fill_diagonal(a, 0.0)
    return a


# ---------------------------------------------------------------------------
# counting on a realized graph


def count_feedback_loops(matrix) -> int:
    """Directed 3-cycles, each counted once: tr(A^3) / 3 on the zeroed diagonal."""
    a = _square_no_diag(matrix)
    c = a @ a
    return int(round(float(np.einsum("ij,ji->", c, a)) / 3.0))


def count_feedforward_loops(matrix) -> int:
    """Ordered triples with edges s->m, m->t, s->t: sum (A^2 * A)."""
    a = _square_no_diag(matrix)
    return int(round(float(((a @ a) * a).sum())))


def _adjacency_lists(a: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(a[i]) for i in range(a.shape[0])]


def _cycles_from_adj(adj, a, n: int, k: int, budget: int) -> int:
    # each simple directed k-cycle is found once, from its smallest vertex
    count = 0
    ops = 0

    def extend(start: int, v: int, depth: int, visited: set) -> int:
        nonlocal ops
        if depth == k - 1:
            return int(a[v, start])
        found = 0
        for w in adj[v]:
            w = int(w)
            if w <= start or w in visited:
                continue
            ops += 1
            if ops > budget:
                raise EnumerationBudgetError(
                    f"cycle search exceeded {budget} edge expansions at k={k}")
            visited.add(w)
            found += extend(start, w, depth + 1, visited)
            visited.remove(w)
        return found

    for s in range(n):
        count += extend(s, s, 0, {s})
    return count


def count_cycles(matrix, k: int, budget: int = 50_000_000) -> int:
    """Simple directed k-cycles (k >= 2), each counted once."""
    if not (isinstance(k, (int, np.integer)) and k >= 2):
        raise ParameterError(f"cycle length must be an integer >= 2, got {k!r}")
    a = _square_no_diag(matrix).astype(bool)
    return _cycles_from_adj(_adjacency_lists(a), a, a.shape[0], int(k), budget)


def count_roots(matrix) -> int:
    """Sender nodes with an empty in-column but at least one outgoing edge."""
    a = _dense(matrix)
    m = a.shape[0]
    rows = a.sum(axis=1)
    cols = a.sum(axis=0)[:m]
    return int(((cols == 0) & (rows >= 1)).sum())


def count_leaves(matrix) -> int:
    """Sender nodes with an empty out-row but at least one incoming edge."""
    a = _dense(matrix)
    m = a.shape[0]
    rows = a.sum(axis=1)
    cols = a.sum(axis=0)[:m]
    return int(((rows == 0) & (cols >= 1)).sum())


def count_isolated(matrix) -> int:
    """Nodes with no incident edge at all (self-edges count as incident)."""
    a = _dense(matrix)
    m, n = a.shape
    cols = a.sum(axis=0)
    rows = a.sum(axis=1)
    iso_senders = int(((rows == 0) & (cols[:m] == 0)).sum())
    iso_receivers = int((cols[m:] == 0).sum())
    return iso_senders + iso_receivers


def weak_components(matrix) -> int:
    """Connected components of the undirected support on all n nodes."""
    a = _dense(matrix)
    m, n = a.shape
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    src, dst = np.nonzero(a)
    for i, j in zip(src.tolist(), dst.tolist()):
        if i == j:
            continue
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return len({find(x) for x in range(n)})


# ---------------------------------------------------------------------------
# subgraph patterns


@dataclass(frozen=True)
class SubgraphPattern:
    """A small directed pattern given as edges between labels 0..k-1."""

    edges: tuple
    k: int

    @classmethod
    def parse(cls, text: str) -> "SubgraphPattern":
        """Parse 'u>v' pairs separated by commas, e.g. '0>1,1>2,0>2'."""
        edges = []
        for part in text.split(","):
            part = part.strip()
            try:
                u_s, v_s = part.split(">")
                u, v = int(u_s), int(v_s)
            except ValueError as exc:
                raise ParameterError(f"bad pattern edge {part!r}") from exc
            if u == v:
                raise ParameterError(f"pattern may not contain the self-edge {part!r}")
            if (u, v) in edges:
                raise ParameterError(f"duplicate pattern edge {part!r}")
            if u < 0 or v < 0:
                raise ParameterError(f"pattern labels must be >= 0, got {part!r}")
            edges.append((u, v))
        if not edges:
            raise ParameterError("pattern needs at least one edge")
        labels = {u for e in edges for u in e}
        k = max(labels) + 1
        if labels != set(range(k)):
            raise ParameterError(f"pattern labels must cover 0..{k - 1} with no gaps")
        return cls(edges=tuple(sorted(edges)), k=k)

    @property
    def aut_size(self) -> int:
        es = set(self.edges)
        hits = 0
        for perm in itertools.permutations(range(self.k)):
            if all((perm[u], perm[v]) in es for u, v in self.edges) and len(es) == len(self.edges):
                hits += 1
        return hits

    def out_degrees(self) -> list[int]:
        out = [0] * self.k
        for u, _ in self.edges:
            out[u] += 1
        return out


def count_subgraph(matrix, pattern: SubgraphPattern, budget: int = 50_000_000) -> int:
    """Copies of the pattern in the graph (isomorphic images, each once)."""
    a = _square_no_diag(matrix).astype(bool)
    n = a.shape[0]
    if pattern.k > n:
        return 0
    embeddings = 0
    ops = 0
    for tup in itertools.permutations(range(n), pattern.k):
        ops += 1
        if ops > budget:
            raise EnumerationBudgetError(
                f"subgraph search exceeded {budget} vertex tuples at k={pattern.k}")
        if all(a[tup[u], tup[v]] for u, v in pattern.edges):
            embeddings += 1
    aut = pattern.aut_size
    assert embeddings % aut == 0
    return embeddings // aut


# ---------------------------------------------------------------------------
# expected counts: placements and moment products


def _placements(edges, verts) -> list[frozenset]:
    """Distinct edge-set images of a pattern on a labeled vertex tuple."""
    k = len(verts)
    seen = set()
    for perm in itertools.permutations(range(k)):
        seen.add(frozenset((verts[perm[u]], verts[perm[v]]) for u, v in edges))
    return sorted(seen, key=sorted)


def _moment_cache(spec: MixingSpec, n: int):
    cache: dict[int, float] = {0: 1.0}

    def get(i: int) -> float:
        if i not in cache:
            cache[i] = moment(spec, n, i)
        return cache[i]

    return get

def _placement_prob(edge_set, delta, variant: str) -> float:
    out: dict[int, int] = {}
    for u, _ in edge_set:
        out[u] = out.get(u, 0) + 1
    if variant == "completely_exchangeable":
        return delta(sum(out.values()))
    prod = 1.0
    for d in out.values():
        prod *= delta(d)
    return prod


def _check_variant(variant: str) -> None:
    if variant == "hierarchical":
        raise ParameterError(
            "closed-form pattern moments cover the independent and shared-bias "
            "ensembles; use the sampling route for the two-level one")
    if variant not in ("partially_exchangeable", "completely_exchangeable"):
        raise ParameterError(f"unknown variant {variant!r}")


def _mean_pattern_on_triples(spec, n, edges, variant) -> float:
    _check_variant(variant)
    delta = _moment_cache(spec, n)
    per_triple = sum(_placement_prob(p, delta, variant)
                     for p in _placements(edges, (0, 1, 2)))
    return math.comb(n, 3) * per_triple


def mean_feedback_loops(spec: MixingSpec, n: int,
                        variant: str = "partially_exchangeable") -> float:
    """Expected directed 3-cycle count: 2 C(n,3) E[theta]^3 for iid biases."""
    return _mean_pattern_on_triples(spec, n, _FBL_EDGES, variant)


def mean_feedforward_loops(spec: MixingSpec, n: int,
                           variant: str = "partially_exchangeable") -> float:
    """Expected feedforward count: 6 C(n,3) E[theta^2] E[theta] for iid biases."""
    return _mean_pattern_on_triples(spec, n, _FFL_EDGES, variant)


def mean_cycles(spec: MixingSpec, n: int, k: int,
                variant: str = "partially_exchangeable") -> float:
    """Expected simple k-cycle count: (k-1)! C(n,k) E[theta]^k for iid biases."""
    _check_variant(variant)
    if not (isinstance(k, (int, np.integer)) and 2 <= k <= n):
        raise ParameterError(f"cycle length must satisfy 2 <= k <= n, got {k!r}")
    if variant == "completely_exchangeable":
        per = moment(spec, n, int(k))
    else:
        per = moment(spec, n, 1) ** k
    return math.factorial(k - 1) * math.comb(n, int(k)) * per


def mean_subgraph(spec: MixingSpec, n: int, pattern: SubgraphPattern,
                  variant: str = "partially_exchangeable") -> float:
    """Expected copies: falling factorial over automorphisms times the
    per-placement probability, which factors into sender moments."""
    _check_variant(variant)
    if pattern.k > n:
        return 0.0
    delta = _moment_cache(spec, n)
    if variant == "completely_exchangeable":
        per = delta(len(pattern.edges))
    else:
        per = 1.0
        for d in pattern.out_degrees():
            per *= delta(d)
    falling = math.perm(n, pattern.k)
    return falling / pattern.aut_size * per


def _second_moment_on_triples(spec, n, edges) -> float:
    """E[N^2] for a 3-vertex pattern count under iid biases.

    Every ordered pair of triples falls in one of four overlap classes; the
    orientation sum within a class is computed by brute placement pairing.
    """
    delta = _moment_cache(spec, n)
    classes = [
        ((0, 1, 2), 1),
        ((0, 1, 3), 3 * (n - 3)),
        ((0, 3, 4), 3 * math.comb(max(n - 3, 0), 2)),
        ((3, 4, 5), math.comb(max(n - 3, 0), 3)),
    ]
    base = _placements(edges, (0, 1, 2))
    total = 0.0
    for other, mult in classes:
        if mult == 0:
            continue
        class_sum = 0.0
        for p in base:
            for q in _placements(edges, other):
                class_sum += _placement_prob(p | q, delta, "partially_exchangeable")
        total += mult * class_sum
    return math.comb(n, 3) * total


def var_feedback_loops(spec: MixingSpec, n: int) -> float:
    if n < 3:
        return 0.0
    mean = mean_feedback_loops(spec, n)
    return _second_moment_on_triples(spec, n, _FBL_EDGES) - mean * mean


def var_feedforward_loops(spec: MixingSpec, n: int) -> float:
    if n < 3:
        return 0.0
    mean = mean_feedforward_loops(spec, n)
    return _second_moment_on_triples(spec, n, _FFL_EDGES) - mean * mean


# ---------------------------------------------------------------------------
# roots, leaves, connectivity


def _root_leaf_inputs(spec: MixingSpec, n: int, m: int):
    if not (isinstance(m, (int, np.integer)) and 1 <= m <= n):
        raise ParameterError(f"sender count must satisfy 1 <= m <= n, got {m!r}")
    mu = moment(spec, n, 1)
    p_empty_row = math.exp(log_row_prob(spec, n, 0))
    return mu, p_empty_row


def mean_roots(spec: MixingSpec, n: int, m: int) -> float:
    """Expected root count among the m senders.

    A sender is a root when no sender row hits its column (its own row
    included, so no self-edge) and its row has at least one edge elsewhere.
    The own-row event couples the two conditions: P = (1 - mu)**(m-1) *
    ((1 - mu) - P{empty row}).
    """
    mu, p0 = _root_leaf_inputs(spec, n, m)
    return m * (1.0 - mu) ** (m - 1) * ((1.0 - mu) - p0)


def mean_leaves(spec: MixingSpec, n: int, m: int) -> float:
    """Expected leaf count among the m senders: empty own row, some in-edge."""
    mu, p0 = _root_leaf_inputs(spec, n, m)
    return m * p0 * (1.0 - (1.0 - mu) ** (m - 1))


def connectivity_bound(spec: MixingSpec, n: int) -> float:
    """Upper estimate of P{weakly connected} from the isolated-node count.

    Second-moment argument on the number of isolated nodes, treating
    distinct nodes' isolation events as uncorrelated; returns 1 when the
    isolation probability vanishes.
    """
    mu, p0 = _root_leaf_inputs(spec, n, n)
    p_iso = (1.0 - mu) ** (n - 1) * p0
    pair = p_iso * p_iso
    denom = (n - 1) / n * pair + p_iso / n
    if denom <= 0.0:
        return 1.0
    return 1.0 - pair / denom


# ---------------------------------------------------------------------------
# vectorized sampling routes

_TAG_MOTIF = 101
_TAG_CYCLE = 102
_TAG_ROOT_LEAF = 103


def _mc_adjacency(config: EnsembleConfig, count: int, rng) -> np.ndarray:
    thetas = sample_bias_matrix(config, count, rng).astype(np.float32)
    u = rng.random((count, config.m, config.n), dtype=np.float32)
    return u < thetas[:, :, None]


@dataclass(frozen=True)
class MotifMcReport:
    replicas: int
    fbl_mean: float
    fbl_se: float
    fbl_var: float
    ffl_mean: float
    ffl_se: float
    ffl_var: float


@dataclass(frozen=True)
class RootLeafMcReport:
    replicas: int
    roots_mean: float
    roots_se: float
    leaves_mean: float
    leaves_se: float


def _mean_se_var(x: np.ndarray):
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if len(x) > 1 else 0.0
    return mean, math.sqrt(var / len(x)), var


def mc_motifs(config: EnsembleConfig, replicas: int, chunk: int = 1024) -> MotifMcReport:
    """Replica means and variances of the two triple counts.

    Replicates only the adjacency law (bias draws then independent rows),
    not the bit-level sampler, so large replica counts stay affordable;
    results are deterministic in (master_seed, chunk).
    """
    if config.m != config.n:
        raise ParameterError("triple statistics need a square ensemble (m == n)")
    n = config.n
    fbl = np.empty(replicas)
    ffl = np.empty(replicas)
    for lo in range(0, replicas, chunk):
        c = min(chunk, replicas - lo)
        rng = spawn_rng(config.master_seed, lo, _TAG_MOTIF)
        a = _mc_adjacency(config, c, rng).astype(np.float32)
        idx = np.arange(n)
        a[:, idx, idx] = 0.0
        sq = a @ a
        fbl[lo:lo + c] = np.einsum("rij,rji->r", sq, a) / 3.0
        ffl[lo:lo + c] = (sq * a).sum(axis=(1, 2))
    f_mean, f_se, f_var = _mean_se_var(fbl)
    g_mean, g_se, g_var = _mean_se_var(ffl)
    return MotifMcReport(replicas=replicas, fbl_mean=f_mean, fbl_se=f_se, fbl_var=f_var,
                         ffl_mean=g_mean, ffl_se=g_se, ffl_var=g_var)


def mc_cycles(config: EnsembleConfig, ks, replicas: int, chunk: int = 512,
              budget: int = 50_000_000) -> dict[int, tuple[float, float]]:
    """Replica mean and standard error of the k-cycle count for each k."""
    if config.m != config.n:
        raise ParameterError("cycle statistics need a square ensemble (m == n)")
    ks = [int(k) for k in ks]
    if any(k < 2 for k in ks):
        raise ParameterError("cycle lengths must be >= 2")
    n = config.n
    counts = {k: np.empty(replicas) for k in ks}
    for lo in range(0, replicas, chunk):
        c = min(chunk, replicas - lo)
        rng = spawn_rng(config.master_seed, lo, _TAG_CYCLE)
        a = _mc_adjacency(config, c, rng)
        idx = np.arange(n)
        a[:, idx, idx] = False
        for r in range(c):
            adj = _adjacency_lists(a[r])
            for k in ks:
                counts[k][lo + r] = _cycles_from_adj(adj, a[r], n, k, budget)
    out = {}
    for k in ks:
        mean, se, _ = _mean_se_var(counts[k])
        out[k] = (mean, se)
    return out


def mc_roots_leaves(config: EnsembleConfig, replicas: int, chunk: int = 256) -> RootLeafMcReport:
    """Replica means of the root and leaf counts among senders."""
    m = config.m
    roots = np.empty(replicas)
    leaves = np.empty(replicas)
    for lo in range(0, replicas, chunk):
        c = min(chunk, replicas - lo)
        rng = spawn_rng(config.master_seed, lo, _TAG_ROOT_LEAF)
        a = _mc_adjacency(config, c, rng)
        rows = a.sum(axis=2)
        cols = a.sum(axis=1)[:, :m]
        roots[lo:lo + c] = ((cols == 0) & (rows >= 1)).sum(axis=1)
        leaves[lo:lo + c] = ((rows == 0) & (cols >= 1)).sum(axis=1)
    r_mean, r_se, _ = _mean_se_var(roots)
    l_mean, l_se, _ = _mean_se_var(leaves)
    return RootLeafMcReport(replicas=replicas, roots_mean=r_mean, roots_se=r_se,
                            leaves_mean=l_mean, leaves_se=l_se)
