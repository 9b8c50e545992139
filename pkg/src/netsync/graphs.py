"""Graphs for the coupled-oscillator model: regular families, seeded random
generators, Laplacian matrices and their spectra, and the algebraic
connectivity bounds used by the coupling-threshold analysis.

Vertices are 0-indexed.  Star graphs put the hub at vertex 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DisconnectedError,
    InvalidParamsError,
    TooSmallError,
)
from .matcore import SpectralDecomp, jacobi_eig

SPECTRUM_MAX_VERTICES = 500

# Eigenvalues at or below this magnitude count as the zero eigenvalue of a
# Laplacian (one per connected component); scale set by the Jacobi residual.
ZERO_EIGENVALUE_TOL = 1e-9

_CONNECTIVITY_RETRIES = 1000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count plus a set of (u, v) pairs
    normalized to u < v."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParamsError("graph needs at least one vertex")
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise InvalidParamsError(f"bad edge {e} for n={self.n}")


def graph_from_edges(n: int, edges) -> Graph:
    """Build a Graph from an iterable of vertex pairs, normalizing order
    and rejecting self-loops and duplicates."""
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise InvalidParamsError(f"self-loop at vertex {u}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise InvalidParamsError(f"duplicate edge {e}")
        seen.add(e)
    return Graph(n=n, edges=frozenset(seen))


def sorted_edges(g: Graph) -> list[tuple[int, int]]:
    return sorted(g.edges)


def neighbors(g: Graph) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        out[u].append(v)
        out[v].append(u)
    for lst in out:
        lst.sort()
    return out


def degrees(g: Graph) -> np.ndarray:
    d = np.zeros(g.n, dtype=int)
    for u, v in g.edges:
        d[u] += 1
        d[v] += 1
    return d


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    a.setflags(write=False)
    return a


def laplacian(g: Graph) -> np.ndarray:
    """Degree matrix minus adjacency matrix; symmetric with zero row sums."""
    lap = -adjacency(g).copy()
    lap.setflags(write=True)
    d = degrees(g)
    np.fill_diagonal(lap, d.astype(float))
    lap.setflags(write=False)
    return lap


def is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    adj = neighbors(g)
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == g.n


def _bfs_depths(adj: list[list[int]], source: int) -> list[int]:
    depth = [-1] * len(adj)
    depth[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if depth[v] < 0:
                    depth[v] = d
                    nxt.append(v)
        frontier = nxt
    return depth


def diameter(g: Graph) -> int:
    """Maximum BFS shortest-path length over all vertex pairs."""
    adj = neighbors(g)
    best = 0
    for s in range(g.n):
        depth = _bfs_depths(adj, s)
        if min(depth) < 0:
            raise DisconnectedError("diameter is undefined for a disconnected graph")
        best = max(best, max(depth))
    return best


class RegularKind(Enum):
    COMPLETE = "complete"
    STAR = "star"
    PATH = "path"
    RING = "ring"


_MIN_VERTICES = {
    RegularKind.COMPLETE: 2,
    RegularKind.STAR: 2,
    RegularKind.PATH: 2,
    RegularKind.RING: 3,
}


def build_regular(kind: RegularKind, n: int) -> Graph:
    if n < _MIN_VERTICES[kind]:
        raise TooSmallError(f"{kind.value} graph needs n >= {_MIN_VERTICES[kind]}, got {n}")
    if kind is RegularKind.COMPLETE:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind is RegularKind.STAR:
        edges = [(0, v) for v in range(1, n)]
    elif kind is RegularKind.PATH:
        edges = [(u, u + 1) for u in range(n - 1)]
    else:
        edges = [(u, u + 1) for u in range(n - 1)] + [(0, n - 1)]
    return graph_from_edges(n, edges)


@dataclass(frozen=True)
class ErdosRenyi:
    p: float


@dataclass(frozen=True)
class WattsStrogatz:
    k: int
    p: float


@dataclass(frozen=True)
class BarabasiAlbert:
    m: int


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Each potential edge kept independently with probability p; redrawn
    until connected (up to the retry cap)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParamsError(f"edge probability must be in [0, 1], got {p}")
    if n < 2:
        raise TooSmallError("random graphs need n >= 2")
    rng = np.random.default_rng(seed)
    for _ in range(_CONNECTIVITY_RETRIES):
        edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < p
        ]
        g = graph_from_edges(n, edges)
        if is_connected(g):
            return g
    raise DisconnectedError(
        f"no connected draw in {_CONNECTIVITY_RETRIES} tries (p={p} too small for n={n})"
    )


def watts_strogatz(n: int, k: int, p: float, seed: int) -> Graph:
    """Ring lattice with k neighbors per vertex, each lattice edge rewired
    with probability p to a uniformly chosen non-neighbor (skipped when no
    candidate exists); redrawn until connected."""
    if k % 2 != 0 or k < 2 or k >= n:
        raise InvalidParamsError(f"watts_strogatz needs even k with 2 <= k < n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParamsError(f"rewiring probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    for _ in range(_CONNECTIVITY_RETRIES):
        adj: list[set[int]] = [set() for _ in range(n)]

        def add(u: int, v: int) -> None:
            adj[u].add(v)
            adj[v].add(u)

        def drop(u: int, v: int) -> None:
            adj[u].discard(v)
            adj[v].discard(u)

        for off in range(1, k // 2 + 1):
            for u in range(n):
                add(u, (u + off) % n)
        for off in range(1, k // 2 + 1):
            for u in range(n):
                far = (u + off) % n
                if rng.random() >= p:
                    continue
                candidates = [w for w in range(n) if w != u and w not in adj[u]]
                if not candidates:
                    continue
                w = candidates[rng.integers(len(candidates))]
                drop(u, far)
                add(u, w)
        g = graph_from_edges(n, ((u, v) for u in range(n) for v in adj[u] if u < v))
        if is_connected(g):
            return g
    raise DisconnectedError(f"no connected draw in {_CONNECTIVITY_RETRIES} tries")


def barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment: start from an m-clique, then attach each
    new vertex to m distinct existing vertices with probability
    proportional to degree.  Always connected."""
    if not 1 <= m < n:
        raise InvalidParamsError(f"barabasi_albert needs 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    edges = {(u, v) for u in range(m) for v in range(u + 1, m)}
    deg = np.zeros(n)
    deg[:m] = m - 1
    for v in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            weights = deg[:v].copy()
            if targets:
                weights[list(targets)] = 0.0
            total = weights.sum()
            if total <= 0.0:
                # degenerate start (m = 1 clique has no edges): uniform pick
                candidates = [u for u in range(v) if u not in targets]
                targets.add(candidates[rng.integers(len(candidates))])
                continue
            pick = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
            targets.add(min(pick, v - 1))
        for t in sorted(targets):
            edges.add((t, v))
            deg[t] += 1
            deg[v] += 1
    return graph_from_edges(n, edges)


def build_random(model, n: int, seed: int) -> Graph:
    """Dispatch on the random-model descriptor; deterministic per
    (model, n, seed)."""
    if isinstance(model, ErdosRenyi):
        return erdos_renyi(n, model.p, seed)
    if isinstance(model, WattsStrogatz):
        return watts_strogatz(n, model.k, model.p, seed)
    if isinstance(model, BarabasiAlbert):
        return barabasi_albert(n, model.m, seed)
    raise InvalidParamsError(f"unknown random graph model: {model!r}")


def spectrum(g: Graph, *, cap: int = SPECTRUM_MAX_VERTICES) -> SpectralDecomp:
    """Laplacian eigendecomposition with eigenvalues at the zero threshold
    clamped to exactly 0 (their count equals the number of connected
    components)."""
    if g.n > cap:
        raise InvalidParamsError(f"spectrum supports n <= {cap}, got {g.n}")
    decomp = jacobi_eig(laplacian(g))
    vals = decomp.eigenvalues.copy()
    vals[np.abs(vals) <= ZERO_EIGENVALUE_TOL] = 0.0
    return SpectralDecomp(eigenvalues=vals, eigenvectors=decomp.eigenvectors)


def lambda2(g: Graph) -> float:
    return float(spectrum(g).eigenvalues[1])


def lambda2_analytic(kind: RegularKind, n: int) -> float:
    """Closed-form algebraic connectivity of the regular families."""
    if n < _MIN_VERTICES[kind]:
        raise TooSmallError(f"{kind.value} graph needs n >= {_MIN_VERTICES[kind]}, got {n}")
    if kind is RegularKind.COMPLETE:
        return float(n)
    if kind is RegularKind.RING:
        return 2.0 - 2.0 * np.cos(2.0 * np.pi / n)
    if kind is RegularKind.STAR:
        return 2.0 if n == 2 else 1.0
    return 2.0 - 2.0 * np.cos(np.pi / n)


def lambda2_bounds(g: Graph) -> tuple[float, float]:
    """(4/(n*diameter), n*min_degree/(n-1)) bracket for the algebraic
    connectivity of a connected graph."""
    if not is_connected(g):
        raise DisconnectedError("lambda2 bounds require a connected graph")
    d = diameter(g)
    g1 = int(degrees(g).min())
    return 4.0 / (g.n * d), g.n * g1 / (g.n - 1.0)


def write_edge_list(g: Graph, path) -> None:
    """Text format: first line n, then one 'u v' pair per line."""
    lines = [str(g.n)]
    lines += [f"{u} {v}" for u, v in sorted_edges(g)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> Graph:
    text = Path(path).read_text()
    rows = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not rows:
        raise InvalidParamsError(f"empty edge-list file: {path}")
    try:
        n = int(rows[0])
    except ValueError as exc:
        raise InvalidParamsError(f"first line must be the vertex count: {rows[0]!r}") from exc
    pairs = []
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InvalidParamsError(f"bad edge line: {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return graph_from_edges(n, pairs)
