"""Network generation and topology measurement.

All generators return connected simple graphs over nodes 0..n-1 and are
deterministic for a given seed. Edge lists are stored sorted with u < v so
that downstream iteration order is reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InfeasibleDegree(ValueError):
    """No simple connected k-regular graph exists for these parameters."""


class InvalidParameter(ValueError):
    """Generator or measurement parameters out of range."""


class EmptyGraph(ValueError):
    """Operation requires at least one edge."""


class TargetUnreachable(RuntimeError):
    """Rewiring ran out of steps far from the requested assortativity."""

    def __init__(self, msg: str, network: "Network | None" = None, achieved_rho: float | None = None):
        super().__init__(msg)
        self.network = network
        self.achieved_rho = achieved_rho


class Network:
    """Undirected simple graph over node indices 0..n-1."""

    def __init__(self, n: int, edges) -> None:
        self.n = int(n)
        if self.n < 1:
            raise ValueError("need at least one node")
        pairs = sorted((u, v) if u < v else (v, u) for u, v in edges)
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
            if np.any(np.all(arr[1:] == arr[:-1], axis=1)):
                raise ValueError("duplicate edges are not allowed")
        self.edges = arr
        self.degrees = np.bincount(arr.ravel(), minlength=self.n)
        self._csr: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def mean_degree(self) -> float:
        return float(self.degrees.mean())

    def degree(self, node: int) -> int:
        return int(self.degrees[node])

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Adjacency as (indptr, neighbors, edge_ids) arrays."""
        if self._csr is None:
            e = self.edges
            src = np.concatenate([e[:, 0], e[:, 1]])
            dst = np.concatenate([e[:, 1], e[:, 0]])
            eid = np.tile(np.arange(len(e), dtype=np.int64), 2)
            order = np.argsort(src, kind="stable")
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._csr = (indptr, dst[order], eid[order])
        return self._csr

    def neighbors(self, node: int) -> np.ndarray:
        indptr, nbr, _ = self.csr()
        return nbr[indptr[node] : indptr[node + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors(u)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        if self.num_edges < self.n - 1:
            return False
        indptr, nbr, _ = self.csr()
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in nbr[indptr[u] : indptr[u + 1]]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(int(v))
        return count == self.n


def complete_graph(n: int) -> Network:
    """The complete graph on n nodes."""
    if n < 1:
        raise InvalidParameter("need n >= 1")
    return Network(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def _has_suitable(stubs: np.ndarray, edge_set: set[tuple[int, int]]) -> bool:
    nodes = sorted(set(int(s) for s in stubs))
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            if (u, v) not in edge_set:
                return True
    return False


def _pair_stubs(n: int, k: int, rng: np.random.Generator) -> set[tuple[int, int]] | None:
    """One attempt at matching stubs into a simple k-regular edge set."""
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), k)
    while len(stubs):
        rng.shuffle(stubs)
        leftover: list[int] = []
        for i in range(0, len(stubs), 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            if u > v:
                u, v = v, u
            if u == v or (u, v) in edges:
                leftover.append(u)
                leftover.append(v)
            else:
                edges.add((u, v))
        if len(leftover) == len(stubs) and not _has_suitable(stubs, edges):
            return None  # dead end: every remaining pairing is a self-loop or duplicate
        stubs = np.array(leftover, dtype=np.int64)
    return edges


def regular_random(n: int, k: int, seed: int) -> Network:
    """Connected random k-regular graph via stub pairing with repair and retry."""
    if n < 2 or k < 1 or k >= n or (n * k) % 2 != 0:
        raise InfeasibleDegree(
            f"cannot build a connected simple {k}-regular graph on {n} nodes"
        )
    rng = np.random.default_rng(seed)
    while True:
        edges = _pair_stubs(n, k, rng)
        if edges is None:
            continue
        g = Network(n, edges)
        if g.is_connected():
            return g


def barabasi_albert(n: int, m: int, seed: int) -> Network:
    """Preferential-attachment graph grown from a complete seed on max(m, 2) nodes.

    Each arriving node attaches m edges to distinct existing nodes chosen with
    probability proportional to their current degree.
    """
    if m < 1 or m >= n:
        raise InvalidParameter(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    s = max(m, 2)
    edges = [(i, j) for i in range(s) for j in range(i + 1, s)]
    repeated = [node for e in edges for node in e]  # one entry per edge endpoint
    for v in range(s, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        chosen = sorted(targets)
        for t in chosen:
            edges.append((t, v))
        repeated.extend(chosen)
        repeated.extend([v] * m)
    return Network(n, edges)


@dataclass(frozen=True, eq=False)
class DegreeMixing:
    """Remaining-degree mixing statistics of an undirected graph."""

    q: np.ndarray  # excess-degree distribution, indexed by remaining degree
    e_jk: np.ndarray  # joint remaining-degree distribution at link ends (symmetric)
    sigma_q: float
    rho: float


def assortativity(g: Network) -> DegreeMixing:
    """Degree-mixing structure and the assortativity coefficient.

    rho = (sum_jk jk (e_jk - q_j q_k)) / sigma_q^2 over remaining degrees;
    returns rho = 0 for regular graphs, where sigma_q = 0.
    """
    if g.num_edges == 0:
        raise EmptyGraph("assortativity needs at least one edge")
    rem = g.degrees - 1
    ru = rem[g.edges[:, 0]]
    rv = rem[g.edges[:, 1]]
    maxr = int(max(ru.max(), rv.max()))
    e = np.zeros((maxr + 1, maxr + 1))
    np.add.at(e, (ru, rv), 1.0)
    np.add.at(e, (rv, ru), 1.0)
    e /= 2.0 * g.num_edges
    q = e.sum(axis=1)
    js = np.arange(maxr + 1, dtype=float)
    mu = js @ q
    var = (js * js) @ q - mu * mu
    if var <= 0.0:
        rho = 0.0
    else:
        rho = float((js @ e @ js - mu * mu) / var)
    return DegreeMixing(q=q, e_jk=e, sigma_q=float(np.sqrt(max(var, 0.0))), rho=rho)


def rewire_to_assortativity(
    g: Network,
    target_rho: float,
    tol: float = 0.02,
    max_steps: int = 200_000,
    seed: int = 0,
) -> tuple[Network, float]:
    """Push assortativity toward a target with degree-preserving double-edge swaps.

    Each proposal picks two disjoint edges and keeps the endpoint rewiring that
    moves rho strictly closer to the target, provided the graph stays simple
    and connected. Stops once |rho - target| <= tol; after max_steps proposals
    the graph is returned if within 2*tol, otherwise TargetUnreachable is
    raised (with the best graph attached, so the caller may still accept it).
    """
    if not -1.0 <= target_rho <= 1.0:
        raise InvalidParameter(f"target rho {target_rho} outside [-1, 1]")
    if g.num_edges < 2:
        raise EmptyGraph("rewiring needs at least two edges")
    num_e = g.num_edges
    rem = (g.degrees - 1).astype(float)
    ends = np.concatenate([rem[g.edges[:, 0]], rem[g.edges[:, 1]]])
    mu = float(ends.mean())
    var = float((ends * ends).mean() - mu * mu)
    if var <= 0.0:
        # regular degree sequence: rho is 0 by convention and swaps cannot move it
        if abs(0.0 - target_rho) <= tol:
            return g, 0.0
        raise TargetUnreachable(
            f"regular degree sequence pins rho at 0, target was {target_rho}",
            network=g,
            achieved_rho=0.0,
        )

    edges = [(int(u), int(v)) for u, v in g.edges]
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    s_sum = float(sum(rem[u] * rem[v] for u, v in edges))

    def rho_of(s: float) -> float:
        return (s / num_e - mu * mu) / var

    def connected() -> bool:
        seen = bytearray(g.n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = 1
                    count += 1
                    queue.append(y)
        return count == g.n

    rng = np.random.default_rng(seed)
    cur = rho_of(s_sum)
    accepted = 0
    steps = 0
    plateau_p = 0.05  # occasional gap-neutral swaps keep the greedy walk from jamming
    while abs(cur - target_rho) > tol and steps < max_steps:
        steps += 1
        i = int(rng.integers(num_e))
        j = int(rng.integers(num_e))
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if len({a, b, c, d}) < 4:
            continue
        old = rem[a] * rem[b] + rem[c] * rem[d]
        variants = (
            ((a, c), (b, d), rem[a] * rem[c] + rem[b] * rem[d]),
            ((a, d), (b, c), rem[a] * rem[d] + rem[b] * rem[c]),
        )
        gap = abs(cur - target_rho)
        best = None
        best_gap = gap
        plateau = None
        for e1, e2, new in variants:
            new_gap = abs(rho_of(s_sum - old + new) - target_rho)
            if new_gap > best_gap:
                continue
            (p1, q1), (p2, q2) = e1, e2
            if q1 in adj[p1] or q2 in adj[p2]:
                continue
            if new_gap < best_gap:
                best = (e1, e2, new)
                best_gap = new_gap
            elif plateau is None:
                plateau = (e1, e2, new)
        if best is None and plateau is not None and rng.random() < plateau_p:
            best = plateau
        if best is None:
            continue
        (p1, q1), (p2, q2) = best[0], best[1]
        # apply tentatively, revert if the swap disconnects the graph
        adj[a].discard(b)
        adj[b].discard(a)
        adj[c].discard(d)
        adj[d].discard(c)
        adj[p1].add(q1)
        adj[q1].add(p1)
        adj[p2].add(q2)
        adj[q2].add(p2)
        if not connected():
            adj[p1].discard(q1)
            adj[q1].discard(p1)
            adj[p2].discard(q2)
            adj[q2].discard(p2)
            adj[a].add(b)
            adj[b].add(a)
            adj[c].add(d)
            adj[d].add(c)
            continue
        edges[i] = (p1, q1) if p1 < q1 else (q1, p1)
        edges[j] = (p2, q2) if p2 < q2 else (q2, p2)
        s_sum = s_sum - old + best[2]
        cur = rho_of(s_sum)
        accepted += 1

    if accepted == 0 and abs(cur - target_rho) <= tol:
        return g, cur
    result = Network(g.n, edges)
    if abs(cur - target_rho) <= 2.0 * tol:
        return result, cur
    raise TargetUnreachable(
        f"after {max_steps} proposals rho={cur:.4f}, target {target_rho} (tol {tol})",
        network=result,
        achieved_rho=cur,
    )


@dataclass(frozen=True, eq=False)
class DegreeStats:
    """Degree summary: mean, histogram rows (degree, count), nodes by degree desc."""

    mean_degree: float
    histogram: np.ndarray
    nodes_by_degree: np.ndarray


def degree_stats(g: Network) -> DegreeStats:
    """Exact degree summary; histogram keeps only degrees that occur."""
    counts = np.bincount(g.degrees)
    degs = np.nonzero(counts)[0]
    hist = np.column_stack([degs, counts[degs]])
    order = np.lexsort((np.arange(g.n), -g.degrees))
    return DegreeStats(
        mean_degree=g.mean_degree,
        histogram=hist,
        nodes_by_degree=order,
    )


def hub_order(g: Network, seed: int) -> np.ndarray:
    """Nodes sorted by degree descending, ties broken by a seeded shuffle.

    Makes "top fraction of nodes by degree" well defined on degree plateaus.
    """
    rng = np.random.default_rng(seed)
    tiebreak = rng.permutation(g.n)
    return np.lexsort((tiebreak, -g.degrees))


def fit_power_law(degrees, counts) -> tuple[float, float]:
    """Least-squares log-log fit of a degree histogram.

    Returns (gamma, pearson_r) for counts ~ degree^-gamma over the bins with
    positive degree and count.
    """
    d = np.asarray(degrees, dtype=float)
    c = np.asarray(counts, dtype=float)
    mask = (d > 0) & (c > 0)
    if mask.sum() < 2:
        raise InvalidParameter("need at least two positive histogram bins")
    x = np.log(d[mask])
    y = np.log(c[mask])
    slope = float(np.polyfit(x, y, 1)[0])
    r = float(np.corrcoef(x, y)[0, 1])
    return -slope, r


def write_edgelist(g: Network, path) -> None:
    """One "u v" pair per line, 0-indexed, each undirected edge listed once."""
    lines = [f"{u} {v}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_edgelist(path, n: int | None = None) -> Network:
    """Inverse of :func:`write_edgelist`; n defaults to max index + 1."""
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = line.split()
        edges.append((int(u), int(v)))
    if not edges and n is None:
        raise EmptyGraph(f"no edges in {path}")
    if n is None:
        n = max(max(u, v) for u, v in edges) + 1
    return Network(n, edges)


def write_degree_histogram(g: Network, path) -> None:
    """CSV with columns degree,count."""
    stats = degree_stats(g)
    rows = ["degree,count"] + [f"{int(d)},{int(c)}" for d, c in stats.histogram]
    Path(path).write_text("\n".join(rows) + "\n")
