"""Population state and the per-edge game round.

Every time-step each edge plays exactly one prisoner's dilemma round: both
endpoints cooperate with their strategy's probability conditioned on that
edge's remembered last outcome, payoffs accumulate on both endpoints, and the
memory is updated. An edge that has never been played yet gets an
unconditioned first move: both endpoints cooperate with probability 1/2,
independent of strategy. Edge memory is stored from the lower-indexed
endpoint's perspective.
"""

from __future__ import annotations

import csv

import numpy as np

from .networks import Network
from .strategies import MemoryOneStrategy, PayoffMatrix

UNPLAYED = 4  # edge-memory sentinel beyond the four outcome states

# perspective swap for the higher-indexed endpoint: CD <-> DC, UNPLAYED fixed
_SWAP = np.array([0, 2, 1, 3, 4], dtype=np.int8)


class IsolatedNode(ValueError):
    """Fitness is undefined for a node with no neighbors."""


class Population:
    """Mutable per-run state: strategy index, cumulative payoff, pair memory."""

    def __init__(self, net: Network, strategies, strat: np.ndarray) -> None:
        strategies = tuple(strategies)
        if not strategies:
            raise ValueError("strategy table must be non-empty")
        strat = np.asarray(strat, dtype=np.int64)
        if strat.shape != (net.n,):
            raise ValueError("need one strategy index per node")
        if strat.min() < 0 or strat.max() >= len(strategies):
            raise ValueError("strategy index out of range")
        self.net = net
        self.strategies: tuple[MemoryOneStrategy, ...] = strategies
        self.strat = strat
        self.pay = np.zeros(net.n)
        self.mem = np.full(net.num_edges, UNPLAYED, dtype=np.int8)
        self.counts = np.bincount(strat, minlength=len(strategies))
        self._coop = np.array([[s.p1, s.p2, s.p3, s.p4, 0.5] for s in strategies])
        self._eu = np.ascontiguousarray(net.edges[:, 0])
        self._ev = np.ascontiguousarray(net.edges[:, 1])

    @property
    def n(self) -> int:
        return self.net.n

    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.strategies)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def init_random(
    net: Network,
    strat_a: MemoryOneStrategy,
    strat_b: MemoryOneStrategy,
    fraction_a: float,
    seed: int,
) -> Population:
    """Assign strategy A to round(fraction_a * n) nodes chosen uniformly at random."""
    if not 0.0 <= fraction_a <= 1.0:
        raise ValueError(f"fraction_a={fraction_a} outside [0, 1]")
    rng = np.random.default_rng(seed)
    n_a = _round_half_up(fraction_a * net.n)
    strat = np.ones(net.n, dtype=np.int64)
    strat[rng.permutation(net.n)[:n_a]] = 0
    return Population(net, (strat_a, strat_b), strat)


def init_hubs(
    net: Network,
    strat_hub: MemoryOneStrategy,
    strat_rest: MemoryOneStrategy,
    fraction_hub: float,
    seed: int,
) -> Population:
    """Assign the hub strategy to the top round(fraction_hub * n) nodes by degree.

    Degree ties are broken by a seeded shuffle (see networks.hub_order), so the
    cut is well defined on degree plateaus. Per-class mean degrees can be read
    off afterwards with :func:`class_mean_degrees`.
    """
    if not 0.0 <= fraction_hub <= 1.0:
        raise ValueError(f"fraction_hub={fraction_hub} outside [0, 1]")
    from .networks import hub_order

    order = hub_order(net, seed)
    n_hub = _round_half_up(fraction_hub * net.n)
    strat = np.ones(net.n, dtype=np.int64)
    strat[order[:n_hub]] = 0
    return Population(net, (strat_hub, strat_rest), strat)


def class_mean_degrees(pop: Population) -> list[float]:
    """Mean degree of each strategy class; nan for extinct classes."""
    out = []
    for idx in range(len(pop.strategies)):
        mask = pop.strat == idx
        out.append(float(pop.net.degrees[mask].mean()) if mask.any() else float("nan"))
    return out


def play_step(pop: Population, m: PayoffMatrix, rng: np.random.Generator) -> None:
    """Play one round on every edge, in place.

    Draw order is fixed (all lower-endpoint draws, then all higher-endpoint
    draws, in sorted edge order) so runs are bit-reproducible for a seed.
    """
    eu, ev, mem = pop._eu, pop._ev, pop.mem
    coop = pop._coop
    pu = coop[pop.strat[eu], mem]
    pv = coop[pop.strat[ev], _SWAP[mem]]
    num_e = len(mem)
    cu = rng.random(num_e) < pu
    cv = rng.random(num_e) < pv
    new = 2 * (~cu) + (~cv)  # 0..3 outcome from the lower endpoint's perspective
    pay_u = np.array([m.r, m.s, m.t, m.p])[new]
    pay_v = np.array([m.r, m.t, m.s, m.p])[new]
    pop.pay += np.bincount(eu, weights=pay_u, minlength=pop.n)
    pop.pay += np.bincount(ev, weights=pay_v, minlength=pop.n)
    mem[:] = new


def fitness(pop: Population, node: int) -> float:
    """Cumulative payoff averaged over the node's neighbor count."""
    deg = pop.net.degrees[node]
    if deg == 0:
        raise IsolatedNode(f"node {node} has no neighbors")
    return float(pop.pay[node] / deg)


def reset_node(pop: Population, node: int) -> None:
    """Zero the node's payoff and forget all of its pair memories.

    The strategy is left unchanged; neighbors are unaffected.
    """
    pop.pay[node] = 0.0
    indptr, _, eid = pop.net.csr()
    pop.mem[eid[indptr[node] : indptr[node + 1]]] = UNPLAYED


def set_strategy(pop: Population, node: int, strategy_index: int) -> None:
    """Reassign a node's strategy, keeping the class counts current."""
    old = pop.strat[node]
    if old != strategy_index:
        pop.counts[old] -= 1
        pop.counts[strategy_index] += 1
        pop.strat[node] = strategy_index


def write_snapshot(pop: Population, path) -> None:
    """CSV snapshot: node_id, strategy_label, cumulative_payoff, degree."""
    labels = pop.labels()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "strategy_label", "cumulative_payoff", "degree"])
        for i in range(pop.n):
            w.writerow(
                [i, labels[pop.strat[i]], repr(float(pop.pay[i])), int(pop.net.degrees[i])]
            )
