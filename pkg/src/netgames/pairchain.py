"""Long-run expected payoffs for ordered pairs of memory-one strategies.

Two memory-one strategies playing each other form a Markov chain over the four
joint outcomes (CC, CD, DC, DD from the first player's perspective). The
long-run per-round payoff is the time-average occupancy of that chain dotted
with the per-state payoffs. Deterministic strategies can make the chain
reducible or periodic, so the occupancy is computed as the Cesaro limit from
the uniform distribution over the four states, which matches a first round of
unconditioned fair coin flips in the simulation engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .strategies import MemoryOneStrategy, PayoffMatrix

# state order CC, CD, DC, DD; the opponent sees CD and DC swapped
_SWAP = (0, 2, 1, 3)


@dataclass(frozen=True, eq=False)
class PairChain:
    """4x4 row-stochastic transition matrix over joint outcomes."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = self.matrix
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
        if np.any(m < 0.0) or np.any(m > 1.0):
            raise ValueError("transition entries must lie in [0, 1]")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition rows must sum to 1")


@dataclass(frozen=True)
class ExpectedPayoffPair:
    """Long-run mean per-round payoffs for an ordered pair (A, B)."""

    e_ab: float
    e_ba: float


def build_chain(a: MemoryOneStrategy, b: MemoryOneStrategy) -> PairChain:
    """Transition matrix for A playing B, rows and columns in A's perspective."""
    pa = np.array(a.probs)
    pb = np.array(b.probs)[list(_SWAP)]
    m = np.empty((4, 4))
    m[:, 0] = pa * pb
    m[:, 1] = pa * (1.0 - pb)
    m[:, 2] = (1.0 - pa) * pb
    m[:, 3] = (1.0 - pa) * (1.0 - pb)
    return PairChain(m)


def _recurrent_classes(P: np.ndarray) -> tuple[list[list[int]], list[int]]:
    """Closed communicating classes and the remaining transient states."""
    n = P.shape[0]
    reach = (np.eye(n, dtype=bool) | (P > 0.0)).astype(np.int64)
    for _ in range(2):  # squaring twice covers all paths of length <= 4
        reach = (reach @ reach) > 0
        reach = reach.astype(np.int64)
    reach = reach > 0
    comm = reach & reach.T
    seen: set[int] = set()
    classes: list[list[int]] = []
    for i in range(n):
        if i in seen:
            continue
        members = [j for j in range(n) if comm[i, j]]
        seen.update(members)
        classes.append(members)
    recurrent = []
    transient: list[int] = []
    for c in classes:
        inside = np.zeros(n, dtype=bool)
        inside[c] = True
        if np.any(P[c][:, ~inside] > 0.0):
            transient.extend(c)
        else:
            recurrent.append(c)
    return recurrent, sorted(transient)


def _class_stationary(Pc: np.ndarray) -> np.ndarray:
    k = Pc.shape[0]
    if k == 1:
        return np.ones(1)
    a = Pc.T - np.eye(k)
    a[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


def limit_distribution(chain: PairChain, initial: np.ndarray | None = None) -> np.ndarray:
    """Time-average state occupancy, starting from ``initial`` (default uniform).

    Exact for reducible and periodic chains: transient mass is routed to each
    closed class by absorption probabilities, then spread with that class's
    stationary vector.
    """
    P = chain.matrix
    n = P.shape[0]
    mu = np.full(n, 1.0 / n) if initial is None else np.asarray(initial, dtype=float)
    if mu.shape != (n,) or np.any(mu < 0.0) or abs(mu.sum() - 1.0) > 1e-9:
        raise ValueError("initial must be a probability vector over the four states")
    recurrent, transient = _recurrent_classes(P)
    weights = np.array([mu[c].sum() for c in recurrent])
    if transient:
        q = P[np.ix_(transient, transient)]
        b = np.column_stack([P[transient][:, c].sum(axis=1) for c in recurrent])
        h = np.linalg.solve(np.eye(len(transient)) - q, b)
        weights = weights + mu[transient] @ h
    out = np.zeros(n)
    for w, c in zip(weights, recurrent):
        out[np.array(c)] = w * _class_stationary(P[np.ix_(c, c)])
    return out


def stationary_distribution(chain: PairChain) -> np.ndarray:
    """Unique stationary vector of an irreducible chain; raises if reducible."""
    recurrent, transient = _recurrent_classes(chain.matrix)
    if transient or len(recurrent) != 1:
        raise ValueError("chain is reducible; use limit_distribution instead")
    out = np.zeros(4)
    out[np.array(recurrent[0])] = _class_stationary(
        chain.matrix[np.ix_(recurrent[0], recurrent[0])]
    )
    return out


def _payoff_vectors(m: PayoffMatrix) -> tuple[np.ndarray, np.ndarray]:
    pay_a = np.array([m.r, m.s, m.t, m.p])
    pay_b = np.array([m.r, m.t, m.s, m.p])
    return pay_a, pay_b


def expected_payoffs(
    a: MemoryOneStrategy, b: MemoryOneStrategy, m: PayoffMatrix
) -> ExpectedPayoffPair:
    """Analytic long-run mean per-round payoffs for the ordered pair (A, B)."""
    occ = limit_distribution(build_chain(a, b))
    pay_a, pay_b = _payoff_vectors(m)
    return ExpectedPayoffPair(float(occ @ pay_a), float(occ @ pay_b))


def monte_carlo_payoffs(
    a: MemoryOneStrategy,
    b: MemoryOneStrategy,
    m: PayoffMatrix,
    rounds: int,
    seed: int,
) -> ExpectedPayoffPair:
    """Simulation cross-check of :func:`expected_payoffs`.

    The round budget is split evenly over the four initial outcomes so the
    estimate targets the same uniform-initial-state time average as the
    analytic computation, which matters for reducible (deterministic) pairs.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rng = np.random.default_rng(seed)
    pa = a.probs
    pb = (b.p1, b.p3, b.p2, b.p4)  # b's cooperation probability given A's state label
    ra = (m.r, m.s, m.t, m.p)
    rb = (m.r, m.t, m.s, m.p)
    total_a = 0.0
    total_b = 0.0
    base, extra = divmod(rounds, 4)
    for start in range(4):
        todo = base + (1 if start < extra else 0)
        state = start
        done = 0
        while done < todo:
            block = min(todo - done, 1 << 15)
            u = rng.random(2 * block)
            for i in range(block):
                ca = u[2 * i] < pa[state]
                cb = u[2 * i + 1] < pb[state]
                state = (0 if ca else 2) + (0 if cb else 1)
                total_a += ra[state]
                total_b += rb[state]
            done += block
    return ExpectedPayoffPair(total_a / rounds, total_b / rounds)
