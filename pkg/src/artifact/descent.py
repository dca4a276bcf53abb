"""Descent to a minimum-value derangement by negative-cycle cancellation.

Greedy trials are a cheap accelerator; the complete detector below is what
guarantees the fixpoint is the assignment optimum (in unconstrained
asymmetric mode).  Two admissibility modes restrict the search: symmetric
mode refuses arcs that would mirror an arc already in the derangement, and
two-cycle mode refuses cycles whose application would leave a 2-cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .matrices import CostMatrix, SortedNeighbors, sorted_neighbors
from .permutations import (
    Permutation,
    TransformMatrix,
    WeightedCycle,
    build_transform,
    compose,
    cycle_value,
    perm_value,
)


@dataclass(frozen=True)
class DescentConfig:
    forbid_symmetric_arcs: bool = False
    forbid_two_cycles: bool = False
    seed_count: int = 0  # 0 means ceil(sqrt(n))
    trial_blocks: int = 0  # 0 means ceil(log2(n)) + 1
    max_iterations: int = 10_000

    def seeds_for(self, n: int) -> int:
        return self.seed_count if self.seed_count > 0 else math.isqrt(n - 1) + 1

    def blocks_for(self, n: int) -> int:
        return self.trial_blocks if self.trial_blocks > 0 else math.ceil(math.log2(n)) + 1


@dataclass
class DescentTrace:
    steps: List[Tuple[WeightedCycle, int]] = field(default_factory=list)
    final: Optional[Permutation] = None
    final_value: int = 0

    def __len__(self) -> int:
        return len(self.steps)


def _arc_admissible(TM: TransformMatrix, a: int, b: int, cfg: DescentConfig) -> bool:
    if not TM.available(a, b):
        return False
    if cfg.forbid_symmetric_arcs:
        # The new derangement arc is (a, D(b)); refuse it when its mirror
        # (D(b), a) is already an arc of D, i.e. when D(D(b)) == a.
        if TM.perm(TM.perm(b)) == a:
            return False
    return True


def _cycle_admissible(TM: TransformMatrix, nodes: Tuple[int, ...], cfg: DescentConfig) -> bool:
    if cfg.forbid_two_cycles:
        s = WeightedCycle(nodes, 0).as_permutation(TM.n)
        result = compose(TM.perm, s)
        if any(len(c) == 2 for c in result.cycles()):
            return False
    if cfg.forbid_symmetric_arcs:
        s = WeightedCycle(nodes, 0).as_permutation(TM.n)
        result = compose(TM.perm, s)
        for a in range(1, TM.n + 1):
            if result(result(a)) == a and result(a) != a:
                return False
    return True


def _canonical_rotation(nodes: Tuple[int, ...]) -> Tuple[int, ...]:
    i = nodes.index(min(nodes))
    return nodes[i:] + nodes[:i]


def _better(candidate: Tuple[int, Tuple[int, ...]], incumbent: Optional[Tuple[int, Tuple[int, ...]]]) -> bool:
    """Order candidate cycles by (value, canonical node sequence)."""
    if incumbent is None:
        return True
    return candidate < incumbent


def greedy_trial(
    M: CostMatrix,
    MIN: SortedNeighbors,
    D: Permutation,
    start: int,
    rank: int,
    cfg: DescentConfig,
) -> Optional[WeightedCycle]:
    """Grow one path greedily through negative transform entries.

    The first arc heads toward the rank-th cheapest neighbor of ``start``
    (in the underlying costs); after that each step takes the most negative
    admissible entry to an unvisited vertex, with at most ``blocks`` visits
    to nonnegative entries.  Returns the best closable negative cycle seen.
    """
    TM = build_transform(M, D)
    n = M.n
    # first arc: transform column whose new arc targets the chosen neighbor
    target = MIN.neighbor(start, rank)
    first = None
    for b in range(1, n + 1):
        if b != start and D(b) == target and _arc_admissible(TM, start, b, cfg):
            first = b
            break
    if first is None:
        return None
    path = [start, first]
    value = TM.entry(start, first)
    budget = cfg.blocks_for(n)
    best: Optional[Tuple[int, Tuple[int, ...]]] = None

    def consider_close():
        nonlocal best
        if len(path) < 2:
            return
        a = path[-1]
        if not _arc_admissible(TM, a, start, cfg):
            return
        total = value + TM.entry(a, start)
        if total < 0:
            nodes = tuple(path)
            if _cycle_admissible(TM, nodes, cfg):
                cand = (total, _canonical_rotation(nodes))
                if _better(cand, best):
                    best = cand

    consider_close()
    visited = set(path)
    while len(path) < n:
        a = path[-1]
        choices = []
        for b in range(1, n + 1):
            if b in visited or not _arc_admissible(TM, a, b, cfg):
                continue
            choices.append((TM.entry(a, b), b))
        if not choices:
            break
        choices.sort()
        v, b = choices[0]
        if v >= 0:
            if budget == 0:
                break
            budget -= 1
        path.append(b)
        visited.add(b)
        value += v
        consider_close()
    if best is None:
        return None
    total, nodes = best
    return WeightedCycle(nodes, total)


def _negative_seeds(TM: TransformMatrix, cfg: DescentConfig) -> List[Tuple[int, int, int]]:
    """The seed arcs: per row, the seed_count most negative admissible
    entries; merged and sorted by (value, row, col)."""
    n = TM.n
    k = cfg.seeds_for(n)
    seeds = []
    for a in range(1, n + 1):
        row = []
        for b in range(1, n + 1):
            if a == b or not _arc_admissible(TM, a, b, cfg):
                continue
            v = TM.entry(a, b)
            if v < 0:
                row.append((v, a, b))
        row.sort()
        seeds.extend(row[:k])
    seeds.sort()
    return seeds


def _grow_from_seed(
    TM: TransformMatrix,
    seed: Tuple[int, int, int],
    cfg: DescentConfig,
) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """Label-correcting growth from one seed arc, one best simple path per
    endpoint, recording every admissible negative closing cycle."""
    v0, a, b = seed
    n = TM.n
    best_path = {b: (v0, (a, b))}
    frontier = [b]
    best: Optional[Tuple[int, Tuple[int, ...]]] = None

    def try_close(value: int, path: Tuple[int, ...]):
        nonlocal best
        last = path[-1]
        if not _arc_admissible(TM, last, a, cfg):
            return
        total = value + TM.entry(last, a)
        if total < 0 and _cycle_admissible(TM, path, cfg):
            cand = (total, _canonical_rotation(path))
            if _better(cand, best):
                best = cand

    try_close(v0, (a, b))
    while frontier:
        new_frontier = []
        for x in sorted(frontier):
            if x not in best_path:
                continue
            val, path = best_path[x]
            if best_path[x][0] != val:
                continue
            for y in range(1, n + 1):
                if y in path or y == a or not _arc_admissible(TM, x, y, cfg):
                    continue
                nv = val + TM.entry(x, y)
                cur = best_path.get(y)
                if cur is None or nv < cur[0]:
                    best_path[y] = (nv, path + (y,))
                    new_frontier.append(y)
                    try_close(nv, path + (y,))
        frontier = new_frontier
    return best


def _bellman_ford_cycle(TM: TransformMatrix, cfg: DescentConfig) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """Safety net: classical negative-cycle detection over the transform.

    Distances start at 0 everywhere (virtual source); a vertex relaxed on
    the n-th pass sits on a negative cycle reachable via predecessors.
    """
    n = TM.n
    dist = {v: 0 for v in range(1, n + 1)}
    pred = {v: None for v in range(1, n + 1)}
    flagged = None
    for it in range(n):
        changed = False
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a == b or not _arc_admissible(TM, a, b, cfg):
                    continue
                nv = dist[a] + TM.entry(a, b)
                if nv < dist[b]:
                    dist[b] = nv
                    pred[b] = a
                    changed = True
                    if it == n - 1:
                        flagged = b
        if not changed:
            return None
    if flagged is None:
        return None
    # walk predecessors n times to land inside the cycle
    x = flagged
    for _ in range(n):
        x = pred[x]
    cyc = [x]
    y = pred[x]
    while y != x:
        cyc.append(y)
        y = pred[y]
    cyc.reverse()
    nodes = _canonical_rotation(tuple(cyc))
    value = cycle_value(TM, nodes)
    if value < 0 and _cycle_admissible(TM, nodes, cfg):
        return (value, nodes)
    return None


def find_negative_cycle(TM: TransformMatrix, cfg: DescentConfig) -> Optional[WeightedCycle]:
    """Most negative admissible cycle found by seeded growth, with a
    Bellman-Ford net behind it; deterministic (value, node-sequence) choice."""
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    for seed in _negative_seeds(TM, cfg):
        cand = _grow_from_seed(TM, seed, cfg)
        if cand is not None and _better(cand, best):
            best = cand
    if best is None:
        cand = _bellman_ford_cycle(TM, cfg)
        if cand is not None:
            best = cand
    if best is None:
        return None
    value, nodes = best
    return WeightedCycle(nodes, value)


def descend(M: CostMatrix, D0: Optional[Permutation] = None, cfg: Optional[DescentConfig] = None) -> DescentTrace:
    """Cancel negative cycles until none is admissible."""
    cfg = cfg or DescentConfig()
    D = D0 if D0 is not None else Permutation.cycle_tour(M.n)
    if not D.is_derangement():
        raise ValueError("descent starts from a derangement")
    MIN = sorted_neighbors(M)
    trace = DescentTrace()
    value = perm_value(M, D)
    for _ in range(cfg.max_iterations):
        TM = build_transform(M, D)
        cyc = None
        # cheap greedy sweep first
        best_greedy: Optional[Tuple[int, Tuple[int, ...]]] = None
        for start in range(1, M.n + 1):
            for rank in (1, 2):
                g = greedy_trial(M, MIN, D, start, rank, cfg)
                if g is not None:
                    cand = (g.value, g.nodes)
                    if _better(cand, best_greedy):
                        best_greedy = cand
        if best_greedy is not None:
            cyc = WeightedCycle(best_greedy[1], best_greedy[0])
        if cyc is None:
            cyc = find_negative_cycle(TM, cfg)
        if cyc is None:
            break
        D = compose(D, cyc.as_permutation(M.n))
        value += cyc.value
        trace.steps.append((cyc, value))
    else:
        raise RuntimeError("descent failed to converge within max_iterations")
    trace.final = D
    trace.final_value = value
    return trace
