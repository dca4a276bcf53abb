"""Merging the cycles of a derangement into a single n-cycle.

The primitive exchanges the outgoing arcs of one vertex from each of two
cycles; a beam search over such merges produces the incumbent tour.  Also
provides the weave of two disjoint perfect matchings into a tour.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .matrices import CostMatrix
from .permutations import Permutation, Tour, compose, perm_value


@dataclass(frozen=True)
class PatchPlan:
    steps: Tuple[Tuple[int, int, int], ...]  # (a, b, delta)
    total_delta: int


def patch_pair(M: CostMatrix, D: Permutation, a: int, b: int) -> Tuple[Permutation, int]:
    """Merge the two cycles through a and b by composing with (a b).

    Arcs (a,D(a)) and (b,D(b)) become (a,D(b)) and (b,D(a)).
    """
    cycle_of = {}
    for idx, cyc in enumerate(D.cycles()):
        for v in cyc:
            cycle_of[v] = idx
    if a not in cycle_of or b not in cycle_of or cycle_of[a] == cycle_of[b]:
        raise ValueError(f"{a} and {b} must lie in different cycles")
    delta = (
        M.cost(a, D(b)) + M.cost(b, D(a)) - M.cost(a, D(a)) - M.cost(b, D(b))
    )
    swapped = compose(D, Permutation.from_cycles(D.n, [(a, b)]))
    return swapped, delta


def _merge_candidates(M: CostMatrix, D: Permutation) -> List[Tuple[int, int, int]]:
    """All (delta, a, b) merge moves between distinct cycles of D."""
    cycles = D.cycles()
    out = []
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            for a in cycles[i]:
                for b in cycles[j]:
                    delta = (
                        M.cost(a, D(b))
                        + M.cost(b, D(a))
                        - M.cost(a, D(a))
                        - M.cost(b, D(b))
                    )
                    out.append((delta, a, b))
    out.sort()
    return out


def patch_to_cycle(M: CostMatrix, D: Permutation, beam: int = 0) -> Tour:
    """Beam search over pair merges until one n-cycle remains.

    Beam width defaults to n.  Each frontier state keeps the 2*beam
    cheapest candidate merges, the frontier keeps the beam best states by
    (value, plan), and states reproducing an already-seen derangement are
    dropped (dominance: equal derangement, equal or worse value).
    """
    if not D.is_derangement():
        raise ValueError("patching starts from a derangement")
    n = M.n
    width = beam if beam > 0 else n
    base_value = perm_value(M, D)
    if D.is_n_cycle():
        return Tour.of(M, D.cycles()[0])
    if len(D.cycles()) <= 5:
        # few cycles: the full merge search is cheap and exact
        return exhaustive_patch(M, D)
    frontier: List[Tuple[int, Tuple[Tuple[int, int, int], ...], Permutation]] = [
        (base_value, (), D)
    ]
    best: Optional[Tour] = None
    seen_best = {D.images: base_value}
    while frontier:
        next_states = []
        for value, plan, perm in frontier:
            cands = _merge_candidates(M, perm)[: 2 * width]
            for delta, a, b in cands:
                merged, d2 = patch_pair(M, perm, a, b)
                assert d2 == delta
                nv = value + delta
                known = seen_best.get(merged.images)
                if known is not None and known <= nv:
                    continue
                seen_best[merged.images] = nv
                nplan = plan + ((a, b, delta),)
                if merged.is_n_cycle():
                    t = Tour.of(M, merged.cycles()[0])
                    if best is None or (t.value, t.nodes) < (best.value, best.nodes):
                        best = t
                else:
                    next_states.append((nv, nplan, merged))
        next_states.sort(key=lambda s: (s[0], s[1]))
        frontier = next_states[:width]
    assert best is not None
    return best


def exhaustive_patch(M: CostMatrix, D: Permutation) -> Tour:
    """Best tour over all merge sequences (small n; used for checks)."""
    best: Optional[Tour] = None
    stack = [(perm_value(M, D), D)]
    seen = {}
    while stack:
        value, perm = stack.pop()
        if perm.is_n_cycle():
            t = Tour.of(M, perm.cycles()[0])
            if best is None or (t.value, t.nodes) < (best.value, best.nodes):
                best = t
            continue
        for delta, a, b in _merge_candidates(M, perm):
            merged, _ = patch_pair(M, perm, a, b)
            nv = value + delta
            known = seen.get(merged.images)
            if known is not None and known <= nv:
                continue
            seen[merged.images] = nv
            stack.append((nv, merged))
    assert best is not None
    return best


def weave_matchings(
    M: CostMatrix,
    pairs1: Sequence[Tuple[int, int]],
    pairs2: Sequence[Tuple[int, int]],
) -> Optional[Tour]:
    """Alternate edges of two disjoint perfect matchings into a tour.

    Returns the tour when the edge union is a single cycle through all
    vertices, otherwise None (the union may split into several circuits).
    """
    n = M.n
    p1 = {}
    p2 = {}
    for x, y in pairs1:
        p1[x] = y
        p1[y] = x
    for x, y in pairs2:
        p2[x] = y
        p2[y] = x
    e1 = {frozenset(p) for p in pairs1}
    e2 = {frozenset(p) for p in pairs2}
    if e1 & e2:
        raise ValueError(f"matchings share edges: {sorted(e1 & e2)}")
    if set(p1) != set(range(1, n + 1)) or set(p2) != set(range(1, n + 1)):
        raise ValueError("matchings must cover all vertices")
    nodes = [1]
    use_first = True
    while True:
        x = nodes[-1]
        y = p1[x] if use_first else p2[x]
        if y == 1:
            break
        if y in nodes:
            return None  # premature closure: union is not a single cycle
        nodes.append(y)
        use_first = not use_first
    if len(nodes) != n:
        return None
    return Tour.of(M, nodes)
