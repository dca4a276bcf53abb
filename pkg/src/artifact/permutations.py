"""Permutation algebra and the transform-matrix view.

The transform of a cost matrix M by a derangement D has entries

    entry(a, b) = cost(a, D(b)) - cost(a, D(a))

so the diagonal reads 0 and cycles measure the value change of replacing
D by D composed with the cycle.  Includes the determining-vertex and
determining-node selections used by all the cycle searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .matrices import CostMatrix, tour_value


class TransformUnavailable(ValueError):
    """A transform entry that would read the cost diagonal."""


@dataclass(frozen=True)
class Permutation:
    images: Tuple[int, ...]  # images[0] unused; images[a] = image of a

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n + 1)))

    @staticmethod
    def from_mapping(n: int, mapping: dict) -> "Permutation":
        imgs = list(range(n + 1))
        for k, v in mapping.items():
            imgs[k] = v
        p = Permutation(tuple(imgs))
        p._check()
        return p

    @staticmethod
    def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        imgs = list(range(n + 1))
        for cyc in cycles:
            for k in range(len(cyc)):
                imgs[cyc[k]] = cyc[(k + 1) % len(cyc)]
        p = Permutation(tuple(imgs))
        p._check()
        return p

    @staticmethod
    def cycle_tour(n: int) -> "Permutation":
        """The n-cycle (1 2 ... n)."""
        return Permutation.from_cycles(n, [list(range(1, n + 1))])

    def _check(self) -> None:
        n = self.n
        if sorted(self.images[1:]) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection on 1..{n}: {self.images[1:]}")

    @property
    def n(self) -> int:
        return len(self.images) - 1

    def __call__(self, a: int) -> int:
        return self.images[a]

    def apply(self, a: int) -> int:
        return self.images[a]

    def inverse(self) -> "Permutation":
        inv = [0] * (self.n + 1)
        for a in range(1, self.n + 1):
            inv[self.images[a]] = a
        return Permutation(tuple(inv))

    def cycles(self) -> Tuple[Tuple[int, ...], ...]:
        """Nontrivial cycles, each rotated to start at its smallest vertex,
        listed by that smallest vertex."""
        seen = [False] * (self.n + 1)
        out = []
        for a in range(1, self.n + 1):
            if seen[a]:
                continue
            cyc = []
            x = a
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return tuple(out)

    def fixed_points(self) -> Tuple[int, ...]:
        return tuple(a for a in range(1, self.n + 1) if self.images[a] == a)

    def is_derangement(self) -> bool:
        return not self.fixed_points()

    def is_n_cycle(self) -> bool:
        cycs = self.cycles()
        return len(cycs) == 1 and len(cycs[0]) == self.n

    def cycle_notation(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)


def compose(D: Permutation, s: Permutation) -> Permutation:
    """The map a -> D(s(a))."""
    if D.n != s.n:
        raise ValueError(f"size mismatch: {D.n} vs {s.n}")
    return Permutation(tuple([0] + [D(s(a)) for a in range(1, D.n + 1)]))


def perm_value(M: CostMatrix, D: Permutation, fixed_point: Optional[int] = None) -> int:
    """Sum of cost(a, D(a)) over moved points.

    A fixed point (odd-n matching identity point) contributes nothing.
    Any other fixed point would read the diagonal and is an error.
    """
    total = 0
    for a in range(1, D.n + 1):
        b = D(a)
        if b == a:
            if a != fixed_point:
                raise TransformUnavailable(f"unexpected fixed point {a}")
            continue
        total += M.cost(a, b)
    return total


@dataclass(frozen=True)
class TransformMatrix:
    base: CostMatrix
    perm: Permutation
    fixed_point: Optional[int] = None  # odd-n matching identity point, if any

    def __post_init__(self):
        for a in self.perm.fixed_points():
            if a != self.fixed_point:
                raise TransformUnavailable(
                    f"fixed point {a} outside the declared identity point"
                )

    @property
    def n(self) -> int:
        return self.base.n

    def entry(self, a: int, b: int) -> int:
        """cost(a, D(b)) - cost(a, D(a)); for the identity-point row the
        subtracted term is 0 (raw costs)."""
        D = self.perm
        if a == b:
            return 0
        target = D(b)
        if target == a:
            raise TransformUnavailable(f"entry ({a},{b}) maps onto the diagonal")
        if a == self.fixed_point:
            return self.base.cost(a, target)
        return self.base.cost(a, target) - self.base.cost(a, D(a))

    def available(self, a: int, b: int) -> bool:
        if a == b:
            return False
        if self.perm(b) == a:
            return False
        return True


def build_transform(
    M: CostMatrix, D: Permutation, fixed_point: Optional[int] = None
) -> TransformMatrix:
    return TransformMatrix(M, D, fixed_point)


def cycle_value(TM: TransformMatrix, nodes: Sequence[int]) -> int:
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"repeated vertex in cycle {nodes}")
    total = 0
    for k in range(len(nodes)):
        a, b = nodes[k], nodes[(k + 1) % len(nodes)]
        if not TM.available(a, b):
            raise TransformUnavailable(f"cycle traverses unavailable entry ({a},{b})")
        total += TM.entry(a, b)
    return total


@dataclass(frozen=True)
class WeightedCycle:
    nodes: Tuple[int, ...]
    value: int
    kind: str = "acceptable"  # acceptable | unlinked2 | linked2

    def canonical(self) -> "WeightedCycle":
        """Rotate to start at the smallest vertex."""
        i = self.nodes.index(min(self.nodes))
        return WeightedCycle(self.nodes[i:] + self.nodes[:i], self.value, self.kind)

    def as_permutation(self, n: int) -> Permutation:
        return Permutation.from_cycles(n, [self.nodes])


@dataclass(frozen=True)
class Tour:
    nodes: Tuple[int, ...]  # canonical rotation starting at vertex 1
    value: int

    @staticmethod
    def of(M: CostMatrix, nodes: Sequence[int]) -> "Tour":
        v = tour_value(M, nodes)
        i = list(nodes).index(1)
        canon = tuple(nodes[i:]) + tuple(nodes[:i])
        return Tour(canon, v)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def as_permutation(self) -> Permutation:
        return Permutation.from_cycles(self.n, [self.nodes])

    def aav(self) -> Tuple[int, int]:
        return (self.value, self.n)


# --- exact average-arc-value comparisons (integer cross-multiplication) ---

def aav_lt(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    """a < b for aav pairs (value, arc_count)."""
    return a[0] * b[1] < b[0] * a[1]


def aav_le(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    return a[0] * b[1] <= b[0] * a[1]


def aav_str(value: int, arcs: int) -> str:
    """Render value/arcs to exactly 6 decimals, half-up, without floats."""
    neg = value < 0
    v = -value if neg else value
    scaled, rem = divmod(v * 10**6, arcs)
    if 2 * rem >= arcs:
        scaled += 1
    whole, frac = divmod(scaled, 10**6)
    return f"{'-' if neg else ''}{whole}.{frac:06d}"


def determining_vertex(weights: Sequence[int], bound: int) -> int:
    """Smallest 0-based index i* such that every cyclic prefix sum starting
    at i* stays <= bound.  Requires sum(weights) <= bound."""
    n = len(weights)
    total = sum(weights)
    if total > bound:
        raise ValueError(f"total {total} exceeds bound {bound}")
    for start in range(n):
        s = 0
        ok = True
        for j in range(n):
            s += weights[(start + j) % n]
            if s > bound:
                ok = False
                break
        if ok:
            return start
    raise AssertionError("no determining vertex; precondition violated")


def aav_determining_node(weights: Sequence[int]) -> int:
    """Smallest 0-based index d such that every cyclic prefix starting at d
    has average value <= the whole cycle's average (exact comparison)."""
    n = len(weights)
    total = sum(weights)
    for start in range(n):
        s = 0
        ok = True
        for j in range(n):
            s += weights[(start + j) % n]
            if s * n > total * (j + 1):
                ok = False
                break
        if ok:
            return start
    raise AssertionError("no qualifying index; nonnegative weights always admit one")
