"""Cost matrices: parsing, row reduction, sorted neighbors, tour values.

Vertices are numbered 1..n throughout.  The diagonal of a cost matrix is
unavailable: reading it is a hard error, never a silent large cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple


class InstanceError(ValueError):
    """Base class for instance-file problems."""


class MalformedDimension(InstanceError):
    pass


class NonSquareData(InstanceError):
    pass


class NegativeEntry(InstanceError):
    pass


class InstanceTooSmall(InstanceError):
    pass


class DiagonalError(InstanceError):
    """Finite diagonal entry, or INF placed off the diagonal."""


@dataclass(frozen=True)
class CostMatrix:
    n: int
    costs: Tuple[Tuple[int, ...], ...]  # diagonal slots hold 0 but must not be read
    symmetric: bool

    def cost(self, i: int, j: int) -> int:
        if i == j:
            raise DiagonalError(f"diagonal entry ({i},{i}) is unavailable")
        return self.costs[i - 1][j - 1]

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def transpose(self) -> "CostMatrix":
        t = tuple(tuple(self.costs[j][i] for j in range(self.n)) for i in range(self.n))
        return CostMatrix(self.n, t, self.symmetric)

    def min_off_diagonal(self) -> int:
        return min(
            self.costs[i][j] for i in range(self.n) for j in range(self.n) if i != j
        )


@dataclass(frozen=True)
class SortedNeighbors:
    rows: Tuple[Tuple[int, ...], ...]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.rows[i - 1]

    def neighbor(self, i: int, rank: int) -> int:
        """rank is 1-based: rank 1 is the cheapest neighbor of i."""
        return self.rows[i - 1][rank - 1]


@dataclass(frozen=True)
class ReducedMatrix:
    base: CostMatrix
    reduction_total: int
    row_minima: Tuple[int, ...] = field(default=())


_MAX_COST = 2**63 - 1


def load_matrix(text: str) -> CostMatrix:
    """Parse the plain-text instance format.

    Format: '#' comment lines anywhere, a line ``n <count>``, an optional
    line ``asymmetric``, then n rows of n whitespace-separated fields.
    ``INF`` is accepted only on the diagonal.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedDimension("empty instance")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise MalformedDimension(f"expected 'n <count>', got {lines[0]!r}")
    try:
        n = int(head[1])
    except ValueError:
        raise MalformedDimension(f"vertex count is not an integer: {head[1]!r}")
    if n < 3:
        raise InstanceTooSmall(f"need n >= 3, got {n}")
    body = lines[1:]
    declared_asymmetric = False
    if body and body[0] == "asymmetric":
        declared_asymmetric = True
        body = body[1:]
    if len(body) != n:
        raise NonSquareData(f"expected {n} rows, got {len(body)}")
    rows = []
    for r, line in enumerate(body, start=1):
        fields = line.split()
        if len(fields) != n:
            raise NonSquareData(f"row {r} has {len(fields)} fields, expected {n}")
        row = []
        for c, tok in enumerate(fields, start=1):
            if tok.upper() == "INF":
                if r != c:
                    raise DiagonalError(f"INF off the diagonal at ({r},{c})")
                row.append(0)
                continue
            try:
                v = int(tok)
            except ValueError:
                raise NonSquareData(f"bad field {tok!r} at ({r},{c})")
            if r == c:
                raise DiagonalError(f"finite diagonal entry at ({r},{r})")
            if v < 0:
                raise NegativeEntry(f"negative cost {v} at ({r},{c})")
            if v > _MAX_COST:
                raise NegativeEntry(f"cost {v} exceeds 64-bit range at ({r},{c})")
            row.append(v)
        rows.append(tuple(row))
    costs = tuple(rows)
    is_sym = all(
        costs[i][j] == costs[j][i] for i in range(n) for j in range(i + 1, n)
    )
    symmetric = is_sym and not declared_asymmetric
    return CostMatrix(n, costs, symmetric)


def dump_matrix(M: CostMatrix) -> str:
    """Canonical re-emission of an instance (used by the CLI verify command)."""
    out = [f"n {M.n}"]
    if not M.symmetric:
        out.append("asymmetric")
    for i in range(M.n):
        out.append(
            " ".join("INF" if i == j else str(M.costs[i][j]) for j in range(M.n))
        )
    return "\n".join(out) + "\n"


def matrix_from_rows(rows: Sequence[Sequence[int]], symmetric: bool | None = None) -> CostMatrix:
    """Build a CostMatrix from in-memory rows (diagonal values are ignored)."""
    n = len(rows)
    if n < 3:
        raise InstanceTooSmall(f"need n >= 3, got {n}")
    fixed = []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise NonSquareData(f"row {i + 1} has {len(row)} fields, expected {n}")
        vals = []
        for j, v in enumerate(row):
            if i == j:
                vals.append(0)
                continue
            if v < 0:
                raise NegativeEntry(f"negative cost {v} at ({i + 1},{j + 1})")
            vals.append(int(v))
        fixed.append(tuple(vals))
    costs = tuple(fixed)
    if symmetric is None:
        symmetric = all(
            costs[i][j] == costs[j][i] for i in range(n) for j in range(i + 1, n)
        )
    return CostMatrix(n, costs, symmetric)


def sorted_neighbors(M: CostMatrix) -> SortedNeighbors:
    """For each vertex, the other vertices by nondecreasing cost; ties by id."""
    rows = []
    for i in M.vertices():
        others = sorted(
            (j for j in M.vertices() if j != i), key=lambda j: (M.cost(i, j), j)
        )
        rows.append(tuple(others))
    return SortedNeighbors(tuple(rows))


def row_reduce(M: CostMatrix) -> ReducedMatrix:
    """Subtract each row's minimum off-diagonal entry from the whole row."""
    minima = []
    new_rows = []
    for i in range(M.n):
        m = min(M.costs[i][j] for j in range(M.n) if j != i)
        minima.append(m)
        new_rows.append(
            tuple(0 if i == j else M.costs[i][j] - m for j in range(M.n))
        )
    base = CostMatrix(M.n, tuple(new_rows), M.symmetric)
    return ReducedMatrix(base, sum(minima), tuple(minima))


def tour_value(M: CostMatrix, nodes: Sequence[int]) -> int:
    """Value of the n-cycle visiting ``nodes`` in order (wrapping around)."""
    n = M.n
    if len(nodes) != n or set(nodes) != set(M.vertices()):
        raise ValueError(f"not a permutation of 1..{n}: {nodes}")
    return sum(M.cost(nodes[k], nodes[(k + 1) % n]) for k in range(n))
