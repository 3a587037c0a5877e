"""Sign arithmetic on sign vectors, sign matrices and partitions.

Signs are the integers ``-1, 0, 1``. A *generalized* sign additionally uses
``BOTH`` (printed ``±``) for a block in which both signs occur. Sign vectors
are plain tuples and sign matrices are tuples of row tuples; all functions
are pure.
"""

from __future__ import annotations

from typing import Iterable, Sequence

MINUS, ZERO, PLUS = -1, 0, 1
BOTH = 2

_TO_STR = {PLUS: "+", MINUS: "-", ZERO: "0", BOTH: "±"}
_FROM_STR = {"+": PLUS, "-": MINUS, "−": MINUS, "0": ZERO, "±": BOTH, "1": PLUS, "-1": MINUS, "+1": PLUS}


class DimensionError(ValueError):
    """Operands live on different index sets."""


class PartitionError(ValueError):
    """Blocks do not partition the index set."""


def parse_sign(s) -> int:
    if isinstance(s, bool):
        raise ValueError(f"not a sign: {s!r}")
    if isinstance(s, int):
        if s in (-1, 0, 1):
            return s
        raise ValueError(f"not a sign: {s!r}")
    try:
        return _FROM_STR[str(s).strip()]
    except KeyError:
        raise ValueError(f"not a sign: {s!r}") from None


def sign_str(s: int) -> str:
    return _TO_STR[s]


def vector(text: str | Iterable) -> tuple:
    """Build a sign vector from ``"+-0"``-style text or an iterable of signs."""
    if isinstance(text, str):
        text = text.replace(",", "").replace(" ", "").replace("(", "").replace(")", "")
        return tuple(parse_sign(ch) for ch in text.replace("−", "-"))
    return tuple(parse_sign(s) for s in text)


def matrix(rows) -> tuple:
    return tuple(vector(r) for r in rows)


def vector_str(x: Sequence[int]) -> str:
    return "".join(_TO_STR[s] for s in x)


def matrix_json(m) -> list:
    return [[_TO_STR[s] for s in row] for row in m]


def sign_of(x) -> int:
    return (x > 0) - (x < 0)


def _same_length(x, y):
    if len(x) != len(y):
        raise DimensionError(f"index sets differ in size ({len(x)} vs {len(y)})")


def compose(x: Sequence[int], y: Sequence[int]) -> tuple:
    _same_length(x, y)
    return tuple(a if a else b for a, b in zip(x, y))


def intersect(s: Sequence[int], t: Sequence[int]) -> tuple:
    _same_length(s, t)
    return tuple(a if a == b else 0 for a, b in zip(s, t))


def negate(x: Sequence[int]) -> tuple:
    return tuple(-a for a in x)


def conforms(x: Sequence[int], y: Sequence[int]) -> bool:
    """``x <= y``: x is obtained from y by zeroing some entries."""
    _same_length(x, y)
    return all(a == 0 or a == b for a, b in zip(x, y))


def support(x: Sequence[int]) -> frozenset:
    return frozenset(k for k, a in enumerate(x) if a)


def parts(x: Sequence[int], s: int) -> frozenset:
    """The index set ``X^s``."""
    return frozenset(k for k, a in enumerate(x) if a == s)


def separation(x: Sequence[int], y: Sequence[int]) -> frozenset:
    _same_length(x, y)
    return frozenset(k for k, (a, b) in enumerate(zip(x, y)) if a and a == -b)


def sa_matrix(S: Sequence[int], F: Iterable[tuple[int, int]], A) -> tuple:
    """Entry ``(i, j)`` is ``S_i * A_ij`` on edges of ``F`` and 0 elsewhere.

    Rows and columns are 0-based.
    """
    d = len(A)
    if len(S) != d:
        raise DimensionError(f"S has {len(S)} entries, A has {d} rows")
    n = len(A[0]) if d else 0
    out = [[0] * n for _ in range(d)]
    for i, j in F:
        if not (0 <= i < d and 0 <= j < n):
            raise DimensionError(f"edge {(i, j)} outside a {d}x{n} matrix")
        out[i][j] = S[i] * A[i][j]
    return tuple(tuple(r) for r in out)


def flatten(m) -> tuple:
    """Column-major flattening: all of column 0, then column 1, ..."""
    if not m:
        return ()
    return tuple(m[i][j] for j in range(len(m[0])) for i in range(len(m)))


class Partition:
    """A partition of ``range(size)`` into ordered blocks."""

    __slots__ = ("blocks", "size", "_block_of")

    def __init__(self, blocks: Iterable[Iterable[int]], size: int | None = None):
        blocks = tuple(tuple(sorted(b)) for b in blocks)
        flat = [k for b in blocks for k in b]
        if size is None:
            size = len(flat)
        if any(not b for b in blocks):
            raise PartitionError("empty block")
        if len(flat) != len(set(flat)):
            raise PartitionError("blocks overlap")
        if set(flat) != set(range(size)):
            raise PartitionError(f"blocks do not cover range({size})")
        self.blocks = blocks
        self.size = size
        block_of = [0] * size
        for b, block in enumerate(blocks):
            for k in block:
                block_of[k] = b
        self._block_of = tuple(block_of)

    @classmethod
    def singletons(cls, size: int) -> "Partition":
        return cls([[k] for k in range(size)], size)

    @classmethod
    def columns(cls, d: int, n: int) -> "Partition":
        """The column partition of a flattened ``d x n`` matrix."""
        return cls([[j * d + i for i in range(d)] for j in range(n)], d * n)

    def block_of(self, k: int) -> int:
        return self._block_of[k]

    def refines(self, other: "Partition") -> bool:
        return self.size == other.size and all(
            len({other.block_of(k) for k in b}) == 1 for b in self.blocks
        )

    def __eq__(self, other):
        return isinstance(other, Partition) and set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash(frozenset(self.blocks))

    def __repr__(self):
        return f"Partition({list(map(list, self.blocks))})"


def _flat(x, size):
    if x and isinstance(x[0], (tuple, list)):
        x = flatten(x)
    if len(x) != size:
        raise DimensionError(f"vector of length {len(x)} against a partition of {size}")
    return x


def classify(x, partition: Partition) -> tuple:
    """Per-block summary in ``{0, +1, -1, BOTH}``; matrices are flattened by column."""
    x = _flat(x, partition.size)
    out = []
    for block in partition.blocks:
        pos = neg = False
        for k in block:
            a = x[k]
            if a > 0:
                pos = True
            elif a < 0:
                neg = True
        out.append(BOTH if pos and neg else PLUS if pos else MINUS if neg else ZERO)
    return tuple(out)


def weight(g: Sequence[int]) -> int:
    """Count nonzero blocks, ``±`` counting twice."""
    return sum(2 if a == BOTH else 1 for a in g if a)


def equiv(x, y, partition: Partition) -> bool:
    return classify(x, partition) == classify(y, partition)
