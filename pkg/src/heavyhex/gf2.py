"""Small GF(2) linear-algebra helpers over rows stored as Python int bit sets."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

__all__ = ["RowBasis", "rank", "independent_subset", "in_span"]


class RowBasis:
    """Incrementally maintained echelon basis of a GF(2) row space.

    Each stored row remembers which input rows were combined to produce it, so
    :meth:`decompose` can express a vector as a sum of the original inputs.
    """

    def __init__(self) -> None:
        self._pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (row, combo)
        self._count = 0

    def __len__(self) -> int:
        return len(self._pivots)

    def _reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            top = v.bit_length() - 1
            entry = self._pivots.get(top)
            if entry is None:
                break
            v ^= entry[0]
            combo ^= entry[1]
        return v, combo

    def add(self, v: int) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        index = self._count
        self._count += 1
        r, combo = self._reduce(v)
        if r == 0:
            return False
        self._pivots[r.bit_length() - 1] = (r, combo ^ (1 << index))
        return True

    def contains(self, v: int) -> bool:
        return self._reduce(v)[0] == 0

    def decompose(self, v: int) -> list[int] | None:
        """Indices of inserted rows summing to ``v``, or None if outside the span."""
        r, combo = self._reduce(v)
        if r:
            return None
        out = []
        i = 0
        while combo:
            if combo & 1:
                out.append(i)
            combo >>= 1
            i += 1
        return out


def rank(rows: Iterable[int]) -> int:
    basis = RowBasis()
    for r in rows:
        basis.add(r)
    return len(basis)


def independent_subset(rows: Sequence[int]) -> list[int]:
    """Indices of a maximal independent subset, greedily in input order."""
    basis = RowBasis()
    return [i for i, r in enumerate(rows) if basis.add(r)]


def in_span(v: int, rows: Iterable[int]) -> bool:
    basis = RowBasis()
    for r in rows:
        basis.add(r)
    return basis.contains(v)
