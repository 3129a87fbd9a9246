"""Sparse multi-qubit Pauli operators with exact phase tracking.

A :class:`PauliOperator` stores its X and Z components as Python integers used
as bit sets (bit ``q`` set means qubit ``q`` carries that component), so
products and commutation checks are word-level operations regardless of how
many qubits the surrounding code has.

The phase is kept as an exponent ``k`` of ``i`` and multiplies the tensor
product written with the single-qubit letters ``I, X, Y, Z``; the operator with
``x = z = 1`` on a qubit is ``Y`` itself. With this convention ``X * Z`` is
``-i Y`` and the product rule is the usual componentwise table.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping

__all__ = [
    "PauliOperator",
    "pauli_mul",
    "commutes",
    "symplectic_product",
    "bits_of",
]

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}
_TERM = re.compile(r"([IXYZ])(\d+)")


def bits_of(mask: int) -> list[int]:
    """Return the indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        if q < 0:
            raise ValueError(f"negative qubit index {q}")
        m |= 1 << q
    return m


def _product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of ``i`` picked up by the letter-wise product ``P1 * P2``."""
    only_x1 = x1 & ~z1
    y1 = x1 & z1
    only_z1 = z1 & ~x1
    plus = (only_x1 & x2 & z2) | (y1 & z2 & ~x2) | (only_z1 & x2 & ~z2)
    minus = (only_x1 & z2 & ~x2) | (y1 & x2 & ~z2) | (only_z1 & x2 & z2)
    return (plus.bit_count() - minus.bit_count()) % 4


class PauliOperator:
    """An immutable Pauli operator ``i**phase * P_0 (x) P_1 (x) ...``.

    Args:
        x: bit set of qubits carrying an X component (``X`` or ``Y``).
        z: bit set of qubits carrying a Z component (``Z`` or ``Y``).
        phase: exponent of ``i`` in ``{0, 1, 2, 3}``.
    """

    __slots__ = ("_x", "_z", "_phase")

    def __init__(self, x: int = 0, z: int = 0, phase: int = 0):
        if x < 0 or z < 0:
            raise ValueError("bit masks must be non-negative")
        self._x = int(x)
        self._z = int(z)
        self._phase = int(phase) % 4

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls) -> PauliOperator:
        return cls()

    @classmethod
    def from_letters(cls, letters: Mapping[int, str], phase: int = 0) -> PauliOperator:
        """Build from ``{qubit: "X" | "Y" | "Z" | "I"}``."""
        x = z = 0
        for q, letter in letters.items():
            letter = letter.upper()
            if letter not in "IXYZ" or len(letter) != 1:
                raise ValueError(f"bad Pauli letter {letter!r}")
            if letter in "XY":
                x |= 1 << q
            if letter in "ZY":
                z |= 1 << q
        return cls(x, z, phase)

    @classmethod
    def single(cls, letter: str, qubit: int) -> PauliOperator:
        return cls.from_letters({qubit: letter})

    @classmethod
    def x_type(cls, qubits: Iterable[int]) -> PauliOperator:
        return cls(x=_mask(qubits))

    @classmethod
    def z_type(cls, qubits: Iterable[int]) -> PauliOperator:
        return cls(z=_mask(qubits))

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        """Parse the sparse form written by :meth:`to_string`, e.g. ``"-i X3 Z7"``."""
        text = text.strip()
        phase = 0
        head, _, rest = text.partition(" ")
        if head in ("+", "-", "+i", "-i", "i"):
            phase = {"+": 0, "-": 2, "+i": 1, "i": 1, "-i": 3}[head]
            text = rest
        letters: dict[int, str] = {}
        for token in text.split():
            m = _TERM.fullmatch(token)
            if not m:
                raise ValueError(f"cannot parse Pauli term {token!r}")
            q = int(m.group(2))
            if q in letters:
                raise ValueError(f"qubit {q} repeated in {text!r}")
            letters[q] = m.group(1)
        return cls.from_letters(letters, phase)

    # -- accessors --------------------------------------------------------
    @property
    def x(self) -> int:
        return self._x

    @property
    def z(self) -> int:
        return self._z

    @property
    def phase(self) -> int:
        """Exponent of ``i``."""
        return self._phase

    @property
    def coefficient(self) -> complex:
        return _PHASE_VALUE[self._phase]

    @property
    def support_mask(self) -> int:
        return self._x | self._z

    @property
    def support(self) -> frozenset[int]:
        return frozenset(bits_of(self._x | self._z))

    @property
    def weight(self) -> int:
        return (self._x | self._z).bit_count()

    def letter(self, qubit: int) -> str:
        xb = (self._x >> qubit) & 1
        zb = (self._z >> qubit) & 1
        return "IXZY"[xb | (zb << 1)]

    def letters(self) -> dict[int, str]:
        return {q: self.letter(q) for q in bits_of(self.support_mask)}

    def is_identity(self) -> bool:
        return self._x == 0 and self._z == 0

    def is_x_type(self) -> bool:
        return self._z == 0

    def is_z_type(self) -> bool:
        return self._x == 0

    # -- algebra ----------------------------------------------------------
    def __mul__(self, other: PauliOperator) -> PauliOperator:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return pauli_mul(self, other)

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self._x, self._z, 0)

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self._x, self._z, phase)

    def restricted(self, qubits_mask: int) -> PauliOperator:
        """Drop every component outside ``qubits_mask`` (phase discarded)."""
        return PauliOperator(self._x & qubits_mask, self._z & qubits_mask)

    def x_part(self) -> PauliOperator:
        return PauliOperator(x=self._x)

    def z_part(self) -> PauliOperator:
        return PauliOperator(z=self._z)

    def commutes_with(self, other: PauliOperator) -> bool:
        return commutes(self, other)

    def relabel(self, mapping: Mapping[int, int]) -> PauliOperator:
        """Move qubit ``q`` to ``mapping[q]``; the phase is preserved."""
        return PauliOperator.from_letters(
            {mapping[q]: p for q, p in self.letters().items()}, self._phase
        )

    # -- dunder -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self._x, self._z, self._phase) == (other._x, other._z, other._phase)

    def __hash__(self) -> int:
        return hash((self._x, self._z, self._phase))

    def to_string(self, with_phase: bool = True) -> str:
        terms = " ".join(f"{p}{q}" for q, p in self.letters().items()) or "I"
        if not with_phase:
            return terms
        return f"{_PHASE_TEXT[self._phase]} {terms}"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_string()!r})"


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Return the product ``a * b`` with its exact phase."""
    phase = a.phase + b.phase + _product_phase(a.x, a.z, b.x, b.z)
    return PauliOperator(a.x ^ b.x, a.z ^ b.z, phase)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """Parity of the number of qubits on which ``a`` and ``b`` anticommute."""
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0
