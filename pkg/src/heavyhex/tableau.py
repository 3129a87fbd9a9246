"""Stabilizer tableau (Aaronson-Gottesman) used for reference sampling.

The tableau keeps ``n`` destabilizer rows followed by ``n`` stabilizer rows,
each a Hermitian Pauli with a sign bit. Destabilizer signs are carried along
but carry no meaning.

Public functions treat tableaus as values: :func:`tableau_measure` returns a new
tableau. :class:`StabilizerTableau` also exposes in-place ``apply_*`` methods,
which the reference sampler uses directly for speed on long circuits.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliOperator, bits_of

__all__ = ["StabilizerTableau", "tableau_measure"]


def _row_phase(x1, z1, x2, z2) -> np.ndarray:
    """Exponent of ``i`` (mod 4) for letter-wise products of row pairs.

    ``x1, z1`` broadcast against ``x2, z2`` (last axis = qubits).
    """
    only_x1 = x1 & ~z1
    y1 = x1 & z1
    only_z1 = z1 & ~x1
    plus = (only_x1 & x2 & z2) | (y1 & z2 & ~x2) | (only_z1 & x2 & ~z2)
    minus = (only_x1 & z2 & ~x2) | (y1 & x2 & ~z2) | (only_z1 & x2 & z2)
    return (plus.sum(axis=-1, dtype=np.int64) - minus.sum(axis=-1, dtype=np.int64)) % 4


class StabilizerTableau:
    """A pure stabilizer state on ``n`` qubits.

    Args:
        n: number of qubits; the state starts as ``|0...0>``.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.xs = np.zeros((2 * n, n), dtype=bool)
        self.zs = np.zeros((2 * n, n), dtype=bool)
        self.signs = np.zeros(2 * n, dtype=bool)
        self.last_pivot = -1
        idx = np.arange(n)
        self.xs[idx, idx] = True
        self.zs[n + idx, idx] = True

    def copy(self) -> StabilizerTableau:
        other = StabilizerTableau.__new__(StabilizerTableau)
        other.n = self.n
        other.xs = self.xs.copy()
        other.zs = self.zs.copy()
        other.signs = self.signs.copy()
        other.last_pivot = self.last_pivot
        return other

    # -- row access -------------------------------------------------------
    def _row_pauli(self, i: int) -> PauliOperator:
        return PauliOperator(_pack(self.xs[i]), _pack(self.zs[i]), 2 if self.signs[i] else 0)

    def stabilizers(self) -> list[PauliOperator]:
        return [self._row_pauli(self.n + i) for i in range(self.n)]

    def destabilizer(self, i: int) -> PauliOperator:
        return self._row_pauli(i)

    def destabilizers(self) -> list[PauliOperator]:
        return [self._row_pauli(i) for i in range(self.n)]

    # -- Clifford gates (in place) ------------------------------------------
    def apply_h(self, q: int) -> None:
        x, z = self.xs[:, q].copy(), self.zs[:, q]
        self.signs ^= x & z
        self.xs[:, q] = z
        self.zs[:, q] = x

    def apply_s(self, q: int) -> None:
        x, z = self.xs[:, q], self.zs[:, q]
        self.signs ^= x & z
        self.zs[:, q] = z ^ x

    def apply_cx(self, c: int, t: int) -> None:
        if c == t:
            raise ValueError("cx needs two distinct qubits")
        xc, zc, xt, zt = self.xs[:, c], self.zs[:, c], self.xs[:, t], self.zs[:, t]
        self.signs ^= xc & zt & ~(xt ^ zc)
        self.xs[:, t] = xt ^ xc
        self.zs[:, c] = zc ^ zt

    def apply_pauli(self, p: PauliOperator) -> None:
        """Conjugate by a Pauli: flips the signs of anticommuting rows."""
        xm = _unpack(p.x, self.n)
        zm = _unpack(p.z, self.n)
        anti = ((self.xs & zm).sum(axis=1) + (self.zs & xm).sum(axis=1)) & 1
        self.signs ^= anti.astype(bool)

    # -- measurement ----------------------------------------------------------
    def _rowmul_into(self, targets: np.ndarray, src: int) -> None:
        """Rows ``targets`` <- row ``src`` * row ``t`` with sign bookkeeping."""
        if targets.size == 0:
            return
        x1, z1 = self.xs[src], self.zs[src]
        x2, z2 = self.xs[targets], self.zs[targets]
        total = (2 * self.signs[src] + 2 * self.signs[targets] + _row_phase(x1, z1, x2, z2)) % 4
        self.signs[targets] = total == 2
        self.xs[targets] = x2 ^ x1
        self.zs[targets] = z2 ^ z1

    def measure_pauli(
        self,
        obs: PauliOperator,
        rng: np.random.Generator | None = None,
        forced: int | None = None,
    ) -> tuple[int, bool]:
        """Measure a Hermitian Pauli in place.

        Returns ``(outcome, deterministic)`` with outcome 0 for the +1
        eigenvalue of ``obs`` (including its sign). ``forced`` fixes the result
        of a random measurement; it is ignored when the result is determined.

        After a random outcome, :attr:`last_pivot` is the row whose
        destabilizer maps the chosen branch to the other one.
        """
        if obs.phase % 2:
            raise ValueError("observable must be Hermitian (phase +1 or -1)")
        if obs.support_mask >> self.n:
            raise IndexError("observable acts outside the tableau")
        n = self.n
        xm = _unpack(obs.x, n)
        zm = _unpack(obs.z, n)
        anti = (((self.xs & zm).sum(axis=1) + (self.zs & xm).sum(axis=1)) & 1).astype(bool)
        sign = obs.phase == 2
        stab_anti = np.flatnonzero(anti[n:])
        if stab_anti.size:
            p = n + int(stab_anti[0])
            others = np.flatnonzero(anti)
            others = others[others != p]
            self._rowmul_into(others, p)
            self.xs[p - n] = self.xs[p]
            self.zs[p - n] = self.zs[p]
            self.signs[p - n] = self.signs[p]
            if forced is not None:
                outcome = int(forced) & 1
            else:
                if rng is None:
                    raise ValueError("random measurement needs an rng or a forced outcome")
                outcome = int(rng.integers(2))
            self.xs[p] = xm
            self.zs[p] = zm
            self.signs[p] = bool(outcome) ^ sign
            self.last_pivot = p - n
            return outcome, False
        # deterministic: accumulate the stabilizers flagged by destabilizers
        acc_x = np.zeros(n, dtype=bool)
        acc_z = np.zeros(n, dtype=bool)
        acc_phase = 0
        for i in np.flatnonzero(anti[:n]):
            r = n + int(i)
            acc_phase = (acc_phase + 2 * self.signs[r]
                         + int(_row_phase(self.xs[r], self.zs[r], acc_x, acc_z))) % 4
            acc_x ^= self.xs[r]
            acc_z ^= self.zs[r]
        outcome = int(acc_phase == 2) ^ int(sign)
        self.last_pivot = -1
        return outcome, True

    def measure_z(self, q, rng=None, forced=None) -> tuple[int, bool]:
        return self.measure_pauli(PauliOperator(z=1 << q), rng, forced)

    def measure_x(self, q, rng=None, forced=None) -> tuple[int, bool]:
        return self.measure_pauli(PauliOperator(x=1 << q), rng, forced)

    def reset_z(self, q: int, rng=None) -> None:
        outcome, _ = self.measure_z(q, rng, forced=0 if rng is None else None)
        if outcome:
            self.apply_pauli(PauliOperator(x=1 << q))

    def reset_x(self, q: int, rng=None) -> None:
        outcome, _ = self.measure_x(q, rng, forced=0 if rng is None else None)
        if outcome:
            self.apply_pauli(PauliOperator(z=1 << q))

    def is_valid(self) -> bool:
        """Check the symplectic structure of the tableau."""
        n = self.n
        xs = self.xs.astype(np.uint8)
        zs = self.zs.astype(np.uint8)
        form = (xs @ zs.T + zs @ xs.T) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        return bool(np.array_equal(form, expected))


def _pack(bits: np.ndarray) -> int:
    out = 0
    for q in np.flatnonzero(bits):
        out |= 1 << int(q)
    return out


def _unpack(mask: int, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=bool)
    if mask:
        v[bits_of(mask)] = True
    return v


def tableau_measure(
    tab: StabilizerTableau,
    obs: PauliOperator,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[int, StabilizerTableau]:
    """Measure ``obs`` on a copy of ``tab``; returns ``(outcome, new_tableau)``."""
    new = tab.copy()
    outcome, _ = new.measure_pauli(obs, rng, forced)
    return outcome, new
