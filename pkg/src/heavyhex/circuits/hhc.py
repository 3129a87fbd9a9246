"""Syndrome-extraction cycles of the heavy-hexagon code.

X cycle: the bridge ``("b", i, j)`` between data ``(i, j)`` and ``(i, j+1)``
is prepared in ``|+>``, controls a CX onto each end and is read out in X.

Z cycle: plaquette ``(i, j)`` is read through its two bridges, used as flags,
and the syndrome qubit ``("s", i, j)``. The bridges start in ``|+>`` and are
entangled with the syndrome qubit, collect the Z parity of their data pair,
are disentangled again and read out in X.

A Z fault on a bridge before its data CXs spreads to both data qubits of the
bridge and fires the flag; a Z fault on the syndrome qubit fires one flag and
leaves the other bridge's pair, which is the first pair times a gauge. So a
fired flag suggests ``Z`` on its bridge's pair. Deflagging modes:

* ``"decoder"`` (default): each flag is recorded as an ``F`` detector with
  that hint attached, and the decoder removes the hint's syndrome when the
  flag fires together with all of it;
* ``"feedback"``: the hint is applied as classically controlled Z gates. A
  flag that fires without a data error (readout flip, late Z on the bridge)
  then leaves a weight-2 error, so this mode lowers the fault distance;
* ``"none"``: flags are read out and ignored.

Boundary Z pairs use their own qubit ``("v", i, c)``; its two CX steps are
interleaved with the plaquette circuit so no data qubit is needed twice in a
step.
"""

from __future__ import annotations

from ..codes import SubsystemCode
from ..lattice import HeavyHexLattice, build_hhc_lattice
from ..pauli import PauliOperator
from .core import CircuitBuilder
from .rssc import CycleFragment, _require

__all__ = ["DEFLAG_MODES", "build_hhc_cycle", "check_deflag", "emit_hhc_x_cycle", "emit_hhc_z_cycle"]

# CX step (0-based) of the two data CXs of a boundary pair, left / right column
_BOUNDARY_STEPS = {"left": (3, 4), "right": (2, 4)}
DEFLAG_MODES = ("decoder", "feedback", "none")


def check_deflag(mode) -> str:
    if mode is True:
        return "decoder"
    if mode is False or mode is None:
        return "none"
    if mode not in DEFLAG_MODES:
        raise ValueError(f"deflag must be one of {DEFLAG_MODES}, got {mode!r}")
    return mode


def emit_hhc_x_cycle(b: CircuitBuilder, code: SubsystemCode, lat: HeavyHexLattice) -> dict:
    pairs = []
    for k in code.gauges_of("X"):
        _, _, i, j = code.gauge_labels[k]
        pairs.append((k, lat[("b", i, j)], code.qubit(i, j), code.qubit(i, j + 1)))
    for _, bridge, _, _ in pairs:
        b.reset(bridge, "X")
    for _, bridge, left, _ in pairs:
        b.cx(bridge, left)
    for _, bridge, _, right in pairs:
        b.cx(bridge, right)
    return {k: b.measure(bridge, "X") for k, bridge, _, _ in pairs}


def emit_hhc_z_cycle(b: CircuitBuilder, code: SubsystemCode, lat: HeavyHexLattice,
                     deflag="decoder") -> dict:
    mode = check_deflag(deflag)
    plaq, bound = [], []
    for k in code.gauges_of("Z"):
        lab = code.gauge_labels[k]
        if lab[1] == "plaquette":
            _, _, i, j = lab
            plaq.append((k, lat[("b", i, j)], lat[("b", i + 1, j)], lat[("s", i, j)],
                         (code.qubit(i, j), code.qubit(i, j + 1)),
                         (code.qubit(i + 1, j), code.qubit(i + 1, j + 1))))
        else:
            _, _, i, c = lab
            side = "left" if c == 1 else "right"
            bound.append((k, lat[("v", i, c)], code.qubit(i, c), code.qubit(i + 1, c), side))
    for _, f1, f2, s, _, _ in plaq:
        b.reset(f1, "X")
        b.reset(f2, "X")
        b.reset(s)
    for _, v, _, _, _ in bound:
        b.reset(v)
    for step in range(6):
        for _, f1, f2, s, top, low in plaq:
            if step == 0:
                b.cx(f1, s)
            elif step == 1:
                b.cx(f2, s)
            elif step in (2, 3):
                b.cx(top[step - 2], f1)
                b.cx(low[step - 2], f2)
            elif step == 4:
                b.cx(f2, s)
            else:
                b.cx(f1, s)
        for _, v, upper, lower, side in bound:
            first, second = _BOUNDARY_STEPS[side]
            if step == first:
                b.cx(upper, v)
            elif step == second:
                b.cx(lower, v)
    out = {}
    for k, f1, f2, s, top, low in plaq:
        out[k] = b.measure(s)
        for flag, pair in ((f1, top), (f2, low)):
            m = b.measure(flag, "X")
            if mode == "decoder":
                b.flag(m, PauliOperator.z_type(pair))
            elif mode == "feedback":
                b.feedback(m, PauliOperator.z_type(pair))
    for k, v, _, _, _ in bound:
        out[k] = b.measure(v)
    return out


def build_hhc_cycle(code: SubsystemCode, lattice: HeavyHexLattice | None = None,
                    deflag="decoder") -> CycleFragment:
    """One X cycle followed by one flagged Z cycle, as a standalone circuit."""
    _require(code, "HHC")
    lat = lattice if lattice is not None else build_hhc_lattice(code.d)
    b = CircuitBuilder(lat.n_vertices)
    gauge_meas = emit_hhc_x_cycle(b, code, lat)
    gauge_meas.update(emit_hhc_z_cycle(b, code, lat, deflag))
    circuit = b.build(name=f"hhc-d{code.d}-cycle", qubit_roles=lat.roles)
    stages = (tuple(code.gauges_of("X")), tuple(code.gauges_of("Z")))
    return CycleFragment(circuit, gauge_meas, stages, lat)
