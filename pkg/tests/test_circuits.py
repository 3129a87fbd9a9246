from collections import Counter

import pytest

from heavyhex.circuits import CircuitBuilder, Detector, Schedule, ScheduledCircuit, build_memory_experiment
from heavyhex.circuits.rssc import build_x_gauge_cycle, build_z_gauge_cycle
from heavyhex.codes import build_code
from heavyhex.engine import NondeterministicDetectorError, reference_sample
from heavyhex.faults import hook_violations

from conftest import memory

# (locations, measurements, detectors, ticks, flags) at s = 2 over 12 rounds
GOLDEN = {
    ("RSSC", 3, "Z"): (3929, 155, 122, 204, 0),
    ("RSSC", 3, "X"): (3905, 155, 122, 205, 0),
    ("RSSC", 5, "Z"): (10891, 513, 392, 204, 0),
    ("HHC", 3, "Z"): (2295, 177, 144, 144, 48),
    ("HHC", 3, "X"): (2269, 177, 148, 144, 48),
    ("HHC", 5, "X"): (6704, 601, 496, 144, 192),
}


@pytest.mark.parametrize("key", sorted(GOLDEN))
def test_golden_counts(key):
    c = memory(*key)
    assert (c.n_locations, c.n_measurements, len(c.detectors), c.n_ticks, len(c.flags)) == GOLDEN[key]


def test_location_mix_rssc():
    mix = Counter(op.kind for op in memory("RSSC", 3, "Z").ops)
    assert mix == {"id": 2899, "cx": 624, "reset": 240, "measure": 155, "initialize": 11}


@pytest.mark.parametrize("kind", ["RSSC", "HHC"])
@pytest.mark.parametrize("d", [3, 5])
@pytest.mark.parametrize("s", [1, 2, 3, 4])
@pytest.mark.parametrize("basis", ["Z", "X"])
def test_noiseless_detectors_are_deterministic(kind, d, s, basis):
    c = memory(kind, d, basis, s)
    ref = reference_sample(c, seed=s)
    assert ref.random.any()  # gauge outcomes are random, their products are not
    c.check_schedule()


@pytest.mark.parametrize("deflag", ["feedback", "none"])
@pytest.mark.parametrize("basis", ["Z", "X"])
def test_hhc_deflag_modes_are_deterministic(deflag, basis):
    c = memory("HHC", 3, basis, 2, deflag)
    reference_sample(c)
    assert bool(c.feedback) == (deflag == "feedback")


def test_schedule_strings():
    assert Schedule.from_total(2, "Z").cycles() == "ZZXX" * 6
    assert Schedule.from_total(3, "X").cycles() == "XXXZZZ" * 4
    assert str(Schedule(1, 12)) == "(Z^1 X^1)^12"
    with pytest.raises(ValueError):
        Schedule.from_total(5)
    with pytest.raises(ValueError):
        Schedule(2, 5)


@pytest.mark.parametrize("key", [("RSSC", 3, "Z"), ("HHC", 3, "X")])
def test_text_round_trip(key):
    c = memory(*key)
    back = ScheduledCircuit.from_text(c.to_text())
    assert back == c
    assert back.to_text() == c.to_text()


@pytest.mark.parametrize("d", [3, 5])
def test_z_cycle_hooks_stay_within_one_data_error(d):
    code = build_code("RSSC", d)
    n, bad = hook_violations(code, build_z_gauge_cycle(code).circuit)
    assert n > 0 and bad == []


def test_x_cycle_fragment_builds():
    frag = build_x_gauge_cycle(build_code("RSSC", 3))
    frag.circuit.check_schedule()
    assert any(op.kind == "cx" for op in frag.circuit.ops)


def test_memory_observable_is_logical():
    code = build_code("RSSC", 3)
    c = build_memory_experiment(code, Schedule.from_total(2, "Z"))
    final = {op.meas: op.qubits[0] for op in c.ops if op.kind == "measure"}
    assert {final[m] for m in c.observable} == code.logical_z.support


def test_builder_schedules_asap():
    b = CircuitBuilder(3)
    b.cx(0, 1)
    b.cx(1, 2)
    b.h(0)
    c = b.build()
    ticks = {(op.kind, op.qubits): op.tick for op in c.ops}
    assert ticks[("cx", (0, 1))] == 0 and ticks[("cx", (1, 2))] == 1 and ticks[("h", (0,))] == 1
    assert ("id", (2,)) not in ticks  # qubit 2 is not live before its first operation


def test_builder_rejects_bad_operations():
    b = CircuitBuilder(2)
    with pytest.raises(ValueError):
        b.cx(0, 0)
    with pytest.raises(IndexError):
        b.h(3)
    with pytest.raises(IndexError):
        b.feedback(0, None)


def test_random_detector_is_caught():
    b = CircuitBuilder(1)
    b.h(0)
    m = b.measure(0)
    c = b.build([Detector((m,), "Z")])
    with pytest.raises(NondeterministicDetectorError):
        reference_sample(c)


def test_schedule_conflict_is_caught():
    c = memory("RSSC", 3, "Z")
    ops = list(c.ops)
    clash = ops[0].__class__("h", ops[0].qubits, ops[0].tick)
    bad = ScheduledCircuit(c.n_qubits, tuple([clash] + ops), c.n_measurements)
    with pytest.raises(ValueError):
        bad.check_schedule()
