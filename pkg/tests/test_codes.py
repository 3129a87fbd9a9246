import networkx as nx
import pytest

from heavyhex.codes import EXCEEDS, build_code, code_distance_bruteforce, validate_code
from heavyhex.lattice import build_heavy_hex, build_hhc_lattice
from heavyhex.pauli import PauliOperator, commutes

# (n, gauges, stabilizers, gauge qubits, qubits of the memory circuit)
GOLDEN = {
    ("RSSC", 3): (11, 12, 8, 2, 23),
    ("RSSC", 5): (33, 40, 24, 8, 65),
    ("HHC", 3): (9, 10, 6, 2, 19),
    ("HHC", 5): (25, 32, 16, 8, 57),
}


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_heavy_hex_counts(d):
    lat = build_heavy_hex(d)
    assert lat.n_data == d * d + (d - 1) ** 2 // 2
    assert lat.n_vertices - lat.n_data == d * d + 2 * d - 3
    assert 2 * lat.n_vertices == 5 * d * d + 2 * d - 5


@pytest.mark.parametrize("builder", [build_heavy_hex, build_hhc_lattice])
@pytest.mark.parametrize("d", [3, 5, 7])
def test_lattice_is_heavy_hex(builder, d):
    lat = builder(d)
    assert max(lat.degree()) <= 3
    g = nx.Graph(lat.edges)
    g.add_nodes_from(range(lat.n_vertices))
    assert nx.is_connected(g)
    assert nx.is_bipartite(g)
    for a, b in lat.edges:
        assert lat.has_edge(b, a)


@pytest.mark.parametrize("kind,d", sorted(GOLDEN))
def test_code_golden_counts(kind, d):
    code = build_code(kind, d)
    n, gauges, stabs, g, _ = GOLDEN[(kind, d)]
    assert (code.n, len(code.gauges), len(code.stabilizers), code.gauge_qubits) == (n, gauges, stabs, g)
    assert g == (d - 1) ** 2 // 2


@pytest.mark.parametrize("kind", ["RSSC", "HHC"])
@pytest.mark.parametrize("d", [3, 5, 7])
def test_codes_validate(kind, d):
    code = build_code(kind, d)
    rep = validate_code(code)
    assert rep.ok, rep.lines()
    assert not commutes(code.logical_x, code.logical_z)
    assert len(code.stabilizers_of("X")) + len(code.stabilizers_of("Z")) == len(code.stabilizers)


def test_validation_catches_a_broken_code():
    code = build_code("RSSC", 3)
    from dataclasses import replace
    broken = replace(code, logical_z=PauliOperator.z_type([0, 1]))
    assert not validate_code(broken).ok


def test_gauge_weights():
    rssc = build_code("RSSC", 5)
    assert {g.weight for g in rssc.gauges} == {2, 3}
    hhc = build_code("HHC", 5)
    assert {hhc.gauges[k].weight for k in hhc.gauges_of("X")} == {2}
    assert {hhc.gauges[k].weight for k in hhc.gauges_of("Z")} == {2, 4}


@pytest.mark.parametrize("kind", ["RSSC", "HHC"])
def test_distance_three(kind):
    code = build_code(kind, 3)
    assert code_distance_bruteforce(code, max_weight=2) == EXCEEDS
    assert code_distance_bruteforce(code, max_weight=3) == 3


@pytest.mark.parametrize("kind", ["RSSC", "HHC"])
def test_distance_five_exceeds_four(kind):
    assert code_distance_bruteforce(build_code(kind, 5), max_weight=4) == EXCEEDS


def test_sites_follow_logical_z():
    for kind in ("RSSC", "HHC"):
        code = build_code(kind, 5)
        assert set(code.sites()) == code.logical_z.support
        assert code.sites()[0] in code.logical_x.support


def test_text_export():
    text = build_code("HHC", 3).to_text()
    assert text.startswith("# heavyhex-code v1")
    assert text.count("\ngauge ") == 10 and "gauge_qubits 2" in text


@pytest.mark.parametrize("d", [2, 4, 1])
def test_rejects_bad_distance(d):
    with pytest.raises(ValueError):
        build_code("RSSC", d)
