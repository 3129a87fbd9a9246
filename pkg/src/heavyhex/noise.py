"""Per-location error-rate assignments for non-identical noise studies.

A :class:`NoiseAssignment` gives every fault location of a circuit its own
rate. Gate locations fail with a uniformly random non-identity Pauli on their
output qubits, measurements flip their recorded outcome and preparations flip
the prepared state. Rates are drawn from one of four families:

* ``uniform``: every probed location at the same rate;
* ``folded-normal``: ``|N(mean, (alpha * mean)**2)|`` per location;
* ``reciprocal-normal``: ``tau / |T1|`` with ``T1 ~ N(<T1>, (alpha <T1>)**2)``;
* ``location``: a background assignment with elevated rates on chosen sites.

Only the *probed* kinds (``cx``, ``h`` and ``id`` unless configured otherwise)
receive the sampled rates; the rest get the background rate.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .circuits.core import ScheduledCircuit
from .pauli import PauliOperator

__all__ = [
    "BIAS_CODES",
    "CAPS",
    "DistributionSpec",
    "NoiseAssignment",
    "assign_uniform",
    "sample_folded_normal",
    "sample_reciprocal_normal",
    "apply_bad_sites",
    "sample_assignment",
    "channel_sample",
    "rate_cap",
]

PROBED_DEFAULT = ("cx", "h", "id")
BIAS_CODES = {"depolarizing": 0, "z-only": 1, "x-only": 2}
_BIAS_NAMES = {v: k for k, v in BIAS_CODES.items()}
CAPS = {"one": 0.75, "two": 15.0 / 16.0, "flip": 0.5}


def rate_cap(kind: str) -> float:
    if kind == "cx":
        return CAPS["two"]
    if kind in ("measure", "initialize", "reset"):
        return CAPS["flip"]
    return CAPS["one"]


@dataclass(frozen=True)
class DistributionSpec:
    """Parameters of one rate distribution.

    ``mean`` is the mean input rate. For ``reciprocal-normal`` the gate time
    ``tau`` (seconds) fixes ``<T1> = tau / mean`` unless ``t1_mean`` is given;
    ``floor`` truncates ``|T1|`` from below. For ``location`` the elevated
    ``sites`` get ``p_bad`` with the given Pauli ``bias``.
    """

    kind: str = "uniform"
    mean: float = 1e-3
    alpha: float = 0.0
    tau: float = 100e-9
    t1_mean: float | None = None
    floor: float = 1e-6
    sites: tuple[int, ...] = ()
    p_bad: float | None = None
    bias: str = "depolarizing"
    probed: tuple[str, ...] = PROBED_DEFAULT
    background: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "folded-normal", "reciprocal-normal", "location"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.mean <= 0 and self.kind != "uniform":
            raise ValueError("mean must be positive")
        if self.floor <= 0:
            raise ValueError("truncation floor must be positive")
        if self.bias not in BIAS_CODES:
            raise ValueError(f"unknown bias {self.bias!r}")

    @property
    def t1(self) -> float:
        return self.t1_mean if self.t1_mean is not None else self.tau / self.mean


@dataclass(frozen=True)
class NoiseAssignment:
    """Rates (and Pauli biases) for every location of one circuit.

    ``base`` is an optional second, unbiased channel acting independently at
    the same location; biased bad sites sit on top of the original noise.
    """

    rates: np.ndarray
    kinds: tuple[str, ...]
    bias: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)
    base: np.ndarray | None = None

    def __post_init__(self):
        if len(self.rates) != len(self.kinds) or len(self.bias) != len(self.kinds):
            raise ValueError("rates, kinds and bias must have equal length")
        if self.base is None:
            object.__setattr__(self, "base", np.zeros(len(self.kinds)))
        elif len(self.base) != len(self.kinds):
            raise ValueError("base must cover every location")
        self.rates.setflags(write=False)
        self.bias.setflags(write=False)
        self.base.setflags(write=False)

    def total_rates(self) -> np.ndarray:
        """Probability that either channel fires at each location."""
        return self.rates + self.base - self.rates * self.base

    @property
    def n_locations(self) -> int:
        return len(self.kinds)

    def kind_means(self) -> dict[str, float]:
        out: dict[str, float] = {}
        kinds = np.asarray(self.kinds)
        total = self.total_rates()
        for k in sorted(set(self.kinds)):
            r = total[kinds == k]
            # exact when constant, so a uniform assignment is its own naive version
            out[k] = float(r[0]) if r.min() == r.max() else float(r.mean())
        return out

    def naive(self) -> NoiseAssignment:
        """Each location at its kind's lattice mean, with no bias knowledge."""
        means = self.kind_means()
        rates = np.array([means[k] for k in self.kinds], dtype=float)
        meta = dict(self.metadata, naive=True)
        return NoiseAssignment(rates, self.kinds, np.zeros(len(self.kinds), dtype=np.int8), meta)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def to_text(self) -> str:
        lines = ["# heavyhex-assignment v1"]
        for key in sorted(self.metadata):
            lines.append(f"meta {key} {self.metadata[key]!r}")
        lines.append(f"locations {self.n_locations}")
        for i, (k, r, b, u) in enumerate(zip(self.kinds, self.rates, self.bias, self.base)):
            tail = f" {float(u)!r}" if u else ""
            lines.append(f"{i} {float(r)!r} {k} {_BIAS_NAMES[int(b)]}{tail}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> NoiseAssignment:
        rates, kinds, bias, base = [], [], [], []
        meta: dict = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "meta":
                meta[parts[1]] = _literal(" ".join(parts[2:]))
            elif parts[0] == "locations":
                continue
            else:
                if int(parts[0]) != len(rates):
                    raise ValueError("location ids must be consecutive from 0")
                rates.append(float(parts[1]))
                kinds.append(parts[2])
                bias.append(BIAS_CODES[parts[3]] if len(parts) > 3 else 0)
                base.append(float(parts[4]) if len(parts) > 4 else 0.0)
        return cls(np.array(rates), tuple(kinds), np.array(bias, dtype=np.int8), meta,
                   np.array(base, dtype=float))


def _literal(text: str):
    import ast

    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _kinds(circuit: ScheduledCircuit) -> tuple[str, ...]:
    return tuple(op.kind for op in circuit.ops)


def _caps(kinds: Sequence[str]) -> np.ndarray:
    return np.array([rate_cap(k) for k in kinds])


def _build(circuit, probed_rates: np.ndarray | float, spec_probed, background, meta) -> NoiseAssignment:
    kinds = _kinds(circuit)
    probed = np.array([k in spec_probed for k in kinds], dtype=bool)
    rates = np.full(len(kinds), float(background))
    rates[probed] = probed_rates
    rates = np.minimum(rates, _caps(kinds))
    return NoiseAssignment(rates, kinds, np.zeros(len(kinds), dtype=np.int8), meta)


def assign_uniform(
    circuit: ScheduledCircuit,
    p_in: float,
    probed: Iterable[str] = PROBED_DEFAULT,
    background: float = 0.0,
) -> NoiseAssignment:
    """Every probed location at ``p_in``, everything else at ``background``."""
    probed = tuple(probed)
    for k in probed:
        if not 0 <= p_in <= rate_cap(k):
            raise ValueError(f"rate {p_in} out of range for {k}")
    if not 0 <= background <= CAPS["flip"]:
        raise ValueError("background rate out of range")
    meta = {"distribution": "uniform", "mean": p_in, "background": background}
    return _build(circuit, p_in, probed, background, meta)


def _n_probed(circuit, probed) -> int:
    return sum(op.kind in probed for op in circuit.ops)


def sample_folded_normal(circuit: ScheduledCircuit, spec: DistributionSpec, rng: np.random.Generator) -> NoiseAssignment:
    """Probed rates drawn independently from ``|N(mean, (alpha mean)^2)|``."""
    n = _n_probed(circuit, spec.probed)
    if spec.alpha == 0:
        draws = np.full(n, spec.mean)
    else:
        draws = np.abs(rng.normal(spec.mean, spec.alpha * spec.mean, size=n))
    meta = {"distribution": "folded-normal", "mean": spec.mean, "alpha": spec.alpha,
            "background": spec.background}
    return _build(circuit, draws, spec.probed, spec.background, meta)


def reciprocal_normal_rates(spec: DistributionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """``tau / max(|T1|, floor)`` for ``n`` normal draws of ``T1``."""
    t1 = spec.t1
    if spec.alpha == 0:
        return np.full(n, spec.tau / t1)
    draws = np.abs(rng.normal(t1, spec.alpha * t1, size=n))
    return spec.tau / np.maximum(draws, spec.floor)


def sample_reciprocal_normal(circuit: ScheduledCircuit, spec: DistributionSpec, rng: np.random.Generator) -> NoiseAssignment:
    """Probed rates ``tau / |T1|`` with normally distributed ``T1``, capped per kind."""
    if spec.tau <= 0 or spec.t1 <= 0:
        raise ValueError("tau and <T1> must be positive")
    n = _n_probed(circuit, spec.probed)
    rates = reciprocal_normal_rates(spec, n, rng)
    meta = {"distribution": "reciprocal-normal", "mean": spec.tau / spec.t1, "alpha": spec.alpha,
            "tau": spec.tau, "t1_mean": spec.t1, "floor": spec.floor, "background": spec.background}
    return _build(circuit, rates, spec.probed, spec.background, meta)


def apply_bad_sites(
    assignment: NoiseAssignment,
    circuit: ScheduledCircuit,
    sites: Sequence[int],
    p_bad: float,
    bias: str = "depolarizing",
) -> NoiseAssignment:
    """Raise ``h``/``id`` on ``sites`` and every ``cx`` touching them to ``p_bad``.

    ``sites`` are qubit indices of data qubits. With the default unbiased
    channel the rate is replaced. A biased ``bias`` (``z-only``: {Z} and
    {IZ, ZI, ZZ}) injects errors at ``p_bad`` in addition to the location's
    existing unbiased noise, which moves to ``base``.
    """
    if bias not in BIAS_CODES:
        raise ValueError(f"unknown bias {bias!r}")
    roles = circuit.qubit_roles
    for q in sites:
        if not 0 <= q < circuit.n_qubits or (roles and roles[q] != "data"):
            raise ValueError(f"site {q} is not a data qubit")
    if not sites:
        return assignment
    site_set = set(sites)
    rates = assignment.rates.copy()
    biases = assignment.bias.copy()
    base = assignment.base.copy()
    code = BIAS_CODES[bias]
    for i, op in enumerate(circuit.ops):
        if op.kind in ("h", "id", "cx") and site_set.intersection(op.qubits):
            if code and not biases[i]:
                base[i] = base[i] + rates[i] - base[i] * rates[i]
            rates[i] = min(p_bad, rate_cap(op.kind))
            biases[i] = code
    meta = dict(assignment.metadata, sites=tuple(sites), p_bad=p_bad, bias=bias)
    return NoiseAssignment(rates, assignment.kinds, biases, meta, base)


def sample_assignment(circuit: ScheduledCircuit, spec: DistributionSpec, rng: np.random.Generator) -> NoiseAssignment:
    """Dispatch on ``spec.kind``; ``location`` uses a uniform background."""
    if spec.kind == "uniform":
        out = assign_uniform(circuit, spec.mean, spec.probed, spec.background)
    elif spec.kind == "folded-normal":
        out = sample_folded_normal(circuit, spec, rng)
    elif spec.kind == "reciprocal-normal":
        out = sample_reciprocal_normal(circuit, spec, rng)
    else:
        base = assign_uniform(circuit, spec.mean, spec.probed, spec.background)
        p_bad = spec.mean if spec.p_bad is None else spec.p_bad
        out = apply_bad_sites(base, circuit, spec.sites, p_bad, spec.bias)
    return out


_Z_ONLY_2Q = (PauliOperator.from_string("Z0"), PauliOperator.from_string("Z1"),
              PauliOperator.from_string("Z0 Z1"))
_X_ONLY_2Q = (PauliOperator.from_string("X0"), PauliOperator.from_string("X1"),
              PauliOperator.from_string("X0 X1"))


def channel_sample(kind: str, rate: float, operands: Sequence[int], rng: np.random.Generator,
                   bias: str = "depolarizing") -> PauliOperator | bool:
    """Draw one fault for a location.

    Gates return a :class:`PauliOperator` on ``operands`` (identity when no
    fault occurs). Measurements and preparations return a flip flag.
    """
    if not 0 <= rate <= rate_cap(kind):
        raise ValueError(f"rate {rate} out of range for {kind}")
    hit = rng.random() < rate
    if kind in ("measure", "initialize", "reset"):
        return bool(hit)
    if not hit:
        return PauliOperator()
    if kind == "cx":
        a, b = operands
        if bias == "depolarizing":
            code = int(rng.integers(1, 16))
            local = PauliOperator(x=(code & 1) | ((code >> 2) & 1) << 1,
                                  z=((code >> 1) & 1) | ((code >> 3) & 1) << 1)
        else:
            choices = _Z_ONLY_2Q if bias == "z-only" else _X_ONLY_2Q
            local = choices[int(rng.integers(3))]
        return local.relabel({0: a, 1: b})
    (q,) = operands
    if bias == "z-only":
        return PauliOperator(z=1 << q)
    if bias == "x-only":
        return PauliOperator(x=1 << q)
    code = int(rng.integers(1, 4))
    return PauliOperator(x=(code & 1) << q, z=(code >> 1) << q)
