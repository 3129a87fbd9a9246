"""Experiment spec files.

A spec is flat ``key = value`` text. Grid keys may repeat, one value per
line, and every other key must appear at most once::

    # heavyhex-spec v1
    name = threshold-d35
    sweep = threshold
    code = RSSC
    distance = 3
    distance = 5
    p_in = 1e-3
    p_in = 2e-3

See docs/formats.md for the full key list.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

__all__ = ["SPEC_HEADER", "ExperimentSpec", "SpecError", "parse_spec", "load_spec", "SWEEPS"]

SPEC_HEADER = "# heavyhex-spec v1"
SWEEPS = ("threshold", "sigma", "badsite", "decoder")


class SpecError(ValueError):
    pass


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise SpecError(f"seed {text} is not an unsigned 64-bit integer")
    return v


# key -> (attribute, converter, is_grid)
_KEYS = {
    "name": ("name", str, False),
    "sweep": ("sweep", str, False),
    "code": ("code", str.upper, False),
    "distance": ("distances", int, True),
    "s": ("s_values", int, True),
    "rounds": ("rounds", int, False),
    "basis": ("bases", str.upper, True),
    "deflag": ("deflag", str, False),
    "noise": ("noise", str, False),
    "p_in": ("p_in", float, True),
    "alpha": ("alphas", float, True),
    "tau": ("tau", float, False),
    "floor": ("floor", float, False),
    "p_bad": ("p_bad", float, True),
    "site": ("sites", int, True),
    "site_count": ("site_counts", int, True),
    "bias": ("bias", str, False),
    "background": ("background", float, False),
    "probed": ("probed", str, True),
    "instances": ("instances", int, False),
    "shots": ("shots", int, False),
    "decoder": ("decoders", str, True),
    "backend": ("backend", str, False),
    "seed": ("seed", _u64, False),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: the cartesian product of its grids, each point run on
    ``instances`` noise draws of ``shots`` shots per basis."""

    name: str = "experiment"
    sweep: str = "threshold"
    code: str = "RSSC"
    distances: tuple[int, ...] = (3,)
    s_values: tuple[int, ...] = (2,)
    rounds: int = 12
    bases: tuple[str, ...] = ("Z", "X")
    deflag: str = "decoder"
    noise: str = "uniform"
    p_in: tuple[float, ...] = (1e-3,)
    alphas: tuple[float, ...] = (0.0,)
    tau: float = 100e-9
    floor: float = 1e-6
    p_bad: tuple[float, ...] = ()
    sites: tuple[int, ...] = ()
    site_counts: tuple[int, ...] = ()
    bias: str = "depolarizing"
    background: float = 0.0
    probed: tuple[str, ...] = ("cx", "h", "id")
    instances: int = 16
    shots: int = 10_000
    decoders: tuple[str, ...] = ("aware",)
    backend: str = "pymatching"
    seed: int = 0

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise SpecError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        if self.code not in ("RSSC", "HHC"):
            raise SpecError(f"code must be RSSC or HHC, got {self.code!r}")
        for key in ("distances", "s_values", "bases", "p_in", "alphas", "decoders", "probed"):
            if not getattr(self, key):
                raise SpecError(f"grid {key} is empty")
        if any(d < 3 or d % 2 == 0 for d in self.distances):
            raise SpecError("distances must be odd and at least 3")
        if any(b not in ("X", "Z") for b in self.bases):
            raise SpecError("basis must be X or Z")
        if any(m not in ("aware", "naive") for m in self.decoders):
            raise SpecError("decoder must be aware or naive")
        if self.noise not in ("uniform", "folded-normal", "reciprocal-normal", "location"):
            raise SpecError(f"unknown noise {self.noise!r}")
        if self.instances < 1 or self.shots < 1:
            raise SpecError("instances and shots must be positive")
        if any(self.rounds % s for s in self.s_values):
            raise SpecError(f"every s must divide rounds={self.rounds}")
        if self.sweep == "threshold" and self.noise != "uniform":
            raise SpecError("a threshold sweep needs uniform noise")
        if self.sweep == "sigma" and self.noise not in ("folded-normal", "reciprocal-normal"):
            raise SpecError("a sigma sweep needs folded-normal or reciprocal-normal noise")
        if self.sweep == "decoder" and set(self.decoders) != {"aware", "naive"}:
            raise SpecError("a decoder comparison needs both decoders")
        if self.sweep == "badsite":
            if self.noise != "location":
                raise SpecError("a bad-site sweep needs location noise")
            if not self.p_bad:
                raise SpecError("a bad-site sweep needs at least one p_bad")
            if self.site_counts and self.sites:
                raise SpecError("give either site or site_count, not both")
            if not self.site_counts and not self.sites:
                raise SpecError("a bad-site sweep needs site or site_count")
            if any(k < 0 for k in self.site_counts):
                raise SpecError("site_count must be non-negative")
            # site k is the k-th qubit of the logical-Z path, which has d sites
            top = min(self.distances)
            if any(k > top for k in self.site_counts) or any(not 0 <= s < top for s in self.sites):
                raise SpecError(f"sites must lie on the logical-Z path (0..{top - 1})")

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def to_text(self) -> str:
        out = [SPEC_HEADER]
        for key, (attr, _, grid) in _KEYS.items():
            value = getattr(self, attr)
            if grid:
                out.extend(f"{key} = {_fmt(v)}" for v in value)
            else:
                out.append(f"{key} = {_fmt(value)}")
        return "\n".join(out) + "\n"

    def with_overrides(self, **changes) -> ExperimentSpec:
        return replace(self, **changes)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def parse_spec(text: str, require_header: bool = True) -> ExperimentSpec:
    lines = text.splitlines()
    first = next((ln.strip() for ln in lines if ln.strip()), "")
    if first.startswith("# heavyhex-spec"):
        if first != SPEC_HEADER:
            raise SpecError(f"unsupported spec version: {first!r}")
    elif require_header:
        raise SpecError(f"missing header {SPEC_HEADER!r}")
    values: dict[str, list] = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {n}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise SpecError(f"line {n}: unknown key {key!r}")
        attr, conv, grid = _KEYS[key]
        if not grid and attr in values:
            raise SpecError(f"line {n}: key {key!r} given twice")
        try:
            values.setdefault(attr, []).append(conv(value))
        except ValueError as exc:
            raise SpecError(f"line {n}: bad value for {key!r}: {value!r}") from exc
    kwargs = {}
    grids = {attr for attr, _, grid in _KEYS.values() if grid}
    for attr, vals in values.items():
        kwargs[attr] = tuple(vals) if attr in grids else vals[0]
    return ExperimentSpec(**kwargs)


def load_spec(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
