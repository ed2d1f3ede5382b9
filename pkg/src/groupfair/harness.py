"""
Seeded random instances and batch certification of the algorithms' guarantees.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014) so that a seed
names the same instance in any language: state starts at the seed, each draw
adds ``0x9E3779B97F4A7C15`` and mixes with the published constants. Uniform
integers use rejection sampling on the 64-bit output.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from .algorithms import (
    check_trace_structure,
    representative_goods,
    run_iwrr,
    run_sm,
    run_sm_iwrr,
    run_weighted_greedy,
)
from .audit import (
    INFINITY,
    check_ef1,
    check_efx,
    check_exante_wef1,
    check_pef1,
    check_wef1,
    check_wefx,
    min_feasible_gamma,
)
from .model import (
    ALL_COMMON,
    GENERAL,
    GROUP_COMMON,
    VALUATION_CLASSES,
    InputError,
    Instance,
    allocation_to_json,
    instance_to_json,
    value_to_json,
)

logger = logging.getLogger(__name__)

_MASK = (1 << 64) - 1
GUARANTEED_GAMMA = Fraction(3)


class SplitMix64:
    """Counter-based 64-bit generator.

    >>> SplitMix64(0).next_u64()
    16294208416658607535
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]


Size = Union[int, Tuple[int, int]]


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a random instance.

    Sizes are either fixed or inclusive ``(lo, hi)`` ranges drawn per instance;
    the number of groups is capped at the drawn number of agents.
    ``distribution`` is ``("uniform", lo, hi)`` or ``("zipf", s, cap)``; a zipf
    value is a rank in ``1..cap`` drawn with probability proportional to
    ``rank ** -s``. ``partition`` is ``"balanced"``, ``"random"`` or a tuple of
    group sizes.
    """

    n: Size = 4
    m: Size = 8
    num_groups: Size = 2
    valuation_class: str = GENERAL
    distribution: tuple = ("uniform", 0, 1000)
    partition: Union[str, tuple] = "random"
    seed: int = 0

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return replace(self, seed=seed)

    def to_json(self) -> dict:
        d = asdict(self)
        d["distribution"] = list(self.distribution)
        return d


def _draw(rng: SplitMix64, size: Size) -> int:
    if isinstance(size, int):
        return size
    lo, hi = size
    return rng.randint(lo, hi)


def _partition(rng: SplitMix64, n: int, ell: int, how) -> list:
    if isinstance(how, (tuple, list)):
        sizes = [int(s) for s in how]
        if len(sizes) != ell or sum(sizes) != n or min(sizes) < 1:
            raise InputError(f"group sizes {sizes} do not partition {n} agents into {ell} groups")
        groups, start = [], 0
        for s in sizes:
            groups.append(list(range(start, start + s)))
            start += s
        return groups
    if how == "balanced":
        return [list(range(k, n, ell)) for k in range(ell)]
    if how == "random":
        agents = list(range(n))
        rng.shuffle(agents)
        groups = [[a] for a in agents[:ell]]
        for a in agents[ell:]:
            groups[rng.randint(0, ell - 1)].append(a)
        return [sorted(g) for g in groups]
    raise InputError(f"unknown partition scheme {how!r}")


def _value_sampler(rng: SplitMix64, dist: tuple):
    kind = dist[0]
    if kind == "uniform":
        lo, hi = int(dist[1]), int(dist[2])
        if lo < 0 or hi < lo:
            raise InputError("uniform range must satisfy 0 <= lo <= hi")
        return lambda: rng.randint(lo, hi)
    if kind == "zipf":
        s, cap = float(dist[1]), int(dist[2])
        cdf = list(np.cumsum([r ** -s for r in range(1, cap + 1)]))
        total = cdf[-1]
        return lambda: min(bisect.bisect_right(cdf, rng.random() * total), cap - 1) + 1
    raise InputError(f"unknown value distribution {kind!r}")


def generate(spec: GeneratorSpec) -> Instance:
    """Deterministic instance for ``spec``; the class holds by construction."""
    if spec.valuation_class not in VALUATION_CLASSES:
        raise InputError(f"unknown valuation class {spec.valuation_class!r}")
    rng = SplitMix64(spec.seed)
    n = _draw(rng, spec.n)
    m = _draw(rng, spec.m)
    if isinstance(spec.num_groups, int):
        ell = spec.num_groups
    else:
        lo, hi = spec.num_groups
        ell = rng.randint(lo, min(hi, n)) if lo <= n else lo
    if n < 1 or m < 0 or not 1 <= ell <= n:
        raise InputError(f"infeasible sizes n={n}, m={m}, groups={ell}")
    groups = _partition(rng, n, ell, spec.partition)
    sample = _value_sampler(rng, spec.distribution)

    def row():
        return [sample() for _ in range(m)]

    if spec.valuation_class == ALL_COMMON:
        common = row()
        rows = [common] * n
    elif spec.valuation_class == GROUP_COMMON:
        rows = [None] * n
        for grp in groups:
            shared = row()
            for i in grp:
                rows[i] = shared
    else:
        rows = [row() for _ in range(n)]
    return Instance(rows, groups, spec.valuation_class)


# batch certification

@dataclass
class InstanceOutcome:
    seed: int
    n: int
    m: int
    num_groups: int
    properties: dict
    gamma: Union[Fraction, float, None] = None

    def to_json(self) -> dict:
        d = {"seed": self.seed, "n": self.n, "m": self.m, "groups": self.num_groups,
             "properties": dict(self.properties)}
        if self.gamma is not None:
            d["min_feasible_gamma"] = _gamma_json(self.gamma)
        return d


def _gamma_json(g):
    return "inf" if g == INFINITY else value_to_json(g)


@dataclass
class BatchReport:
    spec: GeneratorSpec
    outcomes: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    max_gamma: Union[Fraction, float, None] = None
    max_gamma_seed: Optional[int] = None

    @property
    def failures(self) -> list:
        return [(o.seed, name) for o in self.outcomes for name, ok in o.properties.items() if not ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def pass_rates(self) -> dict:
        totals, passes = {}, {}
        for o in self.outcomes:
            for name, ok in o.properties.items():
                totals[name] = totals.get(name, 0) + 1
                passes[name] = passes.get(name, 0) + bool(ok)
        return {name: passes[name] / totals[name] for name in sorted(totals)}

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "count": len(self.outcomes),
            "ok": self.ok,
            "pass_rates": self.pass_rates(),
            "failures": [{"seed": s, "property": p} for s, p in self.failures],
            "max_min_feasible_gamma": None if self.max_gamma is None else _gamma_json(self.max_gamma),
            "max_gamma_seed": self.max_gamma_seed,
            "timing_seconds": {k: round(v, 6) for k, v in sorted(self.timing.items())},
            "instances": [o.to_json() for o in self.outcomes],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["seed", "n", "m", "groups", "property", "pass"])
        for o in self.outcomes:
            for name, ok in o.properties.items():
                writer.writerow([o.seed, o.n, o.m, o.num_groups, name, int(bool(ok))])
        return buf.getvalue()


def _pair_structure_ok(trace, inst) -> bool:
    return all(check_trace_structure(trace, inst, k, k2).ok
               for k in range(inst.num_groups) for k2 in range(k + 1, inst.num_groups))


def _timed(timing: dict, name: str, fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    timing[name] = timing.get(name, 0.0) + time.perf_counter() - start
    return out


def certify_instance(inst: Instance, timing: Optional[dict] = None) -> tuple:
    """Run every applicable algorithm on ``inst`` and check its guarantees.

    Returns ``(properties, gamma, artifacts)`` where ``properties`` maps a
    property name to pass/fail, ``gamma`` is the IWRR output's minimal feasible
    ex-ante factor and ``artifacts`` holds the outputs for reproduction bundles.
    """
    timing = {} if timing is None else timing
    props = {}
    artifacts = {}

    alloc, trace = _timed(timing, "iwrr", run_iwrr, inst)
    artifacts["iwrr"] = (alloc, trace)
    props["iwrr.ef1"] = check_ef1(inst, alloc).passed
    props["iwrr.pef1"] = check_pef1(inst, alloc).passed
    props["iwrr.trace_structure"] = _pair_structure_ok(trace, inst)
    gamma = min_feasible_gamma(inst, alloc)
    if inst.valuation_class == GENERAL:
        props["iwrr.exante_wef1@3"] = check_exante_wef1(inst, alloc, GUARANTEED_GAMMA).passed
    else:
        props["iwrr.wef1"] = check_wef1(inst, alloc).passed

    if inst.valuation_class == ALL_COMMON:
        alloc, trace = _timed(timing, "sm_iwrr", run_sm_iwrr, inst)
        artifacts["sm_iwrr"] = (alloc, trace)
        props["sm_iwrr.efx"] = check_efx(inst, alloc).passed
        props["sm_iwrr.wef1"] = check_wef1(inst, alloc).passed
        props["sm_iwrr.representative_bound"] = representative_bound_holds(inst)

        galloc, gtrace = _timed(timing, "weighted_greedy", run_weighted_greedy, inst)
        artifacts["weighted_greedy"] = (galloc, gtrace)
        props["weighted_greedy.wefx"] = check_wefx(inst, galloc).passed
    return props, gamma, artifacts


def representative_bound_holds(inst: Instance) -> bool:
    """Every representative good is worth at most any single good of its SM bundle."""
    sm_alloc, _ = run_sm(inst)
    reps = representative_goods(inst, sm_alloc)
    row = inst.valuations[0]
    return all(value <= row[g]
               for value, bundle in zip(reps.values, reps.source_bundles) for g in bundle)


def certify_batch(spec: GeneratorSpec, count: int, repro_dir=None) -> BatchReport:
    """Certify ``count`` instances with seeds ``spec.seed .. spec.seed + count - 1``.

    Failures are listed with their seed in the report; when ``repro_dir`` is
    given each failing instance is written there together with the algorithm
    outputs, traces and its property table.
    """
    report = BatchReport(spec)
    for t in range(count):
        seed = spec.seed + t
        inst = generate(spec.with_seed(seed))
        props, gamma, artifacts = certify_instance(inst, report.timing)
        outcome = InstanceOutcome(seed, inst.n, inst.m, inst.num_groups, props, gamma)
        report.outcomes.append(outcome)
        if report.max_gamma is None or gamma > report.max_gamma:
            report.max_gamma, report.max_gamma_seed = gamma, seed
        if not all(props.values()):
            logger.error("seed %d failed %s", seed, [k for k, v in props.items() if not v])
            if repro_dir is not None:
                write_reproduction(repro_dir, spec.with_seed(seed), inst, outcome, artifacts)
    return report


def write_reproduction(directory, spec: GeneratorSpec, inst: Instance,
                       outcome: InstanceOutcome, artifacts: dict) -> str:
    path = os.path.join(directory, f"seed_{spec.seed}")
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, "instance.json"), "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2)
    with open(os.path.join(path, "report.json"), "w") as fh:
        json.dump({"spec": spec.to_json(), **outcome.to_json()}, fh, indent=2)
    for name, (alloc, trace) in artifacts.items():
        if hasattr(alloc, "bundles"):
            with open(os.path.join(path, f"{name}.allocation.json"), "w") as fh:
                json.dump(allocation_to_json(alloc, inst), fh, indent=2)
        with open(os.path.join(path, f"{name}.trace.jsonl"), "w") as fh:
            fh.write(trace.to_jsonl())
    return path


class GuaranteeViolation(AssertionError):
    pass


def gamma_frontier(spec: GeneratorSpec, count: int) -> tuple:
    """Largest minimal feasible ex-ante factor over IWRR outputs, and its seed.

    Raises :class:`GuaranteeViolation` if any instance needs a factor above 3.
    """
    worst, witness = None, None
    for t in range(count):
        seed = spec.seed + t
        inst = generate(spec.with_seed(seed))
        alloc, _ = run_iwrr(inst)
        gamma = min_feasible_gamma(inst, alloc)
        if worst is None or gamma > worst:
            worst, witness = gamma, seed
    if worst is not None and worst > GUARANTEED_GAMMA:
        raise GuaranteeViolation(f"seed {witness} needs gamma {worst} > 3")
    return worst, witness


def runtime_ladder(ms=(64, 128, 256, 512, 1024, 2048, 4096), n: int = 8, num_groups: int = 3,
                   seed: int = 0, repeats: int = 3) -> dict:
    """Wall time of SM-IWRR and IWRR on all-common instances of growing size.

    The log-log slope of time against ``m`` is reported; it is informational
    and never asserted.
    """
    rows = []
    for m in ms:
        inst = generate(GeneratorSpec(n, m, num_groups, ALL_COMMON, seed=seed))
        best = {}
        for name, fn in (("sm_iwrr", run_sm_iwrr), ("iwrr", run_iwrr)):
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                fn(inst)
                times.append(time.perf_counter() - start)
            best[name] = min(times)
        rows.append({"m": m, "sm_iwrr_seconds": best["sm_iwrr"], "iwrr_seconds": best["iwrr"],
                     "iwrr_work_bound": num_groups * m * n})
    log_m = np.log([r["m"] for r in rows])
    slopes = {name: float(np.polyfit(log_m, np.log([max(r[f"{name}_seconds"], 1e-9) for r in rows]), 1)[0])
              for name in ("sm_iwrr", "iwrr")}
    logger.info("runtime slopes (log time vs log m): %s", slopes)
    return {"rows": rows, "slopes": slopes, "subquadratic": slopes["sm_iwrr"] < 2}

