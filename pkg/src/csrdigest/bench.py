"""Depth and width sweeps over synthetic documents for the four digest models.

Hash counts are exact and machine-independent; ``median_ns`` is wall time on
the current machine and only meaningful relative to other rows of the same run.
"""

from __future__ import annotations

import csv
import random
import statistics
import string
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Literal, Sequence

from .baselines import bertino_digest, dom_hash_digest, xhash_digest
from .csr import csr_digest
from .hashing import HashAlgorithm, HashCounter
from .tree import XmlNode

Axis = Literal["depth", "width"]
Topology = Literal["depth_chain", "width_flat"]

TOPOLOGY_FOR_AXIS: dict[str, Topology] = {"depth": "depth_chain", "width": "width_flat"}
CSV_HEADER = ("model", "algo", "axis", "value", "nodes", "hash_count", "median_ns")
ORDER = ("csr", "domhash", "bertino")


def _csr_model(root: XmlNode, algo: HashAlgorithm, counter: HashCounter) -> None:
    csr_digest(root, "/" + root.name, (), algo, counter)


MODELS: dict[str, Callable[[XmlNode, HashAlgorithm, HashCounter], object]] = {
    "csr": _csr_model,
    "domhash": dom_hash_digest,
    "xhash": xhash_digest,
    "bertino": bertino_digest,
}


@dataclass(frozen=True)
class TreeSpec:
    depth: int
    per_level: int = 5
    payload: int = 32
    topology: Topology = "depth_chain"

    def __post_init__(self) -> None:
        if self.depth < 1 or self.per_level < 1 or self.payload < 0:
            raise ValueError(f"invalid tree spec {self}")
        if self.topology not in ("depth_chain", "width_flat"):
            raise ValueError(f"unknown topology {self.topology!r}")

    @property
    def node_count(self) -> int:
        return 1 + self.per_level * self.depth


_NAME_HEAD = string.ascii_letters
_NAME_TAIL = string.ascii_letters + string.digits
_TEXT = string.ascii_letters + string.digits


def _name(rng: random.Random) -> str:
    return rng.choice(_NAME_HEAD) + "".join(rng.choices(_NAME_TAIL, k=7))


def _text(rng: random.Random, n: int) -> str:
    return "".join(rng.choices(_TEXT, k=n))


def generate_tree(spec: TreeSpec, seed: int = 0) -> XmlNode:
    """Deterministic synthetic document for (spec, seed).

    ``depth_chain`` puts ``per_level`` siblings on each of ``depth`` levels below
    the root, one of which parents the next level. ``width_flat`` puts the same
    number of elements directly under the root.
    """
    rng = random.Random(seed)
    root_name, root_text = _name(rng), _text(rng, spec.payload)
    if spec.topology == "width_flat":
        kids = tuple(
            XmlNode(_name(rng), _text(rng, spec.payload)) for _ in range(spec.per_level * spec.depth)
        )
        return XmlNode(root_name, root_text, children=kids)

    levels = []
    for _ in range(spec.depth):
        row = [(_name(rng), _text(rng, spec.payload)) for _ in range(spec.per_level)]
        levels.append((row, rng.randrange(spec.per_level)))
    below: tuple[XmlNode, ...] = ()
    for row, parent_index in reversed(levels):
        below = tuple(
            XmlNode(name, text, children=below if i == parent_index else ())
            for i, (name, text) in enumerate(row)
        )
    return XmlNode(root_name, root_text, children=below)


@dataclass(frozen=True)
class BenchResult:
    model: str
    algo: str
    axis: str
    value: int
    nodes: int
    hash_count: int
    median_ns: int  # wall clock, machine-dependent

    def row(self) -> tuple:
        return (self.model, self.algo, self.axis, self.value, self.nodes, self.hash_count, self.median_ns)


def sweep_range(start: int, stop: int, step: int) -> list[int]:
    """Inclusive integer range; rejects empty or non-positive sweeps."""
    if step <= 0 or start < 1 or stop < start:
        raise ValueError(f"invalid sweep range from={start} to={stop} step={step}")
    return list(range(start, stop + 1, step))


def count_hashes(model: str, root: XmlNode, algo: HashAlgorithm | str) -> int:
    counter = HashCounter()
    MODELS[model](root, HashAlgorithm.parse(algo), counter)
    return counter.count


def _measure_point(
    axis: str,
    value: int,
    algos: Sequence[str],
    models: Sequence[str],
    per_level: int,
    payload: int,
    repeat: int,
    seed: int,
) -> list[BenchResult]:
    spec = TreeSpec(value, per_level, payload, TOPOLOGY_FOR_AXIS[axis])
    root = generate_tree(spec, seed)
    out = []
    for model in models:
        fn = MODELS[model]
        for algo_name in algos:
            algo = HashAlgorithm.parse(algo_name)
            times, counts = [], set()
            for _ in range(repeat):
                counter = HashCounter()
                t0 = time.perf_counter_ns()
                fn(root, algo, counter)
                times.append(time.perf_counter_ns() - t0)
                counts.add(counter.count)
            if len(counts) != 1:
                raise RuntimeError(f"non-deterministic hash count for {model}/{algo.value}: {counts}")
            out.append(
                BenchResult(
                    model, algo.value, axis, value, spec.node_count, counts.pop(), int(statistics.median(times))
                )
            )
    return out


def run_sweep(
    axis: Axis,
    values: Iterable[int],
    algos: Sequence[str] = ("sha1",),
    models: Sequence[str] = tuple(MODELS),
    per_level: int = 5,
    repeat: int = 10,
    seed: int = 0,
    payload: int = 32,
    jobs: int = 1,
) -> list[BenchResult]:
    """Time every (model, algo) pair ``repeat`` times at each sweep point.

    ``jobs > 1`` spreads whole points over worker processes; a single timed
    measurement is never split.
    """
    if axis not in TOPOLOGY_FOR_AXIS:
        raise ValueError(f"axis must be 'depth' or 'width', got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep range is empty")
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    unknown = [m for m in models if m not in MODELS]
    if unknown:
        raise ValueError(f"unknown models {unknown}; choose from {sorted(MODELS)}")
    algos = [HashAlgorithm.parse(a).value for a in algos]
    args = [(axis, v, algos, list(models), per_level, payload, repeat, seed) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_measure_point, *zip(*args)))
    else:
        chunks = [_measure_point(*a) for a in args]
    return [r for chunk in chunks for r in chunk]


def export_results(results: Iterable[BenchResult], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in results:
            writer.writerow(r.row())
    return path


def read_results(path: str | Path) -> list[BenchResult]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [
            BenchResult(
                r["model"], r["algo"], r["axis"], int(r["value"]), int(r["nodes"]),
                int(r["hash_count"]), int(r["median_ns"]),
            )
            for r in reader
        ]


def _grouped(results: Iterable[BenchResult]) -> dict[tuple[str, str, int], dict[str, BenchResult]]:
    groups: dict[tuple[str, str, int], dict[str, BenchResult]] = {}
    for r in results:
        groups.setdefault((r.axis, r.algo, r.value), {})[r.model] = r
    return groups


def ordering_verdicts(
    results: Iterable[BenchResult], key: str = "hash_count"
) -> list[tuple[str, str, int, bool]]:
    """(axis, algo, value, csr < domhash < bertino) for every point holding all three models."""
    out = []
    for (axis, algo, value), by_model in sorted(_grouped(results).items()):
        if all(m in by_model for m in ORDER):
            a, b, c = (getattr(by_model[m], key) for m in ORDER)
            out.append((axis, algo, value, a < b < c if key == "hash_count" else a <= b <= c))
    return out


def format_table(results: Sequence[BenchResult]) -> str:
    lines = [f"{'model':<8} {'algo':<7} {'axis':<6} {'value':>6} {'nodes':>6} {'hashes':>8} {'median_us':>10}"]
    for r in results:
        lines.append(
            f"{r.model:<8} {r.algo:<7} {r.axis:<6} {r.value:>6} {r.nodes:>6} {r.hash_count:>8}"
            f" {r.median_ns / 1000:>10.1f}"
        )
    return "\n".join(lines)
