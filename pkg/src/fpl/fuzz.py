"""Seeded generation of (space, map) cases and the fuzz driver.

Case ``i`` of a run with seed ``s`` draws from numpy's PCG64 generator
seeded with ``(s XOR i) mod 2**64``, so any single case can be regenerated
without replaying the ones before it.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .classify import SelfMap
from .metric import FiniteMetricSpace, euclidean_space, metric_closure
from .numeric import DEFAULT_TOL
from .orbit import COUNTEREXAMPLE, PREMISES_UNMET, VERIFIED
from .scenarios import RUNNERS, SCENARIOS

GENERATORS = ("euclidean", "closure")
GRID = 13  # integer coordinates 0..12, scaled by 1/4
WEIGHTS = tuple(Fraction(k, 2) for k in range(1, 11))
MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    count: int = 100
    n_min: int = 3
    n_max: int = 6
    generator: str = "euclidean"
    scenario: str = "thm31"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.count < 0:
            raise ConfigError("count must be nonnegative")
        if self.n_min > self.n_max:
            raise ConfigError(f"empty point-count range {self.n_min}..{self.n_max}")
        if self.n_min < 3:
            raise ConfigError("scenarios are triple based; the point-count range must start at 3 or more")
        if self.n_max > GRID:
            raise ConfigError(f"at most {GRID} points per case")
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")

    def to_json(self) -> dict:
        d = asdict(self)
        d["n_range"] = [d.pop("n_min"), d.pop("n_max")]
        return d


def parse_range(text: str) -> tuple:
    """Parse ``"3..6"`` (or a single ``"4"``) into an inclusive range."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise ConfigError(f"bad range {text!r}; expected MIN..MAX") from None


def case_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64((seed ^ i) & MASK64))


def random_map(rng: np.random.Generator, n: int) -> SelfMap:
    """Uniform maps a third of the time, otherwise maps onto 1-3 attractor points."""
    if rng.integers(3) == 0:
        return SelfMap(tuple(int(v) for v in rng.integers(0, n, size=n)))
    k = int(rng.integers(1, min(3, n) + 1))
    targets = [int(v) for v in rng.choice(n, size=k, replace=False)]
    img = [targets[int(rng.integers(k))] for _ in range(n)]
    for t in targets:
        img[t] = t if rng.integers(2) == 0 else targets[int(rng.integers(k))]
    return SelfMap(tuple(img))


def random_space(rng: np.random.Generator, n: int, generator: str) -> FiniteMetricSpace:
    if generator == "euclidean":
        dim = int(rng.integers(1, 3))
        cells = rng.choice(GRID**dim, size=n, replace=False)
        pts = []
        for c in cells:
            c = int(c)
            coords = [Fraction(c % GRID, 4)] if dim == 1 else [Fraction(c % GRID, 4), Fraction(c // GRID, 4)]
            pts.append(tuple(coords))
        return euclidean_space(pts)
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = WEIGHTS[int(rng.integers(len(WEIGHTS)))]
    return metric_closure(w)


def generate_case(config: FuzzConfig, i: int):
    rng = case_rng(config.seed, i)
    n = int(rng.integers(config.n_min, config.n_max + 1))
    space = random_space(rng, n, config.generator)
    return space, random_map(rng, n)


def run_case(config: FuzzConfig, i: int) -> dict:
    space, T = generate_case(config, i)
    rec = RUNNERS[config.scenario](space, T, config.tol)
    head = {
        "case": i,
        "n": space.n,
        "space_digest": space.digest(),
        "mode": "exact" if space.exact else "float",
        "image": list(T.image),
    }
    head.update(rec)
    return head


def _workers() -> int:
    env = os.environ.get("FPL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"FPL_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def fuzz(config: FuzzConfig, workers: int | None = None) -> dict:
    """Run ``config.count`` cases and assemble the report in case order."""
    workers = workers or _workers()
    if workers > 1 and config.count > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(lambda i: run_case(config, i), range(config.count)))
    else:
        cases = [run_case(config, i) for i in range(config.count)]
    tallies = {VERIFIED: 0, PREMISES_UNMET: 0, COUNTEREXAMPLE: 0}
    finds = []
    labels = {}
    for c in cases:
        tallies[c["verdict"]] += 1
        if "finds" in c:
            finds.append({"case": c["case"], **c["finds"]})
        if "label" in c:
            labels[c["label"]] = labels.get(c["label"], 0) + 1
        if c["verdict"] == COUNTEREXAMPLE:
            finds.append({"case": c["case"], "witness": "counterexample", "reproduce": c.get("reproduce")})
    report = {
        "tool": "fpl",
        "version": __version__,
        "config": config.to_json(),
        "tallies": tallies,
        "notable": finds,
        "cases": cases,
    }
    if labels:
        report["labels"] = dict(sorted(labels.items()))
    return report
