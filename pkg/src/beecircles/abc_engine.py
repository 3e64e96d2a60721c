"""Artificial bee colony optimizer with an exhausted-source memory.

Classic ABC throws away a food source once its trial counter reaches the
limit.  Here the abandoned source is first copied into an
:class:`ExhaustedMemory`, so local optima reached during the run survive it
and can be mined afterwards (see :mod:`beecircles.multi_detector`).

The engine minimizes any ``evaluate(pos) -> (payload, J)`` callable.  A
``None`` payload marks an infeasible position; such sources take part in
the search but are never remembered or reported as best.

Random draws come from a PCG64 generator seeded by :attr:`AbcConfig.seed`
and are consumed in a fixed order, so a run is reproducible bit for bit:

* init, per source: ``D`` uniforms in ``[0, 1)``;
* every neighbor move: dimension ``j`` (integer), partner ``k`` (integer
  over the ``Np - 1`` other sources), ``phi`` uniform in ``[-1, 1)``;
* every onlooker: one uniform in ``[0, 1)`` for the roulette, then a move;
* every scout: ``D`` uniforms, as in init.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .edge_pipeline import EdgeMap
from .objective import Candidate, CircleObjective, ScoredCircle, fitness

__all__ = [
    "AbcConfig",
    "ExhaustedMemory",
    "AbcRun",
    "init_population",
    "employed_phase",
    "onlooker_phase",
    "scout_phase",
    "selection_probabilities",
    "run_abc",
    "run_detection",
]

Evaluate = Callable[[np.ndarray], tuple]
Observer = Callable[["AbcRun", str], None]


@dataclass(frozen=True)
class AbcConfig:
    colony_size: int = 20
    cycles: int = 300
    limit: int = 30
    seed: int = 0
    memory_cap: int = 100
    # per-dimension (low, high); None means "take them from the objective"
    bounds: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.colony_size < 2:
            raise ValueError("colony_size must be >= 2")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.limit < 1:
            raise ValueError("limit must be >= 1")
        if self.memory_cap < 0:
            raise ValueError("memory_cap must be >= 0")
        if self.bounds is not None:
            for low, high in self.bounds:
                if low > high:
                    raise ValueError(f"invalid bounds ({low}, {high})")


@dataclass
class ExhaustedMemory:
    """Append-only store of abandoned, feasible sources."""

    cap: int = 100
    entries: list[ScoredCircle] = field(default_factory=list)
    dropped: int = 0

    def add(self, circle, j: float) -> bool:
        """Record a snapshot; returns False if it was rejected."""
        if circle is None or not j < 1.0:
            return False
        if len(self.entries) >= self.cap:
            self.dropped += 1
            return False
        self.entries.append(ScoredCircle(circle, j))
        return True

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass
class AbcRun:
    cfg: AbcConfig
    evaluate: Evaluate
    low: np.ndarray
    high: np.ndarray
    rng: np.random.Generator
    population: list[Candidate] = field(default_factory=list)
    memory: ExhaustedMemory = field(default_factory=ExhaustedMemory)
    best: Optional[ScoredCircle] = None
    cycle: int = 0

    @property
    def dim(self) -> int:
        return len(self.low)

    def best_j(self) -> float:
        return 1.0 if self.best is None else self.best.j

    def _new_candidate(self, pos: np.ndarray) -> Candidate:
        payload, j = self.evaluate(pos)
        cand = Candidate(pos=pos, circle=payload, j_value=float(j))
        self._consider(cand)
        return cand

    def _random_position(self) -> np.ndarray:
        return self.low + self.rng.random(self.dim) * (self.high - self.low)

    def _consider(self, cand: Candidate) -> None:
        if cand.circle is not None and cand.j_value < self.best_j():
            self.best = ScoredCircle(cand.circle, cand.j_value)


def init_population(cfg: AbcConfig, evaluate: Evaluate, bounds: Optional[Sequence] = None) -> AbcRun:
    """Scatter ``colony_size`` sources uniformly inside the bounds and evaluate them."""
    bounds = cfg.bounds if cfg.bounds is not None else bounds
    if bounds is None:
        raise ValueError("no parameter bounds given")
    b = np.asarray(bounds, dtype=np.float64)
    run = AbcRun(
        cfg=cfg,
        evaluate=evaluate,
        low=b[:, 0].copy(),
        high=b[:, 1].copy(),
        rng=np.random.Generator(np.random.PCG64(cfg.seed)),
        memory=ExhaustedMemory(cap=cfg.memory_cap),
    )
    run.population = [run._new_candidate(run._random_position()) for _ in range(cfg.colony_size)]
    return run


def _neighbor_move(run: AbcRun, i: int) -> bool:
    """Perturb one parameter of source ``i`` against a random partner; greedy keep."""
    pop = run.population
    rng = run.rng
    j = int(rng.integers(run.dim))
    k = int(rng.integers(len(pop) - 1))
    if k >= i:
        k += 1
    phi = rng.uniform(-1.0, 1.0)

    src = pop[i]
    v = src.pos.copy()
    v[j] = min(max(v[j] + phi * (v[j] - pop[k].pos[j]), run.low[j]), run.high[j])
    payload, jv = run.evaluate(v)
    if fitness(jv) > src.fit:
        cand = Candidate(pos=v, circle=payload, j_value=float(jv))
        pop[i] = cand
        run._consider(cand)
        return True
    src.trials += 1
    return False


def employed_phase(run: AbcRun) -> AbcRun:
    for i in range(len(run.population)):
        _neighbor_move(run, i)
    return run


def selection_probabilities(run: AbcRun) -> np.ndarray:
    """Fitness-proportional onlooker selection probabilities."""
    fit = np.array([c.fit for c in run.population])
    return fit / fit.sum()


def onlooker_phase(run: AbcRun) -> AbcRun:
    n = len(run.population)
    cum = np.cumsum([c.fit for c in run.population])
    for _ in range(n):
        u = run.rng.random() * cum[-1]
        i = min(int(np.searchsorted(cum, u, side="right")), n - 1)
        _neighbor_move(run, i)
    return run


def scout_phase(run: AbcRun) -> AbcRun:
    """Move exhausted sources to memory and re-seed them at random."""
    for i, cand in enumerate(run.population):
        if cand.trials >= run.cfg.limit:
            run.memory.add(cand.circle, cand.j_value)
            run.population[i] = run._new_candidate(run._random_position())
    return run


def run_abc(
    cfg: AbcConfig,
    evaluate: Evaluate,
    bounds: Optional[Sequence] = None,
    observer: Optional[Observer] = None,
) -> AbcRun:
    """Full optimization: init, then ``cycles`` rounds of employed, onlooker, scout.

    ``observer(run, phase)`` is called after init (``"init"``) and after each
    phase (``"employed"``, ``"onlooker"``, ``"scout"``).
    """
    run = init_population(cfg, evaluate, bounds)
    if observer:
        observer(run, "init")
    for _ in range(cfg.cycles):
        for name, phase in (("employed", employed_phase), ("onlooker", onlooker_phase), ("scout", scout_phase)):
            phase(run)
            if observer:
                observer(run, name)
        run.cycle += 1
    return run


def run_detection(
    cfg: AbcConfig,
    edges: EdgeMap,
    rmin: float = 1.0,
    rmax: float = float("inf"),
    observer: Optional[Observer] = None,
) -> tuple[Optional[ScoredCircle], ExhaustedMemory]:
    """Optimize the circle objective over ``edges``; returns (best, memory)."""
    objective = CircleObjective(edges, rmin, rmax)
    run = run_abc(cfg, objective, objective.bounds, observer)
    return run.best, run.memory
