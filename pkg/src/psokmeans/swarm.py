"""PSO based K-means: a swarm of candidate centroid sets.

Each particle's position is a full ``k x n_features`` centroid matrix. The
simple variant moves particles with the plain velocity rule; the canonical
variant multiplies the whole update by a constriction coefficient ``chi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .dataset import Metric, as_points
from .kmeans import centroid_shift, lloyd_step, sample_initial_centers, sse_of_centers
from .partition import Partition, repair_empty_clusters

__all__ = [
    "Particle",
    "PsoConfig",
    "PsoResult",
    "Swarm",
    "Variant",
    "clerc_constriction",
    "position_update",
    "pso_kmeans_run",
    "velocity_update_canonical",
    "velocity_update_simple",
]


class Variant(str, enum.Enum):
    SIMPLE = "simple"
    CANONICAL = "canonical"


def clerc_constriction(c1: float, c2: float) -> float:
    """Clerc-Kennedy constriction coefficient for ``phi = c1 + c2 > 4``."""
    phi = c1 + c2
    if not phi > 4:
        raise ValueError(f"constriction needs c1 + c2 > 4, got {phi}")
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    fitness: float = math.inf

    @classmethod
    def at(cls, position: np.ndarray, fitness: float) -> "Particle":
        position = np.array(position, dtype=float)
        return cls(position, np.zeros_like(position), position.copy(), fitness, fitness)


@dataclass
class Swarm:
    particles: List[Particle]
    best_position: np.ndarray
    best_fitness: float

    @classmethod
    def from_particles(cls, particles: List[Particle]) -> "Swarm":
        swarm = cls(particles, particles[0].best_position.copy(), particles[0].best_fitness)
        swarm.update_global_best()
        return swarm

    def update_global_best(self) -> bool:
        """Fold personal bests into the global best in particle order.

        Only a strictly better fitness replaces the incumbent, so ties keep the
        earlier particle. Returns whether the global best moved.
        """
        improved = False
        for p in self.particles:
            if p.best_fitness < self.best_fitness:
                self.best_fitness = p.best_fitness
                self.best_position = p.best_position.copy()
                improved = True
        return improved


def _attraction(p: Particle, gbest: np.ndarray, c1: float, c2: float, r1, r2) -> np.ndarray:
    gbest = np.asarray(gbest, dtype=float)
    if not (p.position.shape == p.velocity.shape == p.best_position.shape == gbest.shape):
        raise ValueError(
            "shape mismatch among position, velocity, personal best and global best: "
            f"{p.position.shape}, {p.velocity.shape}, {p.best_position.shape}, {gbest.shape}"
        )
    for r in (r1, r2):
        r = np.asarray(r)
        if np.any(r < 0) or np.any(r > 1):
            raise ValueError("random scaling factors must lie in [0, 1]")
    return (
        p.velocity
        + c1 * np.asarray(r1) * (p.best_position - p.position)
        + c2 * np.asarray(r2) * (gbest - p.position)
    )


def velocity_update_simple(p: Particle, gbest, c1: float, c2: float, r1, r2) -> np.ndarray:
    """``v + c1 r1 (pbest - x) + c2 r2 (gbest - x)``.

    ``r1`` and ``r2`` may be scalars or arrays shaped like the position.
    """
    return _attraction(p, gbest, c1, c2, r1, r2)


def velocity_update_canonical(p: Particle, gbest, c1: float, c2: float, chi: float, r1, r2) -> np.ndarray:
    """``chi * [v + c1 r1 (pbest - x) + c2 r2 (gbest - x)]``."""
    if not 0 < chi <= 1:
        raise ValueError(f"chi must lie in (0, 1], got {chi}")
    return chi * _attraction(p, gbest, c1, c2, r1, r2)


def position_update(x, v_new) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    v_new = np.asarray(v_new, dtype=float)
    if x.shape != v_new.shape:
        raise ValueError(f"shape mismatch: position {x.shape}, velocity {v_new.shape}")
    return x + v_new


@dataclass
class PsoConfig:
    """Swarm settings. ``c1``/``c2``/``chi`` left as ``None`` take the
    variant's defaults: 2.05/2.05 with the Clerc coefficient for canonical,
    2.0/2.0 for simple.

    ``tol`` stops the run once the mean distance moved by the swarm's
    centroids in one step falls below it; 0 disables the check.
    ``per_coordinate_random`` draws r1, r2 per matrix entry instead of once
    per particle per step.
    """

    k: int
    variant: Variant = Variant.CANONICAL
    n_particles: int = 20
    c1: float = None
    c2: float = None
    chi: float = None
    max_iter: int = 150
    tol: float = 0.0
    metric: Metric = Metric.EUCLIDEAN
    seed: int = 0
    kmeans_refine: bool = False
    per_coordinate_random: bool = False

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.metric = Metric.parse(self.metric)
        default_c = 2.05 if self.variant is Variant.CANONICAL else 2.0
        if self.c1 is None:
            self.c1 = default_c
        if self.c2 is None:
            self.c2 = default_c
        if self.chi is None:
            self.chi = clerc_constriction(self.c1, self.c2) if self.c1 + self.c2 > 4 else 1.0
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be nonnegative")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.variant is Variant.CANONICAL and not 0 < self.chi <= 1:
            raise ValueError(f"canonical PSO needs chi in (0, 1], got {self.chi}")


@dataclass
class PsoResult:
    partition: Partition
    centroids: np.ndarray
    fitness: float
    iterations: int
    history: List[float] = field(default_factory=list)
    swarm: Swarm = field(default=None, repr=False)


def _draw(rng: np.random.Generator, shape, per_coordinate: bool):
    if per_coordinate:
        return rng.random(shape), rng.random(shape)
    r = rng.random(2)
    return r[0], r[1]


def pso_kmeans_run(data, cfg: PsoConfig, observer=None) -> PsoResult:
    """Optimize centroid sets with a global-best swarm.

    Every particle starts on ``k`` distinct data rows with zero velocity.
    Each iteration moves every particle (velocity then position, optionally
    followed by one Lloyd step), scores it by SSE with each point charged to
    its nearest candidate centroid, then refreshes personal and global bests.
    ``history`` holds the global best fitness after each iteration.

    ``observer(iteration, swarm)``, if given, is called after each update;
    tests use it to check invariants along the trajectory.
    """
    pts = as_points(data)
    if cfg.k > pts.shape[0]:
        raise ValueError(f"k={cfg.k} exceeds n_objects={pts.shape[0]}")
    m = cfg.metric
    rng = np.random.default_rng(cfg.seed)

    particles = []
    for _ in range(cfg.n_particles):
        pos = sample_initial_centers(pts, cfg.k, rng)
        particles.append(Particle.at(pos, sse_of_centers(pts, pos, m)))
    swarm = Swarm.from_particles(particles)

    history = []
    iterations = 0
    # Unconstricted swarms can blow up to inf; such particles just score inf.
    with np.errstate(over="ignore", invalid="ignore"):
        for iterations in range(1, cfg.max_iter + 1):
            moved = 0.0
            for p in swarm.particles:
                r1, r2 = _draw(rng, p.position.shape, cfg.per_coordinate_random)
                if cfg.variant is Variant.CANONICAL:
                    v = velocity_update_canonical(p, swarm.best_position, cfg.c1, cfg.c2, cfg.chi, r1, r2)
                else:
                    v = velocity_update_simple(p, swarm.best_position, cfg.c1, cfg.c2, r1, r2)
                x = position_update(p.position, v)
                finite = bool(np.all(np.isfinite(x)))
                if cfg.kmeans_refine and finite:
                    _, x = lloyd_step(pts, x, m)
                moved += centroid_shift(p.position, x, m)
                p.position, p.velocity = x, v
                p.fitness = sse_of_centers(pts, x, m) if finite else math.inf
                if not math.isfinite(p.fitness):
                    p.fitness = math.inf
                if p.fitness < p.best_fitness:
                    p.best_fitness = p.fitness
                    p.best_position = x.copy()
            swarm.update_global_best()
            history.append(swarm.best_fitness)
            if observer is not None:
                observer(iterations, swarm)
            if cfg.tol > 0 and moved / len(swarm.particles) < cfg.tol:
                break

    part, centers = repair_empty_clusters(pts, swarm.best_position, m)
    fitness = sse_of_centers(pts, centers, m)
    return PsoResult(part, centers, fitness, iterations, history, swarm)
