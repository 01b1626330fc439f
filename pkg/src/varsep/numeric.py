"""Tolerance-based separability tests for black-box expressions.

The derivative-free route: a function f separates across a variable split
exactly when f(a)*f(x) == f(x_I, a_J)*f(a_I, x_J) for an anchor a with
f(a) != 0.  On floats the two products are compared through a scale-free
relative residual, pairs of variables are tested around an anchor sampled
from a grid, and the connected components of the above-tolerance pairs give
the partition.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import expr
from .expr import EvalDomainError, ExprNode
from .partition import Partition, UnionFind

DEFAULT_TOLERANCE = 1e-8
DEGENERACY_FLOOR = 1e-300
DEFAULT_GRID_RANGE = (-1.3, 1.7)
DEFAULT_GRID_COUNT = 9

# A test point is informative only when at least one of the two products in
# the identity rises above the pair's dominant product scale by this factor;
# below it both sides are float cancellation noise and their ratio is
# meaningless.  The ceiling is scale invariant (it rescales with |f|^2).
PRODUCT_NOISE_RELATIVE_FLOOR = 1e-10


class DegenerateAnchorError(Exception):
    """No sampled point keeps |f| above the degeneracy floor."""


class DomainCoverageError(Exception):
    """Too many sample evaluations left the function's domain."""


class PartitionMismatchError(Exception):
    """The requested partition is incompatible with the sampled residuals."""


def linspace(start: float, stop: float, count: int) -> tuple[float, ...]:
    if count < 2:
        raise ValueError("a grid axis needs at least 2 coordinates")
    step = (stop - start) / (count - 1)
    return tuple(start + k * step for k in range(count))


def parse_grid_spec(spec: str) -> tuple[str, tuple[float, ...]]:
    """Parse the CLI grid syntax "var=start:stop:count"."""
    name, eq, rhs = spec.partition("=")
    parts = rhs.split(":")
    if not eq or not name or len(parts) != 3:
        raise ValueError(f"grid spec {spec!r} must look like 'x=-1:1:9'")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise ValueError(f"grid spec {spec!r}: {exc}") from exc
    if count < 2:
        raise ValueError(f"grid spec {spec!r} needs at least 2 coordinates")
    if stop == start:
        raise ValueError(f"grid spec {spec!r} has coinciding endpoints")
    return name.strip(), linspace(start, stop, count)


@dataclass(frozen=True)
class SampleGrid:
    """Per-variable sample coordinates plus an iteration policy.

    strategy "cartesian" walks full coordinate products while they fit the
    budget and falls back to seeded random sampling; strategy "random"
    always samples.  Verdicts are deterministic given the grid and seed.
    """

    coords: tuple[tuple[float, ...], ...]
    strategy: str = "cartesian"
    budget: int = 4096
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("cartesian", "random"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        for axis in self.coords:
            if len(set(axis)) < 2:
                raise ValueError("each variable needs at least 2 distinct coordinates")

    @classmethod
    def default(cls, var_count: int) -> SampleGrid:
        axis = linspace(*DEFAULT_GRID_RANGE, DEFAULT_GRID_COUNT)
        return cls(coords=(axis,) * var_count)

    @classmethod
    def from_specs(
        cls,
        names: Sequence[str],
        specs: Mapping[str, tuple[float, ...]],
        **options,
    ) -> SampleGrid:
        unknown = set(specs) - set(names)
        if unknown:
            raise ValueError(f"grid given for unknown variable(s): {', '.join(sorted(unknown))}")
        default_axis = linspace(*DEFAULT_GRID_RANGE, DEFAULT_GRID_COUNT)
        return cls(coords=tuple(specs.get(n, default_axis) for n in names), **options)

    @property
    def var_count(self) -> int:
        return len(self.coords)

    def _rng(self, *salts: int) -> random.Random:
        mixed = self.seed
        for salt in salts:
            mixed = mixed * 1_000_003 + salt + 1
        return random.Random(mixed)

    def iter_points(self, cap: int, salt: int) -> list[tuple[float, ...]]:
        """Up to `cap` full sample points, exhaustive when they fit."""
        total = math.prod(len(axis) for axis in self.coords)
        if self.strategy == "cartesian" and total <= cap:
            return list(itertools.product(*self.coords))
        rng = self._rng(salt)
        return [tuple(rng.choice(axis) for axis in self.coords) for _ in range(cap)]

    def iter_axis_pairs(self, i: int, j: int, cap: int, salt: int) -> list[tuple[float, float]]:
        """Up to `cap` coordinate pairs from axes i and j, exhaustive when they fit."""
        total = len(self.coords[i]) * len(self.coords[j])
        if self.strategy == "cartesian" and total <= cap:
            return list(itertools.product(self.coords[i], self.coords[j]))
        rng = self._rng(salt, i, j)
        return [
            (rng.choice(self.coords[i]), rng.choice(self.coords[j]))
            for _ in range(cap)
        ]


@dataclass(frozen=True)
class NumericVerdict:
    """Residual matrix, anchor, tolerance, and the derived partition.

    `skipped` counts sample evaluations lost to domain errors; `discarded`
    counts test points dropped as cancellation noise (both products far
    below the pair's dominant scale).
    """

    names: tuple[str, ...]
    residuals: tuple[tuple[float, ...], ...]
    anchor: tuple[float, ...]
    tolerance: float
    verdict: str
    partition: Partition
    evaluated: int
    skipped: int
    discarded: int


@dataclass(frozen=True)
class BlockTable:
    """Sampled factor values for one block: block coordinates -> value."""

    block: tuple[int, ...]
    samples: dict[tuple[float, ...], float]


def margin_residual(
    f: ExprNode,
    names: Sequence[str],
    block: Sequence[int],
    anchor: Sequence[float],
    point: Sequence[float],
    *,
    floor: float = DEGENERACY_FLOOR,
) -> float:
    """Scale-free residual of the separability identity at one test point.

    Returns |f(a)f(x) - f(x_I,a_J)f(a_I,x_J)| / max(|f(a)f(x)|,
    |f(x_I,a_J)f(a_I,x_J)|, floor); zero in exact arithmetic whenever f
    separates across the split (I = `block`, J = the rest).
    """
    inside = set(block)

    def bind(values: Sequence[float]) -> dict[str, float]:
        return {name: float(v) for name, v in zip(names, values)}

    fa = expr.eval_float(f, bind(anchor))
    if abs(fa) <= floor:
        raise DegenerateAnchorError(f"|f(anchor)| = {abs(fa)!r} is below the degeneracy floor")
    fx = expr.eval_float(f, bind(point))
    mixed_i = [point[k] if k in inside else anchor[k] for k in range(len(names))]
    mixed_j = [anchor[k] if k in inside else point[k] for k in range(len(names))]
    f_xi = expr.eval_float(f, bind(mixed_i))
    f_xj = expr.eval_float(f, bind(mixed_j))
    lhs = fa * fx
    rhs = f_xi * f_xj
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)


def _scan_anchor(
    f: ExprNode,
    names: Sequence[str],
    grid: SampleGrid,
    floor: float,
) -> tuple[tuple[float, ...], int, int]:
    best: tuple[float, ...] | None = None
    best_value = 0.0
    evaluated = skipped = 0
    for point in grid.iter_points(grid.budget, salt=0):
        try:
            value = abs(expr.eval_float(f, dict(zip(names, point))))
        except EvalDomainError:
            skipped += 1
            continue
        evaluated += 1
        if value > best_value:
            best, best_value = point, value
    if best is None or best_value <= floor:
        raise DegenerateAnchorError("no sampled grid point keeps |f| above the degeneracy floor")
    return best, evaluated, skipped


def numeric_finest_partition(
    f: ExprNode,
    grid: SampleGrid,
    tol: float = DEFAULT_TOLERANCE,
    *,
    names: Sequence[str] | None = None,
    floor: float = DEGENERACY_FLOOR,
) -> NumericVerdict:
    """Pairwise margin-identity test on sampled points.

    For each unordered pair (i, j) the coordinates i and j vary around the
    anchor (all other variables held at the anchor); an edge is drawn when
    the maximum residual exceeds the tolerance, and the partition is the
    connected components.  Test points whose both products sit below the
    pair's dominant product scale by PRODUCT_NOISE_RELATIVE_FLOOR are
    discarded as cancellation noise before the maximum is taken.  Domain
    errors at sample points are skipped and counted; the test fails if more
    than half of all evaluations skip.
    """
    if names is None:
        names = expr.free_variables(f)
    names = tuple(names)
    n = len(names)
    if grid.var_count != n:
        raise ValueError(f"grid has {grid.var_count} axes, expression has {n} variables")
    if grid.budget < n * (n - 1) // 2:
        raise ValueError(f"budget {grid.budget} is below the {n * (n - 1) // 2} pair tests")
    anchor, evaluated, skipped = _scan_anchor(f, names, grid, floor)
    fa = expr.eval_float(f, dict(zip(names, anchor)))

    cache: dict[tuple[int, float], float] = {}

    def margin_value(axis: int, coordinate: float) -> float:
        # f at the anchor with a single coordinate replaced
        key = (axis, coordinate)
        if key not in cache:
            point = dict(zip(names, anchor))
            point[names[axis]] = coordinate
            cache[key] = expr.eval_float(f, point)
        return cache[key]

    pair_count = n * (n - 1) // 2
    per_pair = max(1, grid.budget // pair_count) if pair_count else grid.budget
    residuals = [[0.0] * n for _ in range(n)]
    discarded = 0
    uf = UnionFind(n)
    for i, j in itertools.combinations(range(n), 2):
        products: list[tuple[float, float]] = []
        for ci, cj in grid.iter_axis_pairs(i, j, per_pair, salt=1):
            full = dict(zip(names, anchor))
            full[names[i]] = ci
            full[names[j]] = cj
            try:
                fx = expr.eval_float(f, full)
                products.append((fa * fx, margin_value(i, ci) * margin_value(j, cj)))
            except EvalDomainError:
                skipped += 1
                continue
            evaluated += 1
        if not products:
            raise DomainCoverageError(f"every sample for pair ({names[i]}, {names[j]}) left the domain")
        ceiling = max(max(abs(lhs), abs(rhs)) for lhs, rhs in products)
        noise = ceiling * PRODUCT_NOISE_RELATIVE_FLOOR
        worst = 0.0
        for lhs, rhs in products:
            scale = max(abs(lhs), abs(rhs))
            if scale <= noise:
                discarded += 1
                continue
            worst = max(worst, abs(lhs - rhs) / max(scale, floor))
        residuals[i][j] = residuals[j][i] = worst
        if worst > tol:
            uf.union(i, j)
    total = evaluated + skipped
    if total and skipped > total / 2:
        raise DomainCoverageError(f"{skipped} of {total} sample evaluations left the domain")
    partition = uf.partition()
    if partition.is_all_singletons:
        verdict = "separable"
    elif partition.block_count == 1 and n > 1:
        verdict = "not separable"
    else:
        verdict = "partition"
    return NumericVerdict(
        names=names,
        residuals=tuple(tuple(row) for row in residuals),
        anchor=anchor,
        tolerance=tol,
        verdict=verdict,
        partition=partition,
        evaluated=evaluated,
        skipped=skipped,
        discarded=discarded,
    )


def numeric_factor_samples(
    f: ExprNode,
    grid: SampleGrid,
    partition: Partition,
    anchor: Sequence[float] | None = None,
    tol: float = DEFAULT_TOLERANCE,
    *,
    names: Sequence[str] | None = None,
    floor: float = DEGENERACY_FLOOR,
) -> tuple[BlockTable, ...]:
    """Sampled factor tables, one per block of the partition.

    Block s is sampled as f with every other block frozen at the anchor; the
    first block carries the f(anchor)^(r-1) normalization so the product of
    the tables reproduces f.  The partition must be compatible with the
    sampled residuals at the given tolerance.
    """
    if names is None:
        names = expr.free_variables(f)
    names = tuple(names)
    verdict = numeric_finest_partition(f, grid, tol, names=names, floor=floor)
    if not partition.is_coarsening_of(verdict.partition):
        raise PartitionMismatchError(
            f"partition {partition.blocks} is incompatible with the sampled "
            f"finest partition {verdict.partition.blocks}"
        )
    if anchor is None:
        anchor = verdict.anchor
    anchor = tuple(float(v) for v in anchor)
    fa = expr.eval_float(f, dict(zip(names, anchor)))
    if abs(fa) <= floor:
        raise DegenerateAnchorError(f"|f(anchor)| = {abs(fa)!r} is below the degeneracy floor")
    blocks = partition.blocks
    per_block = max(1, grid.budget // len(blocks)) if blocks else grid.budget
    tables = []
    for s, block in enumerate(blocks):
        scale = fa ** (1 - len(blocks)) if s == 0 else 1.0
        axes = [grid.coords[i] for i in block]
        total = math.prod(len(a) for a in axes)
        if grid.strategy == "cartesian" and total <= per_block:
            points = list(itertools.product(*axes))
        else:
            rng = grid._rng(2, s)
            points = [tuple(rng.choice(a) for a in axes) for _ in range(per_block)]
        samples: dict[tuple[float, ...], float] = {}
        for coords in points:
            full = dict(zip(names, anchor))
            for i, c in zip(block, coords):
                full[names[i]] = c
            samples[coords] = scale * expr.eval_float(f, full)
        tables.append(BlockTable(block=block, samples=samples))
    return tuple(tables)
