"""Worst-case distortion oracles over all consistent cardinal instances.

Given a lottery and a ballot profile, these oracles compute the supremum of
the lottery's distortion over every cardinal instance consistent with the
ballots, exactly, via linear programming:

* Metric world: variables are the n*m agent-alternative distances. The
  feasible set couples per-agent consistency rows with the quadrilateral
  rows d(i,X) <= d(i,Y) + d(j,Y) + d(j,X), which hold for a bipartite
  distance grid exactly when it extends to a full pseudometric (the
  shortest-path closure provides the extension, and is what witness
  construction uses). Per candidate optimum X* two programs run: a
  degeneracy program that maximizes expected cost inside the unit box with
  the cost of X* pinned to zero (a positive value means the ratio can blow
  up, i.e. unbounded distortion), then the main program with the cost of X*
  normalized to one, whose unboundedness is likewise an unbounded-distortion
  certificate.

* Utilitarian world: the ratio of best welfare to expected welfare is
  linear-fractional in the unit-sum utilities, so it is homogenized the
  standard way: scaled utilities v = s*u with every agent row summing to the
  scale variable s and the expected welfare pinned to one. The program for
  candidate X* is unbounded exactly when the expected welfare can be forced
  to zero while X* keeps positive welfare, which again means unbounded
  distortion.

A brute-force twin for the utilitarian world enumerates the vertices of each
agent's consistency polytope (uniform mass on a rank prefix), at which the
supremum is attained; it shares no code with the LP path and serves as an
independent cross-check.

Top-t profiles are handled by enumerating all ranking completions (budget
gated) with the direct prefix-constraint program as a pre-pass; the two
agree because a grid satisfies the prefix constraints exactly when it is
consistent with some completion. Over budget, the direct program alone is
used.

Deterministic throughout: candidates scan in ascending index order with
strictly-greater updates, so ties resolve to the lowest index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from . import lp
from .core import (
    LOTTERY_TOL,
    DistortionValue,
    Lottery,
    MetricSpace,
    Profile,
    TopTProfile,
    UtilityProfile,
    eval_distortion,
    truncate_profile,
    _consistency_chain,
)

DEFAULT_ENUMERATION_BUDGET = 10**6
DEFAULT_COMPLETION_BUDGET = 10**5
DEGENERACY_TOL = 1e-7

__all__ = [
    "DistortionReport",
    "BudgetExceededError",
    "metric_distortion",
    "utilitarian_distortion",
    "utilitarian_distortion_bruteforce",
    "rule_distortion",
    "exhaustive_worst_case",
    "DEFAULT_ENUMERATION_BUDGET",
    "DEFAULT_COMPLETION_BUDGET",
]


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured budget."""


@dataclass(frozen=True, eq=False)
class DistortionReport:
    """Worst-case value with a machine-checkable certificate.

    For finite values ``witness`` is a consistent cardinal instance on which
    ``eval_distortion`` reproduces ``value`` within 1e-5, and ``arg_optimum``
    is the alternative that is optimal there. For unbounded values a witness
    is attached when one exists as a concrete instance (cost degeneracy);
    otherwise it is None.
    """

    value: DistortionValue
    witness: "MetricSpace | UtilityProfile | None"
    arg_optimum: int

    def to_json(self) -> dict:
        if self.witness is None:
            witness = None
        elif isinstance(self.witness, MetricSpace):
            witness = {
                "points": self.witness.n + self.witness.m,
                "dist": self.witness.dist.tolist(),
            }
        else:
            witness = {"util": self.witness.util.tolist()}
        return {
            "value": self.value.as_json(),
            "arg_optimum": self.arg_optimum,
            "witness": witness,
        }


# ---------------------------------------------------------------------------
# Metric world
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _quadrilateral_rows(n: int, m: int) -> np.ndarray:
    """Rows encoding d(i,X) - d(i,Y) - d(j,Y) - d(j,X) <= 0 for i!=j, X!=Y.

    These are exactly the conditions under which an agent-alternative grid
    extends to a pseudometric on the union, so optimizing over them equals
    optimizing over consistent pseudometrics. Cached per shape: the rows do
    not depend on the profile.
    """
    rows = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for x in range(m):
                for y in range(m):
                    if x == y:
                        continue
                    row = np.zeros(n * m)
                    row[i * m + x] += 1.0
                    row[i * m + y] -= 1.0
                    row[j * m + y] -= 1.0
                    row[j * m + x] -= 1.0
                    rows.append(row)
    if not rows:
        return np.zeros((0, n * m))
    return np.asarray(rows)


def _consistency_rows(p: Profile | TopTProfile) -> np.ndarray:
    """Rows encoding d(i, better) - d(i, worse) <= 0 along each ballot."""
    n, m = p.n, p.m
    rows = []
    for i in range(n):
        for better, worse in _consistency_chain(p, i):
            row = np.zeros(n * m)
            row[i * m + better] = 1.0
            row[i * m + worse] = -1.0
            rows.append(row)
    if not rows:
        return np.zeros((0, n * m))
    return np.asarray(rows)


def _metric_closure(grid: np.ndarray, n: int, m: int) -> MetricSpace:
    """Extend an agent-alternative grid to a full pseudometric.

    Shortest paths in the complete bipartite graph weighted by the grid give
    the tightest extension; entries below 1e-11 are snapped to zero first so
    degenerate witnesses evaluate as exactly degenerate.
    """
    g = np.where(grid < 1e-11, 0.0, grid)
    size = n + m
    dist = np.full((size, size), np.inf)
    np.fill_diagonal(dist, 0.0)
    dist[:n, n:] = g
    dist[n:, :n] = g.T
    for k in range(size):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return MetricSpace(n=n, m=m, dist=dist)


def _metric_report(lot: Lottery, p: Profile | TopTProfile) -> DistortionReport:
    """Worst case over pseudometrics consistent with the given ballots."""
    n, m = p.n, p.m
    nv = n * m
    objective = np.tile(lot.prob, n)  # expected social cost coefficients
    base = np.vstack([_consistency_rows(p), _quadrilateral_rows(n, m)])
    norm_row = np.zeros(nv)
    # filled per candidate: sum_i d(i, x_star)

    best_value = -math.inf
    best_assignment: np.ndarray | None = None
    best_x = 0
    for x_star in range(m):
        norm = norm_row.copy()
        norm[x_star::m] = 1.0

        # Degeneracy probe: can the optimum cost vanish while the lottery
        # still pays? Bounded by the unit box to keep the program finite.
        box = np.eye(nv)
        a_deg = np.vstack([base, box, norm[None, :]])
        rel_deg = ("<=",) * (base.shape[0] + nv) + ("=",)
        rhs_deg = np.concatenate([np.zeros(base.shape[0]), np.ones(nv), [0.0]])
        deg = lp.solve(
            lp.LinearProgram(objective=objective, lhs=a_deg, relations=rel_deg, rhs=rhs_deg)
        )
        if deg.status != lp.OPTIMAL:
            raise RuntimeError(f"degeneracy probe returned {deg.status}")
        if deg.value > DEGENERACY_TOL:
            witness = _metric_closure(deg.assignment.reshape(n, m), n, m)
            return DistortionReport(
                value=DistortionValue.unbounded(), witness=witness, arg_optimum=x_star
            )

        a_main = np.vstack([base, norm[None, :]])
        rel_main = ("<=",) * base.shape[0] + ("=",)
        rhs_main = np.concatenate([np.zeros(base.shape[0]), [1.0]])
        main = lp.solve(
            lp.LinearProgram(objective=objective, lhs=a_main, relations=rel_main, rhs=rhs_main)
        )
        if main.status == lp.UNBOUNDED:
            return DistortionReport(
                value=DistortionValue.unbounded(), witness=None, arg_optimum=x_star
            )
        if main.status != lp.OPTIMAL:
            raise RuntimeError(f"main metric program returned {main.status}")
        if main.value > best_value + 1e-12:
            best_value = main.value
            best_assignment = main.assignment
            best_x = x_star

    witness = _metric_closure(best_assignment.reshape(n, m), n, m)
    return DistortionReport(
        value=DistortionValue.finite(max(best_value, 1.0)),
        witness=witness,
        arg_optimum=best_x,
    )


# ---------------------------------------------------------------------------
# Utilitarian world
# ---------------------------------------------------------------------------


def _utilitarian_report(lot: Lottery, p: Profile | TopTProfile) -> DistortionReport:
    """Worst case over unit-sum utility profiles consistent with the ballots.

    Homogenized program over v = s*u: agent rows sum to s, monotonicity along
    each ballot, expected welfare pinned to 1; maximize the welfare of the
    candidate optimum. Unboundedness certifies unbounded distortion.
    """
    n, m = p.n, p.m
    nv = n * m + 1  # trailing variable is the scale s
    s_col = n * m

    rows = []
    rhs = []
    rel = []
    for i in range(n):
        row = np.zeros(nv)
        row[i * m : (i + 1) * m] = 1.0
        row[s_col] = -1.0
        rows.append(row)
        rel.append("=")
        rhs.append(0.0)
    for i in range(n):
        for better, worse in _consistency_chain(p, i):
            row = np.zeros(nv)
            row[i * m + worse] = 1.0
            row[i * m + better] = -1.0
            rows.append(row)
            rel.append("<=")
            rhs.append(0.0)
    denom = np.zeros(nv)
    denom[:s_col] = np.tile(lot.prob, n)
    rows.append(denom)
    rel.append("=")
    rhs.append(1.0)
    a = np.asarray(rows)
    rhs = np.asarray(rhs)
    rel = tuple(rel)

    best_value = -math.inf
    best_assignment: np.ndarray | None = None
    best_x = 0
    for x_star in range(m):
        objective = np.zeros(nv)
        objective[x_star:s_col:m] = 1.0
        out = lp.solve(lp.LinearProgram(objective=objective, lhs=a, relations=rel, rhs=rhs))
        if out.status == lp.UNBOUNDED:
            return DistortionReport(
                value=DistortionValue.unbounded(), witness=None, arg_optimum=x_star
            )
        if out.status != lp.OPTIMAL:
            raise RuntimeError(f"utilitarian program returned {out.status}")
        if out.value > best_value + 1e-12:
            best_value = out.value
            best_assignment = out.assignment
            best_x = x_star

    s = best_assignment[s_col]
    grid = best_assignment[:s_col].reshape(n, m) / s
    grid = np.clip(grid, 0.0, None)
    grid /= grid.sum(axis=1, keepdims=True)
    return DistortionReport(
        value=DistortionValue.finite(max(best_value, 1.0)),
        witness=UtilityProfile(grid),
        arg_optimum=best_x,
    )


# ---------------------------------------------------------------------------
# Top-t completions
# ---------------------------------------------------------------------------


def _completion_count(p: TopTProfile) -> int:
    return math.factorial(p.m - p.t) ** p.n


def _completions(p: TopTProfile) -> Iterator[Profile]:
    """All full profiles extending each prefix, tails in lexicographic order."""
    tail_choices = [
        list(itertools.permutations(sorted(p.unranked(i)))) for i in range(p.n)
    ]
    for tails in itertools.product(*tail_choices):
        rankings = tuple(
            pre + tail for pre, tail in zip(p.prefixes, tails)
        )
        yield Profile(p.m, rankings)


def _with_completions(
    lot: Lottery,
    p: TopTProfile,
    direct: Callable[[Lottery, Profile | TopTProfile], DistortionReport],
    completion_budget: int,
) -> DistortionReport:
    """Max over completions, with the direct prefix program as a pre-pass.

    The direct program is exact on its own (the prefix constraint set is the
    union of the completion constraint sets), so when the completion count
    exceeds the budget its result is returned; within budget, both run and
    the larger report is kept.
    """
    report = direct(lot, p)
    if report.value.is_unbounded or _completion_count(p) > completion_budget:
        return report
    for full in _completions(p):
        candidate = direct(lot, full)
        if candidate.value.is_unbounded:
            return candidate
        if candidate.value.value > report.value.value + 1e-12:
            report = candidate
    return report


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------


def _check_dims(lot: Lottery, p: Profile | TopTProfile):
    if lot.m != p.m:
        raise ValueError(f"lottery over {lot.m} alternatives, profile has {p.m}")


def metric_distortion(
    lot: Lottery,
    p: Profile | TopTProfile,
    *,
    completion_budget: int = DEFAULT_COMPLETION_BUDGET,
) -> DistortionReport:
    """Worst-case metric distortion of ``lot`` on profile ``p``."""
    _check_dims(lot, p)
    if isinstance(p, TopTProfile):
        return _with_completions(lot, p, _metric_report, completion_budget)
    return _metric_report(lot, p)


def utilitarian_distortion(
    lot: Lottery,
    p: Profile | TopTProfile,
    *,
    completion_budget: int = DEFAULT_COMPLETION_BUDGET,
) -> DistortionReport:
    """Worst-case utilitarian distortion of ``lot`` on profile ``p``."""
    _check_dims(lot, p)
    if isinstance(p, TopTProfile):
        return _with_completions(lot, p, _utilitarian_report, completion_budget)
    return _utilitarian_report(lot, p)


def utilitarian_distortion_bruteforce(
    lot: Lottery,
    p: Profile,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> DistortionReport:
    """Exact utilitarian worst case by enumerating consistency-polytope vertices.

    Each agent's consistent unit-sum utilities form a polytope whose vertices
    put mass 1/k on their top k alternatives; a ratio of linear functions is
    maximized at a vertex of the product, so scanning all m^n combinations is
    exact. Independent of the LP route by construction.
    """
    _check_dims(lot, p)
    if isinstance(p, TopTProfile):
        raise ValueError("brute force handles full rankings only")
    n, m = p.n, p.m
    combos = m**n
    if combos > budget:
        raise BudgetExceededError(
            f"{combos} vertex combinations exceed the budget of {budget}"
        )
    # vertex_welfare[i][k] is agent i's welfare row for the uniform top-(k+1)
    # vertex: entries 1/(k+1) on the top k+1 ranked alternatives.
    vertex_welfare = np.zeros((n, m, m))
    for i, r in enumerate(p.rankings):
        for k in range(m):
            vertex_welfare[i, k, list(r.order[: k + 1])] = 1.0 / (k + 1)

    best_ratio = -math.inf
    best_choice: tuple[int, ...] | None = None
    unbounded_choice: tuple[int, ...] | None = None
    for choice in itertools.product(range(m), repeat=n):
        welfare = vertex_welfare[range(n), choice, :].sum(axis=0)
        num = welfare.max()
        den = float(lot.prob @ welfare)
        if den == 0.0:
            if num > LOTTERY_TOL:
                unbounded_choice = choice
                break
            ratio = 1.0
        else:
            ratio = num / den
        if ratio > best_ratio + 1e-15:
            best_ratio = ratio
            best_choice = choice

    def _grid(choice: tuple[int, ...]) -> UtilityProfile:
        return UtilityProfile(vertex_welfare[range(n), choice, :])

    if unbounded_choice is not None:
        return DistortionReport(
            value=DistortionValue.unbounded(),
            witness=_grid(unbounded_choice),
            arg_optimum=int(
                np.argmax(vertex_welfare[range(n), unbounded_choice, :].sum(axis=0))
            ),
        )
    welfare = vertex_welfare[range(n), best_choice, :].sum(axis=0)
    return DistortionReport(
        value=DistortionValue.finite(max(best_ratio, 1.0)),
        witness=_grid(best_choice),
        arg_optimum=int(np.argmax(welfare)),
    )


Rule = Callable[[Profile | TopTProfile], Lottery]

_WORLDS = ("metric", "utilitarian")


def rule_distortion(
    rule: Rule,
    p: Profile | TopTProfile,
    world: str,
    *,
    completion_budget: int = DEFAULT_COMPLETION_BUDGET,
) -> DistortionReport:
    """Worst-case distortion of ``rule``'s lottery on ``p`` in one world."""
    if world not in _WORLDS:
        raise ValueError(f"world must be one of {_WORLDS}, got {world!r}")
    lot = rule(p)
    oracle = metric_distortion if world == "metric" else utilitarian_distortion
    return oracle(lot, p, completion_budget=completion_budget)


def _all_profiles(n: int, m: int, t: int | None) -> Iterator[Profile | TopTProfile]:
    if t is None:
        per_agent = list(itertools.permutations(range(m)))
        for combo in itertools.product(per_agent, repeat=n):
            yield Profile(m, combo)
    else:
        per_agent = list(itertools.permutations(range(m), t))
        for combo in itertools.product(per_agent, repeat=n):
            yield TopTProfile(m, t, combo)


def exhaustive_worst_case(
    rule: Rule,
    n: int,
    m: int,
    world: str,
    t: int | None = None,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    completion_budget: int = DEFAULT_COMPLETION_BUDGET,
) -> tuple[DistortionValue, Profile | TopTProfile]:
    """Worst case of a rule over every profile of the given shape.

    Enumerates all (m!)^n full profiles, or all (m!/(m-t)!)^n top-t profiles
    when ``t`` is given, in lexicographic order; the first profile attaining
    the maximum is returned as the witness. Raises
    :class:`BudgetExceededError` if the profile count exceeds the budget.
    """
    if world not in _WORLDS:
        raise ValueError(f"world must be one of {_WORLDS}, got {world!r}")
    if t is None:
        count = math.factorial(m) ** n
    else:
        count = (math.factorial(m) // math.factorial(m - t)) ** n
    if count > budget:
        raise BudgetExceededError(f"{count} profiles exceed the budget of {budget}")
    best: DistortionValue | None = None
    witness: Profile | TopTProfile | None = None
    for profile in _all_profiles(n, m, t):
        report = rule_distortion(
            rule, profile, world, completion_budget=completion_budget
        )
        if report.value.is_unbounded:
            return report.value, profile
        if best is None or report.value.value > best.value + 1e-12:
            best = report.value
            witness = profile
    return best, witness
