"""Ordinal voting rules, deterministic and randomized.

Every rule is a pure function from a profile to a :class:`Lottery`
(deterministic rules return a point mass). All ties break toward the lowest
alternative index, and sequential rules process agents in ascending index
order, so outcomes are reproducible by construction.

Rules that need full rankings raise ``ValueError`` when handed a top-t
profile; ``plurality`` and ``random_dictatorship`` accept both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    Lottery,
    Profile,
    TopTProfile,
    plurality_scores,
    restrict_profile,
)

__all__ = [
    "VetoTrace",
    "TruncatedWeightFunction",
    "plurality",
    "copeland",
    "plurality_veto",
    "pruned_plurality_veto",
    "random_dictatorship",
    "harmonic_rule",
    "truncated_harmonic",
    "truncated_weights",
    "top_t_det_rule",
    "top_t_truncated_harmonic",
    "mix",
    "harmonic_number",
]


def harmonic_number(k: int) -> float:
    """The k-th harmonic number, 1 + 1/2 + ... + 1/k."""
    return float(sum(1.0 / r for r in range(1, k + 1)))


def _require_full(p, rule_name: str) -> Profile:
    if isinstance(p, TopTProfile):
        raise ValueError(f"{rule_name} requires full rankings, got a top-t profile")
    return p


@dataclass(frozen=True)
class VetoTrace:
    """Audit record of one veto-by-veto elimination run.

    ``events`` holds one (agent, vetoed alternative, score after the veto)
    triple per agent in processing order; scores never go negative and the
    winner is the target of the final veto.
    """

    initial_scores: tuple[int, ...]
    events: tuple[tuple[int, int, int], ...]
    winner: int


def plurality(p: Profile | TopTProfile) -> Lottery:
    """Point mass on the alternative ranked first most often."""
    return Lottery.point_mass(p.m, int(np.argmax(plurality_scores(p))))


def copeland(p: Profile) -> Lottery:
    """Point mass on the alternative with the most pairwise wins.

    A pairwise win counts 1, a pairwise tie 1/2.
    """
    p = _require_full(p, "copeland")
    pos = p.positions
    score = np.zeros(p.m)
    for x in range(p.m):
        for y in range(x + 1, p.m):
            wins_x = int((pos[:, x] < pos[:, y]).sum())
            wins_y = p.n - wins_x
            if wins_x > wins_y:
                score[x] += 1.0
            elif wins_y > wins_x:
                score[y] += 1.0
            else:
                score[x] += 0.5
                score[y] += 0.5
    return Lottery.point_mass(p.m, int(np.argmax(score)))


def plurality_veto(p: Profile) -> tuple[Lottery, VetoTrace]:
    """Seed scores with plurality counts, then let each agent veto.

    Alternatives start with their plurality scores; those at zero are
    eliminated immediately. Agents then act once each in ascending index
    order, decrementing the score of their least-preferred surviving
    alternative; an alternative is eliminated when its score reaches zero.
    Scores total n against n vetoes, so the final veto zeroes the last
    survivor, which wins.
    """
    p = _require_full(p, "plurality_veto")
    scores = plurality_scores(p).astype(np.int64)
    alive = scores > 0
    events: list[tuple[int, int, int]] = []
    target = -1
    for i, r in enumerate(p.rankings):
        target = next(x for x in reversed(r.order) if alive[x])
        scores[target] -= 1
        if scores[target] == 0:
            alive[target] = False
        events.append((i, int(target), int(scores[target])))
    trace = VetoTrace(
        initial_scores=tuple(int(s) for s in plurality_scores(p)),
        events=tuple(events),
        winner=int(target),
    )
    return Lottery.point_mass(p.m, trace.winner), trace


def pruned_plurality_veto(p: Profile, eps: float = 1.0) -> Lottery:
    """Drop rarely-top alternatives, then run the veto phase on the rest.

    Keeps alternatives whose plurality score is at least eps*n/((6+eps)*m);
    the plurality winner always clears that bar, so the restriction is never
    empty. The veto winner is mapped back to original indices.
    """
    p = _require_full(p, "pruned_plurality_veto")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    scores = plurality_scores(p)
    threshold = eps * p.n / ((6.0 + eps) * p.m)
    keep = [x for x in range(p.m) if scores[x] >= threshold - 1e-9]
    sub, index_map = restrict_profile(p, keep)
    _, trace = plurality_veto(sub)
    return Lottery.point_mass(p.m, index_map[trace.winner])


def random_dictatorship(p: Profile | TopTProfile) -> Lottery:
    """Each alternative wins with probability proportional to its top count."""
    return Lottery(plurality_scores(p) / p.n)


def harmonic_rule(p: Profile) -> Lottery:
    """Sample an agent uniformly, then their rank-r choice with odds 1/r.

    Equivalently, alternative y gets probability mean over agents of
    1/(H_m * rank_i(y)); every alternative keeps positive probability, which
    is what makes the rule's worst-case cost blow up when everyone agrees
    some alternative is last.
    """
    p = _require_full(p, "harmonic_rule")
    h_m = harmonic_number(p.m)
    weights = 1.0 / (h_m * (p.positions + 1.0))
    return Lottery(weights.mean(axis=0))


@dataclass(frozen=True, eq=False)
class TruncatedWeightFunction:
    """Per-agent harmonic weights truncated at an anchor alternative.

    Agent i gives weight 1/(H_m * rank_i(y)) to each y they rank strictly
    above the anchor, the leftover mass to the anchor itself, and zero below;
    each row sums to one. ``w_plus(y)`` aggregates a column across agents.
    """

    anchor: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2:
            raise ValueError("weights must be an (n, m) grid")
        if (w < -1e-12).any() or (w > 1.0 + 1e-12).any():
            raise ValueError("weights must lie in [0, 1]")
        rows = w.sum(axis=1)
        if np.abs(rows - 1.0).max(initial=0.0) > 1e-9:
            raise ValueError("each agent's weights must sum to 1")
        w = np.clip(w, 0.0, 1.0)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "anchor", int(self.anchor))

    def w_plus(self, y: int) -> float:
        return float(self.weights[:, y].sum())


def truncated_weights(p: Profile, anchor: int) -> TruncatedWeightFunction:
    """Harmonic weights truncated at ``anchor`` (see TruncatedWeightFunction)."""
    p = _require_full(p, "truncated_weights")
    if not (0 <= anchor < p.m):
        raise ValueError(f"anchor {anchor} out of range for m={p.m}")
    h_m = harmonic_number(p.m)
    w = np.zeros((p.n, p.m))
    for i, r in enumerate(p.rankings):
        cut = r.order.index(anchor)
        for rank0, y in enumerate(r.order[:cut]):
            w[i, y] = 1.0 / (h_m * (rank0 + 1))
        w[i, anchor] = 1.0 - w[i].sum()
    return TruncatedWeightFunction(anchor=anchor, weights=w)


def truncated_harmonic(p: Profile, eps: float = 1.0) -> Lottery:
    """Anchor on the veto winner, spread eps/6 of the harmonic mass above it.

    Each agent gives probability eps/(6 * H_m * rank) to every alternative
    they rank strictly above the anchor and the remainder to the anchor, so
    the anchor keeps probability at least 1 - eps/6. Requires 0 < eps < 6.
    """
    p = _require_full(p, "truncated_harmonic")
    if not (0.0 < eps < 6.0):
        raise ValueError(f"eps must lie strictly between 0 and 6, got {eps}")
    _, trace = plurality_veto(p)
    h_m = harmonic_number(p.m)
    rows = np.zeros((p.n, p.m))
    for i, r in enumerate(p.rankings):
        cut = r.order.index(trace.winner)
        for rank0, y in enumerate(r.order[:cut]):
            rows[i, y] = eps / (6.0 * h_m * (rank0 + 1))
        rows[i, trace.winner] = 1.0 - rows[i].sum()
    return Lottery(rows.mean(axis=0))


BaseTopKRule = Callable[[tuple[tuple[int, ...], ...], int], int]


def _restricted_plurality_veto(prefixes: tuple[tuple[int, ...], ...], m_sub: int) -> int:
    """Veto phase on ragged prefix ballots over ``m_sub`` alternatives.

    Completion convention for partial ballots: an agent's least-preferred
    surviving alternative is the highest-index survivor absent from their
    prefix; only if every survivor is ranked do they veto their true
    least-preferred ranked survivor.
    """
    if any(len(pre) == 0 for pre in prefixes):
        raise ValueError("every agent needs a nonempty prefix")
    scores = [0] * m_sub
    for pre in prefixes:
        scores[pre[0]] += 1
    alive = [s > 0 for s in scores]
    target = -1
    for pre in prefixes:
        ranked = set(pre)
        unranked_alive = [x for x in range(m_sub) if alive[x] and x not in ranked]
        if unranked_alive:
            target = max(unranked_alive)
        else:
            target = next(x for x in reversed(pre) if alive[x])
        scores[target] -= 1
        if scores[target] == 0:
            alive[target] = False
    return target


def top_t_det_rule(p: TopTProfile, base_rule: BaseTopKRule | None = None) -> Lottery:
    """Deterministic winner from top-t ballots.

    With t at most m/2 the plurality winner is returned outright. Otherwise
    alternatives with plurality score at least n/(2m) form the shortlist; if
    the shortlist has fewer than 2(m-t+1) members its max-plurality member
    wins, and otherwise the ballots are restricted to the shortlist and a
    pluggable base rule picks the winner from the (now nearly complete)
    restricted ballots. The default base rule is the restricted veto phase.
    """
    if not isinstance(p, TopTProfile):
        raise ValueError("top_t_det_rule expects a top-t profile")
    if base_rule is None:
        base_rule = _restricted_plurality_veto
    scores = plurality_scores(p)
    if 2 * p.t <= p.m:
        return Lottery.point_mass(p.m, int(np.argmax(scores)))
    shortlist = [x for x in range(p.m) if scores[x] >= p.n / (2.0 * p.m) - 1e-9]
    if len(shortlist) < 2 * (p.m - p.t + 1):
        # The overall plurality winner always clears the shortlist bar.
        return Lottery.point_mass(p.m, int(np.argmax(scores)))
    new_of_old = {old: new for new, old in enumerate(shortlist)}
    keep = set(shortlist)
    restricted = tuple(
        tuple(new_of_old[x] for x in pre if x in keep) for pre in p.prefixes
    )
    winner_sub = base_rule(restricted, len(shortlist))
    return Lottery.point_mass(p.m, shortlist[winner_sub])


AnchorRule = Callable[[TopTProfile], int]


def _default_anchor(p: TopTProfile) -> int:
    return int(np.argmax(top_t_det_rule(p).prob))


def top_t_truncated_harmonic(
    p: TopTProfile, anchor_rule: AnchorRule | None = None
) -> Lottery:
    """Truncated harmonic lottery from top-t ballots.

    Each agent gives probability 1/(2 * H_t * rank) to every ranked
    alternative they place strictly above the anchor and the rest to the
    anchor. Agents whose prefix omits the anchor treat all of their ranked
    alternatives as above it. Since the per-agent harmonic mass totals 1/2,
    the anchor always keeps probability at least 1/2.
    """
    if not isinstance(p, TopTProfile):
        raise ValueError("top_t_truncated_harmonic expects a top-t profile")
    anchor = _default_anchor(p) if anchor_rule is None else int(anchor_rule(p))
    if not (0 <= anchor < p.m):
        raise ValueError(f"anchor {anchor} out of range for m={p.m}")
    h_t = harmonic_number(p.t)
    rows = np.zeros((p.n, p.m))
    for i, pre in enumerate(p.prefixes):
        cut = pre.index(anchor) if anchor in pre else len(pre)
        for rank0, y in enumerate(pre[:cut]):
            rows[i, y] = 1.0 / (2.0 * h_t * (rank0 + 1))
        rows[i, anchor] = 1.0 - rows[i].sum()
    return Lottery(rows.mean(axis=0))


def mix(first: Lottery, second: Lottery, beta: float) -> Lottery:
    """Convex combination beta * first + (1 - beta) * second, renormalized."""
    if not (0.0 <= beta <= 1.0):
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if first.m != second.m:
        raise ValueError(f"lottery sizes differ: {first.m} vs {second.m}")
    v = beta * first.prob + (1.0 - beta) * second.prob
    return Lottery(v / v.sum())
