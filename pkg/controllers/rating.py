# controllers/rating.py
"""
Glicko-1 rating of SR methods from pairwise preference votes.

No RD inflation between periods (single session). A pass applies the votes in
a shuffled order; the final rating is the mean over independent shuffles.
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from controllers.errors import EmptyInputError, InvalidParameterError, NumericalError
from controllers.workers import ordered_map
from models.rating_model import INITIAL_DEVIATION, PlayerRating, RankedMethod, VoteRecord

log = logging.getLogger(__name__)

Q = math.log(10) / 400.0
DEFAULT_SHUFFLES = 100


def calc_g(rd: float, q: float = Q) -> float:
    return 1.0 / math.sqrt(1.0 + 3.0 * q * q * rd * rd / (math.pi ** 2))


def calc_e(r: float, rj: float, rdj: float, q: float = Q) -> float:
    return 1.0 / (1.0 + 10.0 ** (-calc_g(rdj, q) * (r - rj) / 400.0))


def glicko_update(
    player: PlayerRating,
    results: Sequence[Tuple[PlayerRating, float]],
    q: float = Q,
) -> PlayerRating:
    """One rating period against `results` = [(opponent, score in {0, 1}), ...]."""
    if not results:
        raise EmptyInputError("glicko update needs at least one result")
    d2_inv = 0.0
    acc = 0.0
    for opp, score in results:
        g = calc_g(opp.deviation, q)
        e = calc_e(player.rating, opp.rating, opp.deviation, q)
        d2_inv += g * g * e * (1.0 - e)
        acc += g * (score - e)
    d2_inv *= q * q
    precision = 1.0 / (player.deviation ** 2) + d2_inv
    rating = player.rating + q / precision * acc
    deviation = math.sqrt(1.0 / precision)
    if not (math.isfinite(rating) and math.isfinite(deviation)) or deviation <= 0.0:
        raise NumericalError(f"non-finite Glicko update for {player.method_id!r}")
    return PlayerRating(method_id=player.method_id, rating=rating, deviation=deviation)


def _check_votes(votes: Sequence[VoteRecord], methods: Iterable[str]) -> List[str]:
    if not votes:
        raise EmptyInputError("no votes")
    known = list(dict.fromkeys(methods))
    ks = set(known)
    unknown = sorted({m for v in votes for m in (v.winner, v.loser) if m not in ks})
    if unknown:
        raise InvalidParameterError(f"votes reference unknown methods: {', '.join(unknown)}")
    return known


def _run_pass(votes: Sequence[VoteRecord], methods: List[str], order: np.ndarray, batch: bool) -> Dict[str, PlayerRating]:
    ratings = {m: PlayerRating(method_id=m) for m in methods}
    if batch:
        games: Dict[str, List[Tuple[PlayerRating, float]]] = {m: [] for m in methods}
        for i in order:
            v = votes[int(i)]
            games[v.winner].append((ratings[v.loser], 1.0))
            games[v.loser].append((ratings[v.winner], 0.0))
        return {m: glicko_update(ratings[m], g) if g else ratings[m] for m, g in games.items()}

    for i in order:
        v = votes[int(i)]
        w, l = ratings[v.winner], ratings[v.loser]
        # both sides see the other's pre-game rating
        ratings[v.winner] = glicko_update(w, [(l, 1.0)])
        ratings[v.loser] = glicko_update(l, [(w, 0.0)])
    return ratings


def rate_tournament(
    votes: Sequence[VoteRecord],
    methods: Optional[Sequence[str]] = None,
    shuffles: int = DEFAULT_SHUFFLES,
    seed: int = 0,
    *,
    batch_periods: bool = False,
    threads: Optional[int] = None,
) -> List[PlayerRating]:
    """
    Mean Glicko ratings over `shuffles` independently permuted passes.
    Each vote is its own rating period unless batch_periods is set, in which
    case a whole pass is a single period.
    """
    if shuffles < 1:
        raise InvalidParameterError("shuffles must be >= 1")
    if methods is None:
        methods = sorted({m for v in votes for m in (v.winner, v.loser)})
    known = _check_votes(votes, methods)
    children = np.random.SeedSequence(seed).spawn(shuffles)

    def _one(ss: np.random.SeedSequence) -> Dict[str, PlayerRating]:
        order = np.random.default_rng(ss).permutation(len(votes))
        return _run_pass(votes, known, order, batch_periods)

    log.info("rating %d methods from %d votes over %d shuffles", len(known), len(votes), shuffles)
    passes = ordered_map(_one, children, threads)
    out = []
    for m in known:
        r = math.fsum(p[m].rating for p in passes) / shuffles
        d = math.fsum(p[m].deviation for p in passes) / shuffles
        out.append(PlayerRating(method_id=m, rating=r, deviation=min(d, INITIAL_DEVIATION)))
    return out


def conservative_ranking(ratings: Sequence[PlayerRating]) -> List[RankedMethod]:
    """Descending by r - 1.96 sigma; ties by higher r, then method id."""
    ordered = sorted(ratings, key=lambda p: (-p.lower_bound, -p.rating, p.method_id))
    return [
        RankedMethod(
            rank=i + 1,
            method_id=p.method_id,
            rating=p.rating,
            deviation=p.deviation,
            lower_bound=p.lower_bound,
        )
        for i, p in enumerate(ordered)
    ]

