from __future__ import annotations

import itertools

import pytest
from pydantic import ValidationError

from controllers.errors import EmptyInputError, InvalidParameterError
from controllers.rating import calc_e, calc_g, conservative_ranking, glicko_update, rate_tournament
from models.rating_model import PlayerRating, VoteRecord

PUBLISHED = {
    "SRResNet": (1336.408, 64.796),
    "SRGAN": (1494.593, 62.901),
    "Lapsrn": (1194.190, 69.350),
    "RCAN": (1541.713, 63.197),
    "EDSR": (1494.451, 62.911),
    "EPSR": (1534.584, 63.280),
    "ESRGAN(PSNR)": (1526.869, 62.257),
    "ESRGAN(GAN)": (1759.780, 65.555),
    "ProSR(PSNR)": (1438.452, 62.598),
    "ProSR(GAN)": (1665.900, 64.605),
}


def _votes(pairs):
    return [VoteRecord(winner=w, loser=l) for w, l in pairs]


def test_glicko_reference_period():
    player = PlayerRating(method_id="p", rating=1500, deviation=200)
    results = [
        (PlayerRating(method_id="a", rating=1400, deviation=30), 1.0),
        (PlayerRating(method_id="b", rating=1550, deviation=100), 0.0),
        (PlayerRating(method_id="c", rating=1700, deviation=300), 0.0),
    ]
    out = glicko_update(player, results)
    assert out.rating == pytest.approx(1464.1, abs=0.5)
    assert out.deviation == pytest.approx(151.4, abs=0.5)


def test_g_and_e():
    assert calc_g(0.0) == 1.0
    assert calc_e(1500, 1500, 350) == pytest.approx(0.5)
    assert calc_e(1700, 1500, 30) > 0.5


def test_win_then_loss_returns_toward_start():
    opp = PlayerRating(method_id="o")
    p = PlayerRating(method_id="p")
    after_win = glicko_update(p, [(opp, 1.0)])
    after_loss = glicko_update(after_win, [(opp, 0.0)])
    assert after_win.rating > 1500
    assert abs(after_loss.rating - 1500) < abs(after_win.rating - 1500)
    assert after_loss.deviation < after_win.deviation < p.deviation


def test_glicko_update_errors():
    with pytest.raises(EmptyInputError):
        glicko_update(PlayerRating(method_id="p"), [])


def test_player_and_vote_invariants():
    with pytest.raises(ValidationError):
        PlayerRating(method_id="p", deviation=0.0)
    with pytest.raises(ValidationError):
        PlayerRating(method_id="p", deviation=351.0)
    with pytest.raises(ValidationError):
        VoteRecord(winner="a", loser="a")


def test_single_vote():
    ratings = {p.method_id: p for p in rate_tournament(_votes([("A", "B")]), shuffles=3)}
    assert ratings["A"].rating > 1500 > ratings["B"].rating
    assert ratings["A"].deviation < 350


def test_transitive_chain():
    votes = _votes([("A", "B")] * 30 + [("B", "C")] * 30)
    ratings = {p.method_id: p for p in rate_tournament(votes, shuffles=20, seed=7)}
    assert ratings["A"].rating > ratings["B"].rating > ratings["C"].rating
    ranking = conservative_ranking(list(ratings.values()))
    assert [m.method_id for m in ranking] == ["A", "B", "C"]


def test_deterministic_across_runs_and_threads():
    votes = _votes([("A", "B"), ("B", "C"), ("C", "A"), ("A", "C"), ("B", "A")] * 4)
    a = rate_tournament(votes, shuffles=25, seed=3, threads=1)
    b = rate_tournament(votes, shuffles=25, seed=3, threads=4)
    c = rate_tournament(votes, shuffles=25, seed=3)
    assert [(p.rating, p.deviation) for p in a] == [(p.rating, p.deviation) for p in b]
    assert [(p.rating, p.deviation) for p in a] == [(p.rating, p.deviation) for p in c]


def test_batch_periods_ignore_vote_order():
    votes = _votes([("A", "B"), ("B", "C"), ("A", "C")])
    one = rate_tournament(votes, shuffles=1, batch_periods=True)
    many = rate_tournament(votes, shuffles=10, seed=99, batch_periods=True)
    for x, y in zip(one, many):
        assert x.rating == pytest.approx(y.rating)
        assert x.deviation == pytest.approx(y.deviation)


def test_balanced_round_robin_keeps_mean_near_start():
    methods = ["m0", "m1", "m2", "m3", "m4"]
    pairs = []
    for a, b in itertools.combinations(methods, 2):
        pairs += [(a, b), (b, a)]
    ratings = rate_tournament(_votes(pairs * 3), shuffles=10, seed=1)
    mean = sum(p.rating for p in ratings) / len(ratings)
    assert abs(mean - 1500) <= 50


def test_rate_tournament_errors():
    with pytest.raises(EmptyInputError):
        rate_tournament([])
    with pytest.raises(InvalidParameterError):
        rate_tournament(_votes([("A", "B")]), methods=["A"])
    with pytest.raises(InvalidParameterError):
        rate_tournament(_votes([("A", "B")]), shuffles=0)


def test_conservative_ranking_published_table():
    ratings = [PlayerRating(method_id=m, rating=r, deviation=d) for m, (r, d) in PUBLISHED.items()]
    ranking = conservative_ranking(ratings)
    assert [m.method_id for m in ranking[:2]] == ["ESRGAN(GAN)", "ProSR(GAN)"]
    assert ranking[0].lower_bound == pytest.approx(1759.780 - 1.96 * 65.555)
    assert [m.rank for m in ranking] == list(range(1, 11))


def test_conservative_ranking_ties():
    a = PlayerRating(method_id="b", rating=1600, deviation=50)
    b = PlayerRating(method_id="a", rating=1600, deviation=80)
    assert [m.method_id for m in conservative_ranking([b, a])] == ["b", "a"]
    # identical rating and deviation -> lexical id
    c = PlayerRating(method_id="z", rating=1500, deviation=60)
    d = PlayerRating(method_id="y", rating=1500, deviation=60)
    assert [m.method_id for m in conservative_ranking([c, d])] == ["y", "z"]
    assert [m.method_id for m in conservative_ranking([c])] == ["z"]
