# cli/commands/rate.py
from __future__ import annotations

import argparse
import logging
from typing import List

from cli.commands.base_command import BaseCommand
from cli.logging_utils import stage
from cli.validator import Validator
from controllers.errors import EmptyInputError, InvalidParameterError
from controllers.rating import DEFAULT_SHUFFLES, conservative_ranking, rate_tournament
from controllers.report_store import read_csv_rows
from models.rating_model import VoteRecord

log = logging.getLogger(__name__)


def read_votes(path: str) -> List[VoteRecord]:
    """`winner,loser` rows, one pairwise human judgement each."""
    rows = read_csv_rows(path)
    if rows and not {"winner", "loser"} <= set(rows[0]):
        raise InvalidParameterError(f"{path}: expected columns winner,loser")
    votes = []
    for i, row in enumerate(rows, start=1):
        try:
            votes.append(VoteRecord(winner=row["winner"], loser=row["loser"]))
        except ValueError as e:
            raise InvalidParameterError(f"{path}: vote {i}: {e}") from None
    if not votes:
        raise EmptyInputError(f"{path}: no votes")
    return votes


class RateCommand(BaseCommand):
    name = "rate"
    help = "Glicko ratings from pairwise votes, ranked by the conservative lower bound"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--votes", default=None, help="CSV with columns winner,loser")
        parser.add_argument("--shuffles", type=Validator.positive_int, default=DEFAULT_SHUFFLES)
        parser.add_argument("--batch-periods", action="store_true",
                            help="treat each shuffled pass as one rating period")
        parser.add_argument("--output", default="ratings.csv")

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "votes")
        with stage("load"):
            votes = read_votes(args.votes)
        with stage("rate"):
            ratings = rate_tournament(
                votes, shuffles=args.shuffles, seed=args.seed,
                batch_periods=args.batch_periods, threads=args.threads,
            )
            ranking = conservative_ranking(ratings)

        manifest = self.manifest(
            args,
            config={"shuffles": args.shuffles, "batch_periods": args.batch_periods},
            inputs={"votes": str(args.votes), "n_votes": len(votes)},
            outputs={"csv": args.output},
        )
        self.store(args, manifest).write_csv(
            args.output,
            ["rank", "method", "rating", "deviation", "lower_bound"],
            [[m.rank, m.method_id, m.rating, m.deviation, m.lower_bound] for m in ranking],
        )
        for m in ranking:
            print(f"{m.rank}\t{m.method_id}\t{m.rating:.1f}\t{m.deviation:.1f}")
        return 0
