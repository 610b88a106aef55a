from __future__ import annotations

import argparse
import logging
from typing import List, Optional, Tuple

from cli.commands.base_command import BaseCommand
from controllers.distributions import grouped_sliced_loss, gt_for_grad, sliced_w2, sliced_w2_grad
from controllers.errors import EmptyInputError, InvalidParameterError
from controllers.report_store import read_csv_rows

log = logging.getLogger(__name__)


def read_values(path: str) -> Tuple[List[float], Optional[List[int]]]:
    """`value[,group]` rows."""
    rows = read_csv_rows(path)
    if not rows:
        raise EmptyInputError(f"{path}: no values")
    if "value" not in rows[0]:
        raise InvalidParameterError(f"{path}: expected a value column")
    has_group = "group" in rows[0]
    values, groups = [], []
    for i, row in enumerate(rows, start=1):
        try:
            values.append(float(row["value"]))
            if has_group:
                groups.append(int(row["group"]))
        except ValueError:
            raise InvalidParameterError(f"{path}: row {i} is not numeric") from None
    return values, groups if has_group else None


class LossCommand(BaseCommand):
    name = "loss"
    help = "sliced Wasserstein-2 loss between generated and ground-truth samples"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--gen", default=None, help="CSV with a value column (optional group column)")
        parser.add_argument("--gt", default=None, help="CSV with a value column (optional group column)")
        parser.add_argument("--grad-out", default=None, help="write d loss / d gen to this CSV")

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "gen", "gt")
        gen, gen_groups = read_values(args.gen)
        gt, gt_groups = read_values(args.gt)

        grouped = gen_groups is not None and gt_groups is not None
        if (gen_groups is None) != (gt_groups is None):
            log.warning("only one input has a group column; computing the ungrouped loss")
        if grouped:
            loss, grad = grouped_sliced_loss(gen, gt, gen_groups, gt_groups)
        else:
            loss = sliced_w2(gen, gt)
            grad = sliced_w2_grad(gen, gt_for_grad(gt, len(gen))) if args.grad_out else None

        if args.grad_out:
            manifest = self.manifest(
                args, config={"grouped": grouped},
                inputs={"gen": str(args.gen), "gt": str(args.gt)},
                outputs={"csv": args.grad_out},
            )
            self.store(args, manifest).write_csv(
                args.grad_out, ["index", "gradient"], [[i, float(g)] for i, g in enumerate(grad)]
            )
        print(loss)
        return 0
