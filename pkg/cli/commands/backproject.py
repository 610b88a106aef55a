from __future__ import annotations

import argparse
import math
from pathlib import Path

from cli.commands.base_command import BaseCommand
from cli.logging_utils import stage
from cli.validator import Validator
from controllers.dataset_controller import DatasetController
from controllers.metric import back_projection_error
from controllers.workers import ordered_map


class BackprojectCommand(BaseCommand):
    name = "backproject"
    help = "RMSE between the downsampled SR images and their LR inputs"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--sr-dir", default=None)
        parser.add_argument("--lr-dir", default=None)
        parser.add_argument("--scale", type=Validator.int_at_least(2), default=4)
        parser.add_argument("--kernel", choices=("box", "bicubic"), default="bicubic")
        parser.add_argument("--output", default="backproject.csv")

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "sr_dir", "lr_dir")
        with stage("load"):
            sets = DatasetController().load_sets([Path(args.sr_dir), Path(args.lr_dir)])

        with stage("backproject"):
            errors = ordered_map(
                lambda item: back_projection_error(item[1][0], item[1][1], args.scale, args.kernel),
                sets,
                args.threads,
            )
        mean = math.fsum(errors) / len(errors)

        manifest = self.manifest(
            args,
            config={"scale": args.scale, "kernel": args.kernel},
            inputs={"lr_dir": str(args.lr_dir), "sr_dir": str(args.sr_dir), "images": [s for s, _ in sets]},
            outputs={"csv": args.output},
        )
        rows = [["image", stem, err] for (stem, _), err in zip(sets, errors)]
        rows.append(["mean", "", mean])
        self.store(args, manifest).write_csv(args.output, ["kind", "image", "rmse"], rows)
        print(mean)
        return 0
