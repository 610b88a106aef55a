from __future__ import annotations

import argparse

from cli.commands.base_command import BaseCommand
from cli.validator import Validator
from controllers.analysis import DEFAULT_REGION, select_comparison_region
from controllers.imageio import load_image


class RegionCommand(BaseCommand):
    name = "region"
    help = "pick the crop where the methods' outputs disagree most"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--images", nargs="+", default=None, help="one SR image per method, same size")
        parser.add_argument("--region", type=Validator.positive_int, default=DEFAULT_REGION)
        parser.add_argument("--output", default="region.json")

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "images")
        images = [load_image(p) for p in args.images]
        row, col = select_comparison_region(images, args.region)
        manifest = self.manifest(
            args, config={"region": args.region},
            inputs={"images": [str(p) for p in args.images]},
            outputs={"json": args.output},
        )
        self.store(args, manifest).write_json(args.output, {"row": row, "col": col, "region": args.region})
        print(f"{row}\t{col}")
        return 0
