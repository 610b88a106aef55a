# cli/commands/base_command.py
from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from cli.logging_utils import LOG_LEVELS
from cli.validator import Validator
from controllers.config_file import ConfigFile
from controllers.dataset_controller import DatasetController
from controllers.errors import InvalidParameterError
from controllers.imageio import resolve_pixel_offset
from controllers.metric import Triple
from controllers.report_store import ReportStore
from models.metric_model import MetricConfig
from models.run_model import RunManifest

log = logging.getLogger(__name__)


class BaseCommand:
    """
    Minimal contract for subcommands:
    - add_arguments(parser): declare the subcommand's own options
    - run(args): do the work, write outputs, return the exit code
    Common flags (--seed, --threads, --config, --log-level, --out-dir) are added here.
    """
    name: str = ""
    help: str = ""

    def __init__(self) -> None:
        self.parser: Optional[argparse.ArgumentParser] = None

    def register(self, subparsers: "argparse._SubParsersAction") -> argparse.ArgumentParser:
        p = subparsers.add_parser(self.name, help=self.help, description=self.help)
        self.add_arguments(p)
        g = p.add_argument_group("common")
        g.add_argument("--seed", type=Validator.non_negative_int, default=0, help="random seed (default 0)")
        g.add_argument("--threads", type=Validator.positive_int, default=None,
                       help="worker threads (default: available cores)")
        g.add_argument("--config", default=None, help="key = value settings file; flags override it")
        g.add_argument("--log-level", default="INFO", type=str.upper, choices=LOG_LEVELS)
        g.add_argument("--out-dir", default=".", help="output directory (default .)")
        p.set_defaults(handler=self)
        self.parser = p
        return p

    def add_arguments(self, parser: argparse.ArgumentParser) -> None: ...
    def run(self, args: argparse.Namespace) -> int: ...

    # ---------------- Config file ----------------

    def config_defaults(self, values: Dict[str, str]) -> Dict[str, Any]:
        """Convert file values with the same converters the flags use."""
        assert self.parser is not None
        actions = {a.dest: a for a in self.parser._actions if a.option_strings}
        out: Dict[str, Any] = {}
        unknown = sorted(k for k in values if k not in actions or k in ("config", "help"))
        if unknown:
            raise InvalidParameterError(f"unknown config key(s) for {self.name}: {', '.join(unknown)}")
        for key, raw in values.items():
            action = actions[key]
            try:
                if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                    out[key] = Validator.boolean(raw)
                    continue
                conv = action.type or str
                if action.nargs in ("+", "*"):
                    out[key] = [conv(x) for x in raw.replace(",", " ").split()]
                else:
                    out[key] = conv(raw)
            except argparse.ArgumentTypeError as e:
                raise InvalidParameterError(f"config key {key!r}: {e}") from None
            except ValueError as e:
                raise InvalidParameterError(f"config key {key!r}: {e}") from None
            if action.choices is not None and out[key] not in action.choices:
                raise InvalidParameterError(
                    f"config key {key!r}: {out[key]!r} not in {', '.join(map(str, action.choices))}"
                )
        return out

    def apply_config_file(self, path: str) -> None:
        assert self.parser is not None
        self.parser.set_defaults(**self.config_defaults(ConfigFile.load(path)))

    # ---------------- Shared helpers ----------------

    @staticmethod
    def require(args: argparse.Namespace, *names: str) -> None:
        missing = ["--" + n.replace("_", "-") for n in names if getattr(args, n, None) in (None, "")]
        if missing:
            raise InvalidParameterError(f"missing required option(s): {', '.join(missing)}")

    def manifest(self, args: argparse.Namespace, config: Dict[str, Any],
                 inputs: Optional[Dict[str, Any]] = None, outputs: Optional[Dict[str, str]] = None) -> RunManifest:
        """Everything that determines the output bytes; --threads and --out-dir stay out."""
        return RunManifest(
            subcommand=self.name,
            config=config,
            inputs=inputs or {},
            outputs=outputs or {},
            seed=args.seed,
        )

    @staticmethod
    def store(args: argparse.Namespace, manifest: RunManifest) -> ReportStore:
        return ReportStore(args.out_dir, manifest)


class DatasetCommand(BaseCommand):
    """Subcommands that read matched LR / HR / SR directories and build a MetricConfig."""

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        d = parser.add_argument_group("dataset")
        d.add_argument("--lr-dir", default=None, help="LR inputs; synthesized from HR with --kernel when omitted")
        d.add_argument("--hr-dir", default=None, help="ground-truth HR images")
        d.add_argument("--sr-dir", default=None, help="generated SR images")

        m = parser.add_argument_group("metric")
        m.add_argument("--scale", type=Validator.int_at_least(2), default=4)
        m.add_argument("--patch-size", type=Validator.odd_int, default=13)
        m.add_argument("--stride", type=Validator.positive_int, default=None, help="default: scale")
        m.add_argument("--n-groups", type=Validator.n_groups, default="auto")
        m.add_argument("--min-group-samples", type=Validator.positive_int, default=50)
        m.add_argument("--distance", choices=("wasserstein", "tv", "js", "kl"), default="wasserstein")
        m.add_argument("--grouping", choices=("direct", "projected_fpc", "projected_ones"), default="projected_fpc")
        m.add_argument("--pixel-offset", type=Validator.pixel_offset, default=None,
                       help="center | top-left | bottom-right | dr,dc")
        m.add_argument("--pixel-mode", choices=("single", "block"), default="single")
        m.add_argument("--per-image", action="store_true")
        m.add_argument("--export-histograms", action="store_true")
        m.add_argument("--kernel", choices=("box", "bicubic"), default="bicubic")

    @staticmethod
    def metric_config(args: argparse.Namespace) -> MetricConfig:
        offset = args.pixel_offset
        if offset is not None:
            offset = resolve_pixel_offset(offset, args.scale)
        return MetricConfig(
            scale=args.scale,
            patch_size=args.patch_size,
            stride=args.stride,
            n_groups=args.n_groups,
            min_group_samples=args.min_group_samples,
            distance=args.distance,
            grouping_mode=args.grouping,
            pixel_offset=offset,
            pixel_mode=args.pixel_mode,
            per_image=args.per_image,
            export_histograms=args.export_histograms,
            kernel=args.kernel,
            seed=args.seed,
        )

    @staticmethod
    def input_dirs(args: argparse.Namespace) -> Dict[str, str]:
        dirs = {"hr_dir": str(args.hr_dir), "sr_dir": str(args.sr_dir)}
        if args.lr_dir:
            dirs["lr_dir"] = str(args.lr_dir)
        return dict(sorted(dirs.items()))

    def load_triples(self, args: argparse.Namespace) -> Tuple[List[str], List[Triple]]:
        self.require(args, "hr_dir", "sr_dir")
        dirs = [Path(args.hr_dir), Path(args.sr_dir)]
        if args.lr_dir:
            dirs.insert(0, Path(args.lr_dir))
        sets = DatasetController().load_sets(dirs)
        stems = [stem for stem, _ in sets]
        if args.lr_dir:
            triples = [(lr, gt, gen) for _, (lr, gt, gen) in sets]
        else:
            triples = [(None, gt, gen) for _, (gt, gen) in sets]
        log.info("dataset: %d triple(s)%s", len(triples), "" if args.lr_dir else " (LR synthesized)")
        return stems, triples
