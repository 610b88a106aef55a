# cli/commands/sweep.py
from __future__ import annotations

import argparse
import logging
from typing import Any, Callable, Dict, List, Tuple

from pydantic import ValidationError

from cli.commands.base_command import DatasetCommand
from cli.logging_utils import stage
from cli.validator import Validator
from controllers.distributions import DISTANCES
from controllers.errors import InvalidParameterError, SrdmError
from controllers.imageio import PIXEL_OFFSET_NAMES, resolve_pixel_offset
from controllers.metric import Triple, compute_metric, metric_with_subsampling
from controllers.report_store import fmt_float
from models.grouping_model import GROUPING_MODES
from models.metric_model import MetricConfig

log = logging.getLogger(__name__)

DEFAULT_SWEEPS: Dict[str, List[str]] = {
    "r": [str(r) for r in range(13, 36, 2)],
    "ngroups": ["50", "100", "200", "500", "1000"],
    "pixel": list(PIXEL_OFFSET_NAMES),
    "distance": ["wasserstein", "tv", "js"],
    "nsamples": ["500", "1000", "2000", "3000"],
    "grouping": list(GROUPING_MODES),
}


def _choice(options) -> Callable[[str], str]:
    def _conv(text: str) -> str:
        if text not in options:
            raise argparse.ArgumentTypeError(f"{text!r} not in {', '.join(options)}")
        return text
    return _conv


# swept parameter -> (MetricConfig field, value converter)
_FIELDS: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "r": ("patch_size", Validator.odd_int),
    "ngroups": ("n_groups", Validator.n_groups),
    "pixel": ("pixel_offset", Validator.pixel_offset),
    "distance": ("distance", _choice(DISTANCES)),
    "nsamples": ("", Validator.positive_int),
    "grouping": ("grouping_mode", _choice(GROUPING_MODES)),
}

HEADER = ["parameter", "value", "aggregate", "variance", "groups_used", "dropped_groups", "error"]


class SweepCommand(DatasetCommand):
    name = "sweep"
    help = "metric aggregate as one design parameter varies"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        s = parser.add_argument_group("sweep")
        s.add_argument("--vary", choices=tuple(DEFAULT_SWEEPS), default=None)
        s.add_argument("--values", type=Validator.value_list, default=None,
                       help="comma-separated values (default: the standard range of --vary)")
        s.add_argument("--repetitions", type=Validator.positive_int, default=10,
                       help="subsampling repetitions for --vary nsamples")
        s.add_argument("--output", default="sweep.csv")

    def _convert(self, vary: str, values: List[str]) -> List[Any]:
        conv = _FIELDS[vary][1]
        out = []
        for v in values:
            try:
                out.append(conv(v))
            except argparse.ArgumentTypeError as e:
                raise InvalidParameterError(f"--values for {vary}: {e}") from None
        return out

    def _one(self, vary: str, value: Any, base: MetricConfig, triples: List[Triple], args) -> List[Any]:
        field = _FIELDS[vary][0]
        try:
            if vary == "nsamples":
                res = metric_with_subsampling(triples, base, value, args.repetitions,
                                              seed=args.seed, threads=args.threads)
                return [res.mean, res.variance, len(res.groups_used), None, None]
            if vary == "pixel":
                value = resolve_pixel_offset(value, base.scale)
            cfg = MetricConfig.model_validate({**base.model_dump(), field: value})
            report = compute_metric(triples, cfg, threads=args.threads)
            return [report.aggregate, None, len(report.per_group), report.dropped_groups, None]
        except (SrdmError, ValidationError) as e:
            msg = e.detail if isinstance(e, SrdmError) else str(e.errors()[0]["msg"])
            log.warning("sweep %s=%s failed: %s", vary, value, msg)
            return [None, None, None, None, msg]

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "vary")
        texts = args.values or DEFAULT_SWEEPS[args.vary]
        values = self._convert(args.vary, texts)
        base = self.metric_config(args)
        with stage("load"):
            stems, triples = self.load_triples(args)

        rows = []
        for text, value in zip(texts, values):
            with stage(f"{args.vary}={text}"):
                rows.append([args.vary, text] + self._one(args.vary, value, base, triples, args))

        config = base.model_dump(mode="json")
        config.update({"vary": args.vary, "values": list(texts), "repetitions": args.repetitions})
        manifest = self.manifest(
            args, config=config,
            inputs={**self.input_dirs(args), "images": stems},
            outputs={"csv": args.output},
        )
        self.store(args, manifest).write_csv(args.output, HEADER, rows)
        for row in rows:
            print(f"{row[1]}\t{fmt_float(row[2]) or row[6]}")
        return 0
