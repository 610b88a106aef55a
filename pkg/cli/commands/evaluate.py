# cli/commands/evaluate.py
from __future__ import annotations

import argparse
import logging

from cli.commands.base_command import DatasetCommand
from cli.logging_utils import stage
from controllers.metric import compute_metric_run

log = logging.getLogger(__name__)


class EvaluateCommand(DatasetCommand):
    name = "evaluate"
    help = "score SR images against HR ground truth with the grouped distribution metric"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        o = parser.add_argument_group("outputs")
        o.add_argument("--report-name", default="report", help="base name of the JSON / CSV report")
        o.add_argument("--grouping-out", default=None, help="also export the fitted grouping as JSON")

    def run(self, args: argparse.Namespace) -> int:
        config = self.metric_config(args)
        with stage("load"):
            stems, triples = self.load_triples(args)

        with stage("metric"):
            run = compute_metric_run(triples, config, threads=args.threads)
        report = run.report

        outputs = {"json": f"{args.report_name}.json", "csv": f"{args.report_name}.csv"}
        if args.grouping_out and run.grouping is not None:
            outputs["grouping"] = args.grouping_out
        manifest = self.manifest(
            args,
            config=config.model_dump(mode="json"),
            inputs={**self.input_dirs(args), "images": stems},
            outputs=outputs,
        )
        store = self.store(args, manifest)

        with stage("write"):
            doc = report.model_dump(mode="json", exclude={"manifest"})
            if report.per_image is not None:
                for im in doc["per_image"]:
                    im["name"] = stems[im["image_id"]]
            store.write_json(outputs["json"], doc)

            per_image = report.per_image is not None
            header = (["image"] if per_image else []) + ["group", "gt_count", "gen_count", "distance"]
            rows = [
                ([stems[g.image_id]] if per_image else []) + [g.group, g.gt_count, g.gen_count, g.distance]
                for g in report.per_group
            ]
            store.write_csv(outputs["csv"], header, rows)

            if "grouping" in outputs:
                store.write_json(outputs["grouping"], run.grouping.export_dict())
            elif args.grouping_out:
                log.warning("--grouping-out ignored: per-image mode fits one grouping per image")

        log.info("aggregate %s over %d groups (%d dropped)", report.aggregate,
                 len(report.per_group), report.dropped_groups)
        print(report.aggregate)
        return 0
