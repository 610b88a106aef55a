from __future__ import annotations

import argparse
import math
from typing import Optional

from cli.commands.base_command import BaseCommand
from cli.logging_utils import stage
from controllers.analysis import correlation_report, render_svg
from controllers.errors import InvalidParameterError
from controllers.report_store import read_csv_rows
from models.analysis_model import MethodScoreRow, MethodScoreTable


def _float(path: str, row: int, name: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InvalidParameterError(f"{path}: row {row}: {name} is not a number ({text!r})") from None
    if not math.isfinite(v):
        raise InvalidParameterError(f"{path}: row {row}: {name} is not finite")
    return v


def read_score_table(path: str) -> MethodScoreTable:
    """CSV `method,metric,glicko[,backproj]`."""
    rows = read_csv_rows(path)
    if not rows or not {"method", "metric", "glicko"} <= set(rows[0]):
        raise InvalidParameterError(f"{path}: expected columns method,metric,glicko[,backproj]")
    out = []
    for i, row in enumerate(rows, start=1):
        bp: Optional[float] = None
        if row.get("backproj"):
            bp = _float(path, i, "backproj", row["backproj"])
        out.append(MethodScoreRow(
            method_id=row["method"],
            metric_score=_float(path, i, "metric", row["metric"]),
            glicko=_float(path, i, "glicko", row["glicko"]),
            backproj=bp,
        ))
    return MethodScoreTable(rows=out)


class CorrelateCommand(BaseCommand):
    name = "correlate"
    help = "Pearson correlation and least-squares fit of metric scores against human / fidelity scores"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--scores", default=None, help="CSV with columns method,metric,glicko[,backproj]")
        parser.add_argument("--output", default="correlation.csv")
        parser.add_argument("--svg", action="store_true", help="also write one scatter plot per pair")

    def run(self, args: argparse.Namespace) -> int:
        self.require(args, "scores")
        table = read_score_table(args.scores)
        with stage("correlate"):
            report = correlation_report(table)

        outputs = {"csv": args.output}
        if args.svg:
            for res in report.results:
                outputs[f"svg_{res.y_name}"] = f"{res.x_name}_vs_{res.y_name}.svg"
        manifest = self.manifest(
            args, config={"svg": args.svg}, inputs={"scores": str(args.scores)}, outputs=outputs,
        )
        store = self.store(args, manifest)

        header = ["x", "y", "method", "x_value", "y_value", "pearson", "slope", "intercept", "n", "degenerate"]
        rows = []
        for res in report.results:
            rows.append([res.x_name, res.y_name, "", None, None, res.pearson, res.slope,
                         res.intercept, res.n, str(res.degenerate).lower()])
            rows.extend([res.x_name, res.y_name, p.method_id, p.x, p.y, None, None, None, None, None]
                        for p in res.points)
        store.write_csv(args.output, header, rows)

        if args.svg:
            for res in report.results:
                store.write_svg(outputs[f"svg_{res.y_name}"], render_svg(res, comment=store.manifest_comment()))

        for res in report.results:
            print(f"{res.x_name}\t{res.y_name}\t{res.pearson}")
        return 0
