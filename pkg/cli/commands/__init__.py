from cli.commands.backproject import BackprojectCommand
from cli.commands.correlate import CorrelateCommand
from cli.commands.evaluate import EvaluateCommand
from cli.commands.loss import LossCommand
from cli.commands.rate import RateCommand
from cli.commands.region import RegionCommand
from cli.commands.sweep import SweepCommand

COMMANDS = (
    EvaluateCommand,
    BackprojectCommand,
    RateCommand,
    CorrelateCommand,
    LossCommand,
    SweepCommand,
    RegionCommand,
)
