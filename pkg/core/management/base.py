import json
import math

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.services.optimize import CapExceededError
from core.services.params import STRATEGIES, STUBBORN, DomainError, ModelParams, parse_fraction

DOMAIN_EXIT = 2
CAP_EXIT = 3


def jsonable(value):
    if isinstance(value, dict):
        return {key: jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return None
    return value


def format_value(value, digits=6):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.{digits}f}"
    return str(value)


class AnalysisCommand(BaseCommand):
    """Base for the toolkit commands: global --json/--seed/--workers and exit codes."""

    def add_arguments(self, parser):
        parser.add_argument("--json", action="store_true", dest="as_json", help="Print the result as JSON.")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--workers", type=int, default=None)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def add_model_arguments(self, parser, strategy=True):
        parser.add_argument("--alpha", required=True, help="Adversary hash fraction, e.g. 0.35 or 1/3.")
        parser.add_argument("--gamma", required=True, help="Fraction of honest power mining on a matched block.")
        if strategy:
            parser.add_argument("--strategy", default=STUBBORN, help=f"One of {', '.join(STRATEGIES)}.")

    def model_params(self, options):
        return ModelParams(parse_fraction(options["alpha"]), parse_fraction(options["gamma"]))

    def handle(self, *args, **options):
        if options.get("seed") is None:
            options["seed"] = settings.FORKRISK_DEFAULT_SEED
        if options.get("workers") is None:
            options["workers"] = settings.FORKRISK_WORKERS
        try:
            result = self.run(options)
        except DomainError as exc:
            raise CommandError(str(exc), returncode=DOMAIN_EXIT) from exc
        except CapExceededError as exc:
            raise CommandError(str(exc), returncode=CAP_EXIT) from exc
        if result is None:
            return
        if options["as_json"]:
            self.stdout.write(json.dumps(jsonable(result), indent=2))
        else:
            for line in self.render(result):
                self.stdout.write(line)
        self.after_output(result, options)

    def run(self, options):
        raise NotImplementedError

    def render(self, result):
        width = max(len(key) for key in result)
        for key, value in result.items():
            yield f"{key.ljust(width)}  {format_value(value)}"

    def after_output(self, result, options):
        pass
