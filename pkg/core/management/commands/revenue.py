from core.management.base import AnalysisCommand, format_value
from core.services.analytic import normalized_ratio, revenue
from core.services.params import STEALTH, STUBBORN, check_strategy, format_level, parse_level


def report_fields(params, strategy, level):
    report = revenue(params, strategy, level)
    return {
        "ratio": report.ratio,
        "normalized_ratio": normalized_ratio(report, params),
        "successful_blocks": report.successful_blocks,
        "unsuccessful_adversarial_blocks": report.unsuccessful_adversarial_blocks,
        "total_unsuccessful_blocks": report.total_unsuccessful_blocks,
    }


class Command(AnalysisCommand):
    help = "Revenue ratio of a stubborn or stealth attack at a fixed level."

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument("--level", required=True, help="Stubbornness level, integer >= 1 or inf.")
        parser.add_argument("--compare", action="store_true", help="Show stubborn and stealth side by side.")

    def run(self, options):
        params = self.model_params(options)
        level = parse_level(options["level"])
        result = {"alpha": params.alpha, "gamma": params.gamma, "level": format_level(level)}
        if options["compare"]:
            result[STUBBORN] = report_fields(params, STUBBORN, level)
            result[STEALTH] = report_fields(params, STEALTH, level)
            return result
        strategy = check_strategy(options["strategy"])
        result["strategy"] = strategy
        result.update(report_fields(params, strategy, level))
        return result

    def render(self, result):
        if STUBBORN not in result:
            yield from super().render(result)
            return
        yield f"alpha={format_value(result['alpha'])} gamma={format_value(result['gamma'])} level={result['level']}"
        yield f"{'':32}{STUBBORN:>12}{STEALTH:>12}"
        for key in result[STUBBORN]:
            left = format_value(result[STUBBORN][key])
            right = format_value(result[STEALTH][key])
            yield f"{key:32}{left:>12}{right:>12}"
