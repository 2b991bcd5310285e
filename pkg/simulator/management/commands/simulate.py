import math

from django.conf import settings
from django.core.management.base import CommandError

from core.management.base import CAP_EXIT, AnalysisCommand
from core.services.analytic import CombinedRevenueParams, combined_terms, double_spend_probs, revenue
from core.services.params import check_depth, check_strategy, format_level, parse_level
from simulator.services.estimate import (
    COMBINED_REWARD,
    METRICS,
    REVENUE_RATIO,
    EventEstimate,
    estimate,
)


def z_score(analytic, estimated):
    if analytic is None or not estimated.std_error or math.isnan(estimated.std_error):
        return None
    return abs(analytic - estimated.mean) / estimated.std_error


def estimate_fields(estimated, analytic):
    return {
        "mean": estimated.mean,
        "std_error": estimated.std_error,
        "analytic": analytic,
        "z_score": z_score(analytic, estimated),
    }


class Command(AnalysisCommand):
    help = "Monte Carlo estimate of an attack metric, compared with its analytic value."

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument("--level", required=True, help="Stubbornness level, integer >= 1 or inf.")
        parser.add_argument("--k", type=int, default=6, help="Confirmation depth.")
        parser.add_argument("--metric", default=REVENUE_RATIO, help=f"One of {', '.join(METRICS)}.")
        parser.add_argument("--cycles", type=int, default=100_000)
        parser.add_argument("--reward", type=float, default=0.0)
        parser.add_argument("--batches", type=int, default=None)
        parser.add_argument("--max-arrivals", type=int, default=None, dest="max_arrivals")

    def run(self, options):
        params = self.model_params(options)
        strategy = check_strategy(options["strategy"])
        level = parse_level(options["level"])
        k = check_depth(options["k"])
        metric = options["metric"]
        estimated = estimate(
            params,
            strategy,
            level,
            k,
            metric,
            options["cycles"],
            options["seed"],
            reward_r=options["reward"],
            workers=options["workers"],
            batches=options["batches"] or settings.FORKRISK_SIM_BATCHES,
            max_arrivals=options["max_arrivals"] or settings.FORKRISK_SIM_MAX_ARRIVALS,
        )
        result = {
            "alpha": params.alpha,
            "gamma": params.gamma,
            "strategy": strategy,
            "level": format_level(level),
            "k": k,
            "metric": metric,
            "cycles": options["cycles"],
            "seed": options["seed"],
        }
        if isinstance(estimated, EventEstimate):
            # the closed forms describe the level-(k+1) attack only
            events = double_spend_probs(params, strategy, k) if level == k + 1 else None
            for name in ("double_spending", "move_funds", "service"):
                analytic = getattr(events, name) if events else None
                result[name] = estimate_fields(getattr(estimated, name), analytic)
            result["truncated_cycles"] = estimated.double_spending.truncated_cycles
            return result
        if metric == COMBINED_REWARD:
            analytic = combined_terms(params, k, strategy).ratio(CombinedRevenueParams(k, options["reward"]).reward_r)
        else:
            analytic = revenue(params, strategy, level).ratio
        result.update(estimate_fields(estimated, analytic))
        result["truncated_cycles"] = estimated.truncated_cycles
        return result

    def render(self, result):
        yield from super().render({key: value for key, value in result.items() if not isinstance(value, dict)})
        for key, value in result.items():
            if isinstance(value, dict):
                yield f"{key}:"
                for line in super().render(value):
                    yield f"  {line}"

    def after_output(self, result, options):
        if result["truncated_cycles"]:
            message = f"{result['truncated_cycles']} cycles truncated at the arrival guard"
            self.stderr.write(self.style.WARNING(message))
            raise CommandError(message, returncode=CAP_EXIT)
