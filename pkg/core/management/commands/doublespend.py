from core.management.base import AnalysisCommand
from core.services.analytic import (
    CombinedRevenueParams,
    breakeven_reward,
    combined_revenue_stealth,
    combined_revenue_stubborn,
    double_spend_probs,
    normalized_ratio,
    revenue,
    service_profitability,
)
from core.services.params import STEALTH, DomainError, check_depth, check_strategy


class Command(AnalysisCommand):
    help = "Double-spending, move-funds and service probabilities for a k-confirmation merchant."

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument("--k", type=int, required=True, help="Confirmation depth.")
        parser.add_argument("--reward", type=float, default=None, help="Value R of each replaced confirmed block.")
        parser.add_argument("--service-value", type=float, default=None, dest="service_value")
        parser.add_argument("--fee", type=float, default=None)

    def run(self, options):
        params = self.model_params(options)
        strategy = check_strategy(options["strategy"])
        k = check_depth(options["k"])
        events = double_spend_probs(params, strategy, k)
        report = revenue(params, strategy, k + 1)
        result = {
            "alpha": params.alpha,
            "gamma": params.gamma,
            "strategy": strategy,
            "k": k,
            "double_spending": events.double_spending,
            "move_funds": events.move_funds,
            "service": events.service,
            "ratio": report.ratio,
            "normalized_ratio": normalized_ratio(report, params),
        }
        if options["reward"] is not None:
            cfg = CombinedRevenueParams(k=k, reward_r=options["reward"])
            result["reward"] = cfg.reward_r
            combined = combined_revenue_stealth if strategy == STEALTH else combined_revenue_stubborn
            result["combined_ratio"] = combined(params, cfg)
            result["breakeven_reward"] = breakeven_reward(params, k, strategy)
        value, fee = options["service_value"], options["fee"]
        if (value is None) != (fee is None):
            raise DomainError("--service-value and --fee must be given together")
        if value is not None:
            result["service_value"] = value
            result["fee"] = fee
            result["profitable"] = service_profitability(params, k, value, fee, strategy)
        return result
