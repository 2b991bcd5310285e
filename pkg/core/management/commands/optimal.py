from django.conf import settings

from core.management.base import AnalysisCommand
from core.services.analytic import normalized_ratio
from core.services.optimize import max_profitable_level, optimal_level, safe_confirmation_depth
from core.services.params import check_strategy, format_level


class Command(AnalysisCommand):
    help = "Revenue-maximising level (L* or S*) and the largest level still beating honest mining."

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument("--cap", type=int, default=None, help="Largest level the scan may visit.")

    def run(self, options):
        params = self.model_params(options)
        strategy = check_strategy(options["strategy"])
        cap = options["cap"] or settings.FORKRISK_SCAN_CAP
        best = optimal_level(params, strategy, cap)
        return {
            "alpha": params.alpha,
            "gamma": params.gamma,
            "strategy": strategy,
            "best_level": format_level(best.best_level),
            "best_ratio": best.best_ratio,
            "normalized_ratio": normalized_ratio(best.best_ratio, params),
            "max_profitable_level": format_level(max_profitable_level(params, strategy, cap)),
            "method": best.method,
            "iterations": best.iterations,
            "safe_confirmation_depth": format_level(safe_confirmation_depth(params, strategy, cap)),
        }
