from fractions import Fraction

from django.conf import settings

from core.management.base import AnalysisCommand, format_value
from core.services.analytic import revenue_stubborn
from core.services.optimize import optimal_l
from core.services.params import DomainError, ModelParams, format_level

SELFISH_ALPHAS = (Fraction(1, 3), 0.35, 0.375, 0.4, 0.425, 0.45, 0.475)
GRID_ALPHAS = (0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)
GRID_GAMMAS = (0.2, 0.4, 0.5, 0.6, 0.8)

OMITTED_NOTE = "Note: MDP-derived comparison columns are not reproduced."


def selfish_table(cap):
    rows = []
    for alpha in SELFISH_ALPHAS:
        params = ModelParams(float(alpha), 0.0)
        best = optimal_l(params, cap)
        rows.append(
            {
                "alpha": float(alpha),
                "rho_2": revenue_stubborn(params, 2).ratio,
                "L_star": format_level(best.best_level),
                "rho_L_star": best.best_ratio,
            }
        )
    return rows


def optimal_grid(cap):
    rows = []
    for alpha in GRID_ALPHAS:
        row = {"alpha": alpha}
        for gamma in GRID_GAMMAS:
            row[f"gamma={gamma}"] = optimal_l(ModelParams(alpha, gamma), cap).best_ratio
        rows.append(row)
    return rows


class Command(AnalysisCommand):
    help = "Regenerate the closed-form revenue tables (gamma = 0 selfish comparison, alpha x gamma optimum grid)."

    def add_command_arguments(self, parser):
        parser.add_argument("--table", type=int, required=True, help="1 or 2.")

    def run(self, options):
        cap = settings.FORKRISK_SCAN_CAP
        if options["table"] == 1:
            rows, digits = selfish_table(cap), 5
        elif options["table"] == 2:
            rows, digits = optimal_grid(cap), 3
        else:
            raise DomainError(f"table must be 1 or 2 (got {options['table']})")
        return {"table": options["table"], "digits": digits, "rows": rows, "note": OMITTED_NOTE}

    def render(self, result):
        rows = result["rows"]
        columns = list(rows[0])
        yield "".join(f"{column:>14}" for column in columns)
        for row in rows:
            yield "".join(f"{format_value(row[column], result['digits']):>14}" for column in columns)
        yield ""
        yield result["note"]
