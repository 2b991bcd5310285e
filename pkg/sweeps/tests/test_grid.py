from django.test import SimpleTestCase

from core.services.params import INFINITE, DomainError, ModelParams
from sweeps.serializers import parse_spec
from sweeps.services.grid import SweepSpec, evaluate_metric, expand_range, grid_points, run_sweep
from sweeps.services.output import render_rows, rows_from_json, rows_to_csv, rows_to_json


def spec_data(metric, **fixed):
    data = {
        "metric": metric,
        "alpha_start": 0.3,
        "alpha_stop": 0.45,
        "alpha_step": 0.05,
        "gamma_start": 0.0,
        "gamma_stop": 1.0,
        "gamma_step": 0.5,
    }
    data.update(fixed)
    return data


class GridTests(SimpleTestCase):
    def test_expand_range_includes_stop(self):
        self.assertEqual(expand_range(0.1, 0.3, 0.1), [0.1, 0.2, 0.3])
        self.assertEqual(expand_range(0.0, 0.0, 0.1), [0.0])

    def test_expand_range_rejects_bad_step(self):
        with self.assertRaises(DomainError):
            expand_range(0.1, 0.3, 0.0)

    def test_alpha_outer_gamma_inner(self):
        spec = SweepSpec(alpha_range=(0.1, 0.2, 0.1), gamma_range=(0.0, 1.0, 0.5), metric="L_star")
        self.assertEqual(
            grid_points(spec),
            [(0.1, 0.0), (0.1, 0.5), (0.1, 1.0), (0.2, 0.0), (0.2, 0.5), (0.2, 1.0)],
        )

    def test_selfish_threshold_at_zero_gamma(self):
        spec = parse_spec(
            {
                "metric": "L_star",
                "alpha_start": 0.3,
                "alpha_stop": 0.35,
                "alpha_step": 0.05,
                "gamma_start": 0.0,
                "gamma_stop": 0.0,
                "gamma_step": 0.1,
            }
        )
        rows = run_sweep(spec)
        self.assertEqual([row.value for row in rows], [1, 2])
        self.assertEqual(rows[0].aux["method"], "scan_fallback")

    def test_ratio_metric_value(self):
        value, aux = evaluate_metric("rho_L", ModelParams(0.35, 0.0), {"level": 2})
        self.assertAlmostEqual(value, 0.36651, delta=5e-6)
        self.assertAlmostEqual(aux["numerator"] / aux["denominator"], value, delta=1e-15)

    def test_white_region(self):
        rows = run_sweep(parse_spec(spec_data("r_star", k=6, strategy="stealth")))
        for row in rows:
            self.assertEqual(row.value == 0.0, row.aux["plain_ratio"] >= row.alpha)

    def test_every_metric_evaluates(self):
        fixed = {"level": 3, "k": 3, "strategy": "stubborn"}
        for metric in (
            "rho_L",
            "sigma_S",
            "L_star",
            "S_star",
            "L_bar",
            "S_bar",
            "ds_prob_stubborn",
            "ds_prob_stealth",
            "move_funds",
            "service",
            "r_star",
            "normalized_ratio",
        ):
            value, _ = evaluate_metric(metric, ModelParams(0.3, 0.5), fixed)
            self.assertIsNotNone(value)

    def test_missing_fixed_parameter(self):
        with self.assertRaises(DomainError):
            evaluate_metric("ds_prob_stealth", ModelParams(0.3, 0.5), {})


class SpecValidationTests(SimpleTestCase):
    def test_required_fixed_parameter(self):
        with self.assertRaises(DomainError) as ctx:
            parse_spec(spec_data("rho_L"))
        self.assertIn("level", str(ctx.exception))

    def test_alpha_range_bounds(self):
        with self.assertRaises(DomainError):
            parse_spec(spec_data("L_star", alpha_stop=0.5))

    def test_step_must_be_positive(self):
        with self.assertRaises(DomainError):
            parse_spec(spec_data("L_star", gamma_step=0.0))

    def test_unknown_metric(self):
        with self.assertRaises(DomainError):
            parse_spec(spec_data("tau"))

    def test_infinite_level_parsed(self):
        spec = parse_spec(spec_data("normalized_ratio", level="inf", strategy="stealth"))
        self.assertEqual(spec.fixed, {"level": INFINITE, "strategy": "stealth"})


class OutputTests(SimpleTestCase):
    def test_csv_layout(self):
        rows = run_sweep(parse_spec(spec_data("rho_L", level=2)))
        text = rows_to_csv(rows, "rho_L")
        lines = text.split("\n")
        self.assertEqual(lines[0], "alpha,gamma,value,numerator,denominator")
        self.assertEqual(lines[1].split(",")[:2], ["0.300000", "0.000000"])
        self.assertTrue(text.endswith("\n"))
        self.assertNotIn("\r", text)
        self.assertEqual(len(lines), 1 + len(rows) + 1)

    def test_infinite_written_as_inf(self):
        rows = run_sweep(parse_spec(spec_data("L_bar")))
        text = rows_to_csv(rows, "L_bar")
        self.assertIn("0.450000,0.500000,inf", text)

    def test_same_spec_same_bytes(self):
        spec = parse_spec(spec_data("S_star"))
        self.assertEqual(render_rows(run_sweep(spec), "S_star", "csv"), render_rows(run_sweep(spec), "S_star", "csv"))

    def test_json_round_trip(self):
        rows = run_sweep(parse_spec(spec_data("L_star")))
        self.assertEqual(rows_from_json(rows_to_json(rows)), rows)

    def test_unknown_format(self):
        with self.assertRaises(DomainError):
            render_rows([], "L_star", "xml")
