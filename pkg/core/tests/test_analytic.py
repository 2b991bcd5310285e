from fractions import Fraction

from django.test import SimpleTestCase

from core.services.analytic import (
    CombinedRevenueParams,
    breakeven_reward,
    combined_revenue_stealth,
    combined_revenue_stubborn,
    combined_terms,
    double_spend_probs,
    double_spend_probs_stealth,
    double_spend_probs_stubborn,
    expected_prefix,
    normalized_ratio,
    revenue,
    revenue_stealth,
    revenue_stubborn,
    selfish_ratio,
    service_profitability,
    success_prob,
    unsuccess_prefix_prob,
    unsuccess_prob,
)
from core.services.params import (
    INFINITE,
    STEALTH,
    STUBBORN,
    DomainError,
    ModelParams,
    check_level,
    parse_fraction,
    parse_level,
)

ALPHAS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)
GAMMAS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

SELFISH_TABLE = {
    Fraction(1, 3): 0.33269,
    0.35: 0.36651,
    0.375: 0.42118,
    0.4: 0.48372,
    0.425: 0.55801,
    0.45: 0.65177,
    0.475: 0.78255,
}


class ModelParamsTests(SimpleTestCase):
    def test_domain_bounds(self):
        for alpha, gamma in ((0.0, 0.5), (0.5, 0.5), (0.3, -0.1), (0.3, 1.1)):
            with self.assertRaises(DomainError):
                ModelParams(alpha, gamma)

    def test_beta(self):
        self.assertAlmostEqual(ModelParams(0.3, 0.5).beta, 0.7, places=15)

    def test_level_parsing(self):
        self.assertEqual(parse_level("inf"), INFINITE)
        self.assertEqual(parse_level("7"), 7)
        with self.assertRaises(DomainError):
            parse_level("0")
        with self.assertRaises(DomainError):
            parse_level("abc")
        with self.assertRaises(DomainError):
            check_level(1.5)

    def test_fraction_parsing(self):
        self.assertEqual(parse_fraction("1/3"), 1 / 3)
        self.assertEqual(parse_fraction("0.35"), 0.35)
        with self.assertRaises(DomainError):
            parse_fraction("one third")


class OutcomeProbabilityTests(SimpleTestCase):
    def test_success_and_unsuccess_partition_the_cycle(self):
        for alpha in ALPHAS:
            for gamma in (0.0, 0.5, 1.0):
                params = ModelParams(alpha, gamma)
                for level in range(1, 13):
                    total = sum(success_prob(params, level, m) for m in range(level))
                    total += sum(unsuccess_prob(params, n) for n in range(level))
                    self.assertAlmostEqual(total, 1.0, delta=1e-10)

    def test_prefix_split_sums_to_unsuccess(self):
        for alpha in ALPHAS:
            for gamma in GAMMAS:
                params = ModelParams(alpha, gamma)
                for n in range(13):
                    split = sum(unsuccess_prefix_prob(params, n, i) for i in range(n + 1))
                    self.assertAlmostEqual(split, unsuccess_prob(params, n), delta=1e-12)

    def test_prefix_split_mean(self):
        params = ModelParams(0.3, 0.4)
        for n in range(8):
            split = [unsuccess_prefix_prob(params, n, i) for i in range(n + 1)]
            mean = sum(i * p for i, p in enumerate(split)) / unsuccess_prob(params, n)
            self.assertAlmostEqual(mean, expected_prefix(n, 0.4), delta=1e-12)

    def test_expected_prefix_limits(self):
        self.assertEqual(expected_prefix(5, 0.0), 0.0)
        self.assertEqual(expected_prefix(5, 1.0), 5.0)

    def test_invalid_indices(self):
        params = ModelParams(0.3, 0.4)
        with self.assertRaises(DomainError):
            success_prob(params, 3, 3)
        with self.assertRaises(DomainError):
            unsuccess_prefix_prob(params, 2, 3)
        with self.assertRaises(DomainError):
            unsuccess_prob(params, -1)


class RevenueTests(SimpleTestCase):
    def test_level_one_is_honest_mining(self):
        for alpha in ALPHAS:
            params = ModelParams(alpha, 0.5)
            self.assertEqual(revenue_stubborn(params, 1).ratio, alpha)
            self.assertEqual(revenue_stealth(params, 1).ratio, alpha)

    def test_level_two_is_selfish_mining(self):
        for alpha in ALPHAS:
            for gamma in GAMMAS:
                params = ModelParams(alpha, gamma)
                self.assertAlmostEqual(revenue_stubborn(params, 2).ratio, selfish_ratio(params), delta=1e-10)

    def test_stealth_two_equals_stubborn_two(self):
        for gamma in (0.0, 0.3, 1.0):
            params = ModelParams(0.3, gamma)
            self.assertAlmostEqual(revenue_stealth(params, 2).ratio, revenue_stubborn(params, 2).ratio, delta=1e-12)

    def test_selfish_column(self):
        for alpha, expected in SELFISH_TABLE.items():
            params = ModelParams(float(alpha), 0.0)
            self.assertAlmostEqual(revenue_stubborn(params, 2).ratio, expected, delta=5e-5)

    def test_stealth_never_beats_stubborn(self):
        for alpha in ALPHAS:
            for gamma in GAMMAS:
                params = ModelParams(alpha, gamma)
                for level in range(1, 13):
                    stealth = revenue_stealth(params, level).ratio
                    stubborn = revenue_stubborn(params, level).ratio
                    self.assertLessEqual(stealth, stubborn + 1e-12, f"alpha={alpha} gamma={gamma} level={level}")

    def test_report_decomposition(self):
        report = revenue_stubborn(ModelParams(0.35, 0.5), 4)
        self.assertAlmostEqual(report.ratio, report.numerator / report.denominator, delta=1e-15)
        self.assertGreater(report.unsuccessful_adversarial_blocks, 0)

    def test_infinite_levels(self):
        params = ModelParams(0.3, 0.0)
        self.assertEqual(revenue_stubborn(params, INFINITE).ratio, 0.0)
        self.assertEqual(revenue_stealth(ModelParams(0.3, 0.7), INFINITE).ratio, 0.0)
        full = ModelParams(0.3, 1.0)
        self.assertAlmostEqual(revenue_stubborn(full, INFINITE).ratio, 0.3 / 0.7, delta=1e-12)
        self.assertAlmostEqual(revenue_stubborn(full, INFINITE).total_unsuccessful_blocks, 0.7 / 0.4, delta=1e-12)

    def test_infinite_level_is_continuous_at_series_threshold(self):
        closed = revenue_stubborn(ModelParams(0.3, 1e-6), INFINITE).ratio
        series = revenue_stubborn(ModelParams(0.3, 0.999e-6), INFINITE).ratio
        self.assertGreater(series, 0.0)
        self.assertAlmostEqual(closed, series, delta=1e-8)

    def test_finite_levels_approach_infinite_level(self):
        params = ModelParams(0.3, 0.5)
        self.assertAlmostEqual(
            revenue_stubborn(params, 400).ratio,
            revenue_stubborn(params, INFINITE).ratio,
            delta=1e-9,
        )

    def test_dispatch_and_normalization(self):
        params = ModelParams(0.41, 1.0)
        self.assertEqual(revenue(params, STEALTH, 7), revenue_stealth(params, 7))
        self.assertAlmostEqual(normalized_ratio(revenue(params, STUBBORN, 7), params), 1.639, delta=5e-3)
        self.assertAlmostEqual(normalized_ratio(revenue(params, STEALTH, 7).ratio, params), 1.09, delta=5e-3)
        with self.assertRaises(DomainError):
            revenue(params, "greedy", 3)


class DoubleSpendTests(SimpleTestCase):
    def test_events_partition(self):
        for alpha in ALPHAS:
            for gamma in GAMMAS:
                params = ModelParams(alpha, gamma)
                for k in range(1, 13):
                    for strategy in (STUBBORN, STEALTH):
                        events = double_spend_probs(params, strategy, k)
                        self.assertGreaterEqual(events.move_funds, 0.0)
                        total = events.double_spending + events.move_funds + events.service
                        self.assertAlmostEqual(total, 1.0, delta=1e-12)

    def test_stubborn_spot_values(self):
        events = double_spend_probs_stubborn(ModelParams(0.41, 0.0), 6)
        self.assertAlmostEqual(events.double_spending, 0.092, delta=1e-3)
        events = double_spend_probs_stubborn(ModelParams(0.41, 1.0), 6)
        self.assertAlmostEqual(events.double_spending, 0.002, delta=5e-4)
        self.assertAlmostEqual(events.service, 0.59, delta=5e-3)

    def test_stealth_spot_values(self):
        events = double_spend_probs_stealth(ModelParams(0.41, 1.0), 6)
        self.assertAlmostEqual(events.double_spending, 0.108, delta=1e-3)
        self.assertAlmostEqual(events.service, 0.892, delta=1e-3)
        self.assertEqual(events.move_funds, 0.0)

    def test_stubborn_risk_falls_with_gamma(self):
        for alpha in (0.3, 0.35, 0.4, 0.45):
            for k in range(2, 11):
                risks = [double_spend_probs_stubborn(ModelParams(alpha, gamma), k).double_spending for gamma in GAMMAS]
                for previous, following in zip(risks, risks[1:]):
                    self.assertLessEqual(following, previous + 1e-12, f"alpha={alpha} k={k}")

    def test_single_confirmation_risk_rises_with_gamma(self):
        # with k = 1 the only gamma term is the switch onto the adversarial prefix
        for alpha in ALPHAS:
            risks = [double_spend_probs_stubborn(ModelParams(alpha, gamma), 1).double_spending for gamma in GAMMAS]
            for previous, following in zip(risks, risks[1:]):
                self.assertGreater(following, previous)

    def test_stealth_risk_grows_with_gamma(self):
        for alpha in ALPHAS:
            for k in range(1, 11):
                risks = [double_spend_probs_stealth(ModelParams(alpha, gamma), k).double_spending for gamma in GAMMAS]
                for previous, following in zip(risks, risks[1:]):
                    self.assertGreaterEqual(following + 1e-12, previous, f"alpha={alpha} k={k}")

    def test_depth_validated(self):
        with self.assertRaises(DomainError):
            double_spend_probs_stubborn(ModelParams(0.3, 0.5), 0)


class CombinedRevenueTests(SimpleTestCase):
    def test_zero_reward_is_plain_ratio(self):
        params = ModelParams(0.35, 0.5)
        cfg = CombinedRevenueParams(k=6, reward_r=0.0)
        self.assertAlmostEqual(combined_revenue_stubborn(params, cfg), revenue_stubborn(params, 7).ratio, delta=1e-12)
        self.assertAlmostEqual(combined_revenue_stealth(params, cfg), revenue_stealth(params, 7).ratio, delta=1e-12)

    def test_reward_increases_ratio(self):
        params = ModelParams(0.35, 0.5)
        low = combined_revenue_stubborn(params, CombinedRevenueParams(k=3, reward_r=1.0))
        high = combined_revenue_stubborn(params, CombinedRevenueParams(k=3, reward_r=5.0))
        self.assertGreater(high, low)

    def test_ratio_is_affine_in_reward(self):
        for alpha in ALPHAS:
            for gamma in (0.0, 0.5, 1.0):
                params = ModelParams(alpha, gamma)
                for k in (1, 3, 6):
                    for combined in (combined_revenue_stubborn, combined_revenue_stealth):
                        r0, r1, r4 = (combined(params, CombinedRevenueParams(k=k, reward_r=r)) for r in (0.0, 1.0, 4.0))
                        self.assertAlmostEqual(r4 - r0, 4 * (r1 - r0), delta=1e-10)

    def test_negative_reward_rejected(self):
        with self.assertRaises(DomainError):
            CombinedRevenueParams(k=3, reward_r=-1.0)

    def test_breakeven_reward_restores_honest_share(self):
        for alpha, gamma in ((0.2, 0.2), (0.15, 0.6), (0.25, 0.0)):
            params = ModelParams(alpha, gamma)
            for k in (3, 6):
                for strategy in (STUBBORN, STEALTH):
                    reward = breakeven_reward(params, k, strategy)
                    self.assertGreater(reward, 0.0)
                    ratio = combined_terms(params, k, strategy).ratio(reward)
                    self.assertAlmostEqual(ratio, alpha, delta=1e-10)

    def test_zero_breakeven_exactly_where_plain_attack_pays(self):
        for alpha in (0.2, 0.3, 0.4, 0.45):
            for gamma in (0.0, 0.5, 1.0):
                params = ModelParams(alpha, gamma)
                for strategy in (STUBBORN, STEALTH):
                    terms = combined_terms(params, 6, strategy)
                    reward = breakeven_reward(params, 6, strategy)
                    self.assertEqual(reward == 0.0, terms.plain_ratio >= alpha)


class ServiceProfitabilityTests(SimpleTestCase):
    def test_fee_below_value_rejected(self):
        with self.assertRaises(DomainError):
            service_profitability(ModelParams(0.3, 0.5), 6, 2.0, 1.0, STUBBORN)

    def test_negative_value_rejected(self):
        with self.assertRaises(DomainError):
            service_profitability(ModelParams(0.3, 0.5), 6, -1.0, 1.0, STUBBORN)

    def test_without_payment_matches_plain_profitability(self):
        params = ModelParams(0.2, 0.2)
        self.assertFalse(service_profitability(params, 3, 0.0, 0.0, STUBBORN))
        self.assertFalse(service_profitability(params, 3, 0.0, 0.0, STEALTH))

    def test_large_payment_makes_attack_pay(self):
        params = ModelParams(0.3, 0.5)
        self.assertTrue(service_profitability(params, 3, 1000.0, 1000.0, STUBBORN))
        self.assertTrue(service_profitability(params, 3, 1000.0, 1000.0, STEALTH))

    def test_profitability_flips_once_in_service_value(self):
        params = ModelParams(0.35, 0.5)
        fee = 1000.0
        for strategy in (STUBBORN, STEALTH):
            verdicts = [service_profitability(params, 6, float(v), fee, strategy) for v in range(0, 1001, 10)]
            self.assertFalse(verdicts[0], strategy)
            self.assertTrue(verdicts[-1], strategy)
            flip = verdicts.index(True)
            self.assertTrue(all(verdicts[flip:]), strategy)
