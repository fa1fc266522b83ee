// Acceptance suite: one self-contained check per release criterion, each
// printing a single PASS/FAIL line with its pinned tolerances. Exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tfmm/arbitrage.hpp"
#include "tfmm/backtest.hpp"
#include "tfmm/lambert_w.hpp"
#include "tfmm/reserve_dynamics.hpp"
#include "tfmm/trajectory_optimizer.hpp"
#include "tfmm/trajectory_schemes.hpp"

namespace fs = std::filesystem;
using namespace tfmm;

namespace {

int g_failures = 0;

void report(int index, const std::string& label, bool ok,
            const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", index,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

PoolState make_pool(const WeightVector& w, const PriceVector& p,
                    double value) {
    Vec r(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[i] * value / p[i];
    return PoolState(std::move(r), w);
}

// Shared state between criteria 1 and 2 (one optimizer run at f = 1000).
struct Fig3Run {
    double max_dev_approx = 0.0;
    double max_dev_linear = 0.0;
    double value_capture = 0.0;
    bool converged = false;
    double seconds = 0.0;
};

Fig3Run run_fig3() {
    const WeightVector w0 = validate_weights({0.05, 0.55, 0.4});
    const WeightVector wf = validate_weights({0.4, 0.5, 0.1});
    const InterpolationRequest req(w0, wf, 1000);
    const PriceVector p({1.0, 1.0, 1.0});
    const PoolState pool = make_pool(w0, p, 100.0);

    const auto t0 = std::chrono::steady_clock::now();
    OptimizerConfig cfg;
    cfg.max_iterations = 200000;
    const OptimizerResult res = optimize_trajectory(req, pool, p, cfg);
    const auto t1 = std::chrono::steady_clock::now();

    const Trajectory linear = linear_trajectory(req);
    const Trajectory approx = approx_optimal_trajectory(req);

    Fig3Run out;
    out.converged = res.converged;
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    for (std::size_t k = 0; k <= 1000; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            out.max_dev_linear = std::max(
                out.max_dev_linear,
                std::abs(res.trajectory.steps[k][i] - linear.steps[k][i]));
            out.max_dev_approx = std::max(
                out.max_dev_approx,
                std::abs(res.trajectory.steps[k][i] - approx.steps[k][i]));
        }
    }
    const double v_lin =
        pool_value(trajectory_final_reserves(pool, linear), p);
    const double v_approx =
        pool_value(trajectory_final_reserves(pool, approx), p);
    const double gap = res.final_value - v_lin;
    out.value_capture = gap > 0.0 ? (v_approx - v_lin) / gap : 1.0;
    return out;
}

void criterion_1_and_2() {
    const Fig3Run r = run_fig3();
    const bool ok1 = r.converged && r.max_dev_approx <= 0.005 &&
                     r.max_dev_linear >= 0.02 && r.max_dev_linear <= 0.06;
    report(1, "trajectory shape at f=1000", ok1,
           "max|opt-approx| = " + fmt(r.max_dev_approx) +
               " (<= 0.005), max|opt-linear| = " + fmt(r.max_dev_linear) +
               " (in [0.02, 0.06]), converged = " +
               (r.converged ? "true" : "false") + ", " + fmt(r.seconds) +
               " s");

    const bool ok2 = r.value_capture >= 0.90 && r.value_capture <= 1.0;
    report(2, "value capture of the closed-form scheme", ok2,
           "capture = " + fmt(r.value_capture) + " (in [0.90, 1.0])");
}

void criterion_3() {
    test::Rng rng(1003);
    std::size_t checked = 0, strict = 0;
    double min_ratio = 1e300;
    bool ok = true;
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        for (int it = 0; it < 1000; ++it) {
            const WeightVector w0 = test::random_weights(rng, n);
            const WeightVector wf = test::random_weights(rng, n);
            const double t = rng.uniform(0.05, 0.95);
            Vec mid(n);
            double endpoint_gap = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                mid[i] = (1.0 - t) * w0[i] + t * wf[i];
                endpoint_gap = std::max(endpoint_gap,
                                        std::abs(w0[i] - wf[i]));
            }
            const double r = two_step_ratio(w0, validate_weights(mid), wf);
            min_ratio = std::min(min_ratio, r);
            ++checked;
            if (r < 1.0) ok = false;
            if (endpoint_gap > 1e-6) {
                ++strict;
                if (!(r > 1.0)) ok = false;
            }
        }
    }
    report(3, "two-step split never loses", ok,
           fmt(static_cast<double>(checked)) +
               " triples over N in {2,3,5,8}, min ratio = " + fmt(min_ratio) +
               " (>= 1, strict on " + fmt(static_cast<double>(strict)) +
               " distinct-endpoint cases)");
}

void criterion_4() {
    test::Rng rng(1004);
    bool ok = true;
    // Reference points first.
    if (std::abs(lambert_w0(std::exp(1.0)) - 1.0) > 1e-14) ok = false;
    if (std::abs(lambert_w0(1.0) - test::lambert_w0_bisection(1.0)) > 1e-12)
        ok = false;

    double worst_slack = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const double a = rng.uniform(1e-4, 1.0 - 1e-4);
        const double b = rng.uniform(1e-4, 1.0 - 1e-4);
        const WeightVector w0 = validate_weights({a, 1.0 - a});
        const WeightVector wf = validate_weights({b, 1.0 - b});
        const Vec opt = optimal_intermediate(w0, wf);
        for (std::size_t i = 0; i < 2; ++i) {
            const double gm = std::sqrt(w0[i] * wf[i]);
            const double am = 0.5 * (w0[i] + wf[i]);
            if (opt[i] < gm - 1e-12 || opt[i] > am + 1e-12) ok = false;
            worst_slack = std::max(
                worst_slack, std::max(gm - opt[i], opt[i] - am));
            // Strict interior unless the endpoints coincide.
            if (std::abs(w0[i] - wf[i]) > 1e-6 &&
                !(opt[i] > gm && opt[i] < am))
                ok = false;
        }
        // Equality at identical endpoints.
        const Vec same = optimal_intermediate(w0, w0);
        if (std::abs(same[0] - w0[0]) > 1e-12) ok = false;
    }
    report(4, "GM <= optimal intermediate <= AM", ok,
           "10000 random pairs within 1e-12 (worst slack " +
               fmt(worst_slack) + "); W0(e)=1 to 1e-14, W0(1) vs bisection "
               "oracle to 1e-12");
}

void criterion_5() {
    test::Rng rng(1005);
    const double h = 1e-6;
    bool ok = true;
    double worst = 0.0;

    // Part A: d r / d w-tilde on 100 random instances.
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 2 + it % 3;
        const WeightVector w0 = test::random_weights(rng, n);
        const WeightVector wf = test::random_weights(rng, n);
        Vec mid(n);
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (w0[i] + wf[i]);
        const Vec grad = d_r_d_wtilde(w0, mid, wf);
        for (std::size_t i = 0; i < n; ++i) {
            Vec up = mid, dn = mid;
            up[i] += h;
            dn[i] -= h;
            const double fd =
                (std::exp(log_two_step_ratio(w0.weights(), up,
                                             wf.weights())) -
                 std::exp(log_two_step_ratio(w0.weights(), dn,
                                             wf.weights()))) /
                (2.0 * h);
            const double err = std::abs(grad[i] - fd);
            worst = std::max(worst, err);
            if (err > std::max(1e-7, 1e-5 * std::abs(fd))) ok = false;
        }
    }

    // Part B: trajectory objective gradient on 100 random instances.
    auto objective_raw = [](const std::vector<Vec>& rows,
                            const PoolState& pool, const PriceVector& prices) {
        double log_factor = 0.0;
        const std::size_t n = pool.size();
        for (std::size_t k = 1; k < rows.size(); ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                log_factor += rows[k][j] * (std::log(rows[k - 1][j]) -
                                            std::log(rows[k][j]));
            }
        }
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            value += prices[i] * pool.reserves[i] * rows.back()[i] /
                     rows.front()[i] * std::exp(log_factor);
        }
        return value;
    };
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 2 + it % 2;
        const WeightVector w0 = test::random_weights(rng, n);
        const WeightVector wf = test::random_weights(rng, n);
        const PriceVector p = test::random_prices(rng, n);
        const PoolState pool = make_pool(w0, p, 250.0);
        const Trajectory traj =
            linear_trajectory(InterpolationRequest(w0, wf, 3));
        const auto grad = trajectory_objective_gradient(traj, pool, p);
        std::vector<Vec> rows;
        for (const WeightVector& s : traj.steps) rows.push_back(s.weights());
        for (std::size_t k = 1; k < 3; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Vec> up = rows, dn = rows;
                up[k][j] += h;
                dn[k][j] -= h;
                const double fd = (objective_raw(up, pool, p) -
                                   objective_raw(dn, pool, p)) /
                                  (2.0 * h);
                const double err = std::abs(grad[k - 1][j] - fd);
                worst = std::max(worst, err);
                if (err > std::max(1e-7, 1e-5 * std::abs(fd))) ok = false;
            }
        }
    }
    report(5, "analytic gradients vs finite differences", ok,
           "200 instances within max(1e-7 abs, 1e-5 rel), worst abs err = " +
               fmt(worst));
}

void criterion_6() {
    test::Rng rng(1006);
    bool ok = true;
    double worst_inv = 0.0, worst_price = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 2 + it % 4;
        const WeightVector w0 = test::random_weights(rng, n);
        const WeightVector w1 = test::random_weights(rng, n);
        const PriceVector p = test::random_prices(rng, n);
        const PoolState pool = make_pool(w0, p, 500.0);
        const auto res = reserve_update(pool, w1, p);

        double log_ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            log_ratio +=
                w1[i] * std::log(res.new_reserves[i] / pool.reserves[i]);
        }
        worst_inv = std::max(worst_inv, std::abs(log_ratio));
        if (std::abs(log_ratio) > 1e-10) ok = false;

        const PoolState after(res.new_reserves, w1);
        for (std::size_t i = 0; i < n; ++i) {
            const double rel =
                std::abs(quoted_price(after, i, 0) / p[i] - 1.0);
            worst_price = std::max(worst_price, rel);
            if (rel > 1e-9) ok = false;
        }
    }
    report(6, "post-update equilibrium identities", ok,
           "1000 cases: |log prod (R'/R)^{w'}| <= 1e-10 (worst " +
               fmt(worst_inv) + "), quoted price rel err <= 1e-9 (worst " +
               fmt(worst_price) + ")");
}

void criterion_7() {
    test::Rng rng(1007);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t n : {2u, 3u}) {
        for (int it = 0; it < 500; ++it) {
            const WeightVector w0 = test::random_weights(rng, n);
            const WeightVector w1 = test::random_weights(rng, n);
            const PriceVector p = test::random_prices(rng, n);
            const PoolState pool = make_pool(w0, p, 300.0);
            const auto expected = reserve_update(pool, w1, p);

            const PoolState shifted(pool.reserves, w1);
            const ArbOutcome out =
                arb_to_equilibrium(shifted, p, FeeParams::from_rate(0.0));
            for (std::size_t i = 0; i < n; ++i) {
                const double rel = std::abs(
                    out.pool_after.reserves[i] / expected.new_reserves[i] -
                    1.0);
                worst = std::max(worst, rel);
                if (rel > 1e-8) ok = false;
            }
        }
    }
    report(7, "zero-fee arbitrage matches the closed form", ok,
           "1000 weight changes, N in {2,3}, reserve rel err <= 1e-8 "
           "(worst " +
               fmt(worst) + ")");
}

void criterion_8() {
    // Part (a): deterministic ordering under piecewise-constant prices.
    bool ok_a = true;
    test::Rng rng(1008);
    for (int it = 0; it < 50; ++it) {
        SyntheticConfig syn;
        const std::size_t cadence = (it % 2 == 0) ? 8 : 16;
        syn.num_blocks = cadence + cadence * 6;
        syn.num_assets = 2 + it % 3;
        syn.seed = 9000 + static_cast<std::uint64_t>(it);
        syn.volatility = rng.uniform(0.01, 0.05);
        const PriceSeries s = piecewise_constant(
            synthetic_random_walk(syn), cadence);

        StrategyConfig strat;
        strat.kind = StrategyKind::Momentum;
        strat.lookback_blocks = cadence;
        strat.rebalance_cadence_blocks = cadence;
        strat.aggressiveness = rng.uniform(0.5, 3.0);

        const std::size_t n = s.num_assets();
        const WeightVector uniform =
            validate_weights(Vec(n, 1.0 / static_cast<double>(n)));
        const PoolState pool =
            equilibrium_pool(uniform, s.at(cadence), 100.0);

        const FeeParams no_fees = FeeParams::from_rate(0.0);
        const double v_one =
            run_backtest(s, strat, SchemeLabel::OneStep, no_fees, pool)
                .per_block_value.back();
        const double v_lin =
            run_backtest(s, strat, SchemeLabel::Linear, no_fees, pool)
                .per_block_value.back();
        const double v_approx =
            run_backtest(s, strat, SchemeLabel::ApproxOptimal, no_fees, pool)
                .per_block_value.back();
        if (!(v_one <= v_lin * (1.0 + 1e-10) &&
              v_lin <= v_approx * (1.0 + 1e-10)))
            ok_a = false;
    }

    // Part (b): paired ApproxOptimal/Linear ratio across 100 seeds and the
    // fee ladder {0, 0.003, 0.01}.
    std::vector<double> ratios;
    std::size_t at_least_one = 0;
    // Short cadence and clip-saturating momentum tilts make the trajectory
    // gain dominate the within-window price noise on every seed.
    for (int seed = 0; seed < 100; ++seed) {
        SyntheticConfig syn;
        syn.num_blocks = 8 + 4 * 20;
        syn.num_assets = 3;
        syn.seed = 20000 + static_cast<std::uint64_t>(seed);
        syn.volatility = 0.01;
        const PriceSeries s = synthetic_random_walk(syn);

        StrategyConfig strat;
        strat.kind = StrategyKind::Momentum;
        strat.lookback_blocks = 8;
        strat.rebalance_cadence_blocks = 4;
        strat.aggressiveness = 50.0;

        const WeightVector uniform = validate_weights(Vec(3, 1.0 / 3.0));
        const PoolState pool = equilibrium_pool(uniform, s.at(8), 100.0);

        bool seed_ok = true;
        for (double fee : {0.0, 0.003, 0.01}) {
            const FeeParams fees = FeeParams::from_rate(fee);
            const double v_lin =
                run_backtest(s, strat, SchemeLabel::Linear, fees, pool)
                    .per_block_value.back();
            const double v_approx =
                run_backtest(s, strat, SchemeLabel::ApproxOptimal, fees, pool)
                    .per_block_value.back();
            const double ratio = v_approx / v_lin;
            ratios.push_back(ratio);
            if (ratio < 1.0) seed_ok = false;
        }
        if (seed_ok) ++at_least_one;
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median =
        0.5 * (sorted[sorted.size() / 2] + sorted[(sorted.size() - 1) / 2]);
    const double frac_ge_1 =
        static_cast<double>(std::count_if(ratios.begin(), ratios.end(),
                                          [](double r) { return r >= 1.0; })) /
        static_cast<double>(ratios.size());
    const bool ok_b = frac_ge_1 >= 0.90 && median > 1.0;

    report(8, "backtest scheme ordering", ok_a && ok_b,
           "(a) 50 piecewise-constant configs ordered approx >= linear >= "
           "one-step; (b) ratio >= 1 in " +
               fmt(100.0 * frac_ge_1) + "% of runs (>= 90%), median = " +
               fmt(median) + " (> 1)");
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("TFMM_LOG=error \"") + TFMM_CLI_PATH +
                            "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_9() {
    const fs::path base =
        fs::temp_directory_path() / "tfmm_acceptance_determinism";
    fs::remove_all(base);
    const fs::path a = base / "a", b = base / "b", c = base / "c",
                   d = base / "d";
    bool ok = true;
    std::string detail;

    const std::string back_args =
        "backtest --synthetic --syn-blocks 160 --seed 31 --lookback 16 "
        "--cadence 16 --fees 0,0.003 --schemes linear,approx-optimal "
        "--out-dir ";
    const std::string opt_args =
        "optimize --start 0.05,0.55,0.4 --end 0.4,0.5,0.1 --steps 200 "
        "--out-dir ";
    if (run_cli(back_args + a.string()) != 0 ||
        run_cli(back_args + b.string()) != 0 ||
        run_cli(opt_args + c.string()) != 0 ||
        run_cli(opt_args + d.string()) != 0) {
        ok = false;
        detail = "CLI invocation failed";
    } else {
        std::size_t compared = 0;
        for (const auto& [lhs, rhs] : {std::pair{a, b}, std::pair{c, d}}) {
            for (const auto& entry : fs::directory_iterator(lhs)) {
                const fs::path name = entry.path().filename();
                if (name.extension() != ".csv") continue;
                ++compared;
                if (slurp(entry.path()) != slurp(rhs / name)) {
                    ok = false;
                    detail = "mismatch in " + name.string();
                }
            }
        }
        if (ok)
            detail = "backtest and optimize reruns byte-identical across " +
                     fmt(static_cast<double>(compared)) + " CSV files";
    }
    fs::remove_all(base);
    report(9, "CLI determinism", ok, detail);
}

}  // namespace

int main() {
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
