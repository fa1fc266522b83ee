// tfmm-cli: trajectory generation, trajectory optimization, and fee-aware
// backtests for dynamic-weight G3M pools. Emits CSV series (for plotting)
// and JSON scalar summaries. Exit codes: 0 ok, 2 input error, 3 optimizer
// did not converge (unless --allow-nonconverged).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tfmm/backtest.hpp"
#include "tfmm/reserve_dynamics.hpp"
#include "tfmm/trajectory_optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tfmm;

namespace {

int log_level() {
    static int level = [] {
        const char* env = std::getenv("TFMM_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "error") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[tfmm] " << msg << "\n";
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Atomic write: temp file in the target directory, then rename.
void write_file(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
    log_info("wrote " + path.string());
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    const std::size_t n = traj.steps.front().size();
    out << "k";
    for (std::size_t i = 0; i < n; ++i) out << ",w_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        out << k;
        for (std::size_t i = 0; i < n; ++i)
            out << "," << fmt(traj.steps[k][i]);
        out << "\n";
    }
    return out.str();
}

std::string deltas_csv(const Trajectory& traj) {
    std::ostringstream out;
    const std::size_t n = traj.steps.front().size();
    out << "k";
    for (std::size_t i = 0; i < n; ++i) out << ",dw_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
        out << k;
        for (std::size_t i = 0; i < n; ++i)
            out << "," << fmt(traj.steps[k + 1][i] - traj.steps[k][i]);
        out << "\n";
    }
    return out.str();
}

std::string deviation_csv(const Trajectory& a, const Trajectory& b) {
    std::ostringstream out;
    const std::size_t n = a.steps.front().size();
    out << "k";
    for (std::size_t i = 0; i < n; ++i) out << ",d_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        out << k;
        for (std::size_t i = 0; i < n; ++i)
            out << "," << fmt(a.steps[k][i] - b.steps[k][i]);
        out << "\n";
    }
    return out.str();
}

std::string report_csv(const BacktestReport& r) {
    std::ostringstream out;
    out << "timestamp,value,fees_cum,arb_cost_cum\n";
    for (std::size_t t = 0; t < r.per_block_value.size(); ++t) {
        out << r.timestamps[t] << "," << fmt(r.per_block_value[t]) << ","
            << fmt(r.fees_cum[t]) << "," << fmt(r.arb_cost_cum[t]) << "\n";
    }
    return out.str();
}

// Effective run configuration: defaults, overlaid by --config file values,
// overlaid by explicit CLI flags.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t steps = 100;
    Vec start, end;
    std::vector<std::string> schemes;
    std::vector<double> fees{0.0};
    std::string prices_csv;
    bool synthetic = false;
    bool piecewise = false;
    bool allow_nonconverged = false;
    double initial_value = 100.0;

    int opt_max_iterations = 5000;
    double opt_gradient_tolerance = 0.0;
    double opt_step_size = 0.1;
    double opt_step_decay = 0.5;
    double opt_epsilon_bound = WeightVector::kDefaultEpsilon;

    std::string strategy_kind = "momentum";
    std::size_t lookback = 32;
    double aggressiveness = 1.0;
    std::size_t cadence = 16;
    double weight_floor = 0.05;
    double weight_cap = 0.90;

    std::size_t syn_blocks = 1024;
    std::size_t syn_assets = 3;
    double syn_drift = 0.0;
    double syn_volatility = 0.01;

    json to_json() const {
        return json{
            {"seed", seed},
            {"out_dir", out_dir},
            {"steps", steps},
            {"start", start},
            {"end", end},
            {"schemes", schemes},
            {"fees", fees},
            {"prices_csv", prices_csv},
            {"synthetic", synthetic},
            {"piecewise", piecewise},
            {"allow_nonconverged", allow_nonconverged},
            {"initial_value", initial_value},
            {"optimizer",
             {{"max_iterations", opt_max_iterations},
              {"gradient_tolerance", opt_gradient_tolerance},
              {"step_size", opt_step_size},
              {"step_decay", opt_step_decay},
              {"epsilon_bound", opt_epsilon_bound}}},
            {"strategy",
             {{"kind", strategy_kind},
              {"lookback_blocks", lookback},
              {"aggressiveness", aggressiveness},
              {"cadence_blocks", cadence},
              {"weight_floor", weight_floor},
              {"weight_cap", weight_cap}}},
            {"synthetic_cfg",
             {{"num_blocks", syn_blocks},
              {"num_assets", syn_assets},
              {"drift", syn_drift},
              {"volatility", syn_volatility}}},
        };
    }

    void from_json(const json& j) {
        seed = j.value("seed", seed);
        out_dir = j.value("out_dir", out_dir);
        steps = j.value("steps", steps);
        start = j.value("start", start);
        end = j.value("end", end);
        schemes = j.value("schemes", schemes);
        fees = j.value("fees", fees);
        prices_csv = j.value("prices_csv", prices_csv);
        synthetic = j.value("synthetic", synthetic);
        piecewise = j.value("piecewise", piecewise);
        allow_nonconverged = j.value("allow_nonconverged", allow_nonconverged);
        initial_value = j.value("initial_value", initial_value);
        if (j.contains("optimizer")) {
            const json& o = j["optimizer"];
            opt_max_iterations = o.value("max_iterations", opt_max_iterations);
            opt_gradient_tolerance =
                o.value("gradient_tolerance", opt_gradient_tolerance);
            opt_step_size = o.value("step_size", opt_step_size);
            opt_step_decay = o.value("step_decay", opt_step_decay);
            opt_epsilon_bound = o.value("epsilon_bound", opt_epsilon_bound);
        }
        if (j.contains("strategy")) {
            const json& s = j["strategy"];
            strategy_kind = s.value("kind", strategy_kind);
            lookback = s.value("lookback_blocks", lookback);
            aggressiveness = s.value("aggressiveness", aggressiveness);
            cadence = s.value("cadence_blocks", cadence);
            weight_floor = s.value("weight_floor", weight_floor);
            weight_cap = s.value("weight_cap", weight_cap);
        }
        if (j.contains("synthetic_cfg")) {
            const json& s = j["synthetic_cfg"];
            syn_blocks = s.value("num_blocks", syn_blocks);
            syn_assets = s.value("num_assets", syn_assets);
            syn_drift = s.value("drift", syn_drift);
            syn_volatility = s.value("volatility", syn_volatility);
        }
    }

    OptimizerConfig optimizer_config() const {
        OptimizerConfig cfg;
        cfg.max_iterations = opt_max_iterations;
        cfg.gradient_tolerance = opt_gradient_tolerance;
        cfg.step_size = opt_step_size;
        cfg.step_decay = opt_step_decay;
        cfg.epsilon_bound = opt_epsilon_bound;
        cfg.seed = seed;
        return cfg;
    }

    StrategyConfig strategy_config() const {
        StrategyConfig cfg;
        cfg.kind = strategy_from_name(strategy_kind);
        cfg.lookback_blocks = lookback;
        cfg.aggressiveness = aggressiveness;
        cfg.rebalance_cadence_blocks = cadence;
        cfg.weight_floor = weight_floor;
        cfg.weight_cap = weight_cap;
        return cfg;
    }

    InterpolationRequest interpolation_request() const {
        if (start.empty() || end.empty()) {
            throw ValidationError("start and end weights are required");
        }
        return InterpolationRequest(validate_weights(start),
                                    validate_weights(end), steps);
    }

    PriceSeries load_series() const {
        PriceSeries series;
        if (!prices_csv.empty()) {
            series = load_price_csv(prices_csv);
        } else if (synthetic) {
            SyntheticConfig s;
            s.num_blocks = syn_blocks;
            s.num_assets = syn_assets;
            s.drift = syn_drift;
            s.volatility = syn_volatility;
            s.seed = seed;
            series = synthetic_random_walk(s);
        } else {
            throw ValidationError("need --prices <csv> or --synthetic");
        }
        if (piecewise) series = piecewise_constant(series, cadence);
        return series;
    }

    void dump_effective(const fs::path& dir) const {
        write_file(dir / "config_effective.json", to_json().dump(2) + "\n");
    }
};

std::vector<SchemeLabel> parse_schemes(const std::vector<std::string>& names,
                                       std::vector<SchemeLabel> fallback) {
    if (names.empty()) return fallback;
    std::vector<SchemeLabel> out;
    for (const std::string& s : names) out.push_back(scheme_from_name(s));
    return out;
}

int cmd_trajectory(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const InterpolationRequest req = cfg.interpolation_request();
    const std::vector<SchemeLabel> schemes = parse_schemes(
        cfg.schemes, {SchemeLabel::Linear, SchemeLabel::Geometric,
                      SchemeLabel::ApproxOptimal});
    // Validate everything before touching the filesystem.
    std::vector<Trajectory> trajs;
    for (SchemeLabel s : schemes) trajs.push_back(make_trajectory(req, s));

    cfg.dump_effective(dir);
    const bool single = trajs.size() == 1;
    for (const Trajectory& traj : trajs) {
        const std::string tag =
            single ? "" : std::string("_") + scheme_name(traj.scheme);
        write_file(dir / ("trajectory" + tag + ".csv"), trajectory_csv(traj));
        write_file(dir / ("deltas" + tag + ".csv"), deltas_csv(traj));
    }
    return 0;
}

int cmd_optimize(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const InterpolationRequest req = cfg.interpolation_request();

    // The optimal trajectory is price-independent (the objective factors
    // into an endpoint term and the step product), so unit prices do.
    const PriceVector prices(Vec(req.w_start.size(), 1.0), 0);
    const PoolState pool =
        equilibrium_pool(req.w_start, prices, cfg.initial_value);

    const Trajectory linear = linear_trajectory(req);
    const Trajectory approx = approx_optimal_trajectory(req);
    const OptimizerResult result =
        optimize_trajectory(req, pool, prices, cfg.optimizer_config());
    log_info("optimizer: " + std::to_string(result.iterations_used) +
             " iterations, converged=" +
             (result.converged ? std::string("true") : std::string("false")));

    const double v_linear =
        pool_value(trajectory_final_reserves(pool, linear), prices);
    const double v_approx =
        pool_value(trajectory_final_reserves(pool, approx), prices);
    const double v_opt = result.final_value;
    const double gap = v_opt - v_linear;
    const double value_capture = gap > 0.0 ? (v_approx - v_linear) / gap : 1.0;

    double max_dev_linear = 0.0, max_dev_approx = 0.0;
    for (std::size_t k = 0; k < result.trajectory.steps.size(); ++k) {
        for (std::size_t i = 0; i < req.w_start.size(); ++i) {
            max_dev_linear = std::max(
                max_dev_linear, std::abs(result.trajectory.steps[k][i] -
                                         linear.steps[k][i]));
            max_dev_approx = std::max(
                max_dev_approx, std::abs(result.trajectory.steps[k][i] -
                                         approx.steps[k][i]));
        }
    }

    cfg.dump_effective(dir);
    write_file(dir / "trajectory.csv", trajectory_csv(result.trajectory));
    write_file(dir / "deviation_linear.csv",
               deviation_csv(result.trajectory, linear));
    write_file(dir / "deviation_approx.csv",
               deviation_csv(result.trajectory, approx));

    json diag{
        {"iterations", result.iterations_used},
        {"converged", result.converged},
        {"final_value", v_opt},
        {"value_linear", v_linear},
        {"value_approx", v_approx},
        {"value_capture", value_capture},
        {"max_dev_linear", max_dev_linear},
        {"max_dev_approx", max_dev_approx},
    };
    write_file(dir / "diagnostics.json", diag.dump(2) + "\n");

    if (!result.converged && !cfg.allow_nonconverged) {
        std::cerr << "optimizer did not converge within "
                  << cfg.opt_max_iterations << " iterations\n";
        return 3;
    }
    return 0;
}

std::string report_filename(const BacktestReport& r) {
    char fee[16];
    std::snprintf(fee, sizeof(fee), "%.4f", r.fee_rate);
    return std::string("report_") + scheme_name(r.scheme) + "_fee" + fee +
           ".csv";
}

json summary_row(const BacktestReport& r, std::uint64_t seed) {
    return json{
        {"scheme", scheme_name(r.scheme)},
        {"strategy", strategy_name(r.strategy)},
        {"fee_rate", r.fee_rate},
        {"seed", seed},
        {"initial_value", r.per_block_value.front()},
        {"final_value", r.per_block_value.back()},
        {"final_return", r.final_return},
        {"fees_total", r.fees_total},
        {"arb_cost_total", r.arb_cost_total},
    };
}

int run_grid(const RunConfig& cfg, bool per_block_reports) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const PriceSeries series = cfg.load_series();
    const StrategyConfig strategy = cfg.strategy_config();
    const std::vector<SchemeLabel> schemes = parse_schemes(
        cfg.schemes, {SchemeLabel::Linear, SchemeLabel::ApproxOptimal});

    const std::size_t n = series.num_assets();
    const WeightVector uniform = validate_weights(
        Vec(n, 1.0 / static_cast<double>(n)));
    const PoolState initial = equilibrium_pool(
        uniform, series.at(strategy.lookback_blocks), cfg.initial_value,
        static_cast<std::int64_t>(strategy.lookback_blocks));

    const std::vector<BacktestReport> reports =
        compare_schemes(series, strategy, cfg.fees, schemes, initial);

    cfg.dump_effective(dir);
    json summary = json::array();
    for (const BacktestReport& r : reports) {
        if (per_block_reports) {
            write_file(dir / report_filename(r), report_csv(r));
        }
        summary.push_back(summary_row(r, cfg.seed));
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    if (!per_block_reports) {
        std::ostringstream table;
        table << "scheme,fee_rate,final_value,final_return,fees_total,"
                 "arb_cost_total\n";
        for (const BacktestReport& r : reports) {
            table << scheme_name(r.scheme) << "," << fmt(r.fee_rate) << ","
                  << fmt(r.per_block_value.back()) << ","
                  << fmt(r.final_return) << "," << fmt(r.fees_total) << ","
                  << fmt(r.arb_cost_total) << "\n";
        }
        write_file(dir / "compare.csv", table.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weight-interpolation trajectories and backtests for "
                 "dynamic-weight G3M pools"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    Vec cli_start, cli_end;
    std::vector<std::string> cli_schemes;
    std::vector<double> cli_fees;

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out-dir", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--steps", cfg.steps, "interpolation steps f");
        sub->add_option("--start", cli_start, "start weights (comma list)")
            ->delimiter(',');
        sub->add_option("--end", cli_end, "end weights (comma list)")
            ->delimiter(',');
        sub->add_option("--schemes", cli_schemes, "scheme names")
            ->delimiter(',');
        sub->add_option("--fees", cli_fees, "fee rates")->delimiter(',');
        sub->add_option("--prices", cfg.prices_csv, "price CSV path");
        sub->add_flag("--synthetic", cfg.synthetic,
                      "generate synthetic random-walk prices");
        sub->add_flag("--piecewise", cfg.piecewise,
                      "hold prices constant within each cadence window");
        sub->add_flag("--allow-nonconverged", cfg.allow_nonconverged,
                      "exit 0 even if the optimizer did not converge");
        sub->add_option("--initial-value", cfg.initial_value,
                        "initial pool value (numeraire units)");
        sub->add_option("--max-iterations", cfg.opt_max_iterations,
                        "optimizer iteration cap");
        sub->add_option("--strategy", cfg.strategy_kind,
                        "strategy kind (momentum|channel)");
        sub->add_option("--lookback", cfg.lookback, "strategy lookback blocks");
        sub->add_option("--cadence", cfg.cadence, "rebalance cadence blocks");
        sub->add_option("--aggressiveness", cfg.aggressiveness,
                        "strategy tilt scale");
        sub->add_option("--syn-blocks", cfg.syn_blocks,
                        "synthetic series length");
        sub->add_option("--syn-assets", cfg.syn_assets,
                        "synthetic asset count (incl. numeraire)");
        sub->add_option("--syn-volatility", cfg.syn_volatility,
                        "synthetic per-block volatility");
        sub->add_option("--syn-drift", cfg.syn_drift,
                        "synthetic per-block drift");
    };

    CLI::App* c_traj = app.add_subcommand(
        "trajectory", "emit per-step weights and deltas for a scheme set");
    CLI::App* c_opt = app.add_subcommand(
        "optimize", "numerically optimal trajectory plus deviation files");
    CLI::App* c_back = app.add_subcommand(
        "backtest", "block-level backtest grid with per-block reports");
    CLI::App* c_cmp = app.add_subcommand(
        "compare", "scheme/fee grid summary without per-block files");
    for (CLI::App* sub : {c_traj, c_opt, c_back, c_cmp}) add_shared(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // Precedence: defaults < config file < explicit flags.
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError("cannot read " + config_path);
            json j;
            in >> j;
            RunConfig file_cfg = cfg;
            file_cfg.from_json(j);
            // Re-apply flag values on top of the file.
            const json flags = cfg.to_json();
            CLI::App* sub = app.get_subcommands().front();
            cfg = file_cfg;
            // Flags that were explicitly given win over the file.
            if (sub->count("--out-dir")) cfg.out_dir = flags["out_dir"];
            if (sub->count("--seed")) cfg.seed = flags["seed"];
            if (sub->count("--steps")) cfg.steps = flags["steps"];
            if (sub->count("--prices")) cfg.prices_csv = flags["prices_csv"];
            if (sub->count("--synthetic")) cfg.synthetic = true;
            if (sub->count("--piecewise")) cfg.piecewise = true;
            if (sub->count("--allow-nonconverged"))
                cfg.allow_nonconverged = true;
            if (sub->count("--initial-value"))
                cfg.initial_value = flags["initial_value"];
            if (sub->count("--max-iterations"))
                cfg.opt_max_iterations = flags["optimizer"]["max_iterations"];
            if (sub->count("--strategy"))
                cfg.strategy_kind = flags["strategy"]["kind"];
            if (sub->count("--lookback"))
                cfg.lookback = flags["strategy"]["lookback_blocks"];
            if (sub->count("--cadence"))
                cfg.cadence = flags["strategy"]["cadence_blocks"];
            if (sub->count("--aggressiveness"))
                cfg.aggressiveness = flags["strategy"]["aggressiveness"];
            if (sub->count("--syn-blocks"))
                cfg.syn_blocks = flags["synthetic_cfg"]["num_blocks"];
            if (sub->count("--syn-assets"))
                cfg.syn_assets = flags["synthetic_cfg"]["num_assets"];
            if (sub->count("--syn-volatility"))
                cfg.syn_volatility = flags["synthetic_cfg"]["volatility"];
            if (sub->count("--syn-drift"))
                cfg.syn_drift = flags["synthetic_cfg"]["drift"];
        }
        if (!cli_start.empty()) cfg.start = cli_start;
        if (!cli_end.empty()) cfg.end = cli_end;
        if (!cli_schemes.empty()) cfg.schemes = cli_schemes;
        if (!cli_fees.empty()) cfg.fees = cli_fees;

        if (c_traj->parsed()) return cmd_trajectory(cfg);
        if (c_opt->parsed()) return cmd_optimize(cfg);
        if (c_back->parsed()) return run_grid(cfg, true);
        if (c_cmp->parsed()) return run_grid(cfg, false);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
