#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chemodem/circuit.hpp"
#include "chemodem/config.hpp"
#include "chemodem/csv.hpp"
#include "chemodem/dcs2.hpp"
#include "chemodem/demod.hpp"
#include "chemodem/errors.hpp"
#include "chemodem/experiment.hpp"
#include "chemodem/hill.hpp"
#include "chemodem/rng.hpp"

using namespace chemodem;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string output;
    long long runs = -1;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path,
                    "config file (key = value lines with [sections])");
    cmd->add_option("-o,--output", opts.output, "output directory (overrides experiment.output)");
    cmd->add_option("--runs", opts.runs, "override the run count");
    cmd->add_option("--seed", opts.seed, "override the master seed");
}

Config load_config(const std::string& path) {
    return path.empty() ? Config::parse_string("") : Config::parse_file(path);
}

ExperimentConfig load_experiment(const CommonOpts& opts, const Config& file) {
    if (file.get_string("experiment.scenario", "colocated") == "dcs2")
        throw ConfigError("scenario 'dcs2' is served by the fit-dcs2 subcommand");
    ExperimentConfig cfg = experiment_from_config(file);
    if (!opts.output.empty()) cfg.output_dir = opts.output;
    if (opts.runs >= 0) cfg.runs = static_cast<int>(opts.runs);
    if (opts.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(opts.seed);
    cfg.validate();
    return cfg;
}

void warn_unused(const Config& file) {
    for (const std::string& key : file.unused_keys())
        std::cerr << "warning: unused config key '" << key << "'\n";
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write output file: " + p.string());
    return os;
}

fs::path require_output(const ExperimentConfig& cfg, const char* cmd) {
    if (cfg.output_dir.empty())
        throw ConfigError(std::string(cmd) +
                          " needs an output directory (--output or [experiment] output)");
    return fs::path(cfg.output_dir);
}

void emit(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream os = open_out(out_path);
    os << report.dump(2) << "\n";
}

std::string sanitize(const std::string& label) {
    std::string out = label;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

json ber_report(const char* command, const ExperimentConfig& cfg, const BERResultSet& res) {
    json report;
    report["command"] = command;
    report["scenario"] = to_string(cfg.scenario);
    report["runs_per_symbol"] = cfg.runs;
    report["master_seed"] = cfg.master_seed;
    json methods = json::array();
    for (const BERSeries& s : res.methods) {
        const BERPoint& last = s.points.back();
        json m;
        m["method"] = s.method;
        m["final"] = {{"time", last.time},
                      {"ber", last.ber},
                      {"errors", last.errors},
                      {"runs_per_symbol", last.runs_per_symbol}};
        if (last.threshold >= 0) m["final"]["threshold"] = last.threshold;
        double best = 2.0;
        for (const BERPoint& p : s.points) best = std::min(best, p.ber);
        m["min_ber"] = best;
        methods.push_back(std::move(m));
    }
    report["methods"] = methods;
    if (!cfg.output_dir.empty()) report["output"] = cfg.output_dir;
    return report;
}

void cmd_simulate(const CommonOpts& opts, bool events) {
    Config file = load_config(opts.config_path);
    ExperimentConfig cfg = load_experiment(opts, file);
    warn_unused(file);
    fs::path root = require_output(cfg, "simulate");
    fs::create_directories(root / "trajectories");
    {
        std::ofstream os = open_out(root / "config.snapshot");
        os << file.text();
    }

    json index = json::array();
    long long total_events = 0;
    for (int k = 0; k < cfg.symbol_count(); ++k)
        for (int r = 0; r < cfg.runs; ++r) {
            std::vector<std::string> names;
            Trajectory traj = simulate_channel_trajectory(cfg, k, r, &names);
            std::string base = "symbol" + std::to_string(k) + "_run" + std::to_string(r);
            {
                std::ofstream os = open_out(root / "trajectories" / (base + ".csv"));
                traj.write_grid_csv(os, names, cfg.sample_dt);
            }
            if (events) {
                std::ofstream os = open_out(root / "trajectories" / (base + ".events.csv"));
                traj.write_events(os, names);
            }
            total_events += static_cast<long long>(traj.times.size());
            index.push_back({{"symbol", k},
                             {"run", r},
                             {"events", traj.times.size()},
                             {"file", "trajectories/" + base + ".csv"}});
        }

    json summary;
    summary["command"] = "simulate";
    summary["scenario"] = to_string(cfg.scenario);
    summary["symbols"] = cfg.symbol_count();
    summary["runs_per_symbol"] = cfg.runs;
    summary["horizon"] = cfg.horizon;
    summary["master_seed"] = cfg.master_seed;
    summary["total_events"] = total_events;
    summary["trajectories"] = index;
    {
        std::ofstream os = open_out(root / "summary.json");
        os << summary.dump(2) << "\n";
    }
    std::cout << "wrote " << index.size() << " trajectories to " << root.string() << "\n";
}

void cmd_demod(const CommonOpts& opts, bool variants) {
    Config file = load_config(opts.config_path);
    ExperimentConfig cfg = load_experiment(opts, file);
    warn_unused(file);
    if (variants && cfg.scenario != Scenario::colocated)
        throw ConfigError("--variants applies to the colocated scenario only");
    fs::path root = require_output(cfg, "demod");

    BERResultSet res = run_ber_experiment(cfg, {"history-filter"});
    for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
    write_experiment_outputs(cfg, file.text(), res);

    if (variants) {
        HypothesisBank bank = build_hypothesis_bank(cfg);
        int exported = std::min(cfg.export_runs, cfg.runs);
        for (int k = 0; k < cfg.symbol_count(); ++k)
            for (int r = 0; r < exported; ++r) {
                ChannelRun ch = simulate_channel(cfg, k, r);
                std::string base = "symbol" + std::to_string(k) + "_run" + std::to_string(r);
                for (int h = 0; h < cfg.symbol_count(); ++h) {
                    std::string stem = base + "_hyp" + std::to_string(h);
                    FilterPath mid = intermediate_filter(
                        ch.xstar, ch.input, bank.rectangles[static_cast<std::size_t>(h)],
                        cfg.receptors.unbinding_rate, cfg.horizon, cfg.log_prior(h),
                        cfg.sample_dt);
                    std::ofstream os1 = open_out(root / "filters" / (stem + "_intermediate.csv"));
                    mid.write_csv(os1);
                    FilterPath pos = positive_filter(
                        ch.xstar, ch.input, bank.amplitudes[static_cast<std::size_t>(h)],
                        cfg.receptors.unbinding_rate, cfg.horizon, cfg.sample_dt);
                    std::ofstream os2 = open_out(root / "filters" / (stem + "_positive.csv"));
                    pos.write_csv(os2);
                }
            }
    }

    std::cout << ber_report("demod", cfg, res).dump(2) << "\n";
}

void cmd_ber_like(const char* command, const CommonOpts& opts,
                  std::vector<std::string> methods) {
    Config file = load_config(opts.config_path);
    ExperimentConfig cfg = load_experiment(opts, file);
    warn_unused(file);
    if (methods.empty()) methods = kAllBerMethods;
    BERResultSet res = run_ber_experiment(cfg, methods);
    for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
    if (!cfg.output_dir.empty()) write_experiment_outputs(cfg, file.text(), res);
    std::cout << ber_report(command, cfg, res).dump(2) << "\n";
}

void cmd_fit_hill(std::vector<double> amplitudes, bool seeded, const std::string& out,
                  long long grid_points, double q_max_factor, long long max_sweeps) {
    if (amplitudes.empty()) amplitudes = {11.0, 58.0};
    HillFitConfig fc;
    if (grid_points > 0) fc.grid_points = static_cast<int>(grid_points);
    if (q_max_factor > 0) fc.q_max_factor = q_max_factor;
    if (max_sweeps > 0) fc.max_sweeps = static_cast<int>(max_sweeps);

    json fits = json::array();
    for (double a : amplitudes) {
        HillParams p = seeded ? fit_hill_seeded(a, fc) : fit_hill(a, fc);
        json j = json::parse(hill_to_json(p));
        j["target_at_a"] = std::log(a) - 1.0;
        j["fit_at_a"] = hill_eval(p, a);
        fits.push_back(std::move(j));
    }
    json report;
    report["command"] = "fit-hill";
    report["seeded"] = seeded;
    report["fits"] = fits;
    emit(report, out);
}

void cmd_steady_state(const CommonOpts& opts, bool per_voxel, const std::string& out) {
    Config file = load_config(opts.config_path);
    ExperimentConfig cfg = load_experiment(opts, file);
    warn_unused(file);

    json report;
    report["command"] = "steady-state";
    report["scenario"] = to_string(cfg.scenario);
    json symbols = json::array();
    if (cfg.scenario == Scenario::colocated) {
        for (double amp : cfg.symbols.amplitudes) {
            RenewalStats st = renewal_stats(cfg.receptors.binding_rate,
                                            cfg.receptors.unbinding_rate, amp,
                                            cfg.receptors.count);
            symbols.push_back(
                {{"amplitude", amp},
                 {"mean_interval", st.mean_interval},
                 {"interval_variance", st.interval_variance},
                 {"stationary_active", st.x_star},
                 {"expected_activations",
                  cfg.receptors.count * cfg.symbols.duration / st.mean_interval}});
        }
        json phis = json::array();
        for (double input : cfg.symbols.amplitudes)
            for (double ref : cfg.symbols.amplitudes)
                phis.push_back(
                    {{"input", input}, {"reference", ref}, {"phi", phi(input, ref)}});
        report["phi"] = phis;
    } else {
        for (double rate : cfg.emission_rates) {
            SteadyState ss = steady_state_mean(cfg.grid, rate);
            json entry = {{"emission_rate", rate}, {"receiver_mean", ss.receiver}};
            if (per_voxel) entry["per_voxel"] = ss.per_voxel;
            symbols.push_back(std::move(entry));
        }
    }
    report["symbols"] = symbols;
    emit(report, out);
}

void cmd_check_appendix_c(long long runs, double k_a, double horizon, double min_agreement,
                          long long seed, const std::string& out) {
    if (runs < 1) throw ConfigError("--runs must be >= 1");
    if (!(k_a > 0.0)) throw ConfigError("--k-a must be positive");
    if (!(horizon > 10.0)) throw ConfigError("--horizon must exceed the last impulse at t = 10");
    if (!(min_agreement >= 0.0) || min_agreement > 1.0)
        throw ConfigError("--min-agreement must lie in [0, 1]");

    bool ok = true;
    json scenarios = json::array();
    int index = 0;
    for (const AppendixCScenario& sc : appendix_c_scenarios()) {
        int species = static_cast<int>(sc.expected.size());
        DeterministicResult det = deterministic_annihilation(sc.impulses, species);
        bool det_ok = !det.order_ambiguous && det.final_counts == sc.expected;

        std::vector<CountingPath> prods = impulse_productions(sc.impulses, species);
        long long agree = 0;
        for (long long r = 0; r < runs; ++r) {
            Rng rng(static_cast<std::uint64_t>(seed),
                    (static_cast<std::uint64_t>(index) << 32) | static_cast<std::uint64_t>(r));
            CountSeries series = annihilate(prods, k_a, horizon, rng);
            if (series.at(horizon) == sc.expected) ++agree;
        }
        double fraction = static_cast<double>(agree) / static_cast<double>(runs);
        bool sc_ok = det_ok && fraction >= min_agreement;
        ok = ok && sc_ok;
        scenarios.push_back({{"name", sc.name},
                             {"expected", sc.expected},
                             {"deterministic", det.final_counts},
                             {"deterministic_ok", det_ok},
                             {"order_ambiguous", det.order_ambiguous},
                             {"stochastic_runs", runs},
                             {"agreement", fraction},
                             {"ok", sc_ok}});
        ++index;
    }

    json report;
    report["command"] = "check-appendix-c";
    report["k_a"] = k_a;
    report["horizon"] = horizon;
    report["min_agreement"] = min_agreement;
    report["scenarios"] = scenarios;
    report["ok"] = ok;
    emit(report, out);
    if (!ok) throw SimulationError("annihilation steady states not reproduced");
}

json params_json(const Dcs2Params& p) {
    return {{"g_plus", p.g_plus}, {"g_minus", p.g_minus}, {"a", p.a},  {"d2", p.d2},
            {"k3", p.k3},         {"d3", p.d3},           {"k4", p.k4}, {"d4", p.d4},
            {"k5", p.k5}};
}

Dcs2Params apply_free(const Config& file, const std::string& prefix, Dcs2Params base) {
    base.g_plus = file.get_double(prefix + ".g_plus", base.g_plus);
    base.g_minus = file.get_double(prefix + ".g_minus", base.g_minus);
    base.a = file.get_double(prefix + ".a", base.a);
    base.d2 = file.get_double(prefix + ".d2", base.d2);
    base.k3 = file.get_double(prefix + ".k3", base.k3);
    return base;
}

void apply_fixed(const Config& file, Dcs2Params& p) {
    p.d3 = file.get_double("dcs2.fixed.d3", p.d3);
    p.k4 = file.get_double("dcs2.fixed.k4", p.k4);
    p.d4 = file.get_double("dcs2.fixed.d4", p.d4);
    p.k5 = file.get_double("dcs2.fixed.k5", p.k5);
}

StepSignal parse_profile(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    std::string t;
    while (in >> t) tokens.push_back(t);
    if (tokens.size() != 2 && tokens.size() != 4)
        throw ConfigError(key + ": expected 'amplitude duration' or 'amplitude duration pulses gap'");
    auto num = [&](const std::string& s, const char* what) {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError(key + ": bad " + what + " '" + s + "'");
    };
    double amplitude = 0.0;
    bool numeric = false;
    try {
        std::size_t pos = 0;
        amplitude = std::stod(tokens[0], &pos);
        numeric = pos == tokens[0].size();
    } catch (const std::exception&) {
    }
    if (!numeric) amplitude = msn2_amplitude(tokens[0]);
    double duration = num(tokens[1], "duration");
    int pulses = 1;
    double gap = 1.0;
    if (tokens.size() == 4) {
        double p = num(tokens[2], "pulse count");
        pulses = static_cast<int>(std::llround(p));
        if (pulses != p) throw ConfigError(key + ": pulse count must be an integer");
        gap = num(tokens[3], "gap");
    }
    return pulse_train(amplitude, pulses, duration, gap);
}

void cmd_fit_dcs2(const CommonOpts& opts, const std::string& out) {
    Config file = load_config(opts.config_path);
    if (file.get_string("experiment.scenario", "dcs2") != "dcs2")
        throw ConfigError("fit-dcs2 expects scenario 'dcs2'");
    std::string output_dir = file.get_string("experiment.output", "");
    if (!opts.output.empty()) output_dir = opts.output;

    std::string mode = file.get_string("dcs2.mode", "synthetic");
    Dcs2FitConfig fc;
    fc.dt = file.get_double("dcs2.dt", fc.dt);
    fc.max_iterations = static_cast<int>(file.get_int("dcs2.max_iterations", fc.max_iterations));
    fc.tolerance = file.get_double("dcs2.tolerance", fc.tolerance);

    Dcs2Params generic;
    generic.g_plus = 1e-3;
    generic.g_minus = 0.5;
    generic.a = 1000.0;
    generic.d2 = 1.0;
    generic.k3 = 0.1;
    apply_fixed(file, generic);
    Dcs2Params initial = apply_free(file, "dcs2.initial", generic);
    initial.refresh_hill();
    initial.validate();

    std::vector<Dcs2Dataset> datasets;
    Dcs2Params truth;
    bool have_truth = false;

    if (mode == "synthetic") {
        apply_fixed(file, truth);
        truth = apply_free(file, "dcs2.truth", truth);
        truth.refresh_hill();
        truth.validate();

        double sample_dt = file.get_double("dcs2.sample_dt", 2.5);
        long long samples = file.get_int("dcs2.samples", 64);
        if (samples < 2) throw ConfigError("dcs2.samples must be >= 2");
        if (!(sample_dt > 0.0)) throw ConfigError("dcs2.sample_dt must be positive");
        double horizon = file.get_double("dcs2.horizon", 160.0);
        horizon = std::max(horizon, sample_dt * static_cast<double>(samples));

        std::vector<std::pair<std::string, StepSignal>> profiles;
        std::vector<std::string> keys = file.keys_with_prefix("dcs2.profiles.");
        if (keys.empty()) {
            profiles.emplace_back("100nM_20min", pulse_train(313.2, 1, 20.0, 1.0));
            profiles.emplace_back("275nM_40min", pulse_train(744.5, 1, 40.0, 1.0));
            profiles.emplace_back("690nM_10min", pulse_train(1107.8, 1, 10.0, 1.0));
            profiles.emplace_back("690nM_30min", pulse_train(1107.8, 1, 30.0, 1.0));
            profiles.emplace_back("3uM_20min", pulse_train(1410.1, 1, 20.0, 1.0));
            profiles.emplace_back("3uM_50min", pulse_train(1410.1, 1, 50.0, 1.0));
        } else {
            const std::string prefix = "dcs2.profiles.";
            for (const std::string& key : keys)
                profiles.emplace_back(key.substr(prefix.size()),
                                      parse_profile(file.get_string(key), key));
        }

        for (const auto& [label, msn2] : profiles) {
            Dcs2Trajectory traj = simulate_dcs2(truth, msn2, horizon, fc.dt);
            std::vector<double> values;
            values.reserve(static_cast<std::size_t>(samples));
            for (long long i = 1; i <= samples; ++i)
                values.push_back(traj.myfp_at(sample_dt * static_cast<double>(i)));
            Dcs2Dataset ds;
            ds.label = label;
            ds.msn2 = msn2;
            ds.myfp = SampledSeries::uniform(sample_dt, sample_dt, values);
            datasets.push_back(std::move(ds));
        }
        have_truth = true;
    } else if (mode == "data") {
        std::string path = file.get_string("dcs2.data.timeseries");
        Dcs2Ingest ingest = ingest_timeseries(path);
        for (const std::string& w : ingest.warnings) std::cerr << "warning: " << w << "\n";
        for (Dcs2Dataset& ds : ingest.datasets) {
            std::string key = "dcs2.profiles." + ds.label;
            if (!file.has(key))
                throw ConfigError("no input profile for dataset '" + ds.label + "' (add " + key +
                                  " = amplitude duration [pulses gap])");
            ds.msn2 = parse_profile(file.get_string(key), key);
            datasets.push_back(std::move(ds));
        }
    } else {
        throw ConfigError("dcs2.mode must be synthetic or data");
    }

    warn_unused(file);
    Dcs2FitResult fit = fit_dcs2(datasets, initial, fc);

    json report;
    report["command"] = "fit-dcs2";
    report["mode"] = mode;
    json labels = json::array();
    for (const Dcs2Dataset& ds : datasets) labels.push_back(ds.label);
    report["datasets"] = labels;
    report["initial"] = params_json(initial);
    report["fitted"] = params_json(fit.params);
    report["error"] = fit.error;
    report["per_dataset_error"] = fit.per_dataset_error;
    report["degraded"] = fit.degraded;
    report["unidentifiable"] = fit.unidentifiable;
    if (have_truth) {
        report["truth"] = params_json(truth);
        auto rel = [](double fitted, double expected) {
            return std::abs(fitted - expected) / std::abs(expected);
        };
        report["relative_error"] = {{"g_plus", rel(fit.params.g_plus, truth.g_plus)},
                                    {"g_minus", rel(fit.params.g_minus, truth.g_minus)},
                                    {"a", rel(fit.params.a, truth.a)},
                                    {"d2", rel(fit.params.d2, truth.d2)},
                                    {"k3", rel(fit.params.k3, truth.k3)}};
    }
    emit(report, out);

    if (!output_dir.empty()) {
        fs::path root(output_dir);
        fs::create_directories(root);
        {
            std::ofstream os = open_out(root / "config.snapshot");
            os << file.text();
        }
        {
            std::ofstream os = open_out(root / "summary.json");
            os << report.dump(2) << "\n";
        }
        Dcs2Params fitted = fit.params;
        fitted.refresh_hill();
        for (const Dcs2Dataset& ds : datasets) {
            double horizon = std::max(ds.myfp.times().back(), fc.dt);
            Dcs2Trajectory traj = simulate_dcs2(fitted, ds.msn2, horizon, fc.dt);
            std::ofstream os = open_out(root / ("fit_" + sanitize(ds.label) + ".csv"));
            os << "time,observed,fitted\n";
            const std::vector<double>& times = ds.myfp.times();
            const std::vector<double>& observed = ds.myfp.values();
            for (std::size_t i = 0; i < times.size(); ++i)
                os << csv::format_double(times[i], 12) << ','
                   << csv::format_double(observed[i], 12) << ','
                   << csv::format_double(traj.myfp_at(times[i]), 12) << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemical-reaction demodulation toolkit for molecular communication"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    bool sim_events = false;
    CLI::App* sim = app.add_subcommand("simulate", "run channel SSA and export trajectories");
    add_common(sim, sim_opts);
    sim->add_flag("--events", sim_events, "also export raw event logs");
    sim->callback([&] { cmd_simulate(sim_opts, sim_events); });

    CommonOpts demod_opts;
    bool demod_variants = false;
    CLI::App* demod = app.add_subcommand("demod", "run the history filters and export paths");
    add_common(demod, demod_opts);
    demod->add_flag("--variants", demod_variants,
                    "also export intermediate/positive-part filters (colocated only)");
    demod->callback([&] { cmd_demod(demod_opts, demod_variants); });

    CommonOpts ber_opts;
    std::vector<std::string> ber_methods;
    CLI::App* ber = app.add_subcommand("ber", "bit-error-rate sweep over decision times");
    add_common(ber, ber_opts);
    ber->add_option("--methods", ber_methods,
                    "subset of: history-filter molecular-circuit one-sample");
    ber->callback([&] { cmd_ber_like("ber", ber_opts, ber_methods); });

    CommonOpts base_opts;
    CLI::App* baseline = app.add_subcommand("baseline", "one-sample threshold baseline");
    add_common(baseline, base_opts);
    baseline->callback([&] { cmd_ber_like("baseline", base_opts, {"one-sample"}); });

    std::vector<double> hill_amplitudes;
    bool hill_seeded = false;
    std::string hill_out;
    long long hill_grid = 0, hill_sweeps = 0;
    double hill_qmax = 0.0;
    CLI::App* hill = app.add_subcommand("fit-hill", "fit Hill functions to the positive-part target");
    hill->add_option("-a,--amplitude", hill_amplitudes, "reference amplitude(s), default 11 58");
    hill->add_flag("--seeded", hill_seeded, "single-start fit from the heuristic seed");
    hill->add_option("--out", hill_out, "write the JSON report to a file");
    hill->add_option("--grid-points", hill_grid, "fit grid size (default 200)");
    hill->add_option("--q-max-factor", hill_qmax, "upper fit bound as a multiple of a (default 100)");
    hill->add_option("--max-sweeps", hill_sweeps, "coordinate-descent sweep cap (default 200)");
    hill->callback([&] {
        cmd_fit_hill(hill_amplitudes, hill_seeded, hill_out, hill_grid, hill_qmax, hill_sweeps);
    });

    CommonOpts ss_opts;
    bool ss_per_voxel = false;
    std::string ss_out;
    CLI::App* steady = app.add_subcommand("steady-state", "renewal statistics / receiver means");
    add_common(steady, ss_opts);
    steady->add_flag("--per-voxel", ss_per_voxel, "include per-voxel means (diffusion)");
    steady->add_option("--out", ss_out, "write the JSON report to a file");
    steady->callback([&] { cmd_steady_state(ss_opts, ss_per_voxel, ss_out); });

    long long ac_runs = 1000, ac_seed = 1;
    double ac_ka = 1e4, ac_horizon = 12.0, ac_min = 0.99;
    std::string ac_out;
    CLI::App* appc = app.add_subcommand("check-appendix-c",
                                        "verify annihilation steady states (exact + stochastic)");
    appc->add_option("--runs", ac_runs, "stochastic runs per scenario (default 1000)");
    appc->add_option("--k-a", ac_ka, "annihilation rate (default 1e4)");
    appc->add_option("--horizon", ac_horizon, "stochastic horizon, > 10 (default 12)");
    appc->add_option("--min-agreement", ac_min, "required agreement fraction (default 0.99)");
    appc->add_option("--seed", ac_seed, "master seed");
    appc->add_option("--out", ac_out, "write the JSON report to a file");
    appc->callback([&] {
        cmd_check_appendix_c(ac_runs, ac_ka, ac_horizon, ac_min, ac_seed, ac_out);
    });

    CommonOpts dcs2_opts;
    std::string dcs2_out;
    CLI::App* dcs2 = app.add_subcommand("fit-dcs2", "fit the promoter model (synthetic or data)");
    add_common(dcs2, dcs2_opts);
    dcs2->add_option("--out", dcs2_out, "write the JSON report to a file");
    dcs2->callback([&] { cmd_fit_dcs2(dcs2_opts, dcs2_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
