#include "chemodem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "chemodem/csv.hpp"
#include "chemodem/errors.hpp"
#include "chemodem/circuit.hpp"
#include "json.hpp"

namespace chemodem {

namespace {

std::uint64_t stream_id(int symbol, int run, int stage) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(stage)) << 48) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(symbol)) << 32) |
           static_cast<std::uint32_t>(run);
}

std::vector<double> decision_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw ConfigError("decision-time step must be positive");
    if (!(stop >= start) || !(start >= 0.0))
        throw ConfigError("decision-time range must satisfy 0 <= start <= stop");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        double t = start + step * static_cast<double>(i);
        if (t >= stop) break;
        out.push_back(t);
    }
    out.push_back(stop);
    return out;
}

std::vector<double> default_decision_grid(double horizon) {
    return decision_grid(0.0, std::min(40.0, horizon), 0.5);
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
    if (name == "colocated") return Scenario::colocated;
    if (name == "diffusion") return Scenario::diffusion;
    throw ConfigError("unknown scenario '" + name + "' (expected colocated or diffusion)");
}

std::string to_string(Scenario scenario) {
    return scenario == Scenario::colocated ? "colocated" : "diffusion";
}

int ExperimentConfig::symbol_count() const {
    return scenario == Scenario::colocated ? symbols.count()
                                           : static_cast<int>(emission_rates.size());
}

double ExperimentConfig::log_prior(int k) const {
    if (priors.empty()) return std::log(1.0 / static_cast<double>(symbol_count()));
    double p = priors[static_cast<std::size_t>(k)];
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

void ExperimentConfig::validate() const {
    if (runs < 1) throw ConfigError("run count must be >= 1");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(sample_dt > 0.0) || sample_dt > horizon)
        throw ConfigError("sample_dt must lie in (0, horizon]");
    if (!(k_a > 0.0)) throw ConfigError("annihilation rate k_a must be positive");
    if (export_runs < 0) throw ConfigError("export_runs must be non-negative");
    if (receptors.count < 1 || !(receptors.binding_rate > 0.0) ||
        !(receptors.unbinding_rate > 0.0))
        throw ConfigError("receptor parameters must be positive with count >= 1");

    if (decision_times.empty()) throw ConfigError("decision-time grid is empty");
    for (std::size_t i = 0; i < decision_times.size(); ++i) {
        double t = decision_times[i];
        if (!(t >= 0.0) || t > horizon + 1e-12)
            throw ConfigError("decision times must lie within [0, horizon]");
        if (i > 0 && !(t > decision_times[i - 1]))
            throw ConfigError("decision times must be strictly increasing");
    }

    if (!priors.empty()) {
        if (static_cast<int>(priors.size()) != symbol_count())
            throw ConfigError("priors must match the number of symbols");
        double sum = 0.0;
        bool any = false;
        for (double p : priors) {
            if (!(p >= 0.0)) throw ConfigError("priors must be non-negative");
            any = any || p > 0.0;
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("priors must sum to 1");
        if (!any) throw ConfigError("at least one prior must be positive");
    }

    if (scenario == Scenario::colocated) {
        symbols.validate();
    } else {
        grid.validate();
        if (emission_rates.size() < 2)
            throw ConfigError("diffusion scenario needs at least 2 emission rates");
        for (double r : emission_rates) {
            EmissionSchedule em{r, emission_duration, emission_basal};
            em.validate();
        }
    }
}

ExperimentConfig colocated_defaults() {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::colocated;
    cfg.symbols.amplitudes = {11.0, 58.0};
    cfg.symbols.off_level = 1.0;
    cfg.symbols.duration = 50.0;
    cfg.receptors = ReceptorParams{0.02, 0.5, 100};
    cfg.runs = 100;
    cfg.horizon = 50.0;
    cfg.decision_times = default_decision_grid(cfg.horizon);
    return cfg;
}

ExperimentConfig diffusion_defaults() {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::diffusion;
    cfg.grid.nx = 6;
    cfg.grid.ny = 6;
    cfg.grid.nz = 3;
    cfg.grid.voxel_width = 1.0 / 3.0;
    cfg.grid.diffusion = 1.0;
    cfg.grid.escape_divisor = 50.0;
    cfg.grid.tx = {1, 2, 1};
    cfg.grid.rx = {4, 2, 1};
    cfg.receptors = ReceptorParams{0.135, 1.0, 40};  // binding = 0.005 / width^3
    cfg.emission_rates = {150.0, 600.0};
    cfg.emission_duration = 20.0;
    cfg.emission_basal = 0.0;
    cfg.runs = 100;
    cfg.horizon = 40.0;
    cfg.decision_times = default_decision_grid(cfg.horizon);
    return cfg;
}

ExperimentConfig experiment_from_config(const Config& file) {
    ExperimentConfig cfg =
        scenario_from_string(file.get_string("experiment.scenario", "colocated")) ==
                Scenario::colocated
            ? colocated_defaults()
            : diffusion_defaults();

    cfg.runs = static_cast<int>(file.get_int("experiment.runs", cfg.runs));
    cfg.horizon = file.get_double("experiment.horizon", cfg.horizon);
    cfg.master_seed = static_cast<std::uint64_t>(
        file.get_int("experiment.master_seed", static_cast<long long>(cfg.master_seed)));
    cfg.output_dir = file.get_string("experiment.output", cfg.output_dir);
    cfg.export_runs = static_cast<int>(file.get_int("output.export_runs", cfg.export_runs));

    cfg.receptors.binding_rate =
        file.get_double("receptors.binding_rate", cfg.receptors.binding_rate);
    cfg.receptors.unbinding_rate =
        file.get_double("receptors.unbinding_rate", cfg.receptors.unbinding_rate);
    cfg.receptors.count = static_cast<int>(file.get_int("receptors.count", cfg.receptors.count));

    cfg.priors = file.get_doubles("symbols.priors", cfg.priors);

    if (cfg.scenario == Scenario::colocated) {
        cfg.symbols.amplitudes = file.get_doubles("symbols.amplitudes", cfg.symbols.amplitudes);
        cfg.symbols.off_level = file.get_double("symbols.off_level", cfg.symbols.off_level);
        cfg.symbols.duration = file.get_double("symbols.duration", cfg.symbols.duration);
    } else {
        cfg.grid.nx = static_cast<int>(file.get_int("grid.nx", cfg.grid.nx));
        cfg.grid.ny = static_cast<int>(file.get_int("grid.ny", cfg.grid.ny));
        cfg.grid.nz = static_cast<int>(file.get_int("grid.nz", cfg.grid.nz));
        cfg.grid.voxel_width = file.get_double("grid.voxel_width", cfg.grid.voxel_width);
        cfg.grid.diffusion = file.get_double("grid.diffusion", cfg.grid.diffusion);
        cfg.grid.escape_divisor = file.get_double("grid.escape_divisor", cfg.grid.escape_divisor);
        for (const char* key : {"grid.tx", "grid.rx"}) {
            if (!file.has(key)) continue;
            std::vector<double> v = file.get_doubles(key);
            if (v.size() != 3) throw ConfigError(std::string(key) + " needs 3 coordinates");
            auto& target = key[5] == 't' ? cfg.grid.tx : cfg.grid.rx;
            for (int i = 0; i < 3; ++i) {
                target[static_cast<std::size_t>(i)] = static_cast<int>(std::llround(v[static_cast<std::size_t>(i)]));
                if (target[static_cast<std::size_t>(i)] != v[static_cast<std::size_t>(i)])
                    throw ConfigError(std::string(key) + " coordinates must be integers");
            }
        }
        cfg.emission_rates = file.get_doubles("emission.rates", cfg.emission_rates);
        cfg.emission_duration = file.get_double("emission.duration", cfg.emission_duration);
        cfg.emission_basal = file.get_double("emission.basal", cfg.emission_basal);
    }

    if (file.has("decision.times")) {
        cfg.decision_times = file.get_doubles("decision.times");
    } else {
        double stop = file.get_double("decision.stop", std::min(40.0, cfg.horizon));
        double start = file.get_double("decision.start", 0.0);
        double step = file.get_double("decision.step", 0.5);
        cfg.decision_times = decision_grid(start, stop, step);
    }

    cfg.sample_dt = file.get_double("filters.sample_dt", cfg.sample_dt);
    std::string reference = file.get_string("filters.reference", "mean-field");
    if (reference == "rectangular")
        cfg.rectangular_reference = true;
    else if (reference != "mean-field")
        throw ConfigError("filters.reference must be mean-field or rectangular");

    cfg.k_a = file.get_double("circuit.k_a", cfg.k_a);
    std::string input = file.get_string("circuit.input", "observed");
    if (input == "rectangular")
        cfg.circuit_input = CircuitInput::rectangular;
    else if (input != "observed")
        throw ConfigError("circuit.input must be observed or rectangular");

    cfg.validate();
    return cfg;
}

HypothesisBank build_hypothesis_bank(const ExperimentConfig& cfg) {
    cfg.validate();
    HypothesisBank bank;
    int K = cfg.symbol_count();
    for (int k = 0; k < K; ++k) {
        if (cfg.scenario == Scenario::colocated) {
            double amp = cfg.symbols.amplitudes[static_cast<std::size_t>(k)];
            bank.amplitudes.push_back(amp);
            bank.references.push_back(Reference::step(cfg.symbols.lambda(k)));
            bank.rectangles.push_back(cfg.symbols.lambda(k));
            bank.hills.push_back(fit_hill(amp));
        } else {
            double rate = cfg.emission_rates[static_cast<std::size_t>(k)];
            double amp = steady_state_mean(cfg.grid, rate).receiver;
            double off = cfg.emission_basal > 0.0
                             ? steady_state_mean(cfg.grid, cfg.emission_basal).receiver
                             : 0.0;
            bank.amplitudes.push_back(amp);
            StepSignal rect({0.0, cfg.emission_duration}, {amp, off});
            bank.rectangles.push_back(rect);
            if (cfg.rectangular_reference) {
                bank.references.push_back(Reference::step(rect));
            } else {
                EmissionSchedule em{rate, cfg.emission_duration, cfg.emission_basal};
                bank.references.push_back(
                    Reference::sampled(mean_trajectory(cfg.grid, em, cfg.horizon, cfg.sample_dt)));
            }
            bank.hills.push_back(fit_hill(amp));
        }
    }
    return bank;
}

namespace {

struct ChannelModel {
    ReactionNetwork network;
    std::vector<long long> initial;
    std::vector<ClampedSpecies> clamps;
    int active_species = -1;
    int observed_species = -1;  // -1: observed input is the symbol rectangle
    std::vector<std::string> names;
};

ChannelModel build_channel(const ExperimentConfig& cfg, int symbol) {
    ChannelModel c;
    if (cfg.scenario == Scenario::colocated) {
        ReceptorModel m = make_receptor_model(cfg.receptors);
        c.network = std::move(m.network);
        c.initial.assign(static_cast<std::size_t>(c.network.species_count()), 0);
        c.initial[static_cast<std::size_t>(m.inactive_species)] = cfg.receptors.count;
        c.clamps = {{m.signal_species, cfg.symbols.lambda(symbol)}};
        c.active_species = m.active_species;
    } else {
        EmissionSchedule em{cfg.emission_rates[static_cast<std::size_t>(symbol)],
                            cfg.emission_duration, cfg.emission_basal};
        RdmeModel m = build_rdme(cfg.grid, em, cfg.receptors);
        c.network = std::move(m.network);
        c.initial = std::move(m.initial_state);
        c.clamps = std::move(m.clamps);
        c.active_species = m.active_species;
        c.observed_species = m.receiver_species;
    }
    c.names = c.network.species();
    return c;
}

}  // namespace

ChannelRun simulate_channel(const ExperimentConfig& cfg, int symbol, int run) {
    if (symbol < 0 || symbol >= cfg.symbol_count()) throw ConfigError("symbol index out of range");
    ChannelModel c = build_channel(cfg, symbol);
    Rng rng(cfg.master_seed, stream_id(symbol, run, 0));
    Trajectory traj =
        time_varying_ssa(c.network, std::move(c.initial), c.clamps, cfg.horizon, rng);
    ChannelRun out;
    out.xstar = traj.species_path(c.active_species);
    out.input = c.observed_species >= 0 ? traj.species_path(c.observed_species)
                                        : cfg.symbols.lambda(symbol);
    return out;
}

Trajectory simulate_channel_trajectory(const ExperimentConfig& cfg, int symbol, int run,
                                       std::vector<std::string>* species_names) {
    if (symbol < 0 || symbol >= cfg.symbol_count()) throw ConfigError("symbol index out of range");
    ChannelModel c = build_channel(cfg, symbol);
    if (species_names) *species_names = c.names;
    Rng rng(cfg.master_seed, stream_id(symbol, run, 0));
    return time_varying_ssa(c.network, std::move(c.initial), c.clamps, cfg.horizon, rng);
}

const std::vector<std::string> kAllBerMethods{"history-filter", "molecular-circuit",
                                              "one-sample"};

BERResultSet run_ber_experiment(const ExperimentConfig& cfg,
                                const std::vector<std::string>& methods) {
    cfg.validate();
    if (methods.empty()) throw ConfigError("no BER methods requested");
    bool want_history = false, want_circuit = false, want_one = false;
    for (const std::string& m : methods) {
        if (m == "history-filter")
            want_history = true;
        else if (m == "molecular-circuit")
            want_circuit = true;
        else if (m == "one-sample")
            want_one = true;
        else
            throw ConfigError("unknown BER method '" + m + "'");
    }
    const int K = cfg.symbol_count();
    if (want_one && K != 2) throw ConfigError("one-sample baseline requires exactly 2 symbols");

    HypothesisBank bank = build_hypothesis_bank(cfg);
    const std::vector<double>& T = cfg.decision_times;
    const std::size_t nt = T.size();

    std::vector<std::vector<int>> hist_err(nt, std::vector<int>(static_cast<std::size_t>(K), 0));
    std::vector<std::vector<int>> circ_err = hist_err;
    std::vector<std::vector<std::vector<long long>>> samples(
        static_cast<std::size_t>(K),
        std::vector<std::vector<long long>>(nt,
                                            std::vector<long long>(static_cast<std::size_t>(cfg.runs), 0)));

    std::vector<double> log_priors(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) log_priors[static_cast<std::size_t>(k)] = cfg.log_prior(k);

    for (int k = 0; k < K; ++k) {
        for (int r = 0; r < cfg.runs; ++r) {
            auto with_context = [&](const std::string& what) {
                return "symbol " + std::to_string(k) + " run " + std::to_string(r) + ": " + what;
            };
            try {
                ChannelRun ch = simulate_channel(cfg, k, r);

                if (want_history) {
                    std::vector<FilterPath> paths;
                    paths.reserve(static_cast<std::size_t>(K));
                    for (int h = 0; h < K; ++h)
                        paths.push_back(exact_filter(ch.xstar,
                                                     bank.references[static_cast<std::size_t>(h)],
                                                     cfg.receptors,
                                                     log_priors[static_cast<std::size_t>(h)],
                                                     cfg.horizon, cfg.sample_dt));
                    for (std::size_t ti = 0; ti < nt; ++ti) {
                        int dec = 0;
                        double best = paths[0].at_time(T[ti]);
                        for (int h = 1; h < K; ++h) {
                            double v = paths[static_cast<std::size_t>(h)].at_time(T[ti]);
                            if (v > best) {
                                best = v;
                                dec = h;
                            }
                        }
                        if (dec != k) ++hist_err[ti][static_cast<std::size_t>(k)];
                    }
                }

                if (want_circuit) {
                    std::vector<CountingPath> ys;
                    ys.reserve(static_cast<std::size_t>(K));
                    for (int h = 0; h < K; ++h) {
                        const StepSignal& u = cfg.circuit_input == CircuitInput::observed
                                                  ? ch.input
                                                  : bank.rectangles[static_cast<std::size_t>(h)];
                        Rng rng(cfg.master_seed, stream_id(k, r, 1 + h));
                        ys.push_back(simulate_y(ch.xstar, u,
                                                bank.hills[static_cast<std::size_t>(h)],
                                                cfg.receptors.unbinding_rate, cfg.horizon, rng));
                    }
                    Rng arng(cfg.master_seed, stream_id(k, r, 40));
                    CountSeries series = annihilate(ys, cfg.k_a, cfg.horizon, arng);
                    for (std::size_t ti = 0; ti < nt; ++ti) {
                        int dec = decide(series.at(T[ti]));
                        if (dec != k) ++circ_err[ti][static_cast<std::size_t>(k)];
                    }
                }

                if (want_one)
                    for (std::size_t ti = 0; ti < nt; ++ti)
                        samples[static_cast<std::size_t>(k)][ti][static_cast<std::size_t>(r)] =
                            std::llround(ch.xstar.value_at(T[ti]));
            } catch (const ConfigError& e) {
                throw ConfigError(with_context(e.what()));
            } catch (const SimulationError& e) {
                throw SimulationError(with_context(e.what()));
            }
        }
    }

    BERResultSet out;
    auto make_series = [&](const std::string& method,
                           const std::vector<std::vector<int>>& err) {
        BERSeries series;
        series.method = method;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            BERPoint p;
            p.time = T[ti];
            p.errors = err[ti];
            p.runs_per_symbol = cfg.runs;
            int total = 0;
            for (int e : err[ti]) total += e;
            p.ber = static_cast<double>(total) / static_cast<double>(K * cfg.runs);
            series.points.push_back(std::move(p));
        }
        out.methods.push_back(std::move(series));
    };

    if (want_history) make_series("history-filter", hist_err);
    if (want_circuit) make_series("molecular-circuit", circ_err);
    if (want_one) {
        BERSeries series;
        series.method = "one-sample";
        for (std::size_t ti = 0; ti < nt; ++ti) {
            OneSampleResult os =
                one_sample_baseline(samples[0][ti], samples[1][ti], cfg.receptors.count);
            BERPoint p;
            p.time = T[ti];
            p.errors = {os.errors0, os.errors1};
            p.runs_per_symbol = cfg.runs;
            p.ber = os.ber;
            p.threshold = os.threshold;
            series.points.push_back(std::move(p));
        }
        out.methods.push_back(std::move(series));
    }

    if (cfg.scenario == Scenario::colocated)
        for (const std::string& w : cfg.symbols.warnings()) out.warnings.push_back(w);
    return out;
}

OneSampleResult one_sample_baseline(const std::vector<long long>& symbol0,
                                    const std::vector<long long>& symbol1, int receptor_count) {
    if (symbol0.empty() || symbol1.empty())
        throw ConfigError("one-sample baseline needs samples from both symbols");
    if (receptor_count < 1) throw ConfigError("receptor count must be >= 1");

    OneSampleResult best;
    bool first = true;
    for (int theta = 0; theta <= receptor_count; ++theta) {
        int e0 = 0, e1 = 0;
        for (long long x : symbol0)
            if (x >= theta) ++e0;  // decided 1, transmitted 0
        for (long long x : symbol1)
            if (x < theta) ++e1;  // decided 0, transmitted 1
        if (first || e0 + e1 < best.errors0 + best.errors1) {
            best.threshold = theta;
            best.errors0 = e0;
            best.errors1 = e1;
            first = false;
        }
    }
    best.ber = static_cast<double>(best.errors0 + best.errors1) /
               static_cast<double>(symbol0.size() + symbol1.size());
    return best;
}

OneSampleResult one_sample_baseline(const std::vector<StepSignal>& symbol0,
                                    const std::vector<StepSignal>& symbol1, double t,
                                    int receptor_count) {
    std::vector<long long> s0, s1;
    s0.reserve(symbol0.size());
    s1.reserve(symbol1.size());
    for (const StepSignal& x : symbol0) s0.push_back(std::llround(x.value_at(t)));
    for (const StepSignal& x : symbol1) s1.push_back(std::llround(x.value_at(t)));
    return one_sample_baseline(s0, s1, receptor_count);
}

RmsSeries rms_compare(const std::vector<FilterPath>& a, const std::vector<FilterPath>& b,
                      double sample_dt) {
    if (a.size() != b.size()) throw ConfigError("rms_compare needs paired path sets");
    if (a.size() < 2) throw ConfigError("rms_compare needs at least 2 paired runs");
    if (!(sample_dt > 0.0)) throw ConfigError("rms_compare needs a positive sample step");

    double common = std::numeric_limits<double>::infinity();
    double longest = 0.0;
    for (const std::vector<FilterPath>* set : {&a, &b})
        for (const FilterPath& p : *set) {
            if (p.times.empty()) throw ConfigError("rms_compare got an empty filter path");
            common = std::min(common, p.times.back());
            longest = std::max(longest, p.times.back());
        }

    RmsSeries out;
    if (longest - common > 1e-9)
        out.warnings.push_back("paths have mismatched horizons; truncated to t = " +
                               csv::format_double(common, 12));

    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        double t = sample_dt * static_cast<double>(i);
        if (t >= common) break;
        grid.push_back(t);
    }
    grid.push_back(common);

    for (double t : grid) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i].at_time(t) - b[i].at_time(t);
            acc += d * d;
        }
        out.times.push_back(t);
        out.rms.push_back(std::sqrt(acc / static_cast<double>(a.size())));
    }
    return out;
}

void write_ber_csv(std::ostream& os, const BERResultSet& results) {
    std::size_t symbols = 0;
    for (const BERSeries& s : results.methods)
        for (const BERPoint& p : s.points) symbols = std::max(symbols, p.errors.size());

    os << "method,time,runs_per_symbol,ber,threshold";
    for (std::size_t k = 0; k < symbols; ++k) os << ",errors_" << k;
    os << "\n";
    for (const BERSeries& s : results.methods)
        for (const BERPoint& p : s.points) {
            os << csv::quote(s.method) << ',' << csv::format_double(p.time, 12) << ','
               << p.runs_per_symbol << ',' << csv::format_double(p.ber, 12) << ',';
            if (p.threshold >= 0) os << p.threshold;
            for (std::size_t k = 0; k < symbols; ++k) {
                os << ',';
                if (k < p.errors.size()) os << p.errors[k];
            }
            os << "\n";
        }
}

void write_experiment_outputs(const ExperimentConfig& cfg, const std::string& snapshot_text,
                              const BERResultSet& results) {
    if (cfg.output_dir.empty()) throw ConfigError("output directory not set");
    namespace fs = std::filesystem;
    fs::path root(cfg.output_dir);
    fs::create_directories(root / "trajectories");
    fs::create_directories(root / "filters");

    auto open = [](const fs::path& p) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw ConfigError("cannot write output file: " + p.string());
        return os;
    };

    {
        std::ofstream os = open(root / "config.snapshot");
        os << snapshot_text;
    }
    {
        std::ofstream os = open(root / "ber.csv");
        write_ber_csv(os, results);
    }

    HypothesisBank bank = build_hypothesis_bank(cfg);
    const int K = cfg.symbol_count();
    int exported = std::min(cfg.export_runs, cfg.runs);
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < exported; ++r) {
            std::vector<std::string> names;
            Trajectory traj = simulate_channel_trajectory(cfg, k, r, &names);
            std::string base = "symbol" + std::to_string(k) + "_run" + std::to_string(r);
            {
                std::ofstream os = open(root / "trajectories" / (base + ".csv"));
                traj.write_grid_csv(os, names, cfg.sample_dt);
            }
            ChannelRun ch = simulate_channel(cfg, k, r);
            for (int h = 0; h < K; ++h) {
                FilterPath path = exact_filter(ch.xstar,
                                               bank.references[static_cast<std::size_t>(h)],
                                               cfg.receptors, cfg.log_prior(h), cfg.horizon,
                                               cfg.sample_dt);
                std::ofstream os =
                    open(root / "filters" / (base + "_hyp" + std::to_string(h) + ".csv"));
                path.write_csv(os);
            }
        }

    nlohmann::json summary;
    summary["scenario"] = to_string(cfg.scenario);
    summary["runs"] = cfg.runs;
    summary["horizon"] = cfg.horizon;
    summary["master_seed"] = cfg.master_seed;
    summary["receptors"] = {{"binding_rate", cfg.receptors.binding_rate},
                            {"unbinding_rate", cfg.receptors.unbinding_rate},
                            {"count", cfg.receptors.count}};
    if (cfg.scenario == Scenario::colocated) {
        summary["symbols"] = cfg.symbols.amplitudes;
        summary["off_level"] = cfg.symbols.off_level;
        summary["duration"] = cfg.symbols.duration;
    } else {
        summary["emission_rates"] = cfg.emission_rates;
        summary["emission_duration"] = cfg.emission_duration;
        summary["channel_amplitudes"] = bank.amplitudes;
    }
    summary["methods"] = nlohmann::json::array();
    for (const BERSeries& s : results.methods) {
        nlohmann::json m;
        m["method"] = s.method;
        const BERPoint& last = s.points.back();
        m["final"] = {{"time", last.time},
                      {"ber", last.ber},
                      {"errors", last.errors},
                      {"runs_per_symbol", last.runs_per_symbol}};
        if (last.threshold >= 0) m["final"]["threshold"] = last.threshold;
        double best = 2.0;
        for (const BERPoint& p : s.points) best = std::min(best, p.ber);
        m["min_ber"] = best;
        summary["methods"].push_back(std::move(m));
    }
    summary["warnings"] = results.warnings;
    summary["files"] = {{"ber", "ber.csv"},
                        {"config", "config.snapshot"},
                        {"trajectories", "trajectories/"},
                        {"filters", "filters/"}};
    {
        std::ofstream os = open(root / "summary.json");
        os << summary.dump(2) << "\n";
    }
}

}  // namespace chemodem
