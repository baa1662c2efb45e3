#include "chemodem/crn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "chemodem/csv.hpp"
#include "chemodem/errors.hpp"

namespace chemodem {

int ReactionNetwork::add_species(std::string name) {
    if (name.empty()) throw ConfigError("species name must be non-empty");
    if (species_index(name) >= 0) throw ConfigError("duplicate species name: " + name);
    species_.push_back(std::move(name));
    return static_cast<int>(species_.size()) - 1;
}

int ReactionNetwork::species_index(std::string_view name) const {
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name) return static_cast<int>(i);
    return -1;
}

int ReactionNetwork::add_reaction(Reaction r) {
    if (!(r.rate > 0.0) || !std::isfinite(r.rate))
        throw ConfigError("reaction rate must be positive and finite" +
                          (r.label.empty() ? "" : " (" + r.label + ")"));
    auto check = [&](const std::vector<std::pair<int, int>>& side, const char* what) {
        for (std::size_t i = 0; i < side.size(); ++i) {
            auto [s, mult] = side[i];
            if (s < 0 || s >= species_count())
                throw ConfigError(std::string("reaction references unknown species in ") + what);
            if (mult < 1) throw ConfigError(std::string("stoichiometry must be >= 1 in ") + what);
            for (std::size_t j = 0; j < i; ++j)
                if (side[j].first == s)
                    throw ConfigError(std::string("species listed twice in ") + what +
                                      "; merge multiplicities instead");
        }
    };
    check(r.reactants, "reactants");
    check(r.products, "products");
    reactions_.push_back(std::move(r));
    return static_cast<int>(reactions_.size()) - 1;
}

std::vector<std::pair<int, int>> ReactionNetwork::net_change(int r) const {
    const Reaction& rx = reaction(r);
    std::vector<std::pair<int, int>> net;
    auto accumulate = [&net](int species, int delta) {
        for (auto& [s, d] : net)
            if (s == species) {
                d += delta;
                return;
            }
        net.emplace_back(species, delta);
    };
    for (auto [s, m] : rx.reactants) accumulate(s, -m);
    for (auto [s, m] : rx.products) accumulate(s, m);
    std::erase_if(net, [](const auto& sd) { return sd.second == 0; });
    return net;
}

double propensity(const Reaction& r, std::span<const long long> state) {
    double p = r.rate;
    for (auto [s, mult] : r.reactants) {
        long long x = state[static_cast<std::size_t>(s)];
        if (x < mult) return 0.0;
        for (int k = 0; k < mult; ++k) p *= static_cast<double>(x - k);
    }
    return p;
}

namespace {

// Binary sum tree over per-reaction propensities: O(log n) update and O(log n)
// categorical sampling, which keeps large RDME networks fast.
class SumTree {
  public:
    explicit SumTree(std::size_t count) {
        n_ = 1;
        while (n_ < std::max<std::size_t>(count, 1)) n_ <<= 1;
        node_.assign(2 * n_, 0.0);
    }

    void set(std::size_t i, double v) {
        std::size_t k = n_ + i;
        node_[k] = v;
        for (k >>= 1; k >= 1; k >>= 1) node_[k] = node_[2 * k] + node_[2 * k + 1];
    }

    double total() const { return node_[1]; }

    std::size_t sample(double target) const {
        std::size_t k = 1;
        while (k < n_) {
            double left = node_[2 * k];
            if (target < left) {
                k = 2 * k;
            } else {
                target -= left;
                k = 2 * k + 1;
            }
        }
        std::size_t i = k - n_;
        if (node_[k] > 0.0) return i;
        // Rounding pushed us onto a zero leaf; take the nearest active one.
        for (std::size_t d = 1; d < n_; ++d) {
            if (i >= d && node_[n_ + i - d] > 0.0) return i - d;
            if (i + d < n_ && node_[n_ + i + d] > 0.0) return i + d;
        }
        throw SimulationError("sum tree sample with no active reaction");
    }

  private:
    std::size_t n_ = 1;
    std::vector<double> node_;
};

class Engine {
  public:
    Engine(const ReactionNetwork& net, std::vector<long long> state)
        : net_(net),
          x_(std::move(state)),
          prop_(static_cast<std::size_t>(net.reaction_count()), 0.0),
          tree_(static_cast<std::size_t>(net.reaction_count())),
          rx_of_species_(static_cast<std::size_t>(net.species_count())),
          stamp_(static_cast<std::size_t>(net.reaction_count()), 0) {
        if (static_cast<int>(x_.size()) != net.species_count())
            throw ConfigError("initial state size does not match species count");
        for (long long v : x_)
            if (v < 0) throw ConfigError("initial counts must be non-negative");
        for (int r = 0; r < net.reaction_count(); ++r) {
            for (auto [s, m] : net.reaction(r).reactants)
                rx_of_species_[static_cast<std::size_t>(s)].push_back(r);
            net_delta_.push_back(net.net_change(r));
        }
        for (int r = 0; r < net.reaction_count(); ++r) refresh_one(r);
    }

    const std::vector<long long>& state() const { return x_; }
    long long count(int s) const { return x_[static_cast<std::size_t>(s)]; }

    void set_count(int s, long long v) {
        x_[static_cast<std::size_t>(s)] = v;
        refresh_dependents(s);
    }

    // Advance from t to t_end, invoking sink for every firing.
    template <class Sink>
    double run(double t, double t_end, Rng& rng, Sink&& sink) {
        while (true) {
            double total = tree_.total();
            if (!std::isfinite(total))
                throw SimulationError("total propensity is not finite (overflow)");
            if (!(total > 0.0)) return t_end;  // nothing can fire: hold state
            double dt = rng.exponential(total);
            if (t + dt >= t_end) return t_end;
            t += dt;
            std::size_t j = tree_.sample(rng.uniform() * total);
            const auto& deltas = net_delta_[j];
            for (auto [s, d] : deltas) x_[static_cast<std::size_t>(s)] += d;
            sink(t, std::span<const std::pair<int, int>>(deltas));
            ++stamp_gen_;
            for (auto [s, d] : deltas) refresh_dependents_stamped(s);
        }
    }

  private:
    void refresh_one(int r) {
        double p = propensity(net_.reaction(r), x_);
        if (!std::isfinite(p))
            throw SimulationError("propensity overflowed for reaction " +
                                  std::to_string(r));
        prop_[static_cast<std::size_t>(r)] = p;
        tree_.set(static_cast<std::size_t>(r), p);
    }

    void refresh_dependents(int s) {
        ++stamp_gen_;
        refresh_dependents_stamped(s);
    }

    void refresh_dependents_stamped(int s) {
        for (int r : rx_of_species_[static_cast<std::size_t>(s)]) {
            if (stamp_[static_cast<std::size_t>(r)] == stamp_gen_) continue;
            stamp_[static_cast<std::size_t>(r)] = stamp_gen_;
            refresh_one(r);
        }
    }

    const ReactionNetwork& net_;
    std::vector<long long> x_;
    std::vector<double> prop_;
    SumTree tree_;
    std::vector<std::vector<int>> rx_of_species_;
    std::vector<std::vector<std::pair<int, int>>> net_delta_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t stamp_gen_ = 0;
};

void validate_clamps(const ReactionNetwork& net, const std::vector<ClampedSpecies>& clamps,
                     double horizon) {
    std::vector<int> seen;
    for (const auto& c : clamps) {
        if (c.species < 0 || c.species >= net.species_count())
            throw ConfigError("clamp references unknown species");
        if (std::find(seen.begin(), seen.end(), c.species) != seen.end())
            throw ConfigError("species clamped by more than one schedule: " +
                              net.species_name(c.species));
        seen.push_back(c.species);
        if (c.schedule.front_time() > 0.0)
            throw ConfigError("clamp schedule for " + net.species_name(c.species) +
                              " leaves a gap before its first breakpoint");
        for (double v : c.schedule.values()) {
            if (!(v >= 0.0) || v != std::floor(v) || v > 9e15)
                throw ConfigError("clamp levels must be non-negative integers");
        }
        (void)horizon;
    }
}

template <class Sink>
void run_with_clamps(const ReactionNetwork& net, std::vector<long long> initial_state,
                     const std::vector<ClampedSpecies>& clamps, double horizon, Rng& rng,
                     Sink&& sink, std::vector<long long>* initial_out) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw ConfigError("horizon must be finite and non-negative");
    validate_clamps(net, clamps, horizon);

    for (const auto& c : clamps)
        initial_state[static_cast<std::size_t>(c.species)] =
            static_cast<long long>(c.schedule.value_at(0.0));
    Engine engine(net, std::move(initial_state));
    if (initial_out) *initial_out = engine.state();

    std::vector<double> breaks;
    for (const auto& c : clamps)
        for (double t : c.schedule.times())
            if (t > 0.0 && t < horizon) breaks.push_back(t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.push_back(horizon);

    double t = 0.0;
    std::vector<std::pair<int, int>> clamp_deltas;
    for (double b : breaks) {
        t = engine.run(t, b, rng, sink);
        if (b >= horizon) break;
        clamp_deltas.clear();
        for (const auto& c : clamps) {
            long long target = static_cast<long long>(c.schedule.value_at(b));
            long long cur = engine.count(c.species);
            if (target != cur) clamp_deltas.emplace_back(c.species, static_cast<int>(target - cur));
        }
        if (!clamp_deltas.empty()) {
            for (auto [s, d] : clamp_deltas) engine.set_count(s, engine.count(s) + d);
            sink(b, std::span<const std::pair<int, int>>(clamp_deltas));
        }
    }
}

struct TrajectoryRecorder {
    Trajectory* out;
    void operator()(double t, std::span<const std::pair<int, int>> deltas) const {
        if (out->deltas.size() + deltas.size() > std::numeric_limits<std::uint32_t>::max())
            throw SimulationError("trajectory too large to store; use the streaming interface");
        out->times.push_back(t);
        out->deltas.insert(out->deltas.end(), deltas.begin(), deltas.end());
        out->offsets.push_back(static_cast<std::uint32_t>(out->deltas.size()));
    }
};

}  // namespace

Trajectory time_varying_ssa(const ReactionNetwork& net, std::vector<long long> initial_state,
                            const std::vector<ClampedSpecies>& clamps, double horizon, Rng& rng) {
    Trajectory tr;
    tr.horizon = horizon;
    run_with_clamps(net, std::move(initial_state), clamps, horizon, rng, TrajectoryRecorder{&tr},
                    &tr.initial_state);
    return tr;
}

void time_varying_ssa_stream(const ReactionNetwork& net, std::vector<long long> initial_state,
                             const std::vector<ClampedSpecies>& clamps, double horizon, Rng& rng,
                             const EventSink& sink) {
    run_with_clamps(net, std::move(initial_state), clamps, horizon, rng, sink, nullptr);
}

Trajectory ssa_simulate(const ReactionNetwork& net, std::vector<long long> initial_state,
                        double horizon, Rng& rng) {
    return time_varying_ssa(net, std::move(initial_state), {}, horizon, rng);
}

void ssa_stream(const ReactionNetwork& net, std::vector<long long> initial_state, double horizon,
                Rng& rng, const EventSink& sink) {
    run_with_clamps(net, std::move(initial_state), {}, horizon, rng, sink, nullptr);
}

std::span<const std::pair<int, int>> Trajectory::event_deltas(std::size_t i) const {
    return {deltas.data() + offsets[i], deltas.data() + offsets[i + 1]};
}

std::vector<long long> Trajectory::state_at(double t) const {
    std::vector<long long> x = initial_state;
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i)
        for (auto [s, d] : event_deltas(i)) x[static_cast<std::size_t>(s)] += d;
    return x;
}

long long Trajectory::count_at(int species, double t) const {
    long long v = initial_state[static_cast<std::size_t>(species)];
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i)
        for (auto [s, d] : event_deltas(i))
            if (s == species) v += d;
    return v;
}

StepSignal Trajectory::species_path(int species) const {
    std::vector<double> ts{0.0};
    std::vector<double> vs{static_cast<double>(initial_state[static_cast<std::size_t>(species)])};
    long long cur = initial_state[static_cast<std::size_t>(species)];
    for (std::size_t i = 0; i < times.size(); ++i) {
        long long next = cur;
        for (auto [s, d] : event_deltas(i))
            if (s == species) next += d;
        if (next != cur) {
            cur = next;
            if (times[i] == ts.back()) {
                vs.back() = static_cast<double>(cur);
            } else {
                ts.push_back(times[i]);
                vs.push_back(static_cast<double>(cur));
            }
        }
    }
    return StepSignal(std::move(ts), std::move(vs));
}

void Trajectory::validate() const {
    if (offsets.size() != times.size() + 1 || offsets.front() != 0 ||
        offsets.back() != deltas.size())
        throw SimulationError("trajectory: inconsistent offsets");
    std::vector<long long> x = initial_state;
    for (long long v : x)
        if (v < 0) throw SimulationError("trajectory: negative initial count");
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > prev)) throw SimulationError("trajectory: event times not increasing");
        if (times[i] < 0.0 || times[i] > horizon)
            throw SimulationError("trajectory: event time outside [0, horizon]");
        prev = times[i];
        for (auto [s, d] : event_deltas(i)) {
            if (s < 0 || static_cast<std::size_t>(s) >= x.size())
                throw SimulationError("trajectory: species index out of range");
            x[static_cast<std::size_t>(s)] += d;
            if (x[static_cast<std::size_t>(s)] < 0)
                throw SimulationError("trajectory: count went negative");
        }
    }
}

void Trajectory::write_grid_csv(std::ostream& os, const std::vector<std::string>& species_names,
                                double sample_dt) const {
    if (!(sample_dt > 0.0)) throw ConfigError("sample_dt must be positive");
    std::vector<std::string> row;
    row.emplace_back("time");
    for (const auto& n : species_names) row.push_back(n);
    csv::write_row(os, row);

    std::vector<long long> x = initial_state;
    std::size_t next_event = 0;
    auto n_steps = static_cast<std::size_t>(horizon / sample_dt + 1e-9);
    for (std::size_t i = 0; i <= n_steps; ++i) {
        double t = sample_dt * static_cast<double>(i);
        while (next_event < times.size() && times[next_event] <= t) {
            for (auto [s, d] : event_deltas(next_event)) x[static_cast<std::size_t>(s)] += d;
            ++next_event;
        }
        row.clear();
        row.push_back(csv::format_double(t, 12));
        for (long long v : x) row.push_back(std::to_string(v));
        csv::write_row(os, row);
    }
}

void Trajectory::write_events(std::ostream& os,
                              const std::vector<std::string>& species_names) const {
    std::vector<std::string> row{"chemodem-events", "1"};
    csv::write_row(os, row);
    row = {"horizon", csv::format_double(horizon)};
    csv::write_row(os, row);
    row = {"species"};
    for (const auto& n : species_names) row.push_back(n);
    csv::write_row(os, row);
    row = {"initial"};
    for (long long v : initial_state) row.push_back(std::to_string(v));
    csv::write_row(os, row);
    row = {"time", "species", "delta"};
    csv::write_row(os, row);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (auto [s, d] : event_deltas(i)) {
            row = {csv::format_double(times[i]), std::to_string(s), std::to_string(d)};
            csv::write_row(os, row);
        }
    }
}

Trajectory Trajectory::read_events(std::istream& is, std::vector<std::string>* species_names_out) {
    auto next_row = [&is](const char* what) {
        std::string line;
        if (!std::getline(is, line)) throw ConfigError(std::string("event list: missing ") + what);
        return csv::parse_line(line);
    };
    auto magic = next_row("magic row");
    if (magic.size() != 2 || magic[0] != "chemodem-events" || magic[1] != "1")
        throw ConfigError("event list: not a chemodem-events v1 file");
    auto hor = next_row("horizon row");
    if (hor.size() != 2 || hor[0] != "horizon") throw ConfigError("event list: bad horizon row");
    Trajectory tr;
    tr.horizon = std::stod(hor[1]);
    auto sp = next_row("species row");
    if (sp.empty() || sp[0] != "species") throw ConfigError("event list: bad species row");
    std::vector<std::string> names(sp.begin() + 1, sp.end());
    auto init = next_row("initial row");
    if (init.size() != names.size() + 1 || init[0] != "initial")
        throw ConfigError("event list: bad initial row");
    for (std::size_t i = 1; i < init.size(); ++i) tr.initial_state.push_back(std::stoll(init[i]));
    auto hdr = next_row("event header");
    if (hdr != std::vector<std::string>{"time", "species", "delta"})
        throw ConfigError("event list: bad event header");

    std::string line;
    double prev_time = -std::numeric_limits<double>::infinity();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = csv::parse_line(line);
        if (f.size() != 3) throw ConfigError("event list: bad event row");
        double t = std::stod(f[0]);
        int s = std::stoi(f[1]);
        int d = std::stoi(f[2]);
        if (s < 0 || static_cast<std::size_t>(s) >= tr.initial_state.size())
            throw ConfigError("event list: species index out of range");
        if (t == prev_time) {
            tr.deltas.emplace_back(s, d);
            tr.offsets.back() = static_cast<std::uint32_t>(tr.deltas.size());
        } else {
            if (t < prev_time) throw ConfigError("event list: times must be non-decreasing");
            prev_time = t;
            tr.times.push_back(t);
            tr.deltas.emplace_back(s, d);
            tr.offsets.push_back(static_cast<std::uint32_t>(tr.deltas.size()));
        }
    }
    if (species_names_out) *species_names_out = std::move(names);
    return tr;
}

ReceptorModel make_receptor_model(const ReceptorParams& params) {
    if (!(params.binding_rate > 0.0) || !(params.unbinding_rate > 0.0))
        throw ConfigError("receptor rates must be positive");
    if (params.count < 1) throw ConfigError("receptor count must be at least 1");
    ReceptorModel m;
    m.signal_species = m.network.add_species("S");
    m.inactive_species = m.network.add_species("X");
    m.active_species = m.network.add_species("X_active");
    Reaction activation;
    activation.reactants = {{m.signal_species, 1}, {m.inactive_species, 1}};
    activation.products = {{m.signal_species, 1}, {m.active_species, 1}};
    activation.rate = params.binding_rate;
    activation.label = "activation";
    m.network.add_reaction(std::move(activation));
    Reaction deactivation;
    deactivation.reactants = {{m.active_species, 1}};
    deactivation.products = {{m.inactive_species, 1}};
    deactivation.rate = params.unbinding_rate;
    deactivation.label = "deactivation";
    m.network.add_reaction(std::move(deactivation));
    return m;
}

}  // namespace chemodem
