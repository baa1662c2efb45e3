#include "chemodem/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include "chemodem/csv.hpp"
#include "chemodem/errors.hpp"

namespace chemodem {

long long CountingPath::count_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return static_cast<long long>(it - jump_times.begin());
}

void CountingPath::validate() const {
    for (std::size_t i = 0; i < jump_times.size(); ++i) {
        if (!std::isfinite(jump_times[i]) || jump_times[i] < 0.0)
            throw SimulationError("counting path has a negative or non-finite jump time");
        if (i > 0 && !(jump_times[i] > jump_times[i - 1]))
            throw SimulationError("counting path jump times must be strictly increasing");
    }
}

void CountingPath::write_csv(std::ostream& os) const {
    os << "time,count\n";
    for (std::size_t i = 0; i < jump_times.size(); ++i)
        os << csv::format_double(jump_times[i], 12) << ',' << (i + 1) << '\n';
}

CountingPath simulate_y(const StepSignal& xstar, const StepSignal& input,
                        const HillParams& hill, double unbinding_rate, double horizon,
                        Rng& rng) {
    hill.validate();
    if (!(unbinding_rate > 0.0)) throw ConfigError("unbinding rate must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    for (double v : input.values())
        if (v < 0.0) throw ConfigError("input count series must be non-negative");
    for (double v : xstar.values())
        if (v < 0.0) throw ConfigError("active receptor path must be non-negative");

    double max_x = 0.0;
    for (std::size_t i = 0; i < xstar.times().size(); ++i)
        if (xstar.times()[i] < horizon) max_x = std::max(max_x, xstar.values()[i]);

    CountingPath path;
    const double envelope = unbinding_rate * max_x * hill.h;
    if (envelope <= 0.0) return path;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(envelope);
        if (t > horizon) break;
        double rate = unbinding_rate * xstar.value_at(t) * hill_eval(hill, input.value_at(t));
        if (rng.uniform() * envelope < rate) path.jump_times.push_back(t);
    }
    return path;
}

long long CountSeries::value(std::size_t row, int k) const {
    return counts[row * static_cast<std::size_t>(species) + static_cast<std::size_t>(k)];
}

std::vector<long long> CountSeries::at(double t) const {
    std::vector<long long> out(static_cast<std::size_t>(species), 0);
    if (times.empty() || t < times.front()) return out;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t row = static_cast<std::size_t>(it - times.begin()) - 1;
    for (int k = 0; k < species; ++k) out[static_cast<std::size_t>(k)] = value(row, k);
    return out;
}

void CountSeries::validate() const {
    if (species < 1) throw SimulationError("count series needs at least one species");
    if (counts.size() != times.size() * static_cast<std::size_t>(species))
        throw SimulationError("count series row shape mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw SimulationError("count series times must be strictly increasing");
    for (long long c : counts)
        if (c < 0) throw SimulationError("count series has a negative count");
}

void CountSeries::write_csv(std::ostream& os) const {
    os << "time";
    for (int k = 0; k < species; ++k) os << ",Y" << k;
    os << '\n';
    for (std::size_t row = 0; row < times.size(); ++row) {
        os << csv::format_double(times[row], 12);
        for (int k = 0; k < species; ++k) os << ',' << value(row, k);
        os << '\n';
    }
}

CountSeries annihilate(const std::vector<CountingPath>& productions, double k_a, double horizon,
                       Rng& rng) {
    if (productions.size() < 2) throw ConfigError("annihilation needs at least two species");
    if (!(k_a > 0.0)) throw ConfigError("annihilation rate must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    const int K = static_cast<int>(productions.size());

    // merged production schedule
    std::vector<std::pair<double, int>> births;
    for (int k = 0; k < K; ++k) {
        productions[static_cast<std::size_t>(k)].validate();
        for (double t : productions[static_cast<std::size_t>(k)].jump_times)
            if (t <= horizon) births.emplace_back(t, k);
    }
    std::sort(births.begin(), births.end());

    CountSeries series;
    series.species = K;
    std::vector<long long> y(static_cast<std::size_t>(K), 0);
    auto record = [&](double t) {
        if (!series.times.empty() && series.times.back() == t) {
            std::copy(y.begin(), y.end(), series.counts.end() - K);
            return;
        }
        series.times.push_back(t);
        series.counts.insert(series.counts.end(), y.begin(), y.end());
    };
    record(0.0);

    double t = 0.0;
    std::size_t next_birth = 0;
    for (;;) {
        double total = 0.0;
        for (int i = 0; i < K; ++i)
            for (int j = i + 1; j < K; ++j)
                total += static_cast<double>(y[static_cast<std::size_t>(i)]) *
                         static_cast<double>(y[static_cast<std::size_t>(j)]);
        total *= k_a;

        double t_annihilate = total > 0.0 ? t + rng.exponential(total)
                                          : std::numeric_limits<double>::infinity();
        double t_birth = next_birth < births.size() ? births[next_birth].first
                                                    : std::numeric_limits<double>::infinity();
        if (t_annihilate > horizon && t_birth > horizon) break;

        if (t_birth <= t_annihilate) {
            t = t_birth;
            ++y[static_cast<std::size_t>(births[next_birth].second)];
            ++next_birth;
        } else {
            t = t_annihilate;
            double pick = rng.uniform() * total / k_a;
            double acc = 0.0;
            int pi = -1, pj = -1;
            for (int i = 0; i < K && pi < 0; ++i)
                for (int j = i + 1; j < K; ++j) {
                    acc += static_cast<double>(y[static_cast<std::size_t>(i)]) *
                           static_cast<double>(y[static_cast<std::size_t>(j)]);
                    if (pick < acc) {
                        pi = i;
                        pj = j;
                        break;
                    }
                }
            if (pi < 0) {  // rounding fell off the end; take the last active pair
                for (int i = K - 1; i >= 0 && pi < 0; --i)
                    for (int j = K - 1; j > i; --j)
                        if (y[static_cast<std::size_t>(i)] > 0 &&
                            y[static_cast<std::size_t>(j)] > 0) {
                            pi = i;
                            pj = j;
                            break;
                        }
            }
            --y[static_cast<std::size_t>(pi)];
            --y[static_cast<std::size_t>(pj)];
        }
        record(t);
    }
    return series;
}

DeterministicResult deterministic_annihilation(std::vector<Impulse> impulses,
                                               int species_count) {
    if (species_count < 2) throw ConfigError("annihilation needs at least two species");
    for (const Impulse& im : impulses) {
        if (im.species < 0 || im.species >= species_count)
            throw ConfigError("impulse species index out of range");
        if (im.amount < 0) throw ConfigError("impulse amounts must be non-negative");
        if (!(im.time >= 0.0) || !std::isfinite(im.time))
            throw ConfigError("impulse times must be non-negative");
    }
    std::stable_sort(impulses.begin(), impulses.end(),
                     [](const Impulse& a, const Impulse& b) { return a.time < b.time; });

    DeterministicResult result;
    result.final_counts.assign(static_cast<std::size_t>(species_count), 0);
    auto& y = result.final_counts;

    std::size_t i = 0;
    while (i < impulses.size()) {
        double t = impulses[i].time;
        for (; i < impulses.size() && impulses[i].time == t; ++i)
            y[static_cast<std::size_t>(impulses[i].species)] += impulses[i].amount;

        int coexisting = 0;
        for (long long c : y) coexisting += c > 0 ? 1 : 0;
        if (coexisting >= 3) result.order_ambiguous = true;

        // pairs cancel to completion, lowest indices first
        for (int a = 0; a < species_count; ++a)
            for (int b = a + 1; b < species_count; ++b) {
                long long cancel = std::min(y[static_cast<std::size_t>(a)],
                                            y[static_cast<std::size_t>(b)]);
                y[static_cast<std::size_t>(a)] -= cancel;
                y[static_cast<std::size_t>(b)] -= cancel;
            }
    }
    return result;
}

int decide(const std::vector<long long>& counts) {
    if (counts.empty()) throw ConfigError("decision needs at least one count");
    std::size_t best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k)
        if (counts[k] > counts[best]) best = k;
    return static_cast<int>(best);
}

std::vector<CountingPath> impulse_productions(const std::vector<Impulse>& impulses,
                                              int species_count, double stagger) {
    if (species_count < 1) throw ConfigError("need at least one species");
    if (!(stagger > 0.0)) throw ConfigError("stagger must be positive");
    std::vector<Impulse> sorted = impulses;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Impulse& a, const Impulse& b) { return a.time < b.time; });
    std::vector<CountingPath> out(static_cast<std::size_t>(species_count));
    long long offset = 0;
    for (const Impulse& im : sorted) {
        if (im.species < 0 || im.species >= species_count)
            throw ConfigError("impulse species index out of range");
        for (long long u = 0; u < im.amount; ++u)
            out[static_cast<std::size_t>(im.species)].jump_times.push_back(
                im.time + stagger * static_cast<double>(offset++));
    }
    for (auto& p : out) p.validate();
    return out;
}

std::vector<AppendixCScenario> appendix_c_scenarios() {
    std::vector<AppendixCScenario> out;
    out.push_back({"third-species-late",
                   {{0.0, 0, 20}, {0.0, 1, 30}, {10.0, 2, 40}},
                   {0, 0, 30}});
    out.push_back({"second-species-late",
                   {{0.0, 0, 20}, {10.0, 1, 30}, {0.0, 2, 40}},
                   {0, 10, 0}});
    return out;
}

}  // namespace chemodem
