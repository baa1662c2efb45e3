#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chemodem/hill.hpp"
#include "chemodem/rng.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

// Jump record of a counting process; the implied count is right-continuous.
struct CountingPath {
    std::vector<double> jump_times;

    long long count_at(double t) const;
    void validate() const;
    void write_csv(std::ostream& os) const;  // time,count after each jump
};

// Poisson thinning of the rate g_- * x_*(t) * Hill(u(t)) under the envelope
// g_- * max(x_*) * h.
CountingPath simulate_y(const StepSignal& xstar, const StepSignal& input,
                        const HillParams& hill, double unbinding_rate, double horizon, Rng& rng);

// Joint count record of K species over time; rows are coalesced per event time.
struct CountSeries {
    int species = 0;
    std::vector<double> times;         // strictly increasing, first row at t = 0
    std::vector<long long> counts;     // row-major, species columns

    std::size_t rows() const { return times.size(); }
    long long value(std::size_t row, int k) const;
    std::vector<long long> at(double t) const;  // right-continuous
    void validate() const;
    void write_csv(std::ostream& os) const;  // time,Y0,Y1,...
};

// Exact SSA of production (given event times) plus pairwise annihilation
// Y_i + Y_j -> 0 at rate k_a * y_i * y_j for every pair i < j.
CountSeries annihilate(const std::vector<CountingPath>& productions, double k_a, double horizon,
                       Rng& rng);

struct Impulse {
    double time = 0.0;
    int species = 0;
    long long amount = 0;
};

struct DeterministicResult {
    std::vector<long long> final_counts;
    bool order_ambiguous = false;  // >= 3 species coexisted under instant annihilation
};

// Infinite-k_a limit: impulses land in time order and coexisting pairs cancel
// to completion between impulses.
DeterministicResult deterministic_annihilation(std::vector<Impulse> impulses, int species_count);

// argmax with ties broken toward the lowest index
int decide(const std::vector<long long>& counts);

// Staggered unit productions realizing an impulse schedule for the SSA.
std::vector<CountingPath> impulse_productions(const std::vector<Impulse>& impulses,
                                              int species_count, double stagger = 1e-9);

struct AppendixCScenario {
    std::string name;
    std::vector<Impulse> impulses;
    std::vector<long long> expected;  // deterministic steady state
};

// The two three-species impulse schedules from the K >= 3 counterexample.
std::vector<AppendixCScenario> appendix_c_scenarios();

}  // namespace chemodem
