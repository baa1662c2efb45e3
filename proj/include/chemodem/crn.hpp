#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chemodem/rng.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

// One mass-action channel. Stoichiometries are per-species multiplicities;
// propensity follows the falling-factorial convention, e.g. a reaction with
// reactant (s, 2) contributes x_s * (x_s - 1) to the product.
struct Reaction {
    std::vector<std::pair<int, int>> reactants;  // (species index, multiplicity >= 1)
    std::vector<std::pair<int, int>> products;
    double rate = 0.0;
    std::string label;
};

class ReactionNetwork {
  public:
    int add_species(std::string name);
    int species_index(std::string_view name) const;  // -1 if absent
    const std::string& species_name(int i) const { return species_[static_cast<std::size_t>(i)]; }
    int species_count() const { return static_cast<int>(species_.size()); }

    int add_reaction(Reaction r);  // validates against current species set
    int reaction_count() const { return static_cast<int>(reactions_.size()); }
    const Reaction& reaction(int i) const { return reactions_[static_cast<std::size_t>(i)]; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const std::vector<std::string>& species() const { return species_; }

    // Net count change of reaction r, one entry per affected species.
    std::vector<std::pair<int, int>> net_change(int r) const;

  private:
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
};

double propensity(const Reaction& r, std::span<const long long> state);

// Exogenous piecewise-constant override: the species count is reset to the
// schedule's value at every breakpoint (exponential clocks restart there).
// Levels must be non-negative integers and the schedule must start at t <= 0.
struct ClampedSpecies {
    int species = -1;
    StepSignal schedule;
};

// Jump path of the whole network. Each firing is one atomic event at a strictly
// increasing time; its species deltas live in deltas[offsets[i]..offsets[i+1]).
struct Trajectory {
    std::vector<long long> initial_state;
    double horizon = 0.0;
    std::vector<double> times;
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::pair<int, int>> deltas;  // (species, delta)

    std::size_t event_count() const { return times.size(); }
    std::span<const std::pair<int, int>> event_deltas(std::size_t i) const;

    std::vector<long long> state_at(double t) const;  // right-continuous
    StepSignal species_path(int species) const;
    long long count_at(int species, double t) const;

    void validate() const;  // invariants: ordering, bounds, non-negative counts

    // Sampled-grid CSV: header "time,<species names...>", one row per grid point.
    void write_grid_csv(std::ostream& os, const std::vector<std::string>& species_names,
                        double sample_dt) const;
    // Lossless event-list export/import ("# key=value" preamble + time,species,delta rows).
    void write_events(std::ostream& os, const std::vector<std::string>& species_names) const;
    static Trajectory read_events(std::istream& is, std::vector<std::string>* species_names_out);
};

// Streams each event to `sink` instead of storing it.
using EventSink = std::function<void(double, std::span<const std::pair<int, int>>)>;

Trajectory ssa_simulate(const ReactionNetwork& net, std::vector<long long> initial_state,
                        double horizon, Rng& rng);
void ssa_stream(const ReactionNetwork& net, std::vector<long long> initial_state, double horizon,
                Rng& rng, const EventSink& sink);

Trajectory time_varying_ssa(const ReactionNetwork& net, std::vector<long long> initial_state,
                            const std::vector<ClampedSpecies>& clamps, double horizon, Rng& rng);
void time_varying_ssa_stream(const ReactionNetwork& net, std::vector<long long> initial_state,
                             const std::vector<ClampedSpecies>& clamps, double horizon, Rng& rng,
                             const EventSink& sink);

// Receptor kinetics shared by every scenario: S + X -> S + X_active (binding
// signal activates without being consumed), X_active -> X.
struct ReceptorParams {
    double binding_rate = 0.0;    // per signal molecule per inactive receptor
    double unbinding_rate = 0.0;  // deactivation
    int count = 0;                // total receptors M
};

struct ReceptorModel {
    ReactionNetwork network;
    int signal_species = -1;
    int inactive_species = -1;
    int active_species = -1;
};

ReceptorModel make_receptor_model(const ReceptorParams& params);

}  // namespace chemodem
