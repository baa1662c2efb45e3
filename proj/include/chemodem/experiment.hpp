#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chemodem/config.hpp"
#include "chemodem/crn.hpp"
#include "chemodem/demod.hpp"
#include "chemodem/hill.hpp"
#include "chemodem/rdme.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

enum class Scenario { colocated, diffusion };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

// What plays u(t) in the molecular circuit: the observed input path (receiver
// voxel count under diffusion, clamped concentration when co-located) or each
// hypothesis's rectangular amplitude profile.
enum class CircuitInput { observed, rectangular };

struct ExperimentConfig {
    Scenario scenario = Scenario::colocated;
    int runs = 100;
    double horizon = 50.0;
    std::uint64_t master_seed = 1;
    std::string output_dir;

    ReceptorParams receptors{0.02, 0.5, 100};
    std::vector<double> priors;  // empty = uniform

    // co-located channel: exact concentration rectangles
    CMSymbolSet symbols;

    // diffusion channel: transmitter emission through the voxel grid
    VoxelGrid grid;
    std::vector<double> emission_rates;
    double emission_duration = 20.0;
    double emission_basal = 0.0;

    // demodulators
    std::vector<double> decision_times;
    double sample_dt = 0.1;
    double k_a = 1.0;
    CircuitInput circuit_input = CircuitInput::observed;
    bool rectangular_reference = false;  // sigma_k(t) rectangle instead of mean-field
    int export_runs = 2;                 // runs whose trajectories/filters are written out

    int symbol_count() const;
    double log_prior(int k) const;
    void validate() const;
};

ExperimentConfig colocated_defaults();
ExperimentConfig diffusion_defaults();

// Reads an ExperimentConfig from a parsed config file; scenario-appropriate
// defaults fill everything the file leaves out.
ExperimentConfig experiment_from_config(const Config& cfg);

// Per-hypothesis demodulator inputs, derived once per experiment.
struct HypothesisBank {
    std::vector<double> amplitudes;       // receiver-side amplitude a_k
    std::vector<Reference> references;    // sigma_k(t) for the exact filter
    std::vector<StepSignal> rectangles;   // rectangular u(t) per hypothesis
    std::vector<HillParams> hills;        // fitted to amplitudes
};
HypothesisBank build_hypothesis_bank(const ExperimentConfig& cfg);

// One channel realization, reduced to what the demodulators consume.
struct ChannelRun {
    StepSignal xstar;  // active-receptor count path
    StepSignal input;  // u(t) observed at the receiver
};
ChannelRun simulate_channel(const ExperimentConfig& cfg, int symbol, int run);

// Full network trajectory of one run (for trajectory export / replay).
Trajectory simulate_channel_trajectory(const ExperimentConfig& cfg, int symbol, int run,
                                       std::vector<std::string>* species_names = nullptr);

struct BERPoint {
    double time = 0.0;
    std::vector<int> errors;  // per transmitted symbol
    int runs_per_symbol = 0;
    double ber = 0.0;
    int threshold = -1;  // one-sample method only
};

struct BERSeries {
    std::string method;
    std::vector<BERPoint> points;
};

struct BERResultSet {
    std::vector<BERSeries> methods;
    std::vector<std::string> warnings;
};

extern const std::vector<std::string> kAllBerMethods;  // history-filter, molecular-circuit, one-sample

BERResultSet run_ber_experiment(const ExperimentConfig& cfg,
                                const std::vector<std::string>& methods = kAllBerMethods);

struct OneSampleResult {
    int threshold = 0;
    int errors0 = 0;
    int errors1 = 0;
    double ber = 0.0;
};

// Exhaustive threshold search for the rule "decide 1 iff x_*(t) >= theta",
// theta in 0..M; ties resolve to the smallest theta.
OneSampleResult one_sample_baseline(const std::vector<long long>& symbol0,
                                    const std::vector<long long>& symbol1, int receptor_count);
OneSampleResult one_sample_baseline(const std::vector<StepSignal>& symbol0,
                                    const std::vector<StepSignal>& symbol1, double t,
                                    int receptor_count);

struct RmsSeries {
    std::vector<double> times;
    std::vector<double> rms;
    std::vector<std::string> warnings;
};

// Pointwise RMS over paired paths of (a - b) on a uniform grid; mismatched
// horizons truncate to the common horizon with a warning.
RmsSeries rms_compare(const std::vector<FilterPath>& a, const std::vector<FilterPath>& b,
                      double sample_dt);

void write_ber_csv(std::ostream& os, const BERResultSet& results);

// Writes the experiment directory layout under cfg.output_dir: config.snapshot,
// trajectories/, filters/, ber.csv, summary.json. Identical config and seed
// produce byte-identical files.
void write_experiment_outputs(const ExperimentConfig& cfg, const std::string& snapshot_text,
                              const BERResultSet& results);

}  // namespace chemodem
