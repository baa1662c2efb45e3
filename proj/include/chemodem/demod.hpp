#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemodem/crn.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

// Concentration-modulated symbol alphabet: symbol k transmits amplitude
// amplitudes[k] on [0, duration) and the common off_level afterwards.
struct CMSymbolSet {
    std::vector<double> amplitudes;
    double off_level = 1.0;
    double duration = 0.0;
    std::vector<double> priors;  // empty means uniform

    int count() const { return static_cast<int>(amplitudes.size()); }
    void validate() const;
    std::vector<std::string> warnings() const;  // soft issues, e.g. a_k < 10*off_level
    double prior(int k) const;
    double log_prior(int k) const;  // -inf sentinel for zero prior
    StepSignal lambda(int k) const;
};

// Log-posteriori path sampled on a uniform grid, plus the explicit jump record
// (time, size) of its Dirac contributions. Values carry an arbitrary additive
// offset; compare paths only by differences.
struct FilterPath {
    double sample_dt = 0.1;
    double log_prior = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;

    double at_time(double t) const;  // linear interpolation on the grid
    void write_csv(std::ostream& os) const;
};

// Reference signal feeding a filter: either the exact piecewise-constant
// lambda_k(t) (co-located) or a mean-field sigma_k(t) sample series (diffusion).
class Reference {
  public:
    static Reference step(StepSignal s);
    static Reference sampled(SampledSeries s);
    double value_at(double t) const;
    double integral(double t0, double t1) const;
    const StepSignal* step_signal() const { return step_ ? &*step_ : nullptr; }

  private:
    std::optional<StepSignal> step_;
    std::optional<SampledSeries> sampled_;
};

struct RenewalStats {
    double mean_interval = 0.0;   // m, seconds
    double interval_variance = 0.0;
    double x_star = 0.0;          // stationary mean active count
};

// Exact log-posteriori filter in event-driven form: adds
// log(reference(t)) at every upward jump of x_* and continuously subtracts
// binding_rate * (M - x_*) * reference between events.
FilterPath exact_filter(const StepSignal& xstar, const Reference& reference,
                        const ReceptorParams& receptors, double log_prior, double horizon,
                        double sample_dt = 0.1);
FilterPath exact_filter(const Trajectory& trajectory, int active_species,
                        const Reference& reference, const ReceptorParams& receptors,
                        double log_prior, double sample_dt = 0.1);

// Intermediate approximation: integrates g_- * x_* * (log lambda_k - lambda_k / u).
FilterPath intermediate_filter(const StepSignal& xstar, const StepSignal& input,
                               const StepSignal& lambda_k, double unbinding_rate, double horizon,
                               double log_prior = 0.0, double sample_dt = 0.1);

// Positive-part filter: integrates g_- * x_* * [log a_k - a_k / u]_+ ; output
// starts at zero and never decreases (it is realizable as a molecule count).
FilterPath positive_filter(const StepSignal& xstar, const StepSignal& input, double amplitude,
                           double unbinding_rate, double horizon, double sample_dt = 0.1);

// phi_a(z) = log z - z / a: concave in z with its maximum at z = a.
double phi(double input_amplitude, double reference_amplitude);

RenewalStats renewal_stats(double binding_rate, double unbinding_rate, double amplitude,
                           int receptor_count);

// Number of upward jumps of x_* in [0, t_end].
long activation_count(const StepSignal& xstar, double t_end);
long activation_count(const Trajectory& trajectory, int active_species, double t_end);

}  // namespace chemodem
