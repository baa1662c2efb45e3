#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "chemodem/hill.hpp"
#include "chemodem/signal.hpp"

namespace chemodem {

// CM-inspired five-state promoter model. Rates are per minute; the input is
// the Msn2 concentration profile. The Hill coefficients are never free: they
// are refit from the amplitude parameter `a` whenever it changes.
struct Dcs2Params {
    // free parameters
    double g_plus = 3.19e-4;  // promoter activation, 1/(conc*min)
    double g_minus = 0.15;    // promoter deactivation, 1/min
    double a = 1400.0;        // internal amplitude parameter, conc
    double d2 = 0.40;         // initiation-complex degradation, 1/min
    double k3 = 0.23;         // transcription, 1/min

    // fixed constants (not fitted; see config)
    double d3 = 0.12;   // mRNA degradation, 1/min
    double k4 = 1.0;    // translation, 1/min
    double d4 = 8e-4;   // mYFP degradation, 1/min (small)
    double k5 = 0.025;  // YFP maturation, 1/min

    HillParams hill;  // derived from `a` via fit_hill

    void validate() const;
    void refresh_hill();  // hill = fit_hill_seeded(a)
};

struct Dcs2Trajectory {
    std::vector<double> times;
    std::vector<double> p_active, c_init, mrna, yfp, myfp;

    double max_myfp() const;
    double myfp_at(double t) const;  // linear interpolation
    void write_csv(std::ostream& os) const;
};

// Fixed-step RK4 integration from the all-zero state; steps snap to input
// breakpoints, and unstable steps are locally halved a bounded number of times.
Dcs2Trajectory simulate_dcs2(const Dcs2Params& params, const StepSignal& msn2, double horizon,
                             double dt = 0.05);

struct Dcs2Dataset {
    std::string label;
    StepSignal msn2;      // designed input profile
    SampledSeries myfp;   // measured output at its sample times
};

// Sum of squared residuals between simulated and measured mYFP at the sample
// times, totalled over datasets. Refits the Hill coefficients from params.a.
double dcs2_objective(const Dcs2Params& params, const std::vector<Dcs2Dataset>& datasets,
                      double dt = 0.05);

struct Dcs2FitConfig {
    double dt = 0.05;          // simulation step, minutes
    int max_iterations = 500;  // simplex iterations per start
    double tolerance = 1e-12;  // relative objective spread for convergence
};

struct Dcs2FitResult {
    Dcs2Params params;
    double error = 0.0;  // total SSR at the optimum
    std::vector<double> per_dataset_error;
    bool degraded = false;        // iteration budget exhausted
    bool unidentifiable = false;  // degenerate inputs (all-zero drive)
};

// Multi-start Nelder-Mead over the logs of the five free parameters, starting
// from the free values in `initial` (fixed constants are taken from it too).
Dcs2FitResult fit_dcs2(const std::vector<Dcs2Dataset>& datasets, const Dcs2Params& initial,
                       const Dcs2FitConfig& config = {});

// Max-mYFP vs total ON duration diagnostics (degradation-free limit, d4 = 0).
struct ProportionalityResult {
    std::vector<double> durations;  // total ON minutes per input
    std::vector<double> max_myfp;
    double slope = 0.0;              // least-squares line through the origin
    double relative_residual = 0.0;  // rms residual / rms value
};

ProportionalityResult max_myfp_proportionality(Dcs2Params params,
                                               const std::vector<StepSignal>& inputs,
                                               double horizon, double dt = 0.05);

// Msn2 amplitudes realized by the four inhibitor levels.
struct Msn2Level {
    const char* label;
    double amplitude;
};
const std::array<Msn2Level, 4>& msn2_levels();
double msn2_amplitude(std::string_view label);

// Rectangular pulse train: `pulses` ON intervals of `on_minutes` at `amplitude`
// separated by `gap_minutes` of zero, starting at t = start.
StepSignal pulse_train(double amplitude, int pulses, double on_minutes, double gap_minutes,
                       double start = 0.0);

struct Dcs2Ingest {
    std::vector<Dcs2Dataset> datasets;  // msn2 left empty; labels from header
    std::vector<std::string> warnings;
};

// CSV with a header row: time column then one column per profile.
Dcs2Ingest ingest_timeseries(std::istream& in);
Dcs2Ingest ingest_timeseries(const std::string& path);

}  // namespace chemodem
