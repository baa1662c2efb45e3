#pragma once

#include <string>
#include <string_view>

namespace chemodem {

// Hill approximation of the clamped log target [log a - a/q]_+ for one
// symbol amplitude: Hill(q) = h q^n / (H^n + q^n).
struct HillParams {
    double h = 0.0;          // gain (plateau value), dimensionless
    double H = 0.0;          // half-saturation, molecules
    double n = 0.0;          // Hill coefficient, dimensionless
    double amplitude = 0.0;  // source amplitude a_k, molecules
    double residual = 0.0;   // sum of squared errors over the fit grid
    double q_min = 0.0;      // fit range lower edge
    double q_max = 0.0;      // fit range upper edge
    bool degraded = false;   // optimizer budget exhausted before convergence

    void validate() const;
};

struct HillFitConfig {
    double q_max_factor = 100.0;  // Q_max = factor * amplitude
    int grid_points = 200;        // log-spaced fit grid size
    int max_sweeps = 200;         // coordinate-refinement budget per start
};

// Clamped target [log a - a/q]_+ that the Hill form approximates.
double hill_target(double amplitude, double q);

double hill_eval(const HillParams& params, double q);

// Least-squares fit on a log-spaced grid spanning (a/log a, Q_max].
HillParams fit_hill(double amplitude, const HillFitConfig& config = {});

// Single-start variant seeded from a scale heuristic; agrees with fit_hill on
// this target family and is cheap enough to sit inside iterative fitters.
HillParams fit_hill_seeded(double amplitude, const HillFitConfig& config = {});

std::string hill_to_json(const HillParams& params);
HillParams hill_from_json(std::string_view text);

}  // namespace chemodem
