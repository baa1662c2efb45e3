#include "chemodem/hill.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "chemodem/errors.hpp"
#include "json.hpp"

namespace chemodem {

void HillParams::validate() const {
    if (!(h > 0.0) || !(H > 0.0) || !(n > 0.0))
        throw ConfigError("Hill parameters must be positive");
    if (!(amplitude > 0.0)) throw ConfigError("Hill source amplitude must be positive");
    if (!(residual >= 0.0)) throw ConfigError("Hill residual must be non-negative");
    if (!(q_min > 0.0) || !(q_max > q_min)) throw ConfigError("Hill fit range is invalid");
}

double hill_target(double amplitude, double q) {
    if (!(amplitude > std::exp(1.0))) throw ConfigError("hill target requires amplitude > e");
    if (!(q > 0.0)) return 0.0;
    double v = std::log(amplitude) - amplitude / q;
    return v > 0.0 ? v : 0.0;
}

double hill_eval(const HillParams& params, double q) {
    if (q < 0.0) throw ConfigError("hill_eval requires q >= 0");
    if (q == 0.0) return 0.0;
    // h / (1 + (H/q)^n) avoids overflow for large q
    return params.h / (1.0 + std::pow(params.H / q, params.n));
}

namespace {

struct Point {
    double lh, lH, n;  // log gain, log half-saturation, Hill coefficient
};

double clamp_n(double n) { return std::clamp(n, 0.5, 10.0); }

double sum_sq(const Point& p, const std::vector<double>& q, const std::vector<double>& y) {
    double h = std::exp(p.lh);
    double H = std::exp(p.lH);
    double ssr = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        double f = h / (1.0 + std::pow(H / q[i], p.n));
        double e = y[i] - f;
        ssr += e * e;
    }
    return ssr;
}

struct FitGrid {
    std::vector<double> q, y;
    double q_lo = 0.0, q_hi = 0.0;
};

FitGrid make_grid(double amplitude, const HillFitConfig& config) {
    if (!(amplitude > std::exp(1.0))) throw ConfigError("fit_hill requires amplitude > e");
    if (config.grid_points < 10) throw ConfigError("hill fit grid needs at least 10 points");
    if (config.max_sweeps < 1) throw ConfigError("hill fit needs a positive sweep budget");
    const double log_a = std::log(amplitude);
    FitGrid g;
    g.q_lo = 1.001 * amplitude / log_a;
    g.q_hi = config.q_max_factor * amplitude;
    if (!(g.q_hi > g.q_lo)) throw ConfigError("hill fit range is empty; increase q_max_factor");
    g.q.resize(static_cast<std::size_t>(config.grid_points));
    g.y.resize(g.q.size());
    double llo = std::log(g.q_lo), lhi = std::log(g.q_hi);
    for (std::size_t i = 0; i < g.q.size(); ++i) {
        g.q[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                    static_cast<double>(g.q.size() - 1));
        g.y[i] = hill_target(amplitude, g.q[i]);
    }
    return g;
}

// Greedy coordinate/pattern refinement; returns true when the step sizes
// shrank to convergence within the sweep budget.
bool refine(Point& p, double& ssr, const FitGrid& g, int max_sweeps) {
    std::array<double, 3> step{0.5, 0.5, 0.25};
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (int c = 0; c < 3; ++c) {
            for (double dir : {+1.0, -1.0}) {
                for (;;) {
                    Point trial = p;
                    double* coord = c == 0 ? &trial.lh : c == 1 ? &trial.lH : &trial.n;
                    *coord += dir * step[static_cast<std::size_t>(c)];
                    if (c == 2) trial.n = clamp_n(trial.n);
                    double s = sum_sq(trial, g.q, g.y);
                    if (s < ssr) {
                        p = trial;
                        ssr = s;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
        if (!improved) {
            bool all_small = true;
            for (double& s : step) {
                s *= 0.5;
                if (s > 1e-10) all_small = false;
            }
            if (all_small) return true;
        }
    }
    return false;
}

HillParams pack(const Point& p, double ssr, double amplitude, const FitGrid& g,
                bool converged) {
    HillParams out;
    out.h = std::exp(p.lh);
    out.H = std::exp(p.lH);
    out.n = p.n;
    out.amplitude = amplitude;
    out.residual = ssr;
    out.q_min = g.q_lo;
    out.q_max = g.q_hi;
    out.degraded = !converged;
    return out;
}

}  // namespace

HillParams fit_hill(double amplitude, const HillFitConfig& config) {
    FitGrid grid = make_grid(amplitude, config);
    const double log_a = std::log(amplitude);
    const std::array<double, 2> h_starts{log_a - 1.0, 2.0 * (log_a - 1.0)};
    const std::array<double, 3> H_starts{amplitude / log_a, amplitude / 2.0, amplitude};
    const std::array<double, 3> n_starts{1.0, 2.0, 4.0};

    Point best{};
    double best_ssr = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    for (double h0 : h_starts)
        for (double H0 : H_starts)
            for (double n0 : n_starts) {
                Point p{std::log(h0), std::log(H0), n0};
                double ssr = sum_sq(p, grid.q, grid.y);
                bool converged = refine(p, ssr, grid, config.max_sweeps);
                if (ssr < best_ssr) {
                    best = p;
                    best_ssr = ssr;
                    best_converged = converged;
                }
            }
    return pack(best, best_ssr, amplitude, grid, best_converged);
}

HillParams fit_hill_seeded(double amplitude, const HillFitConfig& config) {
    FitGrid grid = make_grid(amplitude, config);
    const double log_a = std::log(amplitude);
    Point p{std::log(1.3 * (log_a - 1.0)), std::log(0.4 * amplitude), 2.0};
    double ssr = sum_sq(p, grid.q, grid.y);
    bool converged = refine(p, ssr, grid, config.max_sweeps);
    return pack(p, ssr, amplitude, grid, converged);
}

std::string hill_to_json(const HillParams& params) {
    nlohmann::json j;
    j["a_k"] = params.amplitude;
    j["h"] = params.h;
    j["H"] = params.H;
    j["n"] = params.n;
    j["residual"] = params.residual;
    j["q_min"] = params.q_min;
    j["q_max"] = params.q_max;
    j["degraded"] = params.degraded;
    return j.dump(2) + "\n";
}

HillParams hill_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad Hill JSON: ") + e.what());
    }
    HillParams p;
    try {
        p.amplitude = j.at("a_k").get<double>();
        p.h = j.at("h").get<double>();
        p.H = j.at("H").get<double>();
        p.n = j.at("n").get<double>();
        p.residual = j.at("residual").get<double>();
        p.q_min = j.at("q_min").get<double>();
        p.q_max = j.at("q_max").get<double>();
        p.degraded = j.value("degraded", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("Hill JSON is missing fields: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace chemodem
