#include "chemodem/dcs2.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "chemodem/csv.hpp"
#include "chemodem/errors.hpp"

namespace chemodem {

namespace {

// State vector: P (active promoter fraction), C (initiation complex),
// mRNA, YFP (dark), mYFP (mature).
using State = std::array<double, 5>;

struct Deriv {
    const Dcs2Params& p;
    double u;      // Msn2 level on the current segment
    double hillu;  // hill_eval(p.hill, u), cached per segment

    State operator()(const State& s) const {
        return {p.g_plus * u * (1.0 - s[0]) - p.g_minus * s[0],
                p.g_minus * s[0] * hillu - p.d2 * s[1],
                p.k3 * s[1] - p.d3 * s[2],
                p.k4 * s[2] - (p.d4 + p.k5) * s[3],
                p.k5 * s[3] - p.d4 * s[4]};
    }
};

bool bad_state(const State& s) {
    for (double v : s)
        if (!std::isfinite(v) || v < -1e-9) return true;
    return s[0] > 1.0 + 1e-9;
}

State rk4_step(const Deriv& f, const State& s, double h) {
    State k1 = f(s), y{};
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] + 0.5 * h * k1[i];
    State k2 = f(y);
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] + 0.5 * h * k2[i];
    State k3 = f(y);
    for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] + h * k3[i];
    State k4 = f(y);
    for (std::size_t i = 0; i < s.size(); ++i)
        y[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

// Step-doubling RK4 over [t, t+h]: one full step is checked against two half
// steps, and the interval is split whenever they disagree or the step leaves
// the physical region. Up to 20 refinement levels before giving up.
void integrate_interval(const Deriv& f, State& s, double h, int depth) {
    State full = rk4_step(f, s, h);
    State mid = rk4_step(f, s, 0.5 * h);
    State fine = bad_state(mid) ? mid : rk4_step(f, mid, 0.5 * h);
    bool refine = bad_state(full) || bad_state(fine);
    if (!refine)
        for (std::size_t i = 0; i < s.size(); ++i) {
            double scale = std::max({std::abs(s[i]), std::abs(fine[i]), 1.0});
            if (std::abs(full[i] - fine[i]) > 1e-9 + 1e-6 * scale) refine = true;
        }
    if (refine) {
        if (depth >= 20)
            throw SimulationError("dcs2 integration is unstable even after local refinement; "
                                  "the rate constants are too stiff for this step size");
        integrate_interval(f, s, 0.5 * h, depth + 1);
        integrate_interval(f, s, 0.5 * h, depth + 1);
        return;
    }
    for (double& v : fine) v = std::max(v, 0.0);  // round-off guard
    fine[0] = std::min(fine[0], 1.0);
    s = fine;
}

}  // namespace

void Dcs2Params::validate() const {
    for (double v : {g_plus, g_minus, d2, k3, d3, k4, k5})
        if (!(v > 0.0)) throw ConfigError("dcs2 rate constants must be positive");
    if (!(d4 >= 0.0)) throw ConfigError("dcs2 mYFP degradation rate must be non-negative");
    if (!(a > std::exp(1.0))) throw ConfigError("dcs2 amplitude parameter must exceed e");
    if (hill.amplitude != a)
        throw ConfigError("dcs2 Hill coefficients are stale; call refresh_hill()");
    hill.validate();
}

void Dcs2Params::refresh_hill() { hill = fit_hill_seeded(a); }

double Dcs2Trajectory::max_myfp() const {
    if (myfp.empty()) throw ConfigError("empty dcs2 trajectory");
    return *std::max_element(myfp.begin(), myfp.end());
}

double Dcs2Trajectory::myfp_at(double t) const {
    if (times.empty()) throw ConfigError("empty dcs2 trajectory");
    if (t < times.front() - 1e-9 || t > times.back() + 1e-9)
        throw ConfigError("dcs2 sample time outside the simulated horizon");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return myfp.front();
    if (it == times.end()) return myfp.back();
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return myfp[i - 1] + w * (myfp[i] - myfp[i - 1]);
}

void Dcs2Trajectory::write_csv(std::ostream& os) const {
    os << "time,p_active,c_init,mrna,yfp,myfp\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        os << csv::format_double(times[i], 12) << ',' << csv::format_double(p_active[i], 12)
           << ',' << csv::format_double(c_init[i], 12) << ',' << csv::format_double(mrna[i], 12)
           << ',' << csv::format_double(yfp[i], 12) << ',' << csv::format_double(myfp[i], 12)
           << '\n';
}

Dcs2Trajectory simulate_dcs2(const Dcs2Params& params, const StepSignal& msn2, double horizon,
                             double dt) {
    params.validate();
    if (!(horizon > 0.0)) throw ConfigError("dcs2 horizon must be positive");
    if (!(dt > 0.0)) throw ConfigError("dcs2 step size must be positive");
    for (double v : msn2.values())
        if (v < 0.0) throw ConfigError("msn2 concentrations must be non-negative");

    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        double t = dt * static_cast<double>(k);
        if (t >= horizon) break;
        grid.push_back(t);
    }
    grid.push_back(horizon);

    Dcs2Trajectory out;
    out.times.reserve(grid.size());
    for (auto* v : {&out.p_active, &out.c_init, &out.mrna, &out.yfp, &out.myfp})
        v->reserve(grid.size());

    State s{};
    auto record = [&](double t) {
        out.times.push_back(t);
        out.p_active.push_back(s[0]);
        out.c_init.push_back(s[1]);
        out.mrna.push_back(s[2]);
        out.yfp.push_back(s[3]);
        out.myfp.push_back(s[4]);
    };
    record(grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double left = grid[k - 1];
        auto advance = [&](double right) {
            if (!(right > left)) return;
            Deriv f{params, msn2.value_at(left), 0.0};
            f.hillu = hill_eval(params.hill, f.u);
            integrate_interval(f, s, right - left, 0);
            left = right;
        };
        for (double b : msn2.times())
            if (b > left && b < grid[k]) advance(b);
        advance(grid[k]);
        record(grid[k]);
    }
    return out;
}

namespace {

double dataset_ssr(const Dcs2Params& refreshed, const Dcs2Dataset& ds, double dt) {
    if (ds.myfp.size() == 0)
        throw ConfigError("dcs2 dataset '" + ds.label + "' has no samples");
    if (ds.msn2.size() == 0)
        throw ConfigError("dcs2 dataset '" + ds.label + "' has no input profile");
    double horizon = std::max(ds.myfp.times().back(), dt);
    Dcs2Trajectory traj = simulate_dcs2(refreshed, ds.msn2, horizon, dt);
    double ssr = 0.0;
    for (std::size_t i = 0; i < ds.myfp.size(); ++i) {
        double t = ds.myfp.times()[i];
        if (t < 0.0) throw ConfigError("dcs2 dataset '" + ds.label + "' has negative times");
        double r = traj.myfp_at(t) - ds.myfp.values()[i];
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

double dcs2_objective(const Dcs2Params& params, const std::vector<Dcs2Dataset>& datasets,
                      double dt) {
    if (datasets.empty()) throw ConfigError("dcs2 objective needs at least one dataset");
    Dcs2Params p = params;
    p.refresh_hill();
    double total = 0.0;
    for (const auto& ds : datasets) total += dataset_ssr(p, ds, dt);
    return total;
}

namespace {

using LogPoint = std::array<double, 5>;  // logs of g_plus, g_minus, a, d2, k3

Dcs2Params from_logs(const Dcs2Params& base, const LogPoint& z) {
    Dcs2Params p = base;
    p.g_plus = std::exp(z[0]);
    p.g_minus = std::exp(z[1]);
    p.a = std::exp(z[2]);
    p.d2 = std::exp(z[3]);
    p.k3 = std::exp(z[4]);
    return p;
}

struct NmRun {
    LogPoint x{};
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5) on a
// right-angle simplex with the given edge length.
template <typename F>
NmRun nelder_mead(F&& eval, const LogPoint& start, double edge, int max_iter, double tol) {
    constexpr std::size_t n = 5;
    std::array<LogPoint, n + 1> x;
    std::array<double, n + 1> f;
    x[0] = start;
    f[0] = eval(x[0]);
    for (std::size_t i = 0; i < n; ++i) {
        x[i + 1] = start;
        x[i + 1][i] += edge;
        f[i + 1] = eval(x[i + 1]);
    }

    std::array<std::size_t, n + 1> order{};
    NmRun run;
    for (int it = 0; it < max_iter; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::size_t best = order[0], second_worst = order[n - 1], worst = order[n];

        double span = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t c = 0; c < n; ++c)
                span = std::max(span, std::abs(x[i][c] - x[best][c]));
        double spread = f[worst] - f[best];
        if (span <= 1e-9 ||
            (std::isfinite(spread) && spread <= tol * (std::abs(f[best]) + 1e-18))) {
            run.converged = true;
            break;
        }

        LogPoint centroid{};
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t c = 0; c < n; ++c) centroid[c] += x[i][c] / static_cast<double>(n);
        }
        auto blend = [&](double coef) {
            LogPoint p;
            for (std::size_t c = 0; c < n; ++c)
                p[c] = centroid[c] + coef * (x[worst][c] - centroid[c]);
            return p;
        };

        LogPoint refl = blend(-1.0);
        double f_refl = eval(refl);
        if (f_refl < f[best]) {
            LogPoint exp_p = blend(-2.0);
            double f_exp = eval(exp_p);
            if (f_exp < f_refl) {
                x[worst] = exp_p;
                f[worst] = f_exp;
            } else {
                x[worst] = refl;
                f[worst] = f_refl;
            }
        } else if (f_refl < f[second_worst]) {
            x[worst] = refl;
            f[worst] = f_refl;
        } else {
            bool outside = f_refl < f[worst];
            LogPoint con = blend(outside ? -0.5 : 0.5);
            double f_con = eval(con);
            if (f_con < std::min(f_refl, f[worst])) {
                x[worst] = con;
                f[worst] = f_con;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t c = 0; c < n; ++c)
                        x[i][c] = x[best][c] + 0.5 * (x[i][c] - x[best][c]);
                    f[i] = eval(x[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (f[i] < f[best]) best = i;
    run.x = x[best];
    run.f = f[best];
    return run;
}

}  // namespace

Dcs2FitResult fit_dcs2(const std::vector<Dcs2Dataset>& datasets, const Dcs2Params& initial,
                       const Dcs2FitConfig& config) {
    if (datasets.empty()) throw ConfigError("dcs2 fit needs at least one dataset");
    if (!(config.dt > 0.0)) throw ConfigError("dcs2 fit step size must be positive");
    if (config.max_iterations < 1) throw ConfigError("dcs2 fit needs a positive iteration budget");
    if (!(config.tolerance > 0.0)) throw ConfigError("dcs2 fit tolerance must be positive");

    Dcs2Params p0 = initial;
    p0.refresh_hill();
    p0.validate();

    Dcs2FitResult result;
    auto finalize = [&](Dcs2Params p) {
        p.refresh_hill();
        result.params = p;
        result.per_dataset_error.clear();
        result.error = 0.0;
        for (const auto& ds : datasets) {
            result.per_dataset_error.push_back(dataset_ssr(result.params, ds, config.dt));
            result.error += result.per_dataset_error.back();
        }
    };

    bool any_drive = false;
    for (const auto& ds : datasets) {
        if (ds.msn2.size() == 0)
            throw ConfigError("dcs2 dataset '" + ds.label + "' has no input profile");
        for (double v : ds.msn2.values()) any_drive = any_drive || v > 0.0;
    }
    if (!any_drive) {
        finalize(p0);
        result.unidentifiable = true;
        return result;
    }

    double u_max = 0.0;
    for (const auto& ds : datasets)
        for (double v : ds.msn2.values()) u_max = std::max(u_max, v);

    const double inf = std::numeric_limits<double>::infinity();
    auto eval = [&](const LogPoint& z) {
        Dcs2Params p = from_logs(initial, z);
        for (double v : {p.g_plus, p.g_minus, p.a, p.d2, p.k3})
            if (!(v >= 1e-10) || !(v <= 1e10)) return inf;
        if (p.a <= 2.8) return inf;  // keep clear of the a > e Hill-fit boundary
        // Penalize rates so stiff that step refinement would dominate runtime.
        double r_max = std::max({p.g_plus * u_max + p.g_minus, p.d2, p.d3, p.d4 + p.k5});
        if (r_max * config.dt > 180.0) return inf;
        try {
            return dcs2_objective(p, datasets, config.dt);
        } catch (const SimulationError&) {
            return inf;
        }
    };

    const LogPoint base{std::log(initial.g_plus), std::log(initial.g_minus),
                        std::log(initial.a), std::log(initial.d2), std::log(initial.k3)};
    const std::array<std::array<double, 5>, 6> scales{{{1.0, 1.0, 1.0, 1.0, 1.0},
                                                       {0.4, 0.4, 0.4, 0.4, 0.4},
                                                       {2.5, 2.5, 2.5, 2.5, 2.5},
                                                       {0.4, 2.5, 0.4, 2.5, 0.4},
                                                       {2.5, 0.4, 2.5, 0.4, 2.5},
                                                       {1.6, 0.6, 0.7, 1.8, 0.5}}};

    NmRun best;
    for (const auto& scale : scales) {
        LogPoint z = base;
        for (std::size_t c = 0; c < z.size(); ++c) z[c] += std::log(scale[c]);
        NmRun run = nelder_mead(eval, z, 0.25, config.max_iterations, config.tolerance);
        if (run.f < best.f) best = run;
    }
    // Polish from the pooled winner with a tighter simplex.
    NmRun polish = nelder_mead(eval, best.x, 0.125, config.max_iterations, config.tolerance);
    if (polish.f <= best.f) best = polish;

    result.degraded = !best.converged;
    if (!std::isfinite(best.f)) {
        finalize(p0);
        result.degraded = true;
        return result;
    }
    finalize(from_logs(initial, best.x));
    return result;
}

ProportionalityResult max_myfp_proportionality(Dcs2Params params,
                                               const std::vector<StepSignal>& inputs,
                                               double horizon, double dt) {
    if (inputs.empty()) throw ConfigError("proportionality check needs at least one input");
    params.d4 = 0.0;  // the linear max-mYFP law holds for non-degrading reporter
    params.refresh_hill();

    ProportionalityResult res;
    for (const auto& in : inputs) {
        const auto& bt = in.times();
        const auto& bv = in.values();
        double on = bv.front() > 0.0 ? std::clamp(bt.front(), 0.0, horizon) : 0.0;
        for (std::size_t i = 0; i < bt.size(); ++i) {
            double lo = std::max(bt[i], 0.0);
            double hi = std::min(i + 1 < bt.size() ? bt[i + 1] : horizon, horizon);
            if (bv[i] > 0.0 && hi > lo) on += hi - lo;
        }
        res.durations.push_back(on);
        res.max_myfp.push_back(simulate_dcs2(params, in, horizon, dt).max_myfp());
    }

    double sdy = 0.0, sdd = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < res.durations.size(); ++i) {
        sdy += res.durations[i] * res.max_myfp[i];
        sdd += res.durations[i] * res.durations[i];
        syy += res.max_myfp[i] * res.max_myfp[i];
    }
    if (!(sdd > 0.0)) throw ConfigError("proportionality check needs inputs with ON time");
    res.slope = sdy / sdd;
    double ss = 0.0;
    for (std::size_t i = 0; i < res.durations.size(); ++i) {
        double e = res.max_myfp[i] - res.slope * res.durations[i];
        ss += e * e;
    }
    res.relative_residual = syy > 0.0 ? std::sqrt(ss / syy) : 0.0;
    return res;
}

const std::array<Msn2Level, 4>& msn2_levels() {
    static const std::array<Msn2Level, 4> levels{{{"100nM", 313.2},
                                                  {"275nM", 744.5},
                                                  {"690nM", 1107.8},
                                                  {"3uM", 1410.1}}};
    return levels;
}

double msn2_amplitude(std::string_view label) {
    for (const auto& l : msn2_levels())
        if (label == l.label) return l.amplitude;
    throw ConfigError("unknown Msn2 inhibitor level: " + std::string(label));
}

StepSignal pulse_train(double amplitude, int pulses, double on_minutes, double gap_minutes,
                       double start) {
    if (!(amplitude > 0.0)) throw ConfigError("pulse amplitude must be positive");
    if (pulses < 1) throw ConfigError("pulse train needs at least one pulse");
    if (!(on_minutes > 0.0)) throw ConfigError("pulse duration must be positive");
    if (pulses > 1 && !(gap_minutes > 0.0)) throw ConfigError("pulse gap must be positive");
    if (!(start >= 0.0)) throw ConfigError("pulse train cannot start before t = 0");

    std::vector<double> t, v;
    if (start > 0.0) {
        t.push_back(0.0);
        v.push_back(0.0);
    }
    double at = start;
    for (int i = 0; i < pulses; ++i) {
        t.push_back(at);
        v.push_back(amplitude);
        t.push_back(at + on_minutes);
        v.push_back(0.0);
        at += on_minutes + gap_minutes;
    }
    return StepSignal(std::move(t), std::move(v));
}

namespace {

double parse_number(const std::string& field, const std::string& what, std::size_t lineno) {
    std::size_t pos = 0;
    double v = 0.0;
    bool ok = true;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        ok = false;
    }
    while (ok && pos < field.size() && (field[pos] == ' ' || field[pos] == '\t')) ++pos;
    if (!ok || pos != field.size())
        throw ConfigError("timeseries line " + std::to_string(lineno) + ": " + what +
                          " is not a number: '" + field + "'");
    return v;
}

}  // namespace

Dcs2Ingest ingest_timeseries(std::istream& in) {
    Dcs2Ingest out;
    std::string line;
    std::vector<std::string> header;
    std::vector<double> times;
    std::vector<std::vector<double>> cols;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv::parse_line(line);
        if (header.empty()) {
            if (fields.size() < 2)
                throw ConfigError("timeseries needs a time column and at least one profile");
            header = fields;
            cols.resize(header.size() - 1);
            continue;
        }
        if (fields.size() != header.size())
            throw ConfigError("timeseries line " + std::to_string(lineno) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        double t = parse_number(fields[0], header[0], lineno);
        if (!times.empty() && !(t > times.back()))
            throw ConfigError("timeseries line " + std::to_string(lineno) +
                              ": times must be strictly increasing");
        times.push_back(t);
        for (std::size_t c = 1; c < fields.size(); ++c)
            cols[c - 1].push_back(parse_number(fields[c], header[c], lineno));
    }
    if (header.empty()) throw ConfigError("timeseries file is empty");
    if (times.size() < 2) throw ConfigError("timeseries needs at least two samples");

    double dt0 = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt0) > 1e-9 * std::max(1.0, std::abs(dt0))) {
            out.warnings.push_back("non-uniform sample spacing; samples are used as given");
            break;
        }

    for (std::size_t c = 0; c < cols.size(); ++c) {
        Dcs2Dataset ds;
        ds.label = header[c + 1];
        ds.myfp = SampledSeries(times, std::move(cols[c]));
        out.datasets.push_back(std::move(ds));
    }
    return out;
}

Dcs2Ingest ingest_timeseries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open timeseries file: " + path);
    return ingest_timeseries(in);
}

}  // namespace chemodem
