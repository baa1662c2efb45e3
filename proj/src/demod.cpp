#include "chemodem/demod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "chemodem/csv.hpp"
#include "chemodem/errors.hpp"

namespace chemodem {

void CMSymbolSet::validate() const {
    if (amplitudes.size() < 2) throw ConfigError("symbol set needs at least 2 amplitudes");
    if (!(off_level >= 1.0)) throw ConfigError("off level must be >= 1");
    if (!(duration > 0.0)) throw ConfigError("symbol duration must be positive");
    for (double a : amplitudes)
        if (!(a > off_level))
            throw ConfigError("every amplitude must exceed the off level");
    if (!priors.empty()) {
        if (priors.size() != amplitudes.size())
            throw ConfigError("priors must match the number of symbols");
        double sum = 0.0;
        bool any_positive = false;
        for (double p : priors) {
            if (!(p >= 0.0)) throw ConfigError("priors must be non-negative");
            if (p > 0.0) any_positive = true;
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("priors must sum to 1");
        if (!any_positive) throw ConfigError("at least one prior must be positive");
    }
}

std::vector<std::string> CMSymbolSet::warnings() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < amplitudes.size(); ++k)
        if (amplitudes[k] < 10.0 * off_level)
            out.push_back("amplitude " + std::to_string(k) + " = " +
                          csv::format_double(amplitudes[k], 6) +
                          " is not >> off level; the filter derivation assumes a_k >> b");
    return out;
}

double CMSymbolSet::prior(int k) const {
    if (priors.empty()) return 1.0 / static_cast<double>(amplitudes.size());
    return priors[static_cast<std::size_t>(k)];
}

double CMSymbolSet::log_prior(int k) const {
    double p = prior(k);
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

StepSignal CMSymbolSet::lambda(int k) const {
    return StepSignal({0.0, duration}, {amplitudes[static_cast<std::size_t>(k)], off_level});
}

double FilterPath::at_time(double t) const {
    if (times.empty()) return log_prior;
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (values[i] == values[i - 1]) return values[i - 1];  // also covers -inf endpoints
    double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

void FilterPath::write_csv(std::ostream& os) const {
    os << "time,value\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        os << csv::format_double(times[i], 12) << ',' << csv::format_double(values[i], 12)
           << '\n';
}

Reference Reference::step(StepSignal s) {
    Reference r;
    r.step_ = std::move(s);
    return r;
}

Reference Reference::sampled(SampledSeries s) {
    Reference r;
    r.sampled_ = std::move(s);
    return r;
}

double Reference::value_at(double t) const {
    return step_ ? step_->value_at(t) : sampled_->value_at(t);
}

double Reference::integral(double t0, double t1) const {
    return step_ ? step_->integral(t0, t1) : sampled_->integral(t0, t1);
}

namespace {

// Walks the merged breakpoints of x_* (and optionally more step signals),
// accumulating a path that is linear between breakpoints except for explicit
// jumps at upward x_* steps. Samples land on the uniform grid.
class PathAccumulator {
  public:
    PathAccumulator(double log_prior, double horizon, double sample_dt)
        : horizon_(horizon), dt_(sample_dt), value_(log_prior) {
        if (!(horizon > 0.0)) throw ConfigError("filter horizon must be positive");
        if (!(sample_dt > 0.0)) throw ConfigError("filter sample_dt must be positive");
        path_.sample_dt = sample_dt;
        path_.log_prior = log_prior;
        n_grid_ = static_cast<std::size_t>(horizon / sample_dt + 1e-9);
        emit_grid_points_up_to(0.0, 0.0, 0.0);  // records t = 0
    }

    // Advance over [t0, t1) during which the path value changes at constant
    // slope `rate`; emits any grid samples falling inside.
    void advance_linear(double t0, double t1, double rate) {
        emit_grid_points_up_to(t1, t0, rate);
        value_ += rate * (t1 - t0);
    }

    // Advance with a supplied increment function inc(t) = value(t) - value(t0)
    // (used when the reference is a sampled series, where the slope varies).
    template <class Inc>
    void advance_integral(double t0, double t1, Inc&& inc) {
        (void)t0;
        while (next_grid_ <= n_grid_) {
            double g = grid_time(next_grid_);
            if (g >= t1) break;
            path_.times.push_back(g);
            path_.values.push_back(value_ + inc(g));
            ++next_grid_;
        }
        value_ += inc(t1);
    }

    void jump(double t, double size) {
        value_ += size;
        path_.jump_times.push_back(t);
        path_.jump_sizes.push_back(size);
    }

    FilterPath finish() {
        // grid points at (or floated just past) the horizon, then the horizon
        // itself when the grid does not land on it
        while (next_grid_ <= n_grid_) {
            path_.times.push_back(grid_time(next_grid_));
            path_.values.push_back(value_);
            ++next_grid_;
        }
        if (path_.times.empty() || path_.times.back() < horizon_) {
            path_.times.push_back(horizon_);
            path_.values.push_back(value_);
        }
        return std::move(path_);
    }

    double horizon() const { return horizon_; }

  private:
    double grid_time(std::size_t i) const {
        return std::min(dt_ * static_cast<double>(i), horizon_);
    }

    void emit_grid_points_up_to(double t_end, double t0, double rate) {
        while (next_grid_ <= n_grid_) {
            double g = grid_time(next_grid_);
            if (g >= t_end && !(next_grid_ == 0 && t_end == 0.0)) break;
            path_.times.push_back(g);
            path_.values.push_back(value_ + rate * (g - t0));
            ++next_grid_;
            if (t_end == 0.0) break;
        }
    }

    double horizon_;
    double dt_;
    double value_;
    std::size_t n_grid_ = 0;
    std::size_t next_grid_ = 0;
    FilterPath path_;
};

// Merged breakpoints of a set of step signals on [0, horizon), first entry 0.
std::vector<double> merged_times(std::initializer_list<const StepSignal*> signals,
                                 double horizon) {
    std::vector<double> pts{0.0};
    for (const StepSignal* s : signals)
        for (double t : s->times())
            if (t > 0.0 && t < horizon) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double upward_jump_at(const StepSignal& x, double t) {
    // jump size at breakpoint t (0 when t is not a breakpoint of x)
    const auto& ts = x.times();
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end() || *it != t || it == ts.begin()) return 0.0;
    std::size_t i = static_cast<std::size_t>(it - ts.begin());
    double d = x.values()[i] - x.values()[i - 1];
    return d > 0.0 ? d : 0.0;
}

}  // namespace

FilterPath exact_filter(const StepSignal& xstar, const Reference& reference,
                        const ReceptorParams& receptors, double log_prior, double horizon,
                        double sample_dt) {
    if (receptors.count < 1) throw ConfigError("receptor count must be at least 1");
    const double g_plus = receptors.binding_rate;
    const double M = static_cast<double>(receptors.count);

    PathAccumulator acc(log_prior, horizon, sample_dt);
    std::vector<double> pts;
    if (const StepSignal* lam = reference.step_signal())
        pts = merged_times({&xstar, lam}, horizon);
    else
        pts = merged_times({&xstar}, horizon);
    pts.push_back(horizon);

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double t0 = pts[i];
        double t1 = pts[i + 1];
        double j = upward_jump_at(xstar, t0);
        if (j > 0.0) {
            double ref = reference.value_at(t0);
            if (!(ref > 0.0))
                throw SimulationError("reference is not positive at an activation time");
            acc.jump(t0, j * std::log(ref));
        }
        double x = xstar.value_at(t0);
        double factor = -g_plus * (M - x);
        if (reference.step_signal()) {
            acc.advance_linear(t0, t1, factor * reference.value_at(t0));
        } else {
            acc.advance_integral(t0, t1,
                                 [&](double t) { return factor * reference.integral(t0, t); });
        }
    }
    // jump exactly at the horizon, if any
    double j = upward_jump_at(xstar, horizon);
    if (j > 0.0) {
        double ref = reference.value_at(horizon);
        if (!(ref > 0.0))
            throw SimulationError("reference is not positive at an activation time");
        acc.jump(horizon, j * std::log(ref));
    }
    return acc.finish();
}

FilterPath exact_filter(const Trajectory& trajectory, int active_species,
                        const Reference& reference, const ReceptorParams& receptors,
                        double log_prior, double sample_dt) {
    if (active_species < 0 ||
        static_cast<std::size_t>(active_species) >= trajectory.initial_state.size())
        throw ConfigError("trajectory does not contain the active-receptor species");
    return exact_filter(trajectory.species_path(active_species), reference, receptors, log_prior,
                        trajectory.horizon, sample_dt);
}

FilterPath intermediate_filter(const StepSignal& xstar, const StepSignal& input,
                               const StepSignal& lambda_k, double unbinding_rate, double horizon,
                               double log_prior, double sample_dt) {
    if (!(unbinding_rate > 0.0)) throw ConfigError("unbinding rate must be positive");
    PathAccumulator acc(log_prior, horizon, sample_dt);
    std::vector<double> pts = merged_times({&xstar, &input, &lambda_k}, horizon);
    pts.push_back(horizon);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double t0 = pts[i];
        double t1 = pts[i + 1];
        double x = xstar.value_at(t0);
        double u = input.value_at(t0);
        double lam = lambda_k.value_at(t0);
        double rate = 0.0;
        if (x > 0.0) {
            if (!(u > 0.0))
                throw SimulationError("input u(t) is zero while receptors are active");
            if (!(lam > 0.0)) throw SimulationError("reference lambda_k must be positive");
            rate = unbinding_rate * x * (std::log(lam) - lam / u);
        }
        acc.advance_linear(t0, t1, rate);
    }
    return acc.finish();
}

FilterPath positive_filter(const StepSignal& xstar, const StepSignal& input, double amplitude,
                           double unbinding_rate, double horizon, double sample_dt) {
    if (!(unbinding_rate > 0.0)) throw ConfigError("unbinding rate must be positive");
    if (!(amplitude > 1.0)) throw ConfigError("positive filter needs amplitude > 1");
    const double log_a = std::log(amplitude);
    PathAccumulator acc(0.0, horizon, sample_dt);
    std::vector<double> pts = merged_times({&xstar, &input}, horizon);
    pts.push_back(horizon);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double t0 = pts[i];
        double t1 = pts[i + 1];
        double x = xstar.value_at(t0);
        double u = input.value_at(t0);
        // [log a - a/u]_+ : zero for u <= a/log(a), including u = 0
        double factor = u > 0.0 ? log_a - amplitude / u : 0.0;
        double rate = (x > 0.0 && factor > 0.0) ? unbinding_rate * x * factor : 0.0;
        acc.advance_linear(t0, t1, rate);
    }
    return acc.finish();
}

double phi(double input_amplitude, double reference_amplitude) {
    if (!(input_amplitude > 0.0) || !(reference_amplitude > 0.0))
        throw ConfigError("phi requires positive amplitudes");
    return std::log(reference_amplitude) - reference_amplitude / input_amplitude;
}

RenewalStats renewal_stats(double binding_rate, double unbinding_rate, double amplitude,
                           int receptor_count) {
    if (!(binding_rate > 0.0) || !(unbinding_rate > 0.0) || !(amplitude > 0.0) ||
        receptor_count < 1)
        throw ConfigError("renewal stats require positive parameters");
    RenewalStats rs;
    double on = binding_rate * amplitude;
    rs.mean_interval = 1.0 / on + 1.0 / unbinding_rate;
    rs.interval_variance = 1.0 / (on * on) + 1.0 / (unbinding_rate * unbinding_rate);
    rs.x_star = static_cast<double>(receptor_count) * on / (on + unbinding_rate);
    return rs;
}

long activation_count(const StepSignal& xstar, double t_end) {
    long n = 0;
    const auto& ts = xstar.times();
    const auto& vs = xstar.values();
    for (std::size_t i = 1; i < ts.size() && ts[i] <= t_end; ++i) {
        double d = vs[i] - vs[i - 1];
        if (d > 0.0) n += static_cast<long>(std::llround(d));
    }
    return n;
}

long activation_count(const Trajectory& trajectory, int active_species, double t_end) {
    if (active_species < 0 ||
        static_cast<std::size_t>(active_species) >= trajectory.initial_state.size())
        throw ConfigError("trajectory does not contain the active-receptor species");
    if (t_end > trajectory.horizon + 1e-12)
        throw ConfigError("activation window extends past the trajectory horizon");
    long n = 0;
    for (std::size_t i = 0; i < trajectory.event_count() && trajectory.times[i] <= t_end; ++i)
        for (auto [s, d] : trajectory.event_deltas(i))
            if (s == active_species && d > 0) n += d;
    return n;
}

}  // namespace chemodem
