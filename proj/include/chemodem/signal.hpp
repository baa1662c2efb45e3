#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chemodem {

// Piecewise-constant, right-continuous signal: value_at(t) == values[i] for
// t in [times[i], times[i+1]), and values.back() from times.back() onward.
class StepSignal {
  public:
    StepSignal() = default;
    StepSignal(std::vector<double> times, std::vector<double> values);

    static StepSignal constant(double value) { return StepSignal({0.0}, {value}); }

    double value_at(double t) const;
    double integral(double t0, double t1) const;
    double front_time() const { return times_.front(); }
    double initial_value() const { return values_.front(); }
    double final_value() const { return values_.back(); }
    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

    // Index of the segment containing t (last i with times[i] <= t).
    std::size_t segment_index(double t) const;

    // Merged breakpoints of *this and other on [t0, t1], both endpoints included.
    std::vector<double> merged_breakpoints(const StepSignal& other, double t0, double t1) const;

  private:
    std::vector<double> times_;
    std::vector<double> values_;
};

// Linearly interpolated samples; constant extrapolation outside [times front, back].
class SampledSeries {
  public:
    SampledSeries() = default;
    SampledSeries(std::vector<double> times, std::vector<double> values);

    static SampledSeries uniform(double t0, double dt, std::vector<double> values);

    double value_at(double t) const;
    double integral(double t0, double t1) const;  // trapezoid on the sample grid
    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::vector<double> times_;
    std::vector<double> values_;
};

}  // namespace chemodem
