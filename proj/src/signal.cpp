#include "chemodem/signal.hpp"

#include <algorithm>
#include <cmath>

namespace chemodem {

StepSignal::StepSignal(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
        throw std::invalid_argument("StepSignal: need equal, non-empty times/values");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("StepSignal: breakpoints must be strictly increasing");
}

std::size_t StepSignal::segment_index(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;  // before the first breakpoint: extend first value
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double StepSignal::value_at(double t) const { return values_[segment_index(t)]; }

double StepSignal::integral(double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("StepSignal::integral: t1 < t0");
    if (t1 == t0) return 0.0;
    std::size_t i = segment_index(t0);
    double acc = 0.0;
    double left = t0;
    while (i + 1 < times_.size() && times_[i + 1] < t1) {
        acc += values_[i] * (times_[i + 1] - left);
        left = times_[i + 1];
        ++i;
    }
    acc += values_[i] * (t1 - left);
    return acc;
}

std::vector<double> StepSignal::merged_breakpoints(const StepSignal& other, double t0,
                                                   double t1) const {
    std::vector<double> pts;
    pts.push_back(t0);
    for (double t : times_)
        if (t > t0 && t < t1) pts.push_back(t);
    for (double t : other.times_)
        if (t > t0 && t < t1) pts.push_back(t);
    pts.push_back(t1);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

SampledSeries::SampledSeries(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size())
        throw std::invalid_argument("SampledSeries: need equal, non-empty times/values");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("SampledSeries: times must be strictly increasing");
}

SampledSeries SampledSeries::uniform(double t0, double dt, std::vector<double> values) {
    std::vector<double> times(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) times[i] = t0 + dt * static_cast<double>(i);
    return SampledSeries(std::move(times), std::move(values));
}

double SampledSeries::value_at(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double SampledSeries::integral(double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("SampledSeries::integral: t1 < t0");
    if (t1 == t0) return 0.0;
    double acc = 0.0;
    double left = t0;
    double vleft = value_at(t0);
    auto it = std::upper_bound(times_.begin(), times_.end(), t0);
    for (; it != times_.end() && *it < t1; ++it) {
        std::size_t i = static_cast<std::size_t>(it - times_.begin());
        acc += 0.5 * (vleft + values_[i]) * (*it - left);
        left = *it;
        vleft = values_[i];
    }
    acc += 0.5 * (vleft + value_at(t1)) * (t1 - left);
    return acc;
}

}  // namespace chemodem
