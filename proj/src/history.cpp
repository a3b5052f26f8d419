#include "delayev/history.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace delayev {

namespace {
constexpr double kEndpointTol = 1e-12;
}

HistorySegment HistorySegment::from_callback(double tau0, int dim,
                                             std::function<Eigen::VectorXd(double)> fn) {
    if (!(tau0 >= 0.0))
        throw DomainError("history: tau0 must be nonnegative");
    if (dim <= 0)
        throw DimensionError("history: dimension must be positive");
    if (!fn)
        throw ConfigError("history: null callback");
    HistorySegment h;
    h.tau0_ = tau0;
    h.dim_ = dim;
    h.fn_ = std::move(fn);
    const Eigen::VectorXd probe = h.fn_(-0.5 * tau0);
    if (probe.size() != dim)
        throw DimensionError("history: callback value length does not match dim");
    return h;
}

HistorySegment HistorySegment::from_table(std::vector<double> times,
                                          std::vector<Eigen::VectorXd> values,
                                          std::optional<double> lipschitz_bound) {
    if (times.empty() || times.size() != values.size())
        throw DimensionError("history table: times and values must be non-empty and equal-length");
    if (std::abs(times.back()) > kEndpointTol)
        throw ConfigError("history table: last sample time must be 0");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1]))
            throw ConfigError("history table: times must be strictly increasing");
    const auto d = values.front().size();
    for (const auto& v : values) {
        if (v.size() != d)
            throw DimensionError("history table: inconsistent value lengths");
        if (!v.allFinite())
            throw NumericError("history table: non-finite value");
    }
    if (lipschitz_bound) {
        for (std::size_t j = 1; j < times.size(); ++j) {
            const double dt = times[j] - times[j - 1];
            const double jump = (values[j] - values[j - 1]).norm();
            if (jump > *lipschitz_bound * dt * (1.0 + 1e-9) + 1e-14)
                throw ConfigError("history table: adjacent samples violate the declared Lipschitz bound");
        }
    }
    HistorySegment h;
    h.tau0_ = -times.front();
    h.dim_ = static_cast<int>(d);
    h.times_ = std::move(times);
    h.values_ = std::move(values);
    return h;
}

HistorySegment HistorySegment::with_channel_index(int idx) const {
    HistorySegment copy = *this;
    copy.channel_index_ = idx;
    return copy;
}

Eigen::VectorXd HistorySegment::eval(double s) const {
    if (!fn_ && times_.empty())
        throw ConfigError("history: evaluating an empty segment");
    if (s < -tau0_ - kEndpointTol || s > kEndpointTol) {
        std::ostringstream msg;
        msg << "history query at s=" << s << " outside [-" << tau0_ << ", 0]";
        if (channel_index_ >= 0)
            msg << " for channel " << channel_index_;
        throw DomainError(msg.str());
    }
    const double sc = std::clamp(s, -tau0_, 0.0);
    if (fn_) {
        Eigen::VectorXd v = fn_(sc);
        if (v.size() != dim_)
            throw DimensionError("history callback returned a wrong-length value");
        return v;
    }
    // Tabulated: linear interpolation.
    if (times_.size() == 1)
        return values_.front();
    auto it = std::upper_bound(times_.begin(), times_.end(), sc);
    std::size_t hi = std::min<std::size_t>(
        times_.size() - 1,
        std::max<std::size_t>(1, static_cast<std::size_t>(it - times_.begin())));
    const std::size_t lo = hi - 1;
    const double span = times_[hi] - times_[lo];
    const double th = std::clamp((sc - times_[lo]) / span, 0.0, 1.0);
    return (1.0 - th) * values_[lo] + th * values_[hi];
}

Eigen::VectorXd history_eval(const HistorySegment& h, double s) {
    return h.eval(s);
}

} // namespace delayev
