#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "delayev/errors.hpp"

namespace delayev {

/// Prescribed past values of one delay channel on [-tau_i(0), 0].
/// Stores the value of B_i U directly; the solver never applies B_i to it.
class HistorySegment {
public:
    /// An empty segment; evaluating it is an error. Needed so channels can
    /// be assembled field by field.
    HistorySegment() = default;

    static HistorySegment from_callback(double tau0, int dim,
                                        std::function<Eigen::VectorXd(double)> fn);
    /// Piecewise-linear table. `times` must be strictly increasing and end at 0;
    /// when a Lipschitz bound is declared, adjacent samples are checked against it.
    static HistorySegment from_table(std::vector<double> times,
                                     std::vector<Eigen::VectorXd> values,
                                     std::optional<double> lipschitz_bound = std::nullopt);

    double tau0() const { return tau0_; }
    int dim() const { return dim_; }
    int channel_index() const { return channel_index_; }
    bool tabulated() const { return !times_.empty(); }

    HistorySegment with_channel_index(int idx) const;

    /// Value at s in [-tau0, 0]; endpoints tolerate 1e-12 of slack.
    Eigen::VectorXd eval(double s) const;

private:
    double tau0_ = 0.0;
    int dim_ = 0;
    int channel_index_ = -1;
    std::function<Eigen::VectorXd(double)> fn_;
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> values_;
};

Eigen::VectorXd history_eval(const HistorySegment& h, double s);

} // namespace delayev
