#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "temop/error.hpp"
#include "temop/series.hpp"
#include "temop/train.hpp"

namespace temop {

struct LagScores {
    double s_plus_trend = 0.0;
    double s_plus_dist = 0.0;
    double s_minus_trend = 0.0;
    double s_minus_dist = 0.0;

    double s_plus() const noexcept { return s_plus_trend + s_plus_dist; }
    double s_minus() const noexcept { return s_minus_trend + s_minus_dist; }
};

struct ScoreBreakdown {
    std::vector<LagScores> per_lag; // index k holds lag k + 1
    double total_plus = 0.0;
    double total_minus = 0.0;
    double p_up = 0.5;

    double p_down() const noexcept { return 1.0 - p_up; }
};

struct SubsetScores {
    double u = 0.0;
    double s_plus_trend = 0.0;
    double s_plus_dist = 0.0;
    double s_minus_trend = 0.0;
    double s_minus_dist = 0.0;
};

/// Posterior mean of a Beta(1, 1) prior updated with the class counts.
inline double bayes_trend_score(std::size_t n_plus, std::size_t n_minus) noexcept {
    return (static_cast<double>(n_plus) + 1.0) /
           (static_cast<double>(n_plus) + static_cast<double>(n_minus) + 2.0);
}

/// Maps a non-negative distance into (0, 1]; zero distance scores 1.
inline double dtp(double u) {
    if (!(u >= 0.0)) fail(ErrorKind::InvalidInput, "distance must be non-negative");
    return 2.0 / (1.0 + std::exp(u));
}

/// Distance from `x` to the class after z-scoring `x` with the class parameters.
inline double mahalanobis(std::span<const double> x, const ClassStats& stats) {
    if (stats.empty()) fail(ErrorKind::InvalidInput, "mahalanobis distance to an empty class");
    if (static_cast<Eigen::Index>(x.size()) != stats.dimension()) {
        fail(ErrorKind::InvalidInput, "vector of length " + std::to_string(x.size()) +
                                          " against class of dimension " +
                                          std::to_string(stats.dimension()));
    }
    const Eigen::Map<const Eigen::VectorXd> raw(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd z = (raw - stats.mean).cwiseQuotient(stats.std);
    const double quad = z.dot(stats.inv_cov * z);
    return std::sqrt(std::max(quad, 0.0));
}

inline SubsetScores subset_scores(std::span<const double> x0, const TrendPattern& pattern0,
                                  const SubsetModel& subset) {
    SubsetScores s;
    s.u = overlap(pattern0, subset.pattern);
    s.s_plus_trend = bayes_trend_score(subset.plus.count, subset.minus.count);
    s.s_minus_trend = bayes_trend_score(subset.minus.count, subset.plus.count);
    // An empty class contributes no distance evidence.
    s.s_plus_dist = subset.plus.empty() ? 0.0 : dtp(mahalanobis(x0, subset.plus));
    s.s_minus_dist = subset.minus.empty() ? 0.0 : dtp(mahalanobis(x0, subset.minus));
    return s;
}

/// Membership-weighted sums over every subset of one lag model.
inline LagScores lag_scores(const LagModel& lag_model, std::span<const double> recent) {
    if (recent.size() != lag_model.lag) {
        fail(ErrorKind::InvalidInput, "lag " + std::to_string(lag_model.lag) +
                                          " scoring needs exactly that many values, got " +
                                          std::to_string(recent.size()));
    }
    const TrendPattern pattern0 = trend_encode_window(recent);
    LagScores out;
    for (const SubsetModel& subset : lag_model.subsets) {
        const SubsetScores s = subset_scores(recent, pattern0, subset);
        out.s_plus_trend += s.u * s.s_plus_trend;
        out.s_plus_dist += s.u * s.s_plus_dist;
        out.s_minus_trend += s.u * s.s_minus_trend;
        out.s_minus_dist += s.u * s.s_minus_dist;
    }
    return out;
}

/// Two-class softmax probability of the first score, shifted by the max so
/// large totals stay finite.
inline double softmax_up(double total_plus, double total_minus) noexcept {
    const double top = std::max(total_plus, total_minus);
    const double ep = std::exp(total_plus - top);
    const double em = std::exp(total_minus - top);
    return ep / (ep + em);
}

/// Probability that the value following `recent` is not below its last value.
/// Only the last `model.q` values are used.
inline ScoreBreakdown predict_proba(const TemopModel& model, std::span<const double> recent) {
    if (recent.size() < model.q) {
        fail(ErrorKind::InsufficientHistory, "prediction needs at least q = " +
                                                 std::to_string(model.q) + " values, got " +
                                                 std::to_string(recent.size()));
    }
    detail::require_all_finite(recent.last(model.q), "history value");

    ScoreBreakdown out;
    out.per_lag.reserve(model.lag_models.size());
    for (const LagModel& lag_model : model.lag_models) {
        const LagScores s = lag_scores(lag_model, recent.last(lag_model.lag));
        out.total_plus += s.s_plus();
        out.total_minus += s.s_minus();
        out.per_lag.push_back(s);
    }
    out.p_up = softmax_up(out.total_plus, out.total_minus);
    return out;
}

/// +1 when `p_up` reaches the threshold (ties go up), otherwise -1.
inline TrendCode classify(double p_up, double threshold = 0.5) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        fail(ErrorKind::InvalidInput, "threshold must lie in [0, 1]");
    }
    if (!(p_up >= 0.0 && p_up <= 1.0)) fail(ErrorKind::InvalidInput, "probability must lie in [0, 1]");
    return p_up >= threshold ? TrendCode{1} : TrendCode{-1};
}

} // namespace temop
