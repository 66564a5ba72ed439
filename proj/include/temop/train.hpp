#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "temop/error.hpp"
#include "temop/series.hpp"

namespace temop {

inline constexpr std::size_t kDefaultMinSupport = 50;
inline constexpr double kDefaultRidge = 0.1;
inline constexpr std::size_t kDefaultLagCap = 30;
inline constexpr double kStdFloor = 1e-8;

/// Statistics of one class (+ or -) inside a trend-pattern subset.
///
/// Samples are z-scored feature-wise with `mean`/`std`; `inv_cov` is the
/// inverse of the covariance of the z-scored samples plus a ridge `lambda * I`.
/// A class with no samples has `count == 0` and empty vectors.
struct ClassStats {
    std::size_t count = 0;
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
    Eigen::MatrixXd inv_cov;

    bool empty() const noexcept { return count == 0; }
    Eigen::Index dimension() const noexcept { return mean.size(); }
};

struct SubsetModel {
    TrendPattern pattern;
    std::size_t total = 0;
    ClassStats plus;
    ClassStats minus;
};

struct LagModel {
    std::size_t lag = 0;
    std::vector<SubsetModel> subsets; // sorted by pattern
};

struct TemopModel {
    std::size_t m = kDefaultMinSupport;
    std::size_t q = 0;
    double lambda = kDefaultRidge;
    std::size_t train_len = 0;
    std::vector<LagModel> lag_models; // lags 1..q in order
};

struct TrainOptions {
    std::size_t m = kDefaultMinSupport;
    double lambda = kDefaultRidge;
    std::size_t lag_cap = kDefaultLagCap;
};

using Partition = std::map<TrendPattern, std::vector<Window>>;

inline Partition partition_by_pattern(std::span<const Window> windows) {
    Partition buckets;
    for (const Window& w : windows) buckets[trend_encode_window(w.x)].push_back(w);
    return buckets;
}

/// True iff every observed bucket holds at least `m` windows.
inline bool check_min_support(const Partition& partition, std::size_t m) {
    return std::all_of(partition.begin(), partition.end(),
                       [m](const auto& bucket) { return bucket.second.size() >= m; });
}

inline ClassStats fit_class_stats(std::span<const std::vector<double>> samples, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(ErrorKind::InvalidInput, "covariance ridge must be positive and finite");
    }
    ClassStats stats;
    if (samples.empty()) return stats;

    const auto n = static_cast<Eigen::Index>(samples.size());
    const auto dim = static_cast<Eigen::Index>(samples.front().size());
    if (dim == 0) fail(ErrorKind::InvalidInput, "class samples must have at least one feature");

    Eigen::MatrixXd data(n, dim);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = samples[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != dim) {
            fail(ErrorKind::InvalidInput, "class samples have inconsistent dimensions");
        }
        for (Eigen::Index c = 0; c < dim; ++c) data(r, c) = row[static_cast<std::size_t>(c)];
    }

    stats.count = samples.size();
    stats.mean = data.colwise().mean().transpose();
    stats.std = Eigen::VectorXd::Constant(dim, kStdFloor);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);

    if (n > 1) {
        const Eigen::MatrixXd centered = data.rowwise() - stats.mean.transpose();
        const double denom = static_cast<double>(n - 1);
        for (Eigen::Index c = 0; c < dim; ++c) {
            stats.std(c) = std::max(std::sqrt(centered.col(c).squaredNorm() / denom), kStdFloor);
        }
        const Eigen::MatrixXd z = centered.array().rowwise() / stats.std.transpose().array();
        cov = (z.transpose() * z) / denom;
    }

    Eigen::MatrixXd regularized = cov;
    regularized.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::Internal, "regularized covariance is not positive definite");
    }
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    stats.inv_cov = (inv + inv.transpose()) * 0.5;
    return stats;
}

namespace detail {

inline LagModel fit_lag(std::size_t lag, const Partition& partition, double lambda) {
    LagModel model;
    model.lag = lag;
    model.subsets.reserve(partition.size());
    for (const auto& [pattern, windows] : partition) {
        std::vector<std::vector<double>> up;
        std::vector<std::vector<double>> down;
        for (const Window& w : windows) (w.y_trend > 0 ? up : down).push_back(w.x);
        SubsetModel subset;
        subset.pattern = pattern;
        subset.total = windows.size();
        subset.plus = fit_class_stats(up, lambda);
        subset.minus = fit_class_stats(down, lambda);
        model.subsets.push_back(std::move(subset));
    }
    return model;
}

} // namespace detail

/// Fits one model per lag order, growing the lag while every observed
/// trend-pattern subset keeps at least `m` windows. The first lag that fails
/// (or `lag_cap`) ends the search.
inline TemopModel train(std::span<const double> series, const TrainOptions& options = {}) {
    if (options.m < 1) fail(ErrorKind::InvalidInput, "minimum support m must be at least 1");
    if (options.lag_cap < 1) fail(ErrorKind::InvalidInput, "lag cap must be at least 1");
    if (!(options.lambda > 0.0) || !std::isfinite(options.lambda)) {
        fail(ErrorKind::InvalidInput, "covariance ridge must be positive and finite");
    }
    detail::require_all_finite(series, "series value");
    if (series.size() < options.m + 2) {
        fail(ErrorKind::InsufficientData, "training needs at least m + 2 = " +
                                              std::to_string(options.m + 2) + " values, got " +
                                              std::to_string(series.size()));
    }

    TemopModel model;
    model.m = options.m;
    model.lambda = options.lambda;
    model.train_len = series.size();

    for (std::size_t lag = 1; lag <= options.lag_cap && series.size() >= lag + 1; ++lag) {
        const auto windows = make_windows(series, lag);
        const Partition partition = partition_by_pattern(windows);
        if (!check_min_support(partition, options.m)) break;
        model.lag_models.push_back(detail::fit_lag(lag, partition, options.lambda));
    }

    model.q = model.lag_models.size();
    if (model.q == 0) {
        fail(ErrorKind::InsufficientData,
             "lag 1 has fewer than m = " + std::to_string(options.m) + " windows");
    }
    return model;
}

inline TemopModel train(const TimeSeries& series, const TrainOptions& options = {}) {
    return train(series.view(), options);
}

} // namespace temop
