#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "crw/errors.hpp"
#include "crw/experiment.hpp"

namespace crw {

std::string_view to_string(ScalingModel m) noexcept {
    switch (m) {
    case ScalingModel::power:
        return "power";
    case ScalingModel::nlogn:
        return "nlogn";
    case ScalingModel::log:
        return "log";
    }
    return "?";
}

ScalingModel scaling_model_from_string(std::string_view s) {
    for (auto m : {ScalingModel::power, ScalingModel::nlogn, ScalingModel::log}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ConfigError("unknown scaling model '" + std::string(s) + "'");
}

// Least squares of y on [1, x]. For the power model y = ln T; otherwise
// y = ln(T / model(n)), whose slope measures the drift away from the model.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> series, ScalingModel model) {
    if (series.size() < 4) {
        throw InsufficientPoints("need at least 4 points, got " + std::to_string(series.size()));
    }
    const auto k = Eigen::Index(series.size());
    Eigen::VectorXd x(k);
    Eigen::VectorXd y(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto [n, t] = series[std::size_t(i)];
        if (!(n > 1.0) || !(t > 0.0)) {
            throw std::invalid_argument("fit_scaling: need n > 1 and value > 0");
        }
        double scale = 1.0;
        if (model == ScalingModel::nlogn) {
            scale = n * std::log(n);
        } else if (model == ScalingModel::log) {
            scale = std::log(n);
        }
        x(i) = std::log(n);
        y(i) = std::log(t / scale);
    }

    const double xm = x.mean();
    const double ym = y.mean();
    const Eigen::VectorXd dx = x.array() - xm;
    const Eigen::VectorXd dy = y.array() - ym;
    const double sxx = dx.squaredNorm();
    if (!(sxx > 0.0)) {
        throw InsufficientPoints("fit_scaling: sizes must not all coincide");
    }
    const double slope = dx.dot(dy) / sxx;
    const double intercept = ym - slope * xm;
    const Eigen::VectorXd resid = y - (intercept + slope * x.array()).matrix();
    const double ssr = resid.squaredNorm();
    const double sst = dy.squaredNorm();

    ScalingFit f;
    f.model = model;
    f.points = series.size();
    f.exponent = slope;
    f.stderr_ = std::sqrt(ssr / double(k - 2) / sxx);
    f.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;

    // Ratio band: T / model(n) with the fitted exponent for the power model.
    Eigen::ArrayXd ratio = y.array();
    if (model == ScalingModel::power) {
        ratio -= slope * x.array();
    }
    ratio = ratio.exp();
    f.ratio_min = ratio.minCoeff();
    f.ratio_max = ratio.maxCoeff();
    return f;
}

} // namespace crw
