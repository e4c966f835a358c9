// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace shapebie {

// A one-parameter family t -> object, flattened to a complex vector. Real
// quantities embed with zero imaginary part. t = 0 must reproduce the base
// object exactly.
struct FamilyHandle {
    std::string name;
    std::function<Eigen::VectorXcd(double)> eval;
};

inline double max_abs(const Eigen::VectorXcd& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

// Central estimates (f(t)-f(-t))/(2t) per ladder entry, plus the Richardson
// extrapolation from the two smallest steps.
struct FdEstimates {
    std::vector<double> ladder;
    std::vector<Eigen::VectorXcd> estimate;
    std::vector<double> failed_t;  // ladder entries whose evaluation threw
    Eigen::VectorXcd richardson;
};

FdEstimates fd_first(const FamilyHandle& family, const std::vector<double>& ladder);
FdEstimates fd_first_onesided(const FamilyHandle& family, const std::vector<double>& ladder);
FdEstimates fd_second(const FamilyHandle& family, const std::vector<double>& ladder);

// Least-squares slope of log(error) against log(t). Entries below the
// roundoff floor 1e-13 are dropped; if everything is saturated the check
// passes by the PASS_SATURATED sentinel.
inline constexpr double kRoundoffFloor = 1e-13;

struct OrderFit {
    double order = 0.0;
    bool saturated = false;
};

OrderFit order_fit(const std::vector<double>& errors, const std::vector<double>& ladder);

struct DerivativeReport {
    std::string target;
    std::string xi;
    std::vector<double> ladder;
    std::vector<double> errors;
    double order = 0.0;
    bool saturated = false;
    double threshold = 0.0;
    bool pass = false;
    double max_error = 0.0;
    double wall_ms = 0.0;

    nlohmann::json to_json() const;
};

// Compares the analytic derivative against central differences of the family
// over the ladder and grades the observed order.
DerivativeReport check_first_derivative(const FamilyHandle& family, const Eigen::VectorXcd& analytic,
                                        const std::vector<double>& ladder, double order_threshold,
                                        const std::string& target, const std::string& xi);
DerivativeReport check_second_derivative(const FamilyHandle& family, const Eigen::VectorXcd& analytic,
                                         const std::vector<double>& ladder, double order_threshold,
                                         const std::string& target, const std::string& xi);

// d^2 f[0; xi1, xi2] from equal-direction second derivatives only:
//   1/2 ( d2[xi1+xi2] - d2[xi1] - d2[xi2] )
// The callback evaluates eta -> d^2 f[0; eta, eta]; directions are combined by
// the supplied addition.
template <typename Dir>
Eigen::VectorXcd polarize(const std::function<Eigen::VectorXcd(const Dir&)>& equal_direction_d2,
                          const Dir& xi1, const Dir& xi2,
                          const std::function<Dir(const Dir&, const Dir&)>& add) {
    const Eigen::VectorXcd s = equal_direction_d2(add(xi1, xi2));
    const Eigen::VectorXcd a = equal_direction_d2(xi1);
    const Eigen::VectorXcd b = equal_direction_d2(xi2);
    return 0.5 * (s - a - b);
}

// || f(t xi) - f(0) - t df - t^2/2 d2f ||_max; pass d2f = nullopt to stop at
// first order.
double taylor_remainder(const FamilyHandle& family, const Eigen::VectorXcd& df,
                        const std::optional<Eigen::VectorXcd>& d2f, double t);

}  // namespace shapebie
