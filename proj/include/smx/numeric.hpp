#pragma once

#include "smx/expr.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace smx {

// Numerics run in the Euclidean backend: X = |x|^2, box = Laplacian, M = 1.

/// Radial test function h(x) = envelope(r / scale) P((r / scale)^2) [chi(rho r)],
/// with r = |x| in k dimensions.
struct TestFunction {
    enum class Family { bump, gaussian };

    Family family = Family::bump;
    double center = 1.5;
    double width = 0.5;
    std::vector<double> poly{1.0};   // P(s) = sum_j poly[j] s^j
    unsigned k = 4;
    double scale = 1.0;
    std::optional<double> cutoff_rho;   // multiply by chi(rho r): 0 for rho r <= 1, 1 for rho r >= 2

    static constexpr unsigned max_order = 6;
    using Jet = std::array<double, max_order + 1>;

    static TestFunction bump(double center, double width, std::vector<double> poly = {1.0}, unsigned k = 4);
    static TestFunction gaussian(double width, std::vector<double> poly = {1.0}, unsigned k = 4);

    double value(double r) const;
    /// d^j/dr^j of the radial profile for j = 0 .. max_order.
    Jet jet(double r) const;
    double support_min() const;
    double support_max() const;
    /// True when the profile is an even smooth function of r near 0.
    bool even_at_origin() const;
    /// Order of vanishing at the origin (large when 0 lies outside the support).
    unsigned origin_vanishing_order() const;
    /// (Laplacian^n h)(0).
    double laplacian_power_at_origin(unsigned n) const;
};

struct QuadratureResult {
    double value = 0;
    double error = 0;
    unsigned nodes = 0;
    bool converged = false;
};

/// Adaptive Gauss-Kronrod 7/15.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 1e-15, unsigned max_intervals = 4000);

/// Volume of the unit sphere S^(k-1).
double sphere_volume(unsigned k);

struct PairingOptions {
    std::map<std::string, double> values;   // numeric values of coefficient symbols
    double mass = 1.0;
    double rel_tol = 1e-12;
};

using PairingReport = QuadratureResult;

/// <e, h> with derivative nodes moved onto h. `tests` gives one radial test
/// function per variable group (separable test functions).
PairingReport pair_numeric(const Expr& e, const std::map<Group, TestFunction>& tests, const PairingOptions& o = {});
/// Single-group form.
PairingReport pair_numeric(const Expr& e, const TestFunction& h, const PairingOptions& o = {});

struct DirectLimitReport {
    std::vector<double> rho;
    std::vector<double> values;
    std::vector<double> increments;   // relative, between consecutive rho
    double limit = 0;
    bool converged = false;
};

/// <e, chi_rho h> on a geometric rho grid. Throws NoConvergence when the
/// increments fail to contract below `tolerance`.
DirectLimitReport direct_limit_check(const Expr& e, const TestFunction& h, std::vector<double> rho = {},
                                     double tolerance = 1e-6, const PairingOptions& o = {});

struct ScalingFit {
    unsigned degree = 0;                 // degree of the polynomial in log rho
    double residual = 0;                 // relative
    std::vector<double> coefficients;    // in log rho, ascending
    std::vector<double> rho;
    std::vector<double> values;          // rho^(D-k) <e, h(./rho)>
};

/// Minimal degree in log rho fitting rho^(D-k) <e, h(./rho)>; throws FitFailure.
ScalingFit scaling_fit(const Expr& e, const TestFunction& h, const Rational& degree, std::vector<double> rho = {},
                       double tolerance = 1e-8, const PairingOptions& o = {}, unsigned max_degree = 4);

} // namespace smx
