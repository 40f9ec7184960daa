#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bubbletower/bubble.hpp"
#include "bubbletower/params.hpp"

namespace bt {

enum class RadialRule { tanh_sinh, gauss_legendre_panels };

struct QuadratureSpec {
    RadialRule radial_rule = RadialRule::gauss_legendre_panels;
    double r_max_factor = 1000.0; // R_max = max(factor, 50) * max(ring radius, 1)
    int order = 8;                // nodes per panel per dimension
    int refine_order = 12;        // the error estimate recomputes at this order
    double growth = 2.0;          // geometric panel growth away from features
    int core_panels = 4;          // unit-width panels on each side of a feature
    double target_rel_tol = 1e-8;

    double r_max(double ring_radius) const;
};

struct IntegralResult {
    double value = 0.0;
    double est_error = 0.0;
    long long nodes_used = 0;
};

// Gauss-Legendre rule on (-1, 1).
void gauss_rule(int order, std::vector<double>& x, std::vector<double>& w);

// Breakpoints on [lo, hi]: linear unit-width panels around each feature,
// geometric growth in between.
std::vector<double> graded_breaks(double lo, double hi, std::span<const double> features,
                                  double unit, double growth, int core_each_side);

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
using Fn3 = std::function<double(double, double, double)>;

IntegralResult integrate_1d(const Fn1& f, std::span<const double> breaks,
                            const QuadratureSpec& q, bool refine = true);
IntegralResult integrate_2d(const Fn2& f, std::span<const double> xb, std::span<const double> yb,
                            const QuadratureSpec& q, bool refine = true);
IntegralResult integrate_3d(const Fn3& f, std::span<const double> xb, std::span<const double> yb,
                            std::span<const double> zb, const QuadratureSpec& q, bool refine = true);

// int_{R^N} U_{0,lambda}^{p}  (1-D radial; requires p(N-2) > N).
IntegralResult integral_bubble_power(int N, double p_exp, double lambda = 1.0,
                                     const QuadratureSpec& q = {});

// int_{R^N} |y_1|^m U_{0,1}^{p}  via the (y_1, |y_perp|) reduction.
IntegralResult moment_integral(int N, double m_ord, double p_exp, const QuadratureSpec& q = {});

// int_{R^N} U_1^{2*-1} U_2 for distinct centers.
IntegralResult interaction_integral(const Bubble& b1, const Bubble& b2,
                                    const QuadratureSpec& q = {});

// Integral of f over the sector Omega_1 with the reduced volume element
// s t^{N-3} |S^{N-3}| ds dtheta dt; f must be even in theta.
struct SectorGrading {
    double ring_radius = 1.0;
    double lambda = 1.0;
    double theta_max = kPi; // pi / k
    double R_max = 1e3;
};
IntegralResult sector_integral(const Fn3& f, int N, const SectorGrading& g,
                               const QuadratureSpec& q, bool refine = true);

// I(W_r) = 1/2 int |DW|^2 - 1/2* int K(|y|/mu) |W|^{2*}, evaluated through
// the algebraic split I = k (A + S/2 - P/2*):
//   A = (1/2 - 1/2*) int U^{2*}          (scale invariant)
//   S = sum_{j>=2} int U_1^{2*-1} U_j    (gradient term via -Delta U = U^{2*-1})
//   P = int_{Omega_1} (K W^{2*} - sum_j U_j^{2*})   (pointwise-small deficit)
struct EnergyParts {
    IntegralResult total;
    double bubble_power = 0.0;  // int U^{2*}
    double s_interaction = 0.0; // S above
    double p_deficit = 0.0;     // P above
    double mu = 1.0;
};

EnergyParts energy_parts(const RingConfig& cfg, const CurvatureModel& model,
                         const ProblemParams& p, const QuadratureSpec& q = {},
                         bool refine = true);
IntegralResult energy_I(const RingConfig& cfg, const CurvatureModel& model,
                        const ProblemParams& p, const QuadratureSpec& q = {});

// Both terms by direct sector quadrature (gradient term from closed-form
// derivatives, no integration-by-parts identity).  Test oracle for small k.
IntegralResult energy_I_direct(const RingConfig& cfg, const CurvatureModel& model,
                               const ProblemParams& p, const QuadratureSpec& q = {});

} // namespace bt
