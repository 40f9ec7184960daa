#pragma once

#include <array>
#include <string>

#include "bubbletower/constants.hpp"

namespace bt {

struct RegionD {
    double r_lo = 0.0, r_hi = 0.0;
    double lam_lo = 0.0, lam_hi = 0.0;

    // r in mu r0 -/+ mu^{-theta_bar}, Lambda in Lambda0 -/+ mu^{-3 theta_bar/2}
    static RegionD make(const ProblemParams& p, double lambda0);
    bool contains(double r, double lam) const;
    double r_center() const { return 0.5 * (r_lo + r_hi); }
    double lam_center() const { return 0.5 * (lam_lo + lam_hi); }
};

enum class Objective { expansion, quadrature };
enum class CritMethod { flow, newton, hybrid };

// F(r, Lambda) on either the closed-form expansion or the quadrature energy.
// Quadrature gradients are central differences with steps matched to the
// region scale (mu^{-theta_bar}/100, mu^{-3 theta_bar/2}/100).
class ReducedEnergy {
  public:
    ReducedEnergy(Objective kind, const ProblemParams& p, const ExpansionConstants& consts,
                  const CurvatureModel& model, const QuadratureSpec& quad = {});

    double F(double r, double lam) const;
    double Fbar(double r, double lam) const { return -F(r, lam); }
    std::array<double, 2> grad_Fbar(double r, double lam) const;
    double mu() const { return mu_; }
    Objective kind() const { return kind_; }
    const ProblemParams& params() const { return p_; }
    const ExpansionConstants& constants() const { return consts_; }
    double grad_scale() const; // typical gradient magnitude, for tolerances

  private:
    Objective kind_;
    ProblemParams p_;
    ExpansionConstants consts_;
    CurvatureModel model_;
    QuadratureSpec quad_;
    double mu_ = 1.0;
};

struct CriticalPointResult {
    double r_star = 0.0, lam_star = 0.0;
    double grad_norm = 0.0;
    CritMethod method = CritMethod::flow;
    Objective objective = Objective::expansion;
    int iterations = 0;
    bool converged = false;
    std::string failure;
};

enum class FlowStop { critical_point, sublevel_alpha1, region_exit, max_iterations };

struct FlowTrajectory {
    // (r, Lambda, Fbar) per accepted step
    std::vector<std::array<double, 3>> points;
    FlowStop stop = FlowStop::max_iterations;
};

struct FlowOptions {
    double grad_tol_factor = 1e-6; // times grad_scale()
    int max_iterations = 2000;
    bool stop_at_alpha1 = true;
};

// Steepest descent on Fbar = -F with backtracking line search.  Stops at a
// critical point, on entering the sublevel set {Fbar <= alpha1} (the same
// stopping convention the trapping argument uses), or on region exit
// (reported, never silently ignored).
FlowTrajectory gradient_flow(const ReducedEnergy& obj, std::array<double, 2> start,
                             const RegionD& region, CriticalPointResult& out,
                             const FlowOptions& opts = {});

// 2-D Newton on grad Fbar with finite-difference Hessian.
CriticalPointResult newton_polish(const ReducedEnergy& obj, std::array<double, 2> start,
                                  double grad_tol = 1e-10, int max_iter = 60);

// flow + polish from the trajectory point of least gradient norm
CriticalPointResult find_critical_point(const ReducedEnergy& obj, std::array<double, 2> start,
                                        const RegionD& region, double grad_tol = 1e-10);

// alpha_2 = k(-A + eta), alpha_1 = k(-A - bracket(Lambda0)/mu^m - mu^{-m-5 theta_bar/2})
std::array<double, 2> minmax_levels(const ProblemParams& p, const ExpansionConstants& consts,
                                    double eta_factor = 0.01);

struct MinmaxResult {
    double c_value = 0.0;
    double r_at = 0.0, lam_at = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0;
    bool grid_converged = false;
    double refine_delta = 0.0;
};

// Discretized min-max over monotone-in-r grid paths (|dLambda| <= one cell
// per slice), dynamic programming; returns the level and the saddle cell.
MinmaxResult minmax_value(const ReducedEnergy& obj, const RegionD& region, int n_r = 41,
                          int n_lam = 41);

} // namespace bt
