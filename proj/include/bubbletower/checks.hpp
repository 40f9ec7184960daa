#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bubbletower/quadrature.hpp"

namespace bt {

struct CheckResult {
    double c_best = 0.0;
    bool pass = false;
    std::vector<double> witness; // location achieving c_best
    std::string detail;
};

// g_ij(y) = (1+|y-x_j|)^{-alpha}(1+|y-x_i|)^{-beta} against
// d^{-sigma} ((1+|y-x_i|)^{-(a+b-s)} + (1+|y-x_j|)^{-(a+b-s)}),
// sampled over a center-distance sweep.
CheckResult check_laa1(double alpha, double beta, double sigma,
                       std::span<const double> d_list, int samples_per_d = 4000,
                       std::uint64_t seed = 7);

// int |y-z|^{-(N-2)} (1+|z|)^{-2-sigma} dz against (1+|y|)^{-sigma} over a
// |y| decade sweep.
CheckResult check_laa2(int N, double sigma, std::span<const double> y_radii,
                       const QuadratureSpec& q = {});

struct Laa3Row {
    int k = 0;
    double o1 = 0.0;        // plateau of LHS/w_tau away from the core
    double theta_fit = 0.0; // decay-gain exponent near the core
    double max_ratio = 0.0;
};

struct Laa3Result {
    std::vector<Laa3Row> rows;
    bool pass = false;
    std::string detail;
};

// Convolution int |y-z|^{-(N-2)} W^{4/(N-2)} sum_j (1+|z-x_j|)^{-((N-2)/2+tau)} dz
// on the x_1 axis, N = 5, against the weighted majorant.
Laa3Result check_laa3(const ProblemParams& p, std::span<const int> k_list,
                      const QuadratureSpec& q = {});

// (sum |a_j| / k)^p <= sum |a_j|^p / k
bool check_convexity_sum(double p_exp, std::span<const double> a);

struct ConvexityStudy {
    long long trials = 0;
    long long failures = 0;
    bool pass = false;
};

ConvexityStudy convexity_random_study(std::span<const double> p_exps, int k_max, long long trials,
                                      std::uint64_t seed = 11);

} // namespace bt
