#pragma once

#include "bubbletower/quadrature.hpp"

namespace bt {

enum class Provenance { quadrature, lattice_extrapolation, closed_form_candidate };

struct ConstantValue {
    double value = 0.0;
    double est_error = 0.0;
    Provenance provenance = Provenance::quadrature;
};

// Reduced-energy expansion coefficients.
//   A  = (1/2 - 1/2*) int U^{2*}
//   B1 = (c0/2*) int |y_1|^m U^{2*}
//   B2 = (c0/2*) (m(m-1)/2) int |y_1|^{m-2} U^{2*}
//   B0 = large-d plateau of d^{N-2} int U_1^{2*-1} U_2
//   B3 = B0/2 (candidate relation, cross-checked by compare_expansion)
//   lattice = lim_k k^{-(N-2)} sum_{j>=2} (2 sin((j-1)pi/k))^{-(N-2)}
//   B4 = B3 * lattice, the coefficient multiplying 1/(Lambda^{N-2} r0^{N-2} mu^m)
struct ExpansionConstants {
    int N = 5;
    double m = 2.0, c0 = 0.0, r0 = 1.0;
    ConstantValue A, B0, B1, B2, B3, B4, lattice;
};

ExpansionConstants compute_constants(const ProblemParams& p, const QuadratureSpec& q = {});

// Lambda0 = (B4 (N-2) / (B1 m r0^{N-2}))^{1/(N-2-m)}
double lambda0(const ProblemParams& p, const ExpansionConstants& c);

// k (A + (B1/L^m - B4/(L^{N-2} r0^{N-2}))/mu^m + B2 (mu r0 - r)^2/(L^{m-2} mu^m))
double F_expansion(const ProblemParams& p, const ExpansionConstants& c, double r, double lam);

// k (-B1 m/L^{m+1} + B4 (N-2)/(L^{N-1} r0^{N-2}))/mu^m
double dF_dLambda_expansion(const ProblemParams& p, const ExpansionConstants& c, double r,
                            double lam);

// exact finite sum over the ring chords
double lattice_sum(int k, double r, int N);

// Richardson-extrapolated lattice constant over (k, 2k, 4k), fitting
// s(k)/k^{N-2} = L + (a + b ln k)/k^{N-3}.
ConstantValue lattice_constant(int N, int k_base = 512);

struct ExpansionGap {
    double I_quad = 0.0;
    double F_exp = 0.0;
    double abs_gap = 0.0;
    double normalized_gap = 0.0; // gap * mu^m / k
    double quad_error = 0.0;
};

ExpansionGap compare_expansion(const ProblemParams& p, const CurvatureModel& model,
                               const QuadratureSpec& q, const RingConfig& cfg,
                               const ExpansionConstants& consts);
ExpansionGap compare_expansion(const ProblemParams& p, const CurvatureModel& model,
                               const QuadratureSpec& q, const RingConfig& cfg);

} // namespace bt
