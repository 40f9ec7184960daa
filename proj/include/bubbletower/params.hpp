#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bubbletower/common.hpp"

namespace bt {

enum class CurvatureKind { exact_power, power_plus_bump };

// K(r) = max(1 - c0 |r - r0|^m, floor), optionally plus a smooth bump with
// compact support outside (r0 - delta, r0 + delta).  The local power law is
// exact inside the window; the positive floor only matters far from r0.
struct CurvatureModel {
    CurvatureKind kind = CurvatureKind::exact_power;
    double c0 = 0.4;
    double r0 = 1.0;
    double m = 2.0;
    double theta_K = 1.0;
    double floor = 0.05;
    double bump_amp = 0.1;    // power_plus_bump only
    double bump_center = 2.0; // must lie outside the window
    double bump_width = 0.25;
};

double eval_K(const CurvatureModel& model, double r);
double eval_K_derivative(const CurvatureModel& model, double r);

struct ProblemParams {
    int N = 5;
    double m = 2.0;
    double c0 = 0.4;
    double r0 = 1.0;
    double theta_K = 1.0;
    double delta = 0.5;
    int k = 8;
    double tau = 1.01;
    double theta_bar = 0.1;
    double L0 = 0.2;
    double L1 = 5.0;
    CurvatureKind model_kind = CurvatureKind::exact_power;
    double k_floor = 0.05;

    double two_star() const { return 2.0 * N / (N - 2.0); }
    CurvatureModel curvature() const;
};

// mu = k^{(N-2)/(N-2-m)}.  Integral exponents are evaluated by repeated
// squaring so cases like N=5, m=2, k=10 come out exact.
double mu_of_k(const ProblemParams& p);

// The scaling-law exponent as an exact rational (requires integral m).
Rational mu_exponent(const ProblemParams& p);

struct AssumptionReport {
    struct Item {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_pass() const;
};

AssumptionReport validate_assumptions(const ProblemParams& p);

// Throws std::invalid_argument listing every failed hypothesis.
void require_valid(const ProblemParams& p);

// key=value text format; '#' starts a comment.  Unknown keys are rejected.
ProblemParams parse_config(std::istream& in);
ProblemParams load_config(const std::string& path);
std::string dump_config(const ProblemParams& p);

} // namespace bt
