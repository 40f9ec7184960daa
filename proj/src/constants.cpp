#include "bubbletower/constants.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

double lattice_sum(int k, double r, int N) {
    if (k < 2) throw std::invalid_argument("lattice_sum: k must be >= 2");
    if (r <= 0.0) throw std::invalid_argument("lattice_sum: r must be > 0");
    std::vector<double> terms;
    terms.reserve(k - 1);
    for (int j = 2; j <= k; ++j)
        terms.push_back(std::pow(2.0 * r * std::sin((j - 1) * kPi / k), -(N - 2.0)));
    return pairwise_sum(terms);
}

namespace {

// Fit s(k)/k^{N-2} = L + (a + b ln k)/k^{N-3} through three levels.
double lattice_fit(int N, int k0) {
    std::array<double, 3> ks = {static_cast<double>(k0), 2.0 * k0, 4.0 * k0};
    std::array<double, 3> y{}, p{}, q{};
    for (int i = 0; i < 3; ++i) {
        const double k = ks[i];
        y[i] = lattice_sum(static_cast<int>(k), 1.0, N) / std::pow(k, N - 2.0);
        p[i] = 1.0 / std::pow(k, N - 3.0);
        q[i] = std::log(k) / std::pow(k, N - 3.0);
    }
    const double d1 = p[1] - p[0], d2 = p[2] - p[0];
    const double e1 = q[1] - q[0], e2 = q[2] - q[0];
    const double f1 = y[1] - y[0], f2 = y[2] - y[0];
    const double det = d1 * e2 - d2 * e1;
    if (det == 0.0) throw std::runtime_error("lattice_constant: singular extrapolation system");
    const double a = (f1 * e2 - f2 * e1) / det;
    const double b = (d1 * f2 - d2 * f1) / det;
    return y[0] - a * p[0] - b * q[0];
}

} // namespace

ConstantValue lattice_constant(int N, int k_base) {
    if (N < 5) throw std::invalid_argument("lattice_constant: N must be >= 5");
    if (k_base < 8) throw std::invalid_argument("lattice_constant: k_base too small");
    const double l1 = lattice_fit(N, k_base);
    const double l2 = lattice_fit(N, 2 * k_base);
    ConstantValue c;
    c.value = l2;
    c.est_error = std::abs(l2 - l1);
    c.provenance = Provenance::lattice_extrapolation;
    if (!(c.est_error < 1e-3 * std::abs(c.value)))
        throw std::runtime_error("lattice_constant: extrapolation did not converge");
    return c;
}

ExpansionConstants compute_constants(const ProblemParams& p, const QuadratureSpec& q) {
    if (p.N < 5) throw std::invalid_argument("compute_constants: N must be >= 5");
    ExpansionConstants c;
    c.N = p.N;
    c.m = p.m;
    c.c0 = p.c0;
    c.r0 = p.r0;
    const double two_star = p.two_star();

    const IntegralResult up = integral_bubble_power(p.N, two_star, 1.0, q);
    c.A = {(0.5 - 1.0 / two_star) * up.value, (0.5 - 1.0 / two_star) * up.est_error,
           Provenance::quadrature};

    const IntegralResult m1 = moment_integral(p.N, p.m, two_star, q);
    c.B1 = {(p.c0 / two_star) * m1.value, (p.c0 / two_star) * m1.est_error,
            Provenance::quadrature};

    const double m2fac = (p.c0 / two_star) * 0.5 * p.m * (p.m - 1.0);
    const IntegralResult m2 = p.m == 2.0 ? up : moment_integral(p.N, p.m - 2.0, two_star, q);
    c.B2 = {m2fac * m2.value, m2fac * m2.est_error, Provenance::quadrature};

    // plateau of d^{N-2} int U_1^{2*-1} U_2, Richardson in 1/d^2
    {
        const double d1 = 40.0, d2 = 80.0;
        auto pair_at = [&](double d) {
            Bubble b1{std::vector<double>(p.N, 0.0), 1.0};
            Bubble b2{std::vector<double>(p.N, 0.0), 1.0};
            b2.center[0] = d;
            const IntegralResult r = interaction_integral(b1, b2, q);
            return std::array<double, 2>{r.value * std::pow(d, p.N - 2.0),
                                         r.est_error * std::pow(d, p.N - 2.0)};
        };
        const auto g1 = pair_at(d1);
        const auto g2 = pair_at(d2);
        const double w2 = d2 * d2 / (d2 * d2 - d1 * d1);
        const double b0 = w2 * g2[0] + (1.0 - w2) * g1[0];
        c.B0 = {b0, 0.5 * std::abs(b0 - g2[0]) + g2[1] + g1[1] / 3.0, Provenance::quadrature};
    }

    c.B3 = {0.5 * c.B0.value, 0.5 * c.B0.est_error, Provenance::closed_form_candidate};
    c.lattice = lattice_constant(p.N);
    c.B4 = {c.B3.value * c.lattice.value,
            c.B3.est_error * c.lattice.value + c.B3.value * c.lattice.est_error,
            Provenance::closed_form_candidate};
    return c;
}

double lambda0(const ProblemParams& p, const ExpansionConstants& c) {
    if (p.N - 2.0 - p.m <= 0.0) throw std::domain_error("lambda0: need m < N-2");
    if (c.B1.value <= 0.0 || c.B4.value <= 0.0)
        throw std::domain_error("lambda0: constants must be positive");
    const double num = c.B4.value * (p.N - 2.0);
    const double den = c.B1.value * p.m * std::pow(p.r0, p.N - 2.0);
    return std::pow(num / den, 1.0 / (p.N - 2.0 - p.m));
}

double F_expansion(const ProblemParams& p, const ExpansionConstants& c, double r, double lam) {
    if (lam <= 0.0) throw std::invalid_argument("F_expansion: Lambda must be > 0");
    const double mu = mu_of_k(p);
    const double mum = std::pow(mu, p.m);
    const double bracket = c.B1.value / std::pow(lam, p.m) -
                           c.B4.value / (std::pow(lam, p.N - 2.0) * std::pow(p.r0, p.N - 2.0));
    const double dr = mu * p.r0 - r;
    const double quad = c.B2.value / std::pow(lam, p.m - 2.0) * dr * dr;
    return p.k * (c.A.value + (bracket + quad) / mum);
}

double dF_dLambda_expansion(const ProblemParams& p, const ExpansionConstants& c, double /*r*/,
                            double lam) {
    if (lam <= 0.0) throw std::invalid_argument("dF_dLambda_expansion: Lambda must be > 0");
    const double mu = mu_of_k(p);
    const double mum = std::pow(mu, p.m);
    const double v = -c.B1.value * p.m / std::pow(lam, p.m + 1.0) +
                     c.B4.value * (p.N - 2.0) /
                         (std::pow(lam, p.N - 1.0) * std::pow(p.r0, p.N - 2.0));
    return p.k * v / mum;
}

ExpansionGap compare_expansion(const ProblemParams& p, const CurvatureModel& model,
                               const QuadratureSpec& q, const RingConfig& cfg,
                               const ExpansionConstants& consts) {
    ProblemParams pk = p;
    pk.k = cfg.k;
    const IntegralResult quad = energy_I(cfg, model, pk, q);
    ExpansionGap gap;
    gap.I_quad = quad.value;
    gap.quad_error = quad.est_error;
    gap.F_exp = F_expansion(pk, consts, cfg.r, cfg.lambda);
    gap.abs_gap = std::abs(gap.I_quad - gap.F_exp);
    const double mu = mu_of_k(pk);
    gap.normalized_gap = gap.abs_gap * std::pow(mu, p.m) / cfg.k;
    return gap;
}

ExpansionGap compare_expansion(const ProblemParams& p, const CurvatureModel& model,
                               const QuadratureSpec& q, const RingConfig& cfg) {
    return compare_expansion(p, model, q, cfg, compute_constants(p, q));
}

} // namespace bt
