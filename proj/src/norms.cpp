#include "bubbletower/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

double WeightedNormSpec::exponent() const {
    const double n = config.N;
    return (family == WeightFamily::star ? 0.5 * (n - 2.0) : 0.5 * (n + 2.0)) + tau;
}

double weight(const WeightedNormSpec& spec, std::span<const double> y) {
    const RingConfig& cfg = spec.config;
    if (static_cast<int>(y.size()) != cfg.N)
        throw std::invalid_argument("weight: dimension mismatch");
    const double e = spec.exponent();
    double t2 = 0.0;
    for (int i = 2; i < cfg.N; ++i) t2 += y[i] * y[i];
    double acc = 0.0;
    for (int j = 1; j <= cfg.k; ++j) {
        const double ang = cfg.center_angle(j);
        const double dx = y[0] - cfg.r * std::cos(ang);
        const double dy = y[1] - cfg.r * std::sin(ang);
        const double dist = std::sqrt(dx * dx + dy * dy + t2);
        acc += std::pow(1.0 + dist, -e);
    }
    return acc;
}

double residual_lk(const RingConfig& cfg, const CurvatureModel& model, const ProblemParams& p,
                   std::span<const double> y) {
    if (static_cast<int>(y.size()) != cfg.N)
        throw std::invalid_argument("residual_lk: dimension mismatch");
    ProblemParams pk = p;
    pk.k = cfg.k;
    const double mu = mu_of_k(pk);
    const double pm1 = p.two_star() - 1.0;
    double t2 = 0.0;
    for (int i = 2; i < cfg.N; ++i) t2 += y[i] * y[i];
    const double norm2 = y[0] * y[0] + y[1] * y[1] + t2;
    double w = 0.0, powersum = 0.0;
    for (int j = 1; j <= cfg.k; ++j) {
        const double ang = cfg.center_angle(j);
        const double dx = y[0] - cfg.r * std::cos(ang);
        const double dy = y[1] - cfg.r * std::sin(ang);
        const double q2 = dx * dx + dy * dy + t2;
        w += bubble_value(cfg.N, cfg.lambda, q2);
        powersum += bubble_value_pow(cfg.N, cfg.lambda, q2, pm1);
    }
    const double K = eval_K(model, std::sqrt(norm2) / mu);
    return K * std::pow(w, pm1) - powersum;
}

double nonlinear_remainder(const RingConfig& cfg, const CurvatureModel& model,
                           const ProblemParams& p, const PointFn& phi, std::span<const double> y) {
    ProblemParams pk = p;
    pk.k = cfg.k;
    const double mu = mu_of_k(pk);
    const double pm1 = p.two_star() - 1.0;
    const double w = eval_W(cfg, y);
    const double ph = phi(y);
    const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    const double K = eval_K(model, norm / mu);
    const double shifted = std::max(w + ph, 0.0); // positive-part convention
    return K * (std::pow(shifted, pm1) - std::pow(w, pm1) - pm1 * std::pow(w, pm1 - 1.0) * ph);
}

namespace {

// Deterministic unit direction in R^N from the uniform stream (Box-Muller).
std::vector<double> random_direction(UniformRng& rng, int N) {
    std::vector<double> v(N);
    for (int i = 0; i < N; i += 2) {
        const double u1 = std::max(rng.next_double(), 1e-300);
        const double u2 = rng.next_double();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        v[i] = rad * std::cos(2.0 * kPi * u2);
        if (i + 1 < N) v[i + 1] = rad * std::sin(2.0 * kPi * u2);
    }
    double norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-300));
    for (double& c : v) c *= inv;
    return v;
}

std::vector<std::vector<double>> sampler_points(const RingConfig& cfg, const SamplerSpec& sp) {
    UniformRng rng(sp.seed);
    std::vector<std::vector<double>> pts;
    const int N = cfg.N;
    const auto centers = cfg.centers();

    // (a) spherical shells around three representative centers
    std::vector<int> reps = {0};
    if (cfg.k >= 2) reps.push_back(1);
    if (cfg.k >= 3) reps.push_back(cfg.k / 2);
    std::vector<double> radii = {0.0, 0.5};
    for (double rad = 1.0; rad <= 4.0 * cfg.r; rad *= 2.0) radii.push_back(rad);
    for (int rep : reps) {
        for (double rad : radii) {
            if (rad == 0.0) {
                pts.push_back(centers[rep]);
                continue;
            }
            for (int d = 0; d < sp.shell_directions; ++d) {
                auto dir = random_direction(rng, N);
                std::vector<double> y = centers[rep];
                for (int i = 0; i < N; ++i) y[i] += rad * dir[i];
                pts.push_back(std::move(y));
            }
        }
    }

    // (b) sector boundary rays at t = 0 and t = 1, including the chord
    // midpoint s = r cos(pi/k)
    const double half = kPi / cfg.k;
    std::vector<double> svals;
    for (int i = 0; i < sp.ray_points; ++i) {
        const double frac = static_cast<double>(i) / (sp.ray_points - 1);
        svals.push_back(std::exp(std::log(0.1) + frac * (std::log(4.0 * cfg.r) - std::log(0.1))));
    }
    svals.push_back(cfg.r * std::cos(half));
    svals.push_back(cfg.r);
    for (double s : svals) {
        for (double t : {0.0, 1.0}) {
            std::vector<double> y(N, 0.0);
            y[0] = s * std::cos(half);
            y[1] = s * std::sin(half);
            if (N > 2) y[2] = t;
            pts.push_back(std::move(y));
        }
    }

    // (c) far-field shell at 100 r
    for (int d = 0; d < sp.far_field_points; ++d) {
        auto dir = random_direction(rng, N);
        std::vector<double> y(N);
        for (int i = 0; i < N; ++i) y[i] = 100.0 * cfg.r * dir[i];
        pts.push_back(std::move(y));
    }

    // (d) quasi-random points in Omega_1, radially biased toward the ring
    for (int i = 0; i < sp.quasi_points; ++i) {
        const double th = rng.next_double(-half, half);
        const double u = rng.next_double();
        double s;
        if (u < 0.5) s = cfg.r + (rng.next_double() - 0.5) * 8.0 / cfg.lambda;
        else s = rng.next_double() * 3.0 * cfg.r;
        if (s < 0.0) s = -s;
        double t;
        if (rng.next_double() < 0.5) t = rng.next_double() * 4.0 / cfg.lambda;
        else t = rng.next_double() * cfg.r;
        std::vector<double> y(N, 0.0);
        y[0] = s * std::cos(th);
        y[1] = s * std::sin(th);
        if (N > 2) {
            auto dir = random_direction(rng, N - 2);
            for (int c = 2; c < N; ++c) y[c] = t * dir[c - 2];
        }
        pts.push_back(std::move(y));
    }
    return pts;
}

} // namespace

SampledNormEstimate norm_estimate(const WeightedNormSpec& spec, const PointFn& f,
                                  const SamplerSpec& sampler) {
    const auto pts = sampler_points(spec.config, sampler);
    SampledNormEstimate est;
    est.sampling_seed = sampler.seed;
    est.sample_count = static_cast<long long>(pts.size());
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            vals[i] = std::abs(f(pts[i])) / weight(spec, pts[i]);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[best]) best = i;
    est.value = vals[best];
    est.argmax_point = pts[best];
    return est;
}

DecayStudy lk_decay_study(const ProblemParams& base, std::span<const int> k_list, double lambda,
                          const SamplerSpec& sampler) {
    DecayStudy study;
    study.predicted_exponent = 0.5 * (base.N + 2.0) - base.tau;
    std::vector<double> log_km, log_norm;
    for (int k : k_list) {
        if (k < 2) throw std::invalid_argument("lk_decay_study: k must be >= 2");
        ProblemParams p = base;
        p.k = k;
        const double mu = mu_of_k(p);
        RingConfig cfg{p.N, k, mu * p.r0, lambda};
        WeightedNormSpec wspec{WeightFamily::double_star, p.tau, cfg};
        const CurvatureModel model = p.curvature();
        auto f = [&cfg, &model, &p](std::span<const double> y) {
            return residual_lk(cfg, model, p, y);
        };
        const SampledNormEstimate est = norm_estimate(wspec, f, sampler);
        DecayRow row;
        row.k = k;
        row.mu = mu;
        row.norm_value = est.value;
        row.predicted_rate = std::pow(k / mu, study.predicted_exponent);
        row.ratio = est.value / row.predicted_rate;
        row.argmax_point = est.argmax_point;
        study.rows.push_back(std::move(row));
        log_km.push_back(std::log(k / mu));
        log_norm.push_back(std::log(std::max(est.value, 1e-300)));
    }
    if (study.rows.size() >= 2)
        study.fitted_exponent = fit_line(log_km, log_norm).slope;
    return study;
}

} // namespace bt
