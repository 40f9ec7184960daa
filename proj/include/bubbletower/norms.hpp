#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bubbletower/bubble.hpp"
#include "bubbletower/params.hpp"

namespace bt {

enum class WeightFamily { star, double_star };

struct WeightedNormSpec {
    WeightFamily family = WeightFamily::star;
    double tau = 1.01;
    RingConfig config;

    // (N-2)/2 + tau for star, (N+2)/2 + tau for double-star
    double exponent() const;
};

// sum_j (1 + |y - x_j|)^{-e}
double weight(const WeightedNormSpec& spec, std::span<const double> y);

// l_k = K(|y|/mu) W_r^{2*-1} - sum_j U_{x_j,Lambda}^{2*-1}
double residual_lk(const RingConfig& cfg, const CurvatureModel& model, const ProblemParams& p,
                   std::span<const double> y);

// N(phi) = K ((W+phi)_+^{2*-1} - W^{2*-1} - (2*-1) W^{2*-2} phi)
using PointFn = std::function<double(std::span<const double>)>;
double nonlinear_remainder(const RingConfig& cfg, const CurvatureModel& model,
                           const ProblemParams& p, const PointFn& phi, std::span<const double> y);

struct SampledNormEstimate {
    double value = 0.0;
    std::vector<double> argmax_point;
    long long sample_count = 0;
    std::uint64_t sampling_seed = 0;
};

// Near-center shells around three representative centers, sector boundary
// rays (which contain the chord midpoints), a far-field shell, and
// quasi-random points in Omega_1.  The estimate is a lower bound of the
// true sup and is deterministic given the seed.
struct SamplerSpec {
    std::uint64_t seed = 20240817;
    int shell_directions = 32;
    int ray_points = 160;
    int far_field_points = 64;
    int quasi_points = 10000;
};

SampledNormEstimate norm_estimate(const WeightedNormSpec& spec, const PointFn& f,
                                  const SamplerSpec& sampler = {});

struct DecayRow {
    int k = 0;
    double mu = 0.0;
    double norm_value = 0.0;
    double predicted_rate = 0.0; // (k/mu)^{(N+2)/2 - tau}
    double ratio = 0.0;          // norm_value / predicted_rate
    std::vector<double> argmax_point;
};

struct DecayStudy {
    std::vector<DecayRow> rows;
    double fitted_exponent = 0.0;
    double predicted_exponent = 0.0; // (N+2)/2 - tau
};

// ||l_k||_** sampled across k, r = mu r0, log-log slope against k/mu.
DecayStudy lk_decay_study(const ProblemParams& base, std::span<const int> k_list,
                          double lambda = 1.0, const SamplerSpec& sampler = {});

} // namespace bt
