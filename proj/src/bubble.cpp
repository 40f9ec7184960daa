#include "bubbletower/bubble.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

namespace {

double norm_const(int N) {
    static const auto table = [] {
        std::array<double, 32> t{};
        for (int n = 3; n < 32; ++n) t[n] = std::pow(static_cast<double>(n) * (n - 2), 0.25 * (n - 2));
        return t;
    }();
    if (N >= 3 && N < 32) return table[N];
    return std::pow(static_cast<double>(N) * (N - 2), 0.25 * (N - 2));
}

double dist2(std::span<const double> y, std::span<const double> x) {
    if (y.size() != x.size()) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - x[i];
        s += d * d;
    }
    return s;
}

constexpr double kLogSwitch = 1e8;

} // namespace

double bubble_value(int N, double lambda, double dist2) {
    const double q = lambda * lambda * dist2;
    if (q > kLogSwitch) {
        const double lg = std::log(lambda) - std::log1p(q);
        return norm_const(N) * std::exp(0.5 * (N - 2) * lg);
    }
    const double base = lambda / (1.0 + q);
    if (N == 5) return norm_const(5) * base * std::sqrt(base);  // power 3/2
    if (N == 6) return norm_const(6) * base * base;             // power 2
    return norm_const(N) * std::pow(base, 0.5 * (N - 2));
}

double bubble_value_pow(int N, double lambda, double dist2, double p_exp) {
    struct Cache {
        int N = 0;
        double p = 0.0, cpow = 0.0, e = 0.0;
        long long e2 = 0;
        bool half_integral = false;
    };
    static thread_local Cache c;
    if (c.N != N || c.p != p_exp) {
        c.N = N;
        c.p = p_exp;
        c.cpow = std::pow(norm_const(N), p_exp);
        c.e = 0.5 * (N - 2) * p_exp;
        const double e2 = 2.0 * c.e;
        c.half_integral = (std::round(e2) == e2) && std::abs(e2) < 256.0;
        c.e2 = static_cast<long long>(std::llround(e2));
    }
    const double q = lambda * lambda * dist2;
    if (q > kLogSwitch || std::abs(c.e) > 64.0) {
        const double lg = std::log(lambda) - std::log1p(q);
        return c.cpow * std::exp(c.e * lg);
    }
    const double base = lambda / (1.0 + q);
    if (c.half_integral) {
        double v = pow_int(base, c.e2 / 2);
        if (c.e2 & 1) v *= std::sqrt(base);
        return c.cpow * v;
    }
    return c.cpow * std::pow(base, c.e);
}

double bubble_dlambda(int N, double lambda, double dist2) {
    const double q = lambda * lambda * dist2;
    return bubble_value(N, lambda, dist2) * (0.5 * (N - 2) / lambda) * (1.0 - q) / (1.0 + q);
}

double eval_bubble(const Bubble& b, std::span<const double> y) {
    return bubble_value(b.dim(), b.lambda, dist2(y, b.center));
}

double eval_Z(const Bubble& b, ZKind which, std::span<const double> y) {
    const int N = b.dim();
    const double r2 = dist2(y, b.center);
    if (which == ZKind::lambda) return bubble_dlambda(N, b.lambda, r2);

    double cnorm2 = 0.0;
    for (double c : b.center) cnorm2 += c * c;
    if (cnorm2 == 0.0)
        throw std::invalid_argument("eval_Z: radial direction undefined at the origin");
    const double cnorm = std::sqrt(cnorm2);
    double proj = 0.0; // (y - x) . x/|x|
    for (std::size_t i = 0; i < y.size(); ++i)
        proj += (y[i] - b.center[i]) * (b.center[i] / cnorm);
    const double q = b.lambda * b.lambda * r2;
    return bubble_value(N, b.lambda, r2) * (N - 2) * b.lambda * b.lambda * proj / (1.0 + q);
}

double RingConfig::center_angle(int j) const {
    return 2.0 * kPi * (j - 1) / k;
}

std::vector<std::vector<double>> RingConfig::centers() const {
    return ring_centers(k, r, N);
}

std::vector<std::vector<double>> ring_centers(int k, double r, int N) {
    if (k < 1) throw std::invalid_argument("ring_centers: k must be >= 1");
    if (r <= 0.0) throw std::invalid_argument("ring_centers: r must be > 0");
    if (N < 3) throw std::invalid_argument("ring_centers: N must be >= 3");
    std::vector<std::vector<double>> xs(k, std::vector<double>(N, 0.0));
    for (int j = 0; j < k; ++j) {
        const double ang = 2.0 * kPi * j / k;
        xs[j][0] = r * std::cos(ang);
        xs[j][1] = r * std::sin(ang);
    }
    return xs;
}

double eval_W(const RingConfig& cfg, std::span<const double> y) {
    if (static_cast<int>(y.size()) != cfg.N) throw std::invalid_argument("eval_W: dimension mismatch");
    double sp = 0.0; // y' . (cos, sin) pieces via angle
    const double y1 = y[0], y2 = y[1];
    double t2 = 0.0;
    for (int i = 2; i < cfg.N; ++i) t2 += y[i] * y[i];
    double acc = 0.0;
    for (int j = 1; j <= cfg.k; ++j) {
        const double ang = cfg.center_angle(j);
        const double dx = y1 - cfg.r * std::cos(ang);
        const double dy = y2 - cfg.r * std::sin(ang);
        acc += bubble_value(cfg.N, cfg.lambda, dx * dx + dy * dy + t2);
    }
    (void)sp;
    return acc;
}

double dist2_ring(const RingConfig& cfg, int j, double s, double theta, double t) {
    const double d = theta - cfg.center_angle(j);
    return s * s + cfg.r * cfg.r - 2.0 * s * cfg.r * std::cos(d) + t * t;
}

double eval_W_reduced(const RingConfig& cfg, double s, double theta, double t) {
    double acc = 0.0;
    for (int j = 1; j <= cfg.k; ++j)
        acc += bubble_value(cfg.N, cfg.lambda, dist2_ring(cfg, j, s, theta, t));
    return acc;
}

} // namespace bt
