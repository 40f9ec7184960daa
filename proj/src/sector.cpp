#include "bubbletower/sector.hpp"

#include <cmath>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

int sector_index(std::span<const double> y, int k) {
    if (k < 1) throw std::invalid_argument("sector_index: k must be >= 1");
    if (y.size() < 2) throw std::invalid_argument("sector_index: need at least 2 coordinates");
    const double s2 = y[0] * y[0] + y[1] * y[1];
    if (s2 == 0.0) return 1; // axis point, belongs to all sectors
    const double ang = std::atan2(y[1], y[0]);
    int best = 1;
    double best_dot = std::cos(ang);
    for (int j = 2; j <= k; ++j) {
        const double dot = std::cos(ang - 2.0 * kPi * (j - 1) / k);
        if (dot > best_dot) {
            best_dot = dot;
            best = j;
        }
    }
    return best;
}

SectorPoint reduce_point(std::span<const double> y, int k) {
    const int j = sector_index(y, k);
    SectorPoint p;
    p.s = std::hypot(y[0], y[1]);
    double t2 = 0.0;
    for (std::size_t i = 2; i < y.size(); ++i) t2 += y[i] * y[i];
    p.t = std::sqrt(t2);
    if (p.s > 0.0) {
        double th = std::atan2(y[1], y[0]) - 2.0 * kPi * (j - 1) / k;
        const double half = kPi / k;
        while (th >= half) th -= 2.0 * kPi / k;
        while (th < -half) th += 2.0 * kPi / k;
        p.theta = th;
    }
    return p;
}

std::vector<double> lift_point(const SectorPoint& p, int j, int k, int N) {
    if (N < 3) throw std::invalid_argument("lift_point: N must be >= 3");
    if (j < 1 || j > k) throw std::invalid_argument("lift_point: sector index out of range");
    std::vector<double> y(N, 0.0);
    const double ang = p.theta + 2.0 * kPi * (j - 1) / k;
    y[0] = p.s * std::cos(ang);
    y[1] = p.s * std::sin(ang);
    y[2] = p.t;
    return y;
}

LaplacianCoeffs laplacian_coefficients(const SectorPoint& p, int N) {
    if (N < 4) throw std::invalid_argument("laplacian_coefficients: N must be >= 4");
    LaplacianCoeffs c;
    if (p.s <= 0.0 || p.t <= 0.0) {
        c.on_axis = true;
        return c;
    }
    c.c_s = 1.0 / p.s;
    c.c_thth = 1.0 / (p.s * p.s);
    c.c_t = (N - 3.0) / p.t;
    return c;
}

double sector_volume_weight(double s, double t, int N) {
    // y'' lives in R^{N-2}; its radial measure carries |S^{N-3}| t^{N-3}.
    return s * std::pow(t, N - 3.0) * sphere_area(N - 2);
}

} // namespace bt
