#include "bubbletower/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "bubbletower/common.hpp"
#include "bubbletower/sector.hpp"

namespace bt {

double QuadratureSpec::r_max(double ring_radius) const {
    return std::max(r_max_factor, 50.0) * std::max(ring_radius, 1.0);
}

void gauss_rule(int order, std::vector<double>& x, std::vector<double>& w) {
    if (order < 2) throw std::invalid_argument("gauss_rule: order must be >= 2");
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

namespace {

struct Rule {
    std::vector<double> x, w;
};

const Rule& cached_gauss(int order) {
    static std::map<int, Rule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) {
        Rule r;
        gauss_rule(order, r.x, r.w);
        it = cache.emplace(order, std::move(r)).first;
    }
    return it->second;
}

// tanh-sinh nodes on (-1, 1); the level is tied to the requested order so the
// two rules cost comparably.
Rule tanh_sinh_rule(int order) {
    Rule r;
    const double h = 3.8 / std::max(8, 2 * order);
    const int K = static_cast<int>(3.8 / h);
    for (int j = -K; j <= K; ++j) {
        const double t = j * h;
        const double sh = 0.5 * kPi * std::sinh(t);
        const double x = std::tanh(sh);
        const double dw = h * 0.5 * kPi * std::cosh(t) / std::pow(std::cosh(sh), 2);
        if (dw < 1e-17) continue;
        r.x.push_back(x);
        r.w.push_back(dw);
    }
    return r;
}

const Rule& panel_rule(const QuadratureSpec& q, int order) {
    if (q.radial_rule == RadialRule::gauss_legendre_panels) return cached_gauss(order);
    static std::map<int, Rule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, tanh_sinh_rule(order)).first;
    return it->second;
}

double run_1d(const Fn1& f, std::span<const double> breaks, const Rule& r, long long& nodes) {
    std::vector<double> panel_sums;
    panel_sums.reserve(breaks.size());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + hw * r.x[i]);
        panel_sums.push_back(s * hw);
        nodes += static_cast<long long>(r.x.size());
    }
    return pairwise_sum(panel_sums);
}

double run_2d(const Fn2& f, std::span<const double> xb, std::span<const double> yb, const Rule& r,
              long long& nodes) {
    std::vector<double> panel_sums;
    for (std::size_t p = 0; p + 1 < xb.size(); ++p) {
        const double xc = 0.5 * (xb[p] + xb[p + 1]), xh = 0.5 * (xb[p + 1] - xb[p]);
        for (std::size_t qq = 0; qq + 1 < yb.size(); ++qq) {
            const double yc = 0.5 * (yb[qq] + yb[qq + 1]), yh = 0.5 * (yb[qq + 1] - yb[qq]);
            double s = 0.0;
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                const double xi = xc + xh * r.x[i];
                double row = 0.0;
                for (std::size_t j = 0; j < r.x.size(); ++j)
                    row += r.w[j] * f(xi, yc + yh * r.x[j]);
                s += r.w[i] * row;
            }
            panel_sums.push_back(s * xh * yh);
            nodes += static_cast<long long>(r.x.size() * r.x.size());
        }
    }
    return pairwise_sum(panel_sums);
}

double run_3d(const Fn3& f, std::span<const double> xb, std::span<const double> yb,
              std::span<const double> zb, const Rule& r, long long& nodes) {
    const std::size_t npx = xb.size() - 1;
    std::vector<double> slab_sums(npx, 0.0);
    long long per_slab_nodes =
        static_cast<long long>((yb.size() - 1) * (zb.size() - 1) * r.x.size() * r.x.size() * r.x.size());
    parallel_for(npx, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> inner;
        for (std::size_t p = lo; p < hi; ++p) {
            const double xc = 0.5 * (xb[p] + xb[p + 1]), xh = 0.5 * (xb[p + 1] - xb[p]);
            inner.clear();
            for (std::size_t qq = 0; qq + 1 < yb.size(); ++qq) {
                const double yc = 0.5 * (yb[qq] + yb[qq + 1]), yh = 0.5 * (yb[qq + 1] - yb[qq]);
                for (std::size_t rr = 0; rr + 1 < zb.size(); ++rr) {
                    const double zc = 0.5 * (zb[rr] + zb[rr + 1]), zh = 0.5 * (zb[rr + 1] - zb[rr]);
                    double s = 0.0;
                    for (std::size_t i = 0; i < r.x.size(); ++i) {
                        const double xi = xc + xh * r.x[i];
                        for (std::size_t j = 0; j < r.x.size(); ++j) {
                            const double yj = yc + yh * r.x[j];
                            double row = 0.0;
                            for (std::size_t l = 0; l < r.x.size(); ++l)
                                row += r.w[l] * f(xi, yj, zc + zh * r.x[l]);
                            s += r.w[i] * r.w[j] * row;
                        }
                    }
                    inner.push_back(s * xh * yh * zh);
                }
            }
            slab_sums[p] = pairwise_sum(inner);
        }
    });
    nodes += per_slab_nodes * static_cast<long long>(npx);
    return pairwise_sum(slab_sums);
}

} // namespace

std::vector<double> graded_breaks(double lo, double hi, std::span<const double> features,
                                  double unit, double growth, int core_each_side) {
    if (!(hi > lo)) throw std::invalid_argument("graded_breaks: empty interval");
    if (unit <= 0.0) throw std::invalid_argument("graded_breaks: unit must be > 0");
    std::vector<double> pts = {lo, hi};
    const double span = hi - lo;
    for (double f : features) {
        for (int side = -1; side <= 1; side += 2) {
            double off = 0.0;
            for (int i = 1; i <= core_each_side; ++i) {
                off = unit * i;
                pts.push_back(f + side * off);
            }
            while (off < span) {
                off *= growth;
                pts.push_back(f + side * off);
            }
        }
        pts.push_back(f);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (p < lo || p > hi) continue;
        if (!out.empty() && p - out.back() < 0.25 * unit) continue;
        out.push_back(p);
    }
    if (out.empty() || out.front() != lo) out.insert(out.begin(), lo);
    if (out.back() < hi) {
        if (hi - out.back() < 0.25 * unit && out.size() > 1) out.back() = hi;
        else out.push_back(hi);
    }
    return out;
}

IntegralResult integrate_1d(const Fn1& f, std::span<const double> breaks, const QuadratureSpec& q,
                            bool refine) {
    IntegralResult res;
    const double v1 = run_1d(f, breaks, panel_rule(q, q.order), res.nodes_used);
    if (!refine) {
        res.value = v1;
        res.est_error = std::abs(v1) * 1e-14;
        return res;
    }
    const double v2 = run_1d(f, breaks, panel_rule(q, q.refine_order), res.nodes_used);
    res.value = v2;
    res.est_error = std::abs(v2 - v1) + std::abs(v2) * 1e-15;
    return res;
}

IntegralResult integrate_2d(const Fn2& f, std::span<const double> xb, std::span<const double> yb,
                            const QuadratureSpec& q, bool refine) {
    IntegralResult res;
    const double v1 = run_2d(f, xb, yb, panel_rule(q, q.order), res.nodes_used);
    if (!refine) {
        res.value = v1;
        res.est_error = std::abs(v1) * 1e-14;
        return res;
    }
    const double v2 = run_2d(f, xb, yb, panel_rule(q, q.refine_order), res.nodes_used);
    res.value = v2;
    res.est_error = std::abs(v2 - v1) + std::abs(v2) * 1e-15;
    return res;
}

IntegralResult integrate_3d(const Fn3& f, std::span<const double> xb, std::span<const double> yb,
                            std::span<const double> zb, const QuadratureSpec& q, bool refine) {
    IntegralResult res;
    const double v1 = run_3d(f, xb, yb, zb, panel_rule(q, q.order), res.nodes_used);
    if (!refine) {
        res.value = v1;
        res.est_error = std::abs(v1) * 1e-14;
        return res;
    }
    const double v2 = run_3d(f, xb, yb, zb, panel_rule(q, q.refine_order), res.nodes_used);
    res.value = v2;
    res.est_error = std::abs(v2 - v1) + std::abs(v2) * 1e-15;
    return res;
}

IntegralResult integral_bubble_power(int N, double p_exp, double lambda, const QuadratureSpec& q) {
    if (p_exp * (N - 2) <= N)
        throw std::invalid_argument("integral_bubble_power: p(N-2) must exceed N");
    if (lambda <= 0.0) throw std::invalid_argument("integral_bubble_power: lambda must be > 0");
    const double R = q.r_max(1.0) / lambda;
    const double area = sphere_area(N);
    const std::vector<double> feats = {0.0};
    const auto breaks = graded_breaks(0.0, R, feats, 0.5 / lambda, q.growth, q.core_panels);
    auto f = [N, p_exp, lambda, area](double rho) {
        return area * std::pow(rho, N - 1) * bubble_value_pow(N, lambda, rho * rho, p_exp);
    };
    IntegralResult res = integrate_1d(f, breaks, q);
    const double decay = p_exp * (N - 2) - N; // integrand tail ~ rho^{-decay-1}
    res.est_error += f(R) * R / decay;
    return res;
}

IntegralResult moment_integral(int N, double m_ord, double p_exp, const QuadratureSpec& q) {
    if (p_exp * (N - 2) <= N + m_ord)
        throw std::invalid_argument("moment_integral: need p(N-2) > N + m");
    if (m_ord < 0.0) throw std::invalid_argument("moment_integral: need m >= 0");
    const double R = q.r_max(1.0);
    const double area = sphere_area(N - 1); // |S^{N-2}| for the y_perp shells
    const std::vector<double> feats = {0.0};
    const auto ab = graded_breaks(0.0, R, feats, 0.5, q.growth, q.core_panels);
    // even in y_1: integrate a >= 0 and double
    auto f = [N, m_ord, p_exp, area](double a, double u) {
        const double rho2 = a * a + u * u;
        const double am = m_ord == 0.0 ? 1.0 : std::pow(a, m_ord);
        return 2.0 * area * am * std::pow(u, N - 2) * bubble_value_pow(N, 1.0, rho2, p_exp);
    };
    IntegralResult res = integrate_2d(f, ab, ab, q);
    const double decay = p_exp * (N - 2) - m_ord - N;
    const double shell = f(R / std::sqrt(2.0), R / std::sqrt(2.0)) * R;
    res.est_error += shell * R / std::max(decay, 1.0);
    return res;
}

IntegralResult interaction_integral(const Bubble& b1, const Bubble& b2, const QuadratureSpec& q) {
    if (b1.dim() != b2.dim()) throw std::invalid_argument("interaction_integral: dimension mismatch");
    const int N = b1.dim();
    double d2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double d = b1.center[i] - b2.center[i];
        d2 += d * d;
    }
    const double d = std::sqrt(d2);
    if (d == 0.0)
        throw std::invalid_argument(
            "interaction_integral: coincident centers; use integral_bubble_power instead");
    const double p1 = (2.0 * N / (N - 2.0)) - 1.0; // 2* - 1
    const double unit = 0.5 / std::max(b1.lambda, b2.lambda);
    const double R = q.r_max(d);
    const std::vector<double> afeats = {0.0, d};
    const auto ab = graded_breaks(-R, R, afeats, unit, q.growth, q.core_panels);
    const std::vector<double> ufeats = {0.0};
    const auto ub = graded_breaks(0.0, R, ufeats, unit, q.growth, q.core_panels);
    const double area = sphere_area(N - 1);
    const double l1 = b1.lambda, l2 = b2.lambda;
    auto f = [N, p1, area, l1, l2, d](double a, double u) {
        const double u2 = u * u;
        return area * std::pow(u, N - 2) * bubble_value_pow(N, l1, a * a + u2, p1) *
               bubble_value(N, l2, (a - d) * (a - d) + u2);
    };
    IntegralResult res = integrate_2d(f, ab, ub, q);
    const double shell = f(R / std::sqrt(2.0), R / std::sqrt(2.0)) * R;
    res.est_error += shell * R / N; // integrand tail ~ rho^{-2N}
    return res;
}

IntegralResult sector_integral(const Fn3& f, int N, const SectorGrading& g, const QuadratureSpec& q,
                               bool refine) {
    if (N < 4) throw std::invalid_argument("sector_integral: N must be >= 4");
    const double unit = 0.5 / g.lambda;
    const std::vector<double> sfeats = {g.ring_radius};
    const auto sb = graded_breaks(0.0, g.R_max, sfeats, unit, q.growth, q.core_panels);
    const double theta_unit = std::min(unit / std::max(g.ring_radius, 1.0), 0.25 * g.theta_max);
    const std::vector<double> thfeats = {0.0};
    const auto thb = graded_breaks(0.0, g.theta_max, thfeats, theta_unit, q.growth, q.core_panels);
    const std::vector<double> tfeats = {0.0};
    const auto tb = graded_breaks(0.0, g.R_max, tfeats, unit, q.growth, q.core_panels);
    const double area = sphere_area(N - 2);
    auto weighted = [&f, N, area](double s, double th, double t) {
        return 2.0 * area * s * std::pow(t, N - 3.0) * f(s, th, t);
    };
    return integrate_3d(weighted, sb, thb, tb, q, refine);
}

namespace {

// Plane distance terms c_j = s^2 + r^2 - 2 s r cos(theta - phi_j) are shared
// by every t-node of a column; cache them per thread.
struct PlaneTerms {
    std::vector<double> cphi, sphi;

    explicit PlaneTerms(const RingConfig& cfg) : cphi(cfg.k), sphi(cfg.k), r_(cfg.r), k_(cfg.k) {
        for (int j = 0; j < cfg.k; ++j) {
            cphi[j] = std::cos(cfg.center_angle(j + 1));
            sphi[j] = std::sin(cfg.center_angle(j + 1));
        }
    }

    const std::vector<double>& at(double s, double th) const {
        struct Cache {
            double s = -1.0, th = 0.0, r = -1.0;
            int k = -1;
            std::vector<double> c;
        };
        static thread_local Cache tc;
        if (tc.s != s || tc.th != th || tc.r != r_ || tc.k != k_) {
            tc.s = s;
            tc.th = th;
            tc.r = r_;
            tc.k = k_;
            tc.c.resize(k_);
            const double ct = std::cos(th), st = std::sin(th);
            const double base = s * s + r_ * r_;
            for (int j = 0; j < k_; ++j)
                tc.c[j] = base - 2.0 * s * r_ * (ct * cphi[j] + st * sphi[j]);
        }
        return tc.c;
    }

  private:
    double r_;
    int k_;
};

// sum over j >= 2 of the pairwise interaction integrals, using the chord
// multiplicity d_{1j} = d_{1,k+2-j}.
double ring_interaction_sum(const RingConfig& cfg, const QuadratureSpec& q, double* err,
                            long long* nodes) {
    double total = 0.0;
    double errs = 0.0;
    for (int j = 2; j <= cfg.k / 2 + 1; ++j) {
        const double d = 2.0 * cfg.r * std::sin((j - 1) * kPi / cfg.k);
        const int mult = (2 * (j - 1) == cfg.k) ? 1 : 2;
        Bubble b1{std::vector<double>(cfg.N, 0.0), cfg.lambda};
        Bubble b2{std::vector<double>(cfg.N, 0.0), cfg.lambda};
        b2.center[0] = d;
        const IntegralResult r = interaction_integral(b1, b2, q);
        total += mult * r.value;
        errs += mult * r.est_error;
        if (nodes) *nodes += r.nodes_used;
    }
    if (err) *err += errs;
    return total;
}

} // namespace

EnergyParts energy_parts(const RingConfig& cfg, const CurvatureModel& model,
                         const ProblemParams& p, const QuadratureSpec& q, bool refine) {
    if (cfg.r <= 0.0 || cfg.lambda <= 0.0)
        throw std::invalid_argument("energy_parts: invalid ring configuration");
    EnergyParts parts;
    ProblemParams pk = p;
    pk.k = cfg.k;
    parts.mu = mu_of_k(pk);
    const double two_star = p.two_star();

    IntegralResult up = integral_bubble_power(cfg.N, two_star, 1.0, q);
    parts.bubble_power = up.value;
    parts.total.nodes_used += up.nodes_used;
    double err = up.est_error * cfg.k * (0.5 - 1.0 / two_star);

    if (cfg.k > 1)
        parts.s_interaction = ring_interaction_sum(cfg, q, &err, &parts.total.nodes_used);

    const double mu = parts.mu;
    const RingConfig ring = cfg;
    const auto plane = std::make_shared<PlaneTerms>(ring);
    auto deficit = [&ring, &model, mu, two_star, plane](double s, double th, double t) {
        const auto& c = plane->at(s, th);
        const double t2 = t * t;
        double w = 0.0;
        double powersum = 0.0;
        for (int j = 0; j < ring.k; ++j) {
            const double q2 = c[j] + t2;
            w += bubble_value(ring.N, ring.lambda, q2);
            powersum += bubble_value_pow(ring.N, ring.lambda, q2, two_star);
        }
        const double K = eval_K(model, std::sqrt(s * s + t2) / mu);
        return K * std::pow(w, two_star) - powersum;
    };
    SectorGrading g;
    g.ring_radius = cfg.r;
    g.lambda = cfg.lambda;
    g.theta_max = kPi / cfg.k;
    g.R_max = q.r_max(cfg.r);
    IntegralResult pd = sector_integral(deficit, cfg.N, g, q, refine);
    parts.p_deficit = pd.value;
    parts.total.nodes_used += pd.nodes_used;
    err += pd.est_error * cfg.k / two_star;

    const double A = (0.5 - 1.0 / two_star) * parts.bubble_power;
    parts.total.value =
        cfg.k * (A + 0.5 * parts.s_interaction - parts.p_deficit / two_star);
    parts.total.est_error = err;
    return parts;
}

IntegralResult energy_I(const RingConfig& cfg, const CurvatureModel& model, const ProblemParams& p,
                        const QuadratureSpec& q) {
    return energy_parts(cfg, model, p, q).total;
}

IntegralResult energy_I_direct(const RingConfig& cfg, const CurvatureModel& model,
                               const ProblemParams& p, const QuadratureSpec& q) {
    ProblemParams pk = p;
    pk.k = cfg.k;
    const double mu = mu_of_k(pk);
    const double two_star = p.two_star();
    const RingConfig ring = cfg;

    auto grad2 = [&ring](double s, double th, double t) {
        // |DW|^2 from closed-form bubble gradients; the in-plane embedding
        // (s cos th, s sin th, t, 0, ...) represents the H_s orbit.
        const double y1 = s * std::cos(th), y2 = s * std::sin(th);
        double g1 = 0.0, g2 = 0.0, g3 = 0.0;
        for (int j = 1; j <= ring.k; ++j) {
            const double ang = ring.center_angle(j);
            const double dx = y1 - ring.r * std::cos(ang);
            const double dy = y2 - ring.r * std::sin(ang);
            const double q2 = dx * dx + dy * dy + t * t;
            const double u = bubble_value(ring.N, ring.lambda, q2);
            const double c = -(ring.N - 2) * ring.lambda * ring.lambda * u /
                             (1.0 + ring.lambda * ring.lambda * q2);
            g1 += c * dx;
            g2 += c * dy;
            g3 += c * t;
        }
        return g1 * g1 + g2 * g2 + g3 * g3;
    };
    auto potential = [&ring, &model, mu, two_star](double s, double th, double t) {
        const double w = eval_W_reduced(ring, s, th, t);
        const double K = eval_K(model, std::sqrt(s * s + t * t) / mu);
        return K * std::pow(w, two_star);
    };
    SectorGrading g;
    g.ring_radius = cfg.r;
    g.lambda = cfg.lambda;
    g.theta_max = kPi / cfg.k;
    g.R_max = q.r_max(cfg.r);
    const IntegralResult gr = sector_integral(grad2, cfg.N, g, q, true);
    const IntegralResult po = sector_integral(potential, cfg.N, g, q, true);
    IntegralResult res;
    res.value = cfg.k * (0.5 * gr.value - po.value / two_star);
    res.est_error = cfg.k * (0.5 * gr.est_error + po.est_error / two_star);
    res.nodes_used = gr.nodes_used + po.nodes_used;
    return res;
}

} // namespace bt
