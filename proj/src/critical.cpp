#include "bubbletower/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

RegionD RegionD::make(const ProblemParams& p, double lam0) {
    const double mu = mu_of_k(p);
    RegionD d;
    const double rw = std::pow(mu, -p.theta_bar);
    const double lw = std::pow(mu, -1.5 * p.theta_bar);
    d.r_lo = mu * p.r0 - rw;
    d.r_hi = mu * p.r0 + rw;
    d.lam_lo = lam0 - lw;
    d.lam_hi = lam0 + lw;
    if (!(d.r_lo < d.r_hi) || !(d.lam_lo < d.lam_hi) || d.lam_lo <= 0.0)
        throw std::invalid_argument("RegionD: degenerate region");
    return d;
}

bool RegionD::contains(double r, double lam) const {
    return r >= r_lo && r <= r_hi && lam >= lam_lo && lam <= lam_hi;
}

ReducedEnergy::ReducedEnergy(Objective kind, const ProblemParams& p,
                             const ExpansionConstants& consts, const CurvatureModel& model,
                             const QuadratureSpec& quad)
    : kind_(kind), p_(p), consts_(consts), model_(model), quad_(quad) {
    mu_ = mu_of_k(p_);
    // flow evaluations skip the refinement pass; truncation can be shorter
    quad_.r_max_factor = std::min(quad_.r_max_factor, 200.0);
}

double ReducedEnergy::F(double r, double lam) const {
    if (kind_ == Objective::expansion) return F_expansion(p_, consts_, r, lam);
    RingConfig cfg{p_.N, p_.k, r, lam};
    return energy_parts(cfg, model_, p_, quad_, false).total.value;
}

std::array<double, 2> ReducedEnergy::grad_Fbar(double r, double lam) const {
    if (kind_ == Objective::expansion) {
        const double mum = std::pow(mu_, p_.m);
        const double dr = mu_ * p_.r0 - r;
        const double dF_dr =
            -2.0 * p_.k * consts_.B2.value * dr / (std::pow(lam, p_.m - 2.0) * mum);
        double dF_dl = dF_dLambda_expansion(p_, consts_, r, lam);
        if (p_.m != 2.0)
            dF_dl += -p_.k * (p_.m - 2.0) * consts_.B2.value * dr * dr /
                     (std::pow(lam, p_.m - 1.0) * mum);
        return {-dF_dr, -dF_dl};
    }
    const double hr = std::pow(mu_, -p_.theta_bar) / 100.0;
    const double hl = std::pow(mu_, -1.5 * p_.theta_bar) / 100.0;
    const double fr = (F(r + hr, lam) - F(r - hr, lam)) / (2.0 * hr);
    const double fl = (F(r, lam + hl) - F(r, lam - hl)) / (2.0 * hl);
    return {-fr, -fl};
}

double ReducedEnergy::grad_scale() const {
    // the natural gradient magnitude of the Lambda-derivative display
    return p_.k * consts_.B1.value * p_.m / std::pow(mu_, p_.m);
}

std::array<double, 2> minmax_levels(const ProblemParams& p, const ExpansionConstants& consts,
                                    double eta_factor) {
    const double mu = mu_of_k(p);
    const double mum = std::pow(mu, p.m);
    const double lam0 = lambda0(p, consts);
    const double bracket =
        consts.B1.value / std::pow(lam0, p.m) -
        consts.B4.value / (std::pow(lam0, p.N - 2.0) * std::pow(p.r0, p.N - 2.0));
    const double alpha1 =
        p.k * (-consts.A.value - bracket / mum - std::pow(mu, -p.m - 2.5 * p.theta_bar));
    const double alpha2 = p.k * (-consts.A.value + eta_factor * consts.A.value);
    return {alpha1, alpha2};
}

FlowTrajectory gradient_flow(const ReducedEnergy& obj, std::array<double, 2> start,
                             const RegionD& region, CriticalPointResult& out,
                             const FlowOptions& opts) {
    FlowTrajectory traj;
    out = CriticalPointResult{};
    out.method = CritMethod::flow;
    out.objective = obj.kind();
    if (!region.contains(start[0], start[1]))
        throw std::invalid_argument("gradient_flow: start outside the region");

    const auto levels = minmax_levels(obj.params(), obj.constants());
    const double alpha1 = levels[0];
    const double gtol = opts.grad_tol_factor * obj.grad_scale();

    double r = start[0], lam = start[1];
    double fbar = obj.Fbar(r, lam);
    traj.points.push_back({r, lam, fbar});
    const double region_diag = std::hypot(region.r_hi - region.r_lo, region.lam_hi - region.lam_lo);
    double eta = 0.0;

    for (int it = 0; it < opts.max_iterations; ++it) {
        const auto g = obj.grad_Fbar(r, lam);
        const double gnorm = std::hypot(g[0], g[1]);
        out.iterations = it;
        out.r_star = r;
        out.lam_star = lam;
        out.grad_norm = gnorm;
        if (gnorm < gtol) {
            out.converged = true;
            traj.stop = FlowStop::critical_point;
            return traj;
        }
        if (opts.stop_at_alpha1 && fbar <= alpha1) {
            traj.stop = FlowStop::sublevel_alpha1;
            out.failure = "reached the alpha_1 sublevel set";
            return traj;
        }
        if (eta == 0.0) eta = 0.1 * region_diag / gnorm;

        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            const double rn = r - eta * g[0];
            const double ln = lam - eta * g[1];
            if (!region.contains(rn, ln)) {
                if (eta * gnorm < 1e-14 * region_diag) {
                    traj.stop = FlowStop::region_exit;
                    out.failure = "flow left the region";
                    return traj;
                }
                eta *= 0.5;
                continue;
            }
            const double fn = obj.Fbar(rn, ln);
            if (fn <= fbar) {
                r = rn;
                lam = ln;
                fbar = fn;
                traj.points.push_back({r, lam, fbar});
                eta *= 1.5;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            traj.stop = FlowStop::critical_point;
            out.converged = gnorm < 10.0 * gtol;
            if (!out.converged) out.failure = "line search stalled";
            return traj;
        }
    }
    traj.stop = FlowStop::max_iterations;
    out.failure = "max iterations";
    return traj;
}

CriticalPointResult newton_polish(const ReducedEnergy& obj, std::array<double, 2> start,
                                  double grad_tol, int max_iter) {
    CriticalPointResult res;
    res.method = CritMethod::newton;
    res.objective = obj.kind();
    double r = start[0], lam = start[1];
    const double mu = obj.mu();
    const double hr = std::pow(mu, -obj.params().theta_bar) / 100.0;
    const double hl = std::pow(mu, -1.5 * obj.params().theta_bar) / 100.0;
    const double max_step = 100.0 * std::max(hr, hl);

    for (int it = 0; it < max_iter; ++it) {
        const auto g = obj.grad_Fbar(r, lam);
        res.iterations = it;
        res.r_star = r;
        res.lam_star = lam;
        res.grad_norm = std::hypot(g[0], g[1]);
        if (res.grad_norm < grad_tol) {
            res.converged = true;
            return res;
        }
        const auto gpr = obj.grad_Fbar(r + hr, lam);
        const auto gmr = obj.grad_Fbar(r - hr, lam);
        const auto gpl = obj.grad_Fbar(r, lam + hl);
        const auto gml = obj.grad_Fbar(r, lam - hl);
        const double h11 = (gpr[0] - gmr[0]) / (2.0 * hr);
        const double h21 = (gpr[1] - gmr[1]) / (2.0 * hr);
        const double h12 = (gpl[0] - gml[0]) / (2.0 * hl);
        const double h22 = (gpl[1] - gml[1]) / (2.0 * hl);
        const double det = h11 * h22 - h12 * h21;
        if (det == 0.0 || !std::isfinite(det)) {
            res.failure = "singular Hessian";
            return res;
        }
        double dr = -(h22 * g[0] - h12 * g[1]) / det;
        double dl = -(-h21 * g[0] + h11 * g[1]) / det;
        const double step = std::hypot(dr, dl);
        if (step > max_step) {
            dr *= max_step / step;
            dl *= max_step / step;
        }
        r += dr;
        lam += dl;
        if (!std::isfinite(r) || !std::isfinite(lam) || lam <= 0.0) {
            res.failure = "diverged";
            return res;
        }
    }
    res.failure = "max iterations";
    return res;
}

CriticalPointResult find_critical_point(const ReducedEnergy& obj, std::array<double, 2> start,
                                        const RegionD& region, double grad_tol) {
    CriticalPointResult flow_res;
    const FlowTrajectory traj = gradient_flow(obj, start, region, flow_res);
    std::array<double, 2> best = {flow_res.r_star, flow_res.lam_star};
    double best_g = std::numeric_limits<double>::infinity();
    const std::size_t stride = std::max<std::size_t>(1, traj.points.size() / 32);
    for (std::size_t i = 0; i < traj.points.size(); i += stride) {
        const auto g = obj.grad_Fbar(traj.points[i][0], traj.points[i][1]);
        const double gn = std::hypot(g[0], g[1]);
        if (gn < best_g) {
            best_g = gn;
            best = {traj.points[i][0], traj.points[i][1]};
        }
    }
    CriticalPointResult res = newton_polish(obj, best, grad_tol);
    res.method = CritMethod::hybrid;
    res.iterations += flow_res.iterations;
    return res;
}

MinmaxResult minmax_value(const ReducedEnergy& obj, const RegionD& region, int n_r, int n_lam) {
    if (n_r < 1 || n_lam < 1) throw std::invalid_argument("minmax_value: empty grid");
    auto solve_on = [&](int nr, int nl, MinmaxResult& res) {
        std::vector<double> rs(nr), ls(nl);
        for (int i = 0; i < nr; ++i)
            rs[i] = nr == 1 ? region.r_center()
                            : region.r_lo + (region.r_hi - region.r_lo) * i / (nr - 1);
        for (int j = 0; j < nl; ++j)
            ls[j] = nl == 1 ? region.lam_center()
                            : region.lam_lo + (region.lam_hi - region.lam_lo) * j / (nl - 1);
        std::vector<std::vector<double>> fb(nr, std::vector<double>(nl));
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nl; ++j) fb[i][j] = obj.Fbar(rs[i], ls[j]);

        // DP over r-slices; |dLambda| <= one cell per slice
        std::vector<std::vector<double>> cost = {fb[0]};
        std::vector<std::vector<int>> from(nr, std::vector<int>(nl, -1));
        for (int i = 1; i < nr; ++i) {
            std::vector<double> next(nl, std::numeric_limits<double>::infinity());
            for (int j = 0; j < nl; ++j) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const int jp = j + dj;
                    if (jp < 0 || jp >= nl) continue;
                    const double c = std::max(cost.back()[jp], fb[i][j]);
                    if (c < next[j]) {
                        next[j] = c;
                        from[i][j] = jp;
                    }
                }
            }
            cost.push_back(std::move(next));
        }
        int jbest = 0;
        for (int j = 1; j < nl; ++j)
            if (cost.back()[j] < cost.back()[jbest]) jbest = j;
        res.c_value = cost.back()[jbest];
        int i = nr - 1, j = jbest;
        res.r_at = rs[i];
        res.lam_at = ls[j];
        double cmax = fb[i][j];
        while (i > 0 && from[i][j] >= 0) {
            j = from[i][j];
            --i;
            if (fb[i][j] > cmax) {
                cmax = fb[i][j];
                res.r_at = rs[i];
                res.lam_at = ls[j];
            }
        }
    };
    MinmaxResult res;
    solve_on(n_r, n_lam, res);
    MinmaxResult fine;
    solve_on(std::max(2 * n_r - 1, 1), std::max(2 * n_lam - 1, 1), fine);
    res.refine_delta = std::abs(fine.c_value - res.c_value);
    res.c_value = fine.c_value;
    res.r_at = fine.r_at;
    res.lam_at = fine.lam_at;
    res.grid_converged = res.refine_delta <= 1e-3 * std::max(std::abs(res.c_value), 1e-300);
    const auto levels = minmax_levels(obj.params(), obj.constants());
    res.alpha1 = levels[0];
    res.alpha2 = levels[1];
    return res;
}

} // namespace bt
