#include "bubbletower/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bubbletower/common.hpp"

namespace bt {

namespace {

// Face positions grown geometrically away from a feature; exact endpoints.
std::vector<double> graded_faces(double lo, double hi, double feature, double h0,
                                 double core_halfwidth, double growth) {
    std::vector<double> faces = {feature};
    for (int side : {-1, 1}) {
        double pos = feature;
        double h = h0;
        double off = 0.0;
        while ((side < 0 && pos > lo) || (side > 0 && pos < hi)) {
            off += h;
            if (off > core_halfwidth) h *= growth;
            pos = feature + side * off;
            faces.push_back(pos);
        }
    }
    std::sort(faces.begin(), faces.end());
    std::vector<double> out;
    for (double f : faces) {
        if (f <= lo || f >= hi) continue;
        out.push_back(f);
    }
    out.insert(out.begin(), lo);
    out.push_back(hi);
    // drop slivers against the endpoints
    if (out.size() > 2 && out[1] - out[0] < 0.25 * h0) out.erase(out.begin() + 1);
    if (out.size() > 2 && out[out.size() - 1] - out[out.size() - 2] < 0.25 * h0)
        out.erase(out.end() - 2);
    return out;
}

std::vector<double> centers_of(const std::vector<double>& faces) {
    std::vector<double> c(faces.size() - 1);
    for (std::size_t i = 0; i + 1 < faces.size(); ++i) c[i] = 0.5 * (faces[i] + faces[i + 1]);
    return c;
}

} // namespace

SectorGrid SectorGrid::build(int k, int N, double ring_r, double lambda, const GridSpec& spec) {
    if (N != 5)
        throw std::invalid_argument("SectorGrid: the grid solver is pinned to N = 5");
    if (k < 1 || ring_r <= 0.0 || lambda <= 0.0)
        throw std::invalid_argument("SectorGrid: invalid configuration");
    SectorGrid g;
    g.N = N;
    g.k = k;
    g.ring_r = ring_r;
    g.lambda = lambda;
    g.R_max = spec.R_factor * ring_r;
    const double h0 = 1.0 / (spec.resolution * lambda);
    const double cw = spec.core_halfwidth / lambda;
    g.sf = graded_faces(0.0, g.R_max, ring_r, h0, cw, spec.growth);
    const double th_h0 = h0 / ring_r;
    g.thf = graded_faces(0.0, kPi / k, 0.0, th_h0, cw / ring_r, spec.growth);
    g.tf = graded_faces(0.0, g.R_max, 0.0, h0, cw, spec.growth);
    g.s = centers_of(g.sf);
    g.th = centers_of(g.thf);
    g.t = centers_of(g.tf);
    if (g.size() == 0) throw std::invalid_argument("SectorGrid: empty grid");
    return g;
}

DiscreteOperator::DiscreteOperator(const SectorGrid& grid) : grid_(grid) {
    const std::size_t ns = grid_.ns(), nth = grid_.nth(), nt = grid_.nt();
    const std::size_t n = grid_.size();
    w_.assign(n, 0.0);
    ts_.assign(n, 0.0);
    tth_.assign(n, 0.0);
    tt_.assign(n, 0.0);
    robin_.assign(n, 0.0);
    diag_.assign(n, 0.0);

    const auto& sf = grid_.sf;
    const auto& thf = grid_.thf;
    const auto& tf = grid_.tf;
    const auto& s = grid_.s;
    const auto& th = grid_.th;
    const auto& t = grid_.t;
    const int N = grid_.N;

    for (std::size_t l = 0; l < nt; ++l) {
        // exact cell integral of t^2 dt; the centered form t_l^2 dt is
        // inconsistent at the axis cell
        const double tw = (tf[l + 1] * tf[l + 1] * tf[l + 1] - tf[l] * tf[l] * tf[l]) / 3.0;
        for (std::size_t j = 0; j < nth; ++j) {
            const double dth = thf[j + 1] - thf[j];
            for (std::size_t i = 0; i < ns; ++i) {
                const std::size_t id = grid_.idx(i, j, l);
                const double ds = sf[i + 1] - sf[i];
                const double sw = 0.5 * (sf[i + 1] * sf[i + 1] - sf[i] * sf[i]);
                w_[id] = sw * dth * tw;

                if (i + 1 < ns)
                    ts_[id] = sf[i + 1] * dth * tw / (s[i + 1] - s[i]);
                else {
                    // Robin at s = R: du/ds = -(N-2) s u / rho^2
                    const double rho2 = sf[ns] * sf[ns] + t[l] * t[l];
                    const double alpha = (N - 2) * sf[ns] / rho2;
                    const double gap = sf[ns] - s[i];
                    robin_[id] += sf[ns] * dth * tw * alpha / (1.0 + alpha * gap);
                }
                if (j + 1 < nth)
                    tth_[id] = (ds / s[i]) * tw / (th[j + 1] - th[j]);
                if (l + 1 < nt)
                    tt_[id] = tf[l + 1] * tf[l + 1] * sw * dth / (t[l + 1] - t[l]);
                else {
                    const double rho2 = s[i] * s[i] + tf[nt] * tf[nt];
                    const double alpha = (N - 2) * tf[nt] / rho2;
                    const double gap = tf[nt] - t[l];
                    robin_[id] += tf[nt] * tf[nt] * sw * dth * alpha / (1.0 + alpha * gap);
                }
            }
        }
    }
    // diagonal of A = (sum of incident transmissibilities + robin)/w
    for (std::size_t l = 0; l < nt; ++l)
        for (std::size_t j = 0; j < nth; ++j)
            for (std::size_t i = 0; i < ns; ++i) {
                const std::size_t id = grid_.idx(i, j, l);
                double acc = robin_[id];
                if (i + 1 < ns) acc += ts_[id];
                if (i > 0) acc += ts_[grid_.idx(i - 1, j, l)];
                if (j + 1 < nth) acc += tth_[id];
                if (j > 0) acc += tth_[grid_.idx(i, j - 1, l)];
                if (l + 1 < nt) acc += tt_[id];
                if (l > 0) acc += tt_[grid_.idx(i, j, l - 1)];
                diag_[id] = acc / w_[id];
            }
}

void DiscreteOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t ns = grid_.ns(), nth = grid_.nth(), nt = grid_.nt();
    out.resize(u.size());
    parallel_for(nt, [&](std::size_t llo, std::size_t lhi) {
        for (std::size_t l = llo; l < lhi; ++l)
            for (std::size_t j = 0; j < nth; ++j)
                for (std::size_t i = 0; i < ns; ++i) {
                    const std::size_t id = grid_.idx(i, j, l);
                    double acc = (robin_[id] != 0.0 ? robin_[id] * u[id] : 0.0);
                    if (i + 1 < ns) acc += ts_[id] * (u[id] - u[id + 1]);
                    if (i > 0) {
                        const std::size_t nb = id - 1;
                        acc += ts_[nb] * (u[id] - u[nb]);
                    }
                    if (j + 1 < nth) acc += tth_[id] * (u[id] - u[id + ns]);
                    if (j > 0) {
                        const std::size_t nb = id - ns;
                        acc += tth_[nb] * (u[id] - u[nb]);
                    }
                    if (l + 1 < nt) acc += tt_[id] * (u[id] - u[id + ns * nth]);
                    if (l > 0) {
                        const std::size_t nb = id - ns * nth;
                        acc += tt_[nb] * (u[id] - u[nb]);
                    }
                    out[id] = acc / w_[id];
                }
    });
}

double DiscreteOperator::inner(const std::vector<double>& a, const std::vector<double>& b) const {
    std::vector<double> terms(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = w_[i] * a[i] * b[i];
    return pairwise_sum(terms);
}

std::vector<double> sample_ansatz(const SectorGrid& grid, const RingConfig& cfg) {
    std::vector<double> w(grid.size());
    const std::size_t ns = grid.ns(), nth = grid.nth(), nt = grid.nt();
    parallel_for(nt, [&](std::size_t llo, std::size_t lhi) {
        for (std::size_t l = llo; l < lhi; ++l)
            for (std::size_t j = 0; j < nth; ++j)
                for (std::size_t i = 0; i < ns; ++i)
                    w[grid.idx(i, j, l)] = eval_W_reduced(cfg, grid.s[i], grid.th[j], grid.t[l]);
    });
    return w;
}

namespace {

// Red-black SSOR preconditioner for the symmetrized Laplacian
// D A D^{-1} (D = sqrt(w)); the diagonal uses the SPD part only so the
// preconditioner stays positive definite under the Newton potential.
class SsorPrec {
  public:
    SsorPrec(const DiscreteOperator& A, const std::vector<double>& sqw) : g_(A.grid()) {
        const std::size_t n = g_.size();
        const auto& diag = A.diagonal();
        d_.resize(n);
        for (std::size_t i = 0; i < n; ++i) d_[i] = std::max(diag[i], 1e-300);
        cs_.assign(n, 0.0);
        cth_.assign(n, 0.0);
        ct_.assign(n, 0.0);
        // symmetric off-diagonals of the scaled operator: -T/(sqw_i sqw_nb)
        const std::size_t ns = g_.ns(), nth = g_.nth(), nt = g_.nt();
        for (std::size_t l = 0; l < nt; ++l)
            for (std::size_t j = 0; j < nth; ++j)
                for (std::size_t i = 0; i < ns; ++i) {
                    const std::size_t id = g_.idx(i, j, l);
                    if (i + 1 < ns)
                        cs_[id] = -A.trans_s()[id] / (sqw[id] * sqw[id + 1]);
                    if (j + 1 < nth)
                        cth_[id] = -A.trans_th()[id] / (sqw[id] * sqw[id + ns]);
                    if (l + 1 < nt)
                        ct_[id] = -A.trans_t()[id] / (sqw[id] * sqw[id + ns * nth]);
                }
    }

    // z = M^{-1} r with M = (D+L) D^{-1} (D+L^T), red-black ordering
    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        const std::size_t n = g_.size();
        u_.resize(n);
        // forward: red rows have no lower neighbors in RB ordering
        sweep_color(0, r, u_, /*lower=*/true);
        sweep_color(1, r, u_, /*lower=*/true);
        z.resize(n);
        sweep_color(1, u_, z, /*lower=*/false); // z_black = u_black
        sweep_color(0, u_, z, /*lower=*/false);
    }

  private:
    int color(std::size_t i, std::size_t j, std::size_t l) const {
        return static_cast<int>((i + j + l) & 1u);
    }

    // lower pass: u_c = (r_c - sum_{nb opposite color already done} c u_nb)/d
    // upper pass: z_c = u_c - (sum_{nb} c z_nb)/d  (for the second color)
    void sweep_color(int col, const std::vector<double>& in, std::vector<double>& out,
                     bool lower) const {
        const std::size_t ns = g_.ns(), nth = g_.nth(), nt = g_.nt();
        parallel_for(nt, [&](std::size_t llo, std::size_t lhi) {
            for (std::size_t l = llo; l < lhi; ++l)
                for (std::size_t j = 0; j < nth; ++j) {
                    std::size_t i0 = (static_cast<std::size_t>(col) + j + l) & 1u;
                    for (std::size_t i = i0; i < ns; i += 2) {
                        const std::size_t id = g_.idx(i, j, l);
                        if (lower) {
                            double acc = in[id];
                            if (col == 1) { // black: subtract red lower-sweep values
                                if (i > 0) acc -= cs_[id - 1] * out[id - 1];
                                if (i + 1 < ns) acc -= cs_[id] * out[id + 1];
                                if (j > 0) acc -= cth_[id - ns] * out[id - ns];
                                if (j + 1 < nth) acc -= cth_[id] * out[id + ns];
                                if (l > 0) acc -= ct_[id - ns * nth] * out[id - ns * nth];
                                if (l + 1 < nt) acc -= ct_[id] * out[id + ns * nth];
                            }
                            out[id] = acc / d_[id];
                        } else {
                            if (col == 1) {
                                out[id] = in[id]; // z_black = u_black
                            } else {
                                double acc = 0.0;
                                if (i > 0) acc += cs_[id - 1] * out[id - 1];
                                if (i + 1 < ns) acc += cs_[id] * out[id + 1];
                                if (j > 0) acc += cth_[id - ns] * out[id - ns];
                                if (j + 1 < nth) acc += cth_[id] * out[id + ns];
                                if (l > 0) acc += ct_[id - ns * nth] * out[id - ns * nth];
                                if (l + 1 < nt) acc += ct_[id] * out[id + ns * nth];
                                out[id] = in[id] - acc / d_[id];
                            }
                        }
                    }
                }
        });
    }

    const SectorGrid& g_;
    std::vector<double> d_, cs_, cth_, ct_;
    mutable std::vector<double> u_;
};

// Preconditioned MINRES on the symmetrized system; apply_sym must be
// self-adjoint in the Euclidean inner product, prec SPD.
int pminres(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply_sym,
            const std::function<void(const std::vector<double>&, std::vector<double>&)>& prec,
            const std::vector<double>& b, std::vector<double>& x, double rtol, int maxit) {
    const std::size_t n = b.size();
    auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
        return s;
    };
    x.assign(n, 0.0);
    std::vector<double> r1 = b, r2 = b, y(n), v(n), w1(n, 0.0), w2(n, 0.0), tmp(n);
    prec(r1, y);
    double beta1 = dot(r1, y);
    if (beta1 <= 0.0) return 0;
    beta1 = std::sqrt(beta1);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0, oldeps = 0.0;
    int it = 0;
    for (it = 1; it <= maxit; ++it) {
        const double sinv = 1.0 / beta;
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i] * sinv;
        apply_sym(v, tmp);
        if (it >= 2)
            for (std::size_t i = 0; i < n; ++i) tmp[i] -= (beta / oldb) * r1[i];
        const double alfa = dot(v, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] -= (alfa / beta) * r2[i];
        r1 = r2;
        r2 = tmp;
        prec(r2, y);
        oldb = beta;
        double b2 = dot(r2, y);
        beta = b2 > 0.0 ? std::sqrt(b2) : 0.0;

        oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::sqrt(gbar * gbar + beta * beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        for (std::size_t i = 0; i < n; ++i) {
            const double wi = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            w1[i] = w2[i];
            w2[i] = wi;
            x[i] += phi * wi;
        }
        if (phibar <= rtol * beta1 || beta == 0.0) break;
    }
    return it;
}

} // namespace

DiscreteSolution newton_solve(const SectorGrid& grid, const RingConfig& cfg,
                              const CurvatureModel& model, const ProblemParams& p,
                              const SolverOptions& opts) {
    if (grid.k != cfg.k) throw std::invalid_argument("newton_solve: grid/config k mismatch");
    DiscreteSolution sol;
    sol.grid = grid;
    const DiscreteOperator A(grid);
    const std::size_t n = grid.size();
    ProblemParams pk = p;
    pk.k = cfg.k;
    const double mu = mu_of_k(pk);
    const double pm1 = p.two_star() - 1.0;

    // per-cell K values and double-star weights
    std::vector<double> Kv(n), wstar2(n), rho_over_mu(n);
    const double e2 = 0.5 * (grid.N + 2.0) + p.tau;
    for (std::size_t l = 0; l < grid.nt(); ++l)
        for (std::size_t j = 0; j < grid.nth(); ++j)
            for (std::size_t i = 0; i < grid.ns(); ++i) {
                const std::size_t id = grid.idx(i, j, l);
                const double rho =
                    std::sqrt(grid.s[i] * grid.s[i] + grid.t[l] * grid.t[l]);
                rho_over_mu[id] = rho / mu;
                Kv[id] = eval_K(model, rho / mu);
                double acc = 0.0;
                for (int jc = 1; jc <= cfg.k; ++jc) {
                    const double q2 = dist2_ring(cfg, jc, grid.s[i], grid.th[j], grid.t[l]);
                    acc += std::pow(1.0 + std::sqrt(q2), -e2);
                }
                wstar2[id] = acc;
            }

    std::vector<double> u = sample_ansatz(grid, cfg);
    const std::vector<double> W = u;
    sol.w_sup = *std::max_element(W.begin(), W.end());

    std::vector<double> R(n), Au(n), V(n), rhs(n), phi(n), sqw(n);
    for (std::size_t i = 0; i < n; ++i) sqw[i] = std::sqrt(A.cell_volume()[i]);
    const SsorPrec ssor(A, sqw);
    auto prec_apply = [&ssor](const std::vector<double>& r, std::vector<double>& z) {
        ssor.apply(r, z);
    };

    auto residual = [&](const std::vector<double>& uu, std::vector<double>& out) {
        A.apply(uu, out);
        for (std::size_t i = 0; i < n; ++i) {
            const double up = std::max(uu[i], 0.0);
            out[i] -= Kv[i] * std::pow(up, pm1);
        }
    };
    auto norm_w2 = [&](const std::vector<double>& v) { return std::sqrt(A.inner(v, v)); };

    residual(u, R);
    double res2 = norm_w2(R);
    sol.residual_history.push_back(res2);

    for (int iter = 0; iter < opts.max_newton; ++iter) {
        // weighted-sup convergence check
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, std::abs(R[i]) / wstar2[i]);
        sol.residual_norm = sup;
        sol.residual_w2 = res2;
        sol.newton_iters = iter;
        if (sup < opts.tol) {
            sol.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double up = std::max(u[i], 0.0);
            V[i] = pm1 * Kv[i] * (up > 0.0 ? std::pow(up, pm1 - 1.0) : 0.0);
        }
        // symmetrized Jacobian apply: D (A - V) D^{-1}
        auto apply_sym = [&](const std::vector<double>& xin, std::vector<double>& xout) {
            static thread_local std::vector<double> scratch;
            scratch.resize(n);
            for (std::size_t i = 0; i < n; ++i) scratch[i] = xin[i] / sqw[i];
            A.apply(scratch, xout);
            for (std::size_t i = 0; i < n; ++i)
                xout[i] = (xout[i] - V[i] * scratch[i]) * sqw[i];
        };
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -R[i] * sqw[i];
        pminres(apply_sym, prec_apply, rhs, phi, opts.lin_rtol, opts.max_lin_iters);
        for (std::size_t i = 0; i < n; ++i) phi[i] /= sqw[i];

        // backtracking on the weighted L2 residual
        double step = 1.0;
        bool accepted = false;
        std::vector<double> utry(n), Rtry(n);
        for (int ls = 0; ls < 25; ++ls) {
            for (std::size_t i = 0; i < n; ++i) utry[i] = u[i] + step * phi[i];
            residual(utry, Rtry);
            const double r2 = norm_w2(Rtry);
            if (r2 < res2 * (1.0 - 1e-4 * step) || r2 < opts.tol) {
                u.swap(utry);
                R.swap(Rtry);
                res2 = r2;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        sol.residual_history.push_back(res2);
        if (!accepted) {
            sol.failure = "line search stalled";
            break;
        }
    }
    if (!sol.converged && sol.failure.empty()) sol.failure = "max Newton iterations";

    sol.u = u;
    std::size_t clipped = 0;
    double omega = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] < 0.0) {
            ++clipped;
            positive = false;
        }
        omega = std::max(omega, std::abs(u[i] - W[i]));
    }
    sol.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
    sol.omega_sup = omega;
    sol.positive = positive;
    if (sol.converged && sol.clip_fraction > 0.01) {
        sol.converged = false;
        sol.failure = "positive-part clipping active on more than 1% of cells";
    }

    // multiplier analogue: residual projections on the discrete Z kernels
    {
        std::vector<double> Zr(n), Zl(n);
        for (std::size_t l = 0; l < grid.nt(); ++l)
            for (std::size_t j = 0; j < grid.nth(); ++j)
                for (std::size_t i = 0; i < grid.ns(); ++i) {
                    const std::size_t id = grid.idx(i, j, l);
                    double zr = 0.0, zl = 0.0;
                    for (int jc = 1; jc <= cfg.k; ++jc) {
                        const double q2 = dist2_ring(cfg, jc, grid.s[i], grid.th[j], grid.t[l]);
                        const double uj = bubble_value(cfg.N, cfg.lambda, q2);
                        const double lam2 = cfg.lambda * cfg.lambda;
                        const double ddr =
                            2.0 * cfg.r -
                            2.0 * grid.s[i] * std::cos(grid.th[j] - cfg.center_angle(jc));
                        zr += -0.5 * (cfg.N - 2) * lam2 * uj * ddr / (1.0 + lam2 * q2);
                        zl += bubble_dlambda(cfg.N, cfg.lambda, q2);
                    }
                    Zr[id] = zr;
                    Zl[id] = zl;
                }
        const double rn = norm_w2(R);
        const double zrn = norm_w2(Zr), zln = norm_w2(Zl);
        if (rn > 0.0 && zrn > 0.0) sol.c1_proj = std::abs(A.inner(R, Zr)) / (rn * zrn);
        if (rn > 0.0 && zln > 0.0) sol.c2_proj = std::abs(A.inner(R, Zl)) / (rn * zln);
    }
    return sol;
}

double kazdan_warner_defect(const DiscreteSolution& sol, const CurvatureModel& model,
                            const ProblemParams& p) {
    const SectorGrid& grid = sol.grid;
    ProblemParams pk = p;
    pk.k = grid.k;
    const double mu = mu_of_k(pk);
    const double two_star = p.two_star();
    const DiscreteOperator A(grid);
    const auto& w = A.cell_volume();
    std::vector<double> num_terms(grid.size()), den_terms(grid.size());
    for (std::size_t l = 0; l < grid.nt(); ++l)
        for (std::size_t j = 0; j < grid.nth(); ++j)
            for (std::size_t i = 0; i < grid.ns(); ++i) {
                const std::size_t id = grid.idx(i, j, l);
                const double rho = std::sqrt(grid.s[i] * grid.s[i] + grid.t[l] * grid.t[l]);
                const double kp = eval_K_derivative(model, rho / mu);
                const double upow = std::pow(std::max(sol.u[id], 0.0), two_star);
                const double core = (rho / mu) * upow * w[id];
                num_terms[id] = kp * core;
                den_terms[id] = std::abs(kp) * core;
            }
    const double num = pairwise_sum(num_terms);
    const double den = pairwise_sum(den_terms);
    if (den == 0.0) return 0.0; // K' == 0 identically
    return num / den;
}

} // namespace bt
