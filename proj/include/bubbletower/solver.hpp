#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bubbletower/bubble.hpp"
#include "bubbletower/params.hpp"

namespace bt {

// Cell-centered tensor grid on [0,R]x[0,pi/k]x[0,R] in (s, theta, t), graded
// toward the bubble core at (r, 0, 0).  Evenness in theta closes both theta
// faces with zero flux; s = 0 and t = 0 are natural axes of the volume
// weight; the outer faces carry the tail-matched Robin condition
// du/dn + (N-2) u n.y/rho^2 = 0.
struct GridSpec {
    double resolution = 8.0;     // cells per unit 1/lambda at the core
    double core_halfwidth = 4.0; // graded region half-width, units of 1/lambda
    double growth = 1.15;
    double R_factor = 4.0;       // R_max = R_factor * ring radius
};

struct SectorGrid {
    int N = 5, k = 1;
    double ring_r = 1.0, lambda = 1.0, R_max = 1.0;
    std::vector<double> sf, thf, tf; // faces
    std::vector<double> s, th, t;    // centers

    static SectorGrid build(int k, int N, double ring_r, double lambda,
                            const GridSpec& spec = {});
    std::size_t ns() const { return s.size(); }
    std::size_t nth() const { return th.size(); }
    std::size_t nt() const { return t.size(); }
    std::size_t size() const { return ns() * nth() * nt(); }
    std::size_t idx(std::size_t i, std::size_t j, std::size_t l) const {
        return i + ns() * (j + nth() * l); // s-fastest
    }
};

// A u = -Delta_h u in flux form; self-adjoint in the cell-volume inner
// product (weight s t^{N-3} per cell).
class DiscreteOperator {
  public:
    explicit DiscreteOperator(const SectorGrid& grid);

    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    const std::vector<double>& cell_volume() const { return w_; }
    const std::vector<double>& diagonal() const { return diag_; }
    const std::vector<double>& trans_s() const { return ts_; }
    const std::vector<double>& trans_th() const { return tth_; }
    const std::vector<double>& trans_t() const { return tt_; }
    const SectorGrid& grid() const { return grid_; }

    double inner(const std::vector<double>& a, const std::vector<double>& b) const;

  private:
    SectorGrid grid_;
    std::vector<double> w_;         // s ds dth t^2 dt per cell
    std::vector<double> ts_, tth_, tt_; // "hi"-face transmissibilities
    std::vector<double> robin_;     // diagonal Robin contributions (weighted)
    std::vector<double> diag_;
};

struct SolverOptions {
    double tol = 1e-9;          // weighted-sup residual target
    int max_newton = 30;
    double lin_rtol = 1e-8;
    int max_lin_iters = 4000;
};

struct DiscreteSolution {
    SectorGrid grid;
    std::vector<double> u;
    double residual_norm = 0.0; // sup |A u - K u_+^{2*-1}| / double-star weight
    double residual_w2 = 0.0;
    double omega_sup = 0.0;     // sup |u - W_r|
    double w_sup = 0.0;         // sup W_r
    int newton_iters = 0;
    bool converged = false;
    double clip_fraction = 0.0; // cells with u < 0 at the end
    double c1_proj = 0.0, c2_proj = 0.0; // |<R,Z>|/(|R||Z|) in the grid metric
    bool positive = false;
    std::vector<double> residual_history;
    std::string failure;
};

DiscreteSolution newton_solve(const SectorGrid& grid, const RingConfig& cfg,
                              const CurvatureModel& model, const ProblemParams& p,
                              const SolverOptions& opts = {});

// Radial Kazdan-Warner defect of a converged state:
//   int K'(rho/mu) (rho/mu) u^{2*} / int |K'(rho/mu)| (rho/mu) u^{2*}
// exactly zero when K' == 0.
double kazdan_warner_defect(const DiscreteSolution& sol, const CurvatureModel& model,
                            const ProblemParams& p);

// W_r sampled at cell centers.
std::vector<double> sample_ansatz(const SectorGrid& grid, const RingConfig& cfg);

} // namespace bt
