#pragma once

#include <span>
#include <vector>

namespace bt {

// Aubin-Talenti bubble U_{x,Lambda}(y) = (N(N-2))^{(N-2)/4} (Lambda/(1+Lambda^2|y-x|^2))^{(N-2)/2}.
struct Bubble {
    std::vector<double> center;
    double lambda = 1.0;
    int dim() const { return static_cast<int>(center.size()); }
};

// Kernel on the squared distance; this is the hot path shared by quadrature,
// norms and the grid solver.  Switches to log form once lambda^2 rho^2 is
// large enough that the direct power underflows prematurely.
double bubble_value(int N, double lambda, double dist2);
double bubble_value_pow(int N, double lambda, double dist2, double p_exp); // U^p
double bubble_dlambda(int N, double lambda, double dist2);                 // dU/dLambda

double eval_bubble(const Bubble& b, std::span<const double> y);

enum class ZKind { radial, lambda };

// Z_{i,1}: derivative of U in the center position along center/|center|
// (the ring-radius direction); Z_{i,2}: derivative in Lambda.
double eval_Z(const Bubble& b, ZKind which, std::span<const double> y);

// k bubbles on a polygon of radius r in the y' plane, common height Lambda.
struct RingConfig {
    int N = 5;
    int k = 1;
    double r = 1.0;
    double lambda = 1.0;

    double center_angle(int j) const; // j is 1-based
    std::vector<std::vector<double>> centers() const;
};

std::vector<std::vector<double>> ring_centers(int k, double r, int N);

double eval_W(const RingConfig& cfg, std::span<const double> y);

// Reduced coordinates (s = |y'|, theta measured in the y' plane, t = |y''|).
double dist2_ring(const RingConfig& cfg, int j, double s, double theta, double t);
double eval_W_reduced(const RingConfig& cfg, double s, double theta, double t);

} // namespace bt
