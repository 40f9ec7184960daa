#pragma once

#include <span>
#include <vector>

namespace bt {

// Symmetry-reduced coordinates: s = |y'|, theta = angle relative to the
// nearest ring center, t = |y''|.
struct SectorPoint {
    double s = 0.0;
    double theta = 0.0;
    double t = 0.0;
};

// 1-based sector index: the j maximizing <y'/|y'|, x_j/|x_j|>, ties broken
// toward smaller j.  y' = 0 belongs to every sector; returns 1.
int sector_index(std::span<const double> y, int k);

SectorPoint reduce_point(std::span<const double> y, int k);
std::vector<double> lift_point(const SectorPoint& p, int j, int k, int N);

// Coefficients of the reduced Laplacian
//   Delta = d_ss + (1/s) d_s + (1/s^2) d_thth + d_tt + ((N-3)/t) d_t
// acting on H_s-symmetric functions.
struct LaplacianCoeffs {
    double c_ss = 1.0;
    double c_s = 0.0;
    double c_thth = 0.0;
    double c_tt = 1.0;
    double c_t = 0.0;
    bool on_axis = false; // s == 0 or t == 0 flagged for one-sided handling
};

LaplacianCoeffs laplacian_coefficients(const SectorPoint& p, int N);

// s t^{N-3} |S^{N-3}|, the volume weight of the reduced coordinates.
double sector_volume_weight(double s, double t, int N);

} // namespace bt
