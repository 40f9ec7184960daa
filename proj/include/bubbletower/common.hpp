#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bt {

inline constexpr double kPi = 3.14159265358979323846;

// Surface area |S^{dim-1}| of the unit sphere in R^dim.
double sphere_area(int dim);

double pow_int(double x, long long n);

// Exponent arithmetic for the scaling law is kept in exact rationals;
// doubles drift once mu ~ k^3 identities are chained.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<=(const Rational& o) const;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Thread cap: min(hardware, BUBBLETOWER_THREADS if set).
int max_threads();

// Static chunking; results must be written to pre-assigned slots so the
// final reduction order does not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

double pairwise_sum(std::span<const double> xs);

// Deterministic uniform stream independent of the standard library's
// distribution implementations.
class UniformRng {
  public:
    explicit UniformRng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next_u64();
    double next_double();                     // [0, 1)
    double next_double(double lo, double hi); // [lo, hi)

  private:
    std::uint64_t state_;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
};

// Least-squares line through (x_i, y_i).
FitResult fit_line(std::span<const double> x, std::span<const double> y);

} // namespace bt
