#ifndef WAMG_VEC_HPP
#define WAMG_VEC_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wamg {

/// Dense real vector. All kernels in the library use this alias.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

/// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vec& x, double alpha) {
    for (double& v : x) v *= alpha;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require_finite(const Vec& v, const std::string& what) {
    if (!all_finite(v)) throw std::runtime_error(what + ": non-finite entries");
}

inline void require_same_size(std::size_t a, std::size_t b, const std::string& what) {
    if (a != b)
        throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
}

} // namespace wamg

#endif
