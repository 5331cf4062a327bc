#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geovi/errors.hpp"

namespace geovi {

// Dense real vector.  All public operations require finite entries; the
// checks live at module boundaries (operator application, solver entry),
// not on every arithmetic helper.
using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require_finite(const Vec& v, const char* where) {
    if (!all_finite(v)) throw NonFiniteValue(std::string(where) + ": non-finite entry");
}

inline void require_dim(const Vec& v, std::size_t n, const char* where) {
    if (v.size() != n)
        throw DimensionMismatch(std::string(where) + ": expected length " + std::to_string(n) +
                                ", got " + std::to_string(v.size()));
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec scaled(const Vec& x, double alpha) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
    return y;
}

inline Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("add: size mismatch");
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("sub: size mismatch");
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline Vec concat(const Vec& a, const Vec& b) {
    Vec c;
    c.reserve(a.size() + b.size());
    c.insert(c.end(), a.begin(), a.end());
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

inline double max_abs(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

inline double mean(const Vec& a) {
    if (a.empty()) return 0.0;
    double s = 0.0;
    for (double x : a) s += x;
    return s / static_cast<double>(a.size());
}

}  // namespace geovi
