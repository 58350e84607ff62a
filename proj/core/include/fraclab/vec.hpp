#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace fraclab {

/// Maximum spatial dimension handled by the library.
inline constexpr int kMaxDim = 8;

/// Fixed-capacity point/vector in R^N with the runtime dimension embedded.
/// Cheap to copy; all arithmetic is dimension-checked in debug builds only.
struct Vec {
    std::array<double, kMaxDim> c{};
    int dim = 0;

    Vec() = default;
    explicit Vec(int n) : dim(n) {}
    Vec(std::initializer_list<double> xs) {
        dim = static_cast<int>(xs.size());
        int i = 0;
        for (double v : xs) c[i++] = v;
    }

    static Vec zero(int n) { return Vec(n); }

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double a) {
        for (int i = 0; i < dim; ++i) c[i] *= a;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    friend double dot(const Vec& a, const Vec& b) {
        double r = 0;
        for (int i = 0; i < a.dim; ++i) r += a.c[i] * b.c[i];
        return r;
    }
    double norm2() const { return dot(*this, *this); }
    double norm() const { return std::sqrt(norm2()); }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim != b.dim) return false;
        for (int i = 0; i < a.dim; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
};

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Unit vector for a planar angle (N = 2).
inline Vec unit2(double theta) { return Vec{std::cos(theta), std::sin(theta)}; }

}  // namespace fraclab
