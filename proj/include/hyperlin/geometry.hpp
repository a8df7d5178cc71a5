#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hyperlin {

// Planar points and 2x2 matrices. The norm used throughout is the max norm
// |x| = max(|x1|,|x2|); the induced operator norm is the max row sum.

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2() = default;
    Vec2(double a, double b) : x1(a), x2(b) {}

    Vec2 operator+(const Vec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
    Vec2 operator-(const Vec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
    Vec2 operator*(double c) const { return {c * x1, c * x2}; }
};

inline Vec2 operator*(double c, const Vec2& v) { return v * c; }

inline double max_norm(const Vec2& v) {
    return std::max(std::abs(v.x1), std::abs(v.x2));
}

struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x1 + a12 * v.x2, a21 * v.x1 + a22 * v.x2};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double c) const { return {c * a11, c * a12, c * a21, c * a22}; }

    double det() const { return a11 * a22 - a12 * a21; }

    Mat2 inverse() const {
        const double d = det();
        if (d == 0.0) throw std::domain_error("Mat2::inverse: singular matrix");
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
};

// Operator norm induced by the max norm.
inline double op_norm(const Mat2& m) {
    return std::max(std::abs(m.a11) + std::abs(m.a12),
                    std::abs(m.a21) + std::abs(m.a22));
}

// Square grid [-radius, radius]^2 with n samples per axis (n odd keeps the
// origin and the axes on the grid).
struct GridSpec {
    double radius = 0.05;
    int n = 101;

    double spacing() const { return 2.0 * radius / (n - 1); }
    double coord(int i) const { return -radius + spacing() * i; }
    Vec2 point(int i, int j) const { return {coord(i), coord(j)}; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * n + j;
    }
    void validate() const {
        if (n < 3) throw std::invalid_argument("grid: need n >= 3");
        if (n % 2 == 0) throw std::invalid_argument("grid: n must be odd");
        if (!(radius > 0)) throw std::invalid_argument("grid: radius must be > 0");
    }
};

namespace detail {

template <class T>
struct Field2D {
    GridSpec grid;
    std::vector<T> values;  // row-major, index = i*n + j

    Field2D() = default;
    explicit Field2D(const GridSpec& g) : grid(g), values(g.size()) {}

    T& at(int i, int j) { return values[grid.index(i, j)]; }
    const T& at(int i, int j) const { return values[grid.index(i, j)]; }

    bool contains(const Vec2& p) const {
        return std::abs(p.x1) <= grid.radius && std::abs(p.x2) <= grid.radius;
    }

    // Piecewise-bilinear interpolation. Values are only C^1-ish in this
    // artifact, so higher order is unjustified.
    T interpolate(const Vec2& p) const {
        if (!contains(p))
            throw std::domain_error("Field2D::interpolate: point outside grid");
        const double h = grid.spacing();
        double s = (p.x1 + grid.radius) / h;
        double t = (p.x2 + grid.radius) / h;
        int i = std::min(static_cast<int>(s), grid.n - 2);
        int j = std::min(static_cast<int>(t), grid.n - 2);
        double u = s - i, v = t - j;
        return at(i, j) * ((1 - u) * (1 - v)) + at(i + 1, j) * (u * (1 - v)) +
               at(i, j + 1) * ((1 - u) * v) + at(i + 1, j + 1) * (u * v);
    }
};

}  // namespace detail

using ScalarField2D = detail::Field2D<double>;
using VectorField2D = detail::Field2D<Vec2>;
using MatrixField2D = detail::Field2D<Mat2>;

}  // namespace hyperlin
