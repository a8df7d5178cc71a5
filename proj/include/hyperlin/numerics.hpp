#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperlin {

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace num {

// Adaptive Simpson quadrature.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 60);

// Composite Simpson over n uniform panels (n made even internally).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Bracketed root solve: monotone bisection refined by a secant step.
// f(lo) and f(hi) must straddle zero.
double solve_bracketed(const std::function<double(double)>& f, double lo,
                       double hi, double tol, int max_iter = 200);

// Least-squares line y = slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double quantile(std::vector<double> v, double q);

// Geometric decay ratio fitted on the tail of a positive sequence; returns
// exp(slope of log values). Zero entries end the usable tail.
double fit_tail_ratio(const std::vector<double>& seq, int tail = 10);

// Uniform-grid piecewise-linear interpolation on [-radius, radius].
struct LinearInterp {
    double radius = 0.0;
    std::vector<double> y;

    double spacing() const { return 2.0 * radius / (y.size() - 1); }
    double coord(std::size_t i) const { return -radius + spacing() * i; }

    // Out-of-range arguments clamp to the boundary values; call sites that
    // require compact support store zeros at the ends.
    double operator()(double s) const {
        if (y.size() < 2) throw NumericError("LinearInterp: empty table");
        const double h = spacing();
        double t = (s + radius) / h;
        if (t <= 0) return y.front();
        if (t >= static_cast<double>(y.size() - 1)) return y.back();
        std::size_t i = static_cast<std::size_t>(t);
        double u = t - i;
        return y[i] * (1 - u) + y[i + 1] * u;
    }
};

}  // namespace num
}  // namespace hyperlin
