#include "hyperlin/numerics.hpp"

namespace hyperlin::num {

namespace {

double simpson_panel(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_panel(a, fa, m, fm, flm);
    const double right = simpson_panel(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson_panel(a, fa, b, fb, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double solve_bracketed(const std::function<double(double)>& f, double lo,
                       double hi, double tol, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw NumericError("solve_bracketed: endpoints do not straddle zero");
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0) == (fhi > 0)) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    // one secant refinement inside the final bracket
    if (fhi != flo) {
        double s = lo - flo * (hi - lo) / (fhi - flo);
        if (s > lo && s < hi) return s;
    }
    return 0.5 * (lo + hi);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw NumericError("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericError("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    const double sstot = syy - sy * sy / n;
    if (sstot > 0) {
        double ssres = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = y[i] - (out.slope * x[i] + out.intercept);
            ssres += e * e;
        }
        out.r2 = 1.0 - ssres / sstot;
    }
    return out;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw NumericError("quantile: empty sample");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double u = pos - i;
    return v[i] * (1 - u) + v[i + 1] * u;
}

double fit_tail_ratio(const std::vector<double>& seq, int tail) {
    std::vector<double> xs, ys;
    const int n = static_cast<int>(seq.size());
    for (int i = std::max(0, n - tail); i < n; ++i) {
        if (seq[i] > 0) {
            xs.push_back(static_cast<double>(i));
            ys.push_back(std::log(seq[i]));
        }
    }
    if (xs.size() < 2) return 0.0;  // sequence already hit zero: treat as instant decay
    return std::exp(fit_line(xs, ys).slope);
}

}  // namespace hyperlin::num
