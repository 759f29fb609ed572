#include "hcinv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

// Boost 1.74's pchip calls isnan unqualified; make it visible at definition.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

namespace hcinv {

double normal_cdf(double x) {
    if (std::isnan(x)) return x;
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

double simpson_rec(const RealFn& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, double& err_acc, bool& ok) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (std::abs(diff) <= 15.0 * tol) {
        err_acc += std::abs(diff) / 15.0;
        return left + right + diff / 15.0;
    }
    if (depth <= 0) {
        ok = false;
        err_acc += std::abs(diff) / 15.0;
        return left + right + diff / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc, ok) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc, ok);
}

}  // namespace

double integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
    if (!(spec.abs_tol > 0) || spec.max_depth < 1)
        throw std::invalid_argument("integrate: abs_tol > 0 and max_depth >= 1 required");
    if (!(a <= b)) throw std::invalid_argument("integrate: a <= b required");
    if (a == b) return 0.0;

    if (spec.method == QuadratureMethod::Trapezoid) {
        double h = b - a;
        double est = 0.5 * h * (f(a) + f(b));
        long n = 1;
        for (int level = 0; level < spec.max_depth; ++level) {
            double mid = 0.0;
            for (long i = 0; i < n; ++i) mid += f(a + (i + 0.5) * h);
            const double next = 0.5 * est + 0.5 * h * mid;
            h *= 0.5;
            n *= 2;
            const double change = std::abs(next - est);
            est = next;
            // the error of the finer estimate is about a third of the change
            if (level >= 2 && change / 3.0 <= spec.abs_tol) return est;
        }
        throw NumericsError("integrate: trapezoid did not converge", est, std::abs(est));
    }

    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double err = 0.0;
    bool ok = true;
    const double val = simpson_rec(f, a, b, fa, fm, fb, whole, spec.abs_tol, spec.max_depth, err, ok);
    if (!ok) throw NumericsError("integrate: adaptive Simpson hit max_depth", val, err);
    return val;
}

double find_root(const RealFn& f, const BracketSpec& spec) {
    if (!(spec.lo < spec.hi) || !(spec.tol > 0))
        throw std::invalid_argument("find_root: lo < hi and tol > 0 required");
    double lo = spec.lo, hi = spec.hi;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw BracketError("find_root: no sign change on bracket", lo, hi, flo, fhi);
    for (int it = 0; it < spec.max_iter && hi - lo > spec.tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (fhi > 0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

double find_root_fast(const RealFn& f, const BracketSpec& spec) {
    if (!(spec.lo < spec.hi) || !(spec.tol > 0))
        throw std::invalid_argument("find_root_fast: lo < hi and tol > 0 required");
    const double flo = f(spec.lo), fhi = f(spec.hi);
    if (flo == 0.0) return spec.lo;
    if (fhi == 0.0) return spec.hi;
    if ((flo > 0) == (fhi > 0))
        throw BracketError("find_root_fast: no sign change on bracket", spec.lo, spec.hi, flo, fhi);
    const double tol = spec.tol;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    std::uintmax_t iters = static_cast<std::uintmax_t>(spec.max_iter);
    auto r = boost::math::tools::toms748_solve(f, spec.lo, spec.hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

ScalarMin minimize_scalar(const RealFn& f, double lo, double hi, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    if (!std::isfinite(fc) || !std::isfinite(fd))
        throw NumericsError("minimize_scalar: non-finite objective", 0.5 * (a + b), b - a);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        if (!std::isfinite(fc) || !std::isfinite(fd))
            throw NumericsError("minimize_scalar: non-finite objective", 0.5 * (a + b), b - a);
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

const GaussRule& gauss12() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 12>;
        GaussRule g{};
        const auto& xa = G::abscissa();
        const auto& wa = G::weights();
        // boost stores the nonnegative half; 12 is even so there is no zero node
        for (std::size_t i = 0; i < 6; ++i) {
            g.x[i] = -xa[5 - i];
            g.w[i] = wa[5 - i];
            g.x[11 - i] = xa[5 - i];
            g.w[11 - i] = wa[5 - i];
        }
        return g;
    }();
    return rule;
}

MonotoneInterp::MonotoneInterp(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2)
        throw std::invalid_argument("MonotoneInterp: need at least two matching knots");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneInterp: knots must increase");
    if (x_.size() >= 4) {
        auto xs = x_;
        auto ys = y_;
        auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::move(xs), std::move(ys));
        cubic_ = std::make_shared<const std::function<double(double)>>(
            [p](double v) { return (*p)(v); });
    }
}

double MonotoneInterp::operator()(double v) const {
    if (v <= x_.front()) return y_.front();
    if (v >= x_.back()) return y_.back();
    if (cubic_) return (*cubic_)(v);
    const std::size_t i = bracket_index(x_, v);
    const double w = (v - x_[i]) / (x_[i + 1] - x_[i]);
    return (1 - w) * y_[i] + w * y_[i + 1];
}

std::size_t bracket_index(const std::vector<double>& x, double v) {
    if (x.size() < 2) return 0;
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
}

}  // namespace hcinv
