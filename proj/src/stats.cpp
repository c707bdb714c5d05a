#include "qmicro/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qmicro {

namespace {

double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cont_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cont_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_cont_fraction(a, x);
}

double chi2_cdf(double x, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pvalue(double stat, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_pvalue: dof must be >= 1");
    if (stat <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * stat);
}

double chi2_quantile(double p, int dof) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("chi2_quantile: p outside [0,1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 100.0;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double ks_pvalue(double d_stat, std::size_t n) {
    if (d_stat <= 0.0) return 1.0;
    double sn = std::sqrt(static_cast<double>(n));
    double lambda = (sn + 0.12 + 0.11 / sn) * d_stat;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    double p = 2.0 * sum;
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace qmicro
