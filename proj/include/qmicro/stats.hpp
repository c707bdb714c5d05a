#pragma once

#include <cstddef>

namespace qmicro {

/// Lower regularized incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, int dof);

/// Survival probability of a chi-square statistic.
double chi2_pvalue(double stat, int dof);

double chi2_quantile(double p, int dof);

/// Asymptotic Kolmogorov-Smirnov p-value for statistic d at sample size n.
double ks_pvalue(double d_stat, std::size_t n);

}  // namespace qmicro
