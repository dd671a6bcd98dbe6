#ifndef SEMVOX_MATHSTAT_HPP
#define SEMVOX_MATHSTAT_HPP

#include <cstddef>
#include <span>

namespace semvox {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF via erfc; relative error at double precision.
double norm_cdf(double x);

// Inverse of norm_cdf on (0, 1). Rational seed refined by a
// bracket-safeguarded Newton iteration on the CDF.
double norm_quantile(double p);

double mean(std::span<const double> xs);

// Population standard deviation (divide by N).
double population_sd(std::span<const double> xs);

} // namespace semvox

#endif
