#pragma once

#include <span>

namespace imin {

/// Sample Pearson correlation. Throws PreconditionError for fewer than two
/// points, unequal lengths or zero variance in either input.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);

/// Coefficient of determination of the least-squares line through (xs, ys).
double affine_r2(std::span<const double> xs, std::span<const double> ys);

}  // namespace imin
