#pragma once

namespace hsvol {

/// P(X > statistic) for X ~ chi-square(df); 1 for statistic <= 0.
double chi_square_survival(double statistic, double df);

} // namespace hsvol
