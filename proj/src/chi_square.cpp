#include "hsvol/chi_square.hpp"

#include "hsvol/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace hsvol {

double chi_square_survival(double statistic, double df) {
    if (!(df > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "chi-square degrees of freedom must be positive");
    }
    if (std::isnan(statistic)) {
        throw Error(ErrorKind::NumericalFailure, "chi-square statistic is NaN");
    }
    if (statistic <= 0.0) {
        return 1.0;
    }
    if (std::isinf(statistic)) {
        return 0.0;
    }
    return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

} // namespace hsvol
