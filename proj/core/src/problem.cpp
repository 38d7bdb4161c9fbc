#include "mfglab/problem.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

double suggested_truncation(double support_radius, double drift_lo, double drift_hi,
                            double sigma_max, double horizon) {
    const double drift_reach = std::max(std::abs(drift_lo), std::abs(drift_hi)) * horizon;
    return support_radius + drift_reach + 6.0 * sigma_max * std::sqrt(horizon);
}

} // namespace mfg
