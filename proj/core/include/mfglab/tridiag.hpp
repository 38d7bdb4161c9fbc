#pragma once

#include <vector>

namespace mfg {

/// Thomas algorithm for a tridiagonal system.
/// sub[i] multiplies x[i-1] in row i (sub[0] unused), sup[i] multiplies x[i+1]
/// (sup[n-1] unused). Requires a diagonally dominant system; no pivoting.
std::vector<double> solve_tridiag(const std::vector<double>& sub,
                                  const std::vector<double>& diag,
                                  const std::vector<double>& sup,
                                  const std::vector<double>& rhs);

} // namespace mfg
