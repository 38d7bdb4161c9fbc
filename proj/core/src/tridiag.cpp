#include "mfglab/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace mfg {

std::vector<double> solve_tridiag(const std::vector<double>& sub,
                                  const std::vector<double>& diag,
                                  const std::vector<double>& sup,
                                  const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiag: band sizes differ");
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c[i - 1];
        if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
        c[i] = sup[i] / piv;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace mfg
