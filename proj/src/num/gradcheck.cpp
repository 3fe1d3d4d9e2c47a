#include "covdiff/num/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covdiff::num {

double grad_check_coord(const ScalarFn& f, std::span<const double> point,
                        double analytic, std::size_t index, double probe_eps) {
    if (index >= point.size()) throw std::invalid_argument("grad_check_coord: index out of range");
    std::vector<double> p(point.begin(), point.end());
    const double x0 = p[index];
    p[index] = x0 + probe_eps;
    const double fp = f(p);
    p[index] = x0 - probe_eps;
    const double fm = f(p);
    const double numeric = (fp - fm) / (2.0 * probe_eps);
    const double denom = std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
    return std::fabs(analytic - numeric) / denom;
}

double grad_check(const ScalarFn& f, std::span<const double> point,
                  std::span<const double> analytic_grad, double probe_eps) {
    if (point.size() != analytic_grad.size())
        throw std::invalid_argument("grad_check: gradient length mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i)
        worst = std::max(worst, grad_check_coord(f, point, analytic_grad[i], i, probe_eps));
    return worst;
}

double grad_check_coords(const ScalarFn& f, std::span<const double> point,
                         std::span<const double> analytic_grad,
                         std::span<const std::size_t> indices, double probe_eps) {
    double worst = 0.0;
    for (std::size_t i : indices)
        worst = std::max(worst, grad_check_coord(f, point, analytic_grad[i], i, probe_eps));
    return worst;
}

}  // namespace covdiff::num
