// Central-difference verification of analytic gradients.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace covdiff::num {

using ScalarFn = std::function<double(std::span<const double>)>;

// Relative error of one coordinate: |analytic - central difference| divided
// by max(1e-8, |analytic| + |numeric|). The function must be smooth within
// probe_eps of the point.
double grad_check_coord(const ScalarFn& f, std::span<const double> point,
                        double analytic, std::size_t index, double probe_eps);

// Max relative error over all coordinates.
double grad_check(const ScalarFn& f, std::span<const double> point,
                  std::span<const double> analytic_grad, double probe_eps = 1e-5);

// Max relative error over an explicit coordinate subset (for models too large
// to probe exhaustively).
double grad_check_coords(const ScalarFn& f, std::span<const double> point,
                         std::span<const double> analytic_grad,
                         std::span<const std::size_t> indices, double probe_eps = 1e-5);

}  // namespace covdiff::num
