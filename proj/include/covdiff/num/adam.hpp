#pragma once

#include "covdiff/num/tensor.hpp"

namespace covdiff::num {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a ParamStore. m/v mirror the store's tensor
// shapes; t increments by exactly one per step() call.
class AdamState {
public:
    explicit AdamState(const ParamStore& store);

    // Reads tensor.grad, updates tensor.value in place.
    // Throws std::invalid_argument naming the tensor on a non-finite gradient.
    void step(ParamStore& store, const AdamConfig& cfg);

    long long step_count() const { return t_; }

private:
    std::vector<Mat> m_;
    std::vector<Mat> v_;
    long long t_ = 0;
};

}  // namespace covdiff::num
