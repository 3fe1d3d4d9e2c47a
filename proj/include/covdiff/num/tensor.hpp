// Named parameter tensors with paired gradient buffers. The store owns every
// learnable tensor of a model; Adam and the checkpoint writer iterate it in
// registration order, which fixes the init RNG draw order and the file layout.
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "covdiff/num/mat.hpp"
#include "covdiff/num/rng.hpp"

namespace covdiff::num {

struct Tensor {
    std::string name;
    Mat value;
    Mat grad;  // same shape as value
};

class ParamStore {
public:
    Tensor& add(const std::string& name, std::size_t rows, std::size_t cols);
    Tensor& add_vector(const std::string& name, std::size_t n) { return add(name, 1, n); }

    Tensor* find(const std::string& name);
    const Tensor* find(const std::string& name) const;

    std::size_t count() const { return tensors_.size(); }
    Tensor& operator[](std::size_t i) { return *tensors_[i]; }
    const Tensor& operator[](std::size_t i) const { return *tensors_[i]; }

    void zero_grads();

    std::size_t total_size() const;
    // Flat views in registration order, used by the finite-difference checks.
    std::vector<double> values_flat() const;
    std::vector<double> grads_flat() const;
    void set_values_flat(std::span<const double> v);

private:
    std::vector<std::unique_ptr<Tensor>> tensors_;  // stable addresses
};

// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawn row-major.
void init_uniform_fan_in(Tensor& t, std::size_t fan_in, Rng& rng);

}  // namespace covdiff::num
