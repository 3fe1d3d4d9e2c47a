#include "covdiff/num/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::num {

Tensor& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
    if (find(name)) throw std::invalid_argument("ParamStore: duplicate tensor name " + name);
    auto t = std::make_unique<Tensor>();
    t->name = name;
    t->value = Mat(rows, cols);
    t->grad = Mat(rows, cols);
    tensors_.push_back(std::move(t));
    return *tensors_.back();
}

Tensor* ParamStore::find(const std::string& name) {
    for (auto& t : tensors_)
        if (t->name == name) return t.get();
    return nullptr;
}

const Tensor* ParamStore::find(const std::string& name) const {
    for (auto& t : tensors_)
        if (t->name == name) return t.get();
    return nullptr;
}

void ParamStore::zero_grads() {
    for (auto& t : tensors_) t->grad.fill(0.0);
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (auto& t : tensors_) n += t->value.size();
    return n;
}

std::vector<double> ParamStore::values_flat() const {
    std::vector<double> out;
    out.reserve(total_size());
    for (auto& t : tensors_) out.insert(out.end(), t->value.data.begin(), t->value.data.end());
    return out;
}

std::vector<double> ParamStore::grads_flat() const {
    std::vector<double> out;
    out.reserve(total_size());
    for (auto& t : tensors_) out.insert(out.end(), t->grad.data.begin(), t->grad.data.end());
    return out;
}

void ParamStore::set_values_flat(std::span<const double> v) {
    if (v.size() != total_size())
        throw std::invalid_argument("set_values_flat: size " + std::to_string(v.size()) + " vs " + std::to_string(total_size()));
    std::size_t off = 0;
    for (auto& t : tensors_) {
        std::copy(v.begin() + off, v.begin() + off + t->value.size(), t->value.data.begin());
        off += t->value.size();
    }
}

void init_uniform_fan_in(Tensor& t, std::size_t fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& v : t.value.data) v = rng.uniform(-bound, bound);
}

}  // namespace covdiff::num
