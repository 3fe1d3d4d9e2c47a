#include "covdiff/num/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace covdiff::num {

AdamState::AdamState(const ParamStore& store) {
    m_.reserve(store.count());
    v_.reserve(store.count());
    for (std::size_t i = 0; i < store.count(); ++i) {
        m_.emplace_back(store[i].value.rows, store[i].value.cols);
        v_.emplace_back(store[i].value.rows, store[i].value.cols);
    }
}

void AdamState::step(ParamStore& store, const AdamConfig& cfg) {
    if (store.count() != m_.size()) throw std::invalid_argument("AdamState: store layout changed");
    if (cfg.lr <= 0.0) throw std::invalid_argument("AdamState: lr must be > 0");
    for (std::size_t i = 0; i < store.count(); ++i)
        if (!all_finite(store[i].grad))
            throw std::invalid_argument("adam_step: non-finite gradient in " + store[i].name);

    t_ += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < store.count(); ++i) {
        Mat& p = store[i].value;
        const Mat& g = store[i].grad;
        Mat& m = m_[i];
        Mat& v = v_[i];
        for (std::size_t j = 0; j < p.data.size(); ++j) {
            m.data[j] = cfg.beta1 * m.data[j] + (1.0 - cfg.beta1) * g.data[j];
            v.data[j] = cfg.beta2 * v.data[j] + (1.0 - cfg.beta2) * g.data[j] * g.data[j];
            double mhat = m.data[j] / c1;
            double vhat = v.data[j] / c2;
            p.data[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace covdiff::num
