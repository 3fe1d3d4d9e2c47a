// The full learnable policy: geometry encoder + state encoder + FiLM
// denoiser over one parameter store, plus the composed forward/backward of
// the masked noise objective used by the training loop and the gradient
// checks.
#pragma once

#include <cstdint>
#include <memory>

#include "covdiff/diffusion/ddim.hpp"
#include "covdiff/policy/denoiser.hpp"
#include "covdiff/policy/encoders.hpp"

namespace covdiff::policy {

enum class Conditioning : std::uint8_t {
    previous = 0,  // condition on the preceding poses
    zero = 1,      // state encoder fed an all-zero history
    none = 2,      // state half of the condition forced to zero
};

Conditioning conditioning_from_string(const std::string& s);
std::string to_string(Conditioning c);

struct PolicyConfig {
    GeometryEncoderConfig geo;
    StateEncoderConfig state;
    DenoiserConfig den;
    Conditioning conditioning = Conditioning::previous;
    std::size_t diffusion_steps = 100;
};

class Policy {
public:
    Policy(const PolicyConfig& cfg, std::uint64_t init_seed);

    const PolicyConfig& config() const { return cfg_; }
    num::ParamStore& params() { return store_; }
    const num::ParamStore& params() const { return store_; }
    GeometryEncoder& geometry() { return *geo_; }
    StateEncoder& state_encoder() { return *state_; }
    FilmDenoiser& denoiser() { return *den_; }
    const GeometryEncoder& geometry() const { return *geo_; }
    const StateEncoder& state_encoder() const { return *state_; }
    const FilmDenoiser& denoiser() const { return *den_; }

    // Single-sample noise prediction eps_hat = f(x_k, k, c).
    std::vector<double> denoise(std::span<const double> x, std::size_t k,
                                std::span<const double> condition) const;

    diffusion::DenoiseFn denoise_fn() const;

private:
    PolicyConfig cfg_;
    num::ParamStore store_;
    std::unique_ptr<GeometryEncoder> geo_;
    std::unique_ptr<StateEncoder> state_;
    std::unique_ptr<FilmDenoiser> den_;
};

// One training batch, with point clouds shared between items of the same
// object so the geometry encoder runs once per object.
struct TrainingBatch {
    struct Item {
        std::size_t object = 0;          // index into clouds
        std::vector<double> history;     // flattened, length = state in_dim
        std::vector<double> x0;          // [H*6], zero under mask 0
        std::vector<std::uint8_t> mask;  // [H]
        std::size_t k = 1;
        std::vector<double> eps;         // [H*6]
        bool drop_condition = false;
    };
    std::vector<num::Mat> clouds;  // per object [N x 3], normalized coords
    std::vector<Item> items;
};

// Mean masked noise loss over the batch (forward only).
double policy_loss(const Policy& policy, const TrainingBatch& batch,
                   const diffusion::NoiseSchedule& schedule);

// Forward + backward; zeroes stored gradients first, accumulates the batch
// gradient, returns the loss.
double policy_loss_and_grad(Policy& policy, const TrainingBatch& batch,
                            const diffusion::NoiseSchedule& schedule);

}  // namespace covdiff::policy
