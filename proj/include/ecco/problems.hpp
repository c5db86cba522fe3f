#pragma once

// Test-function catalog with analytic gradients and Hessians, the scalar
// demo quadratic, and a small batched MLP classification problem. Every
// declared minimum is verified at construction (gradient norm <= 1e-8,
// value within 1e-10 of the recorded one).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecco/core.hpp"

namespace ecco {

/// Problems by name: rosenbrock, himmelblau, booth, three_hump, rastrigin
/// (any n, default 2), ext_wood (n multiple of 4, default 8),
/// demo_quadratic, toy_mlp (dim fixed at 42; n selects the RNG seed).
ObjectiveProblem catalog(const std::string& name, std::optional<int> n = std::nullopt);

std::vector<std::string> catalog_names();

/// f(x) = 2.5 x^2 + x, minimum (-0.2, -0.1).
ObjectiveProblem demo_quadratic();

/// Two-layer perceptron (2 -> 8 tanh -> 2 softmax cross-entropy) on two
/// seeded linearly separable Gaussian clusters. Parameter dimension 42.
/// Batch b covers sample indices [b*batch_size mod n, ...) cyclically, so a
/// batch spanning the full data reproduces the full gradient exactly.
class ToyMlp {
public:
    ToyMlp(std::uint64_t seed, int n_samples, int batch_size);

    const ObjectiveProblem& problem() const { return problem_; }
    Vector initial_params() const { return problem_.default_starts.front(); }
    int batches_per_epoch() const { return n_samples_ / batch_size_; }
    int n_samples() const { return n_samples_; }

    double full_loss(const Vector& params) const { return problem_.value(params); }
    double accuracy(const Vector& params) const;

    static constexpr int kParamDim = 42;

private:
    int n_samples_;
    int batch_size_;
    std::vector<double> xs_;      // 2 per sample
    std::vector<int> labels_;
    ObjectiveProblem problem_;
};

ToyMlp toy_mlp(std::uint64_t seed, int n_samples, int batch_size);

}  // namespace ecco
