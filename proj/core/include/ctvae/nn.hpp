#pragma once

#include <cstddef>
#include <vector>

#include "ctvae/matrix.hpp"
#include "ctvae/rng.hpp"

namespace ctvae {

enum class Activation { Linear, ReLU, Sigmoid, Tanh };

double apply_activation(Activation a, double x);
double activation_grad(Activation a, double pre, double post);

/// Glorot uniform initialization: entries in [-sqrt(6/(in+out)), +sqrt(6/(in+out))].
Matrix glorot_init(std::size_t in_dim, std::size_t out_dim, Rng& rng);

/// One fully connected layer: y = act(W x + b), W is out x in.
struct DenseLayer {
    Matrix weights;
    std::vector<double> bias;
    Activation activation = Activation::Linear;

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act, Rng& rng)
        : weights(glorot_init(in_dim, out_dim, rng)), bias(out_dim, 0.0), activation(act) {}

    std::size_t in_dim() const { return weights.cols(); }
    std::size_t out_dim() const { return weights.rows(); }
};

/// Per-layer gradients, same shapes as the layer parameters.
struct LayerGrad {
    Matrix d_weights;
    std::vector<double> d_bias;
};

/// Forward intermediates recorded for one pass through an Mlp. Each tape may
/// be consumed by exactly one backward call.
struct GradientTape {
    std::vector<std::vector<double>> inputs;   // per layer: input vector
    std::vector<std::vector<double>> pre;      // per layer: pre-activation
    std::vector<std::vector<double>> post;     // per layer: post-activation
    bool consumed = false;
};

/// A stack of dense layers with exact analytic backprop.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    std::size_t in_dim() const { return layers_.front().in_dim(); }
    std::size_t out_dim() const { return layers_.back().out_dim(); }

    std::vector<double> forward(const std::vector<double>& x, GradientTape* tape = nullptr) const;

    /// Backpropagate `upstream` (dLoss/dOutput) through the recorded pass.
    /// Accumulates into `grads` and returns dLoss/dInput.
    std::vector<double> backward(GradientTape& tape, const std::vector<double>& upstream,
                                 std::vector<LayerGrad>& grads) const;

    std::vector<LayerGrad> zero_grads() const;

private:
    std::vector<DenseLayer> layers_;
};

/// Standard Adam with bias correction over a flat view of parameters.
class Adam {
public:
    Adam(std::size_t n_params, double lr, double beta_m = 0.9, double beta_v = 0.999,
         double eps = 1e-8);

    /// params and grads are flat, same length as n_params.
    void step(std::vector<double*> params, const std::vector<const double*>& grads,
              const std::vector<std::size_t>& sizes);

    std::size_t steps_taken() const { return step_; }
    double lr() const { return lr_; }

private:
    std::size_t step_ = 0;
    double lr_;
    double beta_m_;
    double beta_v_;
    double eps_;
    std::vector<double> first_moment_;
    std::vector<double> second_moment_;
};

}  // namespace ctvae
