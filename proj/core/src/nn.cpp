#include "ctvae/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace ctvae {

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::Linear: return x;
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
    }
    throw std::logic_error("unknown activation");
}

double activation_grad(Activation a, double pre, double post) {
    switch (a) {
        case Activation::Linear: return 1.0;
        case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: return post * (1.0 - post);
        case Activation::Tanh: return 1.0 - post * post;
    }
    throw std::logic_error("unknown activation");
}

Matrix glorot_init(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    if (in_dim == 0 || out_dim == 0)
        throw std::invalid_argument("glorot_init: dimensions must be >= 1");
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    Matrix w(out_dim, in_dim);
    for (double& x : w.data()) x = rng.uniform(-limit, limit);
    return w;
}

std::vector<double> Mlp::forward(const std::vector<double>& x, GradientTape* tape) const {
    if (layers_.empty()) throw std::invalid_argument("Mlp::forward: no layers");
    if (x.size() != in_dim()) throw std::invalid_argument("Mlp::forward: input width mismatch");
    if (tape) {
        tape->inputs.clear();
        tape->pre.clear();
        tape->post.clear();
        tape->consumed = false;
    }
    std::vector<double> cur = x;
    for (const DenseLayer& layer : layers_) {
        std::vector<double> pre = matvec(layer.weights, cur);
        for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += layer.bias[i];
        std::vector<double> post(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i)
            post[i] = apply_activation(layer.activation, pre[i]);
        if (tape) {
            tape->inputs.push_back(std::move(cur));
            tape->pre.push_back(pre);
            tape->post.push_back(post);
        }
        cur = std::move(post);
    }
    return cur;
}

std::vector<double> Mlp::backward(GradientTape& tape, const std::vector<double>& upstream,
                                  std::vector<LayerGrad>& grads) const {
    if (tape.consumed) throw std::logic_error("Mlp::backward: tape already consumed");
    if (tape.inputs.size() != layers_.size())
        throw std::invalid_argument("Mlp::backward: tape does not match network");
    if (grads.size() != layers_.size())
        throw std::invalid_argument("Mlp::backward: grads does not match network");
    tape.consumed = true;

    std::vector<double> delta = upstream;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const DenseLayer& layer = layers_[li];
        const auto& pre = tape.pre[li];
        const auto& post = tape.post[li];
        const auto& input = tape.inputs[li];
        if (delta.size() != layer.out_dim())
            throw std::invalid_argument("Mlp::backward: upstream width mismatch");

        // delta <- delta * act'(pre)
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] *= activation_grad(layer.activation, pre[i], post[i]);

        LayerGrad& g = grads[li];
        for (std::size_t o = 0; o < layer.out_dim(); ++o) {
            const double d = delta[o];
            g.d_bias[o] += d;
            if (d == 0.0) continue;
            double* wrow = g.d_weights.row_ptr(o);
            for (std::size_t i = 0; i < layer.in_dim(); ++i) wrow[i] += d * input[i];
        }

        std::vector<double> down(layer.in_dim(), 0.0);
        for (std::size_t o = 0; o < layer.out_dim(); ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* wrow = layer.weights.row_ptr(o);
            for (std::size_t i = 0; i < layer.in_dim(); ++i) down[i] += d * wrow[i];
        }
        delta = std::move(down);
    }
    return delta;
}

std::vector<LayerGrad> Mlp::zero_grads() const {
    std::vector<LayerGrad> grads;
    grads.reserve(layers_.size());
    for (const DenseLayer& layer : layers_) {
        LayerGrad g;
        g.d_weights = Matrix(layer.out_dim(), layer.in_dim());
        g.d_bias.assign(layer.out_dim(), 0.0);
        grads.push_back(std::move(g));
    }
    return grads;
}

Adam::Adam(std::size_t n_params, double lr, double beta_m, double beta_v, double eps)
    : lr_(lr), beta_m_(beta_m), beta_v_(beta_v), eps_(eps),
      first_moment_(n_params, 0.0), second_moment_(n_params, 0.0) {
    if (lr <= 0.0 || beta_m <= 0.0 || beta_m >= 1.0 || beta_v <= 0.0 || beta_v >= 1.0 ||
        eps <= 0.0)
        throw std::invalid_argument("Adam: invalid hyper-parameters");
}

void Adam::step(std::vector<double*> params, const std::vector<const double*>& grads,
                const std::vector<std::size_t>& sizes) {
    if (params.size() != grads.size() || params.size() != sizes.size())
        throw std::invalid_argument("Adam::step: mismatched views");
    std::size_t total = 0;
    for (std::size_t s : sizes) total += s;
    if (total != first_moment_.size())
        throw std::invalid_argument("Adam::step: parameter count mismatch");

    ++step_;
    const double bc_m = 1.0 - std::pow(beta_m_, static_cast<double>(step_));
    const double bc_v = 1.0 - std::pow(beta_v_, static_cast<double>(step_));

    std::size_t off = 0;
    for (std::size_t blk = 0; blk < params.size(); ++blk) {
        double* p = params[blk];
        const double* g = grads[blk];
        for (std::size_t i = 0; i < sizes[blk]; ++i, ++off) {
            double& m = first_moment_[off];
            double& v = second_moment_[off];
            m = beta_m_ * m + (1.0 - beta_m_) * g[i];
            v = beta_v_ * v + (1.0 - beta_v_) * g[i] * g[i];
            const double m_hat = m / bc_m;
            const double v_hat = v / bc_v;
            p[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

}  // namespace ctvae
