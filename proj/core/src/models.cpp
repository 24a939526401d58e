#include "ctvae/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace ctvae {

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "ae") return ModelKind::AE;
    if (s == "vae") return ModelKind::VAE;
    if (s == "tvae") return ModelKind::TVAE;
    if (s == "ctvae") return ModelKind::CTVAE;
    throw std::invalid_argument("unknown model kind: " + s);
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::AE: return "ae";
        case ModelKind::VAE: return "vae";
        case ModelKind::TVAE: return "tvae";
        case ModelKind::CTVAE: return "ctvae";
    }
    return "?";
}

ArchSpec ArchSpec::derive(std::size_t d_input, std::size_t d_z_override) {
    ArchSpec a;
    a.d_input = d_input;
    a.d_z = d_z_override ? d_z_override
                         : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                                        std::sqrt(double(d_input)))));
    const auto half = std::max<std::size_t>(1, (d_input + 1) / 2);
    a.h1 = half;
    a.h2 = half;
    a.h3 = half;
    return a;
}

// ---------------------------------------------------------------- losses

namespace {

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

double ae_loss(const Matrix& x, const Matrix& x_hat) {
    if (!x.same_shape(x_hat)) throw std::invalid_argument("ae_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r)
        acc += sq_diff_sum(x.row_ptr(r), x_hat.row_ptr(r), x.cols());
    return acc / static_cast<double>(x.rows());
}

double kl_std_normal(const std::vector<double>& mu, const std::vector<double>& logvar) {
    if (mu.size() != logvar.size()) throw std::invalid_argument("kl_std_normal: shape mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
        acc += -1.0 - logvar[j] + mu[j] * mu[j] + std::exp(logvar[j]);
    return 0.5 * acc;
}

double tvae_loss(const Matrix& x, const Matrix& x_hat, const Matrix& z, const Matrix& z_hat,
                 const Matrix& mu, const Matrix& logvar, double beta1, double beta2) {
    const std::size_t n = x.rows();
    if (x_hat.rows() != n || z.rows() != n || z_hat.rows() != n || mu.rows() != n ||
        logvar.rows() != n)
        throw std::invalid_argument("tvae_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += sq_diff_sum(x.row_ptr(r), x_hat.row_ptr(r), x.cols());
        acc += beta1 * sq_diff_sum(z.row_ptr(r), z_hat.row_ptr(r), z.cols());
        acc += beta2 * kl_std_normal(mu.row(r), logvar.row(r));
    }
    return acc / static_cast<double>(n);
}

double ctvae_loss(const Matrix& x, const Matrix& x_hat, const Matrix& z, const Matrix& z_hat,
                  const Matrix& mu, const Matrix& logvar, const std::vector<int>& labels,
                  const ClassPriors& priors, const std::array<double, 4>& betas) {
    const std::size_t n = x.rows();
    if (labels.size() != n) throw std::invalid_argument("ctvae_loss: labels length mismatch");
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const int c = labels[r];
        if (c < 0 || c >= priors.n_classes())
            throw std::invalid_argument("ctvae_loss: unknown label");
        acc += sq_diff_sum(x.row_ptr(r), x_hat.row_ptr(r), x.cols());
        acc += betas[0] * sq_diff_sum(z.row_ptr(r), z_hat.row_ptr(r), z.cols());
        acc += betas[1] * kl_std_normal(mu.row(r), logvar.row(r));
        const double* target = priors.mu_hat.row_ptr(static_cast<std::size_t>(c));
        acc += betas[2] * sq_diff_sum(z.row_ptr(r), target, z.cols());
        acc += betas[3] * sq_diff_sum(z_hat.row_ptr(r), target, z_hat.cols());
    }
    return acc / static_cast<double>(n);
}

// ---------------------------------------------------- reparameterization

std::vector<double> reparameterize_vae(const std::vector<double>& mu,
                                       const std::vector<double>& sigma, Rng& rng) {
    if (mu.size() != sigma.size())
        throw std::invalid_argument("reparameterize_vae: shape mismatch");
    std::vector<double> z(mu.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = mu[j] + sigma[j] * rng.gaussian();
    return z;
}

std::vector<double> reparameterize_ctvae(const std::vector<double>& mu,
                                         const std::vector<double>& sigma, int label,
                                         const ClassPriors& priors, Rng& rng) {
    if (label < 0 || label >= priors.n_classes())
        throw std::invalid_argument("reparameterize_ctvae: unknown class");
    if (mu.size() != priors.d_z() || sigma.size() != mu.size())
        throw std::invalid_argument("reparameterize_ctvae: shape mismatch");
    const auto c = static_cast<std::size_t>(label);
    std::vector<double> z(mu.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double eps = priors.mu_hat(c, j) + priors.sigma(c, j) * rng.gaussian();
        z[j] = mu[j] + sigma[j] * eps;
    }
    return z;
}

// ----------------------------------------------------------- construction

Model make_model(ModelKind kind, const ArchSpec& arch, std::uint64_t seed,
                 std::optional<ClassPriors> priors, std::array<double, 4> betas) {
    if (kind == ModelKind::CTVAE && !priors)
        throw std::invalid_argument("make_model: CTVAE requires priors");
    Rng rng(seed);
    Model m;
    m.kind = kind;
    m.arch = arch;
    m.betas = betas;
    m.priors = std::move(priors);

    m.enc_trunk = Mlp({DenseLayer(arch.d_input, arch.h1, Activation::ReLU, rng)});
    m.mu_head = Mlp({DenseLayer(arch.h1, arch.d_z, Activation::Linear, rng)});
    if (m.has_logvar())
        m.logvar_head = Mlp({DenseLayer(arch.h1, arch.d_z, Activation::Linear, rng)});
    m.herm = Mlp({DenseLayer(arch.d_z, arch.h2, Activation::ReLU, rng),
                  DenseLayer(arch.h2, arch.d_input, Activation::Linear, rng)});
    if (m.has_decoder())
        m.dec = Mlp({DenseLayer(arch.d_input, arch.h3, Activation::ReLU, rng),
                     DenseLayer(arch.h3, arch.d_z, Activation::Linear, rng)});
    return m;
}

// ----------------------------------------------------------- training

std::vector<Mlp*> trainable_mlps(Model& m) {
    std::vector<Mlp*> out{&m.enc_trunk, &m.mu_head};
    if (m.has_logvar()) out.push_back(&m.logvar_head);
    out.push_back(&m.herm);
    if (m.has_decoder()) out.push_back(&m.dec);
    return out;
}

std::vector<std::vector<LayerGrad>> zero_model_grads(Model& m) {
    std::vector<std::vector<LayerGrad>> grads;
    for (Mlp* mlp : trainable_mlps(m)) grads.push_back(mlp->zero_grads());
    return grads;
}

namespace {

std::size_t param_count(const Mlp& m) {
    std::size_t n = 0;
    for (const auto& layer : m.layers()) n += layer.weights.size() + layer.bias.size();
    return n;
}

void zero_grads_inplace(std::vector<std::vector<LayerGrad>>& grads) {
    for (auto& mlp_grads : grads)
        for (auto& g : mlp_grads) {
            std::fill(g.d_weights.data().begin(), g.d_weights.data().end(), 0.0);
            std::fill(g.d_bias.begin(), g.d_bias.end(), 0.0);
        }
}

void scale_grads(std::vector<std::vector<LayerGrad>>& grads, double s) {
    for (auto& mlp_grads : grads)
        for (auto& g : mlp_grads) {
            for (double& v : g.d_weights.data()) v *= s;
            for (double& v : g.d_bias) v *= s;
        }
}

void collect_views(std::vector<Mlp*>& mlps, std::vector<std::vector<LayerGrad>>& grads,
                   std::vector<double*>& params, std::vector<const double*>& gptrs,
                   std::vector<std::size_t>& sizes) {
    for (std::size_t mi = 0; mi < mlps.size(); ++mi) {
        auto& layers = mlps[mi]->layers();
        for (std::size_t li = 0; li < layers.size(); ++li) {
            params.push_back(layers[li].weights.data().data());
            gptrs.push_back(grads[mi][li].d_weights.data().data());
            sizes.push_back(layers[li].weights.size());
            params.push_back(layers[li].bias.data());
            gptrs.push_back(grads[mi][li].d_bias.data());
            sizes.push_back(layers[li].bias.size());
        }
    }
}

}  // namespace

double compute_batch_gradients(Model& model, const Matrix& x, const std::vector<int>& labels,
                               const Matrix& eps,
                               std::vector<std::vector<LayerGrad>>& grads) {
    const std::size_t n = x.rows();
    if (n == 0) throw std::invalid_argument("compute_batch_gradients: empty batch");
    const bool sampling = model.has_logvar();
    const bool twin = model.has_decoder();
    const bool class_terms = model.kind == ModelKind::CTVAE;
    if (class_terms && labels.size() != n)
        throw std::invalid_argument("compute_batch_gradients: labels length mismatch");
    if (sampling && (eps.rows() != n || eps.cols() != model.arch.d_z))
        throw std::invalid_argument("compute_batch_gradients: eps shape mismatch");

    const double b1 = model.betas[0], b2 = model.betas[1], b3 = model.betas[2],
                 b4 = model.betas[3];
    const std::size_t d_z = model.arch.d_z;
    const std::size_t d_in = model.arch.d_input;
    const double w = 1.0 / static_cast<double>(n);

    const std::size_t gi_enc = 0, gi_mu = 1;
    const std::size_t gi_lv = sampling ? 2 : std::size_t(-1);
    const std::size_t gi_herm = sampling ? 3 : 2;
    const std::size_t gi_dec = gi_herm + 1;

    double total_loss = 0.0;
    for (std::size_t row = 0; row < n; ++row) {
        const std::vector<double> xv = x.row(row);
        const int label = class_terms ? labels[row] : 0;
        const double* target = nullptr;
        if (class_terms) {
            if (label < 0 || label >= model.priors->n_classes())
                throw std::invalid_argument("compute_batch_gradients: label outside priors");
            target = model.priors->mu_hat.row_ptr(static_cast<std::size_t>(label));
        }

        GradientTape t_enc, t_mu, t_lv, t_herm, t_dec;
        const std::vector<double> h = model.enc_trunk.forward(xv, &t_enc);
        const std::vector<double> mu = model.mu_head.forward(h, &t_mu);

        std::vector<double> logvar, sigma, z;
        const double* eps_row = sampling ? eps.row_ptr(row) : nullptr;
        if (sampling) {
            logvar = model.logvar_head.forward(h, &t_lv);
            sigma.resize(d_z);
            z.resize(d_z);
            for (std::size_t j = 0; j < d_z; ++j) {
                sigma[j] = std::exp(0.5 * logvar[j]);
                z[j] = mu[j] + sigma[j] * eps_row[j];
            }
        } else {
            z = mu;
        }

        const std::vector<double> x_hat = model.herm.forward(z, &t_herm);
        std::vector<double> z_hat;
        if (twin) z_hat = model.dec.forward(x_hat, &t_dec);

        double loss = sq_diff_sum(xv.data(), x_hat.data(), d_in);
        if (twin) loss += b1 * sq_diff_sum(z.data(), z_hat.data(), d_z);
        if (sampling) loss += (twin ? b2 : 1.0) * kl_std_normal(mu, logvar);
        if (class_terms) {
            loss += b3 * sq_diff_sum(z.data(), target, d_z);
            loss += b4 * sq_diff_sum(z_hat.data(), target, d_z);
        }
        total_loss += loss;

        std::vector<double> d_z_grad(d_z, 0.0);
        if (twin) {
            std::vector<double> d_zhat(d_z);
            for (std::size_t j = 0; j < d_z; ++j) {
                d_zhat[j] = w * 2.0 * b1 * (z_hat[j] - z[j]);
                if (class_terms) d_zhat[j] += w * 2.0 * b4 * (z_hat[j] - target[j]);
            }
            std::vector<double> g_xhat = model.dec.backward(t_dec, d_zhat, grads[gi_dec]);
            for (std::size_t j = 0; j < d_in; ++j) g_xhat[j] += w * 2.0 * (x_hat[j] - xv[j]);
            std::vector<double> g_z = model.herm.backward(t_herm, g_xhat, grads[gi_herm]);
            for (std::size_t j = 0; j < d_z; ++j) {
                d_z_grad[j] = g_z[j] + w * 2.0 * b1 * (z[j] - z_hat[j]);
                if (class_terms) d_z_grad[j] += w * 2.0 * b3 * (z[j] - target[j]);
            }
        } else {
            std::vector<double> d_xhat(d_in);
            for (std::size_t j = 0; j < d_in; ++j) d_xhat[j] = w * 2.0 * (x_hat[j] - xv[j]);
            d_z_grad = model.herm.backward(t_herm, d_xhat, grads[gi_herm]);
        }

        std::vector<double> h_grad;
        if (sampling) {
            const double kl_w = twin ? b2 : 1.0;
            std::vector<double> d_mu(d_z), d_lv(d_z);
            for (std::size_t j = 0; j < d_z; ++j) {
                d_mu[j] = d_z_grad[j] + w * kl_w * mu[j];
                d_lv[j] = d_z_grad[j] * eps_row[j] * 0.5 * sigma[j] +
                          w * kl_w * 0.5 * (sigma[j] * sigma[j] - 1.0);
            }
            h_grad = model.mu_head.backward(t_mu, d_mu, grads[gi_mu]);
            std::vector<double> h2 = model.logvar_head.backward(t_lv, d_lv, grads[gi_lv]);
            for (std::size_t j = 0; j < h_grad.size(); ++j) h_grad[j] += h2[j];
        } else {
            h_grad = model.mu_head.backward(t_mu, d_z_grad, grads[gi_mu]);
        }
        model.enc_trunk.backward(t_enc, h_grad, grads[gi_enc]);
    }
    return total_loss / static_cast<double>(n);
}

TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg) {
    if (data.n() == 0) throw std::invalid_argument("train: empty dataset");
    if (data.d_input() != model.arch.d_input)
        throw std::invalid_argument("train: feature dimensionality mismatch");
    if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.mc_samples < 1)
        throw std::invalid_argument("train: invalid config");
    if (model.kind == ModelKind::CTVAE && !model.priors)
        throw std::invalid_argument("train: CTVAE without priors");

    const bool sampling = model.has_logvar();
    const bool class_terms = model.kind == ModelKind::CTVAE;

    std::vector<Mlp*> mlps = trainable_mlps(model);
    std::vector<std::vector<LayerGrad>> grads = zero_model_grads(model);
    std::size_t total_params = 0;
    for (Mlp* m : mlps) total_params += param_count(*m);
    Adam opt(total_params, cfg.lr);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.n());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.loss_history.reserve(cfg.epochs);
    const std::size_t d_z = model.arch.d_z;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < data.n(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, data.n());
            const std::size_t bsz = end - start;

            Matrix bx(bsz, data.d_input());
            std::vector<int> blabels(bsz, 0);
            for (std::size_t i = 0; i < bsz; ++i) {
                bx.set_row(i, data.features.row(order[start + i]));
                blabels[i] = data.labels[order[start + i]];
            }

            zero_grads_inplace(grads);
            double batch_loss = 0.0;
            for (std::size_t k = 0; k < cfg.mc_samples; ++k) {
                Matrix eps(sampling ? bsz : 0, sampling ? d_z : 0);
                if (sampling) {
                    for (std::size_t i = 0; i < bsz; ++i)
                        for (std::size_t j = 0; j < d_z; ++j) {
                            double e = rng.gaussian();
                            if (class_terms) {
                                const auto c = static_cast<std::size_t>(blabels[i]);
                                e = model.priors->mu_hat(c, j) + model.priors->sigma(c, j) * e;
                            }
                            eps(i, j) = e;
                        }
                }
                batch_loss += compute_batch_gradients(model, bx, blabels, eps, grads);
            }
            if (cfg.mc_samples > 1)
                scale_grads(grads, 1.0 / static_cast<double>(cfg.mc_samples));
            epoch_loss += batch_loss / static_cast<double>(cfg.mc_samples) *
                          static_cast<double>(bsz);

            std::vector<double*> params;
            std::vector<const double*> gptrs;
            std::vector<std::size_t> sizes;
            collect_views(mlps, grads, params, gptrs, sizes);
            opt.step(std::move(params), gptrs, sizes);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(data.n()));
    }
    return result;
}

Representation extract(const Model& model, const Matrix& features) {
    Representation rep;
    const std::size_t d_z = model.arch.d_z;
    rep.values = Matrix(features.rows(), d_z);
    switch (model.kind) {
        case ModelKind::AE: rep.source = RepSource::LatentZ; break;
        case ModelKind::VAE: rep.source = RepSource::LatentMu; break;
        default: rep.source = RepSource::ReconstructionZhat; break;
    }
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const std::vector<double> x = features.row(r);
        if (model.has_decoder()) {
            if (x.size() != model.dec.in_dim())
                throw std::invalid_argument("extract: feature dimensionality mismatch");
            rep.values.set_row(r, model.dec.forward(x));
        } else {
            rep.values.set_row(r, model.mu_head.forward(model.enc_trunk.forward(x)));
        }
    }
    return rep;
}

// -------------------------------------------------------- serialization
// Little-endian binary layout, see docs/model-format.md.

namespace {

constexpr std::uint32_t kMagic = 0x4354564d;  // "MVTC" little-endian for "CTVM"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); }
void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<char*>(&v), 8); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<char*>(&v), 8); }
void put_f64s(std::ostream& out, const std::vector<double>& v) {
    put_u64(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}
void put_matrix(std::ostream& out, const Matrix& m) {
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    out.write(reinterpret_cast<const char*>(m.data().data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::vector<double> get_f64s(std::istream& in) {
    std::vector<double> v(get_u64(in));
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    return v;
}
Matrix get_matrix(std::istream& in) {
    const std::uint64_t r = get_u64(in);
    const std::uint64_t c = get_u64(in);
    Matrix m(r, c);
    in.read(reinterpret_cast<char*>(m.data().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    return m;
}

void put_mlp(std::ostream& out, const Mlp& m) {
    put_u64(out, m.layers().size());
    for (const DenseLayer& layer : m.layers()) {
        put_u32(out, static_cast<std::uint32_t>(layer.activation));
        put_matrix(out, layer.weights);
        put_f64s(out, layer.bias);
    }
}

Mlp get_mlp(std::istream& in) {
    std::vector<DenseLayer> layers(get_u64(in));
    for (DenseLayer& layer : layers) {
        layer.activation = static_cast<Activation>(get_u32(in));
        layer.weights = get_matrix(in);
        layer.bias = get_f64s(in);
    }
    return Mlp(std::move(layers));
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    put_u32(out, kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(model.kind));
    put_u64(out, model.arch.d_input);
    put_u64(out, model.arch.h1);
    put_u64(out, model.arch.d_z);
    put_u64(out, model.arch.h2);
    put_u64(out, model.arch.h3);
    for (double b : model.betas) put_f64(out, b);

    put_u32(out, model.priors ? 1 : 0);
    if (model.priors) {
        put_matrix(out, model.priors->mu_raw);
        put_matrix(out, model.priors->sigma);
        put_matrix(out, model.priors->mu_hat);
        put_f64s(out, model.priors->mu_bar);
        put_f64(out, model.priors->scale);
    }
    put_f64s(out, model.norm.min);
    put_f64s(out, model.norm.max);

    put_mlp(out, model.enc_trunk);
    put_mlp(out, model.mu_head);
    put_u32(out, model.has_logvar() ? 1 : 0);
    if (model.has_logvar()) put_mlp(out, model.logvar_head);
    put_mlp(out, model.herm);
    put_u32(out, model.has_decoder() ? 1 : 0);
    if (model.has_decoder()) put_mlp(out, model.dec);
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    if (get_u32(in) != kMagic) throw std::runtime_error("load_model: bad magic in " + path);
    if (get_u32(in) != kVersion) throw std::runtime_error("load_model: unsupported version");

    Model m;
    m.kind = static_cast<ModelKind>(get_u32(in));
    m.arch.d_input = get_u64(in);
    m.arch.h1 = get_u64(in);
    m.arch.d_z = get_u64(in);
    m.arch.h2 = get_u64(in);
    m.arch.h3 = get_u64(in);
    for (double& b : m.betas) b = get_f64(in);

    if (get_u32(in)) {
        ClassPriors p;
        p.mu_raw = get_matrix(in);
        p.sigma = get_matrix(in);
        p.mu_hat = get_matrix(in);
        p.mu_bar = get_f64s(in);
        p.scale = get_f64(in);
        m.priors = std::move(p);
    }
    m.norm.min = get_f64s(in);
    m.norm.max = get_f64s(in);

    m.enc_trunk = get_mlp(in);
    m.mu_head = get_mlp(in);
    if (get_u32(in)) m.logvar_head = get_mlp(in);
    m.herm = get_mlp(in);
    if (get_u32(in)) m.dec = get_mlp(in);
    if (!in) throw std::runtime_error("load_model: truncated file " + path);
    return m;
}

}  // namespace ctvae
