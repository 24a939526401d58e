#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctvae/dataset.hpp"
#include "ctvae/nn.hpp"
#include "ctvae/priors.hpp"

namespace ctvae {

enum class ModelKind { AE, VAE, TVAE, CTVAE };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind k);

/// Layer widths. When auto-derived, d_z ~ round(sqrt(d_input)) and the hidden
/// layers are ~d_input/2.
struct ArchSpec {
    std::size_t d_input = 0;
    std::size_t h1 = 0;
    std::size_t d_z = 0;
    std::size_t h2 = 0;
    std::size_t h3 = 0;  // TVAE/CTVAE decoder hidden width

    static ArchSpec derive(std::size_t d_input, std::size_t d_z_override = 0);
};

struct TrainConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 100;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    std::size_t mc_samples = 1;
};

enum class RepSource { LatentZ, LatentMu, ReconstructionZhat };

struct Representation {
    Matrix values;  // n x d_z
    RepSource source = RepSource::ReconstructionZhat;
};

/// One trainable model. The encoder is a shared trunk with mu / log-variance
/// heads; the hermaphrodite maps z -> x_hat and doubles as the AE/VAE decoder;
/// the decoder (TVAE/CTVAE only) maps x_hat -> z_hat and is the extractor.
struct Model {
    ModelKind kind = ModelKind::CTVAE;
    ArchSpec arch;
    Mlp enc_trunk;    // x -> h1, ReLU
    Mlp mu_head;      // h1 -> d_z, linear (AE bottleneck z)
    Mlp logvar_head;  // h1 -> d_z, linear
    Mlp herm;         // z -> h2 -> x_hat
    Mlp dec;          // x_hat -> h3 -> z_hat
    std::optional<ClassPriors> priors;     // CTVAE
    std::array<double, 4> betas{1.0, 1.0, 1.0, 1.0};
    NormStats norm;   // stats the training data was scaled with

    bool has_logvar() const { return kind != ModelKind::AE; }
    bool has_decoder() const {
        return kind == ModelKind::TVAE || kind == ModelKind::CTVAE;
    }
};

// ---- losses (batch mean of per-sample component sums) ----

double ae_loss(const Matrix& x, const Matrix& x_hat);

/// KL(N(mu, sigma^2) || N(0, I)) in closed form, per sample:
/// 0.5 * sum_j (-1 - logvar_j + mu_j^2 + exp(logvar_j)).
double kl_std_normal(const std::vector<double>& mu, const std::vector<double>& logvar);

double tvae_loss(const Matrix& x, const Matrix& x_hat, const Matrix& z, const Matrix& z_hat,
                 const Matrix& mu, const Matrix& logvar, double beta1, double beta2);

double ctvae_loss(const Matrix& x, const Matrix& x_hat, const Matrix& z, const Matrix& z_hat,
                  const Matrix& mu, const Matrix& logvar, const std::vector<int>& labels,
                  const ClassPriors& priors, const std::array<double, 4>& betas);

// ---- reparameterization ----

std::vector<double> reparameterize_vae(const std::vector<double>& mu,
                                       const std::vector<double>& sigma, Rng& rng);

/// z = mu + sigma (.) eps with eps ~ N(mu_hat^(c), diag(sigma^(c)^2)).
std::vector<double> reparameterize_ctvae(const std::vector<double>& mu,
                                         const std::vector<double>& sigma, int label,
                                         const ClassPriors& priors, Rng& rng);

// ---- training / inference ----

Model make_model(ModelKind kind, const ArchSpec& arch, std::uint64_t seed,
                 std::optional<ClassPriors> priors = std::nullopt,
                 std::array<double, 4> betas = {1.0, 1.0, 1.0, 1.0});

struct TrainResult {
    std::vector<double> loss_history;  // per-epoch mean loss
};

/// The model's trainable networks, in the fixed order used everywhere:
/// enc_trunk, mu_head, [logvar_head], herm, [dec].
std::vector<Mlp*> trainable_mlps(Model& model);

std::vector<std::vector<LayerGrad>> zero_model_grads(Model& model);

/// Batch loss (mean over rows of the per-sample loss for this model kind)
/// and its exact gradients, accumulated into `grads` (layout of
/// zero_model_grads). `eps` is the presampled reparameterization noise,
/// one row per sample; ignored for AE. For CTVAE the rows are draws from
/// N(mu_hat^(c), diag(sigma^(c)^2)) of each sample's label.
double compute_batch_gradients(Model& model, const Matrix& x, const std::vector<int>& labels,
                               const Matrix& eps,
                               std::vector<std::vector<LayerGrad>>& grads);

/// Mini-batch Adam training; batches reshuffled each epoch from the run seed.
TrainResult train(Model& model, const Dataset& train_data, const TrainConfig& cfg);

/// Labels are never read here: TVAE/CTVAE feed features into the decoder to
/// get the reconstruction representation; AE uses the bottleneck; VAE the mu
/// head (no sampling).
Representation extract(const Model& model, const Matrix& features);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace ctvae
