// Copyright 2026 The QPSAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * A small Pre-Norm vision transformer with a pluggable attention scorer and
 * a hand-written backward pass.
 *
 * All parameters live in one flat vector. Named tensors are column-major
 * views into it, which keeps the optimizer and checkpoint format trivial.
 * Token activations are row-major in the sense of one token per row and
 * linear layers compute x W + b.
 */
#pragma once

#include "qpsan/attention.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qpsan {

/// Pixels in channel, row, column order.
using Image = Eigen::VectorXd;

constexpr double kLayerNormEpsilon = 1e-6;

struct VitConfig {
    int image_size = 16;
    int channels = 1;
    int patch_size = 4;
    int num_layers = 1;
    int heads = 2;
    int hidden_size = 32;
    int mlp_hidden = 64;
    int num_classes = 2;
    ScorerKind scorer = ScorerKind::Qpa;
    /// D; 0 selects min(16, head_dim).
    int aggregation_depth = 0;

    /// Throws std::invalid_argument on inconsistent sizes.
    void validate() const;

    int head_dim() const { return hidden_size / heads; }
    int depth() const;
    int patches_per_side() const { return image_size / patch_size; }
    int num_patches() const { return patches_per_side() * patches_per_side(); }
    int num_tokens() const { return num_patches() + 1; }
    int patch_dim() const { return channels * patch_size * patch_size; }
    int image_dim() const { return channels * image_size * image_size; }
    AttentionConfig attention() const;
};

/// Trainable scalars one layer's scorer owns (5 for QPA, 0 for dot).
int scorer_parameter_count(const VitConfig &config);

/// A named column-major block of the flat parameter vector.
struct TensorView {
    std::string name;
    Eigen::Index offset;
    Eigen::Index rows;
    Eigen::Index cols;

    Eigen::Index size() const { return rows * cols; }
};

/// Per-image inference options.
struct ForwardOptions {
    /// Noise applied after the QPA circuit on every score evaluation.
    std::optional<NoiseChannel> noise;
    double noise_strength = 0.0;
};

/// Activations kept for the backward pass of one encoder layer.
struct LayerCache {
    Matrix input;            ///< N x d residual stream entering the layer
    Matrix ln1;              ///< normalized, before gain/bias
    Vector ln1_rstd;
    Matrix q, k, v;          ///< N x d, heads side by side
    std::vector<Matrix> probs; ///< per head, softmax of the scores (empty for linear)
    Matrix heads_out;        ///< N x d concatenated head outputs
    Matrix mid;              ///< residual stream after attention
    Matrix ln2;
    Vector ln2_rstd;
    Matrix ffn_pre;          ///< N x mlp_hidden, before GELU
    Matrix ffn_act;
};

struct ForwardCache {
    Matrix patches; ///< P x patch_dim
    std::vector<LayerCache> layers;
    Matrix final_stream;  ///< N x d after the last block
    Eigen::RowVectorXd cls_norm; ///< normalized CLS row, before gain/bias
    double cls_rstd = 0;
    Vector logits;
};

class VitModel {
  public:
    /// Fresh model with seeded initialization.
    VitModel(const VitConfig &config, std::uint64_t seed);
    /// Model around an existing parameter vector, e.g. from a checkpoint.
    VitModel(const VitConfig &config, Vector parameters);

    const VitConfig &config() const { return config_; }
    const std::vector<TensorView> &tensors() const { return tensors_; }
    const TensorView &tensor(const std::string &name) const;

    Vector &parameters() { return params_; }
    const Vector &parameters() const { return params_; }
    Eigen::Index parameter_count() const { return params_.size(); }

    Eigen::Map<Matrix> view(const std::string &name);
    Eigen::Map<const Matrix> view(const std::string &name) const;

    /// QPA circuit parameters of a layer; for qpa-ind gamma_d = gamma_s = 0.
    QpaParams<double> qpa_params(int layer) const;

    /// Non-overlapping patches times the patch weights plus bias; P x hidden.
    Matrix patch_embed(const Image &image) const;

    Vector forward(const Image &image, const ForwardOptions &options = {}) const;
    Vector forward(const Image &image, ForwardCache &cache,
                   const ForwardOptions &options = {}) const;

    /// Cross-entropy loss of one image; adds dLoss/dparams * weight to grad.
    double backward(const Image &image, int label, Vector &grad, double weight = 1.0) const;

  private:
    void build_layout();
    void initialize(std::uint64_t seed);

    VitConfig config_;
    std::vector<TensorView> tensors_;
    Vector params_;
};

/// ln(sum exp z) - z_label.
double cross_entropy(const Vector &logits, int label);

/// Numerically stable softmax of a logit vector.
Vector softmax(const Vector &logits);

/// Layer norm of each row without gain/bias; fills 1/sqrt(var + eps) per row.
Matrix layer_norm(const Matrix &x, Vector &rstd);

double gelu(double x);
double gelu_derivative(double x);

nlohmann::json config_to_json(const VitConfig &config);
VitConfig config_from_json(const nlohmann::json &json);

/// Checkpoint schema version written by save_checkpoint.
constexpr int kCheckpointSchemaVersion = 1;

/**
 * JSON checkpoint: {"format": "qpsan-vit", "schema_version": 1,
 * "config": {...}, "parameters": [...]} with the flat vector in layout order.
 */
std::string checkpoint_json(const VitModel &model);
VitModel model_from_checkpoint_json(const std::string &json);
void save_checkpoint(const VitModel &model, const std::string &path);
VitModel load_checkpoint(const std::string &path);

} // namespace qpsan
