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
#include "qpsan/vit.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qpsan {

namespace {

using RowVector = Eigen::RowVectorXd;

std::string layer_prefix(int l) { return "layer" + std::to_string(l) + "."; }

double truncated_normal(std::mt19937_64 &rng, double stddev) {
    std::normal_distribution<double> n(0.0, stddev);
    for (;;) {
        const double x = n(rng);
        if (std::abs(x) <= 2 * stddev) {
            return x;
        }
    }
}

/// Layer-norm backward for y = xhat * gain + bias given dL/dy.
Matrix layer_norm_backward(const Matrix &xhat, const Vector &rstd, const RowVector &gain,
                           const Matrix &d_y, RowVector &d_gain, RowVector &d_bias) {
    d_gain += (d_y.array() * xhat.array()).colwise().sum().matrix();
    d_bias += d_y.colwise().sum();
    const Matrix d_xhat = d_y.array().rowwise() * gain.array();
    const double n = static_cast<double>(xhat.cols());
    Matrix d_x(xhat.rows(), xhat.cols());
    for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
        const double mean_d = d_xhat.row(i).sum() / n;
        const double mean_dx = d_xhat.row(i).dot(xhat.row(i)) / n;
        d_x.row(i) = rstd(i) * (d_xhat.row(i).array() - mean_d - xhat.row(i).array() * mean_dx);
    }
    return d_x;
}

Matrix affine(const Matrix &xhat, const RowVector &gain, const RowVector &bias) {
    return (xhat.array().rowwise() * gain.array()).rowwise() + bias.array();
}

/// One row per patch in raster order; columns in channel, row, column order.
Matrix extract_patches(const Image &image, const VitConfig &c) {
    if (image.size() != c.image_dim()) {
        throw std::invalid_argument("image has " + std::to_string(image.size()) +
                                    " pixels, the model expects " +
                                    std::to_string(c.image_dim()));
    }
    const int ps = c.patch_size, side = c.patches_per_side(), size = c.image_size;
    Matrix patches(c.num_patches(), c.patch_dim());
    for (int py = 0; py < side; ++py) {
        for (int px = 0; px < side; ++px) {
            const int row = py * side + px;
            for (int ch = 0; ch < c.channels; ++ch) {
                for (int dy = 0; dy < ps; ++dy) {
                    for (int dx = 0; dx < ps; ++dx) {
                        patches(row, ch * ps * ps + dy * ps + dx) =
                            image(ch * size * size + (py * ps + dy) * size + px * ps + dx);
                    }
                }
            }
        }
    }
    return patches;
}

} // namespace

// -- config ---------------------------------------------------------------------

void VitConfig::validate() const {
    if (image_size <= 0 || channels <= 0 || patch_size <= 0 || num_layers <= 0 || heads <= 0 ||
        hidden_size <= 0 || mlp_hidden <= 0 || num_classes < 2) {
        throw std::invalid_argument("model config: sizes must be positive and num_classes >= 2");
    }
    if (image_size % patch_size != 0) {
        throw std::invalid_argument("model config: image size " + std::to_string(image_size) +
                                    " is not divisible by patch size " +
                                    std::to_string(patch_size));
    }
    if (hidden_size % heads != 0) {
        throw std::invalid_argument("model config: hidden size " + std::to_string(hidden_size) +
                                    " is not divisible by " + std::to_string(heads) + " heads");
    }
    if (aggregation_depth < 0) {
        throw std::invalid_argument("model config: aggregation depth D must be non-negative");
    }
    attention().validate();
}

int VitConfig::depth() const {
    return aggregation_depth == 0 ? std::min(16, head_dim()) : aggregation_depth;
}

AttentionConfig VitConfig::attention() const {
    return {heads, head_dim(), depth(), scorer};
}

int scorer_parameter_count(const VitConfig &config) {
    switch (config.scorer) {
    case ScorerKind::Qpa: return 5;
    case ScorerKind::QpaInd: return 3;
    case ScorerKind::Mlp49: return mlp_parameter_count(MlpVariant::Params49);
    case ScorerKind::Mlp585: return mlp_parameter_count(MlpVariant::Params585);
    case ScorerKind::Cosine: return config.heads;
    case ScorerKind::Dot:
    case ScorerKind::Linear: return 0;
    }
    return 0;
}

// -- model ------------------------------------------------------------------------

VitModel::VitModel(const VitConfig &config, std::uint64_t seed) : config_(config) {
    config_.validate();
    build_layout();
    initialize(seed);
}

VitModel::VitModel(const VitConfig &config, Vector parameters)
    : config_(config), params_(std::move(parameters)) {
    config_.validate();
    const Vector keep = params_;
    build_layout();
    if (keep.size() != params_.size()) {
        throw std::invalid_argument("parameter vector has " + std::to_string(keep.size()) +
                                    " entries, the config needs " +
                                    std::to_string(params_.size()));
    }
    params_ = keep;
}

void VitModel::build_layout() {
    tensors_.clear();
    Eigen::Index offset = 0;
    auto add = [&](const std::string &name, Eigen::Index rows, Eigen::Index cols) {
        tensors_.push_back({name, offset, rows, cols});
        offset += rows * cols;
    };
    const int d = config_.hidden_size;
    const int m = config_.mlp_hidden;
    add("patch.weight", config_.patch_dim(), d);
    add("patch.bias", 1, d);
    add("cls", 1, d);
    add("pos", config_.num_tokens(), d);
    for (int l = 0; l < config_.num_layers; ++l) {
        const std::string p = layer_prefix(l);
        add(p + "ln1.gain", 1, d);
        add(p + "ln1.bias", 1, d);
        for (const char *w : {"q", "k", "v", "o"}) {
            add(p + "attn.w" + w, d, d);
            add(p + "attn.b" + w, 1, d);
        }
        add(p + "ln2.gain", 1, d);
        add(p + "ln2.bias", 1, d);
        add(p + "ffn.w1", d, m);
        add(p + "ffn.b1", 1, m);
        add(p + "ffn.w2", m, d);
        add(p + "ffn.b2", 1, d);
        if (const int n = scorer_parameter_count(config_); n > 0) {
            add(p + "scorer", n, 1);
        }
    }
    add("final_ln.gain", 1, d);
    add("final_ln.bias", 1, d);
    add("head.weight", d, config_.num_classes);
    add("head.bias", 1, config_.num_classes);
    params_ = Vector::Zero(offset);
}

void VitModel::initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (const auto &t : tensors_) {
        auto block = params_.segment(t.offset, t.size());
        const std::string &n = t.name;
        auto ends_with = [&](const std::string &suffix) {
            return n.size() >= suffix.size() &&
                   n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0;
        };
        if (ends_with(".gain")) {
            block.setOnes();
        } else if (ends_with("scorer")) {
            switch (config_.scorer) {
            case ScorerKind::Qpa: {
                const auto p = initial_qpa_params(rng).to_array();
                for (int i = 0; i < 5; ++i) block(i) = p[i];
                break;
            }
            case ScorerKind::QpaInd: {
                const auto p = initial_qpa_params(rng);
                block << p.theta_s, p.alpha, p.beta;
                break;
            }
            case ScorerKind::Mlp49:
                block = init_mlp_weights(MlpVariant::Params49, rng);
                break;
            case ScorerKind::Mlp585:
                block = init_mlp_weights(MlpVariant::Params585, rng);
                break;
            case ScorerKind::Cosine:
                block.setConstant(std::log(10.0));
                break;
            default:
                break;
            }
        } else if (n == "pos" || ends_with("weight") || ends_with(".wq") || ends_with(".wk") ||
                   ends_with(".wv") || ends_with(".wo") || ends_with(".w1") ||
                   ends_with(".w2")) {
            for (Eigen::Index i = 0; i < block.size(); ++i) {
                block(i) = truncated_normal(rng, 0.02);
            }
        }
        // biases, offsets and the CLS token stay zero
    }
}

const TensorView &VitModel::tensor(const std::string &name) const {
    for (const auto &t : tensors_) {
        if (t.name == name) {
            return t;
        }
    }
    throw std::invalid_argument("no parameter tensor named '" + name + "'");
}

Eigen::Map<Matrix> VitModel::view(const std::string &name) {
    const auto &t = tensor(name);
    return {params_.data() + t.offset, t.rows, t.cols};
}

Eigen::Map<const Matrix> VitModel::view(const std::string &name) const {
    const auto &t = tensor(name);
    return {params_.data() + t.offset, t.rows, t.cols};
}

QpaParams<double> VitModel::qpa_params(int layer) const {
    if (!is_quantum(config_.scorer)) {
        throw std::invalid_argument("qpa_params: the model does not use a quantum scorer");
    }
    const auto s = view(layer_prefix(layer) + "scorer");
    if (config_.scorer == ScorerKind::QpaInd) {
        return {s(0), 0.0, 0.0, s(1), s(2)};
    }
    return {s(0), s(1), s(2), s(3), s(4)};
}

// -- primitives ---------------------------------------------------------------------

Matrix layer_norm(const Matrix &x, Vector &rstd) {
    rstd.resize(x.rows());
    Matrix out(x.rows(), x.cols());
    const double n = static_cast<double>(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double mean = x.row(i).mean();
        const double var = (x.row(i).array() - mean).square().sum() / n;
        rstd(i) = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        out.row(i) = (x.row(i).array() - mean) * rstd(i);
    }
    return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)) + x * pdf;
}

Vector softmax(const Vector &logits) {
    const Vector e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

double cross_entropy(const Vector &logits, int label) {
    if (label < 0 || label >= logits.size()) {
        throw std::invalid_argument("label " + std::to_string(label) + " outside [0, " +
                                    std::to_string(logits.size()) + ")");
    }
    const double m = logits.maxCoeff();
    return m + std::log((logits.array() - m).exp().sum()) - logits(label);
}

// -- forward --------------------------------------------------------------------------

Matrix VitModel::patch_embed(const Image &image) const {
    return (extract_patches(image, config_) * view("patch.weight")).rowwise() +
           RowVector(view("patch.bias"));
}

Vector VitModel::forward(const Image &image, const ForwardOptions &options) const {
    ForwardCache cache;
    return forward(image, cache, options);
}

Vector VitModel::forward(const Image &image, ForwardCache &cache,
                         const ForwardOptions &options) const {
    const VitConfig &c = config_;
    const int dh = c.head_dim(), depth = c.depth();
    cache.patches = extract_patches(image, c);
    Matrix x(c.num_tokens(), c.hidden_size);
    x.row(0) = view("cls");
    x.bottomRows(c.num_patches()) =
        (cache.patches * view("patch.weight")).rowwise() + RowVector(view("patch.bias"));
    x += view("pos");

    cache.layers.assign(c.num_layers, {});
    for (int l = 0; l < c.num_layers; ++l) {
        const std::string p = layer_prefix(l);
        LayerCache &lc = cache.layers[l];
        lc.input = x;
        lc.ln1 = layer_norm(x, lc.ln1_rstd);
        const Matrix u = affine(lc.ln1, view(p + "ln1.gain"), view(p + "ln1.bias"));
        lc.q = (u * view(p + "attn.wq")).rowwise() + RowVector(view(p + "attn.bq"));
        lc.k = (u * view(p + "attn.wk")).rowwise() + RowVector(view(p + "attn.bk"));
        lc.v = (u * view(p + "attn.wv")).rowwise() + RowVector(view(p + "attn.bv"));

        lc.heads_out.resize(c.num_tokens(), c.hidden_size);
        lc.probs.assign(c.scorer == ScorerKind::Linear ? 0 : c.heads, Matrix());
        for (int h = 0; h < c.heads; ++h) {
            const Matrix qh = lc.q.middleCols(h * dh, dh);
            const Matrix kh = lc.k.middleCols(h * dh, dh);
            const Matrix vh = lc.v.middleCols(h * dh, dh);
            if (c.scorer == ScorerKind::Linear) {
                lc.heads_out.middleCols(h * dh, dh) = linear_attention(qh, kh, vh);
                continue;
            }
            Matrix scores;
            switch (c.scorer) {
            case ScorerKind::Qpa:
            case ScorerKind::QpaInd: {
                const CircuitOptions opts{c.scorer == ScorerKind::QpaInd ? Encoding::Independent
                                                                         : Encoding::ThreeStep,
                                          EntanglerOrder::ControlZeroFirst};
                scores = options.noise ? qpa_scores_noisy(qh, kh, qpa_params(l), depth, opts,
                                                          *options.noise,
                                                          options.noise_strength)
                                       : qpa_scores(qh, kh, qpa_params(l), depth, opts);
                break;
            }
            case ScorerKind::Dot:
                scores = dot_scores(qh, kh);
                break;
            case ScorerKind::Mlp49:
            case ScorerKind::Mlp585:
                scores = mlp_scores(qh, kh,
                                    c.scorer == ScorerKind::Mlp49 ? MlpVariant::Params49
                                                                  : MlpVariant::Params585,
                                    view(p + "scorer").col(0), depth);
                break;
            case ScorerKind::Cosine:
                scores = cosine_scores(qh, kh, std::exp(view(p + "scorer")(h)));
                break;
            case ScorerKind::Linear:
                break;
            }
            lc.probs[h] = softmax_rows(scores);
            lc.heads_out.middleCols(h * dh, dh) = lc.probs[h] * vh;
        }
        lc.mid = x + ((lc.heads_out * view(p + "attn.wo")).rowwise() +
                      RowVector(view(p + "attn.bo")));

        lc.ln2 = layer_norm(lc.mid, lc.ln2_rstd);
        const Matrix u2 = affine(lc.ln2, view(p + "ln2.gain"), view(p + "ln2.bias"));
        lc.ffn_pre = (u2 * view(p + "ffn.w1")).rowwise() + RowVector(view(p + "ffn.b1"));
        lc.ffn_act = lc.ffn_pre.unaryExpr([](double t) { return gelu(t); });
        x = lc.mid + ((lc.ffn_act * view(p + "ffn.w2")).rowwise() +
                      RowVector(view(p + "ffn.b2")));
    }
    cache.final_stream = x;

    Vector rstd;
    const Matrix cls_norm = layer_norm(x.topRows(1), rstd);
    cache.cls_norm = cls_norm.row(0);
    cache.cls_rstd = rstd(0);
    const Matrix z = affine(cls_norm, view("final_ln.gain"), view("final_ln.bias"));
    cache.logits = ((z * view("head.weight")) + view("head.bias")).transpose();
    return cache.logits;
}

// -- backward ---------------------------------------------------------------------------

double VitModel::backward(const Image &image, int label, Vector &grad, double weight) const {
    const VitConfig &c = config_;
    if (label < 0 || label >= c.num_classes) {
        throw std::invalid_argument("label " + std::to_string(label) + " outside [0, " +
                                    std::to_string(c.num_classes) + ")");
    }
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("gradient buffer size does not match the parameter count");
    }
    ForwardCache cache;
    const Vector logits = forward(image, cache);
    const double loss = cross_entropy(logits, label);

    auto g = [&](const std::string &name) -> Eigen::Map<Matrix> {
        const auto &t = tensor(name);
        return {grad.data() + t.offset, t.rows, t.cols};
    };
    const int dh = c.head_dim(), depth = c.depth();

    // classifier head and final norm on the CLS row
    RowVector d_logits = softmax(logits).transpose();
    d_logits(label) -= 1.0;
    d_logits *= weight;
    const RowVector z = cache.cls_norm.array() * RowVector(view("final_ln.gain")).array() +
                        RowVector(view("final_ln.bias")).array();
    g("head.weight") += z.transpose() * d_logits;
    g("head.bias") += d_logits;
    const Matrix d_z = d_logits * view("head.weight").transpose();
    RowVector d_gain = RowVector::Zero(c.hidden_size), d_bias = RowVector::Zero(c.hidden_size);
    Vector cls_rstd(1);
    cls_rstd << cache.cls_rstd;
    const Matrix d_cls = layer_norm_backward(cache.cls_norm, cls_rstd, view("final_ln.gain"),
                                             d_z, d_gain, d_bias);
    g("final_ln.gain") += d_gain;
    g("final_ln.bias") += d_bias;

    Matrix d_x = Matrix::Zero(c.num_tokens(), c.hidden_size);
    d_x.row(0) = d_cls.row(0);

    for (int l = c.num_layers - 1; l >= 0; --l) {
        const std::string p = layer_prefix(l);
        const LayerCache &lc = cache.layers[l];

        // feed-forward branch
        const Matrix u2 = affine(lc.ln2, view(p + "ln2.gain"), view(p + "ln2.bias"));
        g(p + "ffn.w2") += lc.ffn_act.transpose() * d_x;
        g(p + "ffn.b2") += d_x.colwise().sum();
        const Matrix d_pre = (d_x * view(p + "ffn.w2").transpose()).array() *
                             lc.ffn_pre.unaryExpr([](double t) { return gelu_derivative(t); })
                                 .array();
        g(p + "ffn.w1") += u2.transpose() * d_pre;
        g(p + "ffn.b1") += d_pre.colwise().sum();
        const Matrix d_u2 = d_pre * view(p + "ffn.w1").transpose();
        d_gain.setZero();
        d_bias.setZero();
        const Matrix d_mid = d_x + layer_norm_backward(lc.ln2, lc.ln2_rstd, view(p + "ln2.gain"),
                                                       d_u2, d_gain, d_bias);
        g(p + "ln2.gain") += d_gain;
        g(p + "ln2.bias") += d_bias;

        // attention branch
        g(p + "attn.wo") += lc.heads_out.transpose() * d_mid;
        g(p + "attn.bo") += d_mid.colwise().sum();
        const Matrix d_heads = d_mid * view(p + "attn.wo").transpose();
        Matrix d_q = Matrix::Zero(c.num_tokens(), c.hidden_size);
        Matrix d_k = Matrix::Zero(c.num_tokens(), c.hidden_size);
        Matrix d_v = Matrix::Zero(c.num_tokens(), c.hidden_size);
        for (int h = 0; h < c.heads; ++h) {
            const Matrix qh = lc.q.middleCols(h * dh, dh);
            const Matrix kh = lc.k.middleCols(h * dh, dh);
            const Matrix vh = lc.v.middleCols(h * dh, dh);
            const Matrix d_oh = d_heads.middleCols(h * dh, dh);
            Matrix d_qh = Matrix::Zero(qh.rows(), dh);
            Matrix d_kh = Matrix::Zero(kh.rows(), dh);
            Matrix d_vh = Matrix::Zero(vh.rows(), dh);
            if (c.scorer == ScorerKind::Linear) {
                linear_attention_backward(qh, kh, vh, d_oh, d_qh, d_kh, d_vh);
            } else {
                Matrix d_scores = Matrix::Zero(qh.rows(), kh.rows());
                softmax_weighted_sum_backward(lc.probs[h], vh, d_oh, d_scores, d_vh);
                switch (c.scorer) {
                case ScorerKind::Qpa:
                case ScorerKind::QpaInd: {
                    const bool ind = c.scorer == ScorerKind::QpaInd;
                    const CircuitOptions opts{ind ? Encoding::Independent : Encoding::ThreeStep,
                                              EntanglerOrder::ControlZeroFirst};
                    std::array<double, 5> d_p{};
                    qpa_scores_backward(qh, kh, qpa_params(l), depth, opts, d_scores, d_qh, d_kh,
                                        d_p);
                    auto gs = g(p + "scorer");
                    if (ind) {
                        gs(0) += d_p[0];
                        gs(1) += d_p[3];
                        gs(2) += d_p[4];
                    } else {
                        for (int i = 0; i < 5; ++i) gs(i) += d_p[i];
                    }
                    break;
                }
                case ScorerKind::Dot:
                    dot_scores_backward(qh, kh, d_scores, d_qh, d_kh);
                    break;
                case ScorerKind::Mlp49:
                case ScorerKind::Mlp585: {
                    const auto variant = c.scorer == ScorerKind::Mlp49 ? MlpVariant::Params49
                                                                       : MlpVariant::Params585;
                    auto gs = g(p + "scorer");
                    auto d_weights = gs.col(0);
                    mlp_scores_backward(qh, kh, variant, view(p + "scorer").col(0), depth,
                                        d_scores, d_qh, d_kh, d_weights);
                    break;
                }
                case ScorerKind::Cosine:
                    g(p + "scorer")(h) += cosine_scores_backward(
                        qh, kh, view(p + "scorer")(h), d_scores, d_qh, d_kh);
                    break;
                case ScorerKind::Linear:
                    break;
                }
            }
            d_q.middleCols(h * dh, dh) = d_qh;
            d_k.middleCols(h * dh, dh) = d_kh;
            d_v.middleCols(h * dh, dh) = d_vh;
        }
        const Matrix u = affine(lc.ln1, view(p + "ln1.gain"), view(p + "ln1.bias"));
        g(p + "attn.wq") += u.transpose() * d_q;
        g(p + "attn.bq") += d_q.colwise().sum();
        g(p + "attn.wk") += u.transpose() * d_k;
        g(p + "attn.bk") += d_k.colwise().sum();
        g(p + "attn.wv") += u.transpose() * d_v;
        g(p + "attn.bv") += d_v.colwise().sum();
        const Matrix d_u = d_q * view(p + "attn.wq").transpose() +
                           d_k * view(p + "attn.wk").transpose() +
                           d_v * view(p + "attn.wv").transpose();
        d_gain.setZero();
        d_bias.setZero();
        d_x = d_mid + layer_norm_backward(lc.ln1, lc.ln1_rstd, view(p + "ln1.gain"), d_u, d_gain,
                                          d_bias);
        g(p + "ln1.gain") += d_gain;
        g(p + "ln1.bias") += d_bias;
    }

    g("pos") += d_x;
    g("cls") += d_x.row(0);
    const auto d_tokens = d_x.bottomRows(c.num_patches());
    g("patch.weight") += cache.patches.transpose() * d_tokens;
    g("patch.bias") += d_tokens.colwise().sum();
    return loss;
}

// -- checkpoints ----------------------------------------------------------------------------

nlohmann::json config_to_json(const VitConfig &c) {
    return {{"image_size", c.image_size},   {"channels", c.channels},
            {"patch_size", c.patch_size},   {"num_layers", c.num_layers},
            {"heads", c.heads},             {"hidden_size", c.hidden_size},
            {"mlp_hidden", c.mlp_hidden},   {"num_classes", c.num_classes},
            {"scorer", to_string(c.scorer)}, {"aggregation_depth", c.depth()}};
}

VitConfig config_from_json(const nlohmann::json &j) {
    VitConfig c;
    c.image_size = j.at("image_size").get<int>();
    c.channels = j.at("channels").get<int>();
    c.patch_size = j.at("patch_size").get<int>();
    c.num_layers = j.at("num_layers").get<int>();
    c.heads = j.at("heads").get<int>();
    c.hidden_size = j.at("hidden_size").get<int>();
    c.mlp_hidden = j.at("mlp_hidden").get<int>();
    c.num_classes = j.at("num_classes").get<int>();
    c.scorer = parse_scorer_kind(j.at("scorer").get<std::string>());
    c.aggregation_depth = j.at("aggregation_depth").get<int>();
    return c;
}

std::string checkpoint_json(const VitModel &model) {
    const Vector &p = model.parameters();
    nlohmann::json j;
    j["format"] = "qpsan-vit";
    j["schema_version"] = kCheckpointSchemaVersion;
    j["config"] = config_to_json(model.config());
    j["parameters"] = std::vector<double>(p.data(), p.data() + p.size());
    return j.dump();
}

VitModel model_from_checkpoint_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        if (j.at("format") != "qpsan-vit") {
            throw std::invalid_argument("checkpoint: unexpected format tag");
        }
        if (j.at("schema_version").get<int>() != kCheckpointSchemaVersion) {
            throw std::invalid_argument("checkpoint: unsupported schema version " +
                                        j.at("schema_version").dump());
        }
        const auto values = j.at("parameters").get<std::vector<double>>();
        Vector params = Eigen::Map<const Vector>(values.data(),
                                                 static_cast<Eigen::Index>(values.size()));
        return VitModel(config_from_json(j.at("config")), std::move(params));
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const VitModel &model, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint '" + path + "'");
    }
    out << checkpoint_json(model) << '\n';
}

VitModel load_checkpoint(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read checkpoint '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_checkpoint_json(buffer.str());
}

} // namespace qpsan
