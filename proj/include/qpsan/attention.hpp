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
 * Attention scoring functions and their backward passes.
 *
 * All matrices are token-major: Q, K, V are N x d_h with one row per token,
 * score matrices are N x N with rows indexed by query and columns by key.
 * Backward functions accumulate into their output arguments.
 */
#pragma once

#include "qpsan/circuit.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <random>
#include <string>

namespace qpsan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ScorerKind { Qpa, Dot, Mlp49, Mlp585, Cosine, Linear, QpaInd };

/// Config keys: "qpa" | "dot" | "mlp49" | "mlp585" | "cosine" | "linear" | "qpa-ind".
ScorerKind parse_scorer_kind(const std::string &key);
const char *to_string(ScorerKind kind);

inline bool is_quantum(ScorerKind k) { return k == ScorerKind::Qpa || k == ScorerKind::QpaInd; }
/// Scorers that sum a per-dimension score over the first D dimensions.
inline bool is_per_dimension(ScorerKind k) {
    return is_quantum(k) || k == ScorerKind::Mlp49 || k == ScorerKind::Mlp585;
}

struct AttentionConfig {
    int heads = 1;
    int head_dim = 1;
    int aggregation_depth = 16; ///< D, at most head_dim
    ScorerKind scorer = ScorerKind::Qpa;

    /// Throws std::invalid_argument on D > d_h or non-positive sizes.
    void validate() const;
    int hidden_size() const { return heads * head_dim; }
};

// -- quantum scorers ---------------------------------------------------------

/// A(i, j) = sum_{d < D} mu(Q(i, d), K(j, d)); entries in [0, D], unscaled.
Matrix qpa_scores(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                  int depth, const CircuitOptions &opts = {});

/// qpa_scores with the single-parameter independent encoding.
Matrix qpsan_ind_scores(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                        int depth);

/// Accumulates dQ, dK and d(params) given dL/dA.
void qpa_scores_backward(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                         int depth, const CircuitOptions &opts, const Matrix &d_scores,
                         Matrix &d_q, Matrix &d_k, std::array<double, 5> &d_params);

/// qpa_scores with every circuit evaluation followed by `channel` on both
/// qubits (score_noisy_fast, equal to the density-matrix route).
Matrix qpa_scores_noisy(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                        int depth, const CircuitOptions &opts, NoiseChannel channel,
                        double gamma);

// -- dot product ---------------------------------------------------------------

/// Q K^T / sqrt(d_h).
Matrix dot_scores(const Matrix &q, const Matrix &k);
void dot_scores_backward(const Matrix &q, const Matrix &k, const Matrix &d_scores,
                         Matrix &d_q, Matrix &d_k);

// -- MLP scorers ---------------------------------------------------------------

enum class MlpVariant {
    Params49,  ///< 4 -> 8 (tanh) -> 1
    Params585, ///< 4 -> 64 (tanh) -> 4 (tanh) -> 1
};

int mlp_parameter_count(MlpVariant v);

struct MlpScorerParams {
    MlpVariant variant = MlpVariant::Params49;
    Vector weights; ///< flat, layer by layer: W1 (col-major), b1, W2, b2[, w3, b3]

    int count() const { return static_cast<int>(weights.size()); }
};

/// Uniform in +-1/sqrt(fan_in) per layer.
Vector init_mlp_weights(MlpVariant v, std::mt19937_64 &rng);

/// sigmoid(MLP([q, k, q - k, q + k])) with tanh hidden layers.
double mlp_score(double q, double k, MlpVariant v, const Eigen::Ref<const Vector> &weights);
inline double mlp_score(double q, double k, const MlpScorerParams &p) {
    return mlp_score(q, k, p.variant, p.weights);
}

struct MlpPartials {
    double value;
    double d_q;
    double d_k;
};

/// Returns the score with upstream * dS/dq and upstream * dS/dk; adds
/// upstream * dS/dw to d_weights.
MlpPartials mlp_score_backward(double q, double k, MlpVariant v,
                               const Eigen::Ref<const Vector> &weights, double upstream,
                               Eigen::Ref<Vector> d_weights);

Matrix mlp_scores(const Matrix &q, const Matrix &k, MlpVariant v,
                  const Eigen::Ref<const Vector> &weights, int depth);
void mlp_scores_backward(const Matrix &q, const Matrix &k, MlpVariant v,
                         const Eigen::Ref<const Vector> &weights, int depth,
                         const Matrix &d_scores, Matrix &d_q, Matrix &d_k,
                         Eigen::Ref<Vector> d_weights);

// -- cosine --------------------------------------------------------------------

constexpr double kCosineEpsilon = 1e-12;
constexpr double kMaxTemperature = 100.0;

/// cos(Q_i, K_j) * exp(min(log tau, log 100)).
Matrix cosine_scores(const Matrix &q, const Matrix &k, double tau);

/// Backward for the log-temperature parametrisation; returns dL/d(log tau).
double cosine_scores_backward(const Matrix &q, const Matrix &k, double log_tau,
                              const Matrix &d_scores, Matrix &d_q, Matrix &d_k);

// -- linear attention ------------------------------------------------------------

constexpr double kLinearEpsilon = 1e-6;

/// elu(x) + 1, elementwise.
Matrix kernel_feature(const Matrix &x);

/// phi(Q) (phi(K)^T V) / (phi(Q) . sum_j phi(k_j) + eps), O(N d^2).
Matrix linear_attention(const Matrix &q, const Matrix &k, const Matrix &v);
void linear_attention_backward(const Matrix &q, const Matrix &k, const Matrix &v,
                               const Matrix &d_out, Matrix &d_q, Matrix &d_k, Matrix &d_v);

// -- aggregation -----------------------------------------------------------------

Matrix softmax_rows(const Matrix &scores);

/// softmax(A) V with the softmax taken over each row.
Matrix softmax_weighted_sum(const Matrix &scores, const Matrix &v);

/// Given P = softmax_rows(A), accumulates dL/dA and dL/dV.
void softmax_weighted_sum_backward(const Matrix &probs, const Matrix &v,
                                   const Matrix &d_out, Matrix &d_scores, Matrix &d_v);

} // namespace qpsan
