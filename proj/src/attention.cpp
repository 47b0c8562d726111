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
#include "qpsan/attention.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qpsan {

ScorerKind parse_scorer_kind(const std::string &key) {
    if (key == "qpa") return ScorerKind::Qpa;
    if (key == "dot") return ScorerKind::Dot;
    if (key == "mlp49") return ScorerKind::Mlp49;
    if (key == "mlp585") return ScorerKind::Mlp585;
    if (key == "cosine") return ScorerKind::Cosine;
    if (key == "linear") return ScorerKind::Linear;
    if (key == "qpa-ind") return ScorerKind::QpaInd;
    throw std::invalid_argument("unknown scorer '" + key +
                                "' (expected qpa, dot, mlp49, mlp585, cosine, linear or qpa-ind)");
}

const char *to_string(ScorerKind kind) {
    switch (kind) {
    case ScorerKind::Qpa: return "qpa";
    case ScorerKind::Dot: return "dot";
    case ScorerKind::Mlp49: return "mlp49";
    case ScorerKind::Mlp585: return "mlp585";
    case ScorerKind::Cosine: return "cosine";
    case ScorerKind::Linear: return "linear";
    case ScorerKind::QpaInd: return "qpa-ind";
    }
    return "?";
}

void AttentionConfig::validate() const {
    if (heads <= 0 || head_dim <= 0) {
        throw std::invalid_argument("attention: heads and head_dim must be positive");
    }
    if (aggregation_depth <= 0) {
        throw std::invalid_argument("attention: aggregation depth D must be positive");
    }
    if (aggregation_depth > head_dim) {
        throw std::invalid_argument("attention: aggregation depth D = " +
                                    std::to_string(aggregation_depth) +
                                    " exceeds head dimension " + std::to_string(head_dim));
    }
}

namespace {

void check_depth(const Matrix &q, const Matrix &k, int depth) {
    if (q.cols() != k.cols()) {
        throw std::invalid_argument("query and key widths differ");
    }
    if (depth <= 0 || depth > q.cols()) {
        throw std::invalid_argument("aggregation depth D = " + std::to_string(depth) +
                                    " must lie in [1, d_h = " + std::to_string(q.cols()) + "]");
    }
}

} // namespace

namespace {

using Half = detail::HalfAngle<double>;

/// Per-entry trig tables so each (query, key) pair composes its gate angles
/// with a handful of multiplications instead of fresh sin/cos calls.
struct AngleTables {
    // query side: pi/4 + a q, pi/4 + b q, alpha q
    std::vector<Half> q0, q1, qa;
    // key side: b k, a k, alpha k
    std::vector<Half> k0, k1, ka;
    Half mixer;
    Eigen::Index depth;

    AngleTables(const Matrix &q, const Matrix &k, const QpaParams<double> &p, int d,
                const CircuitOptions &opts)
        : depth(d) {
        constexpr double quarter = std::numbers::pi / 4;
        const bool independent = opts.encoding == Encoding::Independent;
        const double a = independent ? p.theta_s : p.lambda1();
        const double b = independent ? 0.0 : p.lambda2();
        mixer = Half::of(2 * p.beta);
        q0.resize(q.rows() * d);
        q1.resize(q.rows() * d);
        qa.resize(q.rows() * d);
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            for (int t = 0; t < d; ++t) {
                const double x = q(i, t);
                q0[i * d + t] = Half::of(quarter + a * x);
                q1[i * d + t] = Half::of(quarter + b * x);
                qa[i * d + t] = Half::of(p.alpha * x);
            }
        }
        k0.resize(k.rows() * d);
        k1.resize(k.rows() * d);
        ka.resize(k.rows() * d);
        for (Eigen::Index j = 0; j < k.rows(); ++j) {
            for (int t = 0; t < d; ++t) {
                const double x = k(j, t);
                k0[j * d + t] = Half::of(b * x);
                k1[j * d + t] = Half::of(a * x);
                ka[j * d + t] = Half::of(p.alpha * x);
            }
        }
    }

    Half e0(Eigen::Index i, Eigen::Index j, int t) const {
        return detail::compose(q0[i * depth + t], k0[j * depth + t]);
    }
    Half e1(Eigen::Index i, Eigen::Index j, int t) const {
        return detail::compose(q1[i * depth + t], k1[j * depth + t]);
    }
    Half ent(Eigen::Index i, Eigen::Index j, int t) const {
        return detail::compose(qa[i * depth + t], ka[j * depth + t]);
    }
};

} // namespace

Matrix qpa_scores(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                  int depth, const CircuitOptions &opts) {
    check_depth(q, k, depth);
    const AngleTables tables(q, k, params, depth, opts);
    Matrix a = Matrix::Zero(q.rows(), k.rows());
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            double sum = 0;
            for (int d = 0; d < depth; ++d) {
                sum += detail::agreement(tables.e0(i, j, d), tables.e1(i, j, d),
                                         tables.ent(i, j, d), tables.mixer, tables.mixer,
                                         opts.order);
            }
            a(i, j) = sum;
        }
    }
    return a;
}

Matrix qpsan_ind_scores(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                        int depth) {
    return qpa_scores(q, k, params, depth, {Encoding::Independent, EntanglerOrder::ControlZeroFirst});
}

void qpa_scores_backward(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                         int depth, const CircuitOptions &opts, const Matrix &d_scores,
                         Matrix &d_q, Matrix &d_k, std::array<double, 5> &d_params) {
    check_depth(q, k, depth);
    const AngleTables tables(q, k, params, depth, opts);
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            const double up = d_scores(i, j);
            if (up == 0.0) {
                continue;
            }
            for (int d = 0; d < depth; ++d) {
                const auto g = detail::gradient_from_angles(
                    tables.e0(i, j, d), tables.e1(i, j, d), tables.ent(i, j, d), tables.mixer,
                    q(i, d), k(j, d), params, opts);
                d_q(i, d) += up * g.d_q;
                d_k(j, d) += up * g.d_k;
                for (int p = 0; p < 5; ++p) {
                    d_params[p] += up * g.d_params[p];
                }
            }
        }
    }
}

Matrix qpa_scores_noisy(const Matrix &q, const Matrix &k, const QpaParams<double> &params,
                        int depth, const CircuitOptions &opts, NoiseChannel channel,
                        double gamma) {
    check_depth(q, k, depth);
    population_transfer(channel, gamma); // validates gamma up front
    Matrix a = Matrix::Zero(q.rows(), k.rows());
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            double sum = 0;
            for (int d = 0; d < depth; ++d) {
                sum += score_noisy_fast(q(i, d), k(j, d), params, channel, gamma, opts);
            }
            a(i, j) = sum;
        }
    }
    return a;
}

Matrix dot_scores(const Matrix &q, const Matrix &k) {
    if (q.cols() != k.cols()) {
        throw std::invalid_argument("dot_scores: query and key widths differ");
    }
    return q * k.transpose() / std::sqrt(static_cast<double>(q.cols()));
}

void dot_scores_backward(const Matrix &q, const Matrix &k, const Matrix &d_scores,
                         Matrix &d_q, Matrix &d_k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    d_q.noalias() += scale * d_scores * k;
    d_k.noalias() += scale * d_scores.transpose() * q;
}

// -- MLP -------------------------------------------------------------------------

namespace {

struct MlpShape {
    int hidden1;
    int hidden2; ///< 0 for the two-layer variant
};

MlpShape shape_of(MlpVariant v) {
    return v == MlpVariant::Params49 ? MlpShape{8, 0} : MlpShape{64, 4};
}

using ConstMap = Eigen::Map<const Matrix>;
using ConstVecMap = Eigen::Map<const Vector>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::Vector4d features(double q, double k) { return {q, k, q - k, q + k}; }

void require_weight_count(MlpVariant v, Eigen::Index n) {
    if (n != mlp_parameter_count(v)) {
        throw std::invalid_argument("MLP scorer expects " +
                                    std::to_string(mlp_parameter_count(v)) +
                                    " weights, got " + std::to_string(n));
    }
}

} // namespace

int mlp_parameter_count(MlpVariant v) {
    const MlpShape s = shape_of(v);
    if (s.hidden2 == 0) {
        return s.hidden1 * 4 + s.hidden1 + s.hidden1 + 1;
    }
    return s.hidden1 * 4 + s.hidden1 + s.hidden2 * s.hidden1 + s.hidden2 + s.hidden2 + 1;
}

Vector init_mlp_weights(MlpVariant v, std::mt19937_64 &rng) {
    const MlpShape s = shape_of(v);
    Vector w(mlp_parameter_count(v));
    Eigen::Index at = 0;
    auto fill = [&](Eigen::Index n, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < n; ++i) {
            w(at++) = u(rng);
        }
    };
    fill(s.hidden1 * 4 + s.hidden1, 4);
    if (s.hidden2 == 0) {
        fill(s.hidden1 + 1, s.hidden1);
    } else {
        fill(s.hidden2 * s.hidden1 + s.hidden2, s.hidden1);
        fill(s.hidden2 + 1, s.hidden2);
    }
    return w;
}

double mlp_score(double q, double k, MlpVariant v, const Eigen::Ref<const Vector> &weights) {
    require_weight_count(v, weights.size());
    const MlpShape s = shape_of(v);
    const double *w = weights.data();
    const ConstMap w1(w, s.hidden1, 4);
    const ConstVecMap b1(w + s.hidden1 * 4, s.hidden1);
    const Vector h1 = (w1 * features(q, k) + b1).array().tanh();
    const double *rest = w + s.hidden1 * 5;
    if (s.hidden2 == 0) {
        return sigmoid(ConstVecMap(rest, s.hidden1).dot(h1) + rest[s.hidden1]);
    }
    const ConstMap w2(rest, s.hidden2, s.hidden1);
    const ConstVecMap b2(rest + s.hidden2 * s.hidden1, s.hidden2);
    const Vector h2 = (w2 * h1 + b2).array().tanh();
    const double *out = rest + s.hidden2 * s.hidden1 + s.hidden2;
    return sigmoid(ConstVecMap(out, s.hidden2).dot(h2) + out[s.hidden2]);
}

MlpPartials mlp_score_backward(double q, double k, MlpVariant v,
                               const Eigen::Ref<const Vector> &weights, double upstream,
                               Eigen::Ref<Vector> d_weights) {
    require_weight_count(v, weights.size());
    require_weight_count(v, d_weights.size());
    const MlpShape s = shape_of(v);
    const double *w = weights.data();
    double *dw = d_weights.data();
    const Eigen::Vector4d f = features(q, k);
    const ConstMap w1(w, s.hidden1, 4);
    const ConstVecMap b1(w + s.hidden1 * 4, s.hidden1);
    const Vector h1 = (w1 * f + b1).array().tanh();
    const double *rest = w + s.hidden1 * 5;
    double *d_rest = dw + s.hidden1 * 5;

    Vector d_h1;
    double value;
    if (s.hidden2 == 0) {
        const ConstVecMap w_out(rest, s.hidden1);
        value = sigmoid(w_out.dot(h1) + rest[s.hidden1]);
        const double dz = upstream * value * (1 - value);
        Eigen::Map<Vector>(d_rest, s.hidden1) += dz * h1;
        d_rest[s.hidden1] += dz;
        d_h1 = dz * w_out;
    } else {
        const ConstMap w2(rest, s.hidden2, s.hidden1);
        const ConstVecMap b2(rest + s.hidden2 * s.hidden1, s.hidden2);
        const Vector h2 = (w2 * h1 + b2).array().tanh();
        const double *out = rest + s.hidden2 * s.hidden1 + s.hidden2;
        double *d_out = d_rest + s.hidden2 * s.hidden1 + s.hidden2;
        const ConstVecMap w_out(out, s.hidden2);
        value = sigmoid(w_out.dot(h2) + out[s.hidden2]);
        const double dz = upstream * value * (1 - value);
        Eigen::Map<Vector>(d_out, s.hidden2) += dz * h2;
        d_out[s.hidden2] += dz;
        const Vector d_a2 = (dz * w_out).array() * (1 - h2.array().square());
        Eigen::Map<Matrix>(d_rest, s.hidden2, s.hidden1) += d_a2 * h1.transpose();
        Eigen::Map<Vector>(d_rest + s.hidden2 * s.hidden1, s.hidden2) += d_a2;
        d_h1 = w2.transpose() * d_a2;
    }
    const Vector d_a1 = d_h1.array() * (1 - h1.array().square());
    Eigen::Map<Matrix>(dw, s.hidden1, 4) += d_a1 * f.transpose();
    Eigen::Map<Vector>(dw + s.hidden1 * 4, s.hidden1) += d_a1;
    const Eigen::Vector4d d_f = w1.transpose() * d_a1;
    return {value, d_f(0) + d_f(2) + d_f(3), d_f(1) - d_f(2) + d_f(3)};
}

Matrix mlp_scores(const Matrix &q, const Matrix &k, MlpVariant v,
                  const Eigen::Ref<const Vector> &weights, int depth) {
    check_depth(q, k, depth);
    Matrix a = Matrix::Zero(q.rows(), k.rows());
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            double sum = 0;
            for (int d = 0; d < depth; ++d) {
                sum += mlp_score(q(i, d), k(j, d), v, weights);
            }
            a(i, j) = sum;
        }
    }
    return a;
}

void mlp_scores_backward(const Matrix &q, const Matrix &k, MlpVariant v,
                         const Eigen::Ref<const Vector> &weights, int depth,
                         const Matrix &d_scores, Matrix &d_q, Matrix &d_k,
                         Eigen::Ref<Vector> d_weights) {
    check_depth(q, k, depth);
    for (Eigen::Index j = 0; j < k.rows(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            for (int d = 0; d < depth; ++d) {
                const auto g =
                    mlp_score_backward(q(i, d), k(j, d), v, weights, d_scores(i, j), d_weights);
                d_q(i, d) += g.d_q;
                d_k(j, d) += g.d_k;
            }
        }
    }
}

// -- cosine ------------------------------------------------------------------------

namespace {

Matrix normalize_rows(const Matrix &x, Vector &norms) {
    norms = x.rowwise().norm();
    Matrix out = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.row(i) /= norms(i) + kCosineEpsilon;
    }
    return out;
}

/// Backprop through x / (|x| + eps), row by row.
void normalize_rows_backward(const Matrix &x, const Vector &norms, const Matrix &d_unit,
                             Matrix &d_x) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double n = norms(i);
        const double denom = n + kCosineEpsilon;
        d_x.row(i) += d_unit.row(i) / denom;
        if (n > 0) {
            d_x.row(i) -= x.row(i) * (x.row(i).dot(d_unit.row(i)) / (n * denom * denom));
        }
    }
}

} // namespace

Matrix cosine_scores(const Matrix &q, const Matrix &k, double tau) {
    if (!(tau > 0)) {
        throw std::invalid_argument("cosine_scores: temperature must be positive");
    }
    Vector nq, nk;
    const double multiplier = std::exp(std::min(std::log(tau), std::log(kMaxTemperature)));
    return multiplier * normalize_rows(q, nq) * normalize_rows(k, nk).transpose();
}

double cosine_scores_backward(const Matrix &q, const Matrix &k, double log_tau,
                              const Matrix &d_scores, Matrix &d_q, Matrix &d_k) {
    Vector nq, nk;
    const Matrix uq = normalize_rows(q, nq);
    const Matrix uk = normalize_rows(k, nk);
    const bool capped = log_tau >= std::log(kMaxTemperature);
    const double multiplier = std::exp(std::min(log_tau, std::log(kMaxTemperature)));
    const Matrix cosines = uq * uk.transpose();
    normalize_rows_backward(q, nq, multiplier * d_scores * uk, d_q);
    normalize_rows_backward(k, nk, multiplier * d_scores.transpose() * uq, d_k);
    return capped ? 0.0 : multiplier * (d_scores.array() * cosines.array()).sum();
}

// -- linear --------------------------------------------------------------------------

Matrix kernel_feature(const Matrix &x) {
    return x.unaryExpr([](double v) { return v > 0 ? v + 1.0 : std::exp(v); });
}

Matrix linear_attention(const Matrix &q, const Matrix &k, const Matrix &v) {
    if (q.cols() != k.cols() || k.rows() != v.rows()) {
        throw std::invalid_argument("linear_attention: shape mismatch");
    }
    const Matrix fq = kernel_feature(q);
    const Matrix fk = kernel_feature(k);
    const Matrix kv = fk.transpose() * v;                 // d x d_v
    const Vector key_sum = fk.colwise().sum().transpose(); // d
    const Vector denom = (fq * key_sum).array() + kLinearEpsilon;
    return (fq * kv).array().colwise() / denom.array();
}

void linear_attention_backward(const Matrix &q, const Matrix &k, const Matrix &v,
                               const Matrix &d_out, Matrix &d_q, Matrix &d_k, Matrix &d_v) {
    const Matrix fq = kernel_feature(q);
    const Matrix fk = kernel_feature(k);
    const Matrix kv = fk.transpose() * v;
    const Vector key_sum = fk.colwise().sum().transpose();
    const Vector denom = (fq * key_sum).array() + kLinearEpsilon;
    const Matrix num = fq * kv;

    const Matrix d_num = d_out.array().colwise() / denom.array();
    const Vector d_denom =
        -(d_out.array() * num.array()).rowwise().sum() / denom.array().square();

    Matrix d_fq = d_num * kv.transpose();
    d_fq += d_denom * key_sum.transpose();
    const Matrix d_kv = fq.transpose() * d_num;
    const Vector d_key_sum = fq.transpose() * d_denom;
    Matrix d_fk = v * d_kv.transpose();
    d_fk.rowwise() += d_key_sum.transpose();
    d_v.noalias() += fk * d_kv;

    auto feature_grad = [](const Matrix &x) {
        return x.unaryExpr([](double t) { return t > 0 ? 1.0 : std::exp(t); });
    };
    d_q.array() += d_fq.array() * feature_grad(q).array();
    d_k.array() += d_fk.array() * feature_grad(k).array();
}

// -- aggregation -----------------------------------------------------------------------

Matrix softmax_rows(const Matrix &scores) {
    Matrix p(scores.rows(), scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double m = scores.row(i).maxCoeff();
        p.row(i) = (scores.row(i).array() - m).exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

Matrix softmax_weighted_sum(const Matrix &scores, const Matrix &v) {
    if (scores.cols() != v.rows()) {
        throw std::invalid_argument("softmax_weighted_sum: shape mismatch");
    }
    return softmax_rows(scores) * v;
}

void softmax_weighted_sum_backward(const Matrix &probs, const Matrix &v,
                                   const Matrix &d_out, Matrix &d_scores, Matrix &d_v) {
    const Matrix d_probs = d_out * v.transpose();
    d_v.noalias() += probs.transpose() * d_out;
    const Vector row_dot = (probs.array() * d_probs.array()).rowwise().sum();
    d_scores.array() += probs.array() * (d_probs.colwise() - row_dot).array();
}

} // namespace qpsan
