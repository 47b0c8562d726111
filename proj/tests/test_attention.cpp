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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace qpsan;

namespace {

Matrix random_matrix(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols,
                     double scale = 1.0) {
    std::normal_distribution<double> n(0, scale);
    return Matrix::NullaryExpr(rows, cols, [&] { return n(rng); });
}

// Central-difference gradient of a scalar function with respect to x.
Matrix numeric_gradient(Matrix x, const std::function<double(const Matrix &)> &f,
                        double h = 1e-5) {
    Matrix g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double keep = x(i);
        x(i) = keep + h;
        const double up = f(x);
        x(i) = keep - h;
        const double down = f(x);
        x(i) = keep;
        g(i) = (up - down) / (2 * h);
    }
    return g;
}

void check_close(const Matrix &a, const Matrix &b, double tol) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    CHECK((a - b).cwiseAbs().maxCoeff() <= tol);
}

} // namespace

TEST_CASE("scorer keys round-trip") {
    for (auto k : {ScorerKind::Qpa, ScorerKind::Dot, ScorerKind::Mlp49, ScorerKind::Mlp585,
                   ScorerKind::Cosine, ScorerKind::Linear, ScorerKind::QpaInd}) {
        CHECK(parse_scorer_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_scorer_kind("softmax"), std::invalid_argument);
}

TEST_CASE("attention config rejects D above the head width") {
    AttentionConfig cfg{2, 8, 16, ScorerKind::Qpa};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.aggregation_depth = 8;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.hidden_size() == 16);
    std::mt19937_64 rng(1);
    const Matrix q = random_matrix(rng, 3, 4);
    CHECK_THROWS_AS(qpa_scores(q, q, {}, 5), std::invalid_argument);
}

TEST_CASE("dot scores of orthonormal rows") {
    const Matrix id = Matrix::Identity(4, 4);
    const Matrix a = dot_scores(id, id);
    check_close(a, 0.5 * Matrix::Identity(4, 4), 1e-15);
}

TEST_CASE("qpa scores at zero inputs sum the origin score") {
    const Matrix zeros = Matrix::Zero(3, 6);
    QpaParams<double> p{0.5, 0.0, 0.0, 0.0, 0.0};
    const Matrix a = qpa_scores(zeros, zeros, p, 4);
    check_close(a, Matrix::Constant(3, 3, 4 * 0.8535533905932737), 1e-12);
}

TEST_CASE("qpa scores are bounded by D and only read the first D columns") {
    std::mt19937_64 rng(2);
    Matrix q = random_matrix(rng, 5, 8, 2.0);
    Matrix k = random_matrix(rng, 6, 8, 2.0);
    QpaParams<double> p{0.5, 0.3, -0.2, 0.7, 0.4};
    const Matrix a = qpa_scores(q, k, p, 5);
    CHECK(a.rows() == 5);
    CHECK(a.cols() == 6);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 5.0);
    q.rightCols(3).setConstant(100);
    k.rightCols(3).setConstant(-7);
    check_close(qpa_scores(q, k, p, 5), a, 0.0);
}

TEST_CASE("qpa scorer is permutation equivariant") {
    std::mt19937_64 rng(3);
    const Matrix q = random_matrix(rng, 5, 4);
    const Matrix k = random_matrix(rng, 5, 4);
    const Matrix v = random_matrix(rng, 5, 3);
    QpaParams<double> p{0.5, 0.1, 0.2, 0.3, 0.4};
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
    perm.indices() << 3, 0, 4, 1, 2;
    const Matrix out = softmax_weighted_sum(qpa_scores(q, k, p, 4), v);
    const Matrix out_perm =
        softmax_weighted_sum(qpa_scores(perm * q, perm * k, p, 4), perm * v);
    check_close(out_perm, perm * out, 1e-12);
}

TEST_CASE("independent-encoding scorer ignores gamma") {
    std::mt19937_64 rng(4);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 3, 4);
    const QpaParams<double> a{0.5, 0.0, 0.0, 0.2, 0.1};
    const QpaParams<double> b{0.5, 0.9, -0.4, 0.2, 0.1};
    check_close(qpsan_ind_scores(q, k, a, 4), qpsan_ind_scores(q, k, b, 4), 1e-14);
}

TEST_CASE("noisy scorer at zero strength matches the noiseless one") {
    std::mt19937_64 rng(5);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 4, 4);
    const QpaParams<double> p{0.5, 0.1, -0.1, 0.3, 0.2};
    check_close(qpa_scores_noisy(q, k, p, 3, {}, NoiseChannel::Depolarizing, 0.0),
                qpa_scores(q, k, p, 3), 1e-12);
    check_close(qpa_scores_noisy(q, k, p, 3, {}, NoiseChannel::PhaseFlip, 0.3),
                qpa_scores(q, k, p, 3), 1e-12);
}

TEST_CASE("noisy scorer sums density-matrix scores") {
    std::mt19937_64 rng(6);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 2, 4);
    const QpaParams<double> p{0.5, 0.1, -0.1, 0.3, 0.2};
    for (auto ch : {NoiseChannel::AmplitudeDamping, NoiseChannel::Depolarizing,
                    NoiseChannel::BitFlip}) {
        const Matrix a = qpa_scores_noisy(q, k, p, 4, {}, ch, 0.08);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 2; ++j) {
                double expected = 0;
                for (int d = 0; d < 4; ++d) {
                    expected += score_noisy(q(i, d), k(j, d), p, ch, 0.08);
                }
                CHECK(std::abs(a(i, j) - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("softmax rows") {
    Matrix a(2, 3);
    a << 1, 2, 3, 1000, -1000, 0;
    const Matrix p = softmax_rows(a);
    CHECK(p.allFinite());
    CHECK(p.row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p(1, 0) == doctest::Approx(1.0));
    CHECK(p(1, 1) == 0.0);
    CHECK(p(0, 2) / p(0, 1) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("MLP scorer sizes") {
    CHECK(mlp_parameter_count(MlpVariant::Params49) == 49);
    CHECK(mlp_parameter_count(MlpVariant::Params585) == 585);
    std::mt19937_64 rng(6);
    for (auto v : {MlpVariant::Params49, MlpVariant::Params585}) {
        const Vector w = init_mlp_weights(v, rng);
        CHECK(w.size() == mlp_parameter_count(v));
        const double s = mlp_score(0.3, -0.2, v, w);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
    const Vector short_w = Vector::Zero(48);
    CHECK_THROWS_AS(mlp_score(0, 0, MlpVariant::Params49, short_w), std::invalid_argument);
}

TEST_CASE("cosine scores cap the temperature") {
    std::mt19937_64 rng(7);
    const Matrix q = random_matrix(rng, 4, 5);
    const Matrix k = random_matrix(rng, 3, 5);
    check_close(cosine_scores(q, k, 200.0), cosine_scores(q, k, 100.0), 1e-12);
    const Matrix a = cosine_scores(q, k, 1.0);
    CHECK(a.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK_THROWS_AS(cosine_scores(q, k, 0.0), std::invalid_argument);
    // zero rows give zero scores instead of NaN
    const Matrix z = Matrix::Zero(2, 5);
    CHECK(cosine_scores(z, k, 10.0).isZero(0.0));
}

TEST_CASE("linear attention of a single token returns its value") {
    std::mt19937_64 rng(8);
    const Matrix q = random_matrix(rng, 1, 4);
    const Matrix k = random_matrix(rng, 1, 4);
    const Matrix v = random_matrix(rng, 1, 3);
    check_close(linear_attention(q, k, v), v, 1e-6);
}

TEST_CASE("linear attention matches the quadratic kernel form") {
    std::mt19937_64 rng(9);
    const Matrix q = random_matrix(rng, 7, 4);
    const Matrix k = random_matrix(rng, 7, 4);
    const Matrix v = random_matrix(rng, 7, 3);
    const Matrix fq = kernel_feature(q);
    const Matrix fk = kernel_feature(k);
    Matrix expected(7, 3);
    for (int i = 0; i < 7; ++i) {
        Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(3);
        double den = 0;
        for (int j = 0; j < 7; ++j) {
            const double w = fq.row(i).dot(fk.row(j));
            num += w * v.row(j);
            den += w;
        }
        expected.row(i) = num / (den + kLinearEpsilon);
    }
    check_close(linear_attention(q, k, v), expected, 1e-9);
}

// -- backward passes ------------------------------------------------------------

TEST_CASE("softmax aggregation backward") {
    std::mt19937_64 rng(10);
    const Matrix a = random_matrix(rng, 4, 5);
    const Matrix v = random_matrix(rng, 5, 3);
    const Matrix w = random_matrix(rng, 4, 3);
    Matrix d_a = Matrix::Zero(4, 5), d_v = Matrix::Zero(5, 3);
    softmax_weighted_sum_backward(softmax_rows(a), v, w, d_a, d_v);
    check_close(d_a,
                numeric_gradient(a, [&](const Matrix &x) {
                    return (softmax_weighted_sum(x, v).array() * w.array()).sum();
                }),
                1e-8);
    check_close(d_v,
                numeric_gradient(v, [&](const Matrix &x) {
                    return (softmax_weighted_sum(a, x).array() * w.array()).sum();
                }),
                1e-8);
}

TEST_CASE("dot backward") {
    std::mt19937_64 rng(11);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 5, 4);
    const Matrix w = random_matrix(rng, 3, 5);
    Matrix d_q = Matrix::Zero(3, 4), d_k = Matrix::Zero(5, 4);
    dot_scores_backward(q, k, w, d_q, d_k);
    auto loss_q = [&](const Matrix &x) { return (dot_scores(x, k).array() * w.array()).sum(); };
    auto loss_k = [&](const Matrix &x) { return (dot_scores(q, x).array() * w.array()).sum(); };
    check_close(d_q, numeric_gradient(q, loss_q), 1e-8);
    check_close(d_k, numeric_gradient(k, loss_k), 1e-8);
}

TEST_CASE("qpa backward") {
    std::mt19937_64 rng(12);
    const Matrix q = random_matrix(rng, 3, 5);
    const Matrix k = random_matrix(rng, 4, 5);
    const Matrix w = random_matrix(rng, 3, 4);
    for (auto enc : {Encoding::ThreeStep, Encoding::Independent}) {
        const CircuitOptions opts{enc, EntanglerOrder::ControlZeroFirst};
        const QpaParams<double> p{0.6, 0.2, -0.3, 0.5, 0.35};
        Matrix d_q = Matrix::Zero(3, 5), d_k = Matrix::Zero(4, 5);
        std::array<double, 5> d_p{};
        qpa_scores_backward(q, k, p, 4, opts, w, d_q, d_k, d_p);
        auto loss = [&](const Matrix &qq, const Matrix &kk, const QpaParams<double> &pp) {
            return (qpa_scores(qq, kk, pp, 4, opts).array() * w.array()).sum();
        };
        check_close(d_q, numeric_gradient(q, [&](const Matrix &x) { return loss(x, k, p); }),
                    1e-8);
        check_close(d_k, numeric_gradient(k, [&](const Matrix &x) { return loss(q, x, p); }),
                    1e-8);
        CHECK(d_q.col(4).isZero(0.0));
        const Matrix base = Eigen::Map<const Eigen::Matrix<double, 5, 1>>(p.to_array().data());
        const Matrix d_p_num = numeric_gradient(base, [&](const Matrix &x) {
            std::array<double, 5> arr;
            for (int i = 0; i < 5; ++i) arr[i] = x(i);
            return loss(q, k, QpaParams<double>::from_array(arr));
        });
        for (int i = 0; i < 5; ++i) {
            CHECK(d_p[i] == doctest::Approx(d_p_num(i)).epsilon(1e-6));
        }
    }
}

TEST_CASE("MLP backward") {
    std::mt19937_64 rng(13);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 3, 4);
    const Matrix w = random_matrix(rng, 3, 3);
    for (auto v : {MlpVariant::Params49, MlpVariant::Params585}) {
        const Vector weights = init_mlp_weights(v, rng) * 2.0;
        Matrix d_q = Matrix::Zero(3, 4), d_k = Matrix::Zero(3, 4);
        Vector d_w = Vector::Zero(weights.size());
        mlp_scores_backward(q, k, v, weights, 3, w, d_q, d_k, d_w);
        auto loss = [&](const Matrix &qq, const Matrix &kk, const Vector &ww) {
            return (mlp_scores(qq, kk, v, ww, 3).array() * w.array()).sum();
        };
        check_close(d_q,
                    numeric_gradient(q, [&](const Matrix &x) { return loss(x, k, weights); }),
                    1e-8);
        check_close(d_k,
                    numeric_gradient(k, [&](const Matrix &x) { return loss(q, x, weights); }),
                    1e-8);
        const Matrix d_w_num =
            numeric_gradient(weights, [&](const Matrix &x) { return loss(q, k, x); });
        check_close(d_w, d_w_num, 1e-8);
    }
}

TEST_CASE("cosine backward") {
    std::mt19937_64 rng(14);
    const Matrix q = random_matrix(rng, 3, 4);
    const Matrix k = random_matrix(rng, 5, 4);
    const Matrix w = random_matrix(rng, 3, 5);
    for (double log_tau : {std::log(10.0), std::log(150.0)}) {
        Matrix d_q = Matrix::Zero(3, 4), d_k = Matrix::Zero(5, 4);
        const double d_log_tau = cosine_scores_backward(q, k, log_tau, w, d_q, d_k);
        auto loss = [&](const Matrix &qq, const Matrix &kk, double lt) {
            return (cosine_scores(qq, kk, std::exp(lt)).array() * w.array()).sum();
        };
        check_close(d_q,
                    numeric_gradient(q, [&](const Matrix &x) { return loss(x, k, log_tau); }),
                    1e-7);
        check_close(d_k,
                    numeric_gradient(k, [&](const Matrix &x) { return loss(q, x, log_tau); }),
                    1e-7);
        const double h = 1e-6;
        const double num = (loss(q, k, log_tau + h) - loss(q, k, log_tau - h)) / (2 * h);
        CHECK(d_log_tau == doctest::Approx(num).epsilon(1e-6));
    }
}

TEST_CASE("linear attention backward") {
    std::mt19937_64 rng(15);
    const Matrix q = random_matrix(rng, 4, 3);
    const Matrix k = random_matrix(rng, 4, 3);
    const Matrix v = random_matrix(rng, 4, 2);
    const Matrix w = random_matrix(rng, 4, 2);
    Matrix d_q = Matrix::Zero(4, 3), d_k = Matrix::Zero(4, 3), d_v = Matrix::Zero(4, 2);
    linear_attention_backward(q, k, v, w, d_q, d_k, d_v);
    auto loss = [&](const Matrix &qq, const Matrix &kk, const Matrix &vv) {
        return (linear_attention(qq, kk, vv).array() * w.array()).sum();
    };
    check_close(d_q, numeric_gradient(q, [&](const Matrix &x) { return loss(x, k, v); }), 1e-7);
    check_close(d_k, numeric_gradient(k, [&](const Matrix &x) { return loss(q, x, v); }), 1e-7);
    check_close(d_v, numeric_gradient(v, [&](const Matrix &x) { return loss(q, k, x); }), 1e-7);
}

TEST_CASE("batched qpa scores agree with the pointwise score") {
    std::mt19937_64 rng(16);
    const Matrix q = random_matrix(rng, 4, 6, 2.0);
    const Matrix k = random_matrix(rng, 5, 6, 2.0);
    const QpaParams<double> p{0.7, -0.3, 0.25, 0.9, -0.6};
    for (auto enc : {Encoding::ThreeStep, Encoding::Independent}) {
        for (auto order : {EntanglerOrder::ControlZeroFirst, EntanglerOrder::ControlOneFirst}) {
            const CircuitOptions opts{enc, order};
            const Matrix a = qpa_scores(q, k, p, 6, opts);
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 5; ++j) {
                    double expected = 0;
                    for (int d = 0; d < 6; ++d) {
                        expected += score_reference(q(i, d), k(j, d), p, opts);
                    }
                    CHECK(a(i, j) == doctest::Approx(expected).epsilon(1e-12));
                }
            }
        }
    }
}
