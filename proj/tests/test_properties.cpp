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
#include "qpsan/properties.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace qpsan;
constexpr double pi = std::numbers::pi;

namespace {
QpaParams<double> random_params(std::mt19937_64 &rng, double scale = 1.0) {
    std::normal_distribution<double> n(0, scale);
    return {n(rng), n(rng), n(rng), n(rng), n(rng)};
}
} // namespace

TEST_CASE("K_enc3 closed form") {
    const QpaParams<double> p{0.4, -0.2, 0.7, 0.1, 0.1};
    CHECK(kernel_enc3({0.3, -0.8}, {0.3, -0.8}, p) == doctest::Approx(1.0));

    // gamma_s = gamma_d makes lambda2 = 0 and the kernel factor
    const QpaParams<double> sep{0.6, 0.25, 0.25, 0, 0};
    const double a = sep.lambda1() / 2;
    for (double dq : {-1.0, 0.2, 2.5}) {
        for (double dk : {-0.7, 0.0, 1.9}) {
            CHECK(kernel_enc3(KernelPoint{dq, dk}, sep) ==
                  doctest::Approx(std::pow(std::cos(a * dq) * std::cos(a * dk), 2)));
        }
    }

    // lambda1' = lambda2' = 0.25: cos^2(pi/2)^2 = 0 at dq = dk = pi
    const QpaParams<double> quarter{0.0, 0.0, 0.5, 0, 0};
    CHECK(kernel_enc3(KernelPoint{pi, pi}, quarter) < 1e-30);
}

TEST_CASE("K_enc3 matches the statevector overlap") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0, 2);
    for (int i = 0; i < 10000; ++i) {
        const auto p = random_params(rng);
        const InputPair x1{n(rng), n(rng)}, x2{n(rng), n(rng)};
        REQUIRE(std::abs(kernel_enc3(x1, x2, p) - kernel_enc3_statevector(x1, x2, p)) < 1e-12);
    }
}

TEST_CASE("K_enc1 is separable") {
    CHECK(kernel_enc1({0.5, 0.5}, {0.5, 0.5}, 1.3) == doctest::Approx(1.0));
    CHECK(kernel_enc1(KernelPoint{pi, 0.0}, 1.0) < 1e-30);
    std::mt19937_64 rng(22);
    std::normal_distribution<double> n(0, 2);
    for (int i = 0; i < 200; ++i) {
        const double e = n(rng), dq = n(rng), dk = n(rng);
        const double lhs = kernel_enc1(KernelPoint{dq, dk}, e) * kernel_enc1(KernelPoint{0, 0}, e);
        const double rhs = kernel_enc1(KernelPoint{dq, 0}, e) * kernel_enc1(KernelPoint{0, dk}, e);
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-14));
        const InputPair x1{n(rng), n(rng)}, x2{n(rng), n(rng)};
        REQUIRE(std::abs(kernel_enc1(x1, x2, e) - kernel_enc1_statevector(x1, x2, e)) < 1e-12);
    }
}

TEST_CASE("mixed log-partial of K_enc3") {
    const QpaParams<double> quarter{0.0, 0.0, 0.5, 0, 0};
    CHECK(mixed_partial_log_kernel_analytic(quarter, {0, 0}) == doctest::Approx(-0.25));
    const auto fd = mixed_partial_log_kernel(quarter, {0, 0});
    REQUIRE(fd.has_value());
    CHECK(*fd == doctest::Approx(-0.25).epsilon(1e-6));

    const QpaParams<double> sep{0.6, 0.25, 0.25, 0, 0};
    for (double dq : {-1.0, 0.3, 1.2}) {
        for (double dk : {-0.5, 0.0, 0.8}) {
            const auto v = mixed_partial_log_kernel(sep, {dq, dk});
            REQUIRE(v.has_value());
            CHECK(std::abs(*v) < 1e-6);
            const auto w = mixed_partial_log_kernel_enc1(1.7, {dq, dk});
            REQUIRE(w.has_value());
            CHECK(std::abs(*w) < 1e-6);
        }
    }

    // agrees with the analytic form and is strictly negative when l1 l2 > 0
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.1, 1.0), d(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double l1 = u(rng), l2 = u(rng);
        const double gd = (l1 - l2) / 2 - 0.05;
        const QpaParams<double> p{l1 - l2 - 2 * gd, gd, gd + l2, 0, 0};
        REQUIRE(p.lambda1() == doctest::Approx(l1));
        REQUIRE(p.lambda2() == doctest::Approx(l2));
        const KernelPoint at{d(rng), d(rng)};
        const auto v = mixed_partial_log_kernel(p, at);
        REQUIRE(v.has_value());
        REQUIRE(*v < 0.0);
        REQUIRE(*v == doctest::Approx(mixed_partial_log_kernel_analytic(p, at)).epsilon(1e-5));
    }
}

TEST_CASE("mixed log-partial reports near-singular stencils") {
    const QpaParams<double> quarter{0.0, 0.0, 0.5, 0, 0};
    CHECK_FALSE(mixed_partial_log_kernel(quarter, {pi, pi}).has_value());
}

TEST_CASE("frequencies and lambdas") {
    const QpaParams<double> p{0.5, 0.1, 0.2, 0, 0};
    const auto [wd, ws] = frequencies(p);
    const auto [l1, l2] = lambdas(p);
    CHECK(wd == doctest::Approx(0.7));
    CHECK(ws == doctest::Approx(0.9));
    CHECK(l1 == doctest::Approx(0.8));
    CHECK(l2 == doctest::Approx(0.1));

    QpaParams<double> moved_d = p, moved_s = p;
    moved_d.gamma_d += 0.3;
    moved_s.gamma_s += 0.3;
    CHECK(moved_d.omega_s() == p.omega_s());
    CHECK(moved_d.omega_d() != p.omega_d());
    CHECK(moved_s.omega_d() == p.omega_d());
    CHECK(moved_s.omega_s() != p.omega_s());

    std::mt19937_64 rng(24);
    for (int i = 0; i < 1000; ++i) {
        const auto q = random_params(rng);
        REQUIRE(std::abs(q.lambda1() + q.lambda2() - q.omega_s()) < 1e-15);
        REQUIRE(std::abs(q.lambda1() - q.lambda2() - q.omega_d()) < 1e-15);
    }
}

TEST_CASE("encoding Jacobian has rank 2") {
    const auto j = encoding_jacobian();
    CHECK(j.leftCols<2>().determinant() == doctest::Approx(-2.0));
    const auto report = encoding_jacobian_rank(QpaParams<double>{});
    CHECK(report.numerical_rank == 2);
    CHECK(report.singular_values.size() == 2);
    CHECK(report.singular_values(1) > 0.0);
}

TEST_CASE("full circuit rank is bounded by 4") {
    std::mt19937_64 rng(25);
    const auto grid = default_probe_grid();
    CHECK(grid.size() == 25);
    int max_rank = 0;
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(rng);
        const auto report = full_circuit_rank(p, grid);
        REQUIRE(report.numerical_rank <= 4);
        max_rank = std::max(max_rank, report.numerical_rank);
        REQUIRE(restricted_encoding_rank(p, grid).numerical_rank == 2);
    }
    CHECK(max_rank == 4);
}

TEST_CASE("full circuit rank edge cases") {
    const QpaParams<double> p{0.5, 0.1, -0.2, 0.3, 0.2};
    auto grid = default_probe_grid();
    const int base = full_circuit_rank(p, grid).numerical_rank;
    grid.insert(grid.end(), grid.begin(), grid.begin() + 10);
    CHECK(full_circuit_rank(p, grid).numerical_rank == base);
    std::vector<InputPair> same(25, InputPair{0.3, 0.3});
    CHECK_THROWS_AS(full_circuit_rank(p, same), std::invalid_argument);
}

TEST_CASE("degenerate closed form matches the circuit on the alpha = beta = 0 slice") {
    std::mt19937_64 rng(26);
    std::normal_distribution<double> n(0, 1.5);
    for (auto order : {EntanglerOrder::ControlZeroFirst, EntanglerOrder::ControlOneFirst}) {
        for (int i = 0; i < 1000; ++i) {
            auto p = random_params(rng);
            p.alpha = p.beta = 0;
            const double q = n(rng), k = n(rng);
            REQUIRE(std::abs(degenerate_score(q, k, p, order) -
                             score_reference(q, k, p, {Encoding::ThreeStep, order})) < 1e-12);
        }
    }
}
