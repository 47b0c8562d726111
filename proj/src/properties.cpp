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

#include <cmath>
#include <stdexcept>

namespace qpsan {

namespace {

double sq(double x) { return x * x; }

double overlap_squared(const QuantumState<double> &a, const QuantumState<double> &b) {
    return std::norm(a.dot(b)); // Eigen's dot conjugates the first argument
}

constexpr double kLogFloor = 1e-8;

template <typename Kernel>
std::optional<double> mixed_partial_fd(Kernel kernel, const KernelPoint &at, double h) {
    double f[2][2];
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double value = kernel(KernelPoint{at.delta_q + (i ? h : -h),
                                                    at.delta_k + (j ? h : -h)});
            if (!(value > kLogFloor)) {
                return std::nullopt;
            }
            f[i][j] = std::log(value);
        }
    }
    return (f[1][1] - f[1][0] - f[0][1] + f[0][0]) / (4 * h * h);
}

} // namespace

double kernel_enc3(const KernelPoint &d, const QpaParams<double> &p) {
    const double a = p.lambda1() / 2;
    const double b = p.lambda2() / 2;
    return sq(std::cos(a * d.delta_q + b * d.delta_k)) *
           sq(std::cos(b * d.delta_q + a * d.delta_k));
}

double kernel_enc3(const InputPair &x1, const InputPair &x2, const QpaParams<double> &p) {
    return kernel_enc3(displacement(x1, x2), p);
}

double kernel_enc3_statevector(const InputPair &x1, const InputPair &x2,
                               const QpaParams<double> &p) {
    return overlap_squared(three_step_encoding_state(x1.q, x1.k, p),
                           three_step_encoding_state(x2.q, x2.k, p));
}

double kernel_enc1(const KernelPoint &d, double scale) {
    return sq(std::cos(scale * d.delta_q / 2)) * sq(std::cos(scale * d.delta_k / 2));
}

double kernel_enc1(const InputPair &x1, const InputPair &x2, double scale) {
    return kernel_enc1(displacement(x1, x2), scale);
}

double kernel_enc1_statevector(const InputPair &x1, const InputPair &x2, double scale) {
    QpaParams<double> p;
    p.theta_s = scale;
    return overlap_squared(encoding_state(x1.q, x1.k, p, Encoding::Independent),
                           encoding_state(x2.q, x2.k, p, Encoding::Independent));
}

std::optional<double> mixed_partial_log_kernel(const QpaParams<double> &p,
                                               const KernelPoint &at, double h) {
    return mixed_partial_fd([&](const KernelPoint &d) { return kernel_enc3(d, p); }, at, h);
}

double mixed_partial_log_kernel_analytic(const QpaParams<double> &p, const KernelPoint &at) {
    const double a = p.lambda1() / 2;
    const double b = p.lambda2() / 2;
    const double u = std::cos(a * at.delta_q + b * at.delta_k);
    const double v = std::cos(b * at.delta_q + a * at.delta_k);
    return -2 * a * b * (1 / (u * u) + 1 / (v * v));
}

std::optional<double> mixed_partial_log_kernel_enc1(double scale, const KernelPoint &at,
                                                    double h) {
    return mixed_partial_fd([&](const KernelPoint &d) { return kernel_enc1(d, scale); }, at,
                            h);
}

RankReport numerical_rank(const Eigen::MatrixXd &m, double relative_tol) {
    RankReport report;
    if (m.size() == 0) {
        report.singular_values = Eigen::VectorXd();
        return report;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    report.singular_values = svd.singularValues();
    const double largest = report.singular_values(0);
    report.tolerance = relative_tol * largest;
    for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
        if (report.singular_values(i) > report.tolerance) {
            ++report.numerical_rank;
        }
    }
    return report;
}

Eigen::Matrix<double, 2, 3> encoding_jacobian() {
    Eigen::Matrix<double, 2, 3> j;
    j << 1, 2, 0, 1, 0, 2;
    return j;
}

RankReport encoding_jacobian_rank(const QpaParams<double> & /*p*/) {
    return numerical_rank(encoding_jacobian());
}

std::vector<InputPair> default_probe_grid() {
    std::vector<InputPair> grid;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            grid.push_back({-1.5 + 0.75 * i, -1.5 + 0.75 * j});
        }
    }
    return grid;
}

Eigen::MatrixXd full_circuit_jacobian(const QpaParams<double> &p,
                                      const std::vector<InputPair> &grid,
                                      const CircuitOptions &opts) {
    if (grid.size() < 5) {
        throw std::invalid_argument("probe grid needs at least 5 points");
    }
    bool all_equal = true;
    for (const auto &x : grid) {
        all_equal = all_equal && x.q == grid.front().q && x.k == grid.front().k;
    }
    if (all_equal) {
        throw std::invalid_argument("probe grid is degenerate: all points coincide");
    }
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(grid.size()), 5);
    for (std::size_t r = 0; r < grid.size(); ++r) {
        const auto g = score_gradient(grid[r].q, grid[r].k, p, opts);
        for (int c = 0; c < 5; ++c) {
            jac(static_cast<Eigen::Index>(r), c) = g.d_params[c];
        }
    }
    return jac;
}

RankReport full_circuit_rank(const QpaParams<double> &p, const std::vector<InputPair> &grid,
                             double relative_tol, const CircuitOptions &opts) {
    return numerical_rank(full_circuit_jacobian(p, grid, opts), relative_tol);
}

RankReport restricted_encoding_rank(QpaParams<double> p, const std::vector<InputPair> &grid,
                                    double relative_tol, const CircuitOptions &opts) {
    p.alpha = 0;
    p.beta = 0;
    const Eigen::MatrixXd jac = full_circuit_jacobian(p, grid, opts);
    return numerical_rank(jac.leftCols(3), relative_tol);
}

double degenerate_score(double q, double k, const QpaParams<double> &p,
                        EntanglerOrder order) {
    const auto angles = equivalent_angles(q, k, p);
    const double phi = order == EntanglerOrder::ControlZeroFirst ? angles.phi0 : angles.phi1;
    return sq(std::cos(phi / 2));
}

} // namespace qpsan
