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
 * Analytic structure of the QPA score: encoding kernels, the mixed
 * log-partial separability test, the two encoding frequencies and the
 * numerical rank of parameter Jacobians.
 */
#pragma once

#include "qpsan/circuit.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace qpsan {

struct InputPair {
    double q;
    double k;
};

/// Displacement between two inputs: (q2 - q1, k2 - k1).
struct KernelPoint {
    double delta_q;
    double delta_k;
};

inline KernelPoint displacement(const InputPair &x1, const InputPair &x2) {
    return {x2.q - x1.q, x2.k - x1.k};
}

struct RankReport {
    Eigen::VectorXd singular_values; ///< descending
    int numerical_rank = 0;
    double tolerance = 0; ///< absolute cut-off applied to singular values
};

struct Lambdas {
    double lambda1;
    double lambda2;
};

struct Frequencies {
    double omega_d;
    double omega_s;
};

inline Lambdas lambdas(const QpaParams<double> &p) { return {p.lambda1(), p.lambda2()}; }
inline Frequencies frequencies(const QpaParams<double> &p) {
    return {p.omega_d(), p.omega_s()};
}

/// cos^2(l1' dq + l2' dk) cos^2(l2' dq + l1' dk), l' = l / 2.
double kernel_enc3(const KernelPoint &d, const QpaParams<double> &p);
double kernel_enc3(const InputPair &x1, const InputPair &x2, const QpaParams<double> &p);
/// |<psi_enc(x1)|psi_enc(x2)>|^2 from simulated encoding states.
double kernel_enc3_statevector(const InputPair &x1, const InputPair &x2,
                               const QpaParams<double> &p);

/// cos^2(E dq / 2) cos^2(E dk / 2).
double kernel_enc1(const KernelPoint &d, double scale);
double kernel_enc1(const InputPair &x1, const InputPair &x2, double scale);
double kernel_enc1_statevector(const InputPair &x1, const InputPair &x2, double scale);

/**
 * d^2 ln K_enc3 / (d dq d dk) by central differences with step h.
 * Returns nullopt when the kernel drops to 1e-8 or below anywhere on the
 * stencil, where the logarithm is numerically meaningless.
 */
std::optional<double> mixed_partial_log_kernel(const QpaParams<double> &p,
                                               const KernelPoint &at, double h = 1e-4);

/// -2 l1' l2' [sec^2(l1' dq + l2' dk) + sec^2(l2' dq + l1' dk)]
double mixed_partial_log_kernel_analytic(const QpaParams<double> &p, const KernelPoint &at);

/// Same finite-difference probe applied to the separable K_enc1.
std::optional<double> mixed_partial_log_kernel_enc1(double scale, const KernelPoint &at,
                                                    double h = 1e-4);

/// Singular values and numerical rank, counting sigma > relative_tol * sigma_max.
RankReport numerical_rank(const Eigen::MatrixXd &m, double relative_tol = 1e-8);

/// d(omega_d, omega_s) / d(theta_s, gamma_d, gamma_s); constant.
Eigen::Matrix<double, 2, 3> encoding_jacobian();
RankReport encoding_jacobian_rank(const QpaParams<double> &p);

/// 5x5 uniform grid over [-1.5, 1.5]^2.
std::vector<InputPair> default_probe_grid();

/// |grid| x 5 Jacobian of mu w.r.t. (theta_s, gamma_d, gamma_s, alpha, beta),
/// rows from parameter-shift gradients.
Eigen::MatrixXd full_circuit_jacobian(const QpaParams<double> &p,
                                      const std::vector<InputPair> &grid,
                                      const CircuitOptions &opts = {});

RankReport full_circuit_rank(const QpaParams<double> &p, const std::vector<InputPair> &grid,
                             double relative_tol = 1e-8, const CircuitOptions &opts = {});

/// Rank of the encoding columns (theta_s, gamma_d, gamma_s) on the
/// alpha = beta = 0 slice.
RankReport restricted_encoding_rank(QpaParams<double> p, const std::vector<InputPair> &grid,
                                    double relative_tol = 1e-8,
                                    const CircuitOptions &opts = {});

/**
 * Closed form of the score on the alpha = beta = 0 slice: the two CNOTs
 * reduce the agreement projector to a projector on one qubit, so
 * mu = cos^2(phi_j / 2) with j = 0 when CNOT(0->1) acts first and j = 1
 * otherwise.
 */
double degenerate_score(double q, double k, const QpaParams<double> &p,
                        EntanglerOrder order = EntanglerOrder::ControlZeroFirst);

} // namespace qpsan
