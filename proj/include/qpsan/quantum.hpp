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
 * Exact two-qubit linear algebra: rotation gates, statevector evolution,
 * computational-basis probabilities and single-qubit Kraus channels on a
 * 4x4 density matrix.
 *
 * Basis ordering is |q0 q1>, with qubit 0 as the most significant bit:
 * index 0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpsan {

template <typename Scalar> using Complex = std::complex<Scalar>;
template <typename Scalar>
using Gate2x2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;
template <typename Scalar>
using QuantumState = Eigen::Matrix<Complex<Scalar>, 4, 1>;
template <typename Scalar>
using DensityMatrix = Eigen::Matrix<Complex<Scalar>, 4, 4>;
template <typename Scalar> using Probabilities = Eigen::Matrix<Scalar, 4, 1>;

namespace detail {
template <typename Scalar> void require_finite(Scalar theta, const char *what) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument(std::string(what) +
                                    ": rotation angle must be finite");
    }
}

inline void require_qubit(int qubit) {
    if (qubit != 0 && qubit != 1) {
        throw std::invalid_argument("qubit index must be 0 or 1, got " +
                                    std::to_string(qubit));
    }
}
} // namespace detail

/// |00>
template <typename Scalar = double> QuantumState<Scalar> zero_state() {
    QuantumState<Scalar> psi = QuantumState<Scalar>::Zero();
    psi(0) = Complex<Scalar>(1);
    return psi;
}

/// RY(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
template <typename Scalar> Gate2x2<Scalar> ry(Scalar theta) {
    detail::require_finite(theta, "ry");
    const Scalar c = std::cos(theta / 2);
    const Scalar s = std::sin(theta / 2);
    Gate2x2<Scalar> g;
    g << c, -s, s, c;
    return g;
}

/// RX(theta) = [[cos(theta/2), -i sin(theta/2)], [-i sin(theta/2), cos(theta/2)]].
template <typename Scalar> Gate2x2<Scalar> rx(Scalar theta) {
    detail::require_finite(theta, "rx");
    const Scalar c = std::cos(theta / 2);
    const Complex<Scalar> mis(0, -std::sin(theta / 2));
    Gate2x2<Scalar> g;
    g << c, mis, mis, c;
    return g;
}

template <typename Scalar> Gate2x2<Scalar> pauli_x() {
    Gate2x2<Scalar> g;
    g << 0, 1, 1, 0;
    return g;
}

template <typename Scalar> Gate2x2<Scalar> pauli_y() {
    Gate2x2<Scalar> g;
    g << Complex<Scalar>(0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1),
        Complex<Scalar>(0);
    return g;
}

template <typename Scalar> Gate2x2<Scalar> pauli_z() {
    Gate2x2<Scalar> g;
    g << 1, 0, 0, -1;
    return g;
}

/// Lifts a single-qubit operator to the two-qubit space: gate (x) I for
/// qubit 0, I (x) gate for qubit 1.
template <typename Scalar>
DensityMatrix<Scalar> embed(const Gate2x2<Scalar> &gate, int qubit) {
    detail::require_qubit(qubit);
    DensityMatrix<Scalar> out = DensityMatrix<Scalar>::Zero();
    if (qubit == 0) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                out.template block<2, 2>(2 * a, 2 * b) =
                    gate(a, b) * Gate2x2<Scalar>::Identity();
            }
        }
    } else {
        out.template block<2, 2>(0, 0) = gate;
        out.template block<2, 2>(2, 2) = gate;
    }
    return out;
}

template <typename Scalar>
QuantumState<Scalar> apply_single(const QuantumState<Scalar> &state,
                                  const Gate2x2<Scalar> &gate, int qubit) {
    detail::require_qubit(qubit);
    QuantumState<Scalar> out;
    // qubit 0 pairs indices (i, i+2); qubit 1 pairs (2j, 2j+1)
    const int stride = qubit == 0 ? 2 : 1;
    for (int base : {0, qubit == 0 ? 1 : 2}) {
        const int i0 = base;
        const int i1 = base + stride;
        out(i0) = gate(0, 0) * state(i0) + gate(0, 1) * state(i1);
        out(i1) = gate(1, 0) * state(i0) + gate(1, 1) * state(i1);
    }
    return out;
}

/// CNOT with the given control and target qubit; a basis permutation.
template <typename Scalar>
QuantumState<Scalar> apply_cnot(const QuantumState<Scalar> &state, int control,
                                int target) {
    detail::require_qubit(control);
    detail::require_qubit(target);
    if (control == target) {
        throw std::invalid_argument("apply_cnot: control and target must differ");
    }
    QuantumState<Scalar> out = state;
    if (control == 0) {
        std::swap(out(2), out(3)); // |10> <-> |11>
    } else {
        std::swap(out(1), out(3)); // |01> <-> |11>
    }
    return out;
}

/// Permutation matrix of a CNOT, for density-matrix evolution.
template <typename Scalar> DensityMatrix<Scalar> cnot_matrix(int control, int target) {
    DensityMatrix<Scalar> m;
    for (int col = 0; col < 4; ++col) {
        QuantumState<Scalar> e = QuantumState<Scalar>::Zero();
        e(col) = Complex<Scalar>(1);
        m.col(col) = apply_cnot(e, control, target);
    }
    return m;
}

template <typename Scalar>
Probabilities<Scalar> measure_probs(const QuantumState<Scalar> &state) {
    return state.cwiseAbs2();
}

template <typename Scalar>
DensityMatrix<Scalar> density_from_state(const QuantumState<Scalar> &state) {
    return state * state.adjoint();
}

/// Unitary conjugation rho -> U rho U^dagger.
template <typename Scalar>
DensityMatrix<Scalar> evolve(const DensityMatrix<Scalar> &rho,
                             const DensityMatrix<Scalar> &unitary) {
    return unitary * rho * unitary.adjoint();
}

/// Applies a single-qubit channel given by Kraus operators to one qubit of
/// a two-qubit density matrix. The set must satisfy sum K^dagger K = I
/// within 1e-10.
template <typename Scalar>
DensityMatrix<Scalar> apply_channel(const DensityMatrix<Scalar> &rho,
                                    std::span<const Gate2x2<Scalar>> kraus,
                                    int qubit) {
    detail::require_qubit(qubit);
    if (kraus.empty()) {
        throw std::invalid_argument("apply_channel: empty Kraus set");
    }
    Gate2x2<Scalar> completeness = Gate2x2<Scalar>::Zero();
    for (const auto &k : kraus) {
        completeness += k.adjoint() * k;
    }
    if ((completeness - Gate2x2<Scalar>::Identity()).cwiseAbs().maxCoeff() >
        Scalar(1e-10)) {
        throw std::invalid_argument(
            "apply_channel: Kraus operators are not trace preserving");
    }
    DensityMatrix<Scalar> out = DensityMatrix<Scalar>::Zero();
    for (const auto &k : kraus) {
        const DensityMatrix<Scalar> big = embed(k, qubit);
        out.noalias() += big * rho * big.adjoint();
    }
    return out;
}

template <typename Scalar>
DensityMatrix<Scalar> apply_channel(const DensityMatrix<Scalar> &rho,
                                    const std::vector<Gate2x2<Scalar>> &kraus,
                                    int qubit) {
    return apply_channel(rho, std::span<const Gate2x2<Scalar>>(kraus), qubit);
}

enum class NoiseChannel { AmplitudeDamping, Depolarizing, BitFlip, PhaseFlip };

inline const char *to_string(NoiseChannel c) {
    switch (c) {
    case NoiseChannel::AmplitudeDamping:
        return "AD";
    case NoiseChannel::Depolarizing:
        return "DP";
    case NoiseChannel::BitFlip:
        return "BF";
    case NoiseChannel::PhaseFlip:
        return "PF";
    }
    return "?";
}

inline NoiseChannel parse_noise_channel(const std::string &name) {
    if (name == "AD" || name == "ad") return NoiseChannel::AmplitudeDamping;
    if (name == "DP" || name == "dp") return NoiseChannel::Depolarizing;
    if (name == "BF" || name == "bf") return NoiseChannel::BitFlip;
    if (name == "PF" || name == "pf") return NoiseChannel::PhaseFlip;
    throw std::invalid_argument("unknown noise channel '" + name +
                                "' (expected AD, DP, BF or PF)");
}

/**
 * Kraus set of a single-qubit noise channel at strength gamma in [0, 1].
 *
 *  - AD: {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}
 *  - DP: rho -> (1-g) rho + g I/2, i.e. {sqrt(1-3g/4) I, sqrt(g/4) X, Y, Z}
 *  - BF: {sqrt(1-g) I, sqrt(g) X}
 *  - PF: {sqrt(1-g) I, sqrt(g) Z}
 */
template <typename Scalar>
std::vector<Gate2x2<Scalar>> kraus_operators(NoiseChannel channel, Scalar gamma) {
    if (!(gamma >= 0 && gamma <= 1)) {
        throw std::invalid_argument("noise strength must lie in [0, 1]");
    }
    const Gate2x2<Scalar> id = Gate2x2<Scalar>::Identity();
    switch (channel) {
    case NoiseChannel::AmplitudeDamping: {
        Gate2x2<Scalar> k0, k1;
        k0 << 1, 0, 0, std::sqrt(1 - gamma);
        k1 << 0, std::sqrt(gamma), 0, 0;
        return {k0, k1};
    }
    case NoiseChannel::Depolarizing: {
        const Scalar w = std::sqrt(gamma / 4);
        return {std::sqrt(1 - 3 * gamma / 4) * id, w * pauli_x<Scalar>(),
                w * pauli_y<Scalar>(), w * pauli_z<Scalar>()};
    }
    case NoiseChannel::BitFlip:
        return {std::sqrt(1 - gamma) * id, std::sqrt(gamma) * pauli_x<Scalar>()};
    case NoiseChannel::PhaseFlip:
        return {std::sqrt(1 - gamma) * id, std::sqrt(gamma) * pauli_z<Scalar>()};
    }
    throw std::invalid_argument("unknown noise channel");
}

/**
 * Column-stochastic map T(i, j) = P(measure i | prepared j) that a channel
 * induces on one qubit's computational-basis populations. All four
 * channels map diagonals to diagonals, so applying T per qubit to the
 * outcome distribution is exact for a channel placed just before
 * measurement.
 */
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> population_transfer(NoiseChannel channel, Scalar gamma) {
    if (!(gamma >= 0 && gamma <= 1)) {
        throw std::invalid_argument("noise strength must lie in [0, 1]");
    }
    Eigen::Matrix<Scalar, 2, 2> t;
    switch (channel) {
    case NoiseChannel::AmplitudeDamping:
        t << 1, gamma, 0, 1 - gamma;
        return t;
    case NoiseChannel::Depolarizing:
        t << 1 - gamma / 2, gamma / 2, gamma / 2, 1 - gamma / 2;
        return t;
    case NoiseChannel::BitFlip:
        t << 1 - gamma, gamma, gamma, 1 - gamma;
        return t;
    case NoiseChannel::PhaseFlip:
        return Eigen::Matrix<Scalar, 2, 2>::Identity();
    }
    throw std::invalid_argument("unknown noise channel");
}

} // namespace qpsan
