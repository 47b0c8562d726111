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
 * The quantum parametric attention (QPA) scoring circuit.
 *
 * For a scalar query/key pair (q, k) the circuit prepares
 *
 *     |psi> = [RX(2b) (x) RX(2b)] . U_ent . [RY(phi0) (x) RY(phi1)] |00>
 *
 * with the three-step encoding collapsed into the equivalent angles
 *
 *     phi0 = pi/4 + l1 q + l2 k,    phi1 = pi/4 + l2 q + l1 k,
 *     l1 = theta_s + gamma_d + gamma_s,    l2 = gamma_s - gamma_d,
 *
 * and U_ent = CNOT(1->0) . [I (x) RY(alpha (q + k))] . CNOT(0->1), the
 * CNOT(0->1) acting first. The score is the probability that both qubits
 * agree, mu = P(|00>) + P(|11>).
 *
 * Two evaluation routes exist: build_state() applies the gates one by one
 * on a complex statevector; score() uses real arithmetic on precomputed
 * half-angle trig values and is the one used for training. Tests pin the
 * two to 1e-12.
 */
#pragma once

#include "qpsan/quantum.hpp"
#include "qpsan/random.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qpsan {

template <typename Scalar = double> struct QpaParams {
    Scalar theta_s{0.5}; ///< initial encoding scale
    Scalar gamma_d{0};   ///< difference encoding strength
    Scalar gamma_s{0};   ///< sum encoding strength
    Scalar alpha{0};     ///< entanglement strength
    Scalar beta{0};      ///< mixer angle

    static constexpr int size = 5;

    Scalar lambda1() const { return theta_s + gamma_d + gamma_s; }
    Scalar lambda2() const { return gamma_s - gamma_d; }
    Scalar omega_d() const { return theta_s + 2 * gamma_d; }
    Scalar omega_s() const { return theta_s + 2 * gamma_s; }

    std::array<Scalar, 5> to_array() const {
        return {theta_s, gamma_d, gamma_s, alpha, beta};
    }
    static QpaParams from_array(const std::array<Scalar, 5> &a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }

    bool finite() const {
        return std::isfinite(theta_s) && std::isfinite(gamma_d) &&
               std::isfinite(gamma_s) && std::isfinite(alpha) && std::isfinite(beta);
    }
};

/// theta_s = 0.5; gamma_d, gamma_s, alpha, beta ~ N(0, 0.1^2).
template <typename Scalar = double, typename Rng>
QpaParams<Scalar> initial_qpa_params(Rng &rng) {
    std::normal_distribution<Scalar> normal(Scalar(0), Scalar(0.1));
    QpaParams<Scalar> p;
    p.theta_s = Scalar(0.5);
    p.gamma_d = normal(rng);
    p.gamma_s = normal(rng);
    p.alpha = normal(rng);
    p.beta = normal(rng);
    return p;
}

/// Which CNOT of the entangling layer acts first.
enum class EntanglerOrder {
    ControlZeroFirst, ///< CNOT(0->1), RY on qubit 1, CNOT(1->0)
    ControlOneFirst,  ///< CNOT(1->0), RY on qubit 1, CNOT(0->1)
};

enum class Encoding {
    ThreeStep,   ///< initial + difference + sum rotations
    Independent, ///< RY(pi/4 + theta_s q) (x) RY(pi/4 + theta_s k)
};

struct CircuitOptions {
    Encoding encoding = Encoding::ThreeStep;
    EntanglerOrder order = EntanglerOrder::ControlZeroFirst;
};

template <typename Scalar> struct EquivalentAngles {
    Scalar phi0;
    Scalar phi1;
};

template <typename Scalar>
EquivalentAngles<Scalar> equivalent_angles(Scalar q, Scalar k,
                                           const QpaParams<Scalar> &p,
                                           Encoding encoding = Encoding::ThreeStep) {
    constexpr Scalar quarter = std::numbers::pi_v<Scalar> / 4;
    if (encoding == Encoding::Independent) {
        return {quarter + p.theta_s * q, quarter + p.theta_s * k};
    }
    const Scalar l1 = p.lambda1();
    const Scalar l2 = p.lambda2();
    return {quarter + l1 * q + l2 * k, quarter + l2 * q + l1 * k};
}

/// RY(phi0)|0> (x) RY(phi1)|0>: the product state before entanglement.
template <typename Scalar>
QuantumState<Scalar> encoding_state(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                    Encoding encoding = Encoding::ThreeStep) {
    const auto [phi0, phi1] = equivalent_angles(q, k, p, encoding);
    QuantumState<Scalar> psi = zero_state<Scalar>();
    psi = apply_single(psi, ry(phi0), 0);
    psi = apply_single(psi, ry(phi1), 1);
    return psi;
}

/// Same product state built literally from the three encoding steps
/// (initial, difference, sum), without collapsing the angles.
template <typename Scalar>
QuantumState<Scalar> three_step_encoding_state(Scalar q, Scalar k,
                                               const QpaParams<Scalar> &p) {
    constexpr Scalar quarter = std::numbers::pi_v<Scalar> / 4;
    QuantumState<Scalar> psi = zero_state<Scalar>();
    psi = apply_single(psi, ry(quarter + p.theta_s * q), 0);
    psi = apply_single(psi, ry(quarter + p.theta_s * k), 1);
    psi = apply_single(psi, ry(p.gamma_d * (q - k)), 0);
    psi = apply_single(psi, ry(-p.gamma_d * (q - k)), 1);
    psi = apply_single(psi, ry(p.gamma_s * (q + k)), 0);
    psi = apply_single(psi, ry(p.gamma_s * (q + k)), 1);
    return psi;
}

template <typename Scalar>
QuantumState<Scalar> entangle(const QuantumState<Scalar> &psi, Scalar angle,
                              EntanglerOrder order) {
    const int first = order == EntanglerOrder::ControlZeroFirst ? 0 : 1;
    QuantumState<Scalar> out = apply_cnot(psi, first, 1 - first);
    out = apply_single(out, ry(angle), 1);
    return apply_cnot(out, 1 - first, first);
}

/// Reference statevector evolution, one gate at a time.
template <typename Scalar>
QuantumState<Scalar> build_state(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                 const CircuitOptions &opts = {}) {
    QuantumState<Scalar> psi = encoding_state(q, k, p, opts.encoding);
    psi = entangle(psi, p.alpha * (q + k), opts.order);
    const Gate2x2<Scalar> mix = rx(2 * p.beta);
    psi = apply_single(psi, mix, 0);
    return apply_single(psi, mix, 1);
}

template <typename Scalar>
Scalar agreement_probability(const Probabilities<Scalar> &probs) {
    return probs(0) + probs(3);
}

/// mu from the reference statevector route.
template <typename Scalar>
Scalar score_reference(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                       const CircuitOptions &opts = {}) {
    return agreement_probability(measure_probs(build_state(q, k, p, opts)));
}

/// Full 4x4 circuit unitary, built from embedded gates.
template <typename Scalar>
DensityMatrix<Scalar> circuit_unitary(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                      const CircuitOptions &opts = {}) {
    const auto [phi0, phi1] = equivalent_angles(q, k, p, opts.encoding);
    const int first = opts.order == EntanglerOrder::ControlZeroFirst ? 0 : 1;
    const Gate2x2<Scalar> mix = rx(2 * p.beta);
    DensityMatrix<Scalar> u = embed(ry(phi1), 1) * embed(ry(phi0), 0);
    u = cnot_matrix<Scalar>(first, 1 - first) * u;
    u = embed(ry(p.alpha * (q + k)), 1) * u;
    u = cnot_matrix<Scalar>(1 - first, first) * u;
    u = embed(mix, 1) * embed(mix, 0) * u;
    return u;
}

/// Noiseless density matrix U|00><00|U^dagger.
template <typename Scalar>
DensityMatrix<Scalar> circuit_density(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                      const CircuitOptions &opts = {}) {
    const DensityMatrix<Scalar> u = circuit_unitary(q, k, p, opts);
    return u.col(0) * u.col(0).adjoint();
}

template <typename Scalar> Scalar agreement_probability(const DensityMatrix<Scalar> &rho) {
    return std::real(rho(0, 0)) + std::real(rho(3, 3));
}

namespace detail {

template <typename Scalar> struct HalfAngle {
    Scalar c;
    Scalar s;

    static HalfAngle of(Scalar angle) { return {std::cos(angle / 2), std::sin(angle / 2)}; }

    /// Trig values of the gate angle shifted by +pi/2 (half angle +pi/4).
    HalfAngle plus() const {
        constexpr Scalar r = std::numbers::sqrt2_v<Scalar> / 2;
        return {r * (c - s), r * (s + c)};
    }
    HalfAngle minus() const {
        constexpr Scalar r = std::numbers::sqrt2_v<Scalar> / 2;
        return {r * (c + s), r * (s - c)};
    }
};

/// Real-arithmetic evaluation of P(00) + P(11). Encoding and entangling
/// gates keep the state real, so only the mixer introduces imaginary parts.
template <typename Scalar>
Scalar agreement(const HalfAngle<Scalar> &e0, const HalfAngle<Scalar> &e1,
                 const HalfAngle<Scalar> &ent, const HalfAngle<Scalar> &m0,
                 const HalfAngle<Scalar> &m1, EntanglerOrder order) {
    Scalar x0 = e0.c * e1.c, x1 = e0.c * e1.s, x2 = e0.s * e1.c, x3 = e0.s * e1.s;
    if (order == EntanglerOrder::ControlZeroFirst) {
        std::swap(x2, x3);
    } else {
        std::swap(x1, x3);
    }
    const Scalar w0 = ent.c * x0 - ent.s * x1;
    const Scalar w1 = ent.s * x0 + ent.c * x1;
    const Scalar w2 = ent.c * x2 - ent.s * x3;
    const Scalar w3 = ent.s * x2 + ent.c * x3;
    Scalar v0 = w0, v1 = w1, v2 = w2, v3 = w3;
    if (order == EntanglerOrder::ControlZeroFirst) {
        std::swap(v1, v3);
    } else {
        std::swap(v2, v3);
    }
    const Scalar aa = m0.c * m1.c;
    const Scalar bb = m0.s * m1.s;
    const Scalar ab = m0.c * m1.s;
    const Scalar ba = m0.s * m1.c;
    const Scalar re00 = aa * v0 - bb * v3;
    const Scalar im00 = ab * v1 + ba * v2;
    const Scalar re11 = aa * v3 - bb * v0;
    const Scalar im11 = ba * v1 + ab * v2;
    return re00 * re00 + im00 * im00 + re11 * re11 + im11 * im11;
}

/// All four outcome probabilities of the same real-arithmetic evaluation.
template <typename Scalar>
Probabilities<Scalar> outcome_probabilities(const HalfAngle<Scalar> &e0,
                                            const HalfAngle<Scalar> &e1,
                                            const HalfAngle<Scalar> &ent,
                                            const HalfAngle<Scalar> &mix,
                                            EntanglerOrder order) {
    Scalar x0 = e0.c * e1.c, x1 = e0.c * e1.s, x2 = e0.s * e1.c, x3 = e0.s * e1.s;
    if (order == EntanglerOrder::ControlZeroFirst) {
        std::swap(x2, x3);
    } else {
        std::swap(x1, x3);
    }
    Scalar v0 = ent.c * x0 - ent.s * x1;
    Scalar v1 = ent.s * x0 + ent.c * x1;
    Scalar v2 = ent.c * x2 - ent.s * x3;
    Scalar v3 = ent.s * x2 + ent.c * x3;
    if (order == EntanglerOrder::ControlZeroFirst) {
        std::swap(v1, v3);
    } else {
        std::swap(v2, v3);
    }
    const Scalar cc = mix.c * mix.c, ss = mix.s * mix.s, cs = mix.c * mix.s;
    auto sq = [](Scalar re, Scalar im) { return re * re + im * im; };
    Probabilities<Scalar> out;
    out << sq(cc * v0 - ss * v3, cs * (v1 + v2)), sq(cc * v1 - ss * v2, cs * (v0 + v3)),
        sq(cc * v2 - ss * v1, cs * (v0 + v3)), sq(cc * v3 - ss * v0, cs * (v1 + v2));
    return out;
}

} // namespace detail

/// mu(q, k) = P(|00>) + P(|11>), fast path.
template <typename Scalar>
Scalar score(Scalar q, Scalar k, const QpaParams<Scalar> &p,
             const CircuitOptions &opts = {}) {
    using H = detail::HalfAngle<Scalar>;
    const auto [phi0, phi1] = equivalent_angles(q, k, p, opts.encoding);
    const H mix = H::of(2 * p.beta);
    return detail::agreement(H::of(phi0), H::of(phi1), H::of(p.alpha * (q + k)), mix,
                             mix, opts.order);
}

/// Encoding-only closed form 1/2 + cos(w_d (q-k))/4 - sin(w_s (q+k))/4.
template <typename Scalar>
Scalar score_encoding_only(Scalar q, Scalar k, const QpaParams<Scalar> &p) {
    return Scalar(0.5) + std::cos(p.omega_d() * (q - k)) / 4 -
           std::sin(p.omega_s() * (q + k)) / 4;
}

/// Joint measurement of the encoding-only product state (no entangler,
/// no mixer), simulated.
template <typename Scalar>
Scalar score_encoding_only_simulated(Scalar q, Scalar k, const QpaParams<Scalar> &p) {
    return agreement_probability(measure_probs(three_step_encoding_state(q, k, p)));
}

template <typename Scalar = double> struct ScoreGradient {
    Scalar value{};
    /// d mu / d(theta_s, gamma_d, gamma_s, alpha, beta)
    std::array<Scalar, 5> d_params{};
    Scalar d_q{};
    Scalar d_k{};
};

/**
 * Exact gradient by the parameter-shift rule on each of the five rotation
 * gates (two encoding RYs, the entangling RY and the two mixer RXs), then
 * chained through the linear maps from (params, q, k) to gate angles.
 */
namespace detail {

/// Half-angle composition: trig values of (a + b) from those of a and b.
template <typename Scalar> HalfAngle<Scalar> compose(const HalfAngle<Scalar> &a,
                                                     const HalfAngle<Scalar> &b) {
    return {a.c * b.c - a.s * b.s, a.s * b.c + a.c * b.s};
}

/**
 * Parameter-shift gradient given the gate trig values. (a, b) are the
 * coefficients of the encoding angles, phi0 = pi/4 + a q + b k and
 * phi1 = pi/4 + b q + a k.
 */
template <typename Scalar>
ScoreGradient<Scalar> gradient_from_angles(const HalfAngle<Scalar> &e0,
                                           const HalfAngle<Scalar> &e1,
                                           const HalfAngle<Scalar> &ent,
                                           const HalfAngle<Scalar> &m, Scalar q, Scalar k,
                                           const QpaParams<Scalar> &p,
                                           const CircuitOptions &opts) {
    using H = HalfAngle<Scalar>;
    const auto f = [&](const H &a, const H &b, const H &c, const H &d, const H &e) {
        return agreement(a, b, c, d, e, opts.order);
    };

    ScoreGradient<Scalar> g;
    g.value = f(e0, e1, ent, m, m);
    const Scalar g0 = (f(e0.plus(), e1, ent, m, m) - f(e0.minus(), e1, ent, m, m)) / 2;
    const Scalar g1 = (f(e0, e1.plus(), ent, m, m) - f(e0, e1.minus(), ent, m, m)) / 2;
    const Scalar ge = (f(e0, e1, ent.plus(), m, m) - f(e0, e1, ent.minus(), m, m)) / 2;
    const Scalar gm0 = (f(e0, e1, ent, m.plus(), m) - f(e0, e1, ent, m.minus(), m)) / 2;
    const Scalar gm1 = (f(e0, e1, ent, m, m.plus()) - f(e0, e1, ent, m, m.minus())) / 2;

    g.d_params[3] = ge * (q + k);
    g.d_params[4] = 2 * (gm0 + gm1);
    if (opts.encoding == Encoding::Independent) {
        g.d_params[0] = g0 * q + g1 * k;
        g.d_q = g0 * p.theta_s + ge * p.alpha;
        g.d_k = g1 * p.theta_s + ge * p.alpha;
    } else {
        const Scalar l1 = p.lambda1(), l2 = p.lambda2();
        g.d_params[0] = g0 * q + g1 * k;
        g.d_params[1] = (g0 - g1) * (q - k);
        g.d_params[2] = (g0 + g1) * (q + k);
        g.d_q = g0 * l1 + g1 * l2 + ge * p.alpha;
        g.d_k = g0 * l2 + g1 * l1 + ge * p.alpha;
    }
    return g;
}

} // namespace detail

/**
 * Exact gradient by the parameter-shift rule on each of the five rotation
 * gates (two encoding RYs, the entangling RY and the two mixer RXs), then
 * chained through the linear maps from (params, q, k) to gate angles.
 */
template <typename Scalar>
ScoreGradient<Scalar> score_gradient(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                     const CircuitOptions &opts = {}) {
    using H = detail::HalfAngle<Scalar>;
    const auto [phi0, phi1] = equivalent_angles(q, k, p, opts.encoding);
    return detail::gradient_from_angles(H::of(phi0), H::of(phi1), H::of(p.alpha * (q + k)),
                                        H::of(2 * p.beta), q, k, p, opts);
}

/// Finite-shot estimate: `shots` draws from the four-outcome distribution,
/// returning the fraction that land in {|00>, |11>}.
template <typename Scalar>
Scalar score_sampled(Scalar q, Scalar k, const QpaParams<Scalar> &p, long long shots,
                     std::uint64_t seed, const CircuitOptions &opts = {}) {
    if (shots <= 0) {
        throw std::invalid_argument("score_sampled: shots must be positive");
    }
    const Probabilities<Scalar> probs = measure_probs(build_state(q, k, p, opts));
    const Scalar c0 = probs(0);
    const Scalar c1 = c0 + probs(1);
    const Scalar c2 = c1 + probs(2);
    CounterRng rng(seed);
    long long hits = 0;
    for (long long i = 0; i < shots; ++i) {
        const Scalar u = static_cast<Scalar>(rng.uniform());
        if (u < c0 || u >= c2) {
            ++hits;
        }
    }
    return static_cast<Scalar>(hits) / static_cast<Scalar>(shots);
}

/// Density matrix of the circuit followed by the same single-qubit channel
/// on each qubit, immediately before measurement.
template <typename Scalar>
DensityMatrix<Scalar> noisy_density(Scalar q, Scalar k, const QpaParams<Scalar> &p,
                                    NoiseChannel channel, Scalar gamma,
                                    const CircuitOptions &opts = {}) {
    const auto kraus = kraus_operators(channel, gamma);
    DensityMatrix<Scalar> rho = circuit_density(q, k, p, opts);
    rho = apply_channel(rho, kraus, 0);
    return apply_channel(rho, kraus, 1);
}

template <typename Scalar>
Scalar score_noisy(Scalar q, Scalar k, const QpaParams<Scalar> &p, NoiseChannel channel,
                   Scalar gamma, const CircuitOptions &opts = {}) {
    return agreement_probability(noisy_density(q, k, p, channel, gamma, opts));
}

/// Same value as score_noisy, computed by pushing the outcome distribution
/// through population_transfer on each qubit instead of Kraus sums.
template <typename Scalar>
Scalar score_noisy_fast(Scalar q, Scalar k, const QpaParams<Scalar> &p, NoiseChannel channel,
                        Scalar gamma, const CircuitOptions &opts = {}) {
    using H = detail::HalfAngle<Scalar>;
    const auto t = population_transfer(channel, gamma);
    const auto [phi0, phi1] = equivalent_angles(q, k, p, opts.encoding);
    const Probabilities<Scalar> probs = detail::outcome_probabilities(
        H::of(phi0), H::of(phi1), H::of(p.alpha * (q + k)), H::of(2 * p.beta), opts.order);
    // P'(ab) = sum_{a'b'} T(a, a') T(b, b') P(a'b'); only 00 and 11 are needed.
    Scalar mu = 0;
    for (int a = 0; a < 2; ++a) {
        Scalar pa = 0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                pa += t(a, i) * t(a, j) * probs(2 * i + j);
            }
        }
        mu += pa;
    }
    return mu;
}

/// Independent per-qubit bit flips: mu (1-2g)^2 + 2g(1-g).
template <typename Scalar> Scalar bit_flip_closed_form(Scalar mu, Scalar gamma) {
    return mu * (1 - 2 * gamma) * (1 - 2 * gamma) + 2 * gamma * (1 - gamma);
}

} // namespace qpsan
