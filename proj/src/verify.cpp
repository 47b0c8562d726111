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
#include "qpsan/verify.hpp"

#include "qpsan/properties.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qpsan {

namespace {

using Json = nlohmann::json;
using Rng = std::mt19937_64;
using P = QpaParams<double>;

constexpr double kPi = std::numbers::pi;

double uniform(Rng &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

P random_params(Rng &rng, double spread) {
    return {uniform(rng, -spread, spread), uniform(rng, -spread, spread),
            uniform(rng, -spread, spread), uniform(rng, -spread, spread),
            uniform(rng, -spread, spread)};
}

Json params_json(const P &p) {
    return {{"theta_s", p.theta_s}, {"gamma_d", p.gamma_d}, {"gamma_s", p.gamma_s},
            {"alpha", p.alpha},     {"beta", p.beta}};
}

/// Running maximum that remembers where it was attained.
struct WorstCase {
    double value = 0;
    Json where;

    void update(double v, const std::function<Json()> &describe) {
        if (v > value || where.is_null()) {
            value = v;
            where = describe();
        }
    }
};

struct Context {
    const VerifyOptions &opts;
    Rng rng;
};

ClaimResult make(const char *id, const char *description, double tolerance) {
    ClaimResult r;
    r.id = id;
    r.description = description;
    r.tolerance = tolerance;
    return r;
}

double max_abs(const DensityMatrix<double> &m) { return m.cwiseAbs().maxCoeff(); }

// -- quantum-core invariants ----------------------------------------------------------

ClaimResult claim_gates(Context &ctx) {
    ClaimResult r = make("gates", "RY and RX are unitary and RY angles add", 1e-12);
    double worst_unitary = 0;
    for (int i = 0; i < 1000; ++i) {
        const double theta = uniform(ctx.rng, -4 * kPi, 4 * kPi);
        for (const Gate2x2<double> &g : {ry(theta), rx(theta)}) {
            const double err =
                (g.adjoint() * g - Gate2x2<double>::Identity()).cwiseAbs().maxCoeff();
            worst_unitary = std::max(worst_unitary, err);
        }
    }
    const double additivity = (ry(0.3) * ry(0.7) - ry(1.0)).cwiseAbs().maxCoeff();
    r.witness = {{"max_unitarity_error", worst_unitary},
                 {"ry_additivity_error", additivity},
                 {"angles", 1000}};
    r.passed = worst_unitary <= r.tolerance && additivity <= r.tolerance;
    return r;
}

ClaimResult claim_state_norm(Context &ctx) {
    ClaimResult r =
        make("state-norm", "norm survives random gate sequences of length 50", 1e-12);
    double worst = 0;
    std::uniform_int_distribution<int> pick(0, 3);
    for (int s = 0; s < 200; ++s) {
        QuantumState<double> psi = zero_state<double>();
        for (int g = 0; g < 50; ++g) {
            const double theta = uniform(ctx.rng, -kPi, kPi);
            const int qubit = g % 2;
            switch (pick(ctx.rng)) {
            case 0:
                psi = apply_single(psi, ry(theta), qubit);
                break;
            case 1:
                psi = apply_single(psi, rx(theta), qubit);
                break;
            case 2:
                psi = apply_cnot(psi, qubit, 1 - qubit);
                break;
            default:
                psi = apply_single(psi, pauli_y<double>(), qubit);
            }
            worst = std::max(worst, std::abs(psi.norm() - 1.0));
        }
    }
    r.witness = {{"max_norm_error", worst}, {"sequences", 200}, {"length", 50}};
    r.passed = worst <= r.tolerance;
    return r;
}

ClaimResult claim_channels(Context &ctx) {
    ClaimResult r = make("channels",
                         "Kraus channels preserve trace, Hermiticity and positivity", 1e-10);
    double trace_err = 0, herm_err = 0, min_eig = 1;
    for (int trial = 0; trial < 5; ++trial) {
        const P p = random_params(ctx.rng, 1.5);
        const DensityMatrix<double> rho0 =
            circuit_density(uniform(ctx.rng, -2, 2), uniform(ctx.rng, -2, 2), p);
        for (NoiseChannel c : {NoiseChannel::AmplitudeDamping, NoiseChannel::Depolarizing,
                               NoiseChannel::BitFlip, NoiseChannel::PhaseFlip}) {
            for (int i = 0; i < 20; ++i) {
                const double gamma = i / 19.0;
                const auto kraus = kraus_operators(c, gamma);
                const DensityMatrix<double> rho =
                    apply_channel(apply_channel(rho0, kraus, 0), kraus, 1);
                trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
                herm_err = std::max(herm_err, max_abs(rho - rho.adjoint()));
                const Eigen::SelfAdjointEigenSolver<DensityMatrix<double>> eig(rho);
                min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
            }
        }
    }
    // Full-strength fixed points.
    const auto dp = kraus_operators(NoiseChannel::Depolarizing, 1.0);
    const DensityMatrix<double> pure = circuit_density(0.4, -0.9, P{0.5, 0.1, 0.2, 0.3, 0.4});
    const double dp_err =
        max_abs(apply_channel(apply_channel(pure, dp, 0), dp, 1) -
                DensityMatrix<double>::Identity() / 4.0);
    const DensityMatrix<double> zero = density_from_state(zero_state<double>());
    DensityMatrix<double> flipped = DensityMatrix<double>::Zero();
    flipped(2, 2) = 1;
    const double bf_err =
        max_abs(apply_channel(zero, kraus_operators(NoiseChannel::BitFlip, 1.0), 0) - flipped);

    r.witness = {{"max_trace_error", trace_err},      {"max_hermiticity_error", herm_err},
                 {"min_eigenvalue", min_eig},         {"depolarized_to_maximally_mixed", dp_err},
                 {"full_bit_flip_error", bf_err},     {"strengths", 20}};
    r.passed = trace_err <= r.tolerance && herm_err <= r.tolerance && min_eig >= -r.tolerance &&
               dp_err <= r.tolerance && bf_err <= r.tolerance;
    return r;
}

ClaimResult claim_density_statevector(Context &ctx) {
    ClaimResult r = make("density-statevector",
                         "density-matrix, statevector and fast-path scores coincide", 1e-12);
    WorstCase rho_vs_psi, fast_vs_psi;
    for (int i = 0; i < 100; ++i) {
        const P p = random_params(ctx.rng, 2.0);
        const double q = uniform(ctx.rng, -3, 3), k = uniform(ctx.rng, -3, 3);
        const double ref = score_reference(q, k, p, ctx.opts.simulated);
        const double rho = agreement_probability(circuit_density(q, k, p, ctx.opts.simulated));
        const double fast = score(q, k, p, ctx.opts.simulated);
        auto where = [&] { return Json{{"q", q}, {"k", k}, {"params", params_json(p)}}; };
        rho_vs_psi.update(std::abs(rho - ref), where);
        fast_vs_psi.update(std::abs(fast - ref), where);
    }
    r.witness = {{"max_density_error", rho_vs_psi.value},
                 {"max_fast_path_error", fast_vs_psi.value},
                 {"worst_point", rho_vs_psi.where},
                 {"samples", 100}};
    r.passed = rho_vs_psi.value <= r.tolerance && fast_vs_psi.value <= r.tolerance;
    return r;
}

// -- kernels and closed forms --------------------------------------------------------

ClaimResult claim_kernel_overlap(Context &ctx) {
    ClaimResult r = make("kernel-overlap",
                         "encoding kernel closed form equals the state overlap; the kernel is "
                         "non-separable exactly when lambda1 lambda2 != 0",
                         1e-12);
    WorstCase overlap;
    for (int i = 0; i < 10000; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const InputPair x1{uniform(ctx.rng, -3, 3), uniform(ctx.rng, -3, 3)};
        const InputPair x2{uniform(ctx.rng, -3, 3), uniform(ctx.rng, -3, 3)};
        const double err = std::abs(kernel_enc3(x1, x2, p) - kernel_enc3_statevector(x1, x2, p));
        overlap.update(err, [&] {
            return Json{{"x1", {x1.q, x1.k}}, {"x2", {x2.q, x2.k}}, {"params", params_json(p)}};
        });
    }

    // Non-separable case: lambda1, lambda2 > 0, probes where the kernel stays away from 0.
    double max_nonsep = -std::numeric_limits<double>::infinity();
    double max_fd_vs_analytic = 0;
    int probes = 0;
    while (probes < 500) {
        P p{uniform(ctx.rng, 0.2, 1.2), uniform(ctx.rng, -0.3, 0.0), uniform(ctx.rng, 0.05, 0.4),
            0, 0};
        if (!(p.lambda1() * p.lambda2() > 0.01)) {
            continue;
        }
        const KernelPoint at{uniform(ctx.rng, -1, 1), uniform(ctx.rng, -1, 1)};
        if (kernel_enc3(at, p) < 0.1) {
            continue;
        }
        const auto fd = mixed_partial_log_kernel(p, at);
        if (!fd) {
            continue;
        }
        ++probes;
        max_nonsep = std::max(max_nonsep, *fd);
        max_fd_vs_analytic =
            std::max(max_fd_vs_analytic, std::abs(*fd - mixed_partial_log_kernel_analytic(p, at)));
    }

    // Separable cases: lambda2 = 0 and the one-scale kernel.
    double max_sep = 0;
    for (int i = 0; i < 500; ++i) {
        const double g = uniform(ctx.rng, -0.5, 0.5);
        const P p{uniform(ctx.rng, 0.2, 1.2), g, g, 0, 0};
        const KernelPoint at{uniform(ctx.rng, -1, 1), uniform(ctx.rng, -1, 1)};
        if (const auto fd = mixed_partial_log_kernel(p, at)) {
            max_sep = std::max(max_sep, std::abs(*fd));
        }
        if (const auto fd1 = mixed_partial_log_kernel_enc1(uniform(ctx.rng, 0.2, 1.5), at)) {
            max_sep = std::max(max_sep, std::abs(*fd1));
        }
    }

    r.witness = {{"max_overlap_error", overlap.value},
                 {"worst_pair", overlap.where},
                 {"pairs", 10000},
                 {"max_mixed_partial_nonseparable", max_nonsep},
                 {"max_finite_difference_vs_analytic", max_fd_vs_analytic},
                 {"max_abs_mixed_partial_separable", max_sep},
                 {"separability_tolerance", 1e-6}};
    r.passed = overlap.value <= r.tolerance && max_nonsep < 0 && max_sep < 1e-6;
    return r;
}

ClaimResult claim_encoding_score(Context &ctx) {
    ClaimResult r = make("encoding-score",
                         "encoding-only score equals 1/2 + cos(w_d(q-k))/4 - sin(w_s(q+k))/4 "
                         "and the frequency identities hold",
                         1e-12);
    WorstCase closed, symmetry;
    double identities = 0;
    for (int i = 0; i < 10000; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -3, 3), k = uniform(ctx.rng, -3, 3);
        auto where = [&] { return Json{{"q", q}, {"k", k}, {"params", params_json(p)}}; };
        closed.update(std::abs(score_encoding_only(q, k, p) - score_encoding_only_simulated(q, k, p)),
                      where);
        symmetry.update(std::abs(score_encoding_only(q, k, p) - score_encoding_only(k, q, p)),
                        where);
        identities = std::max({identities, std::abs(p.lambda1() + p.lambda2() - p.omega_s()),
                               std::abs(p.lambda1() - p.lambda2() - p.omega_d())});
    }
    const double origin = score_encoding_only_simulated(0.0, 0.0, P{0.7, 0.2, -0.4, 0, 0});
    r.witness = {{"max_closed_form_error", closed.value},
                 {"worst_point", closed.where},
                 {"max_symmetry_error", symmetry.value},
                 {"max_frequency_identity_error", identities},
                 {"origin_value", origin},
                 {"samples", 10000}};
    r.passed = closed.value <= r.tolerance && symmetry.value <= r.tolerance &&
               identities <= r.tolerance && std::abs(origin - 0.75) <= r.tolerance;
    return r;
}

// -- properties -----------------------------------------------------------------------

ClaimResult claim_bounded(Context &ctx) {
    ClaimResult r = make("bounded", "the score lies in [0, 1]", 1e-12);
    std::normal_distribution<double> wide(0.0, 3.0);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
        const P p{wide(ctx.rng), wide(ctx.rng), wide(ctx.rng), wide(ctx.rng), wide(ctx.rng)};
        const double mu = score(wide(ctx.rng), wide(ctx.rng), p, ctx.opts.simulated);
        lo = std::min(lo, mu);
        hi = std::max(hi, mu);
    }
    r.witness = {{"min_score", lo}, {"max_score", hi}, {"samples", 100000}};
    r.passed = lo >= -r.tolerance && hi <= 1 + r.tolerance;
    return r;
}

ClaimResult claim_asymmetry(Context &ctx) {
    ClaimResult r = make("asymmetry",
                         "with alpha != 0 and lambda1 != lambda2 some grid point has "
                         "mu(q, k) != mu(k, q)",
                         1e-6);
    double weakest = std::numeric_limits<double>::infinity();
    Json weakest_params;
    int found = 0;
    for (int set = 0; set < 50; ++set) {
        P p;
        do {
            p = P{uniform(ctx.rng, 0.2, 1.5), uniform(ctx.rng, -0.5, 0.5),
                  uniform(ctx.rng, -0.5, 0.5), uniform(ctx.rng, 0.2, 1.0), uniform(ctx.rng, -0.5, 0.5)};
            if (ctx.rng() % 2) {
                p.alpha = -p.alpha;
            }
        } while (std::abs(p.lambda1() - p.lambda2()) < 1e-3);
        double best = 0;
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j) {
                const double q = -2 + 4.0 * i / 19, k = -2 + 4.0 * j / 19;
                best = std::max(best, std::abs(score(q, k, p, ctx.opts.simulated) -
                                               score(k, q, p, ctx.opts.simulated)));
            }
        }
        found += best > r.tolerance;
        if (best < weakest) {
            weakest = best;
            weakest_params = params_json(p);
        }
    }
    // The encoding-only score is symmetric; the asymmetry comes from the entangler.
    double encoding_asym = 0;
    for (int i = 0; i < 20; ++i) {
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const P p = random_params(ctx.rng, 1.0);
        encoding_asym = std::max(encoding_asym, std::abs(score_encoding_only(q, k, p) -
                                                         score_encoding_only(k, q, p)));
    }
    r.witness = {{"parameter_sets", 50},
                 {"sets_with_witness", found},
                 {"weakest_max_asymmetry", weakest},
                 {"weakest_params", weakest_params},
                 {"encoding_only_max_asymmetry", encoding_asym}};
    r.passed = found == 50;
    return r;
}

ClaimResult claim_non_monotone(Context &ctx) {
    ClaimResult r = make("non-monotone",
                         "mu(q, 0) is not monotone: a strict local minimum is followed by a "
                         "rise of at least 0.05",
                         0.05);
    const P p{1.0, 0.0, 0.0, 0.3, 0.2}; // omega_d = omega_s = 1
    std::vector<double> mu;
    for (int i = 0; i <= 1200; ++i) {
        mu.push_back(score(i * 0.01, 0.0, p, ctx.opts.simulated));
    }
    double best_rise = 0, at = -1;
    for (std::size_t i = 1; i + 1 < mu.size(); ++i) {
        if (mu[i] < mu[i - 1] && mu[i] < mu[i + 1]) {
            const double rise = *std::max_element(mu.begin() + static_cast<std::ptrdiff_t>(i),
                                                  mu.end()) -
                                mu[i];
            if (rise > best_rise) {
                best_rise = rise;
                at = static_cast<double>(i) * 0.01;
            }
        }
    }
    r.witness = {{"params", params_json(p)},
                 {"local_minimum_q", at},
                 {"rise_after_minimum", best_rise},
                 {"grid", "q in [0, 12] step 0.01, k = 0"}};
    r.passed = at >= 0 && best_rise >= r.tolerance;
    return r;
}

// -- degrees of freedom -------------------------------------------------------------

ClaimResult claim_encoding_rank(Context &) {
    ClaimResult r = make("encoding-rank",
                         "encoding Jacobian d(w_d, w_s)/d(theta_s, gamma_d, gamma_s) has rank 2",
                         1e-12);
    const auto jac = encoding_jacobian();
    const RankReport rank = encoding_jacobian_rank(P{});
    const double det = jac.leftCols<2>().determinant();
    r.witness = {{"rank", rank.numerical_rank},
                 {"leading_minor_determinant", det},
                 {"singular_values", std::vector<double>(rank.singular_values.data(),
                                                         rank.singular_values.data() +
                                                             rank.singular_values.size())}};
    r.passed = rank.numerical_rank == 2 && std::abs(det + 2) <= r.tolerance;
    return r;
}

ClaimResult claim_circuit_rank(Context &ctx) {
    ClaimResult r = make("circuit-rank",
                         "full-circuit parameter Jacobian rank is at most 4, and exactly 2 on "
                         "the alpha = beta = 0 slice",
                         1e-8);
    const auto grid = default_probe_grid();
    std::map<int, int> histogram;
    int max_rank = 0;
    std::map<int, int> restricted;
    for (int i = 0; i < 100; ++i) {
        P p = random_params(ctx.rng, 1.5);
        const RankReport full = full_circuit_rank(p, grid, r.tolerance, ctx.opts.simulated);
        ++histogram[full.numerical_rank];
        max_rank = std::max(max_rank, full.numerical_rank);
        ++restricted[restricted_encoding_rank(p, grid, r.tolerance, ctx.opts.simulated)
                         .numerical_rank];
    }
    Json hist, rhist;
    for (auto [k, v] : histogram) hist[std::to_string(k)] = v;
    for (auto [k, v] : restricted) rhist[std::to_string(k)] = v;
    r.witness = {{"parameter_points", 100},
                 {"grid_points", grid.size()},
                 {"max_rank", max_rank},
                 {"rank_histogram", hist},
                 {"restricted_rank_histogram", rhist},
                 {"note", "empirical upper-bound confirmation, not a proof"}};
    r.passed = max_rank <= 4 && restricted.size() == 1 && restricted.begin()->first == 2;
    return r;
}

// -- circuit facts --------------------------------------------------------------------

ClaimResult claim_degenerate(Context &ctx) {
    ClaimResult r = make("degenerate",
                         "with alpha = beta = 0 the score is a single-qubit cos^2 projection; "
                         "origin value cos^2(pi/8)",
                         1e-12);
    const EntanglerOrder conv = ctx.opts.convention;
    WorstCase projection;
    for (int i = 0; i < 1000; ++i) {
        P p = random_params(ctx.rng, 1.5);
        p.alpha = p.beta = 0;
        const double q = uniform(ctx.rng, -3, 3), k = uniform(ctx.rng, -3, 3);
        projection.update(
            std::abs(score_reference(q, k, p, ctx.opts.simulated) - degenerate_score(q, k, p, conv)),
            [&] { return Json{{"q", q}, {"k", k}, {"params", params_json(p)}}; });
    }

    // theta_s = 0.5, gammas zero: only one input survives the projection.
    const P half{0.5, 0, 0, 0, 0};
    const bool query_survives = conv == EntanglerOrder::ControlZeroFirst;
    double surviving = 0, constancy = 0;
    for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
            const double x = -2 + 0.2 * i, y = -2 + 0.2 * j;
            const double q = query_survives ? x : y, k = query_survives ? y : x;
            const double mu = score_reference(q, k, half, ctx.opts.simulated);
            surviving = std::max(surviving,
                                 std::abs(mu - std::pow(std::cos(kPi / 8 + 0.25 * x), 2)));
            const double q0 = query_survives ? x : -2.0, k0 = query_survives ? -2.0 : x;
            constancy = std::max(constancy,
                                 std::abs(mu - score_reference(q0, k0, half, ctx.opts.simulated)));
        }
    }

    constexpr double origin_expected = 0.8535533905932737; // cos^2(pi/8)
    double origin_err = 0;
    for (int i = 0; i < 100; ++i) {
        P p = random_params(ctx.rng, 2.0);
        p.beta = 0;
        origin_err = std::max(origin_err,
                              std::abs(score(0.0, 0.0, p, ctx.opts.simulated) - origin_expected));
    }
    r.witness = {{"max_projection_error", projection.value},
                 {"worst_point", projection.where},
                 {"surviving_input", query_survives ? "q" : "k"},
                 {"max_surviving_profile_error", surviving},
                 {"max_constancy_error", constancy},
                 {"origin_value", origin_expected},
                 {"max_origin_error", origin_err},
                 {"origin_tolerance", 1e-9}};
    r.passed = projection.value <= r.tolerance && surviving <= r.tolerance &&
               constancy <= r.tolerance && origin_err <= 1e-9;
    return r;
}

ClaimResult claim_gradient(Context &ctx) {
    ClaimResult r = make("gradient",
                         "parameter-shift gradient equals central finite differences (h = 1e-4)",
                         1e-6);
    constexpr double h = 1e-4;
    WorstCase worst;
    for (int i = 0; i < 200; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const auto g = score_gradient(q, k, p, ctx.opts.simulated);
        auto f = [&](const P &pp, double qq, double kk) {
            return score(qq, kk, pp, ctx.opts.simulated);
        };
        double err = 0;
        for (int c = 0; c < 5; ++c) {
            auto a = p.to_array(), b = p.to_array();
            a[c] += h;
            b[c] -= h;
            const double fd = (f(P::from_array(a), q, k) - f(P::from_array(b), q, k)) / (2 * h);
            err = std::max(err, std::abs(fd - g.d_params[c]));
        }
        err = std::max(err, std::abs((f(p, q + h, k) - f(p, q - h, k)) / (2 * h) - g.d_q));
        err = std::max(err, std::abs((f(p, q, k + h) - f(p, q, k - h)) / (2 * h) - g.d_k));
        worst.update(err, [&] { return Json{{"q", q}, {"k", k}, {"params", params_json(p)}}; });
    }
    r.witness = {{"max_abs_error", worst.value}, {"worst_point", worst.where}, {"points", 200}};
    r.passed = worst.value <= r.tolerance;
    return r;
}

// -- noise ----------------------------------------------------------------------------

const std::vector<double> kSweep{0.0, 0.02, 0.04, 0.06, 0.08, 0.10};

ClaimResult claim_noise_identity(Context &ctx) {
    ClaimResult r = make("noise-identity", "every channel at strength 0 is the identity", 1e-12);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const double mu = score_reference(q, k, p, ctx.opts.simulated);
        for (NoiseChannel c : {NoiseChannel::AmplitudeDamping, NoiseChannel::Depolarizing,
                               NoiseChannel::BitFlip, NoiseChannel::PhaseFlip}) {
            worst = std::max(worst, std::abs(score_noisy(q, k, p, c, 0.0, ctx.opts.simulated) - mu));
        }
    }
    r.witness = {{"max_abs_error", worst}, {"samples", 100}};
    r.passed = worst <= r.tolerance;
    return r;
}

ClaimResult claim_noise_pf(Context &ctx) {
    ClaimResult r = make("noise-pf", "phase flip leaves the score unchanged", 1e-12);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const double mu = score_reference(q, k, p, ctx.opts.simulated);
        for (double gamma : {0.02, 0.05, 0.1, 0.5, 1.0}) {
            worst = std::max(worst, std::abs(score_noisy(q, k, p, NoiseChannel::PhaseFlip, gamma,
                                                         ctx.opts.simulated) -
                                             mu));
        }
    }
    r.witness = {{"max_abs_error", worst}, {"samples", 200},
                 {"strengths", {0.02, 0.05, 0.1, 0.5, 1.0}}};
    r.passed = worst <= r.tolerance;
    return r;
}

ClaimResult claim_noise_bf(Context &ctx) {
    ClaimResult r = make("noise-bf",
                         "bit flip follows mu (1-2g)^2 + 2g(1-g); g = 0.5 gives 1/2", 1e-10);
    double worst = 0, half = 0;
    for (int i = 0; i < 200; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const double mu = score_reference(q, k, p, ctx.opts.simulated);
        for (double gamma : kSweep) {
            const double noisy =
                score_noisy(q, k, p, NoiseChannel::BitFlip, gamma, ctx.opts.simulated);
            worst = std::max(worst, std::abs(noisy - bit_flip_closed_form(mu, gamma)));
        }
        half = std::max(half, std::abs(score_noisy(q, k, p, NoiseChannel::BitFlip, 0.5,
                                                   ctx.opts.simulated) -
                                       0.5));
    }
    r.witness = {{"max_closed_form_error", worst}, {"max_half_strength_error", half},
                 {"samples", 200}, {"strengths", kSweep}};
    r.passed = worst <= r.tolerance && half <= r.tolerance;
    return r;
}

ClaimResult claim_noise_ordering(Context &ctx) {
    ClaimResult r = make("noise-ordering",
                         "at g = 0.10 bit flip moves the score most, phase flip not at all", 0);
    std::map<std::string, double> shift;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        const P p = random_params(ctx.rng, 1.5);
        const double q = uniform(ctx.rng, -2, 2), k = uniform(ctx.rng, -2, 2);
        const double mu = score_reference(q, k, p, ctx.opts.simulated);
        for (NoiseChannel c : {NoiseChannel::AmplitudeDamping, NoiseChannel::Depolarizing,
                               NoiseChannel::BitFlip, NoiseChannel::PhaseFlip}) {
            shift[to_string(c)] +=
                std::abs(score_noisy(q, k, p, c, 0.1, ctx.opts.simulated) - mu) / n;
        }
    }
    r.witness = {{"mean_abs_shift", shift}, {"samples", n}};
    r.passed = shift["BF"] > shift["AD"] && shift["BF"] > shift["DP"] && shift["PF"] <= 1e-12;
    return r;
}

// -- shots ----------------------------------------------------------------------------

ClaimResult claim_shots(Context &ctx) {
    ClaimResult r = make("shots",
                         "empirical std of the S-shot estimate stays within 1.1 / (2 sqrt(S)); "
                         "S = 100 gives at most 0.05",
                         0.05);
    const P p{0.5, 0.1, -0.1, 0.3, 0.2};
    const double q = 0.3, k = -0.2; // mu ~ 0.71, std at S = 100 close to the bound
    const double mu = score(q, k, p, ctx.opts.simulated);
    const int reps = 1000;
    Json rows = Json::array();
    bool ok = true;
    double std100 = 0;
    const std::uint64_t base = ctx.rng();
    for (long long shots : {25LL, 100LL, 400LL, 1600LL}) {
        double sum = 0, sum2 = 0;
        for (int i = 0; i < reps; ++i) {
            const double est = score_sampled(q, k, p, shots, base + static_cast<std::uint64_t>(i) +
                                                                 1000003ULL * static_cast<std::uint64_t>(shots),
                                             ctx.opts.simulated);
            sum += est;
            sum2 += est * est;
        }
        const double mean = sum / reps;
        const double sd = std::sqrt(std::max(0.0, (sum2 - reps * mean * mean) / (reps - 1)));
        const double bound = 1.0 / (2.0 * std::sqrt(static_cast<double>(shots)));
        ok = ok && sd <= 1.1 * bound;
        if (shots == 100) {
            std100 = sd;
        }
        rows.push_back({{"shots", shots}, {"empirical_std", sd}, {"bound", bound}, {"mean", mean}});
    }
    r.witness = {{"mu", mu},
                 {"binomial_std_at_100", std::sqrt(mu * (1 - mu) / 100)},
                 {"repetitions", reps},
                 {"rows", rows}};
    r.passed = ok && std100 <= r.tolerance;
    return r;
}

using ClaimFn = ClaimResult (*)(Context &);

const std::vector<std::pair<std::string, ClaimFn>> &registry() {
    static const std::vector<std::pair<std::string, ClaimFn>> claims{
        {"gates", claim_gates},
        {"state-norm", claim_state_norm},
        {"channels", claim_channels},
        {"density-statevector", claim_density_statevector},
        {"kernel-overlap", claim_kernel_overlap},
        {"encoding-score", claim_encoding_score},
        {"bounded", claim_bounded},
        {"asymmetry", claim_asymmetry},
        {"non-monotone", claim_non_monotone},
        {"encoding-rank", claim_encoding_rank},
        {"circuit-rank", claim_circuit_rank},
        {"degenerate", claim_degenerate},
        {"gradient", claim_gradient},
        {"noise-identity", claim_noise_identity},
        {"noise-pf", claim_noise_pf},
        {"noise-bf", claim_noise_bf},
        {"noise-ordering", claim_noise_ordering},
        {"shots", claim_shots},
    };
    return claims;
}

} // namespace

const std::vector<std::string> &claim_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto &[id, fn] : registry()) {
            out.push_back(id);
        }
        return out;
    }();
    return ids;
}

std::vector<ClaimResult> run_claims(const VerifyOptions &options) {
    for (const auto &id : options.only) {
        if (std::find(claim_ids().begin(), claim_ids().end(), id) == claim_ids().end()) {
            throw std::invalid_argument("unknown claim '" + id + "'");
        }
    }
    std::vector<ClaimResult> results;
    for (std::size_t i = 0; i < registry().size(); ++i) {
        const auto &[id, fn] = registry()[i];
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
            continue;
        }
        // Each claim draws from its own stream so filtering never changes witnesses.
        Context ctx{options, Rng(options.seed + 7919 * i)};
        const auto start = std::chrono::steady_clock::now();
        ClaimResult r = fn(ctx);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

bool all_passed(const std::vector<ClaimResult> &results) {
    return std::all_of(results.begin(), results.end(),
                       [](const ClaimResult &r) { return r.passed; });
}

nlohmann::json claims_report(const std::vector<ClaimResult> &results) {
    Json claims = Json::array();
    for (const auto &r : results) {
        claims.push_back({{"id", r.id},
                          {"description", r.description},
                          {"passed", r.passed},
                          {"tolerance", r.tolerance},
                          {"witness", r.witness},
                          {"seconds", r.seconds}});
    }
    return {{"schema_version", kSchemaVersion},
            {"passed", all_passed(results)},
            {"claims", claims}};
}

} // namespace qpsan
