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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check carries its own tolerance and time budget.

#include "qpsan/attention.hpp"
#include "qpsan/circuit.hpp"
#include "qpsan/experiment.hpp"
#include "qpsan/properties.hpp"
#include "qpsan/run_config.hpp"
#include "qpsan/stats.hpp"
#include "qpsan/train.hpp"
#include "qpsan/vit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef QPSAN_CONFIG_DIR
#error "QPSAN_CONFIG_DIR must point at the configs directory"
#endif

using namespace qpsan;

namespace {

using P = QpaParams<double>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int number;
    const char *title;
    double budget_seconds; ///< infinity when no limit applies
    std::function<Outcome()> run;
};

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

P random_params(std::mt19937_64 &rng, double scale) {
    return P{uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale),
             uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

// -- 1 -----------------------------------------------------------------------------------

Outcome closed_form_oracle() {
    std::mt19937_64 rng(101);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const P p = random_params(rng, 2.0);
        const double q = uniform(rng, -3, 3), k = uniform(rng, -3, 3);
        worst = std::max(worst, std::abs(score_encoding_only_simulated(q, k, p) -
                                         score_encoding_only(q, k, p)));
    }
    return {worst <= 1e-12, fmt("max |simulated - closed form| = %.3g over 10000", worst)};
}

// -- 2 -----------------------------------------------------------------------------------

Outcome kernel_equivalence() {
    std::mt19937_64 rng(202);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const P p = random_params(rng, 2.0);
        const InputPair a{uniform(rng, -2, 2), uniform(rng, -2, 2)};
        const InputPair b{uniform(rng, -2, 2), uniform(rng, -2, 2)};
        worst = std::max(worst,
                         std::abs(kernel_enc3(a, b, p) - kernel_enc3_statevector(a, b, p)));
    }

    // lambda1 lambda2 > 0: the mixed log-partial is strictly negative.
    double max_coupled = -std::numeric_limits<double>::infinity();
    int coupled = 0;
    while (coupled < 500) {
        P p{uniform(rng, 0.2, 1.5), uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), 0, 0};
        if (p.lambda1() * p.lambda2() <= 0.01) {
            continue;
        }
        const auto v = mixed_partial_log_kernel(p, {uniform(rng, -1, 1), uniform(rng, -1, 1)});
        if (v) {
            max_coupled = std::max(max_coupled, *v);
            ++coupled;
        }
    }
    // lambda2 = 0: the kernel factorizes and the mixed partial vanishes.
    double max_separable = 0;
    int separable = 0;
    while (separable < 500) {
        const double g = uniform(rng, -0.5, 0.5);
        const P p{uniform(rng, 0.2, 1.5), g, g, 0, 0};
        const auto v = mixed_partial_log_kernel(p, {uniform(rng, -1, 1), uniform(rng, -1, 1)});
        if (v) {
            max_separable = std::max(max_separable, std::abs(*v));
            ++separable;
        }
    }
    const bool ok = worst <= 1e-12 && max_coupled < 0 && max_separable < 1e-6;
    return {ok, fmt("kernel err %.3g; max partial (l1 l2 > 0) %.3g; max |partial| (l2 = 0) %.3g",
                    worst, max_coupled, max_separable)};
}

// -- 3 -----------------------------------------------------------------------------------

Outcome degenerate_oracle() {
    std::mt19937_64 rng(303);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        P p = random_params(rng, 2.0);
        p.alpha = p.beta = 0;
        const double q = uniform(rng, -3, 3), k = uniform(rng, -3, 3);
        // Brute-force statevector against cos^2(phi0 / 2), the query-side projection.
        const double phi0 = equivalent_angles(q, k, p, Encoding::ThreeStep).phi0;
        const double projection = std::pow(std::cos(phi0 / 2), 2);
        worst = std::max(worst, std::abs(score_reference(q, k, p) - projection));
    }
    double origin_err = 0;
    const double expected = std::pow(std::cos(std::numbers::pi / 8), 2);
    for (int i = 0; i < 100; ++i) {
        P p = random_params(rng, 2.0);
        p.alpha = p.beta = 0;
        origin_err = std::max(origin_err, std::abs(score_reference(0.0, 0.0, p) - expected));
    }
    // 0.853553 is cos^2(pi/8) to six places; the value itself must hold to 1e-9.
    const double origin = score_reference(0.0, 0.0, P{});
    const bool ok = worst <= 1e-12 && origin_err <= 1e-9 && std::abs(origin - 0.853553) < 1e-6;
    return {ok, fmt("max |circuit - cos^2(phi0/2)| = %.3g; origin %.9f (max err %.3g over 100 "
                    "parameter sets)",
                    worst, origin, origin_err)};
}

// -- 4 -----------------------------------------------------------------------------------

Outcome boundedness_and_witnesses() {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> wide(0.0, 3.0);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
        const P p{wide(rng), wide(rng), wide(rng), wide(rng), wide(rng)};
        const double mu = score(wide(rng), wide(rng), p);
        lo = std::min(lo, mu);
        hi = std::max(hi, mu);
    }
    const bool bounded = lo >= 0 && hi <= 1;

    // Asymmetry: alpha != 0 with lambda1 != lambda2 yields mu(q, k) != mu(k, q).
    const P asym{0.8, 0.2, -0.1, 0.6, 0.3};
    double asymmetry = 0, wq = 0, wk = 0;
    for (int i = 0; i < 41; ++i) {
        for (int j = 0; j < 41; ++j) {
            const double q = -2 + 0.1 * i, k = -2 + 0.1 * j;
            const double d = std::abs(score(q, k, asym) - score(k, q, asym));
            if (d > asymmetry) {
                asymmetry = d;
                wq = q;
                wk = k;
            }
        }
    }

    // Non-monotonicity: a strict local minimum of mu(q, 0) followed by a rise.
    const P wave{1.0, 0.0, 0.0, 0.3, 0.2};
    std::vector<double> mu;
    for (int i = 0; i <= 1200; ++i) {
        mu.push_back(score(0.01 * i, 0.0, wave));
    }
    double rise = 0, at = -1;
    for (std::size_t i = 1; i + 1 < mu.size(); ++i) {
        if (mu[i] < mu[i - 1] && mu[i] < mu[i + 1]) {
            const double r =
                *std::max_element(mu.begin() + static_cast<std::ptrdiff_t>(i), mu.end()) - mu[i];
            if (r > rise) {
                rise = r;
                at = 0.01 * static_cast<double>(i);
            }
        }
    }
    const bool ok = bounded && asymmetry > 1e-6 && at >= 0 && rise >= 0.05;
    return {ok, fmt("range [%.6f, %.6f]; asymmetry %.4f at (%.1f, %.1f); minimum at q=%.2f "
                    "then rise %.4f",
                    lo, hi, asymmetry, wq, wk, at, rise)};
}

// -- 5 -----------------------------------------------------------------------------------

Outcome dof_bounds() {
    std::mt19937_64 rng(505);
    const int encoding_rank = encoding_jacobian_rank(P{}).numerical_rank;
    const auto grid = default_probe_grid();
    int max_full = 0, min_full = 5, restricted_lo = 5, restricted_hi = 0;
    for (int i = 0; i < 100; ++i) {
        const P p = random_params(rng, 1.5);
        const int full = full_circuit_rank(p, grid).numerical_rank;
        max_full = std::max(max_full, full);
        min_full = std::min(min_full, full);
        const int restricted = restricted_encoding_rank(p, grid).numerical_rank;
        restricted_lo = std::min(restricted_lo, restricted);
        restricted_hi = std::max(restricted_hi, restricted);
    }
    const bool ok = encoding_rank == 2 && max_full <= 4 && restricted_lo == 2 &&
                    restricted_hi == 2;
    return {ok, fmt("encoding rank %d; full rank in [%d, %d] over 100 points; alpha=beta=0 "
                    "rank in [%d, %d]",
                    encoding_rank, min_full, max_full, restricted_lo, restricted_hi)};
}

// -- 6 -----------------------------------------------------------------------------------

double scorer_shift_vs_fd(std::mt19937_64 &rng) {
    constexpr double h = 1e-5;
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
        const P p = random_params(rng, 1.5);
        const double q = uniform(rng, -2, 2), k = uniform(rng, -2, 2);
        const auto g = score_gradient(q, k, p);
        for (int j = 0; j < 5; ++j) {
            P up = p, down = p;
            double *u[] = {&up.theta_s, &up.gamma_d, &up.gamma_s, &up.alpha, &up.beta};
            double *d[] = {&down.theta_s, &down.gamma_d, &down.gamma_s, &down.alpha, &down.beta};
            *u[j] += h;
            *d[j] -= h;
            const double fd = (score(q, k, up) - score(q, k, down)) / (2 * h);
            worst = std::max(worst, std::abs(fd - g.d_params[static_cast<std::size_t>(j)]));
        }
        const double fd_q = (score(q + h, k, p) - score(q - h, k, p)) / (2 * h);
        const double fd_k = (score(q, k + h, p) - score(q, k - h, p)) / (2 * h);
        worst = std::max({worst, std::abs(fd_q - g.d_q), std::abs(fd_k - g.d_k)});
    }
    return worst;
}

VitConfig tiny_config(ScorerKind scorer) {
    VitConfig c;
    c.image_size = 8;
    c.patch_size = 4;
    c.num_layers = 1;
    c.heads = 2;
    c.hidden_size = 8;
    c.mlp_hidden = 12;
    c.aggregation_depth = 4;
    c.scorer = scorer;
    return c;
}

// Returns the number of parameters whose analytic and numeric gradients
// disagree beyond rel 1e-3 (with a 1e-6 absolute floor); counts into `checked`.
int model_gradient_failures(ScorerKind kind, int &checked) {
    constexpr double h = 1e-3, rel_tol = 1e-3, abs_tol = 1e-6;
    std::mt19937_64 rng(600 + static_cast<int>(kind));
    const VitConfig c = tiny_config(kind);
    VitModel model(c, 17);
    // Perturb away from the initialization so no block sits at a special point.
    std::normal_distribution<double> n(0, 0.3);
    for (const auto &t : model.tensors()) {
        auto block = model.parameters().segment(t.offset, t.size());
        for (Eigen::Index i = 0; i < block.size(); ++i) {
            block(i) += n(rng);
        }
    }
    std::uniform_real_distribution<double> u(0, 1);
    const Image image = Image::NullaryExpr(c.image_dim(), [&] { return u(rng); });
    const int label = 0;
    Vector grad = Vector::Zero(model.parameter_count());
    model.backward(image, label, grad);

    int failed = 0;
    for (Eigen::Index idx = 0; idx < model.parameter_count(); ++idx) {
        double &w = model.parameters()(idx);
        const double keep = w;
        w = keep + h;
        const double up = cross_entropy(model.forward(image), label);
        w = keep - h;
        const double down = cross_entropy(model.forward(image), label);
        w = keep;
        const double numeric = (up - down) / (2 * h);
        const double err = std::abs(numeric - grad(idx));
        const double scale = std::max(std::abs(numeric), std::abs(grad(idx)));
        ++checked;
        failed += err > abs_tol && err > rel_tol * scale;
    }
    return failed;
}

Outcome gradient_correctness() {
    std::mt19937_64 rng(606);
    const double scorer_err = scorer_shift_vs_fd(rng);
    int checked = 0, failed = 0;
    for (auto kind : {ScorerKind::Qpa, ScorerKind::Dot, ScorerKind::Mlp49, ScorerKind::Mlp585,
                      ScorerKind::Cosine, ScorerKind::Linear, ScorerKind::QpaInd}) {
        failed += model_gradient_failures(kind, checked);
    }
    return {scorer_err <= 1e-6 && failed == 0,
            fmt("parameter shift vs FD max err %.3g; model gradients %d/%d outside rel 1e-3 "
                "(7 scorers)",
                scorer_err, failed, checked)};
}

// -- 7 -----------------------------------------------------------------------------------

RunConfig desk_config() { return load_run_config(QPSAN_CONFIG_DIR "/desk.cfg"); }

Outcome noise_behavior(double &budget_used) {
    // Training the model under test is setup; only the sweep is timed.
    RunConfig config = desk_config();
    config.train.epochs = 15;
    const Splits splits = make_splits(config.data, 1);
    const RunOutcome run = run_training(config, ScorerKind::Qpa, 1, splits);
    const VitModel model(run.model_config, run.train.best_parameters);

    std::vector<double> gammas;
    for (int i = 0; i <= 10; ++i) {
        gammas.push_back(0.01 * i);
    }
    const auto start = Clock::now();
    const NoiseSweepResult sweep =
        run_noise_sweep(model, splits.second,
                        {NoiseChannel::AmplitudeDamping, NoiseChannel::Depolarizing,
                         NoiseChannel::BitFlip, NoiseChannel::PhaseFlip},
                        gammas);
    budget_used = seconds_since(start);

    double pf_mu = 0, pf_acc = 0, bf_err = 0;
    double damage_at_max[4] = {};
    for (const auto &r : sweep.rows) {
        if (r.channel == NoiseChannel::PhaseFlip) {
            pf_mu = std::max(pf_mu, r.max_abs_mu_shift);
            pf_acc = std::max(pf_acc, std::abs(r.accuracy - sweep.clean_accuracy));
        }
        if (r.bf_closed_form_error) {
            bf_err = std::max(bf_err, *r.bf_closed_form_error);
        }
        if (std::abs(r.gamma - 0.10) < 1e-12) {
            damage_at_max[static_cast<int>(r.channel)] = r.mean_abs_mu_shift;
        }
    }
    const double bf = damage_at_max[static_cast<int>(NoiseChannel::BitFlip)];
    bool bf_worst = true;
    for (double d : damage_at_max) {
        bf_worst = bf_worst && d <= bf;
    }
    const bool ok = pf_mu <= 1e-12 && pf_acc == 0 && bf_err <= 1e-10 && bf_worst;
    return {ok, fmt("%zu pairs; PF max |dmu| %.3g, |dacc| %.3g; BF closed-form err %.3g; mean "
                    "|dmu| at 0.10: AD %.4f DP %.4f BF %.4f PF %.4f",
                    sweep.pairs, pf_mu, pf_acc, bf_err,
                    damage_at_max[static_cast<int>(NoiseChannel::AmplitudeDamping)],
                    damage_at_max[static_cast<int>(NoiseChannel::Depolarizing)], bf,
                    damage_at_max[static_cast<int>(NoiseChannel::PhaseFlip)])};
}

// -- 8 -----------------------------------------------------------------------------------

Outcome shot_bound() {
    const ShotStudy study = run_shot_study({100}, 1000, 8);
    const ShotRow &r = study.rows.front();
    return {r.empirical_std <= 0.05,
            fmt("S=100, 1000 repetitions: std %.4f (bound %.4f), mean %.4f vs mu %.4f",
                r.empirical_std, r.bound, r.mean, study.mu)};
}

// -- 9 -----------------------------------------------------------------------------------

std::vector<std::string> csv_fields(const std::string &line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

Outcome desk_training() {
    const RunConfig config = desk_config();
    const auto &m = config.model;
    const bool geometry = config.data.train_size == 200 && config.data.valid_size == 80 &&
                          config.data.synthetic.image_size == 16 && m.patch_size == 4 &&
                          m.num_layers == 1 && m.heads == 2 && m.hidden_size == 32 &&
                          m.aggregation_depth == 16 && config.train.epochs <= 50 &&
                          config.seeds.size() == 5;

    std::vector<double> run_seconds;
    auto last = Clock::now();
    const CompareResult result = run_compare(config, [&](const RunOutcome &) {
        run_seconds.push_back(seconds_since(last));
        last = Clock::now();
    });

    double min_qpa = 1, min_dot = 1;
    for (std::size_t s = 0; s < result.scorers.size(); ++s) {
        for (const auto &run : result.runs[s]) {
            double &slot = result.scorers[s] == ScorerKind::Qpa ? min_qpa : min_dot;
            slot = std::min(slot, run.valid.metrics.accuracy);
        }
    }
    const double slowest = *std::max_element(run_seconds.begin(), run_seconds.end());

    // Shape of the comparison table: header, one summary row per scorer, one test row.
    std::istringstream csv(compare_csv(result));
    std::string line;
    std::getline(csv, line);
    const auto header = csv_fields(line);
    int summaries = 0, tests = 0;
    bool complete = true, valid_t = true;
    const auto column = [&](const char *name) {
        return static_cast<std::size_t>(
            std::find(header.begin(), header.end(), name) - header.begin());
    };
    while (std::getline(csv, line)) {
        const auto f = csv_fields(line);
        complete = complete && f.size() == header.size();
        if (f.size() != header.size()) {
            continue;
        }
        if (f[column("row_type")] == "summary") {
            ++summaries;
            for (const char *name : {"accuracy", "precision", "recall", "f1", "auc_roc"}) {
                complete = complete && !f[column(name)].empty();
            }
        } else if (f[column("row_type")] == "t_test") {
            ++tests;
            for (const char *name : {"t_statistic", "p_one_tail", "p_two_tail", "cohens_d"}) {
                const std::string &v = f[column(name)];
                valid_t = valid_t && !v.empty() && std::isfinite(std::stod(v));
            }
            valid_t = valid_t && f[column("degenerate")] == "false";
        }
    }
    complete = complete && header.size() == 30 && summaries == 2 && tests == 1;

    const bool ok = geometry && min_qpa >= 0.95 && min_dot >= 0.95 && slowest < 180 &&
                    complete && valid_t;
    return {ok, fmt("min accuracy qpa %.4f dot %.4f over 5 seeds; slowest run %.1f s; csv %s, "
                    "t-statistics %s",
                    min_qpa, min_dot, slowest, complete ? "complete" : "incomplete",
                    valid_t ? "finite" : "invalid")};
}

// -- 10 ----------------------------------------------------------------------------------

Outcome statistics_oracle() {
    std::mt19937_64 rng(1010);
    double worst_p = 0;
    for (int c = 0; c < 100; ++c) {
        const int n = std::uniform_int_distribution<int>(3, 30)(rng);
        std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
        const double shift = uniform(rng, -0.5, 0.5);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = uniform(rng, 0, 1);
            b[i] = a[i] - shift + uniform(rng, -0.5, 0.5);
        }
        const TTestResult t = paired_t_test(a, b);
        // Reference from the raw differences and an independent t distribution.
        double mean = 0;
        for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
        mean /= n;
        double ss = 0;
        for (std::size_t i = 0; i < a.size(); ++i) ss += std::pow(a[i] - b[i] - mean, 2);
        const double sd = std::sqrt(ss / (n - 1));
        const double ref_t = mean / (sd / std::sqrt(static_cast<double>(n)));
        const boost::math::students_t dist(n - 1);
        const double ref_two = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(ref_t)));
        const double ref_one = boost::math::cdf(boost::math::complement(dist, ref_t));
        worst_p = std::max({worst_p, std::abs(t.p_two_tail - ref_two),
                            std::abs(t.p_one_tail - ref_one)});
    }
    const std::vector<double> a{0.8, 0.9, 0.7}, b{0.6, 0.8, 0.7};
    const TTestResult hand = paired_t_test(a, b);
    const bool ok = worst_p <= 1e-6 && std::abs(hand.t_statistic - 1.7321) <= 1e-4 &&
                    std::abs(hand.cohens_d - 1.0) <= 1e-4;
    return {ok, fmt("max |p - reference| %.3g over 100 cases; hand example t %.4f d %.4f",
                    worst_p, hand.t_statistic, hand.cohens_d)};
}

// -- 11 ----------------------------------------------------------------------------------

Outcome structural_counts() {
    // Model-level difference against the parameter-free dot scorer, per layer count.
    const auto added = [](ScorerKind kind, int layers) {
        VitConfig with = tiny_config(kind), dot = tiny_config(ScorerKind::Dot);
        with.num_layers = dot.num_layers = layers;
        return VitModel(with, 1).parameter_count() - VitModel(dot, 1).parameter_count();
    };
    bool ok = scorer_parameter_count(tiny_config(ScorerKind::Qpa)) == 5 &&
              mlp_parameter_count(MlpVariant::Params49) == 49 &&
              mlp_parameter_count(MlpVariant::Params585) == 585;
    std::string qpa;
    for (int layers = 1; layers <= 3; ++layers) {
        const Eigen::Index diff = added(ScorerKind::Qpa, layers);
        ok = ok && diff == 5 * layers && added(ScorerKind::Mlp49, layers) == 49 * layers &&
             added(ScorerKind::Mlp585, layers) == 585 * layers;
        qpa += (qpa.empty() ? "" : ", ") + std::to_string(diff);
    }
    return {ok, fmt("QPA adds %s parameters for 1, 2, 3 layers; MLP scorers add %lld and %lld "
                    "per layer",
                    qpa.c_str(), static_cast<long long>(added(ScorerKind::Mlp49, 1)),
                    static_cast<long long>(added(ScorerKind::Mlp585, 1)))};
}

} // namespace

int main() {
    constexpr double kNone = std::numeric_limits<double>::infinity();
    double noise_seconds = 0;
    const std::vector<Criterion> criteria{
        {1, "closed-form encoding score", 5, closed_form_oracle},
        {2, "kernel equivalence and separability", 10, kernel_equivalence},
        {3, "degenerate single-qubit projection", kNone, degenerate_oracle},
        {4, "boundedness, asymmetry, non-monotonicity", kNone, boundedness_and_witnesses},
        {5, "degrees-of-freedom ranks", 30, dof_bounds},
        {6, "gradient correctness", 120, gradient_correctness},
        {7, "noise behavior", 60, [&] { return noise_behavior(noise_seconds); }},
        {8, "shot-noise bound", 30, shot_bound},
        {9, "desk-scale training", kNone, desk_training},
        {10, "paired t-test oracle", kNone, statistics_oracle},
        {11, "structural parameter counts", kNone, structural_counts},
    };

    int failures = 0;
    for (const auto &c : criteria) {
        const auto start = Clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double elapsed = seconds_since(start);
        if (c.number == 7) {
            elapsed = noise_seconds;
        }
        const bool in_time = elapsed <= c.budget_seconds;
        const bool passed = out.passed && in_time;
        failures += !passed;
        std::string budget = std::isinf(c.budget_seconds)
                                 ? std::string()
                                 : fmt(" / %.0f s", c.budget_seconds);
        std::printf("AC%-2d %s  %s (%.2f s%s): %s%s\n", c.number, passed ? "PASS" : "FAIL",
                    c.title, elapsed, budget.c_str(), out.detail.c_str(),
                    in_time ? "" : " [over time budget]");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
