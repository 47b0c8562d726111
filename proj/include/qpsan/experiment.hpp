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
 * Experiment drivers behind the CLI: single training runs, multi-seed
 * scorer comparisons, noise sweeps and shot-count studies, plus their
 * CSV and JSON emitters.
 */
#pragma once

#include "qpsan/run_config.hpp"
#include "qpsan/stats.hpp"
#include "qpsan/train.hpp"
#include "qpsan/version.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qpsan {

using Splits = std::pair<ImageDataset, ImageDataset>;

/// Train and validation sets for one run seed. Synthetic data is drawn
/// with synthetic.seed + seed; both sources are split with `seed`.
Splits make_splits(const DataConfig &data, std::uint64_t seed);

/// Model config for `scorer` with image geometry taken from the data.
VitConfig model_config_for(const RunConfig &config, ScorerKind scorer, const ImageDataset &data);

struct RunOutcome {
    std::uint64_t seed = 0;
    ScorerKind scorer = ScorerKind::Qpa;
    VitConfig model_config;
    TrainResult train;
    Evaluation valid; ///< best checkpoint on the validation split
    Eigen::Index parameter_count = 0;
};

/// Trains one scorer on one seed; model init and batch order use `seed`.
RunOutcome run_training(const RunConfig &config, ScorerKind scorer, std::uint64_t seed,
                        const Splits &splits, const EpochCallback &on_epoch = {});

/// One JSON-lines record per epoch.
std::string history_jsonl(const RunOutcome &run);
/// Deterministic run summary (no timings).
nlohmann::json run_summary(const RunConfig &config, const RunOutcome &run);

// -- compare -----------------------------------------------------------------------------

struct ComparisonRow {
    std::size_t model = 0;    ///< index into scorers
    std::size_t baseline = 0; ///< index into scorers
    TTestResult accuracy;
};

struct CompareResult {
    std::vector<ScorerKind> scorers;
    std::vector<std::uint64_t> seeds;
    /// runs[s][i]: scorer s on seeds[i].
    std::vector<std::vector<RunOutcome>> runs;
    std::vector<ComparisonRow> tests; ///< every pair (i < j), accuracy differences
};

using ProgressCallback = std::function<void(const RunOutcome &)>;

/**
 * Trains every scorer on every seed, fanned out over `config.jobs`
 * workers. Each seed's splits are shared by all scorers. Results are
 * assembled in seed order, so the output does not depend on scheduling.
 * Throws ConfigError for fewer than 2 seeds or scorers.
 */
CompareResult run_compare(const RunConfig &config, const ProgressCallback &progress = {});

/// Summary rows (mean and sample std per metric) followed by t-test rows.
std::string compare_csv(const CompareResult &result);
/// One row per (scorer, seed).
std::string compare_runs_csv(const CompareResult &result);

// -- noise sweep --------------------------------------------------------------------------

struct NoiseRow {
    NoiseChannel channel{};
    double gamma = 0;
    double accuracy = 0;
    double accuracy_delta = 0;  ///< against the same channel at gamma = 0
    double mean_mu = 0;         ///< mean noisy score over all probed pairs
    double mean_mu_shift = 0;   ///< mean (noisy - clean)
    double mean_abs_mu_shift = 0;
    double max_abs_mu_shift = 0;
    /// Bit flip only: max |noisy - (mu (1-2g)^2 + 2g(1-g))| over all pairs.
    std::optional<double> bf_closed_form_error;
};

struct NoiseSweepResult {
    double clean_accuracy = 0; ///< noiseless forward pass
    double clean_mean_mu = 0;
    std::size_t pairs = 0;     ///< (image, layer, head, i, j, d) scores probed per row
    std::vector<NoiseRow> rows;
};

/**
 * Accuracy and score shifts of a trained QPA model under each channel and
 * strength. Scores are probed at the (q, k) pairs a clean forward pass of
 * every validation image feeds the circuit. Throws std::invalid_argument
 * for non-quantum scorers.
 */
NoiseSweepResult run_noise_sweep(const VitModel &model, const ImageDataset &valid,
                                 const std::vector<NoiseChannel> &channels,
                                 const std::vector<double> &gammas);

std::string noise_sweep_csv(const NoiseSweepResult &result);

// -- shots --------------------------------------------------------------------------------

struct ShotRow {
    long long shots = 0;
    double mean = 0;
    double empirical_std = 0;
    double bound = 0; ///< 1 / (2 sqrt(S))
};

struct ShotStudy {
    double q = 0;
    double k = 0;
    QpaParams<double> params;
    double mu = 0;
    int repetitions = 0;
    std::vector<ShotRow> rows;
};

/// Repeats score_sampled `repetitions` times per shot count at a fixed
/// probe input with mu near 0.7.
ShotStudy run_shot_study(const std::vector<long long> &shots, int repetitions,
                         std::uint64_t seed);

std::string shots_csv(const ShotStudy &study);

/// RFC 4180 quoting of one field.
std::string csv_field(const std::string &text);

} // namespace qpsan
