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
#include "qpsan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace qpsan {

namespace {

using Json = nlohmann::json;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// Writes one CSV record with CRLF termination.
void row(std::ostringstream &out, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out << (i ? "," : "") << csv_field(fields[i]);
    }
    out << "\r\n";
}

Json metrics_json(const Metrics &m) {
    Json j{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
           {"f1", m.f1}};
    j["auc_roc"] = m.auc_roc ? Json(*m.auc_roc) : Json(nullptr);
    return j;
}

struct MeanStd {
    double mean = 0;
    double std = 0; ///< sample standard deviation
};

MeanStd mean_std(const std::vector<double> &v) {
    MeanStd r;
    if (v.empty()) {
        return r;
    }
    r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

const std::vector<std::string> kMetricNames{"accuracy", "precision", "recall", "f1", "auc_roc"};

double metric_value(const Metrics &m, const std::string &name) {
    if (name == "accuracy") return m.accuracy;
    if (name == "precision") return m.precision;
    if (name == "recall") return m.recall;
    if (name == "f1") return m.f1;
    return m.auc_roc.value_or(std::nan(""));
}

} // namespace

std::string csv_field(const std::string &text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

// -- single runs ----------------------------------------------------------------------

Splits make_splits(const DataConfig &data, std::uint64_t seed) {
    ImageDataset all;
    if (data.source == "synthetic") {
        SyntheticSpec spec = data.synthetic;
        spec.seed += seed;
        all = synthetic_dataset(spec);
    } else if (data.source == "idx") {
        all = load_idx(data.idx_images, data.idx_labels, data.class_a, data.class_b);
    } else {
        throw ConfigError("unknown data source '" + data.source + "'");
    }
    return split(all, data.train_size, data.valid_size, seed);
}

VitConfig model_config_for(const RunConfig &config, ScorerKind scorer, const ImageDataset &data) {
    if (data.height != data.width) {
        throw ConfigError("images must be square, got " + std::to_string(data.height) + "x" +
                          std::to_string(data.width));
    }
    VitConfig m = config.model;
    m.scorer = scorer;
    m.image_size = data.height;
    m.channels = data.channels;
    try {
        m.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return m;
}

RunOutcome run_training(const RunConfig &config, ScorerKind scorer, std::uint64_t seed,
                        const Splits &splits, const EpochCallback &on_epoch) {
    RunOutcome out;
    out.seed = seed;
    out.scorer = scorer;
    out.model_config = model_config_for(config, scorer, splits.first);
    VitModel model(out.model_config, seed);
    out.parameter_count = model.parameter_count();
    TrainConfig tc = config.train;
    tc.seed = seed;
    out.train = train_loop(model, splits.first, splits.second, tc, on_epoch);
    out.valid = evaluate(model, splits.second);
    return out;
}

std::string history_jsonl(const RunOutcome &run) {
    std::ostringstream out;
    for (const auto &e : run.train.history) {
        Json j{{"schema_version", kSchemaVersion},
               {"seed", run.seed},
               {"scorer", to_string(run.scorer)},
               {"epoch", e.epoch},
               {"lr", e.lr},
               {"train_loss", e.train_loss},
               {"valid_loss", e.valid_loss}};
        j.update(metrics_json(e.valid));
        out << j.dump() << '\n';
    }
    return out.str();
}

nlohmann::json run_summary(const RunConfig &config, const RunOutcome &run) {
    Json strata = Json::array();
    for (const auto &s :
         stratify_by_confidence(run.valid.max_probs, run.valid.correct)) {
        const auto acc = s.accuracy();
        strata.push_back({{"name", s.name},
                          {"low", s.low},
                          {"high", s.high},
                          {"count", s.count},
                          {"accuracy", acc ? Json(*acc) : Json(nullptr)}});
    }
    Json cfg = to_json(config);
    cfg["model"] = config_to_json(run.model_config);
    return {{"schema_version", kSchemaVersion},
            {"scorer", to_string(run.scorer)},
            {"seed", run.seed},
            {"parameter_count", run.parameter_count},
            {"scorer_parameters_per_layer", scorer_parameter_count(run.model_config)},
            {"best_epoch", run.train.best_epoch},
            {"epochs_run", run.train.history.size()},
            {"stopped_early", run.train.stopped_early},
            {"valid_loss", run.valid.loss},
            {"valid", metrics_json(run.valid.metrics)},
            {"confidence_strata", strata},
            {"config", cfg}};
}

// -- compare --------------------------------------------------------------------------

CompareResult run_compare(const RunConfig &config, const ProgressCallback &progress) {
    if (config.seeds.size() < 2) {
        throw ConfigError("compare needs at least 2 seeds: a paired t-test is undefined for one");
    }
    if (config.scorers.size() < 2) {
        throw ConfigError("compare needs at least 2 scorers");
    }
    CompareResult result;
    result.scorers = config.scorers;
    result.seeds = config.seeds;
    const std::size_t n_scorers = config.scorers.size();
    const std::size_t n_seeds = config.seeds.size();

    std::vector<Splits> splits;
    for (auto seed : config.seeds) {
        splits.push_back(make_splits(config.data, seed));
    }
    // Fail on bad geometry before spending any training time.
    for (auto s : config.scorers) {
        model_config_for(config, s, splits.front().first);
    }

    result.runs.assign(n_scorers, std::vector<RunOutcome>(n_seeds));
    const std::size_t tasks = n_scorers * n_seeds;
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            const std::size_t seed_index = t / n_scorers;
            const std::size_t scorer_index = t % n_scorers;
            try {
                RunOutcome run = run_training(config, config.scorers[scorer_index],
                                              config.seeds[seed_index], splits[seed_index]);
                std::lock_guard lock(mutex);
                if (progress) {
                    progress(run);
                }
                result.runs[scorer_index][seed_index] = std::move(run);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = tasks;
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, config.jobs));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, tasks); ++w) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (std::size_t a = 0; a < n_scorers; ++a) {
        for (std::size_t b = a + 1; b < n_scorers; ++b) {
            std::vector<double> xa, xb;
            for (std::size_t i = 0; i < n_seeds; ++i) {
                xa.push_back(result.runs[a][i].valid.metrics.accuracy);
                xb.push_back(result.runs[b][i].valid.metrics.accuracy);
            }
            result.tests.push_back({a, b, paired_t_test(xa, xb)});
        }
    }
    return result;
}

std::string compare_csv(const CompareResult &result) {
    std::ostringstream out;
    std::vector<std::string> header{"schema_version", "row_type", "model", "baseline", "n"};
    for (const auto &m : kMetricNames) {
        header.push_back(m);
    }
    for (const auto &m : kMetricNames) {
        header.push_back(m + "_mean");
        header.push_back(m + "_std");
    }
    for (const char *f : {"metric", "mean_diff", "t_statistic", "p_one_tail", "p_two_tail",
                          "cohens_d", "ci95_low", "ci95_high", "degenerate", "stars"}) {
        header.emplace_back(f);
    }
    row(out, header);
    const std::string version = std::to_string(kSchemaVersion);
    const std::size_t blank_tail = 10;

    for (std::size_t s = 0; s < result.scorers.size(); ++s) {
        std::vector<std::string> r{version, "summary", to_string(result.scorers[s]), "",
                                   std::to_string(result.seeds.size())};
        std::vector<MeanStd> stats;
        for (const auto &m : kMetricNames) {
            std::vector<double> values;
            for (const auto &run : result.runs[s]) {
                values.push_back(metric_value(run.valid.metrics, m));
            }
            stats.push_back(mean_std(values));
            r.push_back(fixed4(stats.back().mean) + "±" + fixed4(stats.back().std));
        }
        for (const auto &st : stats) {
            r.push_back(num(st.mean));
            r.push_back(num(st.std));
        }
        r.resize(r.size() + blank_tail);
        row(out, r);
    }
    for (const auto &t : result.tests) {
        std::vector<std::string> r{version, "t_test", to_string(result.scorers[t.model]),
                                   to_string(result.scorers[t.baseline]),
                                   std::to_string(t.accuracy.n)};
        r.resize(r.size() + 3 * kMetricNames.size());
        const TTestResult &x = t.accuracy;
        for (const auto &f : {std::string("accuracy"), num(x.mean_diff), num(x.t_statistic),
                              num(x.p_one_tail), num(x.p_two_tail), num(x.cohens_d),
                              num(x.ci95_low), num(x.ci95_high),
                              std::string(x.degenerate ? "true" : "false"),
                              significance_stars(x.p_two_tail)}) {
            r.push_back(f);
        }
        row(out, r);
    }
    return out.str();
}

std::string compare_runs_csv(const CompareResult &result) {
    std::ostringstream out;
    std::vector<std::string> header{"schema_version", "model", "seed", "best_epoch",
                                    "epochs_run", "parameter_count"};
    for (const auto &m : kMetricNames) {
        header.push_back(m);
    }
    row(out, header);
    for (std::size_t i = 0; i < result.seeds.size(); ++i) {
        for (std::size_t s = 0; s < result.scorers.size(); ++s) {
            const RunOutcome &run = result.runs[s][i];
            std::vector<std::string> r{std::to_string(kSchemaVersion),
                                       to_string(run.scorer),
                                       std::to_string(run.seed),
                                       std::to_string(run.train.best_epoch),
                                       std::to_string(run.train.history.size()),
                                       std::to_string(run.parameter_count)};
            for (const auto &m : kMetricNames) {
                r.push_back(num(metric_value(run.valid.metrics, m)));
            }
            row(out, r);
        }
    }
    return out.str();
}

// -- noise sweep ----------------------------------------------------------------------

NoiseSweepResult run_noise_sweep(const VitModel &model, const ImageDataset &valid,
                                 const std::vector<NoiseChannel> &channels,
                                 const std::vector<double> &gammas) {
    const VitConfig &c = model.config();
    if (!is_quantum(c.scorer)) {
        throw std::invalid_argument(std::string("noise sweep needs a QPA checkpoint, got scorer '") +
                                    to_string(c.scorer) + "'");
    }
    if (valid.empty()) {
        throw std::invalid_argument("noise sweep: empty validation set");
    }
    for (double g : gammas) {
        if (!(g >= 0 && g <= 1)) {
            throw std::invalid_argument("noise sweep: strengths must lie in [0, 1]");
        }
    }
    const CircuitOptions opts{c.scorer == ScorerKind::QpaInd ? Encoding::Independent
                                                             : Encoding::ThreeStep,
                              EntanglerOrder::ControlZeroFirst};

    // (q, k) pairs the circuit sees in clean forward passes, grouped by layer.
    const int dh = c.head_dim();
    const int depth = c.depth();
    std::vector<std::vector<std::pair<double, double>>> probes(c.num_layers);
    for (const auto &image : valid.images) {
        ForwardCache cache;
        model.forward(image, cache);
        for (int l = 0; l < c.num_layers; ++l) {
            const LayerCache &lc = cache.layers[l];
            for (int h = 0; h < c.heads; ++h) {
                for (Eigen::Index i = 0; i < lc.q.rows(); ++i) {
                    for (Eigen::Index j = 0; j < lc.k.rows(); ++j) {
                        for (int d = 0; d < depth; ++d) {
                            probes[l].emplace_back(lc.q(i, h * dh + d), lc.k(j, h * dh + d));
                        }
                    }
                }
            }
        }
    }

    NoiseSweepResult result;
    std::vector<std::vector<double>> clean(c.num_layers);
    double clean_sum = 0;
    for (int l = 0; l < c.num_layers; ++l) {
        const auto p = model.qpa_params(l);
        for (const auto &[q, k] : probes[l]) {
            clean[l].push_back(score(q, k, p, opts));
            clean_sum += clean[l].back();
        }
        result.pairs += probes[l].size();
    }
    result.clean_mean_mu = clean_sum / static_cast<double>(result.pairs);
    result.clean_accuracy = evaluate(model, valid).metrics.accuracy;

    for (NoiseChannel ch : channels) {
        const double baseline = evaluate(model, valid, ForwardOptions{ch, 0.0}).metrics.accuracy;
        for (double g : gammas) {
            NoiseRow r;
            r.channel = ch;
            r.gamma = g;
            r.accuracy = g == 0.0 ? baseline
                                  : evaluate(model, valid, ForwardOptions{ch, g}).metrics.accuracy;
            r.accuracy_delta = r.accuracy - baseline;
            double sum = 0, shift = 0, abs_shift = 0, bf = 0;
            for (int l = 0; l < c.num_layers; ++l) {
                const auto p = model.qpa_params(l);
                for (std::size_t n = 0; n < probes[l].size(); ++n) {
                    const auto [q, k] = probes[l][n];
                    const double mu = clean[l][n];
                    const double noisy = score_noisy_fast(q, k, p, ch, g, opts);
                    sum += noisy;
                    shift += noisy - mu;
                    abs_shift += std::abs(noisy - mu);
                    r.max_abs_mu_shift = std::max(r.max_abs_mu_shift, std::abs(noisy - mu));
                    if (ch == NoiseChannel::BitFlip) {
                        bf = std::max(bf, std::abs(noisy - bit_flip_closed_form(mu, g)));
                    }
                }
            }
            const auto n = static_cast<double>(result.pairs);
            r.mean_mu = sum / n;
            r.mean_mu_shift = shift / n;
            r.mean_abs_mu_shift = abs_shift / n;
            if (ch == NoiseChannel::BitFlip) {
                r.bf_closed_form_error = bf;
            }
            result.rows.push_back(r);
        }
    }
    return result;
}

std::string noise_sweep_csv(const NoiseSweepResult &result) {
    std::ostringstream out;
    row(out, {"schema_version", "channel", "gamma", "accuracy", "accuracy_delta", "mean_mu",
              "mean_mu_shift", "mean_abs_mu_shift", "max_abs_mu_shift", "bf_closed_form_error",
              "pairs", "clean_accuracy"});
    for (const auto &r : result.rows) {
        row(out, {std::to_string(kSchemaVersion), to_string(r.channel), num(r.gamma),
                  num(r.accuracy), num(r.accuracy_delta), num(r.mean_mu), num(r.mean_mu_shift),
                  num(r.mean_abs_mu_shift), num(r.max_abs_mu_shift),
                  r.bf_closed_form_error ? num(*r.bf_closed_form_error) : std::string(),
                  std::to_string(result.pairs), num(result.clean_accuracy)});
    }
    return out.str();
}

// -- shots ----------------------------------------------------------------------------

ShotStudy run_shot_study(const std::vector<long long> &shots, int repetitions,
                         std::uint64_t seed) {
    if (repetitions < 2) {
        throw std::invalid_argument("shot study: need at least 2 repetitions");
    }
    ShotStudy study;
    study.q = 0.3;
    study.k = -0.2;
    study.params = QpaParams<double>{0.5, 0.1, -0.1, 0.3, 0.2};
    study.mu = score(study.q, study.k, study.params);
    study.repetitions = repetitions;
    for (long long s : shots) {
        std::vector<double> estimates;
        for (int i = 0; i < repetitions; ++i) {
            const std::uint64_t stream =
                CounterRng::mix(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(s)) +
                static_cast<std::uint64_t>(i);
            estimates.push_back(score_sampled(study.q, study.k, study.params, s, stream));
        }
        const MeanStd ms = mean_std(estimates);
        study.rows.push_back({s, ms.mean, ms.std, 1.0 / (2.0 * std::sqrt(static_cast<double>(s)))});
    }
    return study;
}

std::string shots_csv(const ShotStudy &study) {
    std::ostringstream out;
    row(out, {"schema_version", "shots", "empirical_std", "bound", "mean", "mu", "repetitions"});
    for (const auto &r : study.rows) {
        row(out, {std::to_string(kSchemaVersion), std::to_string(r.shots), num(r.empirical_std),
                  num(r.bound), num(r.mean), num(study.mu), std::to_string(study.repetitions)});
    }
    return out.str();
}

} // namespace qpsan
