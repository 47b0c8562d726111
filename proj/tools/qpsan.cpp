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

// qpsan: verify, train, compare, noise-sweep, shots.
// Exit codes: 0 success, 1 claim or experiment failure, 2 usage error.

#include "qpsan/experiment.hpp"
#include "qpsan/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace qpsan;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

/// Options shared by the experiment subcommands.
struct Common {
    std::string config_path;
    std::vector<std::string> overrides; ///< key=value
    std::string output_dir;
    int verbosity = 0;
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("-c,--config", c.config_path, "key = value run description")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "override a config key, e.g. --set train.lr=0.02");
    cmd->add_option("-o,--output-dir", c.output_dir,
                    "output directory (default: $QPSAN_OUTPUT_DIR or ./qpsan-out)");
    cmd->add_flag("-v,--verbose", c.verbosity, "per-epoch progress on stderr (repeatable)");
}

/// File, then --set overrides, then dedicated flags (applied by the caller).
RunConfig load(const Common &c) {
    RunConfig config = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
    for (const auto &kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        set_option(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.output_dir.empty()) {
        config.output_dir = c.output_dir;
    }
    config.verbosity = std::max(config.verbosity, c.verbosity);
    return config;
}

fs::path prepare_dir(const fs::path &dir) {
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EpochCallback epoch_logger(const RunConfig &config, ScorerKind scorer, std::uint64_t seed) {
    if (config.verbosity < 1) {
        return {};
    }
    return [scorer, seed](const EpochRecord &e) {
        std::cerr << to_string(scorer) << " seed " << seed << " epoch " << e.epoch
                  << " lr " << e.lr << " train_loss " << e.train_loss << " valid_acc "
                  << e.valid.accuracy << '\n';
    };
}

// -- subcommands ------------------------------------------------------------------------

struct VerifyArgs {
    std::vector<std::string> claims;
    std::string report;
    bool json = false;
    bool flip_cnot = false;
    std::uint64_t seed = 2024;
};

int cmd_verify(const VerifyArgs &a) {
    VerifyOptions opts;
    opts.only = a.claims;
    opts.seed = a.seed;
    if (a.flip_cnot) {
        opts.simulated.order = EntanglerOrder::ControlOneFirst;
    }
    const auto results = run_claims(opts);
    const auto report = claims_report(results);
    if (!a.report.empty()) {
        const fs::path path(a.report);
        if (path.has_parent_path()) {
            prepare_dir(path.parent_path());
        }
        write_file(path, report.dump(2) + "\n");
    }
    if (a.json) {
        std::cout << report.dump(2) << '\n';
    } else {
        for (const auto &r : results) {
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << "  (tol " << r.tolerance
                      << ", " << r.seconds << " s)  " << r.description << '\n';
            if (!r.passed) {
                std::cout << "    witness: " << r.witness.dump() << '\n';
            }
        }
        std::cout << (all_passed(results) ? "all claims passed" : "some claims FAILED") << '\n';
    }
    return all_passed(results) ? kOk : kFailed;
}

struct TrainArgs {
    Common common;
    std::vector<std::uint64_t> seeds;
    std::string scorer;
};

int cmd_train(const TrainArgs &a) {
    RunConfig config = load(a.common);
    if (!a.seeds.empty()) config.seeds = a.seeds;
    if (!a.scorer.empty()) set_option(config, "model.scorer", a.scorer);
    config.scorers = {config.model.scorer};
    validate(config);
    const fs::path out = prepare_dir(resolved_output_dir(config));
    for (auto seed : config.seeds) {
        const auto t0 = std::chrono::steady_clock::now();
        const Splits splits = make_splits(config.data, seed);
        const RunOutcome run = run_training(config, config.model.scorer, seed, splits,
                                            epoch_logger(config, config.model.scorer, seed));
        const fs::path dir = prepare_dir(out / ("train-" + std::string(to_string(run.scorer)) +
                                                "-seed" + std::to_string(seed)));
        write_file(dir / "history.jsonl", history_jsonl(run));
        write_file(dir / "summary.json", run_summary(config, run).dump(2) + "\n");
        save_checkpoint(VitModel(run.model_config, run.train.best_parameters),
                        (dir / "checkpoint.json").string());
        std::cout << to_string(run.scorer) << " seed " << seed << ": valid accuracy "
                  << run.valid.metrics.accuracy << " (best epoch " << run.train.best_epoch
                  << ", " << seconds_since(t0) << " s) -> " << dir.string() << '\n';
    }
    return kOk;
}

struct CompareArgs {
    Common common;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> scorers;
    int jobs = 0;
};

int cmd_compare(const CompareArgs &a) {
    RunConfig config = load(a.common);
    if (!a.seeds.empty()) config.seeds = a.seeds;
    if (!a.scorers.empty()) {
        std::string joined;
        for (const auto &s : a.scorers) joined += (joined.empty() ? "" : ",") + s;
        set_option(config, "run.scorers", joined);
    }
    if (a.jobs > 0) config.jobs = a.jobs;
    validate(config);
    const fs::path out = prepare_dir(resolved_output_dir(config));
    const auto t0 = std::chrono::steady_clock::now();
    const CompareResult result = run_compare(config, [&](const RunOutcome &run) {
        if (config.verbosity >= 1) {
            std::cerr << "done " << to_string(run.scorer) << " seed " << run.seed
                      << ": valid accuracy " << run.valid.metrics.accuracy << '\n';
        }
    });
    const std::string csv = compare_csv(result);
    write_file(out / "compare.csv", csv);
    write_file(out / "compare_runs.csv", compare_runs_csv(result));
    std::cout << csv;
    std::cerr << "compare finished in " << seconds_since(t0) << " s -> "
              << (out / "compare.csv").string() << '\n';
    return kOk;
}

struct NoiseArgs {
    Common common;
    std::string checkpoint;
    std::vector<std::string> channels;
    std::vector<double> gammas;
};

int cmd_noise_sweep(const NoiseArgs &a) {
    RunConfig config = load(a.common);
    if (!a.checkpoint.empty()) config.checkpoint = a.checkpoint;
    if (!a.channels.empty()) {
        std::string joined;
        for (const auto &s : a.channels) joined += (joined.empty() ? "" : ",") + s;
        set_option(config, "noise.channels", joined);
    }
    if (!a.gammas.empty()) config.gammas = a.gammas;
    if (config.checkpoint.empty()) {
        throw ConfigError("noise-sweep needs --checkpoint or noise.checkpoint");
    }
    validate(config);
    const VitModel model = load_checkpoint(config.checkpoint);
    if (!is_quantum(model.config().scorer)) {
        throw ConfigError(std::string("noise-sweep needs a QPA checkpoint, got scorer '") +
                          to_string(model.config().scorer) + "'");
    }
    const Splits splits = make_splits(config.data, config.seeds.front());
    const NoiseSweepResult result =
        run_noise_sweep(model, splits.second, config.channels, config.gammas);
    const fs::path out = prepare_dir(resolved_output_dir(config));
    const std::string csv = noise_sweep_csv(result);
    write_file(out / "noise_sweep.csv", csv);
    std::cout << csv;

    bool ok = true;
    for (const auto &r : result.rows) {
        if (r.channel == NoiseChannel::PhaseFlip && (r.accuracy_delta != 0.0 ||
                                                     r.max_abs_mu_shift > 1e-12)) {
            std::cerr << "phase flip changed the model at gamma " << r.gamma << '\n';
            ok = false;
        }
        if (r.bf_closed_form_error && *r.bf_closed_form_error > 1e-10) {
            std::cerr << "bit flip departs from its closed form at gamma " << r.gamma << '\n';
            ok = false;
        }
    }
    return ok ? kOk : kFailed;
}

struct ShotArgs {
    Common common;
    std::vector<long long> shots;
    int repetitions = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_shots(const ShotArgs &a) {
    RunConfig config = load(a.common);
    if (!a.shots.empty()) config.shots = a.shots;
    if (a.repetitions > 0) config.shot_repetitions = a.repetitions;
    if (a.seed_set) config.shot_seed = a.seed;
    validate(config);
    const ShotStudy study = run_shot_study(config.shots, config.shot_repetitions,
                                           config.shot_seed);
    const fs::path out = prepare_dir(resolved_output_dir(config));
    const std::string csv = shots_csv(study);
    write_file(out / "shots.csv", csv);
    std::cout << csv;
    bool ok = true;
    for (const auto &r : study.rows) {
        if (r.empirical_std > 1.1 * r.bound) {
            std::cerr << "S = " << r.shots << ": empirical std " << r.empirical_std
                      << " exceeds 1.1 x " << r.bound << '\n';
            ok = false;
        }
    }
    return ok ? kOk : kFailed;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum parametric attention: claims suite and desk-scale experiments"};
    app.require_subcommand(1);

    VerifyArgs verify;
    auto *v = app.add_subcommand("verify", "check every analytic claim numerically");
    v->add_option("--claim", verify.claims, "run only these claim ids (repeatable)");
    v->add_option("--report", verify.report, "write the JSON report to this file");
    v->add_flag("--json", verify.json, "print the JSON report instead of a table");
    v->add_option("--seed", verify.seed, "seed for random probes");
    v->add_flag("--inject-cnot-flip", verify.flip_cnot,
                "self-test: simulate the reversed CNOT order so ordering claims must fail");
    v->add_flag_callback("--list", [] {
        for (const auto &id : claim_ids()) std::cout << id << '\n';
        std::exit(kOk);
    }, "list claim ids and exit");

    TrainArgs train;
    auto *t = app.add_subcommand("train", "train one scorer per seed, write history/summary/checkpoint");
    add_common(t, train.common);
    t->add_option("--seed", train.seeds, "run seed(s); overrides run.seeds");
    t->add_option("--scorer", train.scorer, "qpa, dot, mlp49, mlp585, cosine, linear, qpa-ind");

    CompareArgs compare;
    auto *cm = app.add_subcommand("compare", "multi-seed scorer comparison with paired t-tests");
    add_common(cm, compare.common);
    cm->add_option("--seeds", compare.seeds, "seeds (at least 2)")->delimiter(',');
    cm->add_option("--scorers", compare.scorers, "scorers (at least 2)")->delimiter(',');
    cm->add_option("-j,--jobs", compare.jobs, "worker threads")->check(CLI::PositiveNumber);

    NoiseArgs noise;
    auto *n = app.add_subcommand("noise-sweep", "accuracy and score shift under circuit noise");
    add_common(n, noise.common);
    n->add_option("--checkpoint", noise.checkpoint, "checkpoint.json of a trained QPA model");
    n->add_option("--channels", noise.channels, "AD, DP, BF, PF")->delimiter(',');
    n->add_option("--gammas", noise.gammas, "noise strengths in [0, 1]")->delimiter(',');

    ShotArgs shots;
    auto *s = app.add_subcommand("shots", "finite-shot estimator spread against 1/(2 sqrt(S))");
    add_common(s, shots.common);
    s->add_option("--shots", shots.shots, "shot counts")->delimiter(',');
    s->add_option("--repetitions", shots.repetitions, "estimates per shot count")
        ->check(CLI::PositiveNumber);
    s->add_option("--seed", shots.seed, "sampling seed")->each([&](const std::string &) {
        shots.seed_set = true;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*v) return cmd_verify(verify);
        if (*t) return cmd_train(train);
        if (*cm) return cmd_compare(compare);
        if (*n) return cmd_noise_sweep(noise);
        if (*s) return cmd_shots(shots);
    } catch (const std::invalid_argument &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
