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
 * Declarative run description read from `key = value` text files.
 *
 * Lines are `key = value`; `#` starts a comment; blank lines are ignored.
 * Every key must be known and may appear once. List values are
 * comma separated. Command-line overrides go through set_option with the
 * same keys, so a file and a flag can never disagree on spelling.
 */
#pragma once

#include "qpsan/data.hpp"
#include "qpsan/train.hpp"
#include "qpsan/vit.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpsan {

/// Malformed or unknown configuration entry.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct DataConfig {
    std::string source = "synthetic"; ///< "synthetic" or "idx"
    /// Synthetic images for run seed s are drawn with synthetic.seed + s.
    SyntheticSpec synthetic{140, 16, 2.0, 1000, 2};
    std::string idx_images;
    std::string idx_labels;
    int class_a = 0;
    int class_b = 1;
    std::size_t train_size = 200;
    std::size_t valid_size = 80;
};

struct RunConfig {
    DataConfig data;
    VitConfig model;
    TrainConfig train;
    std::vector<std::uint64_t> seeds{1};
    std::vector<ScorerKind> scorers{ScorerKind::Qpa, ScorerKind::Dot};
    std::string output_dir; ///< empty selects default_output_dir()
    int jobs = 1;
    int verbosity = 0;

    std::string checkpoint; ///< noise sweep input
    std::vector<NoiseChannel> channels{NoiseChannel::AmplitudeDamping,
                                       NoiseChannel::Depolarizing, NoiseChannel::BitFlip,
                                       NoiseChannel::PhaseFlip};
    std::vector<double> gammas{0.0, 0.02, 0.04, 0.06, 0.08, 0.10};

    std::vector<long long> shots{25, 100, 400, 1600};
    int shot_repetitions = 1000;
    std::uint64_t shot_seed = 1;
};

/// Known keys, in documentation order.
const std::vector<std::string> &config_keys();

/// Applies one entry; throws ConfigError for unknown keys or bad values.
void set_option(RunConfig &config, const std::string &key, const std::string &value);

/// Parses a whole file body. `source` names it in error messages.
RunConfig parse_run_config(std::istream &in, const std::string &source = "<config>");
RunConfig load_run_config(const std::string &path);

/// Cross-field checks (sizes, scorer depth, non-empty lists); throws ConfigError.
void validate(const RunConfig &config);

/// $QPSAN_OUTPUT_DIR when set and non-empty, else "qpsan-out".
std::string default_output_dir();
std::string resolved_output_dir(const RunConfig &config);

nlohmann::json to_json(const RunConfig &config);

} // namespace qpsan
