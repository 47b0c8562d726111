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
#include "qpsan/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>

namespace qpsan {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T> T parse_number(const std::string &key, const std::string &text) {
    T value{};
    const char *first = text.data();
    const char *last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw ConfigError("'" + key + "': value must be finite");
        }
    }
    return value;
}

std::vector<std::string> split_list(const std::string &key, const std::string &text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string item = trim(text.substr(start, comma - start));
        if (item.empty()) {
            throw ConfigError("'" + key + "': empty list element");
        }
        out.push_back(item);
        if (comma == std::string::npos) {
            return out;
        }
        start = comma + 1;
    }
}

template <typename T>
std::vector<T> parse_list(const std::string &key, const std::string &text) {
    std::vector<T> out;
    for (const auto &item : split_list(key, text)) {
        out.push_back(parse_number<T>(key, item));
    }
    return out;
}

using Setter = std::function<void(RunConfig &, const std::string &, const std::string &)>;

/// Setter for any numeric field reachable through `access`.
template <typename T, typename Access> Setter numeric(Access access) {
    return [access](RunConfig &c, const std::string &k, const std::string &v) {
        access(c) = parse_number<T>(k, v);
    };
}

const std::vector<std::pair<std::string, Setter>> &setters() {
    static const std::vector<std::pair<std::string, Setter>> table{
        {"data.source",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             if (v != "synthetic" && v != "idx") {
                 throw ConfigError("'" + k + "': expected 'synthetic' or 'idx', got '" + v + "'");
             }
             c.data.source = v;
         }},
        {"data.synthetic.n_per_class",
         numeric<int>([](RunConfig &c) -> int & { return c.data.synthetic.n_per_class; })},
        {"data.synthetic.image_size",
         numeric<int>([](RunConfig &c) -> int & { return c.data.synthetic.image_size; })},
        {"data.synthetic.noise_std",
         numeric<double>([](RunConfig &c) -> double & { return c.data.synthetic.noise_std; })},
        {"data.synthetic.seed",
         numeric<std::uint64_t>(
             [](RunConfig &c) -> std::uint64_t & { return c.data.synthetic.seed; })},
        {"data.synthetic.stripe_width",
         numeric<int>([](RunConfig &c) -> int & { return c.data.synthetic.stripe_width; })},
        {"data.idx.images",
         [](RunConfig &c, const std::string &, const std::string &v) { c.data.idx_images = v; }},
        {"data.idx.labels",
         [](RunConfig &c, const std::string &, const std::string &v) { c.data.idx_labels = v; }},
        {"data.idx.class_a", numeric<int>([](RunConfig &c) -> int & { return c.data.class_a; })},
        {"data.idx.class_b", numeric<int>([](RunConfig &c) -> int & { return c.data.class_b; })},
        {"data.train_size",
         numeric<std::size_t>([](RunConfig &c) -> std::size_t & { return c.data.train_size; })},
        {"data.valid_size",
         numeric<std::size_t>([](RunConfig &c) -> std::size_t & { return c.data.valid_size; })},

        {"model.patch_size", numeric<int>([](RunConfig &c) -> int & { return c.model.patch_size; })},
        {"model.layers", numeric<int>([](RunConfig &c) -> int & { return c.model.num_layers; })},
        {"model.heads", numeric<int>([](RunConfig &c) -> int & { return c.model.heads; })},
        {"model.hidden", numeric<int>([](RunConfig &c) -> int & { return c.model.hidden_size; })},
        {"model.mlp_hidden", numeric<int>([](RunConfig &c) -> int & { return c.model.mlp_hidden; })},
        {"model.depth",
         numeric<int>([](RunConfig &c) -> int & { return c.model.aggregation_depth; })},
        {"model.scorer",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             try {
                 c.model.scorer = parse_scorer_kind(v);
             } catch (const std::invalid_argument &e) {
                 throw ConfigError("'" + k + "': " + e.what());
             }
         }},

        {"train.lr", numeric<double>([](RunConfig &c) -> double & { return c.train.lr0; })},
        {"train.batch_size", numeric<int>([](RunConfig &c) -> int & { return c.train.batch_size; })},
        {"train.epochs", numeric<int>([](RunConfig &c) -> int & { return c.train.epochs; })},
        {"train.warmup_epochs",
         numeric<int>([](RunConfig &c) -> int & { return c.train.warmup_epochs; })},
        {"train.patience", numeric<int>([](RunConfig &c) -> int & { return c.train.patience; })},
        {"train.momentum", numeric<double>([](RunConfig &c) -> double & { return c.train.momentum; })},
        {"train.weight_decay",
         numeric<double>([](RunConfig &c) -> double & { return c.train.weight_decay; })},
        {"train.grad_clip",
         numeric<double>([](RunConfig &c) -> double & { return c.train.grad_clip; })},

        {"run.seeds",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             c.seeds = parse_list<std::uint64_t>(k, v);
         }},
        {"run.scorers",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             std::vector<ScorerKind> kinds;
             for (const auto &item : split_list(k, v)) {
                 try {
                     kinds.push_back(parse_scorer_kind(item));
                 } catch (const std::invalid_argument &e) {
                     throw ConfigError("'" + k + "': " + e.what());
                 }
             }
             c.scorers = kinds;
         }},
        {"run.output_dir",
         [](RunConfig &c, const std::string &, const std::string &v) { c.output_dir = v; }},
        {"run.jobs", numeric<int>([](RunConfig &c) -> int & { return c.jobs; })},
        {"run.verbosity", numeric<int>([](RunConfig &c) -> int & { return c.verbosity; })},

        {"noise.checkpoint",
         [](RunConfig &c, const std::string &, const std::string &v) { c.checkpoint = v; }},
        {"noise.channels",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             std::vector<NoiseChannel> out;
             for (const auto &item : split_list(k, v)) {
                 try {
                     out.push_back(parse_noise_channel(item));
                 } catch (const std::invalid_argument &e) {
                     throw ConfigError("'" + k + "': " + e.what());
                 }
             }
             c.channels = out;
         }},
        {"noise.gammas",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             c.gammas = parse_list<double>(k, v);
         }},

        {"shots.values",
         [](RunConfig &c, const std::string &k, const std::string &v) {
             c.shots = parse_list<long long>(k, v);
         }},
        {"shots.repetitions",
         numeric<int>([](RunConfig &c) -> int & { return c.shot_repetitions; })},
        {"shots.seed",
         numeric<std::uint64_t>([](RunConfig &c) -> std::uint64_t & { return c.shot_seed; })},
    };
    return table;
}

} // namespace

const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto &[k, s] : setters()) {
            out.push_back(k);
        }
        return out;
    }();
    return keys;
}

void set_option(RunConfig &config, const std::string &key, const std::string &value) {
    for (const auto &[k, setter] : setters()) {
        if (k == key) {
            setter(config, key, trim(value));
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_run_config(std::istream &in, const std::string &source) {
    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(number) + ": ";
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        if (!seen.insert(key).second) {
            throw ConfigError(where + "duplicate key '" + key + "'");
        }
        try {
            set_option(config, key, body.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(where + e.what());
        }
    }
    return config;
}

RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_run_config(in, path);
}

void validate(const RunConfig &c) {
    auto fail = [](const std::string &msg) { throw ConfigError(msg); };
    if (c.data.source == "idx" && (c.data.idx_images.empty() || c.data.idx_labels.empty())) {
        fail("data.source = idx needs data.idx.images and data.idx.labels");
    }
    if (c.data.train_size == 0 || c.data.valid_size == 0) {
        fail("data.train_size and data.valid_size must be positive");
    }
    if (c.data.source == "synthetic") {
        const auto available = 2 * static_cast<std::size_t>(std::max(0, c.data.synthetic.n_per_class));
        if (c.data.train_size + c.data.valid_size > available) {
            fail("data.train_size + data.valid_size exceeds the " + std::to_string(available) +
                 " synthetic samples");
        }
    }
    if (c.seeds.empty()) {
        fail("run.seeds must name at least one seed");
    }
    if (c.scorers.empty()) {
        fail("run.scorers must name at least one scorer");
    }
    if (c.jobs < 1) {
        fail("run.jobs must be at least 1");
    }
    for (double g : c.gammas) {
        if (!(g >= 0 && g <= 1)) {
            fail("noise.gammas must lie in [0, 1]");
        }
    }
    for (long long s : c.shots) {
        if (s < 1) {
            fail("shots.values must be positive");
        }
    }
    if (c.shot_repetitions < 2) {
        fail("shots.repetitions must be at least 2");
    }
    try {
        VitConfig m = c.model;
        if (c.data.source == "synthetic") {
            m.image_size = c.data.synthetic.image_size;
        }
        m.validate();
        for (ScorerKind s : c.scorers) {
            m.scorer = s;
            m.validate();
        }
        c.train.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

std::string default_output_dir() {
    const char *env = std::getenv("QPSAN_OUTPUT_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string("qpsan-out");
}

std::string resolved_output_dir(const RunConfig &config) {
    return config.output_dir.empty() ? default_output_dir() : config.output_dir;
}

nlohmann::json to_json(const RunConfig &c) {
    std::vector<std::string> scorers, channels;
    for (auto s : c.scorers) scorers.emplace_back(to_string(s));
    for (auto ch : c.channels) channels.emplace_back(to_string(ch));
    nlohmann::json data{{"source", c.data.source},
                        {"train_size", c.data.train_size},
                        {"valid_size", c.data.valid_size}};
    if (c.data.source == "synthetic") {
        data["synthetic"] = {{"n_per_class", c.data.synthetic.n_per_class},
                             {"image_size", c.data.synthetic.image_size},
                             {"noise_std", c.data.synthetic.noise_std},
                             {"seed", c.data.synthetic.seed},
                             {"stripe_width", c.data.synthetic.stripe_width}};
    } else {
        data["idx"] = {{"images", c.data.idx_images},
                       {"labels", c.data.idx_labels},
                       {"class_a", c.data.class_a},
                       {"class_b", c.data.class_b}};
    }
    return {{"data", data},
            {"model", config_to_json(c.model)},
            {"train",
             {{"lr", c.train.lr0},
              {"batch_size", c.train.batch_size},
              {"epochs", c.train.epochs},
              {"warmup_epochs", c.train.warmup_epochs},
              {"patience", c.train.patience},
              {"momentum", c.train.momentum},
              {"weight_decay", c.train.weight_decay},
              {"grad_clip", c.train.grad_clip}}},
            {"seeds", c.seeds},
            {"scorers", scorers},
            {"noise", {{"channels", channels}, {"gammas", c.gammas}}},
            {"shots", {{"values", c.shots}, {"repetitions", c.shot_repetitions}}}};
}

} // namespace qpsan
