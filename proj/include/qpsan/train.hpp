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
 * SGD with momentum, warmup plus cosine schedule, evaluation and the
 * early-stopping training loop.
 */
#pragma once

#include "qpsan/data.hpp"
#include "qpsan/stats.hpp"
#include "qpsan/vit.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qpsan {

struct TrainConfig {
    double lr0 = 0.01;
    int batch_size = 16;
    int epochs = 100;
    int warmup_epochs = 3;
    int patience = 20;
    double momentum = 0.9;
    double weight_decay = 0.0;
    /// Rescale each batch gradient to at most this L2 norm; 0 disables.
    double grad_clip = 1.0;
    std::uint64_t seed = 1; ///< drives batch order

    /// Throws std::invalid_argument when warmup >= epochs, patience < 1, ...
    void validate() const;
};

/// Linear warmup lr0 (e + 1) / W for e < W, then cosine annealing
/// lr0 (1 + cos(pi t / T)) / 2 with t = e - W and T = epochs - W.
double lr_schedule(int epoch, const TrainConfig &config);

/// v <- momentum v + g + wd p;  p <- p - lr v.
void sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd> &grads,
              Eigen::Ref<Eigen::VectorXd> velocity, double lr, double momentum,
              double weight_decay = 0.0);

struct Evaluation {
    double loss = 0; ///< mean cross entropy
    Metrics metrics;
    std::vector<int> predicted;
    std::vector<double> positive_scores; ///< softmax probability of class 1
    std::vector<double> max_probs;
    std::vector<int> correct;
};

Evaluation evaluate(const VitModel &model, const ImageDataset &data,
                    const ForwardOptions &options = {});

struct EpochRecord {
    int epoch = 0;
    double lr = 0;
    double train_loss = 0;
    double valid_loss = 0;
    Metrics valid;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    int best_epoch = -1;
    double best_valid_accuracy = 0;
    bool stopped_early = false;
    Eigen::VectorXd best_parameters;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

/**
 * Mini-batch SGD over `train`, evaluating on `valid` after every epoch.
 * Stops once validation accuracy has not improved for `patience` epochs
 * and leaves the best-validation parameters in `model`.
 */
TrainResult train_loop(VitModel &model, const ImageDataset &train, const ImageDataset &valid,
                       const TrainConfig &config, const EpochCallback &on_epoch = {});

} // namespace qpsan
