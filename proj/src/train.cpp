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
#include "qpsan/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qpsan {

void TrainConfig::validate() const {
    if (!(lr0 >= 0) || !std::isfinite(lr0)) {
        throw std::invalid_argument("train config: lr0 must be a finite non-negative number");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("train config: batch_size must be at least 1");
    }
    if (epochs < 1) {
        throw std::invalid_argument("train config: epochs must be at least 1");
    }
    if (warmup_epochs < 0 || warmup_epochs >= epochs) {
        throw std::invalid_argument("train config: warmup_epochs must lie in [0, epochs)");
    }
    if (patience < 1) {
        throw std::invalid_argument("train config: patience must be at least 1");
    }
    if (!(momentum >= 0 && momentum < 1)) {
        throw std::invalid_argument("train config: momentum must lie in [0, 1)");
    }
    if (!(weight_decay >= 0)) {
        throw std::invalid_argument("train config: weight_decay must be non-negative");
    }
    if (!(grad_clip >= 0)) {
        throw std::invalid_argument("train config: grad_clip must be non-negative");
    }
}

double lr_schedule(int epoch, const TrainConfig &config) {
    if (epoch < 0 || epoch >= config.epochs) {
        throw std::invalid_argument("lr_schedule: epoch outside [0, epochs)");
    }
    const int w = config.warmup_epochs;
    if (epoch < w) {
        return config.lr0 * (epoch + 1) / w;
    }
    const double t = epoch - w;
    const double span = config.epochs - w;
    return config.lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * t / span));
}

void sgd_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd> &grads,
              Eigen::Ref<Eigen::VectorXd> velocity, double lr, double momentum,
              double weight_decay) {
    if (params.size() != grads.size() || params.size() != velocity.size()) {
        throw std::invalid_argument("sgd_step: parameter, gradient and velocity sizes differ");
    }
    velocity = momentum * velocity + grads;
    if (weight_decay != 0.0) {
        velocity += weight_decay * params;
    }
    params -= lr * velocity;
}

Evaluation evaluate(const VitModel &model, const ImageDataset &data,
                    const ForwardOptions &options) {
    if (data.empty()) {
        throw std::invalid_argument("evaluate: empty dataset");
    }
    Evaluation ev;
    const std::size_t n = data.size();
    ev.predicted.resize(n);
    ev.positive_scores.resize(n);
    ev.max_probs.resize(n);
    ev.correct.resize(n);
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector logits = model.forward(data.images[i], options);
        loss += cross_entropy(logits, data.labels[i]);
        const Vector p = softmax(logits);
        Eigen::Index arg;
        ev.max_probs[i] = p.maxCoeff(&arg);
        ev.predicted[i] = static_cast<int>(arg);
        ev.positive_scores[i] = p(1);
        ev.correct[i] = ev.predicted[i] == data.labels[i];
    }
    ev.loss = loss / static_cast<double>(n);
    ev.metrics = compute_metrics(data.labels, ev.predicted, ev.positive_scores);
    return ev;
}

TrainResult train_loop(VitModel &model, const ImageDataset &train, const ImageDataset &valid,
                       const TrainConfig &config, const EpochCallback &on_epoch) {
    config.validate();
    if (train.empty() || valid.empty()) {
        throw std::invalid_argument("train_loop: training and validation sets must be non-empty");
    }
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    Vector grad(model.parameter_count());
    Vector velocity = Vector::Zero(model.parameter_count());
    TrainResult result;
    result.best_parameters = model.parameters();
    int since_best = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = lr_schedule(epoch, config);
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const double weight = 1.0 / static_cast<double>(stop - start);
            grad.setZero();
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                loss_sum += model.backward(train.images[i], train.labels[i], grad, weight);
            }
            if (config.grad_clip > 0) {
                const double norm = grad.norm();
                if (norm > config.grad_clip) {
                    grad *= config.grad_clip / norm;
                }
            }
            sgd_step(model.parameters(), grad, velocity, lr, config.momentum,
                     config.weight_decay);
        }

        const Evaluation ev = evaluate(model, valid);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = loss_sum / static_cast<double>(train.size());
        rec.valid_loss = ev.loss;
        rec.valid = ev.metrics;
        result.history.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }

        if (result.best_epoch < 0 || ev.metrics.accuracy > result.best_valid_accuracy) {
            result.best_epoch = epoch;
            result.best_valid_accuracy = ev.metrics.accuracy;
            result.best_parameters = model.parameters();
            since_best = 0;
        } else if (++since_best >= config.patience) {
            result.stopped_early = true;
            break;
        }
    }
    model.parameters() = result.best_parameters;
    return result;
}

} // namespace qpsan
