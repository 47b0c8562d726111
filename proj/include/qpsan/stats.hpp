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
 * Classification metrics, paired t-tests and confidence stratification.
 */
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

namespace qpsan {

/// Binary classification metrics. Precision, recall and F1 are 0 when
/// their denominators vanish; AUC is absent when only one class occurs.
struct Metrics {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::optional<double> auc_roc;
};

/// Labels and predictions are 0/1; scores rank samples by belief in class 1.
Metrics compute_metrics(std::span<const int> labels, std::span<const int> predicted,
                        std::span<const double> positive_scores);

/// Mann-Whitney rank statistic with midranks for ties.
std::optional<double> auc_mann_whitney(std::span<const int> labels,
                                       std::span<const double> positive_scores);

/// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Inverse of student_t_cdf, p in (0, 1).
double student_t_quantile(double p, double dof);

struct TTestResult {
    double mean_diff = 0;
    double t_statistic = 0;
    double p_one_tail = 0.5; ///< P(T >= t), the alternative mean(a - b) > 0
    double p_two_tail = 1.0;
    double cohens_d = 0;
    double ci95_low = 0;
    double ci95_high = 0;
    int n = 0;
    /// The differences have zero variance; t and d are then 0 when the mean
    /// difference is 0 and signed infinity otherwise.
    bool degenerate = false;
};

/// Paired t-test on a - b. Requires equal lengths of at least 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// "***" for p <= 0.001, "**" for p <= 0.01, "*" for p <= 0.05, else "".
std::string significance_stars(double p);

struct ConfidenceStratum {
    const char *name;
    double low;
    double high;
    int count = 0;
    int correct = 0;

    /// Absent for an empty stratum.
    std::optional<double> accuracy() const;
};

/// Low [0.5, 0.6), medium [0.6, 0.9), high [0.9, 1.0]. Values below 0.5
/// fall into low, which only happens for more than two classes.
std::array<ConfidenceStratum, 3> stratify_by_confidence(std::span<const double> max_probs,
                                                        std::span<const int> correct);

} // namespace qpsan
