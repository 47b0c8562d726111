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
#include "qpsan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qpsan {

Metrics compute_metrics(std::span<const int> labels, std::span<const int> predicted,
                        std::span<const double> positive_scores) {
    if (labels.size() != predicted.size() || labels.size() != positive_scores.size()) {
        throw std::invalid_argument("compute_metrics: input lengths differ");
    }
    if (labels.empty()) {
        throw std::invalid_argument("compute_metrics: no samples");
    }
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((labels[i] != 0 && labels[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
            throw std::invalid_argument("compute_metrics: labels must be 0 or 1");
        }
        if (!std::isfinite(positive_scores[i])) {
            throw std::invalid_argument("compute_metrics: non-finite score");
        }
        if (labels[i] == 1) {
            (predicted[i] == 1 ? tp : fn) += 1;
        } else {
            (predicted[i] == 1 ? fp : tn) += 1;
        }
    }
    Metrics m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(labels.size());
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.auc_roc = auc_mann_whitney(labels, positive_scores);
    return m;
}

std::optional<double> auc_mann_whitney(std::span<const int> labels,
                                       std::span<const double> positive_scores) {
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positive_scores[a] < positive_scores[b];
    });
    double rank_sum = 0;
    long positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && positive_scores[order[j]] == positive_scores[order[i]]) {
            ++j;
        }
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) {
                rank_sum += midrank;
                ++positives;
            }
        }
        i = j;
    }
    const long negatives = static_cast<long>(n) - positives;
    if (positives == 0 || negatives == 0) {
        return std::nullopt;
    }
    const double p = static_cast<double>(positives);
    return (rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(negatives));
}

// -- Student t ------------------------------------------------------------------------

namespace {

/// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            break;
        }
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) {
        throw std::invalid_argument("incomplete beta: a and b must be positive");
    }
    if (!(x >= 0 && x <= 1)) {
        throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
    }
    if (x == 0 || x == 1) {
        return x;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1) / (a + b + 2)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0)) {
        throw std::invalid_argument("student_t_cdf: degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        return t;
    }
    if (std::isinf(t)) {
        return t > 0 ? 1.0 : 0.0;
    }
    // lower tail P(T <= -|t|) = I_x(dof/2, 1/2) / 2 with x = dof / (dof + t^2)
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(dof / 2, 0.5, x);
    return t > 0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0 && p < 1)) {
        throw std::invalid_argument("student_t_quantile: p must lie in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    // bracket then bisect; the CDF is monotone and cheap
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, dof) > p) lo *= 2;
    while (student_t_cdf(hi, dof) < p) hi *= 2;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// -- paired t-test ----------------------------------------------------------------------

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("paired_t_test: samples have different lengths");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("paired_t_test: need at least two pairs");
    }
    const std::size_t n = a.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) {
        diff[i] = a[i] - b[i];
    }
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double d : diff) {
        ss += (d - mean) * (d - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double dof = static_cast<double>(n - 1);

    TTestResult r;
    r.n = static_cast<int>(n);
    r.mean_diff = mean;
    // Differences that agree to rounding carry no variance information.
    const double scale = std::max(1.0, std::abs(mean));
    if (sd <= 1e-14 * scale) {
        r.degenerate = true;
        r.ci95_low = r.ci95_high = mean;
        if (mean == 0.0) {
            r.t_statistic = 0;
            r.cohens_d = 0;
            r.p_one_tail = 0.5;
            r.p_two_tail = 1.0;
        } else {
            const double inf = std::numeric_limits<double>::infinity();
            r.t_statistic = r.cohens_d = mean > 0 ? inf : -inf;
            r.p_one_tail = mean > 0 ? 0.0 : 1.0;
            r.p_two_tail = 0.0;
        }
        return r;
    }
    const double se = sd / std::sqrt(static_cast<double>(n));
    r.t_statistic = mean / se;
    r.cohens_d = mean / sd;
    r.p_one_tail = 1.0 - student_t_cdf(r.t_statistic, dof);
    r.p_two_tail = 2.0 * std::min(r.p_one_tail, 1.0 - r.p_one_tail);
    const double t_crit = student_t_quantile(0.975, dof);
    r.ci95_low = mean - t_crit * se;
    r.ci95_high = mean + t_crit * se;
    return r;
}

std::string significance_stars(double p) {
    if (p <= 0.001) return "***";
    if (p <= 0.01) return "**";
    if (p <= 0.05) return "*";
    return "";
}

// -- confidence strata --------------------------------------------------------------------

std::optional<double> ConfidenceStratum::accuracy() const {
    if (count == 0) {
        return std::nullopt;
    }
    return static_cast<double>(correct) / static_cast<double>(count);
}

std::array<ConfidenceStratum, 3> stratify_by_confidence(std::span<const double> max_probs,
                                                        std::span<const int> correct) {
    if (max_probs.size() != correct.size()) {
        throw std::invalid_argument("stratify_by_confidence: input lengths differ");
    }
    std::array<ConfidenceStratum, 3> strata{ConfidenceStratum{"low", 0.5, 0.6},
                                            ConfidenceStratum{"medium", 0.6, 0.9},
                                            ConfidenceStratum{"high", 0.9, 1.0}};
    for (std::size_t i = 0; i < max_probs.size(); ++i) {
        const double p = max_probs[i];
        const int bin = p >= 0.9 ? 2 : (p >= 0.6 ? 1 : 0);
        ++strata[bin].count;
        strata[bin].correct += correct[i] != 0;
    }
    return strata;
}

} // namespace qpsan
