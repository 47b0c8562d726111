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
 * Binary image datasets: IDX files, the synthetic stripe task and
 * stratified splits.
 */
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpsan {

/// Malformed IDX content.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A requested class has no samples in the file.
class EmptyClassError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ImageDataset {
    int channels = 1;
    int height = 0;
    int width = 0;
    /// Pixels in [0, 1], channel then row then column.
    std::vector<Eigen::VectorXd> images;
    std::vector<int> labels; ///< 0 or 1
    std::string split;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }
    /// Number of samples labelled 0 and 1.
    std::pair<std::size_t, std::size_t> class_counts() const;
};

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/**
 * Reads an IDX image/label pair, keeps classes `class_a` and `class_b`,
 * relabels them 0 and 1 and scales pixels by 1/255.
 */
ImageDataset load_idx(const std::string &images_path, const std::string &labels_path,
                      int class_a, int class_b);

/// Writers for fixtures and round trips; images are rows * cols bytes each.
void write_idx_images(const std::string &path, int rows, int cols,
                      const std::vector<std::vector<std::uint8_t>> &images);
void write_idx_labels(const std::string &path, const std::vector<std::uint8_t> &labels);

struct SyntheticSpec {
    int n_per_class = 100;
    int image_size = 16;
    double noise_std = 0.3;
    std::uint64_t seed = 1;
    /// Rows or columns alternate every `stripe_width` pixels, starting lit.
    int stripe_width = 2;
};

/// Class 0 has horizontal stripes, class 1 vertical, both with the same
/// fixed phase, plus clipped Gaussian pixel noise. Classes alternate.
ImageDataset synthetic_dataset(const SyntheticSpec &spec);

/// Disjoint, class-stratified, seeded split into (train, valid).
std::pair<ImageDataset, ImageDataset> split(const ImageDataset &data, std::size_t train_n,
                                            std::size_t valid_n, std::uint64_t seed);

} // namespace qpsan
