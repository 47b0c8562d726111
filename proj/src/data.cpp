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
#include "qpsan/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

namespace qpsan {

std::pair<std::size_t, std::size_t> ImageDataset::class_counts() const {
    const auto ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    return {labels.size() - ones, ones};
}

// -- IDX ------------------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t> &bytes, std::size_t at,
                        const std::string &path) {
    if (bytes.size() < at + 4) {
        throw FormatError("'" + path + "' is truncated in its header");
    }
    return static_cast<std::uint32_t>(bytes[at]) << 24 |
           static_cast<std::uint32_t>(bytes[at + 1]) << 16 |
           static_cast<std::uint32_t>(bytes[at + 2]) << 8 | bytes[at + 3];
}

void put_be32(std::ofstream &out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::ofstream open_for_write(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    return out;
}

} // namespace

ImageDataset load_idx(const std::string &images_path, const std::string &labels_path,
                      int class_a, int class_b) {
    if (class_a == class_b) {
        throw std::invalid_argument("load_idx: the two classes must differ");
    }
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);
    if (read_be32(img, 0, images_path) != kIdxImageMagic) {
        throw FormatError("'" + images_path + "' does not start with the IDX image magic");
    }
    if (read_be32(lab, 0, labels_path) != kIdxLabelMagic) {
        throw FormatError("'" + labels_path + "' does not start with the IDX label magic");
    }
    const std::size_t n = read_be32(img, 4, images_path);
    const std::size_t rows = read_be32(img, 8, images_path);
    const std::size_t cols = read_be32(img, 12, images_path);
    const std::size_t n_labels = read_be32(lab, 4, labels_path);
    if (n != n_labels) {
        throw FormatError("image count " + std::to_string(n) + " differs from label count " +
                          std::to_string(n_labels));
    }
    if (img.size() != 16 + n * rows * cols) {
        throw FormatError("'" + images_path + "' size does not match its dimensions");
    }
    if (lab.size() != 8 + n) {
        throw FormatError("'" + labels_path + "' size does not match its dimensions");
    }

    ImageDataset out;
    out.height = static_cast<int>(rows);
    out.width = static_cast<int>(cols);
    const std::size_t pixels = rows * cols;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = lab[8 + i];
        if (label != class_a && label != class_b) {
            continue;
        }
        Eigen::VectorXd image(static_cast<Eigen::Index>(pixels));
        for (std::size_t p = 0; p < pixels; ++p) {
            image(static_cast<Eigen::Index>(p)) = img[16 + i * pixels + p] / 255.0;
        }
        out.images.push_back(std::move(image));
        out.labels.push_back(label == class_b ? 1 : 0);
    }
    const auto [zeros, ones] = out.class_counts();
    if (zeros == 0 || ones == 0) {
        throw EmptyClassError("class " + std::to_string(zeros == 0 ? class_a : class_b) +
                              " does not occur in '" + labels_path + "'");
    }
    return out;
}

void write_idx_images(const std::string &path, int rows, int cols,
                      const std::vector<std::vector<std::uint8_t>> &images) {
    auto out = open_for_write(path);
    put_be32(out, kIdxImageMagic);
    put_be32(out, static_cast<std::uint32_t>(images.size()));
    put_be32(out, static_cast<std::uint32_t>(rows));
    put_be32(out, static_cast<std::uint32_t>(cols));
    for (const auto &image : images) {
        if (image.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
            throw std::invalid_argument("write_idx_images: image size does not match rows*cols");
        }
        out.write(reinterpret_cast<const char *>(image.data()),
                  static_cast<std::streamsize>(image.size()));
    }
}

void write_idx_labels(const std::string &path, const std::vector<std::uint8_t> &labels) {
    auto out = open_for_write(path);
    put_be32(out, kIdxLabelMagic);
    put_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char *>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

// -- synthetic ------------------------------------------------------------------------

ImageDataset synthetic_dataset(const SyntheticSpec &spec) {
    if (spec.n_per_class < 1 || spec.image_size < 1 || spec.stripe_width < 1) {
        throw std::invalid_argument("synthetic_dataset: sizes must be positive");
    }
    if (!(spec.noise_std >= 0)) {
        throw std::invalid_argument("synthetic_dataset: noise std must be non-negative");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    const int s = spec.image_size;
    ImageDataset out;
    out.height = out.width = s;
    for (int i = 0; i < 2 * spec.n_per_class; ++i) {
        const int label = i % 2;
        Eigen::VectorXd image(s * s);
        for (int y = 0; y < s; ++y) {
            for (int x = 0; x < s; ++x) {
                const int coord = label == 0 ? y : x;
                const double base = (coord / spec.stripe_width) % 2 == 0 ? 1.0 : 0.0;
                const double n = spec.noise_std > 0 ? noise(rng) : 0.0;
                image(y * s + x) = std::clamp(base + n, 0.0, 1.0);
            }
        }
        out.images.push_back(std::move(image));
        out.labels.push_back(label);
    }
    return out;
}

// -- split ------------------------------------------------------------------------------

std::pair<ImageDataset, ImageDataset> split(const ImageDataset &data, std::size_t train_n,
                                            std::size_t valid_n, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (train_n + valid_n > n) {
        throw std::invalid_argument("split: requested " + std::to_string(train_n + valid_n) +
                                    " samples from a dataset of " + std::to_string(n));
    }
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) {
        if (data.labels[i] != 0 && data.labels[i] != 1) {
            throw std::invalid_argument("split: labels must be 0 or 1");
        }
        by_class[data.labels[i]].push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (auto &idx : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
    }
    // Class-0 quota of each split follows the global ratio, rounded.
    const double ratio0 = static_cast<double>(by_class[0].size()) / static_cast<double>(n);
    auto quota = [&](std::size_t total) {
        auto q0 = static_cast<std::size_t>(std::llround(ratio0 * static_cast<double>(total)));
        return std::array<std::size_t, 2>{q0, total - q0};
    };
    auto train_q = quota(train_n);
    auto valid_q = quota(valid_n);
    // Rounding may overdraw a class by one; move the excess to the other.
    for (int c = 0; c < 2; ++c) {
        while (train_q[c] + valid_q[c] > by_class[c].size()) {
            auto &q = valid_q[c] > 0 ? valid_q : train_q;
            --q[c];
            ++q[1 - c];
        }
    }
    auto take = [&](std::size_t begin0, std::size_t begin1, const std::array<std::size_t, 2> &q,
                    const char *tag) {
        ImageDataset part;
        part.channels = data.channels;
        part.height = data.height;
        part.width = data.width;
        part.split = tag;
        std::vector<std::size_t> idx;
        idx.insert(idx.end(), by_class[0].begin() + static_cast<std::ptrdiff_t>(begin0),
                   by_class[0].begin() + static_cast<std::ptrdiff_t>(begin0 + q[0]));
        idx.insert(idx.end(), by_class[1].begin() + static_cast<std::ptrdiff_t>(begin1),
                   by_class[1].begin() + static_cast<std::ptrdiff_t>(begin1 + q[1]));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) {
            part.images.push_back(data.images[i]);
            part.labels.push_back(data.labels[i]);
        }
        return part;
    };
    ImageDataset train = take(0, 0, train_q, "train");
    ImageDataset valid = take(train_q[0], train_q[1], valid_q, "valid");
    return {std::move(train), std::move(valid)};
}

} // namespace qpsan
