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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace qpsan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qpsan_data_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char *name) const { return (path / name).string(); }
};

void write_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("hand-crafted IDX fixture") {
    TempDir dir;
    // 4 images of 2x3 pixels, labels 0 1 0 1
    std::vector<std::uint8_t> images{0x00, 0x00, 0x08, 0x03, 0, 0, 0, 4, 0, 0, 0, 2, 0, 0, 0, 3};
    for (int i = 0; i < 24; ++i) {
        images.push_back(static_cast<std::uint8_t>(i * 10));
    }
    write_bytes(dir.file("img"), images);
    write_bytes(dir.file("lab"), {0x00, 0x00, 0x08, 0x01, 0, 0, 0, 4, 0, 1, 0, 1});
    const ImageDataset d = load_idx(dir.file("img"), dir.file("lab"), 0, 1);
    CHECK(d.size() == 4);
    CHECK(d.height == 2);
    CHECK(d.width == 3);
    CHECK(d.images[0].size() == 6);
    CHECK(d.images[1](0) == doctest::Approx(60 / 255.0));
    CHECK(d.images[3](5) == doctest::Approx(230 / 255.0));
    CHECK(d.labels == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("IDX round trip is pixel exact") {
    TempDir dir;
    std::vector<std::vector<std::uint8_t>> images;
    std::vector<std::uint8_t> labels;
    for (int i = 0; i < 9; ++i) {
        std::vector<std::uint8_t> im(16);
        for (int p = 0; p < 16; ++p) {
            im[p] = static_cast<std::uint8_t>((i * 37 + p * 11) % 256);
        }
        images.push_back(im);
        labels.push_back(static_cast<std::uint8_t>(i % 3));
    }
    write_idx_images(dir.file("img"), 4, 4, images);
    write_idx_labels(dir.file("lab"), labels);
    const ImageDataset d = load_idx(dir.file("img"), dir.file("lab"), 2, 0);
    CHECK(d.size() == 6); // label 1 is filtered out
    std::size_t k = 0;
    for (int i = 0; i < 9; ++i) {
        if (labels[i] == 1) continue;
        CHECK(d.labels[k] == (labels[i] == 0 ? 1 : 0));
        for (int p = 0; p < 16; ++p) {
            CHECK(std::lround(d.images[k](p) * 255) == images[i][p]);
        }
        ++k;
    }
    for (const auto &im : d.images) {
        CHECK(im.minCoeff() >= 0.0);
        CHECK(im.maxCoeff() <= 1.0);
    }
}

TEST_CASE("IDX errors") {
    TempDir dir;
    write_idx_images(dir.file("img"), 2, 2, {{1, 2, 3, 4}, {5, 6, 7, 8}});
    write_idx_labels(dir.file("lab"), {0, 0});
    CHECK_THROWS_AS(load_idx(dir.file("img"), dir.file("lab"), 0, 1), EmptyClassError);
    CHECK_THROWS_AS(load_idx(dir.file("lab"), dir.file("lab"), 0, 1), FormatError);
    CHECK_THROWS_AS(load_idx(dir.file("img"), dir.file("img"), 0, 1), FormatError);
    write_idx_labels(dir.file("short"), {0, 1, 1});
    CHECK_THROWS_AS(load_idx(dir.file("img"), dir.file("short"), 0, 1), FormatError);
    write_bytes(dir.file("trunc"), {0x00, 0x00, 0x08});
    CHECK_THROWS_AS(load_idx(dir.file("trunc"), dir.file("lab"), 0, 1), FormatError);
    CHECK_THROWS_AS(load_idx(dir.file("missing"), dir.file("lab"), 0, 1), std::runtime_error);
}

TEST_CASE("synthetic stripes") {
    SyntheticSpec spec;
    spec.n_per_class = 100;
    spec.image_size = 16;
    const ImageDataset d = synthetic_dataset(spec);
    CHECK(d.size() == 200);
    CHECK(d.class_counts() == std::pair<std::size_t, std::size_t>{100, 100});
    for (const auto &im : d.images) {
        CHECK(im.minCoeff() >= 0.0);
        CHECK(im.maxCoeff() <= 1.0);
    }
    const ImageDataset again = synthetic_dataset(spec);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.images[i] == again.images[i]);
    }
}

TEST_CASE("noise-free stripes are separable by one pixel difference") {
    SyntheticSpec spec;
    spec.noise_std = 0.0;
    spec.n_per_class = 5;
    const ImageDataset d = synthetic_dataset(spec);
    const int s = spec.image_size;
    for (std::size_t i = 0; i < d.size(); ++i) {
        // (row 0, col 2) minus (row 2, col 0)
        const double feature = d.images[i](2) - d.images[i](2 * s);
        CHECK(feature == (d.labels[i] == 0 ? 1.0 : -1.0));
    }
}

TEST_CASE("stratified split") {
    SyntheticSpec spec;
    spec.n_per_class = 70;
    const ImageDataset d = synthetic_dataset(spec);
    const auto [train, valid] = split(d, 100, 37, 5);
    CHECK(train.size() == 100);
    CHECK(valid.size() == 37);
    CHECK(train.split == "train");
    const auto [t0, t1] = train.class_counts();
    const auto [v0, v1] = valid.class_counts();
    CHECK(std::abs(static_cast<double>(t0) - 50.0) <= 1.0);
    CHECK(std::abs(static_cast<double>(v0) - 18.5) <= 1.0);
    CHECK(t0 + t1 == 100);
    CHECK(v0 + v1 == 37);
    std::set<std::vector<double>> seen;
    for (const auto &im : train.images) seen.insert({im.data(), im.data() + im.size()});
    for (const auto &im : valid.images) CHECK(seen.count({im.data(), im.data() + im.size()}) == 0);

    const auto [train2, valid2] = split(d, 100, 37, 5);
    for (std::size_t i = 0; i < train.size(); ++i) CHECK(train.images[i] == train2.images[i]);
    CHECK(train.labels == train2.labels);

    const auto [all, none] = split(d, d.size(), 0, 1);
    CHECK(all.size() == d.size());
    CHECK(none.empty());
    CHECK_THROWS_AS(split(d, 100, 41, 1), std::invalid_argument);
}

TEST_CASE("unbalanced split stays within one sample of the global ratio") {
    ImageDataset d;
    d.height = d.width = 1;
    for (int i = 0; i < 30; ++i) {
        d.images.push_back(Eigen::VectorXd::Constant(1, i));
        d.labels.push_back(i < 10 ? 1 : 0);
    }
    const auto [train, valid] = split(d, 20, 10, 3);
    CHECK(std::abs(static_cast<double>(train.class_counts().second) - 20.0 / 3) <= 1.0);
    CHECK(std::abs(static_cast<double>(valid.class_counts().second) - 10.0 / 3) <= 1.0);
}
