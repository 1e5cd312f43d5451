#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gamo/data/dataset.hpp"
#include "gamo/data/io.hpp"
#include "gamo/data/toy.hpp"
#include "gamo/error.hpp"

using namespace gamo;
using namespace gamo::data;

namespace {

const std::filesystem::path kFixtures = GAMO_FIXTURES;

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gamo_unit_data";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Counts label bytes directly, without going through the loader.
std::map<int, std::size_t> label_histogram(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  std::map<int, std::size_t> h;
  for (std::size_t i = 8; i < bytes.size(); ++i) ++h[bytes[i]];
  return h;
}

Dataset simple(std::vector<int> labels) {
  Tensor x = Tensor::matrix(labels.size(), 2);
  for (std::size_t i = 0; i < labels.size(); ++i) x(i, 0) = static_cast<double>(i);
  return Dataset::from_source_labels(std::move(x), labels);
}

}  // namespace

TEST(Dataset, ClassesOrderedBySize) {
  const Dataset d = simple({5, 5, 5, 9, 2, 2});
  EXPECT_EQ(d.class_labels(), (std::vector<int>{9, 2, 5}));
  EXPECT_EQ(d.class_sizes(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(d.labels(), (std::vector<int>{2, 2, 2, 0, 1, 1}));
  EXPECT_EQ(d.source_labels(), (std::vector<int>{5, 5, 5, 9, 2, 2}));
  double total = 0.0;
  for (std::size_t i = 0; i < d.class_count(); ++i) {
    EXPECT_EQ(d.priors()[i], static_cast<double>(d.class_size(i)) / 6.0);
    total += d.priors()[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NO_THROW(d.validate());
  EXPECT_NO_THROW(d.require_size_order());
}

TEST(Dataset, ClassMatrixHoldsRowsOfThatClass) {
  const Dataset d = simple({1, 0, 1, 1});
  const Tensor m = d.class_matrix(0);  // label 0, one row
  ASSERT_EQ(m.rows(), 1u);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(d.class_matrix(1).rows(), 3u);
}

TEST(Dataset, TestSplitMayBeInAnyOrder) {
  const std::vector<int> src = {0, 1, 1};
  const Dataset t = Dataset::with_class_labels(Tensor::matrix(3, 1), src, {1, 0});
  EXPECT_EQ(t.class_sizes(), (std::vector<std::size_t>{2, 1}));
  EXPECT_THROW(t.require_size_order(), DataError);
  const std::vector<int> stray = {0, 2};
  EXPECT_THROW(Dataset::with_class_labels(Tensor::matrix(2, 1), stray, {1, 0}), DataError);
  const std::vector<int> one_class = {0, 0};
  EXPECT_EQ(Dataset::with_class_labels(Tensor::matrix(2, 1), one_class, {1, 0}).class_size(0), 0u);
}

TEST(Toy, ImbalanceRatio) {
  const Dataset d = make_gaussian_toy({{1000, 30}, 0, 5}, two_gaussians());
  EXPECT_NEAR(d.imbalance_ratio(), 1000.0 / 30.0, 1e-12);
  EXPECT_EQ(d.size(), 1030u);
  EXPECT_EQ(d.class_labels(), (std::vector<int>{1, 0}));
}

TEST(Toy, SameSeedSameFeatures) {
  const auto g = clusters(4, 3);
  const Dataset a = make_gaussian_toy({{20, 10, 5, 3}, 0, 9}, g);
  const Dataset b = make_gaussian_toy({{20, 10, 5, 3}, 0, 9}, g);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
  const Dataset c = make_gaussian_toy({{20, 10, 5, 3}, 0, 10}, g);
  EXPECT_NE(a.features(), c.features());
}

TEST(Toy, SampleMeanNearComponentMean) {
  ToyGeometry g;
  g.classes.push_back({{{{1.5, -2.0, 4.0}, {0.5, 2.0, 1.0}, 1.0}}});
  g.classes.push_back({{{{9.0, 9.0, 9.0}, {1.0, 1.0, 1.0}, 1.0}}});
  const std::size_t n = 4000;
  // label 0 is the smaller class, so its rows come first
  const Dataset d = make_gaussian_toy({{n, n + 1}, 0, 3}, g);
  ASSERT_EQ(d.class_labels().front(), 0);
  const Tensor x = d.class_matrix(0);
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += x(r, j);
    const auto& comp = g.classes[0].components[0];
    EXPECT_NEAR(s / n, comp.mean[j], 3.0 * comp.stddev[j] / std::sqrt(static_cast<double>(n)));
  }
}

TEST(Toy, DegenerateGeometryIsRejected) {
  ToyGeometry g = two_gaussians();
  g.classes[1].components[0].stddev[1] = 0.0;
  EXPECT_THROW(g.validate(), DataError);
  EXPECT_THROW(make_gaussian_toy({{10, 10}, 0, 1}, g), DataError);
}

TEST(Idx, FixtureShapeScaleAndLabels) {
  const auto labels = kFixtures / "tiny-labels.idx1-ubyte";
  const Dataset d = load_idx(kFixtures / "tiny-images.idx3-ubyte", labels);
  EXPECT_EQ(d.dim(), 784u);
  EXPECT_EQ(d.size(), 7u);
  for (std::size_t r = 0; r < d.size(); ++r) {
    EXPECT_EQ(d.features()(r, 0), 1.0);
    EXPECT_EQ(d.features()(r, 783), 128.0 / 255.0);
    EXPECT_EQ(d.features()(r, 2), 0.0);
  }
  const auto expected = label_histogram(labels);
  EXPECT_EQ(expected, (std::map<int, std::size_t>{{0, 1}, {1, 2}, {2, 4}}));
  for (std::size_t i = 0; i < d.class_count(); ++i)
    EXPECT_EQ(d.class_size(i), expected.at(d.class_labels()[i]));
}

TEST(Idx, BadMagicTruncationAndMismatch) {
  const auto images = kFixtures / "tiny-images.idx3-ubyte";
  const auto labels = kFixtures / "tiny-labels.idx1-ubyte";
  EXPECT_THROW(load_idx(labels, labels), DataError);
  EXPECT_THROW(load_idx(images, images), DataError);

  std::ifstream in(images, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  const auto cut = temp_file("cut.idx3");
  std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() - 100);
  EXPECT_THROW(load_idx(cut, labels), DataError);

  std::ifstream lin(labels, std::ios::binary);
  std::string lbytes((std::istreambuf_iterator<char>(lin)), {});
  lbytes[7] = 6;  // count 6 vs 7 images
  const auto short_labels = temp_file("short.idx1");
  std::ofstream(short_labels, std::ios::binary) << lbytes.substr(0, lbytes.size() - 1);
  EXPECT_THROW(load_idx(images, short_labels), DataError);
  EXPECT_THROW(load_idx(kFixtures / "missing.idx3", labels), DataError);
}

TEST(Csv, PriorsAfterReordering) {
  std::istringstream in("0,1.0\n0,2.0\n1,3.0\n");
  const Dataset d = read_csv(in);
  ASSERT_EQ(d.class_count(), 2u);
  EXPECT_EQ(d.priors()[0], 1.0 / 3.0);
  EXPECT_EQ(d.priors()[1], 2.0 / 3.0);
  EXPECT_EQ(d.class_labels(), (std::vector<int>{1, 0}));
}

TEST(Csv, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), DataError);
  std::istringstream ragged("0,1,2\n1,3\n");
  EXPECT_THROW(read_csv(ragged), DataError);
  std::istringstream text("0,1\n1,abc\n");
  EXPECT_THROW(read_csv(text), DataError);
  std::istringstream gap("0,1\n2,3\n");
  EXPECT_THROW(read_csv(gap), DataError);
  std::istringstream gap_rows("0,1\n2,3\n");
  EXPECT_EQ(read_csv_rows(gap_rows).labels, (std::vector<int>{0, 2}));
}

TEST(Csv, FixtureContents) {
  const Dataset d = load_csv(kFixtures / "small.csv");
  const Tensor expected = Tensor::from_rows({{0.5, -1.25, 3}, {2, 0, 0.125}, {-4.5, 7, 1e-3}, {1, 1, 1}, {0, 0, -2}});
  EXPECT_EQ(d.features(), expected);
  EXPECT_EQ(d.source_labels(), (std::vector<int>{1, 0, 1, 2, 1}));
  // sizes 1, 1, 3; the tie breaks by source label
  EXPECT_EQ(d.class_labels(), (std::vector<int>{0, 2, 1}));
}

TEST(Csv, WriteReadRoundTrip) {
  const Dataset d = make_gaussian_toy({{7, 4}, 0, 2}, two_gaussians());
  std::stringstream buf;
  write_csv(buf, d);
  const Dataset back = read_csv(buf);
  EXPECT_EQ(back.features(), d.features());
  EXPECT_EQ(back.source_labels(), d.source_labels());
}

TEST(Subsample, LadderCountsGiveIr100) {
  const std::vector<std::size_t> counts = {4000, 2000, 1000, 750, 500, 350, 200, 100, 60, 40};
  ImbalanceSpec full_spec;
  full_spec.counts.assign(10, 4100);
  full_spec.seed = 1;
  const Dataset full = make_gaussian_toy(full_spec, clusters(10, 2, 1));
  const Split s = subsample_imbalanced(full, {counts, 100, 4});
  EXPECT_DOUBLE_EQ(s.train.imbalance_ratio(), 100.0);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(s.test.class_size(i), 100u);
  EXPECT_EQ(s.test.class_labels(), s.train.class_labels());
}

TEST(Subsample, EqualCountsGiveUniformPriors) {
  ImbalanceSpec full_spec{{60, 60, 60}, 0, 2};
  const Dataset full = make_gaussian_toy(full_spec, clusters(3, 2, 1));
  const Split s = subsample_imbalanced(full, {{25, 25, 25}, 10, 8});
  for (double p : s.train.priors()) EXPECT_EQ(p, 1.0 / 3.0);
}

TEST(Subsample, TrainAndTestAreDisjoint) {
  ImbalanceSpec full_spec{{50, 80}, 0, 3};
  Dataset full = make_gaussian_toy(full_spec, two_gaussians());
  // tag every row with its id so membership survives the split
  Tensor tagged = full.features();
  for (std::size_t r = 0; r < tagged.rows(); ++r) tagged(r, 0) = static_cast<double>(r);
  full = full.with_features(tagged);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Split s = subsample_imbalanced(full, {{30, 40}, 15, seed});
    std::set<double> train_ids, test_ids;
    for (std::size_t r = 0; r < s.train.size(); ++r) train_ids.insert(s.train.features()(r, 0));
    for (std::size_t r = 0; r < s.test.size(); ++r) test_ids.insert(s.test.features()(r, 0));
    EXPECT_EQ(train_ids.size(), s.train.size());
    for (double id : test_ids) EXPECT_FALSE(train_ids.count(id));
  }
  EXPECT_THROW(subsample_imbalanced(full, {{40, 40}, 15, 0}), DataError);
}

TEST(Holdout, StratifiedSizes) {
  const Dataset d = simple({0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  const Split s = stratified_holdout(d, 0.2, 5);
  EXPECT_EQ(s.test.class_size(0), 1u);
  EXPECT_EQ(s.test.class_size(1), 2u);
  EXPECT_EQ(s.train.size() + s.test.size(), d.size());
  EXPECT_EQ(s.train.class_labels(), d.class_labels());
  EXPECT_THROW(stratified_holdout(simple({0, 1, 1, 1}), 0.2, 5), DataError);
}

TEST(Standardizer, ZeroMeanUnitVariance) {
  const Dataset d = make_gaussian_toy({{300, 200}, 0, 6}, two_gaussians(5.0));
  const Standardizer st = Standardizer::fit(d.features());
  const Tensor z = st.apply(d.features());
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double s = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      s += z(r, j);
      ss += z(r, j) * z(r, j);
    }
    EXPECT_NEAR(s / z.rows(), 0.0, 1e-12);
    EXPECT_NEAR(ss / z.rows(), 1.0, 1e-9);
  }
}
