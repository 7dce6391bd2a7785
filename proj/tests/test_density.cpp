#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hydap/density.hpp"
#include "hydap/simgen.hpp"

using namespace hydap;

namespace {

StandardizedView view_from(const std::vector<double>& values, Index n, Index h) {
  StandardizedView v;
  v.n = n;
  v.h = h;
  v.matrix = values;
  v.centers.assign(h, 0);
  v.scales.assign(h, 1);
  v.constant.assign(h, false);
  return v;
}

// Two unit-variance blobs at +-center, n points total.
StandardizedView two_blobs(Index n, double center, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> vals;
  for (Index i = 0; i < n; ++i)
    vals.push_back((i < n / 2 ? -center : center) + gauss(rng));
  return view_from(vals, n, 1);
}

}  // namespace

TEST_CASE("optics on identical points") {
  StandardizedView v = view_from(std::vector<double>(20, 0.0), 20, 1);
  ReachabilityProfile p = optics(v, OpticsParams::defaults(20));
  CHECK(p.order.size() == 20);
  CHECK(std::isinf(p.reach[0]));
  for (Index i = 1; i < 20; ++i) CHECK(p.reach[i] == 0.0);
  for (double c : p.core) CHECK(c == 0.0);
}

TEST_CASE("optics rejects min_pts > n") {
  StandardizedView v = view_from({0, 1, 2}, 3, 1);
  OpticsParams params;
  params.min_pts = 5;
  CHECK_THROWS_AS(optics(v, params), TooFewSubjectsError);
}

TEST_CASE("two separated blobs give two troughs") {
  StandardizedView v = two_blobs(100, 10.0, 5);
  ReachabilityProfile p = optics(v, OpticsParams::defaults(100));
  TroughReport t = detect_troughs(p, 0.05, 0.05);
  CHECK(t.trough_count == 2);
}

TEST_CASE("flat profile gives zero troughs") {
  ReachabilityProfile p;
  p.min_pts = 5;
  for (Index i = 0; i < 50; ++i) {
    p.order.push_back(i);
    p.reach.push_back(i == 0 ? std::numeric_limits<double>::infinity() : 1.0);
    p.core.push_back(1.0);
  }
  TroughReport t = detect_troughs(p, 0.05, 0.05);
  CHECK(t.trough_count == 0);
}

TEST_CASE("regenerated three-cluster continuous block shows three troughs") {
  SimSpec spec;
  spec.setting = SimSetting::sim1a;
  spec.seed = 42;
  MixedDataset ds = generate(spec).dataset;
  MixedDataset cont = split_by_selection(ds, {"x1", "x2", "x3", "x4"});
  ReachabilityProfile p = optics(standardize(cont), OpticsParams::defaults(ds.n));
  TroughReport t = detect_troughs(p, 0.05, 0.05);
  CHECK(t.trough_count == 3);
}

TEST_CASE("core distance monotone in min_pts") {
  std::mt19937_64 rng(9);
  MixedDataset ds = testutil::random_dataset(rng, 60, 2, 0);
  StandardizedView v = standardize(ds);
  OpticsParams small, big;
  small.min_pts = 3;
  big.min_pts = 8;
  ReachabilityProfile ps = optics(v, small);
  ReachabilityProfile pb = optics(v, big);
  for (Index i = 0; i < ds.n; ++i) CHECK(ps.core[i] <= pb.core[i] + 1e-12);
}

TEST_CASE("duplicating every point cannot raise core distances") {
  std::mt19937_64 rng(13);
  MixedDataset ds = testutil::random_dataset(rng, 40, 2, 0);
  StandardizedView v = standardize(ds);
  StandardizedView dup = v;
  dup.n = 2 * v.n;
  dup.matrix.insert(dup.matrix.end(), v.matrix.begin(), v.matrix.end());
  OpticsParams params;
  params.min_pts = 5;
  ReachabilityProfile orig = optics(v, params);
  ReachabilityProfile doubled = optics(dup, params);
  for (Index i = 0; i < v.n; ++i)
    CHECK(doubled.core[i] <= orig.core[i] + 1e-12);
}

TEST_CASE("core distances are permutation equivariant") {
  std::mt19937_64 rng(17);
  MixedDataset ds = testutil::random_dataset(rng, 30, 2, 0);
  StandardizedView v = standardize(ds);
  StandardizedView rev = v;
  for (Index i = 0; i < v.n; ++i)
    for (Index c = 0; c < v.h; ++c)
      rev.matrix[i * v.h + c] = v.at(v.n - 1 - i, c);
  OpticsParams params;
  params.min_pts = 4;
  ReachabilityProfile a = optics(v, params);
  ReachabilityProfile b = optics(rev, params);
  for (Index i = 0; i < v.n; ++i)
    CHECK(a.core[i] == doctest::Approx(b.core[v.n - 1 - i]).epsilon(1e-12));
  // trough structure of a clustered profile is label-invariant
  StandardizedView blobs = two_blobs(80, 10.0, 3);
  StandardizedView blobs_rev = blobs;
  std::reverse(blobs_rev.matrix.begin(), blobs_rev.matrix.end());
  CHECK(detect_troughs(optics(blobs, params), 0.05, 0.05).trough_count ==
        detect_troughs(optics(blobs_rev, params), 0.05, 0.05).trough_count);
}

TEST_CASE("reachability export and import round trip") {
  StandardizedView v = view_from({0, 0.1, 5}, 3, 1);
  OpticsParams params;
  params.min_pts = 2;
  ReachabilityProfile p = optics(v, params);
  std::string path = testutil::temp_path("reach.csv");
  export_reachability(p, path);
  std::string text = testutil::read_file(path);
  CHECK(text.find("0,") != std::string::npos);
  // first row's reachability field is empty (undefined)
  auto first_line_end = text.find('\n');
  auto second_line = text.substr(first_line_end + 1, text.find('\n', first_line_end + 1) - first_line_end - 1);
  CHECK(second_line.back() == ',');
  ReachabilityProfile back = import_reachability(path);
  CHECK(back.order == p.order);
  for (Index i = 0; i < p.reach.size(); ++i) {
    if (std::isinf(p.reach[i])) CHECK(std::isinf(back.reach[i]));
    else CHECK(back.reach[i] == doctest::Approx(p.reach[i]));
  }
}
