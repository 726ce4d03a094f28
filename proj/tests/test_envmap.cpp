#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "riskscout/envmap.hpp"
#include "riskscout/error.hpp"

using namespace riskscout;

namespace {

Grid<double> fromRows(const std::vector<std::vector<double>>& rows) {
  Grid<double> g(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c];
  }
  return g;
}

Grid<double> randomRaster(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::gamma_distribution<double> gamma(2.0, 1.5);
  Grid<double> g(rows, cols);
  for (double& v : g) v = gamma(rng);
  return g;
}

// Median by full sort.
double sortedMedian(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("median downsampling") {
  SUBCASE("constant raster stays constant") {
    const Grid<double> g(7, 8, 2.5);
    for (int w : {1, 3, 5, 7}) {
      const Grid<double> d = medianDownsample(g, w);
      CHECK(std::all_of(d.begin(), d.end(), [](double v) { return v == 2.5; }));
    }
  }
  SUBCASE("single block") {
    const Grid<double> g = fromRows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    const Grid<double> d = medianDownsample(g, 3);
    REQUIRE(d.rows() == 1);
    REQUIRE(d.cols() == 1);
    CHECK(d(0, 0) == 5.0);
  }
  SUBCASE("spike is removed") {
    Grid<double> g(6, 6, 1.0);
    g(1, 4) = 500.0;
    const Grid<double> d = medianDownsample(g, 3);
    CHECK(std::all_of(d.begin(), d.end(), [](double v) { return v == 1.0; }));
  }
  SUBCASE("matches a sort-based median, partial edge blocks included") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      const Grid<double> g = randomRaster(rng, 5 + trial % 7, 6 + trial % 5);
      const int w = trial % 2 ? 3 : 5;
      const Grid<double> d = medianDownsample(g, w);
      const auto uw = static_cast<std::size_t>(w);
      CHECK(d.rows() == (g.rows() + uw - 1) / uw);
      CHECK(d.cols() == (g.cols() + uw - 1) / uw);
      for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
          std::vector<double> block;
          for (std::size_t m = i * uw; m < g.rows() && m < (i + 1) * uw; ++m) {
            for (std::size_t n = j * uw; n < g.cols() && n < (j + 1) * uw; ++n) block.push_back(g(m, n));
          }
          CHECK(d(i, j) == sortedMedian(block));
        }
      }
    }
  }
  SUBCASE("argument errors") {
    const Grid<double> g(4, 4, 1.0);
    CHECK_THROWS_AS(medianDownsample(g, 2), std::invalid_argument);
    CHECK_THROWS_AS(medianDownsample(g, 5), std::invalid_argument);
    CHECK_THROWS_AS(medianDownsample(g, 0), std::invalid_argument);
  }
}

TEST_CASE("whitening") {
  SUBCASE("three-sample slice") {
    const Grid<double> phi = whiten(fromRows({{2, 4, 6}}));
    const double s = std::sqrt(8.0 / 3.0);
    CHECK(phi(0, 0) == doctest::Approx(-2.0 / s).epsilon(1e-12));
    CHECK(phi(0, 1) == doctest::Approx(0.0));
    CHECK(phi(0, 2) == doctest::Approx(2.0 / s).epsilon(1e-12));
    CHECK(phi(0, 2) == doctest::Approx(1.2247).epsilon(1e-4));
  }
  SUBCASE("every down-range slice has zero mean and unit variance") {
    std::mt19937_64 rng(3);
    const Grid<double> phi = whiten(randomRaster(rng, 20, 31));
    for (std::size_t m = 0; m < phi.rows(); ++m) {
      double mean = 0.0, var = 0.0;
      for (std::size_t n = 0; n < phi.cols(); ++n) mean += phi(m, n);
      mean /= static_cast<double>(phi.cols());
      for (std::size_t n = 0; n < phi.cols(); ++n) var += (phi(m, n) - mean) * (phi(m, n) - mean);
      var /= static_cast<double>(phi.cols());
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(var - 1.0) <= 1e-9);
    }
  }
  SUBCASE("whitening is idempotent") {
    std::mt19937_64 rng(4);
    const Grid<double> once = whiten(randomRaster(rng, 9, 12));
    const Grid<double> twice = whiten(once);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(once[i] - twice[i]) <= 1e-9);
  }
  SUBCASE("per-row affine changes leave the classes alone") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> scale(0.1, 10.0), shift(0.0, 50.0);
    const Grid<double> raw = randomRaster(rng, 12, 15);
    Grid<double> moved = raw;
    for (std::size_t m = 0; m < raw.rows(); ++m) {
      const double a = scale(rng), b = shift(rng);
      for (std::size_t n = 0; n < raw.cols(); ++n) moved(m, n) = a * raw(m, n) + b;
    }
    const Grid<double> p = whiten(raw), q = whiten(moved);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-9);
    CHECK(segment(p) == segment(q));
  }
  SUBCASE("zero-variance slice names the bin") {
    const Grid<double> g = fromRows({{1, 2, 3}, {4, 4, 4}});
    CHECK_THROWS_WITH_AS(whiten(g), doctest::Contains("bin 1"), DegenerateDataError);
  }
  SUBCASE("cross-range scope gives unit variance per column") {
    std::mt19937_64 rng(6);
    const Grid<double> phi = whiten(randomRaster(rng, 14, 9), WhitenScope::kCrossRange);
    for (std::size_t n = 0; n < phi.cols(); ++n) {
      double ss = 0.0;
      for (std::size_t m = 0; m < phi.rows(); ++m) ss += phi(m, n) * phi(m, n);
      double mean = 0.0;
      for (std::size_t m = 0; m < phi.rows(); ++m) mean += phi(m, n);
      mean /= static_cast<double>(phi.rows());
      CHECK(ss / static_cast<double>(phi.rows()) - mean * mean == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("segmentation thresholds") {
  CHECK(classify(3.0) == EnvClass::kDifficult);
  CHECK(classify(-1.0) == EnvClass::kModerate);
  CHECK(classify(0.0) == EnvClass::kEasy);
  CHECK(classify(2.0) == EnvClass::kEasy);
  CHECK(classify(-0.5) == EnvClass::kEasy);
  CHECK(classify(std::nextafter(2.0, 3.0)) == EnvClass::kDifficult);
  CHECK(classify(std::nextafter(-0.5, -1.0)) == EnvClass::kModerate);
  CHECK(classify(1.0, {0.5, 0.0}) == EnvClass::kDifficult);
  CHECK_THROWS_AS(segment(Grid<double>(1, 1, 0.0), {0.0, 0.0}), std::invalid_argument);
  CHECK(std::string(envClassName(EnvClass::kModerate)) == "moderate");
}

TEST_CASE("priors from classes") {
  Grid<EnvClass> classes(1, 3);
  classes(0, 0) = EnvClass::kDifficult;
  classes(0, 1) = EnvClass::kModerate;
  classes(0, 2) = EnvClass::kEasy;
  const auto hard = toPriors(classes, 0.0);
  CHECK(hard[2] == EnvDistribution({0.0, 0.0, 1.0}));
  const auto soft = toPriors(classes, 0.1);
  CHECK(soft[0][0] == doctest::Approx(0.9));
  CHECK(soft[0][1] == doctest::Approx(0.05));
  CHECK(soft[0][2] == doctest::Approx(0.05));
  for (const auto& p : soft) {
    double total = 0.0;
    for (double v : p.probs()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(toPriors(classes, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(toPriors(classes, -0.1), std::invalid_argument);
}

TEST_CASE("fusion averages overlapping coverage") {
  const double nan = std::nan("");
  const Grid<double> a = fromRows({{1.0, 2.0, nan}});
  const Grid<double> b = fromRows({{3.0, nan, nan}});
  const Grid<double> f = fuse({a, b});
  CHECK(f(0, 0) == 2.0);
  CHECK(f(0, 1) == 2.0);
  CHECK(std::isnan(f(0, 2)));
  const Grid<double> g = fuse({b, a});
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK((f[i] == g[i] || (std::isnan(f[i]) && std::isnan(g[i]))));
  }
  CHECK_THROWS_AS(fuse({a, Grid<double>(2, 2)}), std::invalid_argument);
}

TEST_CASE("full pipeline") {
  std::mt19937_64 rng(9);
  const Grid<double> raster = randomRaster(rng, 30, 45);
  const PerformanceMap pm = buildPerformanceMap(raster, 3, {}, 0.1);
  CHECK(pm.phi.rows() == 10);
  CHECK(pm.phi.cols() == 15);
  CHECK(pm.priors.size() == 150);
  for (std::size_t i = 0; i < pm.phi.size(); ++i) {
    CHECK(pm.classes[i] == classify(pm.phi[i]));
    CHECK(pm.priors[i][static_cast<std::size_t>(pm.classes[i])] == doctest::Approx(0.9));
  }
  Grid<double> bad = raster;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(buildPerformanceMap(bad, 3, {}, 0.1), std::invalid_argument);
}
