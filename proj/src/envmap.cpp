#include "riskscout/envmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "riskscout/error.hpp"

namespace riskscout {

namespace {

double median(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

struct Moments {
  double mean;
  double sd;
};

template <typename Get>
Moments moments(std::size_t n, Get get) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += get(i);
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = get(i) - mean;
    var += d * d;
  }
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Spread below this fraction of the slice magnitude is treated as zero.
bool flat(const Moments& m) { return !(m.sd > 1e-12 * std::max(1.0, std::abs(m.mean))); }

}  // namespace

const char* envClassName(EnvClass c) {
  switch (c) {
    case EnvClass::kDifficult: return "difficult";
    case EnvClass::kModerate: return "moderate";
    case EnvClass::kEasy: return "easy";
  }
  return "unknown";
}

void validateRaster(const ReturnRaster& r) {
  if (r.rows() == 0 || r.cols() == 0) throw std::invalid_argument("raster is empty");
  for (double v : r) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("raster values must be finite and nonnegative");
    }
  }
}

ReturnRaster medianDownsample(const ReturnRaster& r, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("median window must be odd");
  if (static_cast<std::size_t>(window) > std::min(r.rows(), r.cols())) {
    throw std::invalid_argument("median window exceeds the raster");
  }
  const auto w = static_cast<std::size_t>(window);
  ReturnRaster out((r.rows() + w - 1) / w, (r.cols() + w - 1) / w);
  std::vector<double> block;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      block.clear();
      for (std::size_t m = i * w; m < std::min(r.rows(), (i + 1) * w); ++m) {
        for (std::size_t n = j * w; n < std::min(r.cols(), (j + 1) * w); ++n) block.push_back(r(m, n));
      }
      out(i, j) = median(block);
    }
  }
  return out;
}

Grid<double> whiten(const Grid<double>& values, WhitenScope scope) {
  if (values.rows() == 0 || values.cols() == 0) throw std::invalid_argument("raster is empty");
  Grid<double> out(values.rows(), values.cols());
  for (std::size_t m = 0; m < values.rows(); ++m) {
    const Moments row = moments(values.cols(), [&](std::size_t n) { return values(m, n); });
    if (scope == WhitenScope::kDownRange && flat(row)) {
      throw DegenerateDataError("down-range bin " + std::to_string(m) + " has zero variance");
    }
    for (std::size_t n = 0; n < values.cols(); ++n) {
      out(m, n) = values(m, n) - row.mean;
      if (scope == WhitenScope::kDownRange) out(m, n) /= row.sd;
    }
  }
  if (scope == WhitenScope::kCrossRange) {
    for (std::size_t n = 0; n < values.cols(); ++n) {
      const Moments col = moments(values.rows(), [&](std::size_t m) { return out(m, n); });
      if (flat({0.0, col.sd})) {
        throw DegenerateDataError("cross-range bin " + std::to_string(n) + " has zero variance");
      }
      for (std::size_t m = 0; m < values.rows(); ++m) out(m, n) /= col.sd;
    }
  }
  return out;
}

EnvClass classify(double phi, const Thresholds& t) {
  if (phi > t.hi) return EnvClass::kDifficult;
  if (phi < t.lo) return EnvClass::kModerate;
  return EnvClass::kEasy;
}

Grid<EnvClass> segment(const Grid<double>& phi, const Thresholds& t) {
  if (!(t.hi > t.lo)) throw std::invalid_argument("segmentation needs hi > lo");
  Grid<EnvClass> out(phi.rows(), phi.cols(), EnvClass::kEasy);
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = classify(phi[i], t);
  return out;
}

std::vector<EnvDistribution> toPriors(const Grid<EnvClass>& classes, double smoothing) {
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw std::invalid_argument("prior smoothing must lie in [0, 1)");
  }
  const double rest = smoothing / static_cast<double>(kEnvClassCount - 1);
  std::vector<EnvDistribution> out;
  out.reserve(classes.size());
  for (EnvClass c : classes) {
    std::vector<double> p(kEnvClassCount, rest);
    p[static_cast<std::size_t>(c)] = 1.0 - smoothing;
    out.emplace_back(std::move(p));
  }
  return out;
}

Grid<double> fuse(const std::vector<Grid<double>>& maps) {
  if (maps.empty()) throw std::invalid_argument("nothing to fuse");
  for (const auto& m : maps) {
    if (m.rows() != maps[0].rows() || m.cols() != maps[0].cols()) {
      throw std::invalid_argument("fused maps differ in shape");
    }
  }
  Grid<double> out(maps[0].rows(), maps[0].cols(), std::nan(""));
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (const auto& m : maps) {
      if (std::isnan(m[i])) continue;
      sum += m[i];
      ++count;
    }
    if (count > 0) out[i] = sum / count;
  }
  return out;
}

PerformanceMap buildPerformanceMap(const ReturnRaster& raster, int window, const Thresholds& t,
                                   double smoothing, WhitenScope scope) {
  validateRaster(raster);
  PerformanceMap pm;
  pm.phi = whiten(medianDownsample(raster, window), scope);
  pm.classes = segment(pm.phi, t);
  pm.priors = toPriors(pm.classes, smoothing);
  return pm;
}

}  // namespace riskscout
