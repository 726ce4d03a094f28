#ifndef RISKSCOUT_ENVMAP_HPP_
#define RISKSCOUT_ENVMAP_HPP_

#include <cstdint>
#include <vector>

#include "riskscout/belief.hpp"
#include "riskscout/grid.hpp"

namespace riskscout {

// Environment labels in sensor-class order: the least informative first.
enum class EnvClass : std::uint8_t { kDifficult = 0, kModerate = 1, kEasy = 2 };

inline constexpr std::size_t kEnvClassCount = 3;

const char* envClassName(EnvClass c);

// Acoustic return magnitudes; row = down-range bin, column = cross-range bin.
using ReturnRaster = Grid<double>;

enum class WhitenScope {
  kDownRange,   // mean and standard deviation per down-range bin (row)
  kCrossRange,  // row mean removed, then scaled per cross-range bin (column)
};

struct Thresholds {
  double hi = 2.0;
  double lo = -0.5;
};

struct PerformanceMap {
  Grid<double> phi;
  Grid<EnvClass> classes;
  std::vector<EnvDistribution> priors;  // row-major, one per cell
};

// Rejects empty, non-finite or negative rasters with std::invalid_argument.
void validateRaster(const ReturnRaster& r);

// Median of each window x window block, stride `window`; partial blocks at
// the far edges use whatever samples they hold. Even sample counts average
// the two middle values.
ReturnRaster medianDownsample(const ReturnRaster& r, int window);

// Standardizes the raster to deviations from the background. Throws
// DegenerateDataError naming the bin when a slice has zero spread.
Grid<double> whiten(const Grid<double>& values, WhitenScope scope = WhitenScope::kDownRange);

EnvClass classify(double phi, const Thresholds& t = {});
Grid<EnvClass> segment(const Grid<double>& phi, const Thresholds& t = {});

// Labeled class gets 1 - smoothing, the rest is shared equally.
std::vector<EnvDistribution> toPriors(const Grid<EnvClass>& classes, double smoothing);

// Cell-wise mean of overlapping maps; NaN marks cells a map does not cover.
Grid<double> fuse(const std::vector<Grid<double>>& maps);

PerformanceMap buildPerformanceMap(const ReturnRaster& raster, int window, const Thresholds& t,
                                   double smoothing, WhitenScope scope = WhitenScope::kDownRange);

}  // namespace riskscout

#endif  // RISKSCOUT_ENVMAP_HPP_
