#ifndef RISKSCOUT_BELIEF_HPP_
#define RISKSCOUT_BELIEF_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskscout {

// Zero-based environment class index. Index 0 is the least informative class.
using EnvIndex = std::size_t;

// Detection and false-alarm behaviour of the search sensor for each
// environment class, together with the environment-observation confusion
// matrix confusion(i, j) = P(observe class j | true class i).
class SensorSuite {
 public:
  SensorSuite(std::vector<double> detection, std::vector<double> false_alarm,
              std::vector<std::vector<double>> confusion,
              std::vector<std::string> labels = {});

  // Three classes: difficult (D=0.65, a=0.4), moderate (D=0.8, a=0.3),
  // easy (D=0.95, a=0.05), diagonal confusion 0.82/0.84/0.88 with the
  // off-diagonal mass split evenly.
  static SensorSuite standard();

  // Same detection/false-alarm parameters with a noiseless environment sensor.
  SensorSuite withIdentityConfusion() const;

  std::size_t classes() const { return detection_.size(); }
  double detection(EnvIndex j) const;
  double falseAlarm(EnvIndex j) const;
  double confusion(EnvIndex truth, EnvIndex observed) const;
  const std::string& label(EnvIndex j) const;

  const std::vector<double>& detections() const { return detection_; }
  const std::vector<double>& falseAlarms() const { return false_alarm_; }
  const std::vector<std::vector<double>>& confusionMatrix() const { return confusion_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const SensorSuite&) const = default;

 private:
  void checkClass(EnvIndex j) const;

  std::vector<double> detection_;
  std::vector<double> false_alarm_;
  std::vector<std::vector<double>> confusion_;
  std::vector<std::string> labels_;
};

// Distribution over the target count 0..maxCount().
class CountDistribution {
 public:
  explicit CountDistribution(std::vector<double> probs);

  static CountDistribution uniform(int max_count);
  static CountDistribution pointMass(int count, int max_count);

  int maxCount() const { return static_cast<int>(probs_.size()) - 1; }
  double operator[](int x) const { return probs_[static_cast<std::size_t>(x)]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const CountDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

// Distribution over the environment classes of a single cell.
class EnvDistribution {
 public:
  explicit EnvDistribution(std::vector<double> probs);

  static EnvDistribution uniform(std::size_t classes);
  static EnvDistribution pointMass(EnvIndex j, std::size_t classes);

  std::size_t classes() const { return probs_.size(); }
  double operator[](EnvIndex j) const { return probs_[j]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const EnvDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

// How environment estimates are ranked when deciding whether an estimate
// under- or over-states the true environment.
enum class EnvOrdering {
  kByIndex,  // d <= e when d's class index is not above e's
  kByRisk,   // d <= e when d's anticipated risk is not below e's
};

// Linear loss weights. `under`/`over` price target-count errors,
// `env_under`/`env_over` price environment-estimate errors.
struct LossModel {
  double under = 1.0;
  double over = 1.0;
  double env_under = 1.0;
  double env_over = 1.0;
  EnvOrdering ordering = EnvOrdering::kByIndex;

  void validate() const;
  bool operator==(const LossModel&) const = default;
};

struct CellBelief {
  CountDistribution targets;
  EnvDistribution env;
  LossModel loss;

  bool operator==(const CellBelief&) const = default;
};

// Truncation of the count-observation space. z_max is chosen so that the
// likelihood tail beyond it is below kTailMass for every x <= x_max.
struct ObservationCaps {
  int z_max = 0;
  int x_max = 0;
};

inline constexpr double kTailMass = 1e-9;

ObservationCaps observationCaps(const SensorSuite& sensor, int x_max);

// P(z | x, class j): binomial detections compounded with geometric false alarms.
double obsLikelihood(int z, int x, EnvIndex j, const SensorSuite& sensor);

// P(x | z, class j) with the target prior taken independent of the environment.
CountDistribution posteriorTargets(const CountDistribution& prior, int z, EnvIndex j,
                                   const SensorSuite& sensor);

// P(class | observed class y).
EnvDistribution posteriorEnv(const EnvDistribution& prior, EnvIndex y,
                             const SensorSuite& sensor);

// Environment-marginalised target posterior sum_j P(x | z, j) P(j | y).
// Classes under which z is impossible are dropped from the mixture.
CountDistribution marginalPosteriorTargets(const CellBelief& belief, int z, EnvIndex y,
                                           const SensorSuite& sensor);

struct TargetEstimate {
  int count = 0;
  double risk = 0.0;
};

// Bayes estimator of the target count under the asymmetric linear loss and
// its expected loss. Ties go to the smaller count.
TargetEstimate bayesEstimateTargets(const CountDistribution& dist, double under, double over);

// Expected loss of the best estimate with no new measurement.
double currentRisk(const CellBelief& belief, const SensorSuite& sensor);

// Bayes risk of the target posterior after observing z in class j.
double anticipatedRiskCond(const CellBelief& belief, int z, EnvIndex j,
                           const SensorSuite& sensor);

struct EnvEstimate {
  EnvIndex env = 0;
  double risk = 0.0;
};

// Bayes estimate of the environment class given (z, y) and the anticipated
// risk under that estimate.
EnvEstimate bayesEstimateEnv(const CellBelief& belief, int z, EnvIndex y,
                             const SensorSuite& sensor);

// Joint predictive probability P(z, y) of a measurement pair.
double jointObsProb(const CellBelief& belief, int z, EnvIndex y, const SensorSuite& sensor);

struct CellValue {
  double current_risk = 0.0;
  double anticipated_risk = 0.0;
  double benefit = 0.0;
};

// Current risk, anticipated risk over all measurement pairs, and their
// difference: the expected risk reduction from searching the cell.
CellValue cellBenefit(const CellBelief& belief, const SensorSuite& sensor);

}  // namespace riskscout

#endif  // RISKSCOUT_BELIEF_HPP_
