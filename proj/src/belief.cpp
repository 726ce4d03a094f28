#include "riskscout/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "riskscout/error.hpp"

namespace riskscout {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kRowTolerance = 1e-12;
// Relative slack under which two expected losses count as tied.
constexpr double kTieTolerance = 1e-12;

bool improves(double candidate, double best) {
  return candidate < best - kTieTolerance * std::max(1.0, std::abs(best));
}

void checkDistribution(std::span<const double> probs, const char* what) {
  if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument(std::string(what) + ": negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << what << ": probabilities sum to " << sum;
    throw std::invalid_argument(msg.str());
  }
}

std::vector<double> normalized(std::vector<double> v, double total) {
  for (double& p : v) p /= total;
  return v;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double bayesRisk(const CountDistribution& dist, const LossModel& loss) {
  return bayesEstimateTargets(dist, loss.under, loss.over).risk;
}

// Unnormalised posterior weights P(z | x, j) P(x); returns their sum.
double weightTargets(const CountDistribution& prior, int z, EnvIndex j,
                     const SensorSuite& sensor, std::vector<double>& out) {
  out.assign(prior.probs().size(), 0.0);
  double total = 0.0;
  for (int x = 0; x <= prior.maxCount(); ++x) {
    if (prior[x] == 0.0) continue;
    out[static_cast<std::size_t>(x)] = obsLikelihood(z, x, j, sensor) * prior[x];
    total += out[static_cast<std::size_t>(x)];
  }
  return total;
}

bool precedes(EnvIndex d, EnvIndex e, const std::vector<std::optional<double>>& risks,
              EnvOrdering ordering) {
  if (ordering == EnvOrdering::kByIndex) return d <= e;
  return *risks[d] >= *risks[e];
}

// Minimises the posterior expected environment loss over the classes for
// which a conditional risk exists.
EnvEstimate chooseEnv(const EnvDistribution& env_post,
                      const std::vector<std::optional<double>>& risks, const LossModel& loss) {
  const std::size_t m = risks.size();
  double mass = 0.0;
  for (EnvIndex j = 0; j < m; ++j) {
    if (risks[j]) mass += env_post[j];
  }
  if (mass <= 0.0) {
    throw ImpossibleObservationError("observation impossible under every plausible environment");
  }
  std::optional<EnvEstimate> best;
  double best_loss = 0.0;
  for (EnvIndex d = 0; d < m; ++d) {
    if (!risks[d]) continue;
    double expected = 0.0;
    for (EnvIndex e = 0; e < m; ++e) {
      if (!risks[e] || env_post[e] == 0.0) continue;
      const double gap = std::abs(*risks[e] - *risks[d]);
      const double weight = precedes(d, e, risks, loss.ordering) ? loss.env_under : loss.env_over;
      expected += env_post[e] * weight * gap;
    }
    if (!best || improves(expected, best_loss)) {
      best = EnvEstimate{d, *risks[d]};
      best_loss = expected;
    }
  }
  return *best;
}

std::vector<std::optional<double>> conditionalRisks(const CellBelief& belief, int z,
                                                    const SensorSuite& sensor,
                                                    std::vector<double>* evidence = nullptr) {
  const std::size_t m = sensor.classes();
  std::vector<std::optional<double>> risks(m);
  if (evidence) evidence->assign(m, 0.0);
  std::vector<double> w;
  for (EnvIndex j = 0; j < m; ++j) {
    const double total = weightTargets(belief.targets, z, j, sensor, w);
    if (evidence) (*evidence)[j] = total;
    if (total > 0.0) {
      risks[j] = bayesRisk(CountDistribution(normalized(w, total)), belief.loss);
    }
  }
  return risks;
}

void checkBelief(const CellBelief& belief, const SensorSuite& sensor) {
  if (belief.env.classes() != sensor.classes()) {
    throw std::invalid_argument("environment prior and sensor suite disagree on class count");
  }
  belief.loss.validate();
}

}  // namespace

SensorSuite::SensorSuite(std::vector<double> detection, std::vector<double> false_alarm,
                         std::vector<std::vector<double>> confusion,
                         std::vector<std::string> labels)
    : detection_(std::move(detection)),
      false_alarm_(std::move(false_alarm)),
      confusion_(std::move(confusion)),
      labels_(std::move(labels)) {
  const std::size_t m = detection_.size();
  if (m == 0) throw std::invalid_argument("sensor suite needs at least one class");
  if (false_alarm_.size() != m || confusion_.size() != m) {
    throw std::invalid_argument("sensor suite: per-class parameter lengths differ");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(detection_[j] > 0.0 && detection_[j] <= 1.0)) {
      throw std::invalid_argument("sensor suite: detection probability must lie in (0, 1]");
    }
    if (!(false_alarm_[j] > 0.0 && false_alarm_[j] < 1.0)) {
      throw std::invalid_argument("sensor suite: false-alarm probability must lie in (0, 1)");
    }
    if (confusion_[j].size() != m) {
      throw std::invalid_argument("sensor suite: confusion matrix must be square");
    }
    double row = 0.0;
    for (double a : confusion_[j]) {
      if (!(a >= 0.0)) throw std::invalid_argument("sensor suite: negative confusion entry");
      row += a;
    }
    if (std::abs(row - 1.0) > kRowTolerance) {
      throw std::invalid_argument("sensor suite: confusion row " + std::to_string(j) +
                                  " does not sum to 1");
    }
  }
  if (labels_.empty()) {
    for (std::size_t j = 0; j < m; ++j) labels_.push_back("b" + std::to_string(j + 1));
  } else if (labels_.size() != m) {
    throw std::invalid_argument("sensor suite: label count differs from class count");
  }
}

SensorSuite SensorSuite::standard() {
  const std::vector<double> diag{0.82, 0.84, 0.88};
  std::vector<std::vector<double>> confusion(3, std::vector<double>(3));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      confusion[i][j] = i == j ? diag[i] : (1.0 - diag[i]) / 2.0;
    }
  }
  return SensorSuite({0.65, 0.8, 0.95}, {0.4, 0.3, 0.05}, std::move(confusion),
                     {"difficult", "moderate", "easy"});
}

SensorSuite SensorSuite::withIdentityConfusion() const {
  const std::size_t m = classes();
  std::vector<std::vector<double>> identity(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) identity[j][j] = 1.0;
  return SensorSuite(detection_, false_alarm_, std::move(identity), labels_);
}

void SensorSuite::checkClass(EnvIndex j) const {
  if (j >= classes()) {
    throw std::domain_error("environment class index " + std::to_string(j) + " out of range");
  }
}

double SensorSuite::detection(EnvIndex j) const {
  checkClass(j);
  return detection_[j];
}

double SensorSuite::falseAlarm(EnvIndex j) const {
  checkClass(j);
  return false_alarm_[j];
}

double SensorSuite::confusion(EnvIndex truth, EnvIndex observed) const {
  checkClass(truth);
  checkClass(observed);
  return confusion_[truth][observed];
}

const std::string& SensorSuite::label(EnvIndex j) const {
  checkClass(j);
  return labels_[j];
}

CountDistribution::CountDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  checkDistribution(probs_, "target-count distribution");
}

CountDistribution CountDistribution::uniform(int max_count) {
  if (max_count < 0) throw std::invalid_argument("max_count must be nonnegative");
  return CountDistribution(std::vector<double>(static_cast<std::size_t>(max_count) + 1,
                                               1.0 / (max_count + 1)));
}

CountDistribution CountDistribution::pointMass(int count, int max_count) {
  if (count < 0 || count > max_count) throw std::invalid_argument("point mass outside support");
  std::vector<double> p(static_cast<std::size_t>(max_count) + 1, 0.0);
  p[static_cast<std::size_t>(count)] = 1.0;
  return CountDistribution(std::move(p));
}

EnvDistribution::EnvDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  checkDistribution(probs_, "environment distribution");
}

EnvDistribution EnvDistribution::uniform(std::size_t classes) {
  if (classes == 0) throw std::invalid_argument("need at least one environment class");
  return EnvDistribution(std::vector<double>(classes, 1.0 / static_cast<double>(classes)));
}

EnvDistribution EnvDistribution::pointMass(EnvIndex j, std::size_t classes) {
  if (j >= classes) throw std::invalid_argument("point mass outside class range");
  std::vector<double> p(classes, 0.0);
  p[j] = 1.0;
  return EnvDistribution(std::move(p));
}

void LossModel::validate() const {
  if (!(under > 0.0) || !(over > 0.0)) {
    throw std::invalid_argument("target loss weights must be strictly positive");
  }
  if (!(env_under > 0.0) || !(env_over > 0.0)) {
    throw std::invalid_argument("environment loss weights must be strictly positive");
  }
}

ObservationCaps observationCaps(const SensorSuite& sensor, int x_max) {
  if (x_max < 0) throw std::invalid_argument("x_max must be nonnegative");
  const double alpha = *std::max_element(sensor.falseAlarms().begin(), sensor.falseAlarms().end());
  // P(Z > z_max | x) <= alpha^(z_max - x + 1), so the smallest t with
  // alpha^t < kTailMass bounds the tail for every x <= x_max.
  int t = 1;
  double tail = alpha;
  while (tail >= kTailMass) {
    tail *= alpha;
    ++t;
  }
  return ObservationCaps{x_max + t - 1, x_max};
}

double obsLikelihood(int z, int x, EnvIndex j, const SensorSuite& sensor) {
  if (z < 0 || x < 0) throw std::invalid_argument("counts must be nonnegative");
  const double d = sensor.detection(j);
  const double a = sensor.falseAlarm(j);
  double sum = 0.0;
  for (int k = 0; k <= std::min(x, z); ++k) {
    sum += binomial(x, k) * std::pow(d, k) * std::pow(1.0 - d, x - k) * (1.0 - a) *
           std::pow(a, z - k);
  }
  return sum;
}

CountDistribution posteriorTargets(const CountDistribution& prior, int z, EnvIndex j,
                                   const SensorSuite& sensor) {
  std::vector<double> w;
  const double total = weightTargets(prior, z, j, sensor, w);
  if (total <= 0.0) {
    throw ImpossibleObservationError("z=" + std::to_string(z) + " has zero probability in class " +
                                     std::to_string(j));
  }
  return CountDistribution(normalized(std::move(w), total));
}

EnvDistribution posteriorEnv(const EnvDistribution& prior, EnvIndex y, const SensorSuite& sensor) {
  if (prior.classes() != sensor.classes()) {
    throw std::invalid_argument("environment prior and sensor suite disagree on class count");
  }
  std::vector<double> w(prior.classes());
  double total = 0.0;
  for (EnvIndex j = 0; j < prior.classes(); ++j) {
    w[j] = sensor.confusion(j, y) * prior[j];
    total += w[j];
  }
  if (total <= 0.0) {
    throw ImpossibleObservationError("environment observation " + std::to_string(y) +
                                     " has zero probability");
  }
  return EnvDistribution(normalized(std::move(w), total));
}

CountDistribution marginalPosteriorTargets(const CellBelief& belief, int z, EnvIndex y,
                                           const SensorSuite& sensor) {
  checkBelief(belief, sensor);
  const EnvDistribution env_post = posteriorEnv(belief.env, y, sensor);
  std::vector<double> mix(belief.targets.probs().size(), 0.0);
  std::vector<double> w;
  double mass = 0.0;
  for (EnvIndex j = 0; j < sensor.classes(); ++j) {
    if (env_post[j] == 0.0) continue;
    const double total = weightTargets(belief.targets, z, j, sensor, w);
    if (total <= 0.0) continue;
    for (std::size_t x = 0; x < mix.size(); ++x) mix[x] += env_post[j] * w[x] / total;
    mass += env_post[j];
  }
  if (mass <= 0.0) {
    throw ImpossibleObservationError("z=" + std::to_string(z) +
                                     " is impossible under every plausible environment");
  }
  return CountDistribution(normalized(std::move(mix), mass));
}

TargetEstimate bayesEstimateTargets(const CountDistribution& dist, double under, double over) {
  if (!(under > 0.0) || !(over > 0.0)) {
    throw std::invalid_argument("target loss weights must be strictly positive");
  }
  TargetEstimate best{0, 0.0};
  for (int delta = 0; delta <= dist.maxCount(); ++delta) {
    double expected = 0.0;
    for (int x = 0; x <= dist.maxCount(); ++x) {
      expected += dist[x] * (delta < x ? under * (x - delta) : over * (delta - x));
    }
    if (delta == 0 || improves(expected, best.risk)) best = TargetEstimate{delta, expected};
  }
  return best;
}

double currentRisk(const CellBelief& belief, const SensorSuite& sensor) {
  checkBelief(belief, sensor);
  // The target prior does not depend on the environment, so every class
  // contributes the same prior Bayes risk.
  const double per_class = bayesRisk(belief.targets, belief.loss);
  double rho = 0.0;
  for (EnvIndex j = 0; j < sensor.classes(); ++j) rho += belief.env[j] * per_class;
  return rho;
}

double anticipatedRiskCond(const CellBelief& belief, int z, EnvIndex j,
                           const SensorSuite& sensor) {
  belief.loss.validate();
  return bayesRisk(posteriorTargets(belief.targets, z, j, sensor), belief.loss);
}

EnvEstimate bayesEstimateEnv(const CellBelief& belief, int z, EnvIndex y,
                             const SensorSuite& sensor) {
  checkBelief(belief, sensor);
  const EnvDistribution env_post = posteriorEnv(belief.env, y, sensor);
  return chooseEnv(env_post, conditionalRisks(belief, z, sensor), belief.loss);
}

double jointObsProb(const CellBelief& belief, int z, EnvIndex y, const SensorSuite& sensor) {
  checkBelief(belief, sensor);
  double total = 0.0;
  for (EnvIndex j = 0; j < sensor.classes(); ++j) {
    if (belief.env[j] == 0.0) continue;
    double pz = 0.0;
    for (int x = 0; x <= belief.targets.maxCount(); ++x) {
      pz += obsLikelihood(z, x, j, sensor) * belief.targets[x];
    }
    total += pz * sensor.confusion(j, y) * belief.env[j];
  }
  return total;
}

CellValue cellBenefit(const CellBelief& belief, const SensorSuite& sensor) {
  checkBelief(belief, sensor);
  const std::size_t m = sensor.classes();
  const ObservationCaps caps = observationCaps(sensor, belief.targets.maxCount());

  std::vector<std::optional<EnvDistribution>> env_post(m);
  for (EnvIndex y = 0; y < m; ++y) {
    double py = 0.0;
    for (EnvIndex j = 0; j < m; ++j) py += sensor.confusion(j, y) * belief.env[j];
    if (py > 0.0) env_post[y] = posteriorEnv(belief.env, y, sensor);
  }

  CellValue value;
  value.current_risk = currentRisk(belief, sensor);
  std::vector<double> evidence;
  for (int z = 0; z <= caps.z_max; ++z) {
    const auto risks = conditionalRisks(belief, z, sensor, &evidence);
    for (EnvIndex y = 0; y < m; ++y) {
      if (!env_post[y]) continue;
      double pzy = 0.0;
      for (EnvIndex j = 0; j < m; ++j) pzy += evidence[j] * sensor.confusion(j, y) * belief.env[j];
      if (pzy <= 0.0) continue;
      value.anticipated_risk += pzy * chooseEnv(*env_post[y], risks, belief.loss).risk;
    }
  }
  value.benefit = value.current_risk - value.anticipated_risk;
  return value;
}

}  // namespace riskscout
