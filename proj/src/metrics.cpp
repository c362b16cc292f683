#include "kgcard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kgcard {

std::vector<std::optional<double>> EstimateSeries::values_of(Method method) const {
  std::vector<std::optional<double>> out;
  out.reserve(points.size());
  auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) {
    out.assign(points.size(), std::nullopt);
    return out;
  }
  const auto column = static_cast<std::size_t>(it - methods.begin());
  for (const PeriodRecord& p : points) {
    const Estimate& e = p.estimates[column];
    out.push_back(e.defined ? std::optional<double>(e.value) : std::nullopt);
  }
  return out;
}

std::vector<std::int64_t> EstimateSeries::distincts() const {
  std::vector<std::int64_t> out;
  out.reserve(points.size());
  for (const PeriodRecord& p : points) out.push_back(p.distinct);
  return out;
}

EstimateSeries build_series(const PeriodizedObservations& obs, std::span<const Method> methods) {
  EstimateSeries series;
  series.class_id = obs.class_id();
  series.methods.assign(methods.begin(), methods.end());
  auto histograms = series_histograms(obs);
  series.points.reserve(histograms.size());
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    const FrequencyHistogram& h = histograms[i];
    PeriodRecord record;
    record.period = static_cast<std::int64_t>(i);
    record.distinct = h.distinct_count();
    record.observations = h.observation_count();
    record.singletons = h.frequency(1);
    record.estimates = estimate_all(h, methods);
    series.points.push_back(std::move(record));
  }
  return series;
}

std::optional<double> phi_error(std::span<const std::optional<double>> estimates,
                                double ground_truth) {
  if (ground_truth <= 0.0) throw std::invalid_argument("phi_error: ground truth must be positive");
  double weighted_error = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!estimates[i]) continue;  // undefined: drop the term and its weight
    const auto weight = static_cast<double>(i + 1);
    weighted_error += std::abs(*estimates[i] - ground_truth) * weight;
    weight_sum += weight;
  }
  if (weight_sum == 0.0) return std::nullopt;
  return weighted_error / weight_sum;
}

std::optional<double> rho_convergence(std::span<const std::optional<double>> estimates,
                                      std::span<const std::int64_t> distincts, std::int64_t window,
                                      bool extra_boundary_sample) {
  if (window < 1) throw std::invalid_argument("rho_convergence: window must be >= 1");
  if (estimates.size() != distincts.size()) {
    throw std::invalid_argument("rho_convergence: series length mismatch");
  }
  std::int64_t terms = window + (extra_boundary_sample ? 1 : 0);
  const auto length = static_cast<std::int64_t>(estimates.size());
  if (length < terms) return std::nullopt;

  double sum = 0.0;
  for (std::int64_t i = length - terms; i < length; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!estimates[idx] || distincts[idx] <= 0) return std::nullopt;
    const auto d = static_cast<double>(distincts[idx]);
    sum += std::abs(*estimates[idx] - d) / d;
  }
  return sum / static_cast<double>(window);
}

ConvergenceRanking rank_by_convergence(std::span<const ClassConvergence> classes,
                                       double threshold_low, double threshold_high) {
  ConvergenceRanking ranking;
  for (const ClassConvergence& c : classes) {
    if (!c.rho) {
      ++ranking.undefined_count;
      continue;
    }
    if (*c.rho < threshold_low) {
      ranking.complete_candidates.push_back({c.class_id, *c.rho, c.distinct});
    } else if (*c.rho > threshold_high) {
      ranking.incomplete_candidates.push_back({c.class_id, *c.rho, c.distinct});
    }
  }
  auto by_rho_ascending = [](const RankedClass& a, const RankedClass& b) {
    return a.rho != b.rho ? a.rho < b.rho : a.class_id < b.class_id;
  };
  auto by_rho_descending = [](const RankedClass& a, const RankedClass& b) {
    return a.rho != b.rho ? a.rho > b.rho : a.class_id < b.class_id;
  };
  std::sort(ranking.complete_candidates.begin(), ranking.complete_candidates.end(),
            by_rho_ascending);
  std::sort(ranking.incomplete_candidates.begin(), ranking.incomplete_candidates.end(),
            by_rho_descending);
  return ranking;
}

}  // namespace kgcard
