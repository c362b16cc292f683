#include "kgcard/estimators.hpp"

#include <array>
#include <cmath>

namespace kgcard {

namespace {

constexpr std::array<Method, 5> kAllMethods = {Method::jack1, Method::jack2, Method::n1_unif,
                                               Method::sor, Method::chao92};
constexpr std::array<Method, 4> kDefaultMethods = {Method::jack1, Method::n1_unif, Method::sor,
                                                   Method::chao92};

Estimate defined_estimate(Method method, double value) { return {method, value, true}; }
Estimate undefined_estimate(Method method) { return {method, 0.0, false}; }

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::jack1: return "jack1";
    case Method::jack2: return "jack2";
    case Method::n1_unif: return "n1unif";
    case Method::sor: return "sor";
    case Method::chao92: return "chao92";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (name == method_name(m)) return m;
  }
  // Tolerate the underscored spelling of n1_unif.
  if (name == "n1_unif") return Method::n1_unif;
  return std::nullopt;
}

std::span<const Method> all_methods() { return kAllMethods; }
std::span<const Method> default_methods() { return kDefaultMethods; }

Estimate jack1(const FrequencyHistogram& h) {
  const auto k = static_cast<double>(h.period_count());
  const auto d = static_cast<double>(h.distinct_count());
  const auto f1 = static_cast<double>(h.frequency(1));
  return defined_estimate(Method::jack1, d + (k - 1.0) / k * f1);
}

Estimate jack2(const FrequencyHistogram& h) {
  const std::int64_t k = h.period_count();
  if (k < 2) return undefined_estimate(Method::jack2);
  const auto kd = static_cast<double>(k);
  const auto d = static_cast<double>(h.distinct_count());
  const auto f1 = static_cast<double>(h.frequency(1));
  const auto f2 = static_cast<double>(h.frequency(2));
  const double value =
      d + (2.0 * kd - 3.0) / kd * f1 - (kd - 2.0) * (kd - 2.0) / (kd * (kd - 1.0)) * f2;
  return defined_estimate(Method::jack2, value);
}

std::optional<double> sample_coverage(const FrequencyHistogram& h) {
  if (h.observation_count() == 0) return std::nullopt;
  return 1.0 - static_cast<double>(h.frequency(1)) / static_cast<double>(h.observation_count());
}

Estimate n1_unif(const FrequencyHistogram& h) {
  auto coverage = sample_coverage(h);
  if (!coverage || *coverage <= 0.0) return undefined_estimate(Method::n1_unif);
  return defined_estimate(Method::n1_unif, static_cast<double>(h.distinct_count()) / *coverage);
}

Estimate sor(const FrequencyHistogram& h) {
  const auto n = static_cast<double>(h.observation_count());
  if (h.observation_count() == 0) return undefined_estimate(Method::sor);

  double clamped_f1 = static_cast<double>(h.frequency(1));
  const auto num_frequencies = static_cast<std::int64_t>(h.frequencies().size());
  if (num_frequencies >= 3) {
    // Mean and sample deviation of the non-singleton counts f_j, j > 1.
    double sum = 0.0;
    for (const auto& [i, count] : h.frequencies()) {
      if (i > 1) sum += static_cast<double>(count);
    }
    const double mean = sum / static_cast<double>(num_frequencies - 1);
    double sq = 0.0;
    for (const auto& [i, count] : h.frequencies()) {
      if (i > 1) {
        const double delta = static_cast<double>(count) - mean;
        sq += delta * delta;
      }
    }
    const double dev = std::sqrt(sq / static_cast<double>(num_frequencies - 2));
    clamped_f1 = std::min(clamped_f1, 2.0 * dev + mean);
  }

  if (clamped_f1 >= n) return undefined_estimate(Method::sor);
  return defined_estimate(Method::sor,
                          static_cast<double>(h.distinct_count()) / (1.0 - clamped_f1 / n));
}

std::optional<double> gamma_squared(const FrequencyHistogram& h, bool literal_denominator) {
  const std::int64_t n = h.observation_count();
  if (n < 2) return std::nullopt;
  auto coverage = sample_coverage(h);
  if (!coverage || *coverage <= 0.0) return std::nullopt;

  double pair_sum = 0.0;  // sum of i (i-1) f_i
  for (const auto& [i, count] : h.frequencies()) {
    pair_sum += static_cast<double>(i) * static_cast<double>(i - 1) * static_cast<double>(count);
  }
  const double n_unif = static_cast<double>(h.distinct_count()) / *coverage;
  double denominator = static_cast<double>(n) * static_cast<double>(n - 1);
  if (literal_denominator) denominator -= 1.0;
  return std::max(n_unif * pair_sum / denominator - 1.0, 0.0);
}

Estimate chao92(const FrequencyHistogram& h) {
  auto gamma2 = gamma_squared(h);
  if (!gamma2) return undefined_estimate(Method::chao92);
  auto coverage = sample_coverage(h);
  const double value =
      (static_cast<double>(h.distinct_count()) + static_cast<double>(h.frequency(1)) * *gamma2) /
      *coverage;
  return defined_estimate(Method::chao92, value);
}

Estimate estimate(const FrequencyHistogram& h, Method method) {
  switch (method) {
    case Method::jack1: return jack1(h);
    case Method::jack2: return jack2(h);
    case Method::n1_unif: return n1_unif(h);
    case Method::sor: return sor(h);
    case Method::chao92: return chao92(h);
  }
  return undefined_estimate(method);
}

std::vector<Estimate> estimate_all(const FrequencyHistogram& h, std::span<const Method> methods) {
  std::vector<Estimate> out;
  out.reserve(methods.size());
  for (Method m : methods) out.push_back(estimate(h, m));
  return out;
}

}  // namespace kgcard
