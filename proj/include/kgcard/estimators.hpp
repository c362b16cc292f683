#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kgcard/observations.hpp"

namespace kgcard {

enum class Method {
  jack1,
  jack2,
  n1_unif,
  sor,
  chao92,
};

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

/// All methods in canonical order.
std::span<const Method> all_methods();

/// Default method set. Second-order jackknife is available but excluded
/// here: it over-estimates once samples get large.
std::span<const Method> default_methods();

/// One class-size estimate. A formula that is undefined for the given
/// histogram (zero sample coverage, too few periods) yields
/// defined == false instead of throwing: early periods of real classes
/// routinely consist of nothing but singletons.
struct Estimate {
  Method method = Method::jack1;
  double value = 0.0;
  bool defined = false;
};

/// First-order jackknife: D + ((k-1)/k) * f1. Defined for every histogram.
Estimate jack1(const FrequencyHistogram& h);

/// Second-order jackknife: D + ((2k-3)/k) f1 - ((k-2)^2 / (k(k-1))) f2.
/// Undefined for k < 2.
Estimate jack2(const FrequencyHistogram& h);

/// Good-Turing sample coverage: 1 - f1/n. Undefined (nullopt) when n == 0.
std::optional<double> sample_coverage(const FrequencyHistogram& h);

/// Good-Turing estimate under equiprobable capture: D / coverage.
/// Undefined when n == 0 or coverage == 0 (all singletons).
Estimate n1_unif(const FrequencyHistogram& h);

/// Singleton-outlier reduction: like n1_unif but with f1 clamped to two
/// standard deviations above the mean of the non-singleton frequency
/// counts. The clamp needs at least three distinct observed frequencies;
/// below that the dispersion is inestimable and f1 is used as-is.
Estimate sor(const FrequencyHistogram& h);

/// Squared coefficient of variation of the capture probabilities,
/// estimated from the data:
///   max{ n1_unif * sum(i (i-1) f_i) / (n (n-1)) - 1, 0 }.
/// `literal_denominator` switches the denominator to n(n-1) - 1, a
/// non-standard alternative kept for comparison only.
/// Undefined when n < 2 or coverage == 0.
std::optional<double> gamma_squared(const FrequencyHistogram& h,
                                    bool literal_denominator = false);

/// Chao's abundance-based coverage estimator: (D + f1 * gamma^2) / coverage.
/// Reduces to n1_unif exactly when gamma^2 == 0. Undefined when n < 2 or
/// coverage == 0.
Estimate chao92(const FrequencyHistogram& h);

Estimate estimate(const FrequencyHistogram& h, Method method);

/// One Estimate per requested method, in the order given; undefined ones
/// are included with defined == false, never omitted.
std::vector<Estimate> estimate_all(const FrequencyHistogram& h, std::span<const Method> methods);

}  // namespace kgcard
