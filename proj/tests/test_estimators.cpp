#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kgcard/estimators.hpp"

using namespace kgcard;

namespace {

FrequencyHistogram make_histogram(std::int64_t k,
                                  std::initializer_list<std::pair<std::int64_t, std::int64_t>> f) {
  FrequencyHistogram::FrequencyMap m;
  for (auto [i, c] : f) m[i] = c;
  return FrequencyHistogram(k, std::move(m));
}

// Two worked fixtures used throughout: an equiprobable-looking one where
// the skew correction vanishes, and a skewed one where it does not.
const FrequencyHistogram kFlat = make_histogram(2, {{1, 2}, {2, 1}});     // k=2 D=3 n=4
const FrequencyHistogram kSkewed = make_histogram(3, {{1, 5}, {2, 2}, {3, 1}});  // k=3 D=8 n=12

FrequencyHistogram random_histogram(std::mt19937& rng) {
  const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 12);
  FrequencyHistogram::FrequencyMap freq;
  const int entities = static_cast<int>(rng() % 40);  // may be zero
  for (int e = 0; e < entities; ++e) {
    ++freq[1 + static_cast<std::int64_t>(rng() % k)];
  }
  return FrequencyHistogram(k, std::move(freq));
}

}  // namespace

TEST_CASE("jack1 matches hand substitution") {
  CHECK(jack1(kFlat).defined);
  CHECK(jack1(kFlat).value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(jack1(make_histogram(3, {{2, 4}})).value == doctest::Approx(4.0));  // f1 = 0 -> D
  CHECK(jack1(make_histogram(1, {{1, 5}})).value == doctest::Approx(5.0));  // k = 1 zeroes the term
  CHECK(jack1(kSkewed).value == doctest::Approx(8.0 + 2.0 / 3.0 * 5.0).epsilon(1e-9));
}

TEST_CASE("jack2 matches hand substitution and needs two periods") {
  CHECK(jack2(kFlat).value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(jack2(make_histogram(1, {{1, 3}})).defined);
  CHECK(jack2(make_histogram(4, {{3, 2}, {4, 1}})).value == doctest::Approx(3.0));  // f1=f2=0 -> D
  CHECK(jack2(kSkewed).value == doctest::Approx(8.0 + 5.0 - 2.0 / 6.0).epsilon(1e-9));  // 12.667
}

TEST_CASE("sample coverage is the singleton complement") {
  CHECK(*sample_coverage(kFlat) == doctest::Approx(0.5));
  CHECK(*sample_coverage(make_histogram(3, {{2, 4}})) == doctest::Approx(1.0));
  CHECK(*sample_coverage(make_histogram(1, {{1, 6}})) == doctest::Approx(0.0));
  CHECK_FALSE(sample_coverage(make_histogram(1, {})).has_value());
}

TEST_CASE("n1_unif matches hand substitution") {
  CHECK(n1_unif(kFlat).value == doctest::Approx(6.0).epsilon(1e-12));
  auto no_singletons = n1_unif(make_histogram(3, {{2, 4}}));
  CHECK(no_singletons.value == doctest::Approx(4.0));
  CHECK_FALSE(n1_unif(make_histogram(1, {{1, 6}})).defined);  // zero coverage
  CHECK_FALSE(n1_unif(make_histogram(1, {})).defined);        // n = 0
}

TEST_CASE("sor clamps the singleton count when dispersion is estimable") {
  auto skewed = sor(kSkewed);
  REQUIRE(skewed.defined);
  // mean of {f2, f3} = 1.5, deviation sqrt(0.5); clamp = 2.9142...
  const double clamp = 2.0 * std::sqrt(0.5) + 1.5;
  CHECK(skewed.value == doctest::Approx(8.0 / (1.0 - clamp / 12.0)).epsilon(1e-9));
  CHECK(skewed.value == doctest::Approx(10.566).epsilon(1e-3));

  // Fewer than three distinct frequencies: clamp skipped, equals n1_unif.
  auto flat = sor(kFlat);
  CHECK(flat.value == doctest::Approx(n1_unif(kFlat).value).epsilon(1e-12));

  CHECK(sor(make_histogram(4, {{2, 3}, {3, 1}, {4, 2}})).value == doctest::Approx(6.0));  // f1=0
  CHECK_FALSE(sor(make_histogram(1, {{1, 9}})).defined);  // all singletons
}

TEST_CASE("gamma_squared matches hand substitution and clamps at zero") {
  CHECK(*gamma_squared(kFlat) == doctest::Approx(0.0));
  // n1_unif = 96/7; sum i(i-1) f_i = 10; n(n-1) = 132.
  CHECK(*gamma_squared(kSkewed) == doctest::Approx(96.0 / 7.0 * 10.0 / 132.0 - 1.0).epsilon(1e-9));
  CHECK(*gamma_squared(kSkewed) == doctest::Approx(0.0390).epsilon(1e-2));
  CHECK(*gamma_squared(make_histogram(3, {{2, 5}})) == doctest::Approx(0.0));  // clamped
  CHECK_FALSE(gamma_squared(make_histogram(1, {{1, 1}})).has_value());  // n < 2
  CHECK_FALSE(gamma_squared(make_histogram(2, {{1, 4}})).has_value());  // zero coverage
  // The literal denominator reading stays available for comparison and differs.
  CHECK(*gamma_squared(kSkewed, true) > *gamma_squared(kSkewed));
}

TEST_CASE("chao92 matches hand substitution and reduces to n1_unif at zero skew") {
  auto flat = chao92(kFlat);
  CHECK(flat.value == n1_unif(kFlat).value);  // gamma^2 == 0: identical arithmetic
  auto skewed = chao92(kSkewed);
  const double gamma2 = 96.0 / 7.0 * 10.0 / 132.0 - 1.0;
  CHECK(skewed.value == doctest::Approx((8.0 + 5.0 * gamma2) / (7.0 / 12.0)).epsilon(1e-9));
  CHECK(skewed.value == doctest::Approx(14.048).epsilon(1e-3));
  CHECK(chao92(make_histogram(3, {{2, 4}})).value == doctest::Approx(4.0));  // f1 = 0 -> D
  CHECK_FALSE(chao92(make_histogram(2, {{1, 4}})).defined);
}

TEST_CASE("estimate_all covers every requested method in order") {
  auto all = estimate_all(kFlat, all_methods());
  REQUIRE(all.size() == 5);
  CHECK(all[0].method == Method::jack1);
  CHECK(all[0].value == doctest::Approx(4.0));
  CHECK(all[1].method == Method::jack2);
  CHECK(all[1].value == doctest::Approx(4.0));
  CHECK(all[2].method == Method::n1_unif);
  CHECK(all[2].value == doctest::Approx(6.0));
  CHECK(all[3].method == Method::sor);
  CHECK(all[3].value == doctest::Approx(6.0));
  CHECK(all[4].method == Method::chao92);
  CHECK(all[4].value == doctest::Approx(6.0));

  // Degenerate empty histogram: only jack1 stays defined, at zero.
  auto empty = estimate_all(FrequencyHistogram(1, {}), all_methods());
  CHECK(empty[0].defined);
  CHECK(empty[0].value == 0.0);
  for (std::size_t i = 1; i < empty.size(); ++i) CHECK_FALSE(empty[i].defined);

  const Method only[] = {Method::jack1};
  CHECK(estimate_all(kFlat, only).size() == 1);
}

TEST_CASE("default method set excludes the second-order jackknife") {
  auto methods = default_methods();
  CHECK(std::find(methods.begin(), methods.end(), Method::jack2) == methods.end());
  CHECK(std::find(methods.begin(), methods.end(), Method::jack1) != methods.end());
}

TEST_CASE("method names round-trip") {
  for (Method m : all_methods()) {
    auto parsed = parse_method(method_name(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(parse_method("n1_unif") == Method::n1_unif);
  CHECK_FALSE(parse_method("chao84").has_value());
}

TEST_CASE("estimator invariants hold over randomized histograms") {
  std::mt19937 rng(20180818);
  int checked = 0;
  for (int round = 0; round < 10000; ++round) {
    FrequencyHistogram h = random_histogram(rng);
    const auto d = static_cast<double>(h.distinct_count());
    auto estimates = estimate_all(h, all_methods());
    Estimate j1 = estimates[0], j2 = estimates[1], unif = estimates[2], reduced = estimates[3],
             chao = estimates[4];

    for (const Estimate& e : estimates) {
      if (!e.defined) continue;
      CHECK(std::isfinite(e.value));
      CHECK(e.value >= -1e-9);
      if (e.method == Method::jack2) continue;  // jack2 carries no lower-bound guarantee
      CHECK(e.value >= d - 1e-9);
    }
    if (chao.defined && unif.defined) CHECK(chao.value >= unif.value - 1e-9);
    if (reduced.defined && unif.defined) CHECK(reduced.value <= unif.value + 1e-9);
    if (h.frequency(1) == 0) {
      CHECK(j1.value == doctest::Approx(d));
      if (unif.defined) CHECK(unif.value == doctest::Approx(d));
      if (reduced.defined) CHECK(reduced.value == doctest::Approx(d));
      if (chao.defined) CHECK(chao.value == doctest::Approx(d));
      // jack2 subtracts a doubleton term, so it needs f2 = 0 as well.
      if (j2.defined && h.frequency(2) == 0) CHECK(j2.value == doctest::Approx(d));
    }
    auto gamma2 = gamma_squared(h);
    if (gamma2 && *gamma2 == 0.0 && chao.defined && unif.defined) {
      CHECK(chao.value == unif.value);  // exact reduction
      ++checked;
    }

    // Determinism: identical histograms give bit-identical estimates.
    auto again = estimate_all(h, all_methods());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      CHECK(estimates[i].defined == again[i].defined);
      CHECK(estimates[i].value == again[i].value);
    }
  }
  CHECK(checked > 100);  // the reduction case must actually occur
}

TEST_CASE("scaling every frequency count scales the flat estimate") {
  std::mt19937 rng(4242);
  for (int round = 0; round < 200; ++round) {
    FrequencyHistogram h = random_histogram(rng);
    if (h.observation_count() == 0) continue;
    const std::int64_t c = 2 + static_cast<std::int64_t>(rng() % 5);
    FrequencyHistogram::FrequencyMap scaled_freq;
    for (const auto& [i, count] : h.frequencies()) scaled_freq[i] = count * c;
    FrequencyHistogram scaled(h.period_count(), std::move(scaled_freq));

    CHECK(scaled.distinct_count() == c * h.distinct_count());
    CHECK(scaled.observation_count() == c * h.observation_count());
    auto cov = sample_coverage(h);
    auto cov_scaled = sample_coverage(scaled);
    CHECK(*cov_scaled == *cov);  // (c f1)/(c n) rounds identically
    auto base = n1_unif(h);
    auto big = n1_unif(scaled);
    CHECK(base.defined == big.defined);
    if (base.defined) {
      CHECK(big.value ==
            doctest::Approx(static_cast<double>(c) * base.value).epsilon(1e-12));
    }
  }
}
