#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "kgcard/estimators.hpp"
#include "kgcard/simulator.hpp"

using namespace kgcard;

namespace {

ScenarioSpec basic_scenario(std::int64_t population, std::int64_t periods, std::int64_t draws,
                            std::uint64_t seed) {
  ScenarioSpec spec;
  spec.class_id = "syn";
  spec.population = make_population(population, DistributionKind::uniform);
  spec.periods = periods;
  spec.draws_per_period = draws;
  spec.seed = seed;
  spec.origin = 0;
  spec.period_length = 1000;
  return spec;
}

}  // namespace

TEST_CASE("make_population builds the stated probability vectors") {
  auto uniform = make_population(4, DistributionKind::uniform);
  REQUIRE(uniform.probabilities.size() == 4);
  for (double p : uniform.probabilities) CHECK(p == doctest::Approx(0.25));

  auto zipf = make_population(2, DistributionKind::zipf, 1.0);
  CHECK(zipf.probabilities[0] == doctest::Approx(2.0 / 3.0));
  CHECK(zipf.probabilities[1] == doctest::Approx(1.0 / 3.0));

  auto solo = make_population(1, DistributionKind::uniform);
  CHECK(solo.probabilities == std::vector<double>{1.0});

  CHECK_THROWS_AS(make_population(0, DistributionKind::uniform), std::invalid_argument);
  CHECK_THROWS_AS(make_population(5, DistributionKind::zipf, 0.0), std::invalid_argument);

  // Normalization holds for a large skewed population too.
  auto big = make_population(10000, DistributionKind::zipf, 1.5);
  double total = 0.0;
  for (double p : big.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a single-instance population is observed every period") {
  auto spec = basic_scenario(1, 3, 2, 42);
  auto mentions = simulate(spec);
  CHECK(mentions.size() == 6);
  auto h = naive_frequency_count(mentions, spec.origin, spec.period_length);
  CHECK(h.distinct_count() == 1);
  CHECK(h.period_count() == 3);
  CHECK(h.frequency(3) == 1);
}

TEST_CASE("the same seed reproduces the stream byte for byte") {
  auto spec = basic_scenario(50, 5, 40, 20180818);
  spec.bursts.push_back({2, 10});
  auto first = simulate(spec);
  auto second = simulate(spec);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].entity == second[i].entity);
    CHECK(first[i].timestamp == second[i].timestamp);
  }
  auto other = basic_scenario(50, 5, 40, 99);
  auto different = simulate(other);
  bool same = different.size() == first.size();
  if (same) {
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (first[i].entity != different[i].entity) same = false;
    }
  }
  CHECK_FALSE(same);
}

TEST_CASE("timestamps sit at the period midpoint") {
  auto spec = basic_scenario(5, 2, 3, 7);
  auto mentions = simulate(spec);
  for (const Mention& m : mentions) {
    CHECK((m.timestamp == 500 || m.timestamp == 1500));
  }
}

TEST_CASE("heavy uniform sampling observes nearly the whole population") {
  // 10,000 draws over 1,000 instances: the expected number of distinct
  // instances is N (1 - (1 - 1/N)^n), about 999.95.
  auto spec = basic_scenario(1000, 20, 500, 1);
  auto mentions = simulate(spec);
  CHECK(mentions.size() == 10000);
  std::set<std::string> distinct;
  for (const Mention& m : mentions) distinct.insert(m.entity);
  const double expected =
      1000.0 * (1.0 - std::pow(1.0 - 1.0 / 1000.0, 10000.0));
  CHECK(expected > 999.9);
  CHECK(distinct.size() >= 995);
}

TEST_CASE("bursts inject exactly-once fresh instances in their period") {
  auto spec = basic_scenario(200, 6, 10, 5);
  spec.population = make_population(200, DistributionKind::zipf, 1.5);
  spec.bursts.push_back({3, 40});
  SimulationStats stats;
  auto mentions = simulate(spec, &stats);
  CHECK(stats.burst_mentions == 40);
  CHECK(stats.warnings.empty());

  // Fresh: never seen before period 3; exactly once within it.
  std::set<std::string> before;
  std::map<std::string, int> in_burst_period;
  for (const Mention& m : mentions) {
    const std::int64_t period = m.timestamp / spec.period_length;
    if (period < 3) before.insert(m.entity);
    if (period == 3) ++in_burst_period[m.entity];
  }
  int fresh = 0;
  for (const auto& [entity, count] : in_burst_period) {
    if (before.count(entity) == 0) ++fresh;
  }
  CHECK(fresh >= 40);  // the 40 injected plus whatever the regular draws found
}

TEST_CASE("a burst larger than the unseen pool saturates with a warning") {
  auto spec = basic_scenario(10, 2, 50, 3);  // 50 draws see nearly all of N=10
  spec.bursts.push_back({1, 10});
  SimulationStats stats;
  auto mentions = simulate(spec, &stats);
  CHECK_FALSE(stats.warnings.empty());
  std::set<std::string> distinct;
  for (const Mention& m : mentions) distinct.insert(m.entity);
  CHECK(distinct.size() == 10);  // saturated, never more than N
}

TEST_CASE("simulated streams agree with the naive recount through the pipeline") {
  std::mt19937 seeds(9);
  for (int round = 0; round < 20; ++round) {
    auto spec = basic_scenario(1 + static_cast<std::int64_t>(seeds() % 30),
                               1 + static_cast<std::int64_t>(seeds() % 6),
                               1 + static_cast<std::int64_t>(seeds() % 25), seeds());
    if (round % 3 == 0 && spec.periods > 1 && spec.population.size > 2) {
      spec.bursts.push_back({spec.periods - 1, 1 + static_cast<std::int64_t>(seeds()) %
                                                      (spec.population.size / 2 + 1)});
    }
    auto mentions = simulate(spec);
    auto classes = bucket_mentions(mentions, spec.origin, spec.period_length);
    REQUIRE(classes.count("syn") == 1);
    const auto& obs = classes.at("syn");
    auto streamed = histogram_at(obs, obs.period_count() - 1);
    auto naive = naive_frequency_count(mentions, spec.origin, spec.period_length);
    CHECK(streamed == naive);
  }
}

TEST_CASE("naive_frequency_count handles the boundary cases") {
  std::vector<Mention> fixture{{"A", "c", 0}, {"B", "c", 0}, {"A", "c", 100}, {"C", "c", 100}};
  auto h = naive_frequency_count(fixture, 0, 100);
  CHECK(h.period_count() == 2);
  CHECK(h.distinct_count() == 3);
  CHECK(h.observation_count() == 4);
  CHECK(h.frequency(1) == 2);
  CHECK(h.frequency(2) == 1);

  auto empty = naive_frequency_count({}, 0, 100);
  CHECK(empty.distinct_count() == 0);
  CHECK(empty.observation_count() == 0);

  std::mt19937 rng(10);
  auto shuffled = fixture;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(naive_frequency_count(shuffled, 0, 100) == h);
}

TEST_CASE("scenario files parse, validate, and reject nonsense") {
  std::istringstream good(R"(# synthetic class with one burst
class_id = volcano_like
population_size = 120
distribution = zipf
zipf_exponent = 1.5
periods = 12
draws_per_period = 30
seed = 99
burst = 6:25
origin = 1000
period_length_days = 1
)");
  auto spec = parse_scenario(good);
  CHECK(spec.class_id == "volcano_like");
  CHECK(spec.population.size == 120);
  CHECK(spec.population.kind == DistributionKind::zipf);
  CHECK(spec.population.zipf_exponent == doctest::Approx(1.5));
  CHECK(spec.periods == 12);
  CHECK(spec.draws_per_period == 30);
  CHECK(spec.seed == 99);
  REQUIRE(spec.bursts.size() == 1);
  CHECK(spec.bursts[0].period == 6);
  CHECK(spec.bursts[0].count == 25);
  CHECK(spec.origin == 1000);
  CHECK(spec.period_length == kSecondsPerDay);

  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_scenario(in), std::invalid_argument);
  };
  reject("population_size = 10\n");  // missing keys
  reject("population_size = 10\ndistribution = pareto\nperiods = 2\ndraws_per_period = 1\nseed = 1\n");
  reject("population_size = 10\ndistribution = zipf\nperiods = 2\ndraws_per_period = 1\nseed = 1\n");
  reject("population_size = 10\ndistribution = uniform\nperiods = 2\ndraws_per_period = 1\nseed = 1\nburst = 5:1\n");
  reject("population_size = 10\ndistribution = uniform\nperiods = 2\ndraws_per_period = 1\nseed = 1\nburst = 1:99\n");
  reject("population_size = 10\ndistribution = uniform\nperiods = 2\ndraws_per_period = 1\nseed = 1\nseed = 2\n");
  reject("not a key value line\n");
}

TEST_CASE("uniform heavy-coverage estimates recover the true size") {
  auto spec = basic_scenario(500, 15, 700, 314159);  // n >> N: coverage near 1
  auto mentions = simulate(spec);
  auto classes = bucket_mentions(mentions, spec.origin, spec.period_length);
  const auto& obs = classes.at("syn");
  auto h = histogram_at(obs, obs.period_count() - 1);
  auto unif = n1_unif(h);
  auto chao = chao92(h);
  REQUIRE(unif.defined);
  REQUIRE(chao.defined);
  CHECK(unif.value == doctest::Approx(500.0).epsilon(0.05));
  CHECK(chao.value == doctest::Approx(500.0).epsilon(0.05));
}
