#include <doctest.h>

#include <cmath>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/error.hpp"
#include "nkgroup/exact_oracle.hpp"
#include "nkgroup/metrics.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace nkgroup;

namespace {

struct Instance {
  Landscape landscape;
  CompetenceMatrix competence;
  Multiplex network;
};

Instance random_instance(int m, int n, int k, double p, std::uint64_t seed, bool sparse) {
  Rng rng(seed);
  std::vector<EdgeList> layers(n);
  for (auto& layer : layers) {
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        if (!sparse || coin(rng)) layer.emplace_back(a, b);
      }
    }
  }
  return {generate_landscape(n, k, derive_seed(seed, 1)),
          generate_competence(m, n, p, derive_seed(seed, 2)), Multiplex(m, layers)};
}

double max_relative_gap(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
  }
  return worst;
}

}  // namespace

TEST_CASE("glauber_factor") {
  const auto mp = build_complete_multiplex(6, 1);
  SUBCASE("zero field gives one half") {
    const GroupState balanced(5, 1, std::vector<Spin>{1, 1, 1, -1, -1});
    CHECK(glauber_factor(balanced, 0, 0.5, build_complete_multiplex(5, 1)) == 0.5);
    Rng rng(2);
    const auto s = GroupState::random(6, 1, rng);
    CHECK(glauber_factor(s, 3, 0.0, mp) == 0.5);
  }
  SUBCASE("unanimous neighbors") {
    const GroupState s(6, 1, Spin{1});
    CHECK(glauber_factor(s, 0, 0.5, mp) == doctest::Approx(0.006692850924284843).epsilon(1e-12));
    CHECK(glauber_factor(s, 0, 50.0, mp) < 1e-100);
    CHECK(glauber_factor(s, 0, 50.0, mp) >= 0.0);
  }
}

TEST_CASE("payoff_delta") {
  SUBCASE("member without knowledge") {
    const auto inst = random_instance(3, 6, 2, 0.0, 1, false);
    Rng rng(1);
    const auto s = GroupState::random(3, 6, rng);
    for (int l = 0; l < s.size(); ++l) {
      CHECK(payoff_delta(s, l, inst.landscape, inst.competence) == 0.0);
    }
  }
  SUBCASE("flip then flip back cancels") {
    const auto inst = random_instance(3, 8, 3, 0.5, 2, false);
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
      auto s = GroupState::random(3, 8, rng);
      const int l = static_cast<int>(uniform_index(rng, s.size()));
      const double forward = payoff_delta(s, l, inst.landscape, inst.competence);
      s.flip(l);
      const double back = payoff_delta(s, l, inst.landscape, inst.competence);
      CHECK(std::abs(forward + back) < 1e-15);
    }
  }
  SUBCASE("matches full re-evaluation") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
      const int n = 2 + t % 9;
      const auto inst = random_instance(4, n, t % n, 0.6, 100 + t, true);
      const auto s = GroupState::random(4, n, rng);
      for (int l = 0; l < s.size(); ++l) {
        CHECK(payoff_delta(s, l, inst.landscape, inst.competence) ==
              doctest::Approx(oracle::payoff_delta(s, l, inst.landscape, inst.competence))
                  .epsilon(1e-12)
                  .scale(1.0));
      }
    }
  }
}

TEST_CASE("transition_rate") {
  SUBCASE("neutral couplings") {
    const auto inst = random_instance(6, 12, 5, 0.5, 4, false);
    Rng rng(4);
    const auto s = GroupState::random(6, 12, rng);
    for (int l = 0; l < s.size(); ++l) {
      CHECK(transition_rate(s, l, {0.0, 0.0}, inst.network, inst.landscape, inst.competence) ==
            0.5);
    }
  }
  SUBCASE("payoff gain of 0.1 at zero field") {
    const Landscape L(1, 0, 0, {{}}, {{0.2, 0.3}});
    const CompetenceMatrix C(3, 1, 1.0, 0, {1, 1, 1});
    const GroupState s(3, 1, std::vector<Spin>{-1, 1, -1});
    const double w = transition_rate(s, 0, {0.7, 10.0}, build_complete_multiplex(3, 1), L, C);
    CHECK(w == doctest::Approx(1.3591409142295225).epsilon(1e-12));
  }
  SUBCASE("forward/backward ratio") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      const auto inst = random_instance(3, 4, t % 4, 0.5, 300 + t, true);
      const Coupling c{0.1 + 0.01 * (t % 50), 0.5 * (t % 21)};
      auto s = GroupState::random(3, 4, rng);
      const int l = static_cast<int>(uniform_index(rng, s.size()));
      const double e0 = oracle::energy(inst.network, s, c.beta_j);
      const double dv = oracle::payoff_delta(s, l, inst.landscape, inst.competence);
      const double fwd =
          transition_rate(s, l, c, inst.network, inst.landscape, inst.competence);
      s.flip(l);
      const double e1 = oracle::energy(inst.network, s, c.beta_j);
      const double bwd =
          transition_rate(s, l, c, inst.network, inst.landscape, inst.competence);
      CHECK(fwd / bwd ==
            doctest::Approx(std::exp(-(e1 - e0) + 2.0 * c.beta_prime * dv)).epsilon(1e-12));
    }
  }
  SUBCASE("matches the independent rate") {
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
      const auto inst = random_instance(5, 6, t % 6, 0.5, 700 + t, true);
      const auto s = GroupState::random(5, 6, rng);
      for (int l = 0; l < s.size(); ++l) {
        CHECK(transition_rate(s, l, {0.4, 10.0}, inst.network, inst.landscape,
                              inst.competence) ==
              doctest::Approx(oracle::rate(s, l, 0.4, 10.0, inst.network, inst.landscape,
                                           inst.competence))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("detailed balance against the closed-form law") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(2, 2, t % 2, 0.5, 900 + t, false);
    const Coupling c{0.05 * t, 0.5 * t};
    const auto p0 = analytic_stationary(inst.landscape, inst.competence, inst.network, c);
    for (int trial = 0; trial < 10; ++trial) {
      auto s = GroupState::random(2, 2, rng);
      const int l = static_cast<int>(uniform_index(rng, 4));
      const double lhs =
          transition_rate(s, l, c, inst.network, inst.landscape, inst.competence) *
          p0[s.encode()];
      s.flip(l);
      const double rhs =
          transition_rate(s, l, c, inst.network, inst.landscape, inst.competence) *
          p0[s.encode()];
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs));
    }
  }
}

TEST_CASE("gillespie_step") {
  const int draws = 100000;
  SUBCASE("equal rates select uniformly") {
    Rng rng(10);
    const std::vector<double> rates(72, 0.5);
    std::vector<long> counts(72, 0);
    for (int i = 0; i < draws; ++i) ++counts[gillespie_step(rates, 36.0, rng).index];
    CHECK(stats::chi_square(counts, std::vector<double>(72, 1.0 / 72)) <
          stats::kChiSquare99Df71);
  }
  SUBCASE("mean waiting time") {
    Rng rng(11);
    const std::vector<double> rates{1.5, 0.5};
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += gillespie_step(rates, 2.0, rng).dt;
    CHECK(std::abs(sum / draws - 0.5) < 0.005);
  }
  SUBCASE("rates (1, 3)") {
    Rng rng(12);
    const std::vector<double> rates{1.0, 3.0};
    long second = 0;
    for (int i = 0; i < draws; ++i) second += gillespie_step(rates, 4.0, rng).index == 1;
    CHECK(std::abs(second / static_cast<double>(draws) - 0.75) < 0.01);
  }
  SUBCASE("zero rates are never chosen") {
    Rng rng(13);
    const std::vector<double> rates{0.0, 2.0, 0.0};
    for (int i = 0; i < 1000; ++i) CHECK(gillespie_step(rates, 2.0, rng).index == 1);
  }
  SUBCASE("non-positive total") {
    Rng rng(14);
    const std::vector<double> rates{0.0};
    CHECK_THROWS_AS(gillespie_step(rates, 0.0, rng), NumericalError);
  }
}

TEST_CASE("waiting times and event choice on a model rate vector") {
  const auto inst = random_instance(6, 12, 5, 0.5, 31, false);
  Rng rng(31);
  const auto s = GroupState::random(6, 12, rng);
  const auto rv = compute_rates(s, {0.2, 1.0}, inst.network, inst.landscape, inst.competence);
  const int draws = 100000;
  std::vector<double> dts(draws);
  std::vector<long> counts(rv.rates.size(), 0);
  for (int i = 0; i < draws; ++i) {
    const Step step = gillespie_step(rv.rates, rv.total, rng);
    dts[i] = step.dt;
    ++counts[step.index];
  }
  std::vector<double> nu(rv.rates.size());
  for (std::size_t l = 0; l < nu.size(); ++l) nu[l] = rv.rates[l] / rv.total;
  CHECK(stats::ks_exponential(dts, rv.total) < stats::kKolmogorov99);
  CHECK(stats::chi_square(counts, nu) < stats::kChiSquare99Df71);
}

TEST_CASE("Simulator keeps incremental rates equal to a full recomputation") {
  struct Case {
    int m, n, k;
    double p;
    Coupling c;
    bool sparse;
  };
  const Case cases[] = {{6, 12, 5, 0.5, {0.5, 10.0}, false}, {6, 12, 11, 0.8, {0.3, 10.0}, true},
                        {4, 8, 0, 1.0, {1.0, 5.0}, true},    {3, 10, 3, 0.3, {0.0, 20.0}, false},
                        {8, 6, 2, 0.5, {0.2, 0.0}, true}};
  std::uint64_t seed = 40;
  for (const auto& cs : cases) {
    const auto inst = random_instance(cs.m, cs.n, cs.k, cs.p, ++seed, cs.sparse);
    Rng rng(seed);
    Simulator sim(inst.landscape, inst.competence, inst.network, cs.c,
                  GroupState::random(cs.m, cs.n, rng));
    for (int e = 0; e < 1000; ++e) sim.advance(rng);
    CHECK(sim.events() == 1000);
    const auto full =
        compute_rates(sim.state(), cs.c, inst.network, inst.landscape, inst.competence);
    CHECK(max_relative_gap(sim.rates(), full.rates) < 1e-12);
  }
}

TEST_CASE("simulate_trajectory") {
  const auto inst = random_instance(6, 12, 5, 0.5, 50, false);
  const auto grid = make_grid(50.0, 101);
  SUBCASE("same seed, same record") {
    const auto a = simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                       {0.5, 10.0}, 50.0, grid, 77);
    const auto b = simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                       {0.5, 10.0}, 50.0, grid, 77);
    CHECK(a.fitness == b.fitness);
    CHECK(a.consensus == b.consensus);
    CHECK(a.events == b.events);
    const auto c = simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                       {0.5, 10.0}, 50.0, grid, 78);
    CHECK(a.consensus != c.consensus);
  }
  SUBCASE("one sample per grid point, events inside [0, t_end]") {
    const auto r = simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                       {0.5, 10.0}, 50.0, grid, 3, {true});
    CHECK(r.fitness.size() == grid.size());
    CHECK(r.consensus.size() == grid.size());
    CHECK(r.event_times.size() == r.events);
    REQUIRE(!r.event_times.empty());
    CHECK(r.event_times.back() <= 50.0);
    for (std::size_t i = 1; i < r.event_times.size(); ++i) {
      CHECK(r.event_times[i] >= r.event_times[i - 1]);
    }
    for (double v : r.fitness) CHECK((v >= 0.0 && v <= 1.0));
    for (double c : r.consensus) CHECK((c >= 0.0 && c <= 1.0));
  }
  SUBCASE("free dynamics settle at consensus 1/M") {
    const auto long_grid = make_grid(200.0, 401);
    double total = 0.0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
      const auto rec = simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                           {0.0, 0.0}, 200.0, long_grid, 1000 + r);
      total += window_average(rec.grid, rec.consensus, 100.0, 200.0);
    }
    CHECK(std::abs(total / runs - 1.0 / 6.0) < 0.01);
  }
  SUBCASE("grid outside the horizon") {
    const std::vector<double> bad{0.0, 60.0};
    CHECK_THROWS_AS(simulate_trajectory(inst.landscape, inst.competence, inst.network,
                                        {0.5, 10.0}, 50.0, bad, 1),
                    ParameterError);
  }
}
