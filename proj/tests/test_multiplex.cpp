#include <doctest.h>

#include "nkgroup/error.hpp"
#include "nkgroup/multiplex.hpp"
#include "oracles.hpp"

using namespace nkgroup;

TEST_CASE("index mapping is member-major") {
  CHECK(index_to_member_decision(0, 6, 12) == MemberDecision{0, 0});
  // the thirteenth opinion is member 1's first decision
  CHECK(index_to_member_decision(12, 6, 12) == MemberDecision{1, 0});
  CHECK(index_to_member_decision(71, 6, 12) == MemberDecision{5, 11});
  for (int l = 0; l < 72; ++l) {
    const auto md = index_to_member_decision(l, 6, 12);
    CHECK(member_decision_to_index(md.member, md.decision, 12) == l);
  }
  CHECK_THROWS_AS(index_to_member_decision(72, 6, 12), ParameterError);
  CHECK_THROWS_AS(index_to_member_decision(-1, 6, 12), ParameterError);
}

TEST_CASE("GroupState") {
  SUBCASE("agrees with the flattened layout") {
    Rng rng(4);
    const auto s = GroupState::random(3, 4, rng);
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 4; ++j) {
        CHECK(s.at(k, j) == s[member_decision_to_index(k, j, 4)]);
        CHECK(s.member(k)[j] == s.at(k, j));
      }
    }
  }
  SUBCASE("encode and decode are inverse") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const auto s = GroupState::random(3, 5, rng);
      CHECK(GroupState::decode(s.encode(), 3, 5) == s);
    }
    CHECK(GroupState(2, 2, Spin{1}).encode() == 15u);
    CHECK(GroupState(2, 2, Spin{-1}).encode() == 0u);
  }
  SUBCASE("rejects values other than +-1") {
    CHECK_THROWS_AS(GroupState(1, 2, std::vector<Spin>{1, 0}), ParameterError);
    CHECK_THROWS_AS(GroupState(1, 2, std::vector<Spin>{1}), ParameterError);
  }
  SUBCASE("random states are balanced") {
    Rng rng(6);
    long plus = 0;
    for (int t = 0; t < 2000; ++t) {
      const auto s = GroupState::random(6, 12, rng);
      for (Spin x : s.spins()) plus += x == 1;
    }
    CHECK(std::abs(plus / (2000.0 * 72) - 0.5) < 0.005);
  }
}

TEST_CASE("build_complete_multiplex") {
  const auto two = build_complete_multiplex(2, 3);
  for (int j = 0; j < 3; ++j) CHECK(two.edges(j) == EdgeList{{0, 1}});
  const auto six = build_complete_multiplex(6, 12);
  CHECK(six.layers() == 12);
  for (int j = 0; j < 12; ++j) {
    CHECK(six.edge_count(j) == 15);
    for (int a = 0; a < 6; ++a) {
      CHECK_FALSE(six.adjacent(j, a, a));
      CHECK(six.neighbors(j, a).size() == 5);
    }
  }
}

TEST_CASE("Multiplex validates edges") {
  CHECK_THROWS_AS(Multiplex(3, {{{0, 0}}}), ParameterError);
  CHECK_THROWS_AS(Multiplex(3, {{{0, 3}}}), ParameterError);
  const Multiplex mp(3, {{{1, 0}, {0, 1}}, {}});
  CHECK(mp.edge_count(0) == 1);
  CHECK(mp.edge_count(1) == 0);
  CHECK(mp.adjacent(0, 1, 0));
  CHECK_FALSE(mp.adjacent(1, 1, 0));
}

TEST_CASE("layer_conflict") {
  const auto pair = build_complete_multiplex(2, 1);
  CHECK(layer_conflict(pair, GroupState(2, 1, std::vector<Spin>{1, 1}), 0, 1.0) == -1.0);
  CHECK(layer_conflict(pair, GroupState(2, 1, std::vector<Spin>{1, -1}), 0, 1.0) == 1.0);
  CHECK(layer_conflict(build_complete_multiplex(6, 1), GroupState(6, 1, Spin{1}), 0, 1.0) ==
        -15.0);
}

TEST_CASE("total_conflict") {
  const auto mp = build_complete_multiplex(6, 12);
  CHECK(total_conflict(mp, GroupState(6, 12, Spin{1}), 1.0) == -180.0);
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto s = GroupState::random(6, 12, rng);
    CHECK(total_conflict(mp, s, 0.0) == 0.0);
    double layers = 0.0;
    for (int j = 0; j < 12; ++j) layers += layer_conflict(mp, s, j, 1.3);
    CHECK(total_conflict(mp, s, 1.3) == doctest::Approx(layers).epsilon(1e-14));
  }
}

TEST_CASE("total_conflict matches the dense adjacency on sparse layers") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    std::vector<EdgeList> layers(4);
    for (auto& layer : layers) {
      for (int a = 0; a < 5; ++a) {
        for (int b = a + 1; b < 5; ++b) {
          if (coin(rng)) layer.emplace_back(a, b);
        }
      }
    }
    const Multiplex mp(5, layers);
    const auto s = GroupState::random(5, 4, rng);
    CHECK(total_conflict(mp, s, 0.7) == doctest::Approx(oracle::energy(mp, s, 0.7)).epsilon(1e-14));
  }
}

TEST_CASE("local_field sums neighbors in the same layer") {
  const Multiplex mp(3, {{{0, 1}, {0, 2}}, {{1, 2}}});
  const GroupState s(3, 2, std::vector<Spin>{1, 1, 1, -1, -1, -1});
  CHECK(local_field(mp, s, member_decision_to_index(0, 0, 2)) == 0);
  CHECK(local_field(mp, s, member_decision_to_index(1, 0, 2)) == 1);
  CHECK(local_field(mp, s, member_decision_to_index(0, 1, 2)) == 0);
  CHECK(local_field(mp, s, member_decision_to_index(1, 1, 2)) == -1);
}
