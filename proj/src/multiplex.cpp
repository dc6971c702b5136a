#include "nkgroup/multiplex.hpp"

#include <algorithm>
#include <string>

#include "nkgroup/error.hpp"

namespace nkgroup {

MemberDecision index_to_member_decision(int index, int members, int decisions) {
  require(members >= 1 && decisions >= 1, "M and N must be positive");
  require(index >= 0 && index < members * decisions,
          "state index " + std::to_string(index) + " out of range");
  return {index / decisions, index % decisions};
}

int member_decision_to_index(int member, int decision, int decisions) {
  require(decision >= 0 && decision < decisions, "decision index out of range");
  require(member >= 0, "member index out of range");
  return member * decisions + decision;
}

GroupState::GroupState(int members, int decisions, std::vector<Spin> spins)
    : m_(members), n_(decisions), s_(std::move(spins)) {
  require(members >= 1 && decisions >= 1, "M and N must be positive");
  require(s_.size() == static_cast<std::size_t>(members) * decisions,
          "state must have M*N components");
  for (Spin s : s_) require(s == 1 || s == -1, "opinions must be +1 or -1");
}

GroupState::GroupState(int members, int decisions, Spin fill)
    : GroupState(members, decisions,
                 std::vector<Spin>(static_cast<std::size_t>(members) * decisions, fill)) {}

GroupState GroupState::random(int members, int decisions, Rng& rng) {
  std::vector<Spin> s(static_cast<std::size_t>(members) * decisions);
  for (auto& x : s) x = coin(rng) ? Spin{1} : Spin{-1};
  return GroupState(members, decisions, std::move(s));
}

void GroupState::set(int member, int decision, Spin value) {
  require(value == 1 || value == -1, "opinions must be +1 or -1");
  s_[member * n_ + decision] = value;
}

std::uint64_t GroupState::encode() const {
  require(s_.size() <= 64, "state too large to encode");
  std::uint64_t code = 0;
  for (std::size_t l = 0; l < s_.size(); ++l) {
    if (s_[l] > 0) code |= std::uint64_t{1} << l;
  }
  return code;
}

GroupState GroupState::decode(std::uint64_t code, int members, int decisions) {
  const int size = members * decisions;
  require(size <= 64, "state too large to decode");
  std::vector<Spin> s(size);
  for (int l = 0; l < size; ++l) s[l] = ((code >> l) & 1u) ? Spin{1} : Spin{-1};
  return GroupState(members, decisions, std::move(s));
}

Multiplex::Multiplex(int members, std::vector<EdgeList> layers) : m_(members) {
  require(members >= 2, "a multiplex needs at least two members");
  require(!layers.empty(), "a multiplex needs at least one layer");
  neighbors_.assign(layers.size(), std::vector<std::vector<int>>(members));
  for (std::size_t j = 0; j < layers.size(); ++j) {
    auto& adj = neighbors_[j];
    for (auto [a, b] : layers[j]) {
      require(a >= 0 && a < members && b >= 0 && b < members,
              "edge endpoint out of range on layer " + std::to_string(j));
      require(a != b, "self-loop on layer " + std::to_string(j));
      if (std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) continue;
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
  }
}

bool Multiplex::adjacent(int layer, int a, int b) const {
  const auto& list = neighbors_[layer][a];
  return std::binary_search(list.begin(), list.end(), b);
}

EdgeList Multiplex::edges(int layer) const {
  EdgeList out;
  for (int a = 0; a < m_; ++a) {
    for (int b : neighbors_[layer][a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t Multiplex::edge_count(int layer) const {
  std::size_t degree_sum = 0;
  for (const auto& list : neighbors_[layer]) degree_sum += list.size();
  return degree_sum / 2;
}

Multiplex build_complete_multiplex(int members, int decisions) {
  require(members >= 2, "a complete multiplex needs M >= 2");
  require(decisions >= 1, "N must be positive");
  EdgeList complete;
  for (int a = 0; a < members; ++a) {
    for (int b = a + 1; b < members; ++b) complete.emplace_back(a, b);
  }
  return Multiplex(members, std::vector<EdgeList>(decisions, complete));
}

namespace {

void check_shapes(const Multiplex& network, const GroupState& state) {
  require(network.members() == state.members() && network.layers() == state.decisions(),
          "network and state shapes differ");
}

}  // namespace

double layer_conflict(const Multiplex& network, const GroupState& state, int layer, double j) {
  check_shapes(network, state);
  require(layer >= 0 && layer < network.layers(), "layer index out of range");
  long agreement = 0;
  for (int a = 0; a < network.members(); ++a) {
    for (int b : network.neighbors(layer, a)) {
      if (a < b) agreement += state.at(a, layer) * state.at(b, layer);
    }
  }
  return -j * static_cast<double>(agreement);
}

double total_conflict(const Multiplex& network, const GroupState& state, double j) {
  check_shapes(network, state);
  long sum = 0;
  for (int l = 0; l < state.size(); ++l) sum += state[l] * local_field(network, state, l);
  return -0.5 * j * static_cast<double>(sum);
}

int local_field(const Multiplex& network, const GroupState& state, int index) {
  const int n = state.decisions();
  const int member = index / n;
  const int layer = index % n;
  int field = 0;
  for (int h : network.neighbors(layer, member)) field += state.at(h, layer);
  return field;
}

}  // namespace nkgroup
