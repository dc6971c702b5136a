#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nkgroup/landscape.hpp"
#include "nkgroup/rng.hpp"

namespace nkgroup {

// Indices are zero-based throughout. Component l of the flattened state holds
// member l / N's opinion on decision l % N, i.e. the order is
// (sigma_0^0, ..., sigma_0^{N-1}, sigma_1^0, ...).
struct MemberDecision {
  int member;
  int decision;
  friend bool operator==(const MemberDecision&, const MemberDecision&) = default;
};

MemberDecision index_to_member_decision(int index, int members, int decisions);
int member_decision_to_index(int member, int decision, int decisions);

/// Opinions of all M members on all N decisions, flattened member-major.
class GroupState {
 public:
  GroupState(int members, int decisions, std::vector<Spin> spins);
  GroupState(int members, int decisions, Spin fill);

  /// Every opinion independently +1 or -1 with probability 1/2.
  static GroupState random(int members, int decisions, Rng& rng);

  int members() const { return m_; }
  int decisions() const { return n_; }
  int size() const { return static_cast<int>(s_.size()); }

  Spin operator[](int index) const { return s_[index]; }
  Spin at(int member, int decision) const { return s_[member * n_ + decision]; }
  std::span<const Spin> spins() const { return s_; }
  /// One member's opinion vector sigma_k.
  std::span<const Spin> member(int k) const {
    return std::span(s_).subspan(static_cast<std::size_t>(k) * n_, n_);
  }

  void flip(int index) { s_[index] = static_cast<Spin>(-s_[index]); }
  void set(int member, int decision, Spin value);

  /// Encoding used by the exact oracle: bit l is set when component l is +1.
  std::uint64_t encode() const;
  static GroupState decode(std::uint64_t code, int members, int decisions);

  friend bool operator==(const GroupState&, const GroupState&) = default;

 private:
  int m_;
  int n_;
  std::vector<Spin> s_;
};

using Edge = std::pair<int, int>;
using EdgeList = std::vector<Edge>;

/// N layers over the same M members; layer j carries the social ties used
/// when members discuss decision j. Undirected, unweighted, no self-loops.
class Multiplex {
 public:
  Multiplex(int members, std::vector<EdgeList> layers);

  int members() const { return m_; }
  int layers() const { return static_cast<int>(neighbors_.size()); }

  const std::vector<int>& neighbors(int layer, int member) const {
    return neighbors_[layer][member];
  }
  bool adjacent(int layer, int a, int b) const;
  /// Each undirected edge once, with first < second.
  EdgeList edges(int layer) const;
  std::size_t edge_count(int layer) const;

  friend bool operator==(const Multiplex&, const Multiplex&) = default;

 private:
  int m_;
  std::vector<std::vector<std::vector<int>>> neighbors_;
};

/// Every layer is the complete graph on M members.
Multiplex build_complete_multiplex(int members, int decisions);

/// Products of inverse temperatures with their energy scales. beta and J
/// never appear separately.
struct Coupling {
  double beta_j = 0.0;
  double beta_prime = 0.0;
};

/// Conflict on one layer, -J * sum over edges of sigma_k sigma_h.
double layer_conflict(const Multiplex& network, const GroupState& state, int layer, double j);

/// Total conflict -(J/2) * sum_{l,h} A_lh s_l s_h over the block-diagonal
/// aggregate adjacency.
double total_conflict(const Multiplex& network, const GroupState& state, double j);

/// Sum of neighbor opinions seen by component `index` in its own layer.
int local_field(const Multiplex& network, const GroupState& state, int index);

}  // namespace nkgroup
