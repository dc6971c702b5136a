#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nkgroup/rng.hpp"

namespace nkgroup {

// A binary opinion or decision: exactly -1 or +1.
using Spin = std::int8_t;

// Length-N vector of decisions d_j in {-1, +1}.
using DecisionVector = std::vector<Spin>;

inline constexpr int kMaxEnumerableDecisions = 24;

/// NK fitness landscape.
///
/// Contribution j depends on d_j and on K other decisions deps(j). Its table
/// holds 2^(K+1) values in [0, 1]. The table index is the bit pattern
/// (d_j, d_deps[0], ..., d_deps[K-1]) with +1 read as 1 and -1 as 0, and d_j
/// as the most significant bit.
class Landscape {
 public:
  /// Builds a landscape from explicit parts and checks every invariant.
  Landscape(int n, int k, std::uint64_t seed, std::vector<std::vector<int>> deps,
            std::vector<std::vector<double>> tables);

  int n() const { return n_; }
  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<int>& deps(int j) const { return deps_[j]; }
  std::span<const double> table(int j) const { return tables_[j]; }

  /// Contributions m whose pattern includes decision j (m == j or j in deps(m)).
  const std::vector<int>& dependents(int j) const { return dependents_[j]; }

  /// Decisions whose single-flip payoff change can be altered by flipping j:
  /// the union of the patterns of every contribution in dependents(j).
  const std::vector<int>& coupled(int j) const { return coupled_[j]; }

  /// For each entry m of dependents(j), the table-index bit that decision j
  /// occupies in contribution m's pattern, as an XOR mask.
  const std::vector<std::uint32_t>& dependent_masks(int j) const { return masks_[j]; }

  std::uint32_t table_index(int j, std::span<const Spin> d) const;
  double contribution(int j, std::span<const Spin> d) const {
    return tables_[j][table_index(j, d)];
  }

  friend bool operator==(const Landscape&, const Landscape&) = default;

 private:
  int n_;
  int k_;
  std::uint64_t seed_;
  std::vector<std::vector<int>> deps_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<int>> dependents_;
  std::vector<std::vector<std::uint32_t>> masks_;
  std::vector<std::vector<int>> coupled_;
};

/// Random NK landscape: deps sampled uniformly without replacement, table
/// entries i.i.d. uniform on [0, 1). A pure function of (n, k, seed).
Landscape generate_landscape(int n, int k, std::uint64_t seed);

/// Group fitness V(d): mean of the N contributions.
double fitness(const Landscape& landscape, std::span<const Spin> d);

/// M x N binary knowledge mask. Entry (k, j) is 1 when member k knows
/// contribution j.
class CompetenceMatrix {
 public:
  CompetenceMatrix(int m, int n, double p, std::uint64_t seed,
                   std::vector<std::uint8_t> entries);

  int m() const { return m_; }
  int n() const { return n_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  bool knows(int member, int decision) const {
    return entries_[static_cast<std::size_t>(member) * n_ + decision] != 0;
  }
  std::span<const std::uint8_t> row(int member) const {
    return std::span(entries_).subspan(static_cast<std::size_t>(member) * n_, n_);
  }
  int known_count(int member) const { return known_count_[member]; }
  double density() const;

  friend bool operator==(const CompetenceMatrix&, const CompetenceMatrix&) = default;

 private:
  int m_;
  int n_;
  double p_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> entries_;
  std::vector<int> known_count_;
};

/// Each entry is 1 with probability p, independently.
CompetenceMatrix generate_competence(int m, int n, double p, std::uint64_t seed);

/// Fitness as perceived by one member: the mean of the contributions that
/// member knows. A member who knows nothing perceives 0 everywhere.
double perceived_fitness(const Landscape& landscape, const CompetenceMatrix& competence,
                         int member, std::span<const Spin> d);

struct Optimum {
  DecisionVector decisions;
  double value = 0.0;
};

/// Exhaustive maximum over all 2^N decision vectors. Ties go to the lowest
/// encoding (d_1 least significant, +1 read as 1). Refuses N above 24.
Optimum global_max(const Landscape& landscape);

/// Decision vector for an encoding as used by global_max.
DecisionVector decode_decisions(std::uint64_t code, int n);

}  // namespace nkgroup
