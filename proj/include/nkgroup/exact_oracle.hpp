#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nkgroup/landscape.hpp"
#include "nkgroup/multiplex.hpp"

namespace nkgroup {

inline constexpr int kMaxExactOpinions = 16;

/// Generator of the full chain for a tiny group. States are the encodings of
/// GroupState::encode (bit l set when s_l = +1). The only transitions are
/// single flips, so the generator is stored as flip_rate(state, l); the
/// diagonal is minus the row sum.
class ExactModel {
 public:
  ExactModel(int members, int decisions, std::vector<double> flip_rates);

  int members() const { return m_; }
  int decisions() const { return n_; }
  int opinions() const { return m_ * n_; }
  std::size_t states() const { return std::size_t{1} << opinions(); }

  double flip_rate(std::uint64_t state, int index) const {
    return rates_[state * opinions() + index];
  }
  void set_flip_rate(std::uint64_t state, int index, double rate);

  /// Q(from, to); nonzero off the diagonal only at Hamming distance 1.
  double generator(std::uint64_t from, std::uint64_t to) const;
  double exit_rate(std::uint64_t state) const;

 private:
  int m_;
  int n_;
  std::vector<double> rates_;
};

ExactModel build_generator(const Landscape& landscape, const CompetenceMatrix& competence,
                           const Multiplex& network, const Coupling& coupling);

/// Solves pi Q = 0 with sum(pi) = 1. Up to 2^10 states this uses
/// Grassmann-Taksar-Heyman state reduction, which involves no subtraction
/// and keeps every component accurate in the relative sense. Larger chains
/// use Gauss-Seidel sweeps. Throws NumericalError with the residual if
/// max|pi Q| does not reach 1e-12 * max exit rate.
std::vector<double> stationary_distribution(const ExactModel& model);

/// max over states of |(pi Q)(s)|.
double stationary_residual(const ExactModel& model, std::span<const double> pi);

/// Closed form P0(s) proportional to exp[-beta E(s) + 2 beta' sum_k V_k(sigma_k)].
std::vector<double> analytic_stationary(const Landscape& landscape,
                                        const CompetenceMatrix& competence,
                                        const Multiplex& network, const Coupling& coupling);

/// Ising-Glauber law exp[-beta E(s)] / Z, the beta' = 0 reduction.
std::vector<double> boltzmann_distribution(const Multiplex& network, int decisions,
                                           double beta_j);

/// max over flip pairs of |w(s->s')pi(s) - w(s'->s)pi(s')| / max(w(s->s')pi(s), tiny).
double check_detailed_balance(const ExactModel& model, std::span<const double> pi);
/// Same, against the model's own stationary distribution.
double check_detailed_balance(const ExactModel& model);

/// 1/2 sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace nkgroup
