#include "nkgroup/landscape.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nkgroup/error.hpp"

namespace nkgroup {

namespace {

void check_decisions(std::span<const Spin> d, int n) {
  require(static_cast<int>(d.size()) == n,
          "decision vector has length " + std::to_string(d.size()) + ", expected " +
              std::to_string(n));
}

}  // namespace

Landscape::Landscape(int n, int k, std::uint64_t seed, std::vector<std::vector<int>> deps,
                     std::vector<std::vector<double>> tables)
    : n_(n), k_(k), seed_(seed), deps_(std::move(deps)), tables_(std::move(tables)) {
  require(n >= 1, "N must be positive");
  require(n <= 30, "N above 30 is not supported");
  require(k >= 0 && k <= n - 1, "K must lie in [0, N-1], got K=" + std::to_string(k));
  require(static_cast<int>(deps_.size()) == n, "need one dependency list per decision");
  require(static_cast<int>(tables_.size()) == n, "need one table per decision");

  const std::size_t table_size = std::size_t{1} << (k + 1);
  for (int j = 0; j < n; ++j) {
    const auto& dj = deps_[j];
    require(static_cast<int>(dj.size()) == k,
            "deps[" + std::to_string(j) + "] must have exactly K entries");
    std::vector<bool> seen(n, false);
    for (int i : dj) {
      require(i >= 0 && i < n, "dependency index out of range");
      require(i != j, "decision " + std::to_string(j) + " depends on itself");
      require(!seen[i], "duplicate dependency in deps[" + std::to_string(j) + "]");
      seen[i] = true;
    }
    require(tables_[j].size() == table_size,
            "table " + std::to_string(j) + " must have 2^(K+1) entries");
    for (double w : tables_[j]) {
      require(w >= 0.0 && w <= 1.0, "table entries must lie in [0, 1]");
    }
  }

  dependents_.assign(n, {});
  masks_.assign(n, {});
  for (int m = 0; m < n; ++m) {
    dependents_[m].push_back(m);
    masks_[m].push_back(std::uint32_t{1} << k);
    for (int i = 0; i < k; ++i) {
      const int j = deps_[m][i];
      dependents_[j].push_back(m);
      masks_[j].push_back(std::uint32_t{1} << (k - 1 - i));
    }
  }

  coupled_.assign(n, {});
  for (int j = 0; j < n; ++j) {
    std::vector<bool> hit(n, false);
    for (int m : dependents_[j]) {
      hit[m] = true;
      for (int i : deps_[m]) hit[i] = true;
    }
    for (int i = 0; i < n; ++i) {
      if (hit[i]) coupled_[j].push_back(i);
    }
  }
}

std::uint32_t Landscape::table_index(int j, std::span<const Spin> d) const {
  std::uint32_t index = d[j] > 0 ? 1u : 0u;
  for (int i : deps_[j]) {
    index = (index << 1) | (d[i] > 0 ? 1u : 0u);
  }
  return index;
}

Landscape generate_landscape(int n, int k, std::uint64_t seed) {
  require(n >= 1, "N must be positive");
  require(k >= 0 && k <= n - 1, "K must lie in [0, N-1], got K=" + std::to_string(k));
  require(n <= 30, "N above 30 is not supported");

  Rng rng = make_rng(seed);
  std::vector<std::vector<int>> deps(n);
  std::vector<std::vector<double>> tables(n);
  const std::size_t table_size = std::size_t{1} << (k + 1);

  std::vector<int> pool;
  for (int j = 0; j < n; ++j) {
    pool.clear();
    for (int i = 0; i < n; ++i) {
      if (i != j) pool.push_back(i);
    }
    // Partial Fisher-Yates: the first k slots become a uniform k-subset in
    // uniform order.
    for (int i = 0; i < k; ++i) {
      const auto pick = i + static_cast<int>(uniform_index(rng, pool.size() - i));
      std::swap(pool[i], pool[pick]);
    }
    deps[j].assign(pool.begin(), pool.begin() + k);

    tables[j].resize(table_size);
    for (double& w : tables[j]) w = uniform01(rng);
  }
  return Landscape(n, k, seed, std::move(deps), std::move(tables));
}

double fitness(const Landscape& landscape, std::span<const Spin> d) {
  check_decisions(d, landscape.n());
  double sum = 0.0;
  for (int j = 0; j < landscape.n(); ++j) sum += landscape.contribution(j, d);
  return sum / landscape.n();
}

CompetenceMatrix::CompetenceMatrix(int m, int n, double p, std::uint64_t seed,
                                   std::vector<std::uint8_t> entries)
    : m_(m), n_(n), p_(p), seed_(seed), entries_(std::move(entries)) {
  require(m >= 1, "M must be positive");
  require(n >= 1, "N must be positive");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  require(entries_.size() == static_cast<std::size_t>(m) * n,
          "competence matrix must have M*N entries");
  known_count_.assign(m, 0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < n; ++j) {
      const auto e = entries_[static_cast<std::size_t>(k) * n + j];
      require(e == 0 || e == 1, "competence entries must be 0 or 1");
      known_count_[k] += e;
    }
  }
}

double CompetenceMatrix::density() const {
  const auto ones = std::accumulate(known_count_.begin(), known_count_.end(), 0);
  return static_cast<double>(ones) / static_cast<double>(entries_.size());
}

CompetenceMatrix generate_competence(int m, int n, double p, std::uint64_t seed) {
  require(m >= 1, "M must be positive");
  require(n >= 1, "N must be positive");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  Rng rng = make_rng(seed);
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(m) * n);
  for (auto& e : entries) e = bernoulli(rng, p) ? 1 : 0;
  return CompetenceMatrix(m, n, p, seed, std::move(entries));
}

double perceived_fitness(const Landscape& landscape, const CompetenceMatrix& competence,
                         int member, std::span<const Spin> d) {
  require(member >= 0 && member < competence.m(), "member index out of range");
  require(competence.n() == landscape.n(), "competence and landscape disagree on N");
  check_decisions(d, landscape.n());
  const int known = competence.known_count(member);
  if (known == 0) return 0.0;
  double sum = 0.0;
  for (int j = 0; j < landscape.n(); ++j) {
    if (competence.knows(member, j)) sum += landscape.contribution(j, d);
  }
  return sum / known;
}

DecisionVector decode_decisions(std::uint64_t code, int n) {
  DecisionVector d(n);
  for (int j = 0; j < n; ++j) d[j] = ((code >> j) & 1u) ? Spin{1} : Spin{-1};
  return d;
}

Optimum global_max(const Landscape& landscape) {
  const int n = landscape.n();
  if (n > kMaxEnumerableDecisions) {
    throw ParameterError("global_max enumerates 2^N vectors; N=" + std::to_string(n) +
                         " exceeds the limit of " + std::to_string(kMaxEnumerableDecisions));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  DecisionVector d(n, Spin{-1});
  std::uint64_t best_code = 0;
  double best = -1.0;
  for (std::uint64_t code = 0; code < count; ++code) {
    for (int j = 0; j < n; ++j) d[j] = ((code >> j) & 1u) ? Spin{1} : Spin{-1};
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += landscape.contribution(j, d);
    const double v = sum / n;
    if (v > best) {
      best = v;
      best_code = code;
    }
  }
  Optimum opt{decode_decisions(best_code, n), 0.0};
  opt.value = fitness(landscape, opt.decisions);
  return opt;
}

}  // namespace nkgroup
