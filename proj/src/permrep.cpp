#include "schottky/permrep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/random.hpp"

namespace schottky {

Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation inverse(const Permutation& p) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return out;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[static_cast<std::size_t>(q[i])];
  return out;
}

int fixed_points(const Permutation& p) {
  int count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) count += (p[i] == static_cast<int>(i));
  return count;
}

PermutationRep sample_rep(int n, int r, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "degree n must be >= 1");
  if (r < 1) fail(ErrorCode::InvalidArgument, "rank r must be >= 1");
  PermutationRep rep{n, r, seed, {}};
  for (int a = 0; a < r; ++a) {
    CounterRng rng(seed, static_cast<std::uint64_t>(a));
    Permutation p = identity_permutation(n);
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    rep.images.push_back(std::move(p));
  }
  return rep;
}

PermutationRep identity_rep(int n, int r) {
  PermutationRep rep{n, r, 0, {}};
  for (int a = 0; a < r; ++a) rep.images.push_back(identity_permutation(n));
  return rep;
}

namespace {

// Image of point i under the generator for letter a (barred letters use the inverse).
struct LetterAction {
  std::vector<Permutation> table;  // index a - 1

  explicit LetterAction(const PermutationRep& rep) {
    for (const auto& p : rep.images) table.push_back(p);
    for (const auto& p : rep.images) table.push_back(inverse(p));
  }
  const Permutation& operator()(int letter) const { return table[static_cast<std::size_t>(letter - 1)]; }
};

}  // namespace

Permutation act(const PermutationRep& rep, const Word& w) {
  check_letters(w, rep.r);
  const LetterAction letters(rep);
  Permutation out = identity_permutation(rep.n);
  for (int i = 0; i < rep.n; ++i) {
    int x = i;
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = letters(*it)[static_cast<std::size_t>(x)];
    out[static_cast<std::size_t>(i)] = x;
  }
  return out;
}

int character_std0(const PermutationRep& rep, const Word& w) { return fixed_points(act(rep, w)) - 1; }

bool is_transitive(const PermutationRep& rep) {
  std::vector<int> parent(static_cast<std::size_t>(rep.n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = rep.n;
  for (const auto& p : rep.images) {
    for (int i = 0; i < rep.n; ++i) {
      const int a = find(i), b = find(p[static_cast<std::size_t>(i)]);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        --components;
      }
    }
  }
  return components == 1;
}

nlohmann::json rep_to_json(const PermutationRep& rep) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& p : rep.images) {
    std::vector<int> one_based(p.size());
    std::transform(p.begin(), p.end(), one_based.begin(), [](int x) { return x + 1; });
    images.push_back(one_based);
  }
  return {{"n", rep.n}, {"seed", rep.seed}, {"images", images}};
}

PermutationRep rep_from_json(const nlohmann::json& j) {
  try {
    PermutationRep rep;
    rep.n = j.at("n").get<int>();
    rep.seed = j.value("seed", std::uint64_t{0});
    for (const auto& img : j.at("images")) {
      auto p = img.get<std::vector<int>>();
      if (static_cast<int>(p.size()) != rep.n) fail(ErrorCode::InvalidArgument, "image has wrong degree");
      for (auto& x : p) --x;
      auto sorted = p;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != identity_permutation(rep.n)) fail(ErrorCode::InvalidArgument, "image is not a permutation");
      rep.images.push_back(std::move(p));
    }
    rep.r = static_cast<int>(rep.images.size());
    return rep;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed rep JSON: ") + e.what());
  }
}

double bsp_bound(const Word& x, int n, int r) {
  const Word w = reduce(x, r);
  const double t = static_cast<double>(w.size());
  if (static_cast<double>(n) <= t * t) {
    fail(ErrorCode::HypothesisViolated, "need n > t^2 (n = " + std::to_string(n) + ", t = " + std::to_string(w.size()) + ")");
  }
  if (w.empty()) return n - 1.0;
  const double tail = std::pow(t, 4) / (n - t * t);
  if (const auto power = proper_power_decomposition(w, r)) return divisor_count(power->q) - 1.0 + tail;
  return tail;
}

std::vector<long long> exhaustive_character_sums(std::span<const Word> words, int n, int r, std::size_t* tuple_count) {
  double total = 1.0;
  for (int k = 2; k <= n; ++k) total *= k;
  total = std::pow(total, r);
  if (total > 1e7) fail(ErrorCode::ExhaustiveTooLarge, "(n!)^r exceeds 1e7");
  for (const auto& w : words) check_letters(w, r);

  std::vector<Permutation> all;
  Permutation p = identity_permutation(n);
  do {
    all.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::vector<Permutation> all_inverse;
  for (const auto& q : all) all_inverse.push_back(inverse(q));

  std::vector<long long> sums(words.size(), 0);
  std::vector<std::size_t> index(static_cast<std::size_t>(r), 0);
  std::vector<const Permutation*> table(static_cast<std::size_t>(2 * r));
  std::size_t tuples = 0;
  while (true) {
    for (int a = 0; a < r; ++a) {
      table[static_cast<std::size_t>(a)] = &all[index[static_cast<std::size_t>(a)]];
      table[static_cast<std::size_t>(a + r)] = &all_inverse[index[static_cast<std::size_t>(a)]];
    }
    for (std::size_t k = 0; k < words.size(); ++k) {
      const Word& w = words[k];
      int fixed = 0;
      for (int i = 0; i < n; ++i) {
        int x = i;
        for (auto it = w.rbegin(); it != w.rend(); ++it) x = (*table[static_cast<std::size_t>(*it - 1)])[static_cast<std::size_t>(x)];
        fixed += (x == i);
      }
      sums[k] += fixed - 1;
    }
    ++tuples;
    int a = 0;
    while (a < r && ++index[static_cast<std::size_t>(a)] == all.size()) {
      index[static_cast<std::size_t>(a)] = 0;
      ++a;
    }
    if (a == r) break;
  }
  if (tuple_count) *tuple_count = tuples;
  return sums;
}

TraceEstimate expected_trace(const Word& x, int n, int r, TraceMode mode, std::size_t trials, std::uint64_t seed) {
  TraceEstimate est;
  est.mode = mode;
  if (mode == TraceMode::Exhaustive) {
    std::size_t tuples = 0;
    const std::vector<Word> one{x};
    est.exact_sum = exhaustive_character_sums(one, n, r, &tuples).front();
    est.trials = tuples;
    est.mean = static_cast<double>(est.exact_sum) / static_cast<double>(tuples);
    est.standard_error = 0.0;
    return est;
  }
  if (trials < 2) fail(ErrorCode::InvalidArgument, "Monte Carlo needs at least two trials");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto rep = sample_rep(n, r, derive_seed(seed, t));
    const double value = character_std0(rep, x);
    sum += value;
    sum_sq += value * value;
  }
  const double count = static_cast<double>(trials);
  est.trials = trials;
  est.mean = sum / count;
  const double variance = std::max(0.0, (sum_sq - count * est.mean * est.mean) / (count - 1.0));
  est.standard_error = std::sqrt(variance / count);
  return est;
}

}  // namespace schottky
