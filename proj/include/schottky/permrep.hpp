#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "schottky/words.hpp"

namespace schottky {

/// perm[i] is the image of i (0-based).
using Permutation = std::vector<int>;

Permutation identity_permutation(int n);
Permutation inverse(const Permutation& p);
/// (p o q)(i) = p(q(i)).
Permutation compose(const Permutation& p, const Permutation& q);
int fixed_points(const Permutation& p);

/// A homomorphism Gamma -> S_n fixed by the images of gamma_1..gamma_r.
/// Images of the barred letters are the inverse permutations, applied on the fly.
struct PermutationRep {
  int n = 1;
  int r = 2;
  std::uint64_t seed = 0;
  std::vector<Permutation> images;
};

/// r independent uniform permutations; image a is drawn from the stream keyed (seed, a).
PermutationRep sample_rep(int n, int r, std::uint64_t seed);
/// All generators map to the identity (n disjoint copies of the base surface).
PermutationRep identity_rep(int n, int r);

/// act(w) = phi(w_1) o phi(w_2) o ... o phi(w_k); act of the empty word is the identity.
Permutation act(const PermutationRep& rep, const Word& w);
/// Fixed points of act(w) minus one.
int character_std0(const PermutationRep& rep, const Word& w);
bool is_transitive(const PermutationRep& rep);

nlohmann::json rep_to_json(const PermutationRep& rep);
PermutationRep rep_from_json(const nlohmann::json& j);

/// Upper bound on |E_n Tr rho_n^0(x)| for reduced x of length t, valid when n > t^2.
/// Throws HypothesisViolated when n <= t^2.
double bsp_bound(const Word& x, int n, int r);

enum class TraceMode { MonteCarlo, Exhaustive };

struct TraceEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  TraceMode mode = TraceMode::MonteCarlo;
  /// Exhaustive mode: exact sum of characters over all tuples (mean = sum / trials).
  long long exact_sum = 0;
};

/// Exhaustive mode requires (n!)^r <= 1e7. Monte Carlo trial t uses sample_rep(n, r, derive_seed(seed, t)).
TraceEstimate expected_trace(const Word& x, int n, int r, TraceMode mode, std::size_t trials, std::uint64_t seed);

/// Exact character sums over all r-tuples of S_n for a batch of words, one pass over the tuples.
std::vector<long long> exhaustive_character_sums(std::span<const Word> words, int n, int r,
                                                 std::size_t* tuple_count = nullptr);

}  // namespace schottky
