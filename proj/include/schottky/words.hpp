#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "schottky/group.hpp"

namespace schottky {

/// A sequence of 1-based letters. Inverses are the barred letters, so the same
/// type encodes admissible words and freely reduced group elements.
using Word = std::vector<int>;

int bar(int letter, int r);
bool is_admissible(const Word& w, int r);
/// Throws LetterOutOfRange if any letter is outside {1..2r}.
void check_letters(const Word& w, int r);

Word mirror(const Word& w, int r);
std::string format_word(const Word& w, char separator = ',');
Word parse_word(const std::string& text);

Mat2 group_element(const Word& w, const SchottkyData& g);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  /// Computed from the derivative identity |g(x)-g(y)| = |x-y| sqrt(g'(x) g'(y)),
  /// which stays accurate when the endpoints nearly coincide.
  double length = 0.0;
};

/// I_w = gamma_{w'}(I_{w_n}) for |w| >= 1.
Interval interval(const Word& w, const SchottkyData& g);

/// |g(x2) - g(x1)| for a real Moebius map g and real x1 < x2 outside the pole.
double image_length(const Mat2& m, double x1, double x2);

struct PartitionEntry {
  Word letters;
  double upsilon = 0.0;
};

/// Z(tau): depth-first, emits the first word on each branch with Upsilon <= tau.
/// Single letters have parent length +infinity. Output is in DFS order.
std::vector<PartitionEntry> partition(double tau, const SchottkyData& g, int max_depth = 64);
/// Z-bar(tau): elementwise mirror of Z(tau); upsilon is recomputed for the mirrored word.
std::vector<PartitionEntry> mirror_partition(double tau, const SchottkyData& g, int max_depth = 64);

/// CSV with ';' separated columns letters;upsilon;length, letters joined by ','.
std::string partition_csv(const std::vector<PartitionEntry>& entries);

/// Free product with cancellation of adjacent (x, bar x) pairs.
Word multiply_reduced(const Word& x, const Word& y, int r);
Word reduce(const Word& w, int r);

struct PowerDecomposition {
  Word root;
  int q = 0;
};

/// x = root^q with q >= 2 maximal, or nullopt for the identity and non-powers.
std::optional<PowerDecomposition> proper_power_decomposition(const Word& x, int r);

/// Number of divisors of q.
int divisor_count(int q);

enum class PairClass { Identity, Power, Other };

struct PowerPairKey {
  int L = 0, M1 = 0, M2 = 0, R = 0, q = 0;
  auto operator<=>(const PowerPairKey&) const = default;
};

struct PowerPairEntry {
  std::size_t a = 0;  // indices into the Z-bar member list
  std::size_t b = 0;
  PowerPairKey key;
};

struct PowerPairsReport {
  double tau = 0.0;
  std::vector<PartitionEntry> members;  // Z-bar(tau)
  std::size_t identity_count = 0;
  std::size_t power_count = 0;
  std::size_t other_count = 0;
  std::vector<PowerPairEntry> power_pairs;
  std::map<PowerPairKey, std::size_t> histogram;
};

/// Classifies all (a, b) in Z-bar(tau)^2 by gamma_{a'} gamma_{b'}^{-1}.
/// Throws CapExceeded when |Z-bar(tau)| > cap.
PowerPairsReport power_pairs(double tau, const SchottkyData& g, std::size_t cap = 20000);

/// Common prefix length L, common suffix length R of the remainders, M1/M2 the middles.
PowerPairKey pair_decomposition(const Word& a_prefix, const Word& b_prefix, int q);

/// min over a grid on closed I_j of |gamma_a''/gamma_a' - gamma_b''/gamma_b'|.
double uni_distance(const Word& a, const Word& b, const SchottkyData& g, int grid_points = 256);

struct EstimatedConstants {
  int depth = 0;
  double K0 = 1.0;  // Upsilon vs |gamma'_{a'}| on D_{a_n}
  double K1 = 1.0;  // Upsilon vs tau on Z-bar(tau)
  double K2 = 1.0;  // coarse multiplicativity
  double K3 = 1.0;  // mirror ratio
  double C = 1.0;   // contraction constant
  double theta = 0.0;
  double theta_bar = 0.0;
  double C2 = 1.0;  // |Z-bar(tau)| vs tau^{-delta}
  double D = 1.0;   // word-length window slope
  double kappa = 0.0;
  double tau0 = 0.0;  // largest probed tau with Z-bar(tau) inside words of length >= 2
  std::vector<double> taus;  // probe values used for K1, C2, D, kappa
};

/// Sup/inf of the defining ratios over all words of length <= depth (depth <= 12).
/// K1, C2, D, kappa use the tau probes whose Z-bar members all have length <= depth.
EstimatedConstants estimate_constants(int depth, const SchottkyData& g, double delta);

nlohmann::json constants_to_json(const EstimatedConstants& c);

/// Calls visit(word) for every admissible word with 1 <= |w| <= max_length in DFS order.
void for_each_word(int r, int max_length, const std::function<void(const Word&)>& visit);

/// All reduced words of length <= max_length, including the empty word, in DFS order.
std::vector<Word> all_reduced_words(int r, int max_length);

}  // namespace schottky
