#include "schottky/words.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"

namespace schottky {

int bar(int letter, int r) {
  if (r < 1 || letter < 1 || letter > 2 * r) {
    fail(ErrorCode::LetterOutOfRange, "letter " + std::to_string(letter) + " outside 1.." + std::to_string(2 * r));
  }
  return (letter - 1 + r) % (2 * r) + 1;
}

void check_letters(const Word& w, int r) {
  for (int a : w) {
    if (a < 1 || a > 2 * r) {
      fail(ErrorCode::LetterOutOfRange, "letter " + std::to_string(a) + " outside 1.." + std::to_string(2 * r));
    }
  }
}

bool is_admissible(const Word& w, int r) {
  check_letters(w, r);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i + 1] == bar(w[i], r)) return false;
  }
  return true;
}

Word mirror(const Word& w, int r) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[w.size() - 1 - i] = bar(w[i], r);
  return out;
}

std::string format_word(const Word& w, char separator) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += separator;
    out += std::to_string(w[i]);
  }
  return out;
}

Word parse_word(const std::string& text) {
  Word w;
  std::string token;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ' || ch == ';') {
      if (!token.empty()) {
        try {
          w.push_back(std::stoi(token));
        } catch (const std::exception&) {
          fail(ErrorCode::InvalidArgument, "bad letter '" + token + "'");
        }
        token.clear();
      }
    } else {
      token += ch;
    }
  }
  return w;
}

Mat2 group_element(const Word& w, const SchottkyData& g) {
  check_letters(w, g.r);
  Mat2 m = Mat2::identity();
  for (int a : w) m = m * g.generator(a);
  return m;
}

double image_length(const Mat2& m, double x1, double x2) {
  const double d1 = m.c * x1 + m.d;
  const double d2 = m.c * x2 + m.d;
  return std::abs(x2 - x1) * std::abs(m.det()) / std::abs(d1 * d2);
}

Interval interval(const Word& w, const SchottkyData& g) {
  if (w.empty()) fail(ErrorCode::InvalidArgument, "interval of the empty word");
  const Word prefix(w.begin(), w.end() - 1);
  const Mat2 m = group_element(prefix, g);
  const double x1 = g.center(w.back()) - g.radius(w.back());
  const double x2 = g.center(w.back()) + g.radius(w.back());
  const double y1 = m.apply(Complex(x1)).real();
  const double y2 = m.apply(Complex(x2)).real();
  return {std::min(y1, y2), std::max(y1, y2), image_length(m, x1, x2)};
}

namespace {

struct PartitionSearch {
  const SchottkyData& g;
  double tau;
  int max_depth;
  std::vector<PartitionEntry>& out;
  Word word;

  // `prefix` is gamma_w for the current word w, whose own length exceeds tau.
  void descend(const Mat2& prefix) {
    if (static_cast<int>(word.size()) >= max_depth) {
      fail(ErrorCode::DepthExceeded, "partition branch deeper than " + std::to_string(max_depth) + " letters");
    }
    const int forbidden = bar(word.back(), g.r);
    for (int b = 1; b <= g.alphabet_size(); ++b) {
      if (b == forbidden) continue;
      const double len = image_length(prefix, g.center(b) - g.radius(b), g.center(b) + g.radius(b));
      word.push_back(b);
      if (len <= tau) {
        out.push_back({word, len});
      } else {
        descend(prefix * g.generator(b));
      }
      word.pop_back();
    }
  }
};

}  // namespace

std::vector<PartitionEntry> partition(double tau, const SchottkyData& g, int max_depth) {
  if (!(tau > 0.0)) fail(ErrorCode::TauNonPositive, "tau must be positive");
  std::vector<PartitionEntry> out;
  PartitionSearch search{g, tau, max_depth, out, {}};
  for (int a = 1; a <= g.alphabet_size(); ++a) {
    const double len = 2.0 * g.radius(a);
    search.word = {a};
    if (len <= tau) {
      out.push_back({{a}, len});
    } else {
      search.descend(g.generator(a));
    }
  }
  return out;
}

std::vector<PartitionEntry> mirror_partition(double tau, const SchottkyData& g, int max_depth) {
  auto entries = partition(tau, g, max_depth);
  for (auto& e : entries) {
    e.letters = mirror(e.letters, g.r);
    e.upsilon = interval(e.letters, g).length;
  }
  return entries;
}

std::string partition_csv(const std::vector<PartitionEntry>& entries) {
  std::ostringstream os;
  os.precision(17);
  os << "letters;upsilon;length\n";
  for (const auto& e : entries) os << format_word(e.letters, ',') << ';' << e.upsilon << ';' << e.letters.size() << '\n';
  return os.str();
}

Word multiply_reduced(const Word& x, const Word& y, int r) {
  Word out = x;
  std::size_t i = 0;
  while (i < y.size() && !out.empty() && out.back() == bar(y[i], r)) {
    out.pop_back();
    ++i;
  }
  out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(i), y.end());
  return out;
}

Word reduce(const Word& w, int r) {
  Word out;
  for (int a : w) {
    if (!out.empty() && out.back() == bar(a, r)) {
      out.pop_back();
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::optional<PowerDecomposition> proper_power_decomposition(const Word& x, int r) {
  const Word w = reduce(x, r);
  if (w.empty()) return std::nullopt;
  // Cyclic reduction w = u v u^{-1}.
  std::size_t peel = 0;
  while (2 * peel + 1 < w.size() && w[peel] == bar(w[w.size() - 1 - peel], r)) ++peel;
  const Word core(w.begin() + static_cast<std::ptrdiff_t>(peel), w.end() - static_cast<std::ptrdiff_t>(peel));
  const std::size_t n = core.size();
  // Failure function; the minimal period is n - border.
  std::vector<std::size_t> border(n + 1, 0);
  for (std::size_t i = 1, k = 0; i < n; ++i) {
    while (k > 0 && core[i] != core[k]) k = border[k];
    if (core[i] == core[k]) ++k;
    border[i + 1] = k;
  }
  const std::size_t period = n - border[n];
  if (period == n || n % period != 0) return std::nullopt;
  Word root(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(peel));
  root.insert(root.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(period));
  root.insert(root.end(), w.end() - static_cast<std::ptrdiff_t>(peel), w.end());
  return PowerDecomposition{reduce(root, r), static_cast<int>(n / period)};
}

int divisor_count(int q) {
  int count = 0;
  for (int k = 1; k <= q; ++k) count += (q % k == 0);
  return count;
}

PowerPairKey pair_decomposition(const Word& a, const Word& b, int q) {
  PowerPairKey key;
  const std::size_t shorter = std::min(a.size(), b.size());
  std::size_t L = 0;
  while (L < shorter && a[L] == b[L]) ++L;
  std::size_t R = 0;
  while (R < shorter - L && a[a.size() - 1 - R] == b[b.size() - 1 - R]) ++R;
  key.L = static_cast<int>(L);
  key.R = static_cast<int>(R);
  key.M1 = static_cast<int>(a.size() - L - R);
  key.M2 = static_cast<int>(b.size() - L - R);
  key.q = q;
  return key;
}

PowerPairsReport power_pairs(double tau, const SchottkyData& g, std::size_t cap) {
  PowerPairsReport report;
  report.tau = tau;
  report.members = mirror_partition(tau, g);
  const std::size_t size = report.members.size();
  if (size > cap) {
    fail(ErrorCode::CapExceeded, "|Zbar(tau)| = " + std::to_string(size) + " exceeds cap " + std::to_string(cap));
  }
  std::vector<Word> prefixes, inverse_prefixes;
  for (const auto& m : report.members) {
    prefixes.emplace_back(m.letters.begin(), m.letters.end() - 1);
    inverse_prefixes.push_back(mirror(prefixes.back(), g.r));
  }
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const Word x = multiply_reduced(prefixes[i], inverse_prefixes[j], g.r);
      if (x.empty()) {
        ++report.identity_count;
        continue;
      }
      const auto power = proper_power_decomposition(x, g.r);
      if (!power) {
        ++report.other_count;
        continue;
      }
      ++report.power_count;
      const PowerPairKey key = pair_decomposition(prefixes[i], prefixes[j], power->q);
      report.power_pairs.push_back({i, j, key});
      ++report.histogram[key];
    }
  }
  return report;
}

double uni_distance(const Word& a, const Word& b, const SchottkyData& g, int grid_points) {
  if (a.empty() || b.empty() || a.back() != b.back()) {
    fail(ErrorCode::MismatchedTerminalLetter, "words must end in the same letter");
  }
  if (grid_points < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
  const Mat2 ga = group_element(a, g);
  const Mat2 gb = group_element(b, g);
  const int j = a.back();
  const double lo = g.center(j) - g.radius(j);
  const double step = 2.0 * g.radius(j) / (grid_points - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_points; ++k) {
    const Complex x(lo + step * k);
    const double diff = std::abs(mobius_jet(ga, x).log_second - mobius_jet(gb, x).log_second);
    best = std::min(best, diff);
  }
  return best;
}

void for_each_word(int r, int max_length, const std::function<void(const Word&)>& visit) {
  Word w;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(w.size()) == max_length) return;
    for (int a = 1; a <= 2 * r; ++a) {
      if (!w.empty() && a == bar(w.back(), r)) continue;
      w.push_back(a);
      visit(w);
      rec();
      w.pop_back();
    }
  };
  rec();
}

std::vector<Word> all_reduced_words(int r, int max_length) {
  std::vector<Word> out{Word{}};
  for_each_word(r, max_length, [&](const Word& w) { out.push_back(w); });
  return out;
}

namespace {

std::uint64_t encode(const Word& w, std::size_t begin, std::size_t end, int r) {
  std::uint64_t key = 0;
  for (std::size_t i = begin; i < end; ++i) key = key * static_cast<std::uint64_t>(2 * r + 1) + static_cast<std::uint64_t>(w[i]);
  return key;
}

double ratio_spread(double x) { return std::max(x, 1.0 / x); }

}  // namespace

EstimatedConstants estimate_constants(int depth, const SchottkyData& g, double delta) {
  if (depth > 12) fail(ErrorCode::DepthExceeded, "estimate_constants depth is capped at 12");
  if (depth < 2) fail(ErrorCode::InvalidArgument, "estimate_constants needs depth >= 2");
  const int r = g.r;
  EstimatedConstants out;
  out.depth = depth;

  // Sample points of each closed disk: center and 16 boundary points.
  std::vector<std::vector<Complex>> samples(g.alphabet_size() + 1);
  for (int b = 1; b <= g.alphabet_size(); ++b) {
    samples[b].push_back(g.center(b));
    for (int k = 0; k < 16; ++k) {
      samples[b].push_back(g.center(b) + g.radius(b) * std::polar(1.0, 2.0 * std::numbers::pi * k / 16.0));
    }
  }

  std::unordered_map<std::uint64_t, double> upsilon;
  std::vector<double> max_deriv(depth + 1, 0.0), min_deriv(depth + 1, std::numeric_limits<double>::infinity());

  Word w;
  std::vector<Mat2> prefix{Mat2::identity()};  // prefix[k] = gamma of the first k letters
  std::function<void()> rec = [&]() {
    for (int a = 1; a <= g.alphabet_size(); ++a) {
      if (!w.empty() && a == bar(w.back(), r)) continue;
      w.push_back(a);
      const Mat2& parent = prefix.back();
      const double len = image_length(parent, g.center(a) - g.radius(a), g.center(a) + g.radius(a));
      upsilon[encode(w, 0, w.size(), r)] = len;
      // K0: |gamma'_{w'}(x)| / Upsilon_w for x in D_{w_n}.
      for (const Complex& x : samples[a]) {
        out.K0 = std::max(out.K0, ratio_spread(std::abs(mobius_jet(parent, x).first) / len));
      }
      prefix.push_back(parent * g.generator(a));
      // Contraction: |gamma'_w(x)| for x in D_b with w -> b.
      const std::size_t n = w.size();
      for (int b = 1; b <= g.alphabet_size(); ++b) {
        if (b == bar(a, r)) continue;
        for (const Complex& x : samples[b]) {
          const double d = std::abs(mobius_jet(prefix.back(), x).first);
          max_deriv[n] = std::max(max_deriv[n], d);
          min_deriv[n] = std::min(min_deriv[n], d);
        }
      }
      if (static_cast<int>(w.size()) < depth) rec();
      prefix.pop_back();
      w.pop_back();
    }
  };
  rec();

  auto lookup = [&](const Word& word, std::size_t begin, std::size_t end) {
    return upsilon.at(encode(word, begin, end, r));
  };

  for_each_word(r, depth, [&](const Word& word) {
    const std::size_t n = word.size();
    const double self = lookup(word, 0, n);
    out.K3 = std::max(out.K3, ratio_spread(self / upsilon.at(encode(mirror(word, r), 0, n, r))));
    for (std::size_t k = 1; k < n; ++k) {
      // a -> b with w = ab.
      out.K2 = std::max(out.K2, ratio_spread(self / (lookup(word, 0, k) * lookup(word, k, n))));
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      // a ~> b with w = a'b, a = w[0..k], b = w[k..n).
      out.K2 = std::max(out.K2, ratio_spread(self / (lookup(word, 0, k + 1) * lookup(word, k, n))));
    }
  });

  out.theta = std::pow(max_deriv[depth], 1.0 / depth);
  out.theta_bar = std::pow(min_deriv[depth], 1.0 / depth);
  for (int n = 1; n <= depth; ++n) {
    out.C = std::max({out.C, max_deriv[n] / std::pow(out.theta, n), std::pow(out.theta_bar, n) / min_deriv[n]});
  }

  // tau probes: 10^{-k/8}, kept while every Z-bar member has length <= depth.
  out.D = std::max({1.0 / std::log(1.0 / out.theta), std::log(1.0 / out.theta_bar), 1.0});
  out.kappa = 0.0;
  for (int k = 0;; ++k) {
    const double tau = std::pow(10.0, -k / 8.0);
    const auto members = partition(tau, g);
    std::size_t longest = 0, shortest = std::numeric_limits<std::size_t>::max();
    for (const auto& m : members) {
      longest = std::max(longest, m.letters.size());
      shortest = std::min(shortest, m.letters.size());
    }
    if (static_cast<int>(longest) > depth) break;
    // Members have length >= 2 exactly when tau < min 2 r_a, a monotone condition.
    if (shortest >= 2 && out.tau0 == 0.0) out.tau0 = tau;
    out.taus.push_back(tau);
    const double log_inv = std::log(1.0 / tau);
    for (const auto& m : members) {
      const Word bar_word = mirror(m.letters, r);
      const double len = lookup(bar_word, 0, bar_word.size());
      out.K1 = std::max(out.K1, ratio_spread(len / tau));
      const double size = static_cast<double>(m.letters.size());
      out.kappa = std::max({out.kappa, size - out.D * log_inv, log_inv / out.D - size});
    }
    out.C2 = std::max(out.C2, ratio_spread(static_cast<double>(members.size()) * std::pow(tau, delta)));
  }
  return out;
}

nlohmann::json constants_to_json(const EstimatedConstants& c) {
  auto entry = [&](double v) { return nlohmann::json{{"estimate", v}, {"depth", c.depth}}; };
  return {{"K0", entry(c.K0)},       {"K1", entry(c.K1)},     {"K2", entry(c.K2)},
          {"K3", entry(c.K3)},       {"C", entry(c.C)},       {"theta", entry(c.theta)},
          {"theta_bar", entry(c.theta_bar)}, {"C2", entry(c.C2)}, {"D", entry(c.D)},
          {"kappa", entry(c.kappa)}, {"tau0", entry(c.tau0)}};
}

}  // namespace schottky
