#include <algorithm>
#include <cmath>
#include <limits>

#include "schottky/error.hpp"
#include "schottky/zeta.hpp"

namespace schottky {

namespace {

// Least rotation of w (naive, words are short).
Word least_rotation(const Word& w) {
  Word best = w;
  Word rotated = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    if (rotated < best) best = rotated;
  }
  return best;
}

// Depth-first generation of Lyndon words that are cyclically reduced, using the
// Fredricksen-Kessler-Maiorana prenecklace recursion to prune.
class LyndonEnumerator {
 public:
  LyndonEnumerator(const SchottkyData& g, int max_len, GeodesicConvention convention)
      : g_(g), max_len_(max_len), convention_(convention) {}

  void run(std::vector<double>& lengths, double& min_abs_trace) {
    lengths_ = &lengths;
    min_trace_ = std::numeric_limits<double>::infinity();
    word_.clear();
    products_.assign(1, Mat2::identity());
    extend(0);
    min_abs_trace = min_trace_;
  }

 private:
  void extend(int period) {
    const int t = static_cast<int>(word_.size());
    if (t > 0 && period == t) visit();
    if (t == max_len_) return;
    for (int x = 1; x <= g_.alphabet_size(); ++x) {
      if (t > 0 && x == bar(word_.back(), g_.r)) continue;
      int next_period;
      if (t == 0) {
        next_period = 1;
      } else {
        const int ref = word_[static_cast<std::size_t>(t - period)];
        if (x < ref) continue;
        next_period = x == ref ? period : t + 1;
      }
      word_.push_back(x);
      products_.push_back(products_.back() * g_.generator(x));
      extend(next_period);
      products_.pop_back();
      word_.pop_back();
    }
  }

  void visit() {
    if (word_.size() > 1 && word_.back() == bar(word_.front(), g_.r)) return;
    if (convention_ == GeodesicConvention::Paired) {
      if (least_rotation(mirror(word_, g_.r)) < word_) return;
    }
    const double trace = std::abs(products_.back().trace());
    if (!(trace > 2.0)) fail(ErrorCode::InvalidGroup, "non-hyperbolic class " + format_word(word_));
    min_trace_ = std::min(min_trace_, trace);
    lengths_->push_back(2.0 * std::acosh(0.5 * trace));
  }

  const SchottkyData& g_;
  int max_len_;
  GeodesicConvention convention_;
  Word word_;
  std::vector<Mat2> products_;
  std::vector<double>* lengths_ = nullptr;
  double min_trace_ = 0.0;
};

}  // namespace

std::vector<double> primitive_lengths(const SchottkyData& g, int max_word_len, GeodesicConvention convention) {
  if (max_word_len < 1) fail(ErrorCode::InvalidArgument, "max_word_len must be >= 1");
  std::vector<double> lengths;
  double min_trace = 0.0;
  LyndonEnumerator(g, max_word_len, convention).run(lengths, min_trace);
  return lengths;
}

Complex euler_product_from_lengths(Complex s, const std::vector<double>& lengths, int k_max) {
  Complex log_sum = 0.0;
  for (const double l : lengths) {
    for (int k = 0; k <= k_max; ++k) {
      const Complex q = std::exp(-(s + static_cast<double>(k)) * l);
      if (std::abs(q) < 1e-18) break;
      log_sum += std::log(1.0 - q);
    }
  }
  return std::exp(log_sum);
}

Complex euler_product_zeta(Complex s, const SchottkyData& g, int max_word_len, int k_max,
                           GeodesicConvention convention, std::optional<double> delta, EulerProductStats* stats) {
  if (delta && !(s.real() > *delta + 0.1)) {
    fail(ErrorCode::ConvergenceRegionViolated, "Euler product needs Re s > delta + 0.1");
  }
  if (k_max < 0) fail(ErrorCode::InvalidArgument, "k_max must be >= 0");
  std::vector<double> lengths;
  double min_trace = 0.0;
  LyndonEnumerator(g, max_word_len, convention).run(lengths, min_trace);
  if (stats) {
    stats->classes = lengths.size();
    stats->shortest_length = lengths.empty() ? 0.0 : *std::min_element(lengths.begin(), lengths.end());
    stats->min_abs_trace = min_trace;
  }
  return euler_product_from_lengths(s, lengths, k_max);
}

}  // namespace schottky
