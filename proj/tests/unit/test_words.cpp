#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "schottky/error.hpp"
#include "schottky/words.hpp"

using namespace schottky;

namespace {

Word random_word(std::mt19937_64& rng, int r, int length) {
  Word w;
  std::uniform_int_distribution<int> letter(1, 2 * r);
  while (static_cast<int>(w.size()) < length) {
    const int a = letter(rng);
    if (!w.empty() && a == bar(w.back(), r)) continue;
    w.push_back(a);
  }
  return w;
}

Word power_of(const Word& root, int q, int r) {
  Word out;
  for (int k = 0; k < q; ++k) out = multiply_reduced(out, root, r);
  return out;
}

}  // namespace

TEST_CASE("bar is the involution a -> a + r mod 2r") {
  CHECK(bar(1, 2) == 3);
  CHECK(bar(3, 2) == 1);
  CHECK(bar(2, 2) == 4);
  CHECK(bar(4, 2) == 2);
  for (int a = 1; a <= 6; ++a) CHECK(bar(bar(a, 3), 3) == a);
  CHECK_THROWS_AS(bar(5, 2), Error);
  CHECK_THROWS_AS(bar(0, 2), Error);
}

TEST_CASE("mirror reverses and bars") {
  CHECK(mirror({1, 2}, 2) == Word{4, 3});
  CHECK(mirror({}, 2).empty());
  const SchottkyData g = reference_group();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Word w = random_word(rng, 2, 1 + i % 8);
    CHECK(mirror(mirror(w, 2), 2) == w);
    CHECK(projective_distance(group_element(mirror(w, 2), g) * group_element(w, g), Mat2::identity()) < 1e-8);
  }
}

TEST_CASE("group elements of short words") {
  const SchottkyData g = reference_group();
  CHECK(projective_distance(group_element({}, g), Mat2::identity()) == 0.0);
  CHECK(projective_distance(group_element({1}, g), g.generator(1)) == 0.0);
  CHECK(std::abs(group_element({1, 2}, g).trace()) > 2.0);
}

TEST_CASE("word to matrix is injective on short words") {
  const SchottkyData g = reference_group();
  const auto words = all_reduced_words(2, 5);
  std::vector<Mat2> mats;
  for (const auto& w : words) mats.push_back(group_element(w, g));
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) REQUIRE(projective_distance(mats[i], mats[j]) > 1e-6);
}

TEST_CASE("intervals nest and shrink") {
  const SchottkyData g = reference_group();
  const Interval i1 = interval({1}, g);
  CHECK(i1.lo == doctest::Approx(-3.5));
  CHECK(i1.hi == doctest::Approx(-2.5));
  CHECK(i1.length == doctest::Approx(1.0));
  const Interval i12 = interval({1, 2}, g);
  CHECK(i12.lo > i1.lo);
  CHECK(i12.hi < i1.hi);
  CHECK(i12.length <= i1.length);
  CHECK(i12.length == doctest::Approx(i12.hi - i12.lo).epsilon(1e-12));

  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    Word w = random_word(rng, 2, 1 + i % 9);
    const double parent = interval(w, g).length;
    for (int b = 1; b <= 4; ++b) {
      if (b == bar(w.back(), 2)) continue;
      Word child = w;
      child.push_back(b);
      CHECK(interval(child, g).length <= parent);
    }
  }
}

TEST_CASE("partition at large tau is the alphabet") {
  const SchottkyData g = reference_group();
  const auto z = partition(1.0, g);
  REQUIRE(z.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(z[i].letters == Word{static_cast<int>(i) + 1});
  CHECK_THROWS_AS(partition(0.0, g), Error);
  CHECK_THROWS_AS(partition(1e-6, g, 3), Error);
}

TEST_CASE("partition members satisfy the defining predicate and the prefix property") {
  const SchottkyData g = reference_group();
  const double tau = 1e-3;
  const auto z = partition(tau, g);
  std::set<Word> members;
  std::size_t longest = 0;
  for (const auto& e : z) {
    CHECK(e.upsilon <= tau);
    CHECK(e.upsilon == doctest::Approx(interval(e.letters, g).length).epsilon(1e-12));
    if (e.letters.size() > 1) {
      const Word parent(e.letters.begin(), e.letters.end() - 1);
      CHECK(interval(parent, g).length > tau);
    }
    members.insert(e.letters);
    longest = std::max(longest, e.letters.size());
  }
  // Every word of length longest + 1 has exactly one member as a prefix.
  for_each_word(2, static_cast<int>(longest) + 1, [&](const Word& w) {
    if (w.size() != longest + 1) return;
    int hits = 0;
    for (std::size_t k = 1; k <= w.size(); ++k) hits += members.count(Word(w.begin(), w.begin() + k));
    REQUIRE(hits == 1);
  });
}

TEST_CASE("mirror partition is the elementwise mirror") {
  const SchottkyData g = reference_group();
  const auto z = partition(1e-3, g);
  const auto zbar = mirror_partition(1e-3, g);
  REQUIRE(z.size() == zbar.size());
  std::set<Word> a, b;
  for (const auto& e : z) a.insert(e.letters);
  for (const auto& e : zbar) {
    b.insert(mirror(e.letters, 2));
    CHECK(e.letters.size() >= 2);
    CHECK(e.upsilon == doctest::Approx(interval(e.letters, g).length).epsilon(1e-12));
  }
  CHECK(a == b);
}

TEST_CASE("partition CSV layout") {
  const auto csv = partition_csv(partition(1.0, reference_group()));
  CHECK(csv.rfind("letters;upsilon;length\n1;1;1\n", 0) == 0);
}

TEST_CASE("free reduction") {
  CHECK(multiply_reduced({1, 2}, {4, 3}, 2).empty());
  CHECK(multiply_reduced({1, 2}, {4, 1}, 2) == Word{1, 1});
  CHECK(multiply_reduced({}, {2, 1}, 2) == Word{2, 1});
  const SchottkyData g = reference_group();
  CHECK(projective_distance(group_element({1, 2}, g) * group_element({4, 1}, g), group_element({1, 1}, g)) < 1e-9);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Word x = random_word(rng, 2, i % 7), y = random_word(rng, 2, (i * 3) % 7);
    const Word p = multiply_reduced(x, y, 2);
    CHECK(is_admissible(p, 2));
    CHECK(p.size() <= x.size() + y.size());
    CHECK(projective_distance(group_element(p, g), group_element(x, g) * group_element(y, g)) <
          1e-6 * std::max(1.0, std::abs(group_element(p, g).a)));
  }
}

TEST_CASE("proper powers: documented cases") {
  const auto a = proper_power_decomposition({1, 2, 1, 2, 1, 2}, 2);
  REQUIRE(a);
  CHECK(a->root == Word{1, 2});
  CHECK(a->q == 3);
  CHECK_FALSE(proper_power_decomposition({1}, 2));
  CHECK_FALSE(proper_power_decomposition({}, 2));
  const auto b = proper_power_decomposition({2, 1, 1, 4}, 2);
  REQUIRE(b);
  CHECK(b->root == Word{2, 1, 4});
  CHECK(b->q == 2);
  CHECK(divisor_count(1) == 1);
  CHECK(divisor_count(12) == 6);
}

TEST_CASE("proper powers agree with exhaustive search up to length 6") {
  const int r = 2, cap = 6;
  // Largest exponent of each reduced element reachable as root^q, q >= 2.
  std::map<Word, int> best;
  for (const Word& root : all_reduced_words(r, cap)) {
    if (root.empty()) continue;
    for (int q = 2; q <= cap; ++q) {
      const Word x = power_of(root, q, r);
      if (x.size() > static_cast<std::size_t>(cap)) break;
      int& slot = best[x];
      slot = std::max(slot, q);
    }
  }
  for (const Word& x : all_reduced_words(r, cap)) {
    const auto found = proper_power_decomposition(x, r);
    const auto it = best.find(x);
    if (it == best.end() || x.empty()) {
      CHECK_FALSE(found);
    } else {
      REQUIRE(found);
      CHECK(found->q == it->second);
      CHECK(power_of(found->root, found->q, r) == x);
    }
  }
}

TEST_CASE("power pairs classification is consistent") {
  const SchottkyData g = reference_group();
  const PowerPairsReport report = power_pairs(1e-2, g);
  const std::size_t size = report.members.size();
  CHECK(report.identity_count + report.power_count + report.other_count == size * size);
  std::size_t same_prefix = 0;
  for (const auto& a : report.members)
    for (const auto& b : report.members)
      same_prefix += std::equal(a.letters.begin(), a.letters.end() - 1, b.letters.begin(), b.letters.end() - 1);
  CHECK(report.identity_count == same_prefix);
  CHECK(report.identity_count <= 4 * size);
  for (const auto& p : report.power_pairs) {
    const Word& a = report.members[p.a].letters;
    const Word& b = report.members[p.b].letters;
    const Word ap(a.begin(), a.end() - 1), bp(b.begin(), b.end() - 1);
    int L = 0;
    while (L < static_cast<int>(std::min(ap.size(), bp.size())) && ap[L] == bp[L]) ++L;
    int R = 0;
    while (R < static_cast<int>(std::min(ap.size(), bp.size())) - L && ap[ap.size() - 1 - R] == bp[bp.size() - 1 - R]) ++R;
    CHECK(p.key.L == L);
    CHECK(p.key.R == R);
    CHECK(p.key.M1 + L + R == static_cast<int>(ap.size()));
    const auto power = proper_power_decomposition(multiply_reduced(ap, mirror(bp, 2), 2), 2);
    REQUIRE(power);
    CHECK(power->q == p.key.q);
  }
  CHECK_THROWS_AS(power_pairs(1e-3, g, 10), Error);
}

TEST_CASE("uni distance") {
  const SchottkyData g = reference_group();
  CHECK(uni_distance({1, 2}, {1, 2}, g) == 0.0);
  CHECK(uni_distance({1, 2}, {3, 2}, g) == doctest::Approx(uni_distance({3, 2}, {1, 2}, g)));
  CHECK_THROWS_AS(uni_distance({1, 2}, {1, 1}, g), Error);
  std::mt19937_64 rng(21);
  int tested = 0;
  while (tested < 100) {
    const Word a = random_word(rng, 2, 6);
    Word b = random_word(rng, 2, 5);
    if (b.back() == bar(a.back(), 2)) continue;
    b.push_back(a.back());
    CHECK(std::abs(uni_distance(a, b, g) - uni_distance(a, b, g, 4096)) <= 1e-3);
    ++tested;
  }
}

TEST_CASE("estimated constants are finite, at least one and stabilise") {
  const SchottkyData g = reference_group();
  const double delta = 0.310383063228502;
  const EstimatedConstants c8 = estimate_constants(8, g, delta);
  for (double v : {c8.K0, c8.K1, c8.K2, c8.K3, c8.C, c8.C2, c8.D}) {
    CHECK(std::isfinite(v));
    CHECK(v >= 1.0);
  }
  CHECK(c8.theta < 1.0);
  CHECK(c8.theta_bar > 0.0);
  CHECK(c8.theta_bar <= c8.theta);
  CHECK_THROWS_AS(estimate_constants(13, g, delta), Error);
}
