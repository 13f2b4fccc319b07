#include "schottky/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "schottky/error.hpp"

namespace schottky {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

Word prefix(const Word& w) { return Word(w.begin(), w.end() - 1); }

}  // namespace

Complex bergman_basis(const SchottkyData& g, int disk, int m, Complex z) {
  const double r = g.radius(disk);
  const Complex u = (z - g.center(disk)) / r;
  return std::sqrt((m + 1.0) / (kPi * r * r)) * std::pow(u, m);
}

Complex bergman_kernel(int disk, Complex x1, Complex x2, const SchottkyData& g) {
  if (disk < 1 || disk > g.alphabet_size()) fail(ErrorCode::LetterOutOfRange, "disk index out of range");
  const double c = g.center(disk);
  const double r = g.radius(disk);
  if (std::abs(x1 - c) >= r || std::abs(x2 - c) >= r) fail(ErrorCode::OutsideDisk, "kernel point outside D_a");
  const Complex denom = r * r - std::conj(x2 - c) * (x1 - c);
  return r * r / (kPi * denom * denom);
}

Complex complex_power(Complex base, Complex s) {
  if (base.real() <= 0.0 && std::abs(base.imag()) <= 1e-14 * std::max(1.0, std::abs(base))) {
    fail(ErrorCode::BranchCutHit, "complex power base on the negative real axis");
  }
  return std::exp(s * std::log(base));
}

// ---------------------------------------------------------------------------
// Representations

Eigen::MatrixXd helmert_complement(int n) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) u(i, k - 1) = scale;
    u(k, k - 1) = -k * scale;
  }
  return u;
}

Representation Representation::trivial() { return {}; }

Representation Representation::standard(PermutationRep rep) {
  Representation out;
  out.kind_ = Kind::Standard;
  out.perm_ = std::move(rep);
  return out;
}

Representation Representation::standard_reduced(PermutationRep rep) {
  Representation out;
  out.kind_ = Kind::StandardReduced;
  out.complement_ = helmert_complement(rep.n);
  out.perm_ = std::move(rep);
  return out;
}

int Representation::dim() const {
  switch (kind_) {
    case Kind::Trivial: return 1;
    case Kind::Standard: return perm_->n;
    case Kind::StandardReduced: return perm_->n - 1;
  }
  return 0;
}

CMatrix Representation::matrix(const Word& w) const {
  if (kind_ == Kind::Trivial) return CMatrix::Ones(1, 1);
  const Permutation sigma = act(*perm_, w);
  const int n = perm_->n;
  if (kind_ == Kind::Standard) {
    CMatrix p = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) p(sigma[idx(i)], i) = 1.0;
    return p;
  }
  // U^T P U with P e_i = e_{sigma(i)}.
  Eigen::MatrixXd permuted(n, n - 1);
  for (int i = 0; i < n; ++i) permuted.row(sigma[idx(i)]) = complement_.row(i);
  return (complement_.transpose() * permuted).cast<Complex>();
}

double Representation::trace(const Word& w) const {
  switch (kind_) {
    case Kind::Trivial: return 1.0;
    case Kind::Standard: return fixed_points(act(*perm_, w));
    case Kind::StandardReduced: return character_std0(*perm_, w);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Word sets

WordSet WordSet::standard(const SchottkyData& g) {
  WordSet out;
  out.kind = Kind::Standard;
  const int letters = g.alphabet_size();
  for (int a = 1; a <= letters; ++a)
    for (int b = 1; b <= letters; ++b)
      if (b != bar(a, g.r)) out.words.push_back({a, b});
  return out;
}

WordSet WordSet::refined(double tau, const SchottkyData& g) {
  if (!(tau > 0.0)) fail(ErrorCode::TauNonPositive, "tau must be positive");
  WordSet out;
  out.kind = Kind::Refined;
  out.tau = tau;
  for (auto& entry : mirror_partition(tau, g)) {
    if (entry.letters.size() < 2) {
      fail(ErrorCode::HypothesisViolated, "Z-bar(tau) contains a single letter; tau is above tau_0");
    }
    out.words.push_back(std::move(entry.letters));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

TransferOperator::TransferOperator(const SchottkyData& g, WordSet words, AssembleOptions options)
    : g_(g), words_(std::move(words)), options_(options) {
  const int M = options_.M;
  if (M < 0) fail(ErrorCode::InvalidArgument, "degree M must be >= 0");
  samples_ = options_.samples > 0 ? options_.samples : std::max(64, 4 * (M + 1));
  if (samples_ < 4 * (M + 1)) fail(ErrorCode::InvalidArgument, "need K >= 4(M+1) circle samples");
  if (!(options_.beta > 0.0 && options_.beta < 1.0)) fail(ErrorCode::InvalidArgument, "beta must lie in (0,1)");
  const int K = samples_;
  const int kmax = std::max(M, K / 2 - 1);
  const double beta = options_.beta;

  projection_.resize(idx(g_.alphabet_size()));
  for (int b = 1; b <= g_.alphabet_size(); ++b) {
    const double r = g_.radius(b);
    CMatrix f(kmax + 1, K);
    for (int k = 0; k <= kmax; ++k) {
      const double scale = std::pow(beta, -k) * std::sqrt(kPi * r * r / (k + 1.0)) / K;
      for (int j = 0; j < K; ++j) {
        const double angle = -2.0 * kPi * static_cast<double>((static_cast<long long>(j) * k) % K) / K;
        f(k, j) = scale * Complex(std::cos(angle), std::sin(angle));
      }
    }
    projection_[idx(b - 1)] = std::move(f);
  }

  for (const Word& w : words_.words) {
    if (w.size() < 2) fail(ErrorCode::HypothesisViolated, "transfer words must have length >= 2");
    if (!is_admissible(w, g_.r)) fail(ErrorCode::InvalidArgument, "word is not reduced: " + format_word(w));
    WordGeometry geo;
    geo.source = w.front();
    geo.target = w.back();
    const Mat2 m = group_element(prefix(w), g_);
    const double c = g_.center(geo.target);
    const double rho = beta * g_.radius(geo.target);
    geo.log_derivative.resize(K);
    geo.basis_values.resize(K, M + 1);
    for (int j = 0; j < K; ++j) {
      const double angle = 2.0 * kPi * j / K;
      const Complex x = c + rho * Complex(std::cos(angle), std::sin(angle));
      const MobiusJet jet = mobius_jet(m, x);
      const Complex d = jet.first;
      if (d.real() <= 0.0 && std::abs(d.imag()) <= 1e-14 * std::max(1.0, std::abs(d))) {
        fail(ErrorCode::BranchCutHit, "gamma' is a negative real at a sample of D_b");
      }
      geo.log_derivative(j) = std::log(d);
      const double ra = g_.radius(geo.source);
      const Complex u = (jet.value - g_.center(geo.source)) / ra;
      Complex power = 1.0;
      for (int mm = 0; mm <= M; ++mm) {
        geo.basis_values(j, mm) = std::sqrt((mm + 1.0) / (kPi * ra * ra)) * power;
        power *= u;
      }
    }
    geometry_.push_back(std::move(geo));
  }
}

TransferBlocks TransferOperator::blocks(Complex s, bool derivative) const {
  const int M = options_.M;
  TransferBlocks out;
  out.s = s;
  out.M = M;
  out.blocks.reserve(geometry_.size());
  if (derivative) out.derivative_blocks.reserve(geometry_.size());
  double total = 0.0, trailing = 0.0;
  for (const auto& geo : geometry_) {
    const Eigen::VectorXcd weights = (s * geo.log_derivative.array()).exp().matrix();
    const CMatrix& f = projection_[idx(geo.target - 1)];
    const CMatrix samples = weights.asDiagonal() * geo.basis_values;
    const CMatrix coeffs = f * samples;
    total += coeffs.squaredNorm();
    trailing += coeffs.bottomRows(coeffs.rows() - (M + 1)).squaredNorm();
    out.blocks.push_back(coeffs.topRows(M + 1));
    if (derivative) {
      const Eigen::VectorXcd dweights = weights.cwiseProduct(geo.log_derivative);
      out.derivative_blocks.push_back(f.topRows(M + 1) * (dweights.asDiagonal() * geo.basis_values));
    }
  }
  out.trailing_mass = total > 0.0 ? std::sqrt(trailing / total) : 0.0;
  out.truncation_warning = out.trailing_mass > options_.trailing_tolerance;
  if (out.truncation_warning && options_.strict) {
    fail(ErrorCode::DegreeTooSmall, "trailing Taylor mass " + std::to_string(out.trailing_mass) + " exceeds tolerance");
  }
  return out;
}

std::vector<CMatrix> TransferOperator::inverse_prefix_matrices(const Representation& rep) const {
  std::vector<CMatrix> out;
  out.reserve(words_.words.size());
  for (const Word& w : words_.words) out.push_back(rep.matrix(mirror(prefix(w), g_.r)));
  return out;
}

TransferMatrix TransferOperator::assemble(const TransferBlocks& blocks, const std::vector<CMatrix>& rho_inverse,
                                          int dim_v) const {
  const int M = options_.M;
  const int block = (M + 1) * dim_v;
  const Eigen::Index size = static_cast<Eigen::Index>(disks()) * block;
  TransferMatrix t;
  t.s = blocks.s;
  t.M = M;
  t.disks = disks();
  t.dim_v = dim_v;
  t.trailing_mass = blocks.trailing_mass;
  t.truncation_warning = blocks.truncation_warning;
  t.matrix = CMatrix::Zero(size, size);
  const bool derivative = !blocks.derivative_blocks.empty();
  if (derivative) t.derivative = CMatrix::Zero(size, size);
  if (dim_v == 0) return t;

  auto place = [&](CMatrix& target, const CMatrix& a, const CMatrix& rho, const WordGeometry& geo) {
    const Eigen::Index row0 = static_cast<Eigen::Index>(geo.target - 1) * block;
    const Eigen::Index col0 = static_cast<Eigen::Index>(geo.source - 1) * block;
    for (int k = 0; k <= M; ++k)
      for (int m = 0; m <= M; ++m)
        target.block(row0 + k * dim_v, col0 + m * dim_v, dim_v, dim_v) += a(k, m) * rho;
  };
  for (std::size_t i = 0; i < geometry_.size(); ++i) {
    place(t.matrix, blocks.blocks[i], rho_inverse[i], geometry_[i]);
    if (derivative) place(t.derivative, blocks.derivative_blocks[i], rho_inverse[i], geometry_[i]);
  }
  return t;
}

TransferMatrix TransferOperator::assemble(Complex s, const Representation& rep, bool derivative) const {
  return assemble(blocks(s, derivative), inverse_prefix_matrices(rep), rep.dim());
}

TransferMatrix assemble(const SchottkyData& g, const WordSet& words, Complex s, const Representation& rep,
                        AssembleOptions options, bool derivative) {
  return TransferOperator(g, words, options).assemble(s, rep, derivative);
}

double hs_norm_matrix(const TransferMatrix& t) { return t.matrix.norm(); }

namespace {

// Sum over (target, source) classes of ||sum_w A_w (x) P_w||_F^2 for the permutation matrices
// P_w[sigma_w(u), u] = 1: entry (v', u) of each class collects the words with sigma_w(u) = v'.
double permutation_hs_squared(const TransferOperator& op, const TransferBlocks& blocks, const PermutationRep& rep) {
  const auto& words = op.word_set().words;
  const int n = rep.n;
  const int r = op.group().r;
  std::vector<Permutation> sigma;
  sigma.reserve(words.size());
  for (const Word& w : words) sigma.push_back(act(rep, mirror(prefix(w), r)));

  std::map<std::pair<int, int>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < words.size(); ++i) classes[{words[i].back(), words[i].front()}].push_back(i);

  double total = 0.0;
  const int M = op.degree();
  std::vector<CMatrix> sums(idx(n), CMatrix::Zero(M + 1, M + 1));
  std::vector<char> used(idx(n));
  for (const auto& [key, members] : classes) {
    for (int u = 0; u < n; ++u) {
      std::fill(used.begin(), used.end(), 0);
      for (std::size_t i : members) {
        const int v = sigma[i][idx(u)];
        if (!used[idx(v)]) {
          sums[idx(v)].setZero();
          used[idx(v)] = 1;
        }
        sums[idx(v)] += blocks.blocks[i];
      }
      for (int v = 0; v < n; ++v)
        if (used[idx(v)]) total += sums[idx(v)].squaredNorm();
    }
  }
  return total;
}

double trivial_hs_squared(const TransferOperator& op, const TransferBlocks& blocks) {
  const auto& words = op.word_set().words;
  std::map<std::pair<int, int>, CMatrix> sums;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto [it, inserted] = sums.try_emplace({words[i].back(), words[i].front()}, blocks.blocks[i]);
    if (!inserted) it->second += blocks.blocks[i];
  }
  double total = 0.0;
  for (const auto& [key, m] : sums) total += m.squaredNorm();
  return total;
}

}  // namespace

double hs_norm_squared(const TransferOperator& op, const TransferBlocks& blocks, const Representation& rep) {
  switch (rep.kind()) {
    case Representation::Kind::Trivial: return trivial_hs_squared(op, blocks);
    case Representation::Kind::Standard: return permutation_hs_squared(op, blocks, *rep.permutation());
    case Representation::Kind::StandardReduced:
      if (rep.dim() == 0) return 0.0;
      return std::max(0.0, permutation_hs_squared(op, blocks, *rep.permutation()) - trivial_hs_squared(op, blocks));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Kernel quadrature

namespace {

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre needs n >= 1");
  nodes.assign(idx(n), 0.0);
  weights.assign(idx(n), 0.0);
  if (n == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, q] = legendre(n, x);
      dp = n * (x * p - q) / (x * x - 1.0);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    auto [p, q] = legendre(n, x);
    dp = n * (x * p - q) / (x * x - 1.0);
    nodes[idx(i)] = -x;
    nodes[idx(n - 1 - i)] = x;
    weights[idx(i)] = weights[idx(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

Complex kernel_double_sum(const SchottkyData& g, const std::vector<Word>& words, Complex s, const Representation& rep,
                          int radial, int angular) {
  std::vector<double> t, tw;
  gauss_legendre(radial, t, tw);

  // Per target disk: quadrature points and weights of dm over D_b.
  const int letters = g.alphabet_size();
  std::vector<std::vector<Complex>> points(idx(letters));
  std::vector<std::vector<double>> qweights(idx(letters));
  for (int b = 1; b <= letters; ++b) {
    const double rb = g.radius(b);
    for (int i = 0; i < radial; ++i) {
      const double rho = 0.5 * rb * (1.0 + t[idx(i)]);
      const double w = 0.5 * rb * tw[idx(i)] * rho * (2.0 * kPi / angular);
      for (int j = 0; j < angular; ++j) {
        const double angle = 2.0 * kPi * (j + 0.5) / angular;
        points[idx(b - 1)].push_back(g.center(b) + rho * Complex(std::cos(angle), std::sin(angle)));
        qweights[idx(b - 1)].push_back(w);
      }
    }
  }

  // Group by (first letter a, last letter b); precompute images and weights per word.
  std::map<std::pair<int, int>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < words.size(); ++i) classes[{words[i].front(), words[i].back()}].push_back(i);

  const int nodes = radial * angular;
  std::vector<std::vector<Complex>> images(words.size()), powers(words.size());
  std::vector<Word> prefixes(words.size()), inverse_prefixes(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    prefixes[i] = prefix(words[i]);
    inverse_prefixes[i] = mirror(prefixes[i], g.r);
    const Mat2 m = group_element(prefixes[i], g);
    const auto& pts = points[idx(words[i].back() - 1)];
    images[i].resize(idx(nodes));
    powers[i].resize(idx(nodes));
    for (int j = 0; j < nodes; ++j) {
      const MobiusJet jet = mobius_jet(m, pts[idx(j)]);
      images[i][idx(j)] = jet.value;
      powers[i][idx(j)] = complex_power(jet.first, s);
    }
  }

  Complex total = 0.0;
  for (const auto& [key, members] : classes) {
    const int a = key.first;
    const int b = key.second;
    const double c = g.center(a);
    const double r2 = g.radius(a) * g.radius(a);
    const auto& qw = qweights[idx(b - 1)];
    for (std::size_t i1 : members) {
      for (std::size_t i2 : members) {
        Word joined = prefixes[i1];
        joined.insert(joined.end(), inverse_prefixes[i2].begin(), inverse_prefixes[i2].end());
        const double trace = rep.trace(joined);
        if (trace == 0.0) continue;
        Complex integral = 0.0;
        for (int j = 0; j < nodes; ++j) {
          const Complex denom = r2 - std::conj(images[i2][idx(j)] - c) * (images[i1][idx(j)] - c);
          const Complex kernel = r2 / (kPi * denom * denom);
          integral += qw[idx(j)] * powers[i1][idx(j)] * std::conj(powers[i2][idx(j)]) * kernel;
        }
        total += trace * integral;
      }
    }
  }
  return total;
}

}  // namespace

KernelHsResult hs_norm_kernel(const SchottkyData& g, double tau, Complex s, const Representation& rep,
                              KernelQuadrature quadrature) {
  const WordSet set = WordSet::refined(tau, g);
  KernelHsResult out;
  if (rep.dim() == 0) return out;
  const Complex base = kernel_double_sum(g, set.words, s, rep, quadrature.radial, quadrature.angular);
  const Complex doubled = kernel_double_sum(g, set.words, s, rep, 2 * quadrature.radial, 2 * quadrature.angular);
  out.squared = doubled.real();
  out.imaginary_residual = std::abs(doubled.imag());
  out.doubled_change = std::abs(doubled.real() - base.real()) / std::max(std::abs(doubled.real()), 1e-300);
  out.value = std::sqrt(std::max(0.0, out.squared));
  if (out.doubled_change > quadrature.tolerance) {
    fail(ErrorCode::QuadratureNotConverged, "doubling quadrature nodes changed the HS norm by more than tolerance");
  }
  return out;
}

}  // namespace schottky
