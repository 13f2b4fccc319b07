#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "schottky/transfer.hpp"

namespace schottky {

/// standard: Z = W_2, det(1 - L). refined(tau): Z = Z-bar(tau), det(1 - L^2).
struct ZetaKind {
  enum class Type { Standard, Refined };
  Type type = Type::Standard;
  double tau = 0.0;

  static ZetaKind standard() { return {}; }
  static ZetaKind refined(double tau) { return {Type::Refined, tau}; }
};

struct ZetaValue {
  Complex value;
  Complex log_derivative;
};

/// Analytic function together with its logarithmic derivative, as consumed by the
/// zero counters. Thread-safe to call concurrently.
using ZetaEvaluator = std::function<ZetaValue(Complex)>;
using ValueEvaluator = std::function<Complex(Complex)>;

/// Both views of the same function: values alone are cheaper than value plus log-derivative.
struct AnalyticFunction {
  ValueEvaluator value;
  ZetaEvaluator with_log_derivative;
};

/// Fredholm determinant of the truncated transfer operator for a fixed group, word set and
/// representation. Geometry and representation matrices are cached; evaluation is const and
/// may run concurrently.
class ZetaFunction {
 public:
  ZetaFunction(const SchottkyData& g, ZetaKind kind, Representation rep, AssembleOptions options = {});

  ZetaKind kind() const { return kind_; }
  const Representation& representation() const { return rep_; }
  const TransferOperator& transfer_operator() const { return *op_; }
  /// Side length of the truncated matrix.
  Eigen::Index size() const;

  TransferMatrix matrix(Complex s, bool derivative = false) const;
  /// det(I - A) or det(I - A^2) by partial-pivot LU.
  Complex evaluate(Complex s) const;
  /// Value and -tr((I - B)^{-1} B') with B = A or A^2. Throws SingularMatrix at a zero.
  ZetaValue evaluate_with_log_derivative(Complex s) const;
  Complex log_derivative(Complex s) const { return evaluate_with_log_derivative(s).log_derivative; }

  ZetaEvaluator evaluator() const;
  ValueEvaluator value_evaluator() const;
  AnalyticFunction analytic() const;

 private:
  std::shared_ptr<const TransferOperator> op_;
  Representation rep_;
  ZetaKind kind_;
  std::vector<CMatrix> rho_inverse_;
};

/// log of the leading eigenvalue of the W_2 trivial-rep matrix at real sigma.
/// Throws PerronViolation when that eigenvalue is not real positive (relative imag > 1e-8).
double pressure(double sigma, const SchottkyData& g, int M = 24);

struct DimensionResult {
  double delta = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  double pressure_at_delta = 0.0;
  int iterations = 0;
};

/// Root of sigma -> P(sigma) on (0, 1): bisection to a 1e-3 bracket, then safeguarded secant
/// until |P| < tol. Throws NoSignChange.
DimensionResult hausdorff_dimension(const SchottkyData& g, double tol = 1e-12, int M = 24);

/// Counting convention for primitive conjugacy classes in the Euler product.
enum class GeodesicConvention {
  Individual,  // gamma and gamma^{-1} are separate classes
  Paired,      // one factor per unoriented geodesic
};

struct EulerProductStats {
  std::size_t classes = 0;
  double shortest_length = 0.0;
  double min_abs_trace = 0.0;
};

/// Truncated Selberg product over primitive classes with cyclically reduced representatives of
/// length <= max_word_len (Lyndon words: strictly smaller than every proper rotation).
/// Throws ConvergenceRegionViolated when delta is given and Re s <= delta + 0.1.
Complex euler_product_zeta(Complex s, const SchottkyData& g, int max_word_len = 14, int k_max = 20,
                           GeodesicConvention convention = GeodesicConvention::Individual,
                           std::optional<double> delta = std::nullopt, EulerProductStats* stats = nullptr);

/// Lengths l = 2 arccosh(|tr|/2) of the primitive classes up to the word length cap.
std::vector<double> primitive_lengths(const SchottkyData& g, int max_word_len,
                                      GeodesicConvention convention = GeodesicConvention::Individual);

/// prod_l prod_{k <= k_max} (1 - e^{-(s+k) l}) over precomputed lengths.
Complex euler_product_from_lengths(Complex s, const std::vector<double>& lengths, int k_max = 20);

/// max_s |zeta_std(s) - zeta_triv(s) zeta_std0(s)| / max(1, |zeta_std(s)|).
double factorization_residual(const PermutationRep& rep, const std::vector<Complex>& samples, const SchottkyData& g,
                              int M = 24);

struct PointwiseBoundResult {
  bool found = false;
  double threshold = 0.0;  // smallest grid s* with the bound holding on [s*, s* + window]
  std::vector<double> s;
  std::vector<double> neg_log_abs;  // -log |zeta_{tau,rho}(s)| at each grid point
  double bound = 0.0;               // (dim V) tau
};

/// Scans real s on a grid of `step` over [start, s_max + window] for the refined zeta.
PointwiseBoundResult pointwise_threshold(const SchottkyData& g, double tau, const Representation& rep,
                                         double s_max = 30.0, double window = 10.0, double step = 0.5,
                                         double start = 1.0, int M = 16);

}  // namespace schottky
