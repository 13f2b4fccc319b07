#include "schottky/zeta.hpp"

#include <algorithm>
#include <cmath>

#include "schottky/error.hpp"

namespace schottky {

namespace {

WordSet word_set_for(const SchottkyData& g, ZetaKind kind) {
  if (kind.type == ZetaKind::Type::Standard) return WordSet::standard(g);
  return WordSet::refined(kind.tau, g);
}

}  // namespace

ZetaFunction::ZetaFunction(const SchottkyData& g, ZetaKind kind, Representation rep, AssembleOptions options)
    : op_(std::make_shared<const TransferOperator>(g, word_set_for(g, kind), options)),
      rep_(std::move(rep)),
      kind_(kind) {
  rho_inverse_ = op_->inverse_prefix_matrices(rep_);
}

Eigen::Index ZetaFunction::size() const {
  return static_cast<Eigen::Index>(op_->disks()) * (op_->degree() + 1) * rep_.dim();
}

TransferMatrix ZetaFunction::matrix(Complex s, bool derivative) const {
  return op_->assemble(op_->blocks(s, derivative), rho_inverse_, rep_.dim());
}

Complex ZetaFunction::evaluate(Complex s) const {
  if (size() == 0) return 1.0;
  const TransferMatrix t = matrix(s);
  const Eigen::Index n = t.size();
  CMatrix system = CMatrix::Identity(n, n);
  if (kind_.type == ZetaKind::Type::Refined) {
    system -= t.matrix * t.matrix;
  } else {
    system -= t.matrix;
  }
  return Eigen::PartialPivLU<CMatrix>(system).determinant();
}

ZetaValue ZetaFunction::evaluate_with_log_derivative(Complex s) const {
  if (size() == 0) return {1.0, 0.0};
  const TransferMatrix t = matrix(s, true);
  const Eigen::Index n = t.size();
  CMatrix b, db;
  if (kind_.type == ZetaKind::Type::Refined) {
    b = t.matrix * t.matrix;
    db = t.derivative * t.matrix + t.matrix * t.derivative;
  } else {
    b = t.matrix;
    db = t.derivative;
  }
  const Eigen::PartialPivLU<CMatrix> lu(CMatrix::Identity(n, n) - b);
  const Complex det = lu.determinant();
  if (det == Complex(0.0) || lu.rcond() < 1e-14) fail(ErrorCode::SingularMatrix, "I - L is numerically singular");
  return {det, -lu.solve(db).trace()};
}

ZetaEvaluator ZetaFunction::evaluator() const {
  auto self = std::make_shared<const ZetaFunction>(*this);
  return [self](Complex s) { return self->evaluate_with_log_derivative(s); };
}

ValueEvaluator ZetaFunction::value_evaluator() const {
  auto self = std::make_shared<const ZetaFunction>(*this);
  return [self](Complex s) { return self->evaluate(s); };
}

AnalyticFunction ZetaFunction::analytic() const {
  auto self = std::make_shared<const ZetaFunction>(*this);
  return {[self](Complex s) { return self->evaluate(s); },
          [self](Complex s) { return self->evaluate_with_log_derivative(s); }};
}

double pressure(double sigma, const SchottkyData& g, int M) {
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "pressure needs real sigma >= 0");
  AssembleOptions options;
  options.M = M;
  const TransferMatrix t = assemble(g, WordSet::standard(g), sigma, Representation::trivial(), options);
  const Eigen::ComplexEigenSolver<CMatrix> solver(t.matrix, false);
  const auto& values = solver.eigenvalues();
  Eigen::Index lead = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (std::abs(values(i)) > std::abs(values(lead))) lead = i;
  const Complex lambda = values(lead);
  if (!(lambda.real() > 0.0) || std::abs(lambda.imag()) > 1e-8 * std::abs(lambda)) {
    fail(ErrorCode::PerronViolation, "leading eigenvalue is not real positive");
  }
  return std::log(lambda.real());
}

DimensionResult hausdorff_dimension(const SchottkyData& g, double tol, int M) {
  if (g.r < 2) fail(ErrorCode::InvalidGroup, "group must be non-elementary (r >= 2)");
  DimensionResult out;
  double lo = 0.0, hi = 1.0;
  double p_lo = pressure(lo, g, M);
  double p_hi = pressure(hi, g, M);
  if (!(p_lo > 0.0) || !(p_hi < 0.0)) fail(ErrorCode::NoSignChange, "pressure does not change sign on [0, 1]");

  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    const double p = pressure(mid, g, M);
    ++out.iterations;
    if (p > 0.0) {
      lo = mid;
      p_lo = p;
    } else {
      hi = mid;
      p_hi = p;
    }
  }

  double x = lo, px = p_lo;
  for (int iter = 0; iter < 100; ++iter) {
    double next = hi - p_hi * (hi - lo) / (p_hi - p_lo);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double p = pressure(next, g, M);
    ++out.iterations;
    x = next;
    px = p;
    if (std::abs(p) < tol || p == 0.0) break;
    if (p > 0.0) {
      lo = next;
      p_lo = p;
    } else {
      hi = next;
      p_hi = p;
    }
    if (hi - lo < 1e-15) break;
  }
  out.delta = x;
  out.pressure_at_delta = px;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  return out;
}

double factorization_residual(const PermutationRep& rep, const std::vector<Complex>& samples, const SchottkyData& g,
                              int M) {
  AssembleOptions options;
  options.M = M;
  const ZetaFunction standard(g, ZetaKind::standard(), Representation::standard(rep), options);
  const ZetaFunction trivial(g, ZetaKind::standard(), Representation::trivial(), options);
  const ZetaFunction reduced(g, ZetaKind::standard(), Representation::standard_reduced(rep), options);
  double worst = 0.0;
  for (const Complex s : samples) {
    const Complex zs = standard.evaluate(s);
    const Complex product = trivial.evaluate(s) * reduced.evaluate(s);
    worst = std::max(worst, std::abs(zs - product) / std::max(1.0, std::abs(zs)));
  }
  return worst;
}

PointwiseBoundResult pointwise_threshold(const SchottkyData& g, double tau, const Representation& rep, double s_max,
                                         double window, double step, double start, int M) {
  if (!(step > 0.0) || !(window >= 0.0) || !(s_max >= start)) fail(ErrorCode::InvalidArgument, "bad scan grid");
  AssembleOptions options;
  options.M = M;
  const ZetaFunction zeta(g, ZetaKind::refined(tau), rep, options);
  PointwiseBoundResult out;
  out.bound = rep.dim() * tau;
  const int count = static_cast<int>(std::floor((s_max + window - start) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double s = start + i * step;
    out.s.push_back(s);
    out.neg_log_abs.push_back(-std::log(std::abs(zeta.evaluate(s))));
  }
  const int span = static_cast<int>(std::lround(window / step));
  for (int i = 0; i + span < count && out.s[i] <= s_max + 1e-12; ++i) {
    bool ok = true;
    for (int j = i; j <= i + span && ok; ++j) ok = out.neg_log_abs[j] <= out.bound;
    if (ok) {
      out.found = true;
      out.threshold = out.s[i];
      break;
    }
  }
  return out;
}

}  // namespace schottky
