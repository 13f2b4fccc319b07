#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "schottky/group.hpp"
#include "schottky/permrep.hpp"
#include "schottky/words.hpp"

namespace schottky {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Orthonormal Bergman basis of D_a: sqrt((m+1)/(pi r^2)) ((z - c)/r)^m.
Complex bergman_basis(const SchottkyData& g, int disk, int m, Complex z);

/// Closed-form Bergman kernel r^2 / (pi [r^2 - conj(x2 - c)(x1 - c)]^2). Throws OutsideDisk.
Complex bergman_kernel(int disk, Complex x1, Complex x2, const SchottkyData& g);

/// exp(s Log(base)) with the principal branch. Throws BranchCutHit when base lies on (-inf, 0].
Complex complex_power(Complex base, Complex s);

/// Unitary representation of Gamma: trivial, permutation (std) or its n-1 dimensional
/// complement of the constants (std0), realized in the Helmert basis.
class Representation {
 public:
  enum class Kind { Trivial, Standard, StandardReduced };

  static Representation trivial();
  static Representation standard(PermutationRep rep);
  static Representation standard_reduced(PermutationRep rep);

  Kind kind() const { return kind_; }
  int dim() const;
  const PermutationRep* permutation() const { return perm_ ? &*perm_ : nullptr; }

  /// rho(gamma_w).
  CMatrix matrix(const Word& w) const;
  /// Tr rho(gamma_w).
  double trace(const Word& w) const;

 private:
  Kind kind_ = Kind::Trivial;
  std::optional<PermutationRep> perm_;
  Eigen::MatrixXd complement_;  // n x (n-1), orthonormal, orthogonal to the all-ones vector
};

/// Orthonormal basis of the complement of (1,..,1) in R^n (Helmert construction).
Eigen::MatrixXd helmert_complement(int n);

/// The finite word set Z defining the operator: W_2 or Z-bar(tau).
struct WordSet {
  enum class Kind { Standard, Refined };
  Kind kind = Kind::Standard;
  double tau = 0.0;
  std::vector<Word> words;

  static WordSet standard(const SchottkyData& g);
  /// Requires every member to have length >= 2 (tau below the empirical tau_0).
  static WordSet refined(double tau, const SchottkyData& g);
};

struct AssembleOptions {
  int M = 16;           // Taylor degree cap per disk
  int samples = 0;      // circle samples K; 0 means max(64, 4(M+1))
  double beta = 0.7;    // evaluation circle radius ratio
  bool strict = false;  // DegreeTooSmall becomes an error
  double trailing_tolerance = 1e-8;
};

/// Per-word (M+1)x(M+1) blocks A_w in normalized bases, target disk = last letter,
/// source disk = first letter.
struct TransferBlocks {
  Complex s;
  int M = 0;
  std::vector<CMatrix> blocks;
  std::vector<CMatrix> derivative_blocks;  // empty unless requested
  double trailing_mass = 0.0;
  bool truncation_warning = false;
};

struct TransferMatrix {
  Complex s;
  int M = 0;
  int disks = 0;
  int dim_v = 0;
  CMatrix matrix;
  CMatrix derivative;  // d/ds of matrix, empty unless requested
  double trailing_mass = 0.0;
  bool truncation_warning = false;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Galerkin truncation of the twisted transfer operator over a fixed word set.
/// Geometry (sample images, log-derivatives, basis values) is computed once; each
/// call to blocks() or assemble() only applies the complex power for the given s.
class TransferOperator {
 public:
  TransferOperator(const SchottkyData& g, WordSet words, AssembleOptions options = {});

  const SchottkyData& group() const { return g_; }
  const WordSet& word_set() const { return words_; }
  const AssembleOptions& options() const { return options_; }
  int degree() const { return options_.M; }
  int disks() const { return g_.alphabet_size(); }

  TransferBlocks blocks(Complex s, bool derivative = false) const;
  TransferMatrix assemble(Complex s, const Representation& rep, bool derivative = false) const;
  /// Places precomputed blocks; rho_inverse[i] = rho(gamma_{w_i'}^{-1}).
  TransferMatrix assemble(const TransferBlocks& blocks, const std::vector<CMatrix>& rho_inverse, int dim_v) const;
  std::vector<CMatrix> inverse_prefix_matrices(const Representation& rep) const;

 private:
  struct WordGeometry {
    int source = 0;  // first letter
    int target = 0;  // last letter
    Eigen::VectorXcd log_derivative;  // Log gamma'_{w'}(x_j) at the K samples
    CMatrix basis_values;             // K x (M+1): e_{source,m}(gamma_{w'}(x_j))
  };

  SchottkyData g_;
  WordSet words_;
  AssembleOptions options_;
  int samples_ = 0;
  std::vector<CMatrix> projection_;   // per target disk: (kmax+1) x K normalized DFT
  std::vector<WordGeometry> geometry_;
};

/// One-shot convenience wrapper.
TransferMatrix assemble(const SchottkyData& g, const WordSet& words, Complex s, const Representation& rep,
                        AssembleOptions options = {}, bool derivative = false);

/// Frobenius norm of the normalized-basis matrix (truncated Hilbert-Schmidt norm).
double hs_norm_matrix(const TransferMatrix& t);

/// ||sum_w A_w (x) rho(gamma_{w'}^{-1})||_F^2 without forming the full matrix when rho is a
/// permutation representation (groups words by the image of each point).
double hs_norm_squared(const TransferOperator& op, const TransferBlocks& blocks, const Representation& rep);

struct KernelQuadrature {
  int radial = 32;
  int angular = 64;
  double tolerance = 5e-3;  // relative change allowed when doubling the nodes
};

struct KernelHsResult {
  double value = 0.0;          // the Hilbert-Schmidt norm (square root of the double sum)
  double squared = 0.0;
  double imaginary_residual = 0.0;
  double doubled_change = 0.0;  // relative change of the squared norm after doubling nodes
};

/// Hilbert-Schmidt norm of L_{tau,s,rho} from the double word sum with the closed-form
/// Bergman kernel, by polar quadrature over each disk. Throws QuadratureNotConverged.
KernelHsResult hs_norm_kernel(const SchottkyData& g, double tau, Complex s, const Representation& rep,
                              KernelQuadrature quadrature = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace schottky
