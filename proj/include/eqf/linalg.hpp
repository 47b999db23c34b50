#ifndef EQF_LINALG_HPP
#define EQF_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Global numeric conventions. Rank decisions use singular-value thresholding
// at kRankRelTol relative to the largest singular value.
namespace tol {
inline constexpr double rank_rel = 1e-8;
inline constexpr double algebra = 1e-10;      // bracket/Jacobi residuals
inline constexpr double curvature = 1e-9;     // curvature symmetry residuals
inline constexpr double transport = 1e-6;     // per unit curve length
inline constexpr double orthogonal = 1e-9;
}  // namespace tol

enum class ErrorKind {
  Input,         // malformed arguments (dimension mismatch, vector not in span)
  Validation,    // data fails its structural invariants
  Precondition,  // operation preconditions not met
  Accuracy,      // a numerical budget was exceeded
  Dependency,    // required intermediate object not built yet
  Resolution,    // scan cannot separate nearby events
  Unstable,      // randomized decomposition failed its retry budget
  Usage,         // CLI / schema misuse
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

// ---------------------------------------------------------------------------
// Subspace utilities. Subspaces are represented by matrices whose columns are
// an orthonormal basis (Euclidean inner product of the coordinate space).
// ---------------------------------------------------------------------------

inline int numeric_rank(const MatrixXd& a, double rel_tol = tol::rank_rel) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

// Orthonormal basis of the column span.
inline MatrixXd orthonormal_span(const MatrixXd& a, double rel_tol = tol::rank_rel) {
  if (a.cols() == 0 || a.norm() == 0.0) return MatrixXd::Zero(a.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the kernel (right null space).
inline MatrixXd kernel_basis(const MatrixXd& a, double rel_tol = tol::rank_rel) {
  if (a.rows() == 0) return MatrixXd::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = (s.size() > 0 ? s(0) : 0.0) * rel_tol;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

// Orthonormal basis of the orthogonal complement of span(q) in R^n.
inline MatrixXd orthonormal_complement(const MatrixXd& q, int ambient_dim) {
  if (q.cols() == 0) return MatrixXd::Identity(ambient_dim, ambient_dim);
  return kernel_basis(q.transpose());
}

inline MatrixXd subspace_projector(const MatrixXd& q) { return q * q.transpose(); }

// Deterministic orthonormal basis depending only on the subspace, stable
// under small perturbations of the input: pivoted Gram-Schmidt on the columns
// of the projector. Near-ties in the pivot norms are broken toward the lowest
// column index so that roundoff cannot reorder them.
inline MatrixXd canonical_basis(const MatrixXd& cols, double rel_tol = tol::rank_rel) {
  MatrixXd q = orthonormal_span(cols, rel_tol);
  const int n = static_cast<int>(cols.rows());
  const int r = static_cast<int>(q.cols());
  if (r == 0) return q;
  MatrixXd resid = q * q.transpose();
  MatrixXd out(n, r);
  int got = 0;
  for (int iter = 0; iter < n && got < r; ++iter) {
    double bn = 0;
    for (int c = 0; c < n; ++c) bn = std::max(bn, resid.col(c).norm());
    if (bn < 1e-12) break;
    int pick = -1;
    for (int c = 0; c < n; ++c)
      if (resid.col(c).norm() >= bn * (1.0 - 1e-9)) {
        pick = c;
        break;
      }
    VectorXd v = resid.col(pick);
    v /= v.norm();
    out.col(got++) = v;
    resid -= v * (v.transpose() * resid);
  }
  require(got == r, ErrorKind::Accuracy, "canonical_basis: rank lost during pivoting");
  return out.leftCols(r);
}

// Canonical complement of a subspace given by orthonormal columns.
inline MatrixXd canonical_complement(const MatrixXd& q, int ambient_dim) {
  MatrixXd p = MatrixXd::Identity(ambient_dim, ambient_dim);
  if (q.cols() > 0) p -= q * q.transpose();
  return canonical_basis(p);
}

// Principal angles between two subspaces given by orthonormal bases,
// ascending. Dimensions may differ; min(dim) angles are returned.
inline VectorXd principal_angles(const MatrixXd& q1, const MatrixXd& q2) {
  const int k = static_cast<int>(std::min(q1.cols(), q2.cols()));
  if (k == 0) return VectorXd();
  Eigen::JacobiSVD<MatrixXd> svd(q1.transpose() * q2);
  VectorXd ang(k);
  for (int i = 0; i < k; ++i) {
    double c = std::min(1.0, std::max(-1.0, svd.singularValues()(i)));
    ang(k - 1 - i) = std::acos(c);
  }
  return ang;
}

inline double max_principal_angle(const MatrixXd& q1, const MatrixXd& q2) {
  VectorXd a = principal_angles(q1, q2);
  return a.size() == 0 ? 0.0 : a.maxCoeff();
}

// Gap between equi-dimensional subspaces: ||P1 - P2||_2-ish, as the sine of
// the largest principal angle. 0 means equal spans.
inline double subspace_gap(const MatrixXd& q1, const MatrixXd& q2) {
  if (q1.cols() != q2.cols()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  return (subspace_projector(q1) - subspace_projector(q2)).norm();
}

inline double skew_residual(const MatrixXd& a) { return (a + a.transpose()).norm(); }
inline double sym_residual(const MatrixXd& a) { return (a - a.transpose()).norm(); }
inline double orthogonality_residual(const MatrixXd& a) {
  return (a.transpose() * a - MatrixXd::Identity(a.cols(), a.cols())).norm();
}

inline MatrixXd matrix_exp(const MatrixXd& a) { return a.exp(); }

// Principal logarithm of a special-orthogonal matrix, returned as a skew
// matrix. Computed from the real Schur form, whose diagonal consists of
// rotation blocks and +-1 entries for orthogonal input. Eigenvalues at -1
// (rotation angle pi) make the principal branch ambiguous and raise an
// accuracy error.
inline MatrixXd rotation_log(const MatrixXd& r, double branch_margin = 1e-6) {
  const int n = static_cast<int>(r.rows());
  require(r.cols() == n, ErrorKind::Input, "rotation_log: square matrix expected");
  require(orthogonality_residual(r) < 1e-6, ErrorKind::Input, "rotation_log: input not orthogonal");
  Eigen::RealSchur<MatrixXd> schur(r);
  const MatrixXd& t = schur.matrixT();
  const MatrixXd& u = schur.matrixU();
  MatrixXd logt = MatrixXd::Zero(n, n);
  int i = 0;
  while (i < n) {
    bool last = (i == n - 1);
    double sub = last ? 0.0 : std::abs(t(i + 1, i));
    if (!last && sub > 1e-10) {
      // 2x2 rotation block [[c,-s],[s,c]]
      double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
      double s = 0.5 * (t(i + 1, i) - t(i, i + 1));
      double theta = std::atan2(s, c);
      require(std::abs(std::abs(theta) - M_PI) > branch_margin, ErrorKind::Accuracy,
              "rotation_log: rotation angle at the branch cut (pi)");
      logt(i, i + 1) = -theta;
      logt(i + 1, i) = theta;
      i += 2;
    } else {
      require(t(i, i) > 0.0, ErrorKind::Accuracy,
              "rotation_log: eigenvalue -1, principal branch undefined");
      i += 1;
    }
  }
  MatrixXd out = u * logt * u.transpose();
  out = 0.5 * (out - out.transpose());
  require((matrix_exp(out) - r).norm() < 1e-7 * std::max(1.0, r.norm()), ErrorKind::Accuracy,
          "rotation_log: exp(log) check failed");
  return out;
}

// Rotate the orthonormal basis q (same span) to best align with ref,
// via the polar factor of q^T ref. Used to keep moving frames smooth.
inline MatrixXd align_basis(const MatrixXd& q, const MatrixXd& ref) {
  if (q.cols() == 0) return q;
  Eigen::JacobiSVD<MatrixXd> svd(q.transpose() * ref, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return q * (svd.matrixU() * svd.matrixV().transpose());
}

// ---------------------------------------------------------------------------
// Seeded sampling helpers. All randomness in the library flows through an
// explicitly seeded engine so runs are reproducible.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline VectorXd random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

inline VectorXd random_unit(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd v(n);
  double nn = 0.0;
  do {
    for (int i = 0; i < n; ++i) v(i) = g(rng);
    nn = v.norm();
  } while (nn < 1e-12);
  return v / nn;
}

// Flatten / restore endomorphisms for span computations in so(V).
inline VectorXd vec_of(const MatrixXd& m) {
  return Eigen::Map<const VectorXd>(m.data(), m.size());
}
inline MatrixXd mat_of(const VectorXd& v, int rows, int cols) {
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

inline double frobenius_inner(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace eqf

#endif  // EQF_LINALG_HPP
