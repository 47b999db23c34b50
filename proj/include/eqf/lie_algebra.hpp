#ifndef EQF_LIE_ALGEBRA_HPP
#define EQF_LIE_ALGEBRA_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eqf/linalg.hpp"

namespace eqf {

// ---------------------------------------------------------------------------
// Portable description of a finite-dimensional Lie algebra with structure
// constants in a chosen basis. This is the on-disk exchange format; built-in
// generators for su(n) and so(n) emit it too.
// ---------------------------------------------------------------------------
struct BracketTriplet {
  int i, j, k;
  double value;  // c_{ij}^k
};

struct AlgebraDocument {
  std::string name;
  int dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<BracketTriplet> bracket;  // both (i,j) and (j,i) entries present
  MatrixXd involution;                  // dim x dim in the same basis; may be empty
  double metric_scale = 1.0;            // global scale on the inner product -B
};

// ---------------------------------------------------------------------------
// LieAlgebraModel: structure constants are the ground truth. All vectors are
// coordinates in the document basis; the positive-definite inner product is
// scale * (-Killing). Instances are immutable after construction and all
// operations are const, so concurrent use is safe.
// ---------------------------------------------------------------------------
class LieAlgebraModel {
 public:
  static LieAlgebraModel from_document(const AlgebraDocument& doc) { return LieAlgebraModel(doc); }

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  double metric_scale() const { return scale_; }
  const MatrixXd& involution_candidate() const { return involution_; }

  VectorXd bracket(const VectorXd& x, const VectorXd& y) const {
    require(x.size() == n_ && y.size() == n_, ErrorKind::Input,
            "bracket: dimension mismatch (" + std::to_string(x.size()) + "," +
                std::to_string(y.size()) + ") vs dim " + std::to_string(n_));
    VectorXd out(n_);
    for (int k = 0; k < n_; ++k) out(k) = x.dot(c_[k] * y);
    return out;
  }

  // Matrix of ad_x in the document basis: ad_x(y) = [x, y].
  MatrixXd ad(const VectorXd& x) const {
    require(x.size() == n_, ErrorKind::Input, "ad: dimension mismatch");
    MatrixXd m = MatrixXd::Zero(n_, n_);
    for (int k = 0; k < n_; ++k) m.row(k) = x.transpose() * c_[k];
    return m;
  }

  double killing_form(const VectorXd& x, const VectorXd& y) const {
    require(x.size() == n_ && y.size() == n_, ErrorKind::Input, "killing_form: dimension mismatch");
    return x.dot(killing_ * y);
  }
  const MatrixXd& killing_matrix() const { return killing_; }

  // Positive definite inner product: scale * (-B).
  const MatrixXd& gram() const { return gram_; }
  double inner(const VectorXd& x, const VectorXd& y) const { return x.dot(gram_ * y); }
  double norm(const VectorXd& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

  // --- structural diagnostics -------------------------------------------

  double antisymmetry_residual() const {
    double r = 0.0;
    for (int k = 0; k < n_; ++k) r = std::max(r, (c_[k] + c_[k].transpose()).cwiseAbs().maxCoeff());
    return r;
  }

  // max over basis triples of | [ei,[ej,ek]] + [ej,[ek,ei]] + [ek,[ei,ej]] |
  double jacobi_residual() const {
    double worst = 0.0;
    std::vector<MatrixXd> adb(n_);
    for (int i = 0; i < n_; ++i) adb[i] = ad(VectorXd::Unit(n_, i));
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        VectorXd bij(n_);
        for (int k = 0; k < n_; ++k) bij(k) = c_[k](i, j);
        MatrixXd ad_bij = ad(bij);
        for (int k = j + 1; k < n_; ++k) {
          // [ei,[ej,ek]] - [ej,[ei,ek]] = [[ei,ej],ek]
          VectorXd r = adb[i] * adb[j].col(k) - adb[j] * adb[i].col(k) - ad_bij.col(k);
          worst = std::max(worst, r.norm());
        }
      }
    return worst;
  }

  // Largest Killing eigenvalue; compact type requires all < -1e-10.
  double max_killing_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(killing_);
    return es.eigenvalues().maxCoeff();
  }

  void validate(double tol_residual = tol::algebra) const {
    require(antisymmetry_residual() <= tol_residual, ErrorKind::Validation,
            name_ + ": bracket antisymmetry violated");
    require(jacobi_residual() <= tol_residual, ErrorKind::Validation,
            name_ + ": Jacobi identity residual too large");
    require((killing_ - killing_.transpose()).norm() <= 1e-9, ErrorKind::Validation,
            name_ + ": Killing form not symmetric");
    require(max_killing_eigenvalue() < -1e-10, ErrorKind::Validation,
            name_ + ": Killing form not negative definite (not compact type)");
  }

 private:
  explicit LieAlgebraModel(const AlgebraDocument& doc)
      : name_(doc.name), n_(doc.dim), labels_(doc.basis_labels), scale_(doc.metric_scale),
        involution_(doc.involution) {
    require(n_ > 0, ErrorKind::Input, "algebra dimension must be positive");
    require(scale_ > 0, ErrorKind::Input, "metric scale must be positive");
    if (labels_.empty())
      for (int i = 0; i < n_; ++i) labels_.push_back("e" + std::to_string(i));
    require(static_cast<int>(labels_.size()) == n_, ErrorKind::Input, "basis label count mismatch");
    c_.assign(n_, MatrixXd::Zero(n_, n_));
    for (const auto& t : doc.bracket) {
      require(t.i >= 0 && t.i < n_ && t.j >= 0 && t.j < n_ && t.k >= 0 && t.k < n_,
              ErrorKind::Input, "bracket triplet index out of range");
      c_[t.k](t.i, t.j) += t.value;
    }
    killing_.resize(n_, n_);
    std::vector<MatrixXd> adb(n_);
    for (int i = 0; i < n_; ++i) adb[i] = ad(VectorXd::Unit(n_, i));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) killing_(i, j) = killing_(j, i) = (adb[i] * adb[j]).trace();
    gram_ = -scale_ * killing_;
  }

  std::string name_;
  int n_;
  std::vector<std::string> labels_;
  double scale_;
  MatrixXd involution_;
  std::vector<MatrixXd> c_;  // c_[k](i,j) = c_{ij}^k
  MatrixXd killing_, gram_;
};

// ---------------------------------------------------------------------------
// Cartan decomposition g = k (+) p for an involutive automorphism theta.
// k_basis and p_basis columns are orthonormal for the model inner product;
// downstream modules work in "pair coordinates" [k | p] where that inner
// product is the identity.
// ---------------------------------------------------------------------------
class CartanDecomposition {
 public:
  CartanDecomposition(std::shared_ptr<const LieAlgebraModel> model, const MatrixXd& theta)
      : model_(std::move(model)) {
    const auto& g = *model_;
    const int n = g.dim();
    require(theta.rows() == n && theta.cols() == n, ErrorKind::Input,
            "involution: dimension mismatch");
    require((theta * theta - MatrixXd::Identity(n, n)).norm() <= 1e-9, ErrorKind::Validation,
            "involution: theta^2 != id");
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        VectorXd lhs = theta * g.bracket(VectorXd::Unit(n, i), VectorXd::Unit(n, j));
        VectorXd rhs = g.bracket(theta.col(i), theta.col(j));
        worst = std::max(worst, (lhs - rhs).norm());
      }
    require(worst <= 1e-9, ErrorKind::Validation,
            "involution: not an automorphism, worst bracket residual " + std::to_string(worst));
    theta_ = theta;

    // G-orthonormal eigenbases of the +-1 eigenspaces.
    Eigen::LLT<MatrixXd> llt(g.gram());
    require(llt.info() == Eigen::Success, ErrorKind::Validation, "inner product not positive definite");
    MatrixXd lt = llt.matrixL().transpose();
    auto g_orthonormal_span = [&](const MatrixXd& cols) {
      MatrixXd q = orthonormal_span(lt * cols);
      return MatrixXd(lt.triangularView<Eigen::Upper>().solve(q));
    };
    k_basis_ = g_orthonormal_span(theta + MatrixXd::Identity(n, n));
    p_basis_ = g_orthonormal_span(theta - MatrixXd::Identity(n, n));
    require(p_basis_.cols() > 0, ErrorKind::Validation,
            "degenerate pair: involution has no -1 eigenspace (theta == id)");
    require(k_basis_.cols() + p_basis_.cols() == n, ErrorKind::Validation,
            "involution eigenspaces do not span the algebra");

    // Pair-coordinate structure: t = [k | p], ad slices AD[a](c,b) with
    // [t_a, t_b] = sum_c AD[a](c,b) t_c.
    MatrixXd t(n, n);
    t << k_basis_, p_basis_;
    MatrixXd tg = t.transpose() * g.gram();  // coordinate extraction
    ad_.resize(n);
    for (int a = 0; a < n; ++a) {
      MatrixXd col(n, n);
      for (int b = 0; b < n; ++b) col.col(b) = g.bracket(t.col(a), t.col(b));
      ad_[a] = tg * col;
    }
    dim_k_ = static_cast<int>(k_basis_.cols());
    dim_p_ = static_cast<int>(p_basis_.cols());

    // Bracket inclusion residuals [k,k] in k, [k,p] in p, [p,p] in k.
    double rkk = 0, rkp = 0, rpp = 0;
    for (int a = 0; a < dim_k_; ++a) {
      for (int b = 0; b < dim_k_; ++b)
        rkk = std::max(rkk, ad_[a].col(b).tail(dim_p_).cwiseAbs().maxCoeff());
      for (int b = 0; b < dim_p_; ++b)
        rkp = std::max(rkp, ad_[a].col(dim_k_ + b).head(dim_k_).cwiseAbs().maxCoeff());
    }
    for (int a = 0; a < dim_p_; ++a)
      for (int b = 0; b < dim_p_; ++b)
        rpp = std::max(rpp, ad_[dim_k_ + a].col(dim_k_ + b).tail(dim_p_).cwiseAbs().maxCoeff());
    inclusion_residual_ = std::max({rkk, rkp, rpp});
    require(inclusion_residual_ <= tol::algebra * std::max(1.0, max_structure_constant()),
            ErrorKind::Validation, "Cartan bracket inclusions violated");
  }

  const LieAlgebraModel& model() const { return *model_; }
  std::shared_ptr<const LieAlgebraModel> model_ptr() const { return model_; }
  const MatrixXd& theta() const { return theta_; }
  const MatrixXd& k_basis() const { return k_basis_; }
  const MatrixXd& p_basis() const { return p_basis_; }
  int dim_k() const { return dim_k_; }
  int dim_p() const { return dim_p_; }
  int dim() const { return dim_k_ + dim_p_; }
  double inclusion_residual() const { return inclusion_residual_; }

  double max_structure_constant() const {
    double m = 0;
    for (const auto& a : ad_) m = std::max(m, a.cwiseAbs().maxCoeff());
    return m;
  }

  // --- pair coordinates ----------------------------------------------------
  // x in R^n = [k-part | p-part]; the metric is the Euclidean one.

  MatrixXd ad_pair(const VectorXd& x) const {
    MatrixXd m = MatrixXd::Zero(dim(), dim());
    for (int a = 0; a < dim(); ++a)
      if (x(a) != 0.0) m += x(a) * ad_[a];
    return m;
  }
  const MatrixXd& ad_slice(int a) const { return ad_[a]; }

  VectorXd bracket_pair(const VectorXd& x, const VectorXd& y) const { return ad_pair(x) * y; }

  // Group element through the adjoint representation, in pair coordinates.
  MatrixXd exp_ad(const VectorXd& x) const { return matrix_exp(ad_pair(x)); }

  VectorXd embed_k(const VectorXd& xk) const {
    VectorXd v = VectorXd::Zero(dim());
    v.head(dim_k_) = xk;
    return v;
  }
  VectorXd embed_p(const VectorXd& xp) const {
    VectorXd v = VectorXd::Zero(dim());
    v.tail(dim_p_) = xp;
    return v;
  }
  VectorXd k_part(const VectorXd& x) const { return x.head(dim_k_); }
  VectorXd p_part(const VectorXd& x) const { return x.tail(dim_p_); }

  // [p_i, p_j] expressed in k: returns k-coordinates.
  VectorXd bracket_pp(const VectorXd& u, const VectorXd& v) const {
    return k_part(bracket_pair(embed_p(u), embed_p(v)));
  }
  // [k_a, p_i] expressed in p.
  VectorXd bracket_kp(const VectorXd& a, const VectorXd& u) const {
    return p_part(bracket_pair(embed_k(a), embed_p(u)));
  }
  // ad of a k-vector restricted to p (a skew dp x dp matrix).
  MatrixXd ad_k_on_p(const VectorXd& a) const {
    MatrixXd m = MatrixXd::Zero(dim_p_, dim_p_);
    for (int c = 0; c < dim_k_; ++c)
      if (a(c) != 0.0) m += a(c) * ad_[c].bottomRightCorner(dim_p_, dim_p_);
    return m;
  }

  // Raw-coordinate conversions.
  VectorXd pair_coords(const VectorXd& x_raw) const {
    MatrixXd t(dim(), dim());
    t << k_basis_, p_basis_;
    return t.transpose() * model_->gram() * x_raw;
  }
  VectorXd raw_coords(const VectorXd& x_pair) const {
    return k_basis_ * x_pair.head(dim_k_) + p_basis_ * x_pair.tail(dim_p_);
  }

  // Isotropy splitting of k relative to z0 in p: h = {a : [a, z0] = 0},
  // m = orthogonal complement of h in k. Returns (h, m) as column bases in
  // k-coordinates.
  std::pair<MatrixXd, MatrixXd> stabilizer_split(const VectorXd& z0_p) const {
    MatrixXd zmap(dim_p_, dim_k_);
    for (int a = 0; a < dim_k_; ++a) zmap.col(a) = bracket_kp(VectorXd::Unit(dim_k_, a), z0_p);
    MatrixXd h = kernel_basis(zmap);
    MatrixXd m = orthonormal_complement(h, dim_k_);
    return {h, m};
  }

 private:
  std::shared_ptr<const LieAlgebraModel> model_;
  MatrixXd theta_, k_basis_, p_basis_;
  std::vector<MatrixXd> ad_;
  int dim_k_ = 0, dim_p_ = 0;
  double inclusion_residual_ = 0;
};

inline CartanDecomposition cartan_decompose(std::shared_ptr<const LieAlgebraModel> model,
                                            const MatrixXd& theta) {
  return CartanDecomposition(std::move(model), theta);
}

// ---------------------------------------------------------------------------
// Lie closure: smallest bracket-closed subspace of so(V) containing the
// given skew endomorphisms, returned as a Frobenius-orthonormal basis.
// Sweeps bracket (current basis) x (generators and current basis), then
// re-orthonormalizes; stops when the dimension is stable for a full sweep.
// ---------------------------------------------------------------------------
inline std::vector<MatrixXd> lie_closure(const std::vector<MatrixXd>& generators,
                                         double rel_tol = tol::rank_rel) {
  if (generators.empty()) return {};
  const int v = static_cast<int>(generators.front().rows());
  for (const auto& g : generators) {
    require(g.rows() == v && g.cols() == v, ErrorKind::Input, "lie_closure: mixed dimensions");
    require(skew_residual(g) <= 1e-10 * std::max(1.0, g.norm()), ErrorKind::Validation,
            "lie_closure: generator is not skew-symmetric");
  }
  auto to_cols = [&](const std::vector<MatrixXd>& ms) {
    MatrixXd cols(v * v, ms.size());
    for (size_t i = 0; i < ms.size(); ++i) cols.col(static_cast<int>(i)) = vec_of(ms[i]);
    return cols;
  };
  auto from_cols = [&](const MatrixXd& cols) {
    std::vector<MatrixXd> ms;
    for (int i = 0; i < cols.cols(); ++i) ms.push_back(mat_of(cols.col(i), v, v));
    return ms;
  };
  std::vector<MatrixXd> basis = from_cols(orthonormal_span(to_cols(generators), rel_tol));
  const int max_dim = v * (v - 1) / 2;
  for (int sweep = 0; sweep <= max_dim + 1; ++sweep) {
    std::vector<MatrixXd> pool = basis;
    for (const auto& b : basis) {
      for (const auto& g : generators) pool.push_back(b * g - g * b);
      for (const auto& b2 : basis) pool.push_back(b * b2 - b2 * b);
    }
    std::vector<MatrixXd> next = from_cols(orthonormal_span(to_cols(pool), rel_tol));
    if (next.size() == basis.size()) return basis;
    basis = std::move(next);
  }
  throw Error(ErrorKind::Accuracy, "lie_closure: did not stabilize");
}

// Residual of a set of skew endomorphisms being bracket-closed already.
inline double closure_defect(const std::vector<MatrixXd>& basis) {
  if (basis.empty()) return 0.0;
  const int v = static_cast<int>(basis.front().rows());
  MatrixXd cols(v * v, basis.size());
  for (size_t i = 0; i < basis.size(); ++i) cols.col(static_cast<int>(i)) = vec_of(basis[i]);
  MatrixXd q = orthonormal_span(cols);
  MatrixXd proj = q * q.transpose();
  double worst = 0.0;
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j) {
      MatrixXd br = basis[i] * basis[j] - basis[j] * basis[i];
      VectorXd vbr = vec_of(br);
      worst = std::max(worst, (vbr - proj * vbr).norm());
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Group elements with provenance, and Haar-style sampling of the connected
// group generated by a compact algebra of skew endomorphisms. Samples are
// products of three exponentials with coefficients uniform in [-pi, pi] per
// basis direction.
// ---------------------------------------------------------------------------
struct GroupElement {
  MatrixXd matrix;
  std::vector<VectorXd> word;  // coefficient vectors, one per exponential factor
};

inline std::vector<GroupElement> haar_sample(const std::vector<MatrixXd>& basis, int count,
                                             std::uint64_t seed) {
  require(count >= 0, ErrorKind::Input, "haar_sample: negative count");
  if (count == 0) return {};
  require(!basis.empty(), ErrorKind::Input, "haar_sample: empty algebra basis");
  for (const auto& b : basis)
    require(skew_residual(b) <= 1e-9 * std::max(1.0, b.norm()), ErrorKind::Precondition,
            "haar_sample: basis element not skew-symmetric");
  require(closure_defect(basis) <= 1e-7, ErrorKind::Precondition,
          "haar_sample: basis does not span a closed subalgebra");
  const int v = static_cast<int>(basis.front().rows());
  Rng rng(seed);
  std::vector<GroupElement> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    GroupElement g;
    g.matrix = MatrixXd::Identity(v, v);
    for (int f = 0; f < 3; ++f) {
      VectorXd coeff = random_vector(rng, static_cast<int>(basis.size()), -M_PI, M_PI);
      MatrixXd x = MatrixXd::Zero(v, v);
      for (size_t a = 0; a < basis.size(); ++a) x += coeff(static_cast<int>(a)) * basis[a];
      g.matrix = g.matrix * matrix_exp(x);
      g.word.push_back(coeff);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in algebra documents: su(n) and so(n) with the standard involutions.
//
// su(n) basis order: S_{jk} = i(E_jk + E_kj) for j<k, then A_{jk} = E_jk -
// E_kj, then D_m = i(E_mm - E_{m+1,m+1}). For su(2) this is {i s1, i s2,
// i s3} in terms of the Pauli matrices.
//
// Involution specs:
//   su(n):  "s(u(k)+u(n-k))"  -> conjugation by diag(-I_k, I_{n-k})
//           "so(n)"           -> complex conjugation (fixed set so(n))
//   so(n):  "so(k)+so(n-k)"   -> conjugation by diag(-I_k, I_{n-k})
// ---------------------------------------------------------------------------
namespace detail {

using Eigen::MatrixXcd;

inline std::vector<MatrixXcd> su_basis(int n) {
  std::vector<MatrixXcd> b;
  const std::complex<double> im(0, 1);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      MatrixXcd m = MatrixXcd::Zero(n, n);
      m(j, k) = im;
      m(k, j) = im;
      b.push_back(m);
    }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      MatrixXcd m = MatrixXcd::Zero(n, n);
      m(j, k) = 1;
      m(k, j) = -1;
      b.push_back(m);
    }
  for (int m0 = 0; m0 + 1 < n; ++m0) {
    MatrixXcd m = MatrixXcd::Zero(n, n);
    m(m0, m0) = im;
    m(m0 + 1, m0 + 1) = -im;
    b.push_back(m);
  }
  return b;
}

inline std::vector<std::string> su_labels(int n) {
  std::vector<std::string> l;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) l.push_back("S" + std::to_string(j) + std::to_string(k));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) l.push_back("A" + std::to_string(j) + std::to_string(k));
  for (int m = 0; m + 1 < n; ++m) l.push_back("D" + std::to_string(m));
  return l;
}

inline std::vector<MatrixXcd> so_basis(int n) {
  std::vector<MatrixXcd> b;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      MatrixXcd m = MatrixXcd::Zero(n, n);
      m(j, k) = 1;
      m(k, j) = -1;
      b.push_back(m);
    }
  return b;
}

inline std::vector<std::string> so_labels(int n) {
  std::vector<std::string> l;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) l.push_back("J" + std::to_string(j) + std::to_string(k));
  return l;
}

inline VectorXd real_vec(const MatrixXcd& m) {
  VectorXd v(2 * m.size());
  int idx = 0;
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) {
      v(idx++) = m(r, c).real();
      v(idx++) = m(r, c).imag();
    }
  return v;
}

// Least-squares coordinate extractor for a fixed matrix basis; the basis is
// factored once and reused.
class BasisCoords {
 public:
  explicit BasisCoords(const std::vector<MatrixXcd>& basis) : basis_(basis) {
    MatrixXd a(2 * basis.front().size(), basis.size());
    for (size_t i = 0; i < basis.size(); ++i) a.col(static_cast<int>(i)) = real_vec(basis[i]);
    a_ = a;
    qr_.compute(a);
  }
  VectorXd operator()(const MatrixXcd& target) const {
    VectorXd rhs = real_vec(target);
    VectorXd x = qr_.solve(rhs);
    require((a_ * x - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()), ErrorKind::Validation,
            "builtin algebra: element not in basis span");
    return x;
  }

 private:
  const std::vector<MatrixXcd>& basis_;
  MatrixXd a_;
  Eigen::ColPivHouseholderQR<MatrixXd> qr_;
};

inline AlgebraDocument document_from_matrices(const std::string& name,
                                              const std::vector<MatrixXcd>& basis,
                                              const std::vector<std::string>& labels,
                                              const std::function<MatrixXcd(const MatrixXcd&)>& theta,
                                              double metric_scale) {
  AlgebraDocument doc;
  doc.name = name;
  doc.dim = static_cast<int>(basis.size());
  doc.basis_labels = labels;
  doc.metric_scale = metric_scale;
  BasisCoords coords(basis);
  for (int i = 0; i < doc.dim; ++i)
    for (int j = 0; j < doc.dim; ++j) {
      if (i == j) continue;
      MatrixXcd br = basis[i] * basis[j] - basis[j] * basis[i];
      VectorXd ck = coords(br);
      for (int k = 0; k < doc.dim; ++k)
        if (std::abs(ck(k)) > 1e-12) doc.bracket.push_back({i, j, k, ck(k)});
    }
  doc.involution.resize(doc.dim, doc.dim);
  for (int j = 0; j < doc.dim; ++j) doc.involution.col(j) = coords(theta(basis[j]));
  return doc;
}

}  // namespace detail

// algebra: "su" or "so"; n: matrix size; involution as documented above.
inline AlgebraDocument builtin_algebra_document(const std::string& algebra, int n,
                                                const std::string& involution,
                                                double metric_scale = 1.0) {
  using detail::document_from_matrices;
  using Eigen::MatrixXcd;
  require(n >= 2, ErrorKind::Input, "builtin algebra: n >= 2 required");
  auto diag_conj = [n](int k) {
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d(i) = (i < k) ? -1.0 : 1.0;
    return [d](const MatrixXcd& x) { return MatrixXcd(d.asDiagonal() * x * d.asDiagonal()); };
  };
  if (algebra == "su") {
    std::function<MatrixXcd(const MatrixXcd&)> theta;
    if (involution.rfind("s(u(", 0) == 0) {
      int k = std::stoi(involution.substr(4));
      require(k >= 1 && k < n, ErrorKind::Input, "involution block size out of range");
      theta = diag_conj(k);
    } else if (involution == "so(" + std::to_string(n) + ")" || involution == "so") {
      theta = [](const MatrixXcd& x) { return MatrixXcd(x.conjugate()); };
    } else {
      throw Error(ErrorKind::Input, "unknown su involution spec: " + involution);
    }
    return document_from_matrices("su(" + std::to_string(n) + ")", detail::su_basis(n),
                                  detail::su_labels(n), theta, metric_scale);
  }
  if (algebra == "so") {
    std::function<MatrixXcd(const MatrixXcd&)> theta;
    if (involution.rfind("so(", 0) == 0) {
      int k = std::stoi(involution.substr(3));
      require(k >= 1 && k < n, ErrorKind::Input, "involution block size out of range");
      theta = diag_conj(k);
    } else {
      throw Error(ErrorKind::Input, "unknown so involution spec: " + involution);
    }
    return document_from_matrices("so(" + std::to_string(n) + ")", detail::so_basis(n),
                                  detail::so_labels(n), theta, metric_scale);
  }
  throw Error(ErrorKind::Input, "unknown builtin algebra: " + algebra);
}

}  // namespace eqf

#endif  // EQF_LIE_ALGEBRA_HPP
