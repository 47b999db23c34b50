#ifndef EQF_SYMMETRIC_SPACE_HPP
#define EQF_SYMMETRIC_SPACE_HPP

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "eqf/lie_algebra.hpp"

namespace eqf {

// Jacobi operator eigendata in a direction eta. Eigenvalues ascending;
// eigenpairs closer than the merge threshold are grouped into levels, and
// downstream focal logic consumes levels (eigenspaces), not raw lists.
struct JacobiSpectrum {
  VectorXd direction;    // unit vector, p-coordinates
  VectorXd eigenvalues;  // ascending, >= -1e-10 in compact type
  MatrixXd eigenvectors; // orthonormal columns matching eigenvalues
  struct Level {
    double value;
    int begin;
    int count;
  };
  std::vector<Level> levels;
};

struct FlatSubspace {
  MatrixXd basis;  // dp x d, orthonormal
  int dimension = 0;
};

// ---------------------------------------------------------------------------
// The symmetric space N = G/K at the tangent level. Works in the pair
// coordinates of the CartanDecomposition: T_pN is identified with p and the
// metric is the Euclidean inner product there (the model's inner product is
// scale * (-B)). Curvature sign convention: R(x,y)z = -[[x,y],z], which makes
// <R(x,y)y,x> = |[x,y]|^2 >= 0 for compact type.
// ---------------------------------------------------------------------------
class SymmetricSpaceGerm {
 public:
  explicit SymmetricSpaceGerm(std::shared_ptr<const CartanDecomposition> pair,
                              std::string base_point_label = "p")
      : pair_(std::move(pair)), base_label_(std::move(base_point_label)) {
    const auto& pr = *pair_;
    const int dk = pr.dim_k(), dp = pr.dim_p();
    adk_on_p_.reserve(dk);
    c_pp_.reserve(dk);
    for (int c = 0; c < dk; ++c) {
      adk_on_p_.push_back(pr.ad_slice(c).bottomRightCorner(dp, dp));
      MatrixXd cc(dp, dp);
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dp; ++j) cc(i, j) = pr.ad_slice(dk + i)(c, dk + j);
      c_pp_.push_back(cc);
    }
    // Generator-recovery map for the Riemannian log: vec(ad(p_i)) columns.
    const int n = pr.dim();
    log_lsq_.resize(n * n, dp);
    for (int i = 0; i < dp; ++i)
      log_lsq_.col(i) = vec_of(pr.ad_pair(pr.embed_p(VectorXd::Unit(dp, i))));
    log_qr_.compute(log_lsq_);
  }

  const CartanDecomposition& pair() const { return *pair_; }
  std::shared_ptr<const CartanDecomposition> pair_ptr() const { return pair_; }
  int dim() const { return pair_->dim_p(); }
  double metric_scale() const { return pair_->model().metric_scale(); }
  const std::string& base_point_label() const { return base_label_; }

  // Accepts either p-coordinates (size dp) or pair coordinates (size n, with
  // a vanishing k-part) and returns p-coordinates.
  VectorXd p_checked(const VectorXd& x) const {
    if (x.size() == dim()) return x;
    require(x.size() == pair_->dim(), ErrorKind::Input, "vector dimension mismatch");
    require(pair_->k_part(x).norm() <= 1e-9 * std::max(1.0, x.norm()), ErrorKind::Input,
            "vector has a k-component: not tangent to N at p");
    return pair_->p_part(x);
  }

  // R(x,y) as a skew operator on p.
  MatrixXd curvature_op(const VectorXd& x_in, const VectorXd& y_in) const {
    VectorXd x = p_checked(x_in), y = p_checked(y_in);
    const int dk = pair_->dim_k(), dp = dim();
    MatrixXd op = MatrixXd::Zero(dp, dp);
    for (int c = 0; c < dk; ++c) {
      double k_c = x.dot(c_pp_[c] * y);
      if (k_c != 0.0) op -= k_c * adk_on_p_[c];
    }
    return op;
  }

  VectorXd curvature(const VectorXd& x, const VectorXd& y, const VectorXd& z) const {
    return curvature_op(x, y) * p_checked(z);
  }

  // <R(x,y)y, x>; equals |[x,y]|^2 in this sign convention.
  double sectional_numerator(const VectorXd& x, const VectorXd& y) const {
    return p_checked(x).dot(curvature(x, y, y));
  }

  // Jacobi operator z -> R(z, eta) eta as a symmetric matrix.
  MatrixXd jacobi_operator(const VectorXd& eta_in) const {
    VectorXd eta = p_checked(eta_in);
    const int dk = pair_->dim_k(), dp = dim();
    MatrixXd j = MatrixXd::Zero(dp, dp);
    for (int c = 0; c < dk; ++c) j -= (adk_on_p_[c] * eta) * (c_pp_[c] * eta).transpose();
    return j;
  }

  JacobiSpectrum jacobi_spectrum(const VectorXd& eta_in, double merge_tol = 1e-8) const {
    VectorXd eta = p_checked(eta_in);
    require(eta.norm() > 0, ErrorKind::Input, "jacobi_spectrum: degenerate direction eta = 0");
    MatrixXd j = jacobi_operator(eta);
    require(sym_residual(j) <= 1e-9 * std::max(1.0, j.norm()), ErrorKind::Validation,
            "Jacobi operator not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (j + j.transpose()));
    JacobiSpectrum sp;
    sp.direction = eta / eta.norm();
    sp.eigenvalues = es.eigenvalues();
    sp.eigenvectors = es.eigenvectors();
    const double lmax = std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
    require(sp.eigenvalues.minCoeff() >= -1e-10 * lmax, ErrorKind::Validation,
            "negative Jacobi eigenvalue on a compact-type germ");
    int i = 0;
    while (i < sp.eigenvalues.size()) {
      int j2 = i;
      while (j2 + 1 < sp.eigenvalues.size() &&
             sp.eigenvalues(j2 + 1) - sp.eigenvalues(i) <= merge_tol * lmax)
        ++j2;
      sp.levels.push_back({sp.eigenvalues.segment(i, j2 - i + 1).mean(), i, j2 - i + 1});
      i = j2 + 1;
    }
    return sp;
  }

  // Maximal abelian subspace of p containing eta, by iterated centralizer
  // intersection. Exit certificate: the centralizer of the output equals the
  // output, so no abelian extension exists.
  FlatSubspace maximal_abelian_through(const VectorXd& eta_in) const {
    VectorXd eta = p_checked(eta_in);
    require(eta.norm() > 0, ErrorKind::Input, "maximal_abelian_through: eta = 0");
    const int dp = dim(), dk = pair_->dim_k();
    MatrixXd s = eta.normalized();
    for (int guard = 0; guard <= dp; ++guard) {
      MatrixXd stacked(dk * s.cols(), dp);
      for (int c0 = 0; c0 < s.cols(); ++c0)
        for (int c = 0; c < dk; ++c) stacked.row(c0 * dk + c) = s.col(c0).transpose() * c_pp_[c];
      MatrixXd z = kernel_basis(stacked);
      if (z.cols() == s.cols()) {
        FlatSubspace flat;
        flat.basis = orthonormal_span(s);
        flat.dimension = static_cast<int>(flat.basis.cols());
        double worst = 0;
        for (int a = 0; a < flat.dimension; ++a)
          for (int b = a + 1; b < flat.dimension; ++b)
            worst = std::max(worst, pair_->bracket_pp(flat.basis.col(a), flat.basis.col(b)).norm());
        require(worst <= 1e-10 * std::max(1.0, pair_->max_structure_constant()),
                ErrorKind::Validation, "maximal_abelian_through: output not abelian");
        return flat;
      }
      // adjoin the centralizer direction farthest from span(s)
      MatrixXd proj = subspace_projector(orthonormal_span(s));
      int best = -1;
      double best_res = 0;
      for (int c0 = 0; c0 < z.cols(); ++c0) {
        double res = (z.col(c0) - proj * z.col(c0)).norm();
        if (res > best_res) {
          best_res = res;
          best = c0;
        }
      }
      require(best >= 0 && best_res > 1e-10, ErrorKind::Validation,
              "maximal_abelian_through: centralizer degenerate");
      VectorXd add = z.col(best) - proj * z.col(best);
      s.conservativeResize(dp, s.cols() + 1);
      s.col(s.cols() - 1) = add / add.norm();
    }
    throw Error(ErrorKind::Accuracy, "maximal_abelian_through: did not terminate");
  }

  int rank() const {
    // rank of the pair = dimension of a maximal abelian subspace through a
    // generic direction (max over a few seeded samples).
    Rng rng(20240901);
    int r = 0;
    for (int t = 0; t < 4; ++t) r = std::max(r, maximal_abelian_through(random_unit(rng, dim())).dimension);
    return r;
  }

  // --- points of N via the adjoint representation --------------------------

  struct Point {
    MatrixXd ad;  // Ad(g) in pair coordinates; the base point is the identity
  };

  Point base_point() const { return {MatrixXd::Identity(pair_->dim(), pair_->dim())}; }

  // exp^N at the base point: eta in p-coordinates.
  Point exp_point(const VectorXd& eta_in) const {
    VectorXd eta = p_checked(eta_in);
    return {pair_->exp_ad(pair_->embed_p(eta))};
  }

  static Point translate(const Point& g, const Point& q) { return {g.ad * q.ad}; }

  // Riemannian log at the base point: x in p with exp(x) p = q (principal
  // branch). Uses the involution trick: Ad(g) Theta Ad(g)^T Theta = exp(2 ad_x).
  VectorXd log_to_base(const Point& q, double* residual_out = nullptr) const {
    const int n = pair_->dim(), dk = pair_->dim_k();
    VectorXd theta_diag(n);
    theta_diag.head(dk).setOnes();
    theta_diag.tail(n - dk).setConstant(-1.0);
    MatrixXd m = q.ad * theta_diag.asDiagonal() * q.ad.transpose() * theta_diag.asDiagonal();
    MatrixXd skew = 0.5 * rotation_log(m);
    VectorXd x = log_qr_.solve(vec_of(skew));
    double res = (log_lsq_ * x - vec_of(skew)).norm();
    if (residual_out) *residual_out = res;
    require(res <= 1e-7 * std::max(1.0, skew.norm()), ErrorKind::Accuracy,
            "log_to_base: point not in the principal-log domain");
    return x;
  }

  double distance(const Point& a, const Point& b) const {
    return log_to_base(Point{a.ad.transpose() * b.ad}).norm();
  }

  // Parallel transport inside a flat: along the geodesic exp(t*dir) with
  // dir in A, vectors keep their p-coordinates in the transported frame;
  // the global algebra generator is rotated by Ad(exp(t dir)).
  struct FlatTransport {
    VectorXd local;      // p-coordinates at the endpoint frame (unchanged)
    VectorXd generator;  // pair-coordinate generator of the transported vector
    Point endpoint;
  };
  FlatTransport transport_along_flat(const FlatSubspace& flat, const VectorXd& from,
                                     const VectorXd& dir_in, double t) const {
    VectorXd dir = p_checked(dir_in);
    MatrixXd q = orthonormal_span(flat.basis);
    require((dir - q * (q.transpose() * dir)).norm() <= 1e-9 * std::max(1.0, dir.norm()),
            ErrorKind::Input, "transport_along_flat: direction not inside the flat");
    VectorXd v = p_checked(from);
    FlatTransport out;
    out.local = v;
    MatrixXd g = pair_->exp_ad(pair_->embed_p(t * dir));
    out.generator = g * pair_->embed_p(v);
    out.endpoint = {g};
    return out;
  }

 private:
  std::shared_ptr<const CartanDecomposition> pair_;
  std::string base_label_;
  std::vector<MatrixXd> adk_on_p_;  // ad of k-basis restricted to p
  std::vector<MatrixXd> c_pp_;      // [u,v]_k component c = u^T c_pp_[c] v
  MatrixXd log_lsq_;
  Eigen::ColPivHouseholderQR<MatrixXd> log_qr_;
};

using SpacePoint = SymmetricSpaceGerm::Point;

}  // namespace eqf

#endif  // EQF_SYMMETRIC_SPACE_HPP
