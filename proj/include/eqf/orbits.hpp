#ifndef EQF_ORBITS_HPP
#define EQF_ORBITS_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eqf/symmetric_space.hpp"

namespace eqf {

// ---------------------------------------------------------------------------
// Pointwise submanifold data. For a Euclidean ambient the surrounding space is
// the p of a Cartan pair with its inner product; for a space ambient it is the
// symmetric space germ rebased to the orbit point (base_ad carries the Ad
// matrix of the point, and all local data are p-coordinates in the rebased
// frame).
// ---------------------------------------------------------------------------
struct OrbitGerm {
  enum class Ambient { Euclidean, Space };
  Ambient ambient = Ambient::Euclidean;
  std::shared_ptr<const SymmetricSpaceGerm> space;

  VectorXd z0;       // Euclidean ambients: the orbit point in p
  MatrixXd base_ad;  // Space ambients: Ad(g) of the orbit point

  MatrixXd tangent;             // dp x m, orthonormal
  MatrixXd normal;              // dp x c, orthonormal
  std::vector<MatrixXd> shape;  // c slices (m x m, symmetric): A along normal.col(k)
  double epsilon = 0;           // tube radius; estimated from focal data, not assumed

  int ambient_dim() const { return static_cast<int>(tangent.rows()); }
  int dim_m() const { return static_cast<int>(tangent.cols()); }
  int codim() const { return static_cast<int>(normal.cols()); }

  // xi in normal-basis coordinates.
  MatrixXd shape_op(const VectorXd& xi) const {
    require(xi.size() == codim(), ErrorKind::Input, "shape_op: normal coordinate size mismatch");
    MatrixXd a = MatrixXd::Zero(dim_m(), dim_m());
    for (int k = 0; k < codim(); ++k)
      if (xi(k) != 0.0) a += xi(k) * shape[k];
    return a;
  }

  // Normal-basis coordinates of a p-coordinate vector that lies in the
  // normal space (validated).
  VectorXd normal_coords(const VectorXd& v_p) const {
    require(v_p.size() == ambient_dim(), ErrorKind::Input, "normal_coords: dimension mismatch");
    VectorXd c = normal.transpose() * v_p;
    require((v_p - normal * c).norm() <= 1e-7 * std::max(1.0, v_p.norm()), ErrorKind::Input,
            "normal_coords: vector not in the normal space");
    return c;
  }
  VectorXd tangent_coords(const VectorXd& v_p) const {
    VectorXd c = tangent.transpose() * v_p;
    require((v_p - tangent * c).norm() <= 1e-7 * std::max(1.0, v_p.norm()), ErrorKind::Input,
            "tangent_coords: vector not in the tangent space");
    return c;
  }

  // Ambient curvature in local coordinates (zero for Euclidean ambients).
  MatrixXd amb_curvature_op(const VectorXd& x, const VectorXd& y) const {
    if (ambient == Ambient::Euclidean) return MatrixXd::Zero(ambient_dim(), ambient_dim());
    return space->curvature_op(x, y);
  }
  JacobiSpectrum amb_jacobi(const VectorXd& eta) const {
    if (ambient == Ambient::Euclidean) {
      JacobiSpectrum sp;
      sp.direction = eta.normalized();
      sp.eigenvalues = VectorXd::Zero(ambient_dim());
      sp.eigenvectors = MatrixXd::Identity(ambient_dim(), ambient_dim());
      sp.levels.push_back({0.0, 0, ambient_dim()});
      return sp;
    }
    return space->jacobi_spectrum(eta);
  }

  // exp^N of a local tangent vector at the germ base, as a point object.
  // Euclidean ambients return coordinates in p directly.
  SpacePoint exp_point(const VectorXd& eta_local) const {
    require(ambient == Ambient::Space, ErrorKind::Input, "exp_point: space ambient required");
    const auto& pr = space->pair();
    VectorXd gen = base_ad * pr.embed_p(eta_local);
    return {matrix_exp(pr.ad_pair(gen)) * base_ad};
  }
  VectorXd exp_euclidean(const VectorXd& eta_local) const {
    require(ambient == Ambient::Euclidean, ErrorKind::Input, "exp_euclidean: euclidean ambient");
    return z0 + eta_local;
  }

  double shape_symmetry_residual() const {
    double r = 0;
    for (const auto& a : shape) r = std::max(r, sym_residual(a));
    return r;
  }
};

// ---------------------------------------------------------------------------
// Curves on orbits are one-parameter subgroup segments and concatenations;
// generators are coordinates in the acting algebra of the orbit.
// ---------------------------------------------------------------------------
struct Segment {
  VectorXd gen;
  double len = 0;
};
using CurveWord = std::vector<Segment>;

struct TransportedFrame {
  std::vector<double> ts;
  std::vector<MatrixXd> frames;  // transport-ambient orthonormal frames of the normal spaces
  std::string method;            // "ode" or "closed-form"
};

// ---------------------------------------------------------------------------
// Orbit interface: produces germs along the orbit and the data the transport
// integrator needs. "state" is the acting-group element: a dp x dp matrix on
// p for s-representation orbits, an n x n Ad matrix for Hermann orbits.
// ---------------------------------------------------------------------------
class Orbit {
 public:
  virtual ~Orbit() = default;
  virtual const SymmetricSpaceGerm& space() const = 0;
  virtual int acting_dim() const = 0;
  virtual int transport_dim() const = 0;
  virtual MatrixXd identity_state() const = 0;
  virtual MatrixXd generator_op(const VectorXd& gen) const = 0;  // acting algebra -> matrix on states
  virtual OrbitGerm germ_at_state(const MatrixXd& state) const = 0;
  // Orthonormal frame of the normal space at `state`, as columns in the
  // transport ambient R^transport_dim.
  virtual MatrixXd normal_frame(const MatrixXd& state) const = 0;
  // Local (germ p-coordinate) vectors <-> transport-ambient vectors at state.
  virtual VectorXd local_to_transport(const MatrixXd& state, const VectorXd& local) const = 0;
  virtual VectorXd transport_to_local(const MatrixXd& state, const VectorXd& amb) const = 0;
  // Acting-algebra generator whose orbit curve leaves the state's point with
  // velocity t_local (least squares; residual checked).
  virtual VectorXd generator_for_tangent(const MatrixXd& state, const VectorXd& t_local) const = 0;

  MatrixXd step_state(const MatrixXd& state, const VectorXd& gen, double t) const {
    return matrix_exp(t * generator_op(gen)) * state;
  }
  MatrixXd end_state(const CurveWord& w) const {
    MatrixXd s = identity_state();
    for (const auto& seg : w) s = step_state(s, seg.gen, seg.len);
    return s;
  }
  OrbitGerm base_germ() const { return germ_at_state(identity_state()); }
};

// ---------------------------------------------------------------------------
// s-representation orbit M = K z0 inside the Euclidean space p.
// Tangent space {[a, z0] : a in k}, normal space {eta : [eta, z0] = 0},
// shape operator <A_xi [a,z0], [b,z0]> from the second-order orbit expansion.
// ---------------------------------------------------------------------------
class SRepOrbit : public Orbit {
 public:
  SRepOrbit(std::shared_ptr<const SymmetricSpaceGerm> pair_germ, VectorXd z0)
      : space_(std::move(pair_germ)), z0_(std::move(z0)) {
    require(z0_.size() == space_->dim(), ErrorKind::Input, "srep orbit: z0 dimension mismatch");
    require(z0_.norm() > 0, ErrorKind::Input, "srep orbit: degenerate orbit through z0 = 0");
    const auto& pr = space_->pair();
    for (int a = 0; a < pr.dim_k(); ++a)
      adk_.push_back(pr.ad_k_on_p(VectorXd::Unit(pr.dim_k(), a)));
  }

  const SymmetricSpaceGerm& space() const override { return *space_; }
  const VectorXd& z0() const { return z0_; }
  int acting_dim() const override { return space_->pair().dim_k(); }
  int transport_dim() const override { return space_->dim(); }
  MatrixXd identity_state() const override {
    return MatrixXd::Identity(space_->dim(), space_->dim());
  }
  MatrixXd generator_op(const VectorXd& gen) const override {
    MatrixXd op = MatrixXd::Zero(space_->dim(), space_->dim());
    for (int a = 0; a < gen.size(); ++a)
      if (gen(a) != 0.0) op += gen(a) * adk_[a];
    return op;
  }

  OrbitGerm germ_at_state(const MatrixXd& state) const override {
    const auto& pr = space_->pair();
    const int dp = space_->dim(), dk = pr.dim_k();
    VectorXd z = state * z0_;
    OrbitGerm g;
    g.ambient = OrbitGerm::Ambient::Euclidean;
    g.space = space_;
    g.z0 = z;
    MatrixXd tspan(dp, dk);
    for (int a = 0; a < dk; ++a) tspan.col(a) = adk_[a] * z;
    g.tangent = canonical_basis(tspan);
    g.normal = canonical_complement(g.tangent, dp);
    // normal = kernel of ad(z)|p as well; certified here.
    for (int c = 0; c < g.normal.cols(); ++c)
      require(pr.bracket_pp(g.normal.col(c), z).norm() <= 1e-8 * std::max(1.0, z.norm()),
              ErrorKind::Validation, "srep germ: normal space is not the centralizer of z0");
    // generators for the orthonormal tangent basis
    Eigen::ColPivHouseholderQR<MatrixXd> qr(tspan);
    const int m = g.dim_m();
    std::vector<MatrixXd> adk_gen(m);
    for (int i = 0; i < m; ++i) {
      VectorXd a = qr.solve(g.tangent.col(i));
      require((tspan * a - g.tangent.col(i)).norm() <= 1e-8, ErrorKind::Validation,
              "srep germ: tangent generator solve failed");
      adk_gen[i] = generator_op(a);
    }
    g.shape.resize(g.codim());
    for (int k = 0; k < g.codim(); ++k) {
      MatrixXd a(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          a(i, j) = 0.5 * (g.normal.col(k).dot(adk_gen[i] * g.tangent.col(j)) +
                           g.normal.col(k).dot(adk_gen[j] * g.tangent.col(i)));
      require(sym_residual(a) <= 1e-9 * std::max(1.0, a.norm()), ErrorKind::Validation,
              "srep germ: shape operator not symmetric");
      g.shape[k] = 0.5 * (a + a.transpose());
    }
    return g;
  }

  MatrixXd normal_frame(const MatrixXd& state) const override {
    return germ_at_state(state).normal;
  }
  VectorXd local_to_transport(const MatrixXd&, const VectorXd& local) const override {
    return local;
  }
  VectorXd transport_to_local(const MatrixXd&, const VectorXd& amb) const override { return amb; }

  VectorXd generator_for_tangent(const MatrixXd& state, const VectorXd& t_local) const override {
    const int dk = acting_dim(), dp = transport_dim();
    VectorXd z = state * z0_;
    MatrixXd tspan(dp, dk);
    for (int a = 0; a < dk; ++a) tspan.col(a) = adk_[a] * z;
    VectorXd gen = tspan.colPivHouseholderQr().solve(t_local);
    require((tspan * gen - t_local).norm() <= 1e-8 * std::max(1.0, t_local.norm()),
            ErrorKind::Input, "generator_for_tangent: vector not tangent to the orbit");
    return gen;
  }

  // Closed-form transport exp(tm)_* along the curve exp(tm) z0 for m in the
  // stabilizer complement.
  VectorXd closed_form_transport(const VectorXd& m_kcoords, double t, const VectorXd& v) const {
    return matrix_exp(t * generator_op(m_kcoords)) * v;
  }

 private:
  std::shared_ptr<const SymmetricSpaceGerm> space_;
  VectorXd z0_;
  std::vector<MatrixXd> adk_;
};

// ---------------------------------------------------------------------------
// Hermann-action orbit: a symmetric subalgebra ktilde of g acting on N = G/K.
// The germ at q = g p works in the rebased pair frame at q; the orbit tangent
// is the projection to p_q of ktilde, the shape operator comes from the
// Killing-field covariant derivative [Y_k, v] evaluated in the Lie model.
// ---------------------------------------------------------------------------
class HermannOrbit : public Orbit {
 public:
  // ktilde: pair-coordinate columns spanning the acting subalgebra;
  // offset: p-coordinates of the base point exp(offset) p.
  HermannOrbit(std::shared_ptr<const SymmetricSpaceGerm> space, const MatrixXd& ktilde,
               const VectorXd& offset)
      : space_(std::move(space)) {
    const auto& pr = space_->pair();
    require(ktilde.rows() == pr.dim(), ErrorKind::Input, "hermann orbit: ktilde rows != dim g");
    ktilde_ = orthonormal_span(ktilde);
    // validation: bracket-closed subalgebra
    double worst = 0;
    MatrixXd proj = subspace_projector(ktilde_);
    for (int a = 0; a < ktilde_.cols(); ++a)
      for (int b = a + 1; b < ktilde_.cols(); ++b) {
        VectorXd br = pr.bracket_pair(ktilde_.col(a), ktilde_.col(b));
        worst = std::max(worst, (br - proj * br).norm());
      }
    require(worst <= 1e-8 * std::max(1.0, pr.max_structure_constant()), ErrorKind::Validation,
            "hermann orbit: acting set is not a subalgebra (closure defect " +
                std::to_string(worst) + ")");
    require(offset.size() == pr.dim_p(), ErrorKind::Input, "hermann orbit: offset size");
    base_ad_ = pr.exp_ad(pr.embed_p(offset));
  }

  const SymmetricSpaceGerm& space() const override { return *space_; }
  const MatrixXd& ktilde() const { return ktilde_; }
  const MatrixXd& base_ad() const { return base_ad_; }
  int acting_dim() const override { return static_cast<int>(ktilde_.cols()); }
  int transport_dim() const override { return space_->pair().dim(); }
  MatrixXd identity_state() const override {
    const int n = space_->pair().dim();
    return MatrixXd::Identity(n, n);
  }
  MatrixXd generator_op(const VectorXd& gen) const override {
    return space_->pair().ad_pair(ktilde_ * gen);
  }

  // state = Ad(g) with g in the acting group; the orbit point is g exp(off) p.
  OrbitGerm germ_at_state(const MatrixXd& state) const override {
    const auto& pr = space_->pair();
    const int dp = pr.dim_p();
    MatrixXd rebase = state * base_ad_;
    OrbitGerm g;
    g.ambient = OrbitGerm::Ambient::Space;
    g.space = space_;
    g.base_ad = rebase;
    // local acting algebra h = Ad(g g0)^-1 ktilde
    MatrixXd h = rebase.transpose() * ktilde_;
    MatrixXd tspan(dp, h.cols());
    for (int a = 0; a < h.cols(); ++a) tspan.col(a) = pr.p_part(h.col(a));
    g.tangent = canonical_basis(tspan);
    g.normal = canonical_complement(g.tangent, dp);
    const int m = g.dim_m();
    // Y_i in h with p-part = tangent.col(i)
    Eigen::ColPivHouseholderQR<MatrixXd> qr(tspan);
    MatrixXd yk(pr.dim_k(), m);
    for (int i = 0; i < m; ++i) {
      VectorXd coef = qr.solve(g.tangent.col(i));
      require((tspan * coef - g.tangent.col(i)).norm() <= 1e-8, ErrorKind::Validation,
              "hermann germ: tangent generator solve failed");
      yk.col(i) = pr.k_part(h * coef);
    }
    g.shape.resize(g.codim());
    for (int k = 0; k < g.codim(); ++k) {
      MatrixXd a(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double aij = g.normal.col(k).dot(pr.bracket_kp(yk.col(i), g.tangent.col(j)));
          double aji = g.normal.col(k).dot(pr.bracket_kp(yk.col(j), g.tangent.col(i)));
          a(i, j) = 0.5 * (aij + aji);
        }
      require(sym_residual(a) <= 1e-8 * std::max(1.0, a.norm()), ErrorKind::Validation,
              "hermann germ: shape operator not symmetric");
      g.shape[k] = 0.5 * (a + a.transpose());
    }
    return g;
  }

  MatrixXd normal_frame(const MatrixXd& state) const override {
    OrbitGerm g = germ_at_state(state);
    const auto& pr = space_->pair();
    MatrixXd frame(pr.dim(), g.codim());
    for (int c = 0; c < g.codim(); ++c) frame.col(c) = g.base_ad * pr.embed_p(g.normal.col(c));
    return frame;
  }
  VectorXd local_to_transport(const MatrixXd& state, const VectorXd& local) const override {
    const auto& pr = space_->pair();
    return state * base_ad_ * pr.embed_p(local);
  }
  VectorXd transport_to_local(const MatrixXd& state, const VectorXd& amb) const override {
    const auto& pr = space_->pair();
    VectorXd rel = (state * base_ad_).transpose() * amb;
    require(pr.k_part(rel).norm() <= 1e-6 * std::max(1.0, amb.norm()), ErrorKind::Accuracy,
            "transport_to_local: vector drifted out of the tangent space");
    return pr.p_part(rel);
  }

  VectorXd generator_for_tangent(const MatrixXd& state, const VectorXd& t_local) const override {
    const auto& pr = space_->pair();
    MatrixXd rebase = state * base_ad_;
    MatrixXd h = rebase.transpose() * ktilde_;
    MatrixXd tspan(pr.dim_p(), h.cols());
    for (int a = 0; a < h.cols(); ++a) tspan.col(a) = pr.p_part(h.col(a));
    VectorXd gen = tspan.colPivHouseholderQr().solve(t_local);
    require((tspan * gen - t_local).norm() <= 1e-8 * std::max(1.0, t_local.norm()),
            ErrorKind::Input, "generator_for_tangent: vector not tangent to the orbit");
    return gen;
  }

  SpacePoint point_at_state(const MatrixXd& state) const { return {state * base_ad_}; }

 private:
  std::shared_ptr<const SymmetricSpaceGerm> space_;
  MatrixXd ktilde_;
  MatrixXd base_ad_;
};

// Convenience: the acting subalgebra fixed by a second involution, as
// pair-coordinate columns (a Hermann subgroup).
inline MatrixXd fixed_subalgebra(const CartanDecomposition& pr, const MatrixXd& theta2_raw) {
  const int n = pr.dim();
  MatrixXd cols(n, n);
  MatrixXd t(n, n);
  t << pr.k_basis(), pr.p_basis();
  MatrixXd theta2_pair = t.transpose() * pr.model().gram() * theta2_raw * t;
  return orthonormal_span(theta2_pair + MatrixXd::Identity(n, n));
}

// ---------------------------------------------------------------------------
// Normal parallel transport along a curve word: integrates V' = P'(t) V where
// P(t) is the projector onto the normal generators (the ambient covariant
// derivative is projected to the normal space at every step). RK4 with
// central-difference P'; norm drift is monitored against the accuracy budget.
// ---------------------------------------------------------------------------
struct TransportResult {
  MatrixXd vectors;    // transport-ambient columns at the end point
  MatrixXd frame_map;  // c x c map: normal basis at start -> normal basis at end
  TransportedFrame frame;
  double norm_drift = 0;
  MatrixXd end_state;
};

inline TransportResult normal_parallel_transport(const Orbit& orbit, const CurveWord& word,
                                                 const MatrixXd& vectors_local, double step = 0.01,
                                                 const MatrixXd& start_state = MatrixXd()) {
  require(step > 0, ErrorKind::Input, "transport: step must be positive");
  const MatrixXd id = start_state.size() > 0 ? start_state : orbit.identity_state();
  OrbitGerm g0 = orbit.germ_at_state(id);
  const int c = g0.codim();
  MatrixXd v(orbit.transport_dim(), vectors_local.cols());
  for (int j = 0; j < vectors_local.cols(); ++j) {
    g0.normal_coords(vectors_local.col(j));  // validates membership
    v.col(j) = orbit.local_to_transport(id, vectors_local.col(j));
  }
  VectorXd start_norms(v.cols());
  for (int j = 0; j < v.cols(); ++j) start_norms(j) = v.col(j).norm();

  TransportResult out;
  out.frame.method = "ode";
  MatrixXd state = id;
  MatrixXd prev_frame;
  const double fd = 1e-5;
  for (const auto& seg : word) {
    if (seg.len == 0.0) continue;
    const double dir = seg.len > 0 ? 1.0 : -1.0;
    const double total = std::abs(seg.len);
    const int nsteps = std::max(1, static_cast<int>(std::ceil(total / step)));
    const double h = dir * total / nsteps;
    MatrixXd gen_op = orbit.generator_op(seg.gen);
    MatrixXd e_h = matrix_exp(h * gen_op);
    MatrixXd e_h2 = matrix_exp(0.5 * h * gen_op);
    MatrixXd e_fd = matrix_exp(fd * gen_op);
    auto proj_at = [&](const MatrixXd& s) {
      MatrixXd f = orbit.normal_frame(s);
      return MatrixXd(f * f.transpose());
    };
    auto dproj = [&](const MatrixXd& s) {
      MatrixXd plus = proj_at(e_fd * s);
      MatrixXd minus = proj_at(MatrixXd(e_fd.transpose() * s));
      return MatrixXd((plus - minus) / (2 * fd));
    };
    for (int k = 0; k < nsteps; ++k) {
      MatrixXd s_mid = e_h2 * state;
      MatrixXd s_end = e_h * state;
      MatrixXd d0 = dproj(state), d1 = dproj(s_mid), d2 = dproj(s_end);
      MatrixXd k1 = d0 * v;
      MatrixXd k2 = d1 * (v + 0.5 * h * k1);
      MatrixXd k3 = d1 * (v + 0.5 * h * k2);
      MatrixXd k4 = d2 * (v + h * k3);
      v += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
      state = s_end;
      // keep the iterate on the constraint manifold
      MatrixXd p_end = proj_at(state);
      v = p_end * v;
      MatrixXd fr = orbit.normal_frame(state);
      if (prev_frame.size() > 0 && fr.cols() == prev_frame.cols()) fr = align_basis(fr, prev_frame);
      prev_frame = fr;
      out.frame.ts.push_back(out.frame.ts.empty() ? std::abs(h) : out.frame.ts.back() + std::abs(h));
      out.frame.frames.push_back(fr);
    }
  }
  for (int j = 0; j < v.cols(); ++j)
    out.norm_drift = std::max(out.norm_drift, std::abs(v.col(j).norm() - start_norms(j)));
  require(out.norm_drift <= 1e-4, ErrorKind::Accuracy,
          "transport: norm drift " + std::to_string(out.norm_drift) +
              " exceeds budget; suggested step " + std::to_string(step / 4));
  out.vectors = v;
  out.end_state = state;
  // frame map in normal-basis coordinates of the two germs
  OrbitGerm g1 = orbit.germ_at_state(state);
  bool have_full_basis = vectors_local.cols() == c;
  if (have_full_basis) {
    MatrixXd local_end(g1.ambient_dim(), c);
    for (int j = 0; j < c; ++j)
      local_end.col(j) = orbit.transport_to_local(state, v.col(j));
    out.frame_map = g1.normal.transpose() * local_end;
  }
  return out;
}

// Transport the germ's full normal basis and return the frame isometry
// psi = (parallel transport along the word): c x c in normal-basis coords.
inline TransportResult transport_normal_basis(const Orbit& orbit, const CurveWord& word,
                                              double step = 0.01,
                                              const MatrixXd& start_state = MatrixXd()) {
  OrbitGerm g0 = start_state.size() > 0 ? orbit.germ_at_state(start_state) : orbit.base_germ();
  TransportResult r = normal_parallel_transport(orbit, word, g0.normal, step, start_state);
  require(orthogonality_residual(r.frame_map) <= 1e-6, ErrorKind::Accuracy,
          "transport: frame map not orthogonal within budget");
  return r;
}

// Exactly closing segment for a word whose end state is near the identity:
// appends exp(-log(state)). The log must lie in the acting algebra.
inline CurveWord close_word(const Orbit& orbit, const CurveWord& open) {
  MatrixXd state = orbit.end_state(open);
  MatrixXd logm = rotation_log(state);
  const int ad = orbit.acting_dim();
  MatrixXd gens(logm.size(), ad);
  for (int a = 0; a < ad; ++a)
    gens.col(a) = vec_of(orbit.generator_op(VectorXd::Unit(ad, a)));
  VectorXd coef = gens.colPivHouseholderQr().solve(vec_of(logm));
  require((gens * coef - vec_of(logm)).norm() <= 1e-7 * std::max(1.0, logm.norm()),
          ErrorKind::Accuracy, "close_word: state log not in the acting algebra");
  CurveWord closed = open;
  closed.push_back({-coef, 1.0});
  return closed;
}

// Commutator loop: flows along g1, g2, -g1, -g2 then closes exactly.
inline CurveWord commutator_loop(const Orbit& orbit, const VectorXd& g1, const VectorXd& g2,
                                 double s) {
  CurveWord w = {{g1, s}, {g2, s}, {g1, -s}, {g2, -s}};
  return close_word(orbit, w);
}

// Sampled points (|c) eta over a set of curves; all transported copies keep
// the norm of eta within the transport budget.
struct HolonomySample {
  MatrixXd end_state;
  VectorXd local;  // transported eta in the end germ's p-coordinates
};

inline std::vector<HolonomySample> holonomy_tube_sample(const Orbit& orbit, const OrbitGerm& germ,
                                                        const VectorXd& eta,
                                                        const std::vector<CurveWord>& curves,
                                                        double step = 0.01) {
  require(germ.epsilon > 0, ErrorKind::Dependency,
          "holonomy_tube_sample: tube radius epsilon not estimated yet");
  require(eta.norm() < germ.epsilon, ErrorKind::Input,
          "holonomy_tube_sample: |eta| >= epsilon (outside the tube)");
  std::vector<HolonomySample> out;
  out.push_back({orbit.identity_state(), eta});
  for (const auto& w : curves) {
    TransportResult r = normal_parallel_transport(orbit, w, eta, step);
    VectorXd loc = orbit.transport_to_local(r.end_state, r.vectors.col(0));
    require(std::abs(loc.norm() - eta.norm()) <= 1e-6 * std::max(1.0, eta.norm()),
            ErrorKind::Accuracy, "holonomy_tube_sample: transported norm drifted");
    out.push_back({r.end_state, loc});
  }
  return out;
}

// ---------------------------------------------------------------------------
// An s-representation orbit rescaled onto the round sphere of its own radius
// and treated as a submanifold of the sphere germ (so(v), so(v-1)). The
// sphere model's metric scale is chosen so its sectional curvature is 1/R^2,
// which makes the Killing-field evaluation at the pole an isometry between
// model p-coordinates and Euclidean tangent vectors.
// ---------------------------------------------------------------------------
class SphericalSRepOrbit : public Orbit {
 public:
  explicit SphericalSRepOrbit(std::shared_ptr<const SRepOrbit> flat) : flat_(std::move(flat)) {
    const int v = flat_->space().dim();
    radius_ = flat_->z0().norm();
    pole_ = flat_->z0() / radius_;
    // sphere model at scale 1, then rescale to sectional curvature 1/R^2
    auto doc = builtin_algebra_document("so", v, "so(" + std::to_string(v - 1) + ")", 1.0);
    auto probe_model = std::make_shared<const LieAlgebraModel>(LieAlgebraModel::from_document(doc));
    auto probe_pair = std::make_shared<const CartanDecomposition>(probe_model, probe_model->involution_candidate());
    SymmetricSpaceGerm probe(probe_pair);
    VectorXd e0 = VectorXd::Unit(probe.dim(), 0), e1 = VectorXd::Unit(probe.dim(), 1);
    double sec1 = probe.sectional_numerator(e0, e1);
    doc.metric_scale = sec1 * radius_ * radius_;
    auto model = std::make_shared<const LieAlgebraModel>(LieAlgebraModel::from_document(doc));
    auto pair = std::make_shared<const CartanDecomposition>(model, model->involution_candidate());
    sphere_ = std::make_shared<const SymmetricSpaceGerm>(pair, "sphere pole");

    // raw so(v) matrices of the p-basis columns; J-basis order of the builtin
    auto j_index = [&](int a, int b) {  // a < b
      int idx = 0;
      for (int j = 0; j < v; ++j)
        for (int k = j + 1; k < v; ++k) {
          if (j == a && k == b) return idx;
          ++idx;
        }
      return -1;
    };
    raw_mat_ = [v, j_index](const VectorXd& raw) {
      MatrixXd m = MatrixXd::Zero(v, v);
      for (int a = 0; a < v; ++a)
        for (int b = a + 1; b < v; ++b) {
          double c = raw(j_index(a, b));
          m(a, b) += c;
          m(b, a) -= c;
        }
      return m;
    };
    // The builtin pair (so(v), so(v-1)) fixes the block of the first v-1
    // indices, so its pole axis is the last coordinate e_{v-1}; to_pole_
    // rotates that axis onto pole_.
    MatrixXd comp = orthonormal_complement(pole_, v);
    MatrixXd to_pole(v, v);
    to_pole.leftCols(v - 1) = comp;
    to_pole.col(v - 1) = pole_;
    if (to_pole.determinant() < 0) to_pole.col(0) *= -1.0;
    to_pole_ = to_pole;

    const int dp = sphere_->dim();
    eval_ = MatrixXd(v, dp);
    for (int i = 0; i < dp; ++i) {
      VectorXd raw = pair->p_basis().col(i);
      eval_.col(i) = raw_mat_(raw) * (radius_ * VectorXd::Unit(v, v - 1));
    }
    require(orthogonality_residual(eval_) <= 1e-8, ErrorKind::Validation,
            "spherical orbit: Killing evaluation at the pole is not an isometry");
  }

  const SymmetricSpaceGerm& space() const override { return *sphere_; }
  const SRepOrbit& flat() const { return *flat_; }
  double radius() const { return radius_; }
  int acting_dim() const override { return flat_->acting_dim(); }
  int transport_dim() const override { return flat_->transport_dim(); }
  MatrixXd identity_state() const override { return flat_->identity_state(); }
  MatrixXd generator_op(const VectorXd& gen) const override { return flat_->generator_op(gen); }

  // Rotation of R^v taking the pole to the unit vector u, through their
  // common 2-plane.
  MatrixXd pole_rotation(const VectorXd& u) const {
    const int v = static_cast<int>(u.size());
    VectorXd w = u - u.dot(pole_) * pole_;
    double wn = w.norm();
    if (wn < 1e-14) {
      require(u.dot(pole_) > 0, ErrorKind::Input, "pole_rotation: antipodal point");
      return MatrixXd::Identity(v, v);
    }
    w /= wn;
    double ang = std::atan2(wn, u.dot(pole_));
    MatrixXd rot = MatrixXd::Identity(v, v);
    MatrixXd pw(v, 2);
    pw << pole_, w;
    Eigen::Matrix2d block;
    block << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    rot += pw * (block - Eigen::Matrix2d::Identity()) * pw.transpose();
    return rot;
  }

  // Model point of a unit vector on the sphere (flat coordinates).
  SpacePoint point_of(const VectorXd& u) const {
    return {ad_of_rotation(pole_rotation(u) * to_pole_)};
  }

  // Ad matrix (pair coordinates of the sphere model) of a vector-rep rotation.
  MatrixXd ad_of_rotation(const MatrixXd& rot) const {
    const auto& pr = sphere_->pair();
    const int v = static_cast<int>(rot.rows());
    const int dim_g = pr.dim();
    // raw Ad on the J-basis: column j -> coords of rot * J_j * rot^T
    MatrixXd ad_raw(dim_g, dim_g);
    int idx = 0;
    for (int a = 0; a < v; ++a)
      for (int b = a + 1; b < v; ++b) {
        MatrixXd img = rot.col(a) * rot.col(b).transpose() - rot.col(b) * rot.col(a).transpose();
        int idx2 = 0;
        for (int c = 0; c < v; ++c)
          for (int d = c + 1; d < v; ++d) ad_raw(idx2++, idx) = img(c, d);
        ++idx;
      }
    MatrixXd t(dim_g, dim_g);
    t << pr.k_basis(), pr.p_basis();
    return t.transpose() * pr.model().gram() * ad_raw * t;
  }

  OrbitGerm germ_at_state(const MatrixXd& state) const override {
    OrbitGerm gf = flat_->germ_at_state(state);
    const int v = flat_->transport_dim();
    VectorXd u = gf.z0 / radius_;
    // frame at z: model-tangent -> R^v is fz * eval_, with fz e_{v-1} = u
    MatrixXd fz = pole_rotation(u) * to_pole_;
    // sphere-normal basis (flat coords): flat normal minus the radial line
    MatrixXd ns =
        canonical_basis((MatrixXd::Identity(v, v) - u * u.transpose()) * gf.normal);
    OrbitGerm g;
    g.ambient = OrbitGerm::Ambient::Space;
    g.space = sphere_;
    g.base_ad = ad_of_rotation(fz);
    auto to_local = [&](const MatrixXd& cols) {
      return MatrixXd(eval_.transpose() * fz.transpose() * cols);
    };
    g.tangent = to_local(gf.tangent);
    g.normal = to_local(ns);
    g.shape.resize(g.normal.cols());
    for (int k = 0; k < g.normal.cols(); ++k)
      g.shape[k] = gf.shape_op(gf.normal_coords(ns.col(k)));
    g.epsilon = gf.epsilon;
    return g;
  }

  MatrixXd normal_frame(const MatrixXd& state) const override {
    OrbitGerm gf = flat_->germ_at_state(state);
    const int v = flat_->transport_dim();
    VectorXd u = gf.z0 / radius_;
    return canonical_basis((MatrixXd::Identity(v, v) - u * u.transpose()) * gf.normal);
  }
  VectorXd local_to_transport(const MatrixXd& state, const VectorXd& local) const override {
    OrbitGerm gf = flat_->germ_at_state(state);
    MatrixXd fz = pole_rotation(gf.z0 / radius_) * to_pole_;
    return fz * eval_ * local;
  }
  VectorXd transport_to_local(const MatrixXd& state, const VectorXd& amb) const override {
    OrbitGerm gf = flat_->germ_at_state(state);
    MatrixXd fz = pole_rotation(gf.z0 / radius_) * to_pole_;
    return eval_.transpose() * fz.transpose() * amb;
  }
  VectorXd generator_for_tangent(const MatrixXd& state, const VectorXd& t_local) const override {
    return flat_->generator_for_tangent(state, local_to_transport(state, t_local));
  }

 private:
  std::shared_ptr<const SRepOrbit> flat_;
  std::shared_ptr<const SymmetricSpaceGerm> sphere_;
  double radius_ = 0;
  VectorXd pole_;
  MatrixXd to_pole_;  // rotation with last column = pole_
  MatrixXd eval_;     // model p-coords -> tangent at the builtin pole axis
  std::function<MatrixXd(const VectorXd&)> raw_mat_;
};

// ---------------------------------------------------------------------------
// Second-order finite-difference certification of shape operators: compares
// <A_xi t, t> against the normal part of the covariant acceleration of the
// orbit curve with velocity t, via Riemannian normal coordinates at the point
// (Richardson-extrapolated central differences).
// ---------------------------------------------------------------------------
inline double shape_fd_residual(const Orbit& orbit, const MatrixXd& state, double h = 1e-3,
                                int n_probes = 0, std::uint64_t seed = 1) {
  OrbitGerm g = orbit.germ_at_state(state);
  const int m = g.dim_m();
  if (m == 0) return 0.0;
  std::vector<VectorXd> probes;
  for (int i = 0; i < m; ++i) probes.push_back(g.tangent.col(i));
  Rng rng(seed);
  for (int i = 0; i < n_probes; ++i) probes.push_back(g.tangent * random_unit(rng, m));

  auto log_at_base = [&](double s, const VectorXd& gen) {
    MatrixXd moved = orbit.step_state(state, gen, s);
    OrbitGerm gm = orbit.germ_at_state(moved);
    if (g.ambient == OrbitGerm::Ambient::Euclidean) return VectorXd(gm.z0 - g.z0);
    // Ad(q)^-1 Ad(moved point), then the Riemannian log at the rebased frame.
    MatrixXd rel = g.base_ad.transpose() * gm.base_ad;
    return g.space->log_to_base({rel});
  };

  double worst = 0;
  for (const auto& t : probes) {
    VectorXd gen = orbit.generator_for_tangent(state, t);
    auto d2 = [&](double hh) {
      VectorXd lp = log_at_base(hh, gen), lm = log_at_base(-hh, gen);
      return VectorXd((lp + lm) / (hh * hh));
    };
    VectorXd acc = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    VectorXd tt = g.tangent.transpose() * t;
    for (int k = 0; k < g.codim(); ++k) {
      double fd = g.normal.col(k).dot(acc);
      double an = tt.dot(g.shape[k] * tt);
      worst = std::max(worst, std::abs(fd - an));
    }
  }
  return worst;
}

}  // namespace eqf

#endif  // EQF_ORBITS_HPP
