#ifndef EQF_HOLONOMY_HPP
#define EQF_HOLONOMY_HPP

#include <memory>
#include <string>
#include <vector>

#include "eqf/orbits.hpp"

namespace eqf {

// ---------------------------------------------------------------------------
// Algebraic curvature tensor on the normal space, stored as the full rank-4
// component array <R(ei,ej)ek, el> over an orthonormal basis.
// ---------------------------------------------------------------------------
struct AlgebraicCurvatureTensor {
  int dim = 0;
  std::vector<double> comp;  // size dim^4

  static AlgebraicCurvatureTensor zero(int d) {
    AlgebraicCurvatureTensor t;
    t.dim = d;
    t.comp.assign(static_cast<size_t>(d) * d * d * d, 0.0);
    return t;
  }

  double& at(int i, int j, int k, int l) {
    return comp[static_cast<size_t>(((i * dim + j) * dim + k)) * dim + l];
  }
  double at(int i, int j, int k, int l) const {
    return comp[static_cast<size_t>(((i * dim + j) * dim + k)) * dim + l];
  }

  double norm() const {
    double s = 0;
    for (double c : comp) s += c * c;
    return std::sqrt(s);
  }

  // R(x,y) as a skew endomorphism: (endo)_{l,k} = <R(x,y) ek, el>.
  MatrixXd endo(const VectorXd& x, const VectorXd& y) const {
    MatrixXd m = MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < dim; ++j) {
        double w = x(i) * y(j);
        if (w == 0.0) continue;
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) m(l, k) += w * at(i, j, k, l);
      }
    }
    return m;
  }
  MatrixXd endo_basis(int i, int j) const {
    MatrixXd m(dim, dim);
    for (int k = 0; k < dim; ++k)
      for (int l = 0; l < dim; ++l) m(l, k) = at(i, j, k, l);
    return m;
  }

  double scalar_curvature() const {
    double s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += at(i, j, j, i);
    return s;
  }

  // Scalar curvature of the restriction to a subspace (orthonormal columns).
  double block_scalar(const MatrixXd& basis) const {
    const int b = static_cast<int>(basis.cols());
    double s = 0;
    for (int a = 0; a < b; ++a)
      for (int c = 0; c < b; ++c) {
        VectorXd u = basis.col(a), v = basis.col(c);
        s += u.dot(endo(u, v) * v);  // <R(u,v)v, u>
      }
    return s;
  }

  // Max violation of the pair antisymmetries, pair symmetry, and first
  // Bianchi identity.
  double invariant_residual() const {
    double r = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) {
            double v = at(i, j, k, l);
            r = std::max(r, std::abs(v + at(j, i, k, l)));
            r = std::max(r, std::abs(v + at(i, j, l, k)));
            r = std::max(r, std::abs(v - at(k, l, i, j)));
            r = std::max(r, std::abs(at(i, j, k, l) + at(j, k, i, l) + at(k, i, j, l)));
          }
    return r;
  }

  void validate(double tol_residual = 1e-9) const {
    require(invariant_residual() <= tol_residual * std::max(1.0, norm()), ErrorKind::Validation,
            "algebraic curvature tensor: symmetry/Bianchi residual too large");
  }
};

// Projected curvature tensor on the germ's normal space: components of the
// ambient curvature on normal quadruples (zero for Euclidean ambients).
inline AlgebraicCurvatureTensor project_curvature(const OrbitGerm& germ) {
  const int c = germ.codim();
  AlgebraicCurvatureTensor t = AlgebraicCurvatureTensor::zero(c);
  if (germ.ambient == OrbitGerm::Ambient::Euclidean) return t;
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) {
      MatrixXd op = germ.amb_curvature_op(germ.normal.col(i), germ.normal.col(j));
      for (int k = 0; k < c; ++k)
        for (int l = 0; l < c; ++l) {
          double v = germ.normal.col(l).dot(op * germ.normal.col(k));
          t.at(i, j, k, l) = v;
          t.at(j, i, k, l) = -v;
        }
    }
  return t;
}

// Pullback of a tensor under an orthogonal map psi (coordinates of the target
// basis over the source basis): tau(R)(x,y)z = psi^-1 R(psi x, psi y) psi z.
inline AlgebraicCurvatureTensor transport_tensor(const AlgebraicCurvatureTensor& t,
                                                 const MatrixXd& psi) {
  const int d = t.dim;
  require(psi.rows() == d && psi.cols() == d, ErrorKind::Input, "transport_tensor: size mismatch");
  require(orthogonality_residual(psi) <= 1e-9 * std::max(1.0, psi.norm()), ErrorKind::Input,
          "transport_tensor: map is not orthogonal");
  // successive single-index contractions with psi
  auto contract = [d](const std::vector<double>& in, const MatrixXd& m, int slot) {
    std::vector<double> out(in.size(), 0.0);
    int stride[4] = {d * d * d, d * d, d, 1};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            int idx[4] = {i, j, k, l};
            double acc = 0;
            for (int a = 0; a < d; ++a) {
              int src[4] = {i, j, k, l};
              src[slot] = a;
              acc += in[src[0] * stride[0] + src[1] * stride[1] + src[2] * stride[2] + src[3]] *
                     m(a, idx[slot]);
            }
            out[i * stride[0] + j * stride[1] + k * stride[2] + l] = acc;
          }
    return out;
  };
  AlgebraicCurvatureTensor out;
  out.dim = d;
  out.comp = t.comp;
  for (int slot = 0; slot < 4; ++slot) out.comp = contract(out.comp, psi, slot);
  return out;
}

// ---------------------------------------------------------------------------
// A Lie algebra of skew endomorphisms of the normal space, with provenance.
// ---------------------------------------------------------------------------
struct CurvatureEndoAlgebra {
  int space_dim = 0;
  std::vector<MatrixXd> basis;  // Frobenius-orthonormal
  std::string provenance;
  int dim() const { return static_cast<int>(basis.size()); }

  void validate() const {
    for (const auto& b : basis)
      require(skew_residual(b) <= 1e-10 * std::max(1.0, b.norm()), ErrorKind::Validation,
              provenance + ": basis element not skew");
    require(closure_defect(basis) <= 1e-7, ErrorKind::Validation,
            provenance + ": basis not bracket-closed");
  }

  MatrixXd stacked() const {
    MatrixXd s(space_dim * std::max(1, dim()), space_dim);
    s.setZero();
    for (int i = 0; i < dim(); ++i) s.middleRows(i * space_dim, space_dim) = basis[i];
    return s;
  }
  // Orthonormal span of the basis in vectorized form.
  MatrixXd span_cols() const {
    MatrixXd cols(space_dim * space_dim, dim());
    for (int i = 0; i < dim(); ++i) cols.col(i) = vec_of(basis[i]);
    return orthonormal_span(cols);
  }
};

// ---------------------------------------------------------------------------
// build_L_p: Lie closure of transported projected curvature endomorphisms
// over sampled curves. Curves are one-parameter segments with random acting
// directions and lengths in (0, L]. The dimension history over curve count is
// reported; it is monotone and must stabilize.
// ---------------------------------------------------------------------------
struct CurveSamplerConfig {
  int n_curves = 24;
  double max_len = 2.0;
  double ode_step = 0.01;
  std::uint64_t seed = 1;
};

struct TransportedTensor {
  CurveWord curve;
  MatrixXd frame_map;  // psi_c: normal coords at p -> normal coords at c(1)
  AlgebraicCurvatureTensor tensor;  // tau_c(R~_{c(1)}) on the base normal space
};

struct BuildLpResult {
  CurvatureEndoAlgebra algebra;            // L_p
  std::vector<TransportedTensor> samples;  // includes the base tensor (empty curve)
  std::vector<int> dim_history;            // closure dim after 0,1,2,... curves
  int stabilized_at = 0;                   // first curve count with final dimension
};

inline BuildLpResult build_L_p(const Orbit& orbit, const OrbitGerm& germ,
                               const CurveSamplerConfig& cfg,
                               const MatrixXd& start_state = MatrixXd()) {
  const int c = germ.codim();
  BuildLpResult out;
  out.algebra.space_dim = c;
  out.algebra.provenance = "L_p";
  Rng rng(cfg.seed);

  AlgebraicCurvatureTensor base = project_curvature(germ);
  out.samples.push_back({{}, MatrixXd::Identity(c, c), base});
  std::vector<MatrixXd> gens;
  auto add_tensor = [&](const AlgebraicCurvatureTensor& t) {
    for (int i = 0; i < c; ++i)
      for (int j = i + 1; j < c; ++j) {
        MatrixXd e = t.endo_basis(i, j);
        e = 0.5 * (e - e.transpose());
        if (e.norm() > 1e-12) gens.push_back(e);
      }
  };
  add_tensor(base);
  out.algebra.basis = gens.empty() ? std::vector<MatrixXd>{} : lie_closure(gens);
  out.dim_history.push_back(out.algebra.dim());

  const bool movable = germ.dim_m() > 0;
  for (int n = 0; n < cfg.n_curves && movable; ++n) {
    VectorXd dir = random_unit(rng, orbit.acting_dim());
    double len = uniform(rng, 0.05, cfg.max_len);
    CurveWord w = {{dir, len}};
    TransportResult tr = transport_normal_basis(orbit, w, cfg.ode_step, start_state);
    OrbitGerm gq = orbit.germ_at_state(tr.end_state);
    AlgebraicCurvatureTensor rq = project_curvature(gq);
    AlgebraicCurvatureTensor tau = transport_tensor(rq, tr.frame_map);
    tau.validate(1e-8);
    out.samples.push_back({w, tr.frame_map, tau});
    add_tensor(tau);
    out.algebra.basis = gens.empty() ? std::vector<MatrixXd>{} : lie_closure(gens);
    out.dim_history.push_back(out.algebra.dim());
  }
  int final_dim = out.dim_history.back();
  out.stabilized_at = 0;
  for (int i = static_cast<int>(out.dim_history.size()) - 1; i >= 0; --i)
    if (out.dim_history[i] != final_dim) {
      out.stabilized_at = i + 1;
      break;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant decomposition V0 + V1 + ... + Vk of the space under the algebra:
// V0 is the joint kernel; the complement splits along eigenspaces of a
// generic symmetric commutant element. Each nontrivial block is certified
// irreducible by its symmetric commutant being trivial.
// ---------------------------------------------------------------------------
struct InvariantDecomposition {
  std::vector<MatrixXd> subspaces;  // orthonormal bases; index 0 is V0 (may have 0 columns)
  int trivial_index = 0;
  int blocks() const { return static_cast<int>(subspaces.size()); }
};

namespace detail {

// Basis of the space of symmetric matrices commuting with all given ops.
inline std::vector<MatrixXd> symmetric_commutant(const std::vector<MatrixXd>& ops, int w) {
  std::vector<MatrixXd> sym_basis;
  for (int i = 0; i < w; ++i)
    for (int j = i; j < w; ++j) {
      MatrixXd e = MatrixXd::Zero(w, w);
      e(i, j) = e(j, i) = (i == j) ? 1.0 : M_SQRT1_2;
      sym_basis.push_back(e);
    }
  const int sdim = static_cast<int>(sym_basis.size());
  MatrixXd sys(static_cast<int>(ops.size()) * w * w, sdim);
  for (int s = 0; s < sdim; ++s) {
    for (size_t a = 0; a < ops.size(); ++a) {
      MatrixXd br = ops[a] * sym_basis[s] - sym_basis[s] * ops[a];
      sys.block(static_cast<int>(a) * w * w, s, w * w, 1) = vec_of(br);
    }
  }
  MatrixXd kern = ops.empty() ? MatrixXd::Identity(sdim, sdim) : kernel_basis(sys);
  std::vector<MatrixXd> out;
  for (int c0 = 0; c0 < kern.cols(); ++c0) {
    MatrixXd s = MatrixXd::Zero(w, w);
    for (int s0 = 0; s0 < sdim; ++s0) s += kern(s0, c0) * sym_basis[s0];
    out.push_back(0.5 * (s + s.transpose()));
  }
  return out;
}

}  // namespace detail

inline InvariantDecomposition invariant_decomposition(const CurvatureEndoAlgebra& algebra,
                                                      std::uint64_t seed = 7) {
  const int c = algebra.space_dim;
  InvariantDecomposition out;
  if (algebra.dim() == 0) {
    out.subspaces.push_back(MatrixXd::Identity(c, c));
    return out;
  }
  MatrixXd stacked(algebra.dim() * c, c);
  for (int i = 0; i < algebra.dim(); ++i) stacked.middleRows(i * c, c) = algebra.basis[i];
  MatrixXd v0 = kernel_basis(stacked);
  out.subspaces.push_back(v0);
  MatrixXd w = orthonormal_complement(v0, c);
  if (w.cols() == 0) return out;

  std::vector<MatrixXd> restricted;
  for (const auto& b : algebra.basis) restricted.push_back(w.transpose() * b * w);
  auto commutant = detail::symmetric_commutant(restricted, static_cast<int>(w.cols()));
  require(!commutant.empty(), ErrorKind::Unstable, "invariant_decomposition: empty commutant");

  Rng rng(seed);
  std::string failure;
  for (int attempt = 0; attempt < 3; ++attempt) {
    MatrixXd s = MatrixXd::Zero(w.cols(), w.cols());
    for (const auto& e : commutant) s += uniform(rng, -1.0, 1.0) * e;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    VectorXd ev = es.eigenvalues();
    double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<std::pair<int, int>> clusters;  // begin, count
    int begin = 0;
    for (int i = 1; i <= ev.size(); ++i) {
      if (i == ev.size() || ev(i) - ev(i - 1) > 1e-6 * scale) {
        clusters.push_back({begin, i - begin});
        begin = i;
      }
    }
    bool ok = true;
    std::vector<MatrixXd> blocks;
    for (auto [b0, cnt] : clusters) {
      MatrixXd blk = w * es.eigenvectors().middleCols(b0, cnt);
      // invariance residual
      double inv = 0;
      MatrixXd pb = subspace_projector(blk);
      for (const auto& op : algebra.basis)
        inv = std::max(inv, ((MatrixXd::Identity(c, c) - pb) * op * pb).norm());
      if (inv > 1e-8 * std::max(1.0, algebra.basis.front().norm())) {
        ok = false;
        failure = "block not invariant";
        break;
      }
      // irreducibility: symmetric commutant of the restriction is trivial
      std::vector<MatrixXd> rest;
      for (const auto& op : algebra.basis) rest.push_back(blk.transpose() * op * blk);
      if (detail::symmetric_commutant(rest, cnt).size() != 1) {
        ok = false;
        failure = "block commutant not scalar";
        break;
      }
      blocks.push_back(blk);
    }
    if (ok) {
      for (auto& b : blocks) out.subspaces.push_back(b);
      return out;
    }
  }
  throw Error(ErrorKind::Unstable, "invariant_decomposition: unstable after retries (" + failure + ")");
}

// ---------------------------------------------------------------------------
// Simons symmetrization: Monte-Carlo average of g^-1 R(g.,g.)g over the
// connected group of the algebra. Requires nonvanishing scalar curvature on
// every nontrivial irreducible block (zero tensors pass through).
// ---------------------------------------------------------------------------
inline AlgebraicCurvatureTensor simons_symmetrize(const AlgebraicCurvatureTensor& t,
                                                  const CurvatureEndoAlgebra& algebra,
                                                  int n_samples, std::uint64_t seed) {
  require(t.dim == algebra.space_dim, ErrorKind::Input, "simons_symmetrize: dimension mismatch");
  if (t.norm() <= 1e-14) return t;
  InvariantDecomposition dec = invariant_decomposition(algebra);
  for (int b = 1; b < dec.blocks(); ++b) {
    double s = t.block_scalar(dec.subspaces[b]);
    require(std::abs(s) > 1e-10 * std::max(1.0, t.norm()), ErrorKind::Precondition,
            "simons_symmetrize: vanishing scalar curvature on block " + std::to_string(b));
  }
  if (algebra.dim() == 0) return t;
  auto samples = haar_sample(algebra.basis, n_samples, seed);
  AlgebraicCurvatureTensor acc = AlgebraicCurvatureTensor::zero(t.dim);
  for (const auto& g : samples) {
    AlgebraicCurvatureTensor conj = transport_tensor(t, g.matrix);
    for (size_t i = 0; i < acc.comp.size(); ++i) acc.comp[i] += conj.comp[i];
  }
  for (auto& v : acc.comp) v /= static_cast<double>(samples.size());
  acc.validate(1e-8);
  return acc;
}

inline double conjugation_invariance_residual(const AlgebraicCurvatureTensor& t,
                                              const CurvatureEndoAlgebra& algebra, int n_probes,
                                              std::uint64_t seed) {
  if (algebra.dim() == 0) return 0.0;
  double worst = 0;
  for (const auto& g : haar_sample(algebra.basis, n_probes, seed)) {
    AlgebraicCurvatureTensor conj = transport_tensor(t, g.matrix);
    double diff = 0;
    for (size_t i = 0; i < t.comp.size(); ++i) diff += (conj.comp[i] - t.comp[i]) * (conj.comp[i] - t.comp[i]);
    worst = std::max(worst, std::sqrt(diff));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Normal holonomy sampled from below: logs of loop-transport rotations plus
// transported normal-curvature endomorphisms (through the Ricci equation),
// closed into an algebra.
// ---------------------------------------------------------------------------
struct NormalHolonomyConfig {
  int n_loops = 16;
  int n_curve_points = 8;
  double loop_scale = 0.45;
  double ode_step = 0.01;
  std::uint64_t seed = 2;
};

// R-perp endomorphisms at a germ via the Ricci equation:
// <Rperp(x,y) xi, eta> = <[A_xi, A_eta] x, y> + <R^N(x,y) xi, eta>.
inline std::vector<MatrixXd> normal_curvature_endos(const OrbitGerm& germ) {
  const int c = germ.codim(), m = germ.dim_m();
  std::vector<MatrixXd> out;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      MatrixXd e = MatrixXd::Zero(c, c);
      MatrixXd rn = germ.amb_curvature_op(germ.tangent.col(i), germ.tangent.col(j));
      for (int k = 0; k < c; ++k)
        for (int l = 0; l < c; ++l) {
          MatrixXd comm = germ.shape[k] * germ.shape[l] - germ.shape[l] * germ.shape[k];
          // <[A_k, A_l] t_i, t_j> is the (j,i) entry in the tangent basis
          double ambient_term = germ.normal.col(l).dot(rn * germ.normal.col(k));
          e(l, k) = comm(j, i) + ambient_term;
        }
      e = 0.5 * (e - e.transpose());
      if (e.norm() > 1e-13) out.push_back(e);
    }
  return out;
}

inline CurvatureEndoAlgebra sample_normal_holonomy(const Orbit& orbit, const OrbitGerm& germ,
                                                   const NormalHolonomyConfig& cfg) {
  const int c = germ.codim();
  CurvatureEndoAlgebra out;
  out.space_dim = c;
  out.provenance = "phi-sample";
  std::vector<MatrixXd> gens;
  Rng rng(cfg.seed);
  const bool movable = germ.dim_m() > 0;

  // (a) logs of sampled loop holonomies
  for (int i = 0; i < cfg.n_loops && movable; ++i) {
    VectorXd g1 = random_unit(rng, orbit.acting_dim());
    VectorXd g2 = random_unit(rng, orbit.acting_dim());
    double s = uniform(rng, 0.15, cfg.loop_scale);
    CurveWord loop = commutator_loop(orbit, g1, g2, s);
    TransportResult tr = transport_normal_basis(orbit, loop, cfg.ode_step);
    require(tr.norm_drift <= 1e-4, ErrorKind::Accuracy, "normal holonomy: loop transport drift");
    MatrixXd log = rotation_log(tr.frame_map);
    if (log.norm() > 1e-11) gens.push_back(log);
  }
  // (b) transported normal-curvature endomorphisms
  for (const auto& e : normal_curvature_endos(germ))
    if (e.norm() > 1e-13) gens.push_back(e);
  for (int i = 0; i < cfg.n_curve_points && movable; ++i) {
    VectorXd dir = random_unit(rng, orbit.acting_dim());
    double len = uniform(rng, 0.1, 1.2);
    CurveWord w = {{dir, len}};
    TransportResult tr = transport_normal_basis(orbit, w, cfg.ode_step);
    OrbitGerm gq = orbit.germ_at_state(tr.end_state);
    for (const auto& e : normal_curvature_endos(gq)) {
      MatrixXd back = tr.frame_map.transpose() * e * tr.frame_map;
      if (back.norm() > 1e-13) gens.push_back(back);
    }
  }
  out.basis = gens.empty() ? std::vector<MatrixXd>{} : lie_closure(gens);
  return out;
}

// ---------------------------------------------------------------------------
// hat G_p: the algebra generated by L_p together with the sampled normal
// holonomy restricted to V0. Reports the decomposition data and the
// structural residuals used by the consistency checks.
// ---------------------------------------------------------------------------
struct HatGResult {
  CurvatureEndoAlgebra l_p;
  CurvatureEndoAlgebra phi_sample;
  CurvatureEndoAlgebra hat_algebra;
  InvariantDecomposition decomposition;  // of L_p
  BuildLpResult l_p_build;
  double phi_invariance_residual = 0;    // phi-sample maps each V_i into itself
  double block_structure_residual = 0;   // tensors have no cross-block terms
  std::vector<int> block_dims;
  std::vector<bool> block_irreducible;
};

inline HatGResult build_hat_G(const Orbit& orbit, const OrbitGerm& germ,
                              const CurveSamplerConfig& curve_cfg,
                              const NormalHolonomyConfig& holonomy_cfg) {
  HatGResult out;
  out.l_p_build = build_L_p(orbit, germ, curve_cfg);
  out.l_p = out.l_p_build.algebra;
  out.phi_sample = sample_normal_holonomy(orbit, germ, holonomy_cfg);
  out.decomposition = invariant_decomposition(out.l_p);
  const int c = germ.codim();

  // phi-sample leaves every V_i invariant
  for (const auto& x : out.phi_sample.basis)
    for (const auto& vi : out.decomposition.subspaces) {
      if (vi.cols() == 0) continue;
      MatrixXd pv = subspace_projector(vi);
      out.phi_invariance_residual = std::max(
          out.phi_invariance_residual, ((MatrixXd::Identity(c, c) - pv) * x * pv).norm());
    }

  // transported tensors decompose blockwise
  for (const auto& s : out.l_p_build.samples) {
    for (size_t b1 = 0; b1 < out.decomposition.subspaces.size(); ++b1)
      for (size_t b2 = 0; b2 < out.decomposition.subspaces.size(); ++b2) {
        if (b1 == b2) continue;
        const MatrixXd& u = out.decomposition.subspaces[b1];
        const MatrixXd& v = out.decomposition.subspaces[b2];
        for (int a = 0; a < u.cols(); ++a)
          for (int b = 0; b < v.cols(); ++b) {
            MatrixXd e = s.tensor.endo(u.col(a), v.col(b));
            out.block_structure_residual = std::max(out.block_structure_residual, e.norm());
          }
      }
  }

  // hat G algebra: L_p together with phi restricted to V0
  std::vector<MatrixXd> gens = out.l_p.basis;
  const MatrixXd& v0 = out.decomposition.subspaces[0];
  if (v0.cols() > 0) {
    MatrixXd p0 = subspace_projector(v0);
    for (const auto& x : out.phi_sample.basis) {
      MatrixXd restricted = p0 * x * p0;
      restricted = 0.5 * (restricted - restricted.transpose());
      if (restricted.norm() > 1e-11) gens.push_back(restricted);
    }
  }
  out.hat_algebra.space_dim = c;
  out.hat_algebra.provenance = "hatG";
  out.hat_algebra.basis = gens.empty() ? std::vector<MatrixXd>{} : lie_closure(gens);

  for (size_t b = 0; b < out.decomposition.subspaces.size(); ++b) {
    out.block_dims.push_back(static_cast<int>(out.decomposition.subspaces[b].cols()));
    out.block_irreducible.push_back(b != 0);
  }
  return out;
}

// Orbit of a normal vector under the sampled group of an endomorphism
// algebra: {g eta}. Used for tube fibres and polarity checks.
inline std::vector<VectorXd> algebra_orbit_samples(const CurvatureEndoAlgebra& algebra,
                                                   const VectorXd& eta, int count,
                                                   std::uint64_t seed) {
  std::vector<VectorXd> out;
  out.push_back(eta);
  if (algebra.dim() == 0 || count <= 0) return out;
  for (const auto& g : haar_sample(algebra.basis, count, seed)) out.push_back(g.matrix * eta);
  return out;
}

// Tangent space of the algebra orbit at eta: span {X eta}.
inline MatrixXd algebra_orbit_tangent(const CurvatureEndoAlgebra& algebra, const VectorXd& eta) {
  if (algebra.dim() == 0) return MatrixXd::Zero(eta.size(), 0);
  MatrixXd cols(eta.size(), algebra.dim());
  for (int i = 0; i < algebra.dim(); ++i) cols.col(i) = algebra.basis[i] * eta;
  return orthonormal_span(cols);
}

}  // namespace eqf

#endif  // EQF_HOLONOMY_HPP
