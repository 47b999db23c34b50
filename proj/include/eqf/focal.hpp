#ifndef EQF_FOCAL_HPP
#define EQF_FOCAL_HPP

#include <array>
#include <cmath>
#include <ostream>
#include <vector>

#include "eqf/orbits.hpp"

namespace eqf {

// Solutions of y'' = -lambda y with sin-type and cos-type initial data. The
// hyperbolic branch is present for completeness; compact-type germs only see
// lambda >= 0.
inline double sin_lambda(double lambda, double t) {
  const double tiny = 1e-14;
  if (lambda > tiny) {
    double s = std::sqrt(lambda);
    return std::sin(s * t) / s;
  }
  if (lambda < -tiny) {
    double s = std::sqrt(-lambda);
    return std::sinh(s * t) / s;
  }
  return t;
}
inline double cos_lambda(double lambda, double t) {
  const double tiny = 1e-14;
  if (lambda > tiny) return std::cos(std::sqrt(lambda) * t);
  if (lambda < -tiny) return std::cosh(std::sqrt(-lambda) * t);
  return 1.0;
}

// ---------------------------------------------------------------------------
// Differential of the normal exponential at eta, through the Jacobi spectrum:
//   D(z)    = sum_h sin_{l_h}(1) <z, w_h> w_h                 (normal block)
//   Dbar(z) = sum_h cos_{l_h}(1) <z, w_h> w_h
//           - sin_{l_h}(1) <A_eta z, w_h> w_h                 (tangent block)
// The combined operator maps T_pM (+) perp_pM into T_pN; its kernel dimension
// is the focal multiplicity.
// ---------------------------------------------------------------------------
struct NormalExpDifferential {
  VectorXd eta;            // p-coordinates
  MatrixXd d_block;        // dp x c (normal-basis inputs)
  MatrixXd dbar_block;     // dp x m (tangent-basis inputs)
  MatrixXd combined;       // dp x (m + c): [dbar | d]
  VectorXd singular_values;
  int kernel_dim = 0;
  MatrixXd kernel;         // (m+c) x kernel_dim, split as tangent (+) normal coords
};

inline NormalExpDifferential normal_exp_differential(const OrbitGerm& germ, const VectorXd& eta) {
  const int dp = germ.ambient_dim(), m = germ.dim_m(), c = germ.codim();
  NormalExpDifferential out;
  out.eta = eta;
  MatrixXd s_op, c_op;
  if (eta.norm() == 0.0) {
    s_op = MatrixXd::Identity(dp, dp);
    c_op = MatrixXd::Identity(dp, dp);
  } else {
    JacobiSpectrum sp = germ.amb_jacobi(eta);
    s_op = MatrixXd::Zero(dp, dp);
    c_op = MatrixXd::Zero(dp, dp);
    for (int h = 0; h < dp; ++h) {
      VectorXd w = sp.eigenvectors.col(h);
      s_op += sin_lambda(sp.eigenvalues(h), 1.0) * (w * w.transpose());
      c_op += cos_lambda(sp.eigenvalues(h), 1.0) * (w * w.transpose());
    }
  }
  out.d_block = s_op * germ.normal;
  MatrixXd a_eta = germ.shape_op(germ.normal_coords(eta));
  out.dbar_block = c_op * germ.tangent - s_op * germ.tangent * a_eta;
  out.combined.resize(dp, m + c);
  out.combined << out.dbar_block, out.d_block;
  Eigen::JacobiSVD<MatrixXd> svd(out.combined, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  out.kernel_dim = 0;
  for (int i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) <= 1e-8 * std::max(smax, 1e-300)) ++out.kernel_dim;
  out.kernel = svd.matrixV().rightCols(out.kernel_dim);
  return out;
}

inline int focal_multiplicity(const OrbitGerm& germ, const VectorXd& eta) {
  return normal_exp_differential(germ, eta).kernel_dim;
}

inline double min_singular_value(const OrbitGerm& germ, const VectorXd& eta) {
  VectorXd sv = normal_exp_differential(germ, eta).singular_values;
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

// ---------------------------------------------------------------------------
// Focal profile along a ray: radii where the multiplicity jumps, found by a
// coarse scan plus ternary refinement of the smallest singular value. The
// scan resolution guards are explicit: events closer than the resolution
// budget raise a resolution error.
// ---------------------------------------------------------------------------
struct FocalEvent {
  double radius = 0;
  int multiplicity = 0;
  double min_singular_value = 0;
};

struct FocalProfile {
  VectorXd direction;  // unit, p-coordinates
  double scan_limit = 0;
  std::vector<FocalEvent> events;
  std::vector<std::array<double, 3>> scan;  // radius, multiplicity, min singular value
};

inline FocalProfile focal_profile(const OrbitGerm& germ, const VectorXd& direction,
                                  double scan_limit, int steps = 512) {
  require(scan_limit > 0, ErrorKind::Input, "focal_profile: scan_limit must be positive");
  VectorXd dir = direction / direction.norm();
  germ.normal_coords(dir);  // validates membership in the normal space
  FocalProfile out;
  out.direction = dir;
  out.scan_limit = scan_limit;

  std::vector<double> ts(steps), sv(steps);
  for (int i = 0; i < steps; ++i) {
    ts[i] = scan_limit * (i + 1) / steps;
    sv[i] = min_singular_value(germ, ts[i] * dir);
    out.scan.push_back({ts[i], 0.0, sv[i]});
  }
  auto sigma = [&](double t) { return min_singular_value(germ, t * dir); };
  const double typical = *std::max_element(sv.begin(), sv.end());
  for (int i = 0; i < steps; ++i) {
    double left = i == 0 ? sigma(ts[0] * 0.5) : sv[i - 1];
    double right = i == steps - 1 ? sigma(scan_limit * (1.0 + 0.5 / steps)) : sv[i + 1];
    if (!(sv[i] <= left && sv[i] <= right)) continue;
    if (sv[i] > 0.25 * typical) continue;  // shallow dip, not a candidate zero
    double a = i == 0 ? ts[0] * 0.5 : ts[i - 1];
    double b = i == steps - 1 ? scan_limit : ts[i + 1];
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (sigma(m1) < sigma(m2))
        b = m2;
      else
        a = m1;
    }
    double t_star = 0.5 * (a + b);
    NormalExpDifferential d = normal_exp_differential(germ, t_star * dir);
    if (d.kernel_dim == 0) continue;  // refined minimum did not reach zero
    FocalEvent ev{t_star, d.kernel_dim, d.singular_values(d.singular_values.size() - 1)};
    if (!out.events.empty()) {
      double gap = ev.radius - out.events.back().radius;
      if (std::abs(gap) < 1e-9) continue;  // the same zero seen from two grid minima
      require(gap > 1e-8, ErrorKind::Resolution,
              "focal_profile: events closer than the 1e-8 resolution budget");
    }
    out.events.push_back(ev);
  }
  return out;
}

inline void write_profile_csv(const FocalProfile& p, std::ostream& os) {
  os << "radius,multiplicity,min_singular_value\n";
  size_t ei = 0;
  for (const auto& row : p.scan) {
    while (ei < p.events.size() && p.events[ei].radius <= row[0]) {
      os << p.events[ei].radius << "," << p.events[ei].multiplicity << ","
         << p.events[ei].min_singular_value << "\n";
      ++ei;
    }
    os << row[0] << "," << 0 << "," << row[2] << "\n";
  }
  for (; ei < p.events.size(); ++ei)
    os << p.events[ei].radius << "," << p.events[ei].multiplicity << ","
       << p.events[ei].min_singular_value << "\n";
}

// Tube radius estimate: half the first focal distance over sampled normal
// directions (never assumed). Directions cover the normal basis plus random
// unit combinations. Returns 0.5 * scan_limit when no focal event is found.
inline double estimate_epsilon(const OrbitGerm& germ, double scan_limit, int n_random_dirs = 4,
                               std::uint64_t seed = 12, int steps = 512) {
  const int c = germ.codim();
  std::vector<VectorXd> dirs;
  for (int k = 0; k < c; ++k) dirs.push_back(germ.normal.col(k));
  Rng rng(seed);
  for (int k = 0; k < n_random_dirs; ++k) dirs.push_back(germ.normal * random_unit(rng, c));
  double first = scan_limit;
  for (const auto& d : dirs) {
    FocalProfile p = focal_profile(germ, d, scan_limit, steps);
    if (!p.events.empty()) first = std::min(first, p.events.front().radius);
  }
  return 0.5 * first;
}

inline OrbitGerm with_estimated_epsilon(OrbitGerm germ, double scan_limit, int n_random_dirs = 4,
                                        std::uint64_t seed = 12) {
  germ.epsilon = estimate_epsilon(germ, scan_limit, n_random_dirs, seed);
  return germ;
}

// Multiplicity at radius r along dir, refined within a +-window so that
// transported probes do not miss an event by roundoff in the radius.
inline int multiplicity_near(const OrbitGerm& germ, const VectorXd& dir_unit, double r,
                             double window = 1e-6) {
  auto sigma = [&](double t) { return min_singular_value(germ, t * dir_unit); };
  double a = std::max(1e-12, r - window), b = r + window;
  for (int it = 0; it < 70 && (b - a) > 1e-12; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (sigma(m1) < sigma(m2))
      b = m2;
    else
      a = m1;
  }
  return focal_multiplicity(germ, 0.5 * (a + b) * dir_unit);
}

// ---------------------------------------------------------------------------
// Does the isometry psi: perp_p M -> perp_q M (normal-basis coordinates)
// preserve the focal structure? Probes are the focal vectors of the first two
// events along random directions, plus sub-focal vectors that must stay
// non-focal. Failures are data, not errors.
// ---------------------------------------------------------------------------
struct FocalProbe {
  VectorXd direction;  // unit normal direction at p (normal-basis coords)
  double radius = 0;
  int mult_p = 0;
  int mult_q = 0;
  bool pass = false;
};

struct FocalStructureReport {
  std::vector<FocalProbe> probes;
  bool all_pass = true;
  int failures = 0;
};

inline FocalStructureReport preserves_focal_structure(const MatrixXd& psi, const OrbitGerm& germ_p,
                                                      const OrbitGerm& germ_q, int n_probes,
                                                      std::uint64_t seed, double scan_limit) {
  require(orthogonality_residual(psi) <= 1e-8, ErrorKind::Input,
          "preserves_focal_structure: psi not orthogonal");
  const int c = germ_p.codim();
  require(psi.rows() == c && germ_q.codim() == c, ErrorKind::Input,
          "preserves_focal_structure: normal dimensions differ");
  FocalStructureReport rep;
  Rng rng(seed);
  int made = 0;
  int guard = 0;
  while (made < n_probes && guard++ < 8 * n_probes + 16) {
    VectorXd u = random_unit(rng, c);
    FocalProfile prof = focal_profile(germ_p, germ_p.normal * u, scan_limit);
    std::vector<std::pair<double, int>> candidates;
    for (size_t e = 0; e < prof.events.size() && e < 2; ++e)
      candidates.push_back({prof.events[e].radius, prof.events[e].multiplicity});
    if (!prof.events.empty())
      candidates.push_back({0.5 * prof.events.front().radius, 0});  // sub-focal control probe
    for (auto [r, mult] : candidates) {
      if (made >= n_probes) break;
      FocalProbe probe;
      probe.direction = u;
      probe.radius = r;
      probe.mult_p = mult;
      VectorXd u_q = psi * u;
      probe.mult_q = multiplicity_near(germ_q, germ_q.normal * u_q, r);
      probe.pass = (probe.mult_p == probe.mult_q);
      rep.probes.push_back(probe);
      rep.all_pass = rep.all_pass && probe.pass;
      if (!probe.pass) ++rep.failures;
      ++made;
    }
  }
  return rep;
}

}  // namespace eqf

#endif  // EQF_FOCAL_HPP
