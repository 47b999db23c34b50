#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "eqf/focal.hpp"
#include "eqf/holonomy.hpp"
#include "oracles.hpp"

using namespace eqf;

namespace {

std::shared_ptr<const SymmetricSpaceGerm> make_germ(const std::string& alg, int n,
                                                    const std::string& inv) {
  auto doc = builtin_algebra_document(alg, n, inv);
  auto model = std::make_shared<const LieAlgebraModel>(LieAlgebraModel::from_document(doc));
  auto pair = std::make_shared<const CartanDecomposition>(model, model->involution_candidate());
  return std::make_shared<const SymmetricSpaceGerm>(pair);
}

MatrixXd hermann_subalgebra(const SymmetricSpaceGerm& germ, const std::string& alg, int n,
                            const std::string& inv2) {
  auto doc2 = builtin_algebra_document(alg, n, inv2);
  return fixed_subalgebra(germ.pair(), doc2.involution);
}

std::shared_ptr<const HermannOrbit> cp1_in_cp2() {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  return std::make_shared<const HermannOrbit>(cp2, ktilde, VectorXd::Zero(4));
}

}  // namespace

TEST_CASE("sin_lambda / cos_lambda: branches and continuity at 0") {
  REQUIRE(sin_lambda(0.0, 0.7) == 0.7);
  REQUIRE(cos_lambda(0.0, 0.7) == 1.0);
  REQUIRE(std::abs(sin_lambda(4.0, 0.5) - std::sin(1.0) / 2.0) < 1e-15);
  REQUIRE(std::abs(cos_lambda(4.0, 0.5) - std::cos(1.0)) < 1e-15);
  REQUIRE(std::abs(sin_lambda(-4.0, 0.5) - std::sinh(1.0) / 2.0) < 1e-15);
  // continuity across lambda = 0
  for (double lam : {1e-13, -1e-13}) {
    REQUIRE(std::abs(sin_lambda(lam, 0.9) - 0.9) < 1e-9);
    REQUIRE(std::abs(cos_lambda(lam, 0.9) - 1.0) < 1e-9);
  }
}

TEST_CASE("normal_exp_differential at eta = 0 is the identity embedding") {
  auto orbit = cp1_in_cp2();
  OrbitGerm g = orbit->base_germ();
  NormalExpDifferential d = normal_exp_differential(g, VectorXd::Zero(4));
  REQUIRE((d.d_block - g.normal).norm() < 1e-14);
  REQUIRE((d.dbar_block - g.tangent).norm() < 1e-14);
  REQUIRE(d.kernel_dim == 0);
}

TEST_CASE("flat ambient: classical focal radius of a distance sphere") {
  auto sphere_pair = make_germ("so", 4, "so(3)");  // p = R^3
  double r = 0.8;
  SRepOrbit orbit(sphere_pair, r * VectorXd::Unit(3, 0));
  OrbitGerm g = orbit.base_germ();
  // Euclidean ambient: D = inclusion, Dbar = tangent (id - t A_eta)
  VectorXd inward = -g.normal.col(0) * (g.normal.col(0).dot(g.z0) > 0 ? 1.0 : -1.0);
  NormalExpDifferential d = normal_exp_differential(g, 0.3 * inward);
  REQUIRE((d.d_block - g.normal).norm() < 1e-12);

  FocalProfile prof = focal_profile(g, inward, 2.5);
  REQUIRE(prof.events.size() == 1);
  REQUIRE(std::abs(prof.events[0].radius - r) < 1e-9);  // the center of the sphere
  REQUIRE(prof.events[0].multiplicity == 2);

  // outward: no focal points at all
  FocalProfile out = focal_profile(g, VectorXd(-inward), 2.5);
  REQUIRE(out.events.empty());

  // multiplicity vanishes strictly inside the tube radius
  double eps = estimate_epsilon(g, 2.5);
  REQUIRE(std::abs(eps - 0.5 * r) < 1e-8);
  REQUIRE(focal_multiplicity(g, 0.5 * eps * inward) == 0);
}

TEST_CASE("shooting oracle: exp-differential matches the Jacobi integrator") {
  // space ambient: geodesic sphere in S^3 via the Hermann orbit of K itself
  auto s3 = make_germ("so", 4, "so(3)");
  MatrixXd k_self = MatrixXd::Zero(s3->pair().dim(), s3->pair().dim_k());
  k_self.topRows(s3->pair().dim_k()).setIdentity();
  double a = 0.5;
  HermannOrbit orbit(s3, k_self, a * VectorXd::Unit(3, 0));
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 2);
  REQUIRE(g.codim() == 1);

  Rng rng(7);
  for (double t : {0.3, 0.9, 1.4}) {
    VectorXd eta = t * g.normal.col(0);
    NormalExpDifferential d = normal_exp_differential(g, eta);
    MatrixXd r_eta = g.space->jacobi_operator(eta);
    MatrixXd j0(3, 3), j1(3, 3);
    MatrixXd a_eta = g.shape_op(g.normal_coords(eta));
    j0 << g.tangent, VectorXd::Zero(3);
    MatrixXd jp_t = -g.tangent * a_eta;
    j1 << jp_t, g.normal;
    MatrixXd shot = oracle::jacobi_shoot(r_eta, j0, j1);
    REQUIRE((shot - d.combined).norm() < 1e-8);
  }

  // the same match on the curved-normal-space CP^1 germ
  auto cp1 = cp1_in_cp2();
  OrbitGerm gc = cp1->base_germ();
  VectorXd eta = 0.9 * gc.normal.col(1);
  NormalExpDifferential d = normal_exp_differential(gc, eta);
  MatrixXd r_eta = gc.space->jacobi_operator(eta);
  MatrixXd j0(4, 4), j1(4, 4);
  j0 << gc.tangent, MatrixXd::Zero(4, 2);
  j1 << -gc.tangent * gc.shape_op(gc.normal_coords(eta)), gc.normal;
  REQUIRE((oracle::jacobi_shoot(r_eta, j0, j1) - d.combined).norm() < 1e-8);
}

TEST_CASE("CP^1 focal profile: total collapse at pi / (2 sqrt(kappa))") {
  auto orbit = cp1_in_cp2();
  OrbitGerm g = orbit->base_germ();
  VectorXd dir = g.normal.col(0);
  // kappa = the low Jacobi level of the ambient germ in this direction
  auto sp = g.space->jacobi_spectrum(dir);
  double kappa = sp.levels[1].value;
  double expected = M_PI / (2.0 * std::sqrt(kappa));

  FocalProfile prof = focal_profile(g, dir, 1.2 * expected);
  REQUIRE(prof.events.size() >= 1);
  REQUIRE(std::abs(prof.events[0].radius - expected) < 1e-8);
  REQUIRE(prof.events[0].multiplicity == 3);  // both tangent dirs + the i*eta dir

  double eps = estimate_epsilon(g, 1.2 * expected);
  REQUIRE(std::abs(eps - 0.5 * expected) < 1e-7);
  REQUIRE(focal_multiplicity(g, (0.5 * eps) * dir) == 0);
}

TEST_CASE("antipodal profile symmetry where the germ admits it") {
  // Totally geodesic CP^1: A = 0 and R_{-eta} = R_eta, so profiles along eta
  // and -eta agree exactly.
  auto cp1 = cp1_in_cp2();
  OrbitGerm gc = cp1->base_germ();
  Rng rng(3);
  VectorXd dir = gc.normal * random_unit(rng, 2);
  auto sp = gc.space->jacobi_spectrum(dir);
  double scan = 1.4 * M_PI / (2.0 * std::sqrt(sp.levels[1].value));
  FocalProfile plus = focal_profile(gc, dir, scan);
  FocalProfile minus = focal_profile(gc, VectorXd(-dir), scan);
  REQUIRE(!plus.events.empty());
  REQUIRE(plus.events.size() == minus.events.size());
  for (size_t e = 0; e < plus.events.size(); ++e) {
    REQUIRE(std::abs(plus.events[e].radius - minus.events[e].radius) < 1e-7);
    REQUIRE(plus.events[e].multiplicity == minus.events[e].multiplicity);
  }

  // Euclidean Veronese-type orbit: along sphere-tangent normal directions the
  // shape operator is trace-free (eigenvalues +-kappa), again symmetric.
  auto r2 = make_germ("su", 3, "so(3)");
  const auto& pr = r2->pair();
  VectorXd raw = VectorXd::Zero(8);
  raw(6) = 2.0;
  raw(7) = 1.0;
  VectorXd z0 = pr.p_part(pr.pair_coords(raw));
  SRepOrbit orbit(r2, z0);
  OrbitGerm g = orbit.base_germ();
  // normal direction orthogonal to the position vector
  MatrixXd ncoords = g.normal.transpose() * g.z0;
  VectorXd radial_n = ncoords / ncoords.norm();
  VectorXd u = VectorXd::Unit(3, 0);
  u -= radial_n * radial_n.dot(u);
  u /= u.norm();
  VectorXd dir_eu = g.normal * u;
  MatrixXd a_eu = g.shape_op(u);
  REQUIRE(std::abs(a_eu.trace()) < 1e-10);  // trace-free: symmetric spectrum
  FocalProfile pe = focal_profile(g, dir_eu, 6.0 / a_eu.norm());
  FocalProfile me = focal_profile(g, VectorXd(-dir_eu), 6.0 / a_eu.norm());
  REQUIRE(!pe.events.empty());
  REQUIRE(pe.events.size() == me.events.size());
  for (size_t e = 0; e < pe.events.size(); ++e) {
    REQUIRE(std::abs(pe.events[e].radius - me.events[e].radius) < 1e-7);
    REQUIRE(pe.events[e].multiplicity == me.events[e].multiplicity);
  }
}

TEST_CASE("preserves_focal_structure: identity passes, group rotations pass on CP^1") {
  auto orbit = cp1_in_cp2();
  OrbitGerm g = orbit->base_germ();
  auto sp = g.space->jacobi_spectrum(g.normal.col(0));
  double scan = 1.3 * M_PI / (2.0 * std::sqrt(sp.levels[1].value));

  FocalStructureReport rep =
      preserves_focal_structure(MatrixXd::Identity(2, 2), g, g, 8, 5, scan);
  REQUIRE(rep.all_pass);
  REQUIRE(!rep.probes.empty());

  // rotations of the normal plane lie in hat G_p and preserve the structure
  for (double ang : {0.4, 1.1, 2.9}) {
    MatrixXd rot(2, 2);
    rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    FocalStructureReport r2 = preserves_focal_structure(rot, g, g, 8, 11, scan);
    REQUIRE(r2.all_pass);
  }

  MatrixXd notorth = 2.0 * MatrixXd::Identity(2, 2);
  REQUIRE_THROWS_AS(preserves_focal_structure(notorth, g, g, 4, 1, scan), Error);
}

TEST_CASE("generic normal rotation breaks the focal structure of the codim-2 instance") {
  // regular orbit of the su(4)/so(4) isotropy representation, rescaled into
  // the sphere S^8: codimension 2 there; the rotation group of the normal
  // plane does not preserve direction-dependent focal radii.
  auto a3 = make_germ("su", 4, "so(4)");
  const auto& pr = a3->pair();
  VectorXd raw = VectorXd::Zero(15);
  raw(12) = 3.0;  // D0
  raw(13) = 4.0;  // D1: i diag(3,1,-1,-3)
  raw(14) = 3.0;  // D2
  VectorXd z0 = pr.p_part(pr.pair_coords(raw));
  z0 /= z0.norm();
  auto flat = std::make_shared<const SRepOrbit>(a3, z0);
  REQUIRE(flat->base_germ().dim_m() == 6);
  REQUIRE(flat->base_germ().codim() == 3);
  SphericalSRepOrbit orbit(flat);
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.codim() == 2);

  double scan = 0.9 * M_PI * orbit.radius();
  MatrixXd rot(2, 2);
  double ang = 0.7;
  rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  FocalStructureReport rep = preserves_focal_structure(rot, g, g, 10, 17, scan);
  REQUIRE(rep.failures >= 1);
  REQUIRE(!rep.all_pass);

  // identity still passes on the same germ
  FocalStructureReport id_rep =
      preserves_focal_structure(MatrixXd::Identity(2, 2), g, g, 6, 19, scan);
  REQUIRE(id_rep.all_pass);
}

TEST_CASE("profile CSV serialization") {
  auto sphere_pair = make_germ("so", 4, "so(3)");
  SRepOrbit orbit(sphere_pair, 0.8 * VectorXd::Unit(3, 0));
  OrbitGerm g = orbit.base_germ();
  VectorXd inward = -g.z0.normalized();
  FocalProfile prof = focal_profile(g, inward, 2.0, 64);
  std::ostringstream os;
  write_profile_csv(prof, os);
  std::string out = os.str();
  REQUIRE(out.rfind("radius,multiplicity,min_singular_value\n", 0) == 0);
  // one header + 64 scan rows + one event row
  REQUIRE(std::count(out.begin(), out.end(), '\n') == 1 + 64 + 1);
}
