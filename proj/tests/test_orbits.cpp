#include <catch2/catch_amalgamated.hpp>

#include "eqf/orbits.hpp"
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

}  // namespace

TEST_CASE("srep germ: distance sphere orbit in the sphere pair") {
  auto sphere = make_germ("so", 4, "so(3)");  // p = R^3, K = SO(3)
  double r = 0.7;
  VectorXd z0 = r * VectorXd::Unit(3, 0);
  SRepOrbit orbit(sphere, z0);
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 2);
  REQUIRE(g.codim() == 1);
  // normal space is the radial line (rank-1 pair: the flat through z0)
  REQUIRE(std::abs(std::abs(g.normal.col(0).dot(z0.normalized())) - 1.0) < 1e-10);
  // classical sphere oracle: A along the inward normal is id / r
  VectorXd inward = g.normal_coords(VectorXd(-z0.normalized()));
  MatrixXd a = g.shape_op(inward);
  REQUIRE((a - MatrixXd::Identity(2, 2) / r).norm() < 1e-9);
  REQUIRE(shape_fd_residual(orbit, orbit.identity_state()) < 1e-6);

  REQUIRE_THROWS_AS(SRepOrbit(sphere, VectorXd::Zero(3)), Error);
}

TEST_CASE("srep germ: regular orbit in the CP^2 isotropy representation is S^3") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  Rng rng(5);
  VectorXd z0 = random_unit(rng, 4);
  SRepOrbit orbit(cp2, z0);
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 3);  // rank oracle: dim [k, z0] = 3
  REQUIRE(g.codim() == 1);
  REQUIRE(g.shape_symmetry_residual() <= 1e-9);
  VectorXd xi = random_unit(rng, 1);
  REQUIRE((g.shape_op(2.5 * xi) - 2.5 * g.shape_op(xi)).norm() < 1e-12);
}

TEST_CASE("hermann germ: orbit of K through the base point is a point") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd k_self = MatrixXd::Zero(cp2->pair().dim(), cp2->pair().dim_k());
  k_self.topRows(cp2->pair().dim_k()).setIdentity();
  HermannOrbit orbit(cp2, k_self, VectorXd::Zero(4));
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 0);
  REQUIRE(g.codim() == 4);
}

TEST_CASE("hermann germ: CP^1 in CP^2 is 2-dimensional and totally geodesic") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  REQUIRE(ktilde.cols() == 4);
  HermannOrbit orbit(cp2, ktilde, VectorXd::Zero(4));
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 2);
  REQUIRE(g.codim() == 2);
  for (const auto& a : g.shape) REQUIRE(a.norm() < 1e-10);  // totally geodesic
  REQUIRE(shape_fd_residual(orbit, orbit.identity_state()) < 1e-6);
}

TEST_CASE("hermann germ: principal orbit at a generic offset has codimension 1") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  Rng rng(11);
  VectorXd offset = 0.35 * random_unit(rng, 4);
  HermannOrbit orbit(cp2, ktilde, offset);
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.dim_m() == 3);
  REQUIRE(g.codim() == 1);
  REQUIRE(g.shape_symmetry_residual() <= 1e-9);
  // Koszul-formula shape operator against the finite-difference geodesic fit
  REQUIRE(shape_fd_residual(orbit, orbit.identity_state(), 1e-3, 2, 7) < 1e-5);
  // germs at other states stay principal and certified
  VectorXd gen = random_unit(rng, orbit.acting_dim());
  MatrixXd moved = orbit.step_state(orbit.identity_state(), gen, 0.4);
  REQUIRE(orbit.germ_at_state(moved).dim_m() == 3);
  REQUIRE(shape_fd_residual(orbit, moved) < 1e-5);

  MatrixXd broken = ktilde;
  broken.col(0) = cp2->pair().embed_p(random_unit(rng, 4));
  REQUIRE_THROWS_AS(HermannOrbit(cp2, broken, offset), Error);
}

TEST_CASE("normal transport on an s-rep orbit matches the closed form exp(tm)_*") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  Rng rng(23);
  VectorXd z0 = random_unit(rng, 4);
  SRepOrbit orbit(cp2, z0);
  OrbitGerm g = orbit.base_germ();
  auto [h, m] = cp2->pair().stabilizer_split(z0);
  REQUIRE(m.cols() > 0);

  VectorXd mdir = m * random_unit(rng, static_cast<int>(m.cols()));
  VectorXd v = g.normal * random_unit(rng, g.codim());
  CurveWord w = {{mdir, 1.0}};
  TransportResult res = normal_parallel_transport(orbit, w, v, 0.01);
  VectorXd closed = orbit.closed_form_transport(mdir, 1.0, v);
  REQUIRE((res.vectors.col(0) - closed).norm() <= 1e-6);

  TransportResult res0 = normal_parallel_transport(orbit, {}, v, 0.01);
  REQUIRE((res0.vectors.col(0) - v).norm() == 0.0);

  TransportResult basis = transport_normal_basis(orbit, w, 0.01);
  REQUIRE(orthogonality_residual(basis.frame_map) <= 1e-6);
  REQUIRE(basis.norm_drift <= 1e-8);
}

TEST_CASE("normal transport along Hermann orbit curves is isometric and reversible") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  HermannOrbit orbit(cp2, ktilde, VectorXd::Zero(4));
  OrbitGerm g = orbit.base_germ();
  Rng rng(31);
  VectorXd gen = random_unit(rng, orbit.acting_dim());
  CurveWord w = {{gen, 0.8}};
  TransportResult fwd = transport_normal_basis(orbit, w, 0.005);
  REQUIRE(fwd.norm_drift <= 1e-7);
  CurveWord back = {{gen, 0.8}, {gen, -0.8}};
  TransportResult round = transport_normal_basis(orbit, back, 0.005);
  REQUIRE((round.frame_map - MatrixXd::Identity(g.codim(), g.codim())).norm() < 1e-6);
}

TEST_CASE("commutator loops close exactly") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  HermannOrbit orbit(cp2, ktilde, VectorXd::Zero(4));
  Rng rng(41);
  VectorXd g1 = random_unit(rng, orbit.acting_dim());
  VectorXd g2 = random_unit(rng, orbit.acting_dim());
  CurveWord loop = commutator_loop(orbit, g1, g2, 0.4);
  REQUIRE((orbit.end_state(loop) - orbit.identity_state()).norm() < 1e-9);
}

TEST_CASE("holonomy_tube_sample: empty curve set, norms, and radius guard") {
  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  MatrixXd ktilde = hermann_subalgebra(*cp2, "su", 3, "s(u(1)+u(2))");
  HermannOrbit orbit(cp2, ktilde, VectorXd::Zero(4));
  OrbitGerm g = orbit.base_germ();
  g.epsilon = 1.0;  // focal-based estimate exercised in the focal tests
  Rng rng(3);
  VectorXd eta = 0.3 * (g.normal * random_unit(rng, g.codim()));

  auto none = holonomy_tube_sample(orbit, g, eta, {});
  REQUIRE(none.size() == 1);
  REQUIRE((none[0].local - eta).norm() == 0.0);

  std::vector<CurveWord> loops;
  for (int i = 0; i < 3; ++i)
    loops.push_back(commutator_loop(orbit, random_unit(rng, 4), random_unit(rng, 4), 0.3));
  auto samples = holonomy_tube_sample(orbit, g, eta, loops, 0.005);
  for (const auto& s : samples) REQUIRE(std::abs(s.local.norm() - eta.norm()) <= 1e-6);

  OrbitGerm g0 = orbit.base_germ();  // epsilon unset
  REQUIRE_THROWS_AS(holonomy_tube_sample(orbit, g0, eta, {}), Error);
  VectorXd big = 2.0 * (g.normal * random_unit(rng, g.codim()));
  REQUIRE_THROWS_AS(holonomy_tube_sample(orbit, g, big, {}), Error);
}

TEST_CASE("spherical s-rep orbit: dimensions, isometry, and certified shape") {
  // SU(3)/SO(3) isotropy representation on R^5; the singular orbit through
  // i*diag(2,-1,-1) is 2-dimensional with codimension 2 in the sphere S^4.
  auto r2 = make_germ("su", 3, "so(3)");
  const auto& pr = r2->pair();
  VectorXd raw = VectorXd::Zero(8);  // su(3) basis order: S01 S02 S12 A01 A02 A12 D0 D1
  raw(6) = 2.0;
  raw(7) = 1.0;
  VectorXd full = pr.pair_coords(raw);
  REQUIRE(pr.k_part(full).norm() < 1e-12);
  VectorXd z0 = pr.p_part(full);
  auto flat = std::make_shared<const SRepOrbit>(r2, z0);
  REQUIRE(flat->base_germ().dim_m() == 2);
  REQUIRE(flat->base_germ().codim() == 3);

  SphericalSRepOrbit orbit(flat);
  OrbitGerm g = orbit.base_germ();
  REQUIRE(g.ambient == OrbitGerm::Ambient::Space);
  REQUIRE(g.dim_m() == 2);
  REQUIRE(g.codim() == 2);  // codim in the sphere

  // sphere model curvature matches 1/R^2
  double R = orbit.radius();
  VectorXd e0 = VectorXd::Unit(orbit.space().dim(), 0), e1 = VectorXd::Unit(orbit.space().dim(), 1);
  REQUIRE(std::abs(orbit.space().sectional_numerator(e0, e1) - 1.0 / (R * R)) < 1e-9);

  // model exp agrees with the Euclidean sphere exponential (gauge-free check)
  Rng rng(8);
  VectorXd eta = 0.4 * (g.normal * random_unit(rng, g.codim()));
  SpacePoint via_model = g.exp_point(eta);
  VectorXd eta_flat = orbit.local_to_transport(orbit.identity_state(), eta);
  VectorXd z = flat->z0();
  VectorXd x = std::cos(eta.norm() / R) * z + R * std::sin(eta.norm() / R) * eta_flat.normalized();
  SpacePoint via_euclid = orbit.point_of(x / x.norm());
  REQUIRE(orbit.space().distance(via_model, via_euclid) < 1e-8);
  REQUIRE(std::abs(orbit.space().distance(via_model, SpacePoint{g.base_ad}) - eta.norm()) < 1e-8);

  // certified shape operators through the full spherization chain
  REQUIRE(shape_fd_residual(orbit, orbit.identity_state(), 1e-3) < 1e-5);

  // transport: isometric frame map, radial component never appears
  VectorXd gen = random_unit(rng, orbit.acting_dim());
  TransportResult res = transport_normal_basis(orbit, {{gen, 0.7}}, 0.005);
  REQUIRE(orthogonality_residual(res.frame_map) <= 1e-6);
  VectorXd zc = flat->germ_at_state(res.end_state).z0;
  for (int c = 0; c < res.vectors.cols(); ++c)
    REQUIRE(std::abs(res.vectors.col(c).dot(zc.normalized())) < 1e-7);
}
