#include <catch2/catch_amalgamated.hpp>

#include "eqf/symmetric_space.hpp"
#include "oracles.hpp"

using namespace eqf;

namespace {

std::shared_ptr<const SymmetricSpaceGerm> make_germ(const std::string& alg, int n,
                                                    const std::string& inv, double scale = 1.0) {
  auto doc = builtin_algebra_document(alg, n, inv, scale);
  auto model = std::make_shared<const LieAlgebraModel>(LieAlgebraModel::from_document(doc));
  auto pair = std::make_shared<const CartanDecomposition>(model, model->involution_candidate());
  return std::make_shared<const SymmetricSpaceGerm>(pair);
}

}  // namespace

TEST_CASE("curvature symmetries, Bianchi, and nonnegative sectional curvature") {
  for (auto germ : {make_germ("su", 3, "s(u(2)+u(1))"), make_germ("so", 4, "so(3)")}) {
    Rng rng(5);
    const int dp = germ->dim();
    double worst_sym = 0, worst_bianchi = 0, worst_sec = 0;
    for (int t = 0; t < 1000; ++t) {
      VectorXd x = random_vector(rng, dp), y = random_vector(rng, dp), z = random_vector(rng, dp),
               w = random_vector(rng, dp);
      double rxyzw = w.dot(germ->curvature(x, y, z));
      worst_sym = std::max(worst_sym, std::abs(rxyzw + w.dot(germ->curvature(y, x, z))));
      worst_sym = std::max(worst_sym, std::abs(rxyzw + z.dot(germ->curvature(x, y, w))));
      worst_sym = std::max(worst_sym, std::abs(rxyzw - y.dot(germ->curvature(z, w, x))));
      VectorXd bianchi = germ->curvature(x, y, z) + germ->curvature(y, z, x) + germ->curvature(z, x, y);
      worst_bianchi = std::max(worst_bianchi, bianchi.norm());
      worst_sec = std::min(worst_sec, germ->sectional_numerator(x, y));
    }
    REQUIRE(worst_sym <= 1e-9);
    REQUIRE(worst_bianchi <= 1e-9);
    REQUIRE(worst_sec >= -1e-10);

    // R(x,x) = 0 and skewness of the curvature operator.
    VectorXd x = random_vector(rng, dp), y = random_vector(rng, dp);
    REQUIRE(germ->curvature_op(x, x).norm() < 1e-12);
    REQUIRE(skew_residual(germ->curvature_op(x, y)) <= 1e-9);
  }
}

TEST_CASE("sphere pair: sectional curvature equals the bracket norm squared") {
  auto germ = make_germ("so", 3, "so(2)");  // S^2 germ
  Rng rng(2);
  for (int t = 0; t < 25; ++t) {
    MatrixXd fr = orthonormal_span(MatrixXd::Random(germ->dim(), 2));
    VectorXd x = fr.col(0), y = fr.col(1);
    double sec = germ->sectional_numerator(x, y);
    VectorXd k = germ->pair().bracket_pp(x, y);
    REQUIRE(sec > 0);
    REQUIRE(std::abs(sec - k.squaredNorm()) < 1e-10);
  }
}

TEST_CASE("flat directions commute and have zero curvature operator") {
  auto germ = make_germ("su", 3, "so(3)");  // rank-2 space SU(3)/SO(3)
  Rng rng(9);
  VectorXd eta = random_unit(rng, germ->dim());
  FlatSubspace flat = germ->maximal_abelian_through(eta);
  REQUIRE(flat.dimension == 2);
  REQUIRE(germ->curvature_op(flat.basis.col(0), flat.basis.col(1)).norm() < 1e-10);
}

TEST_CASE("jacobi_spectrum: sphere pair has eigenvalues {0, kappa x (n-1)}") {
  for (int n : {3, 4, 5}) {
    auto germ = make_germ("so", n + 1, "so(" + std::to_string(n) + ")");
    Rng rng(n);
    VectorXd eta = random_unit(rng, germ->dim());
    auto sp = germ->jacobi_spectrum(eta);
    REQUIRE(sp.levels.size() == 2);
    REQUIRE(std::abs(sp.levels[0].value) < 1e-12);
    REQUIRE(sp.levels[0].count == 1);
    REQUIRE(sp.levels[1].count == n - 1);
    REQUIRE(sp.levels[1].value > 0);
    // eta is a 0-eigenvector
    REQUIRE((germ->jacobi_operator(eta) * eta).norm() < 1e-10);
  }
}

TEST_CASE("jacobi_spectrum on CP^2: two nonzero levels with ratio 4") {
  auto germ = make_germ("su", 3, "s(u(2)+u(1))");
  Rng rng(4);
  VectorXd eta = random_unit(rng, 4);
  auto sp = germ->jacobi_spectrum(eta);
  REQUIRE(sp.levels.size() == 3);
  REQUIRE(std::abs(sp.levels[0].value) < 1e-12);
  REQUIRE(sp.levels[1].count == 2);
  REQUIRE(sp.levels[2].count == 1);
  REQUIRE(std::abs(sp.levels[2].value / sp.levels[1].value - 4.0) < 1e-6);

  // Dense-eigensolver oracle through the raw-coordinate bracket formula:
  // J(z) = -[[z, eta], eta] assembled entrywise in raw coordinates.
  const auto& pair = germ->pair();
  const auto& model = pair.model();
  const int dp = germ->dim();
  MatrixXd j_raw(dp, dp);
  VectorXd eta_raw = pair.raw_coords(pair.embed_p(eta));
  for (int c = 0; c < dp; ++c) {
    VectorXd zc = pair.p_basis().col(c);
    VectorXd jz = -model.bracket(model.bracket(zc, eta_raw), eta_raw);
    for (int r = 0; r < dp; ++r) j_raw(r, c) = pair.p_basis().col(r).dot(model.gram() * jz);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (j_raw + j_raw.transpose()));
  VectorXd want = es.eigenvalues();
  VectorXd got = sp.eigenvalues;
  REQUIRE((want - got).cwiseAbs().maxCoeff() < 1e-9);

  REQUIRE_THROWS_AS(germ->jacobi_spectrum(VectorXd::Zero(4)), Error);
}

TEST_CASE("jacobi spectrum is invariant under the isotropy action") {
  auto germ = make_germ("su", 3, "s(u(2)+u(1))");
  const auto& pair = germ->pair();
  std::vector<MatrixXd> kact;
  for (int a = 0; a < pair.dim_k(); ++a) kact.push_back(pair.ad_k_on_p(VectorXd::Unit(pair.dim_k(), a)));
  Rng rng(13);
  VectorXd eta = random_unit(rng, germ->dim());
  VectorXd ref = germ->jacobi_spectrum(eta).eigenvalues;
  for (const auto& g : haar_sample(kact, 12, 99)) {
    VectorXd rotated = germ->jacobi_spectrum(g.matrix * eta).eigenvalues;
    REQUIRE((rotated - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("maximal_abelian_through: rank-1 and rank-2 pairs") {
  auto sphere = make_germ("so", 5, "so(4)");
  Rng rng(8);
  VectorXd eta = random_unit(rng, sphere->dim());
  auto flat = sphere->maximal_abelian_through(eta);
  REQUIRE(flat.dimension == 1);
  REQUIRE(std::min((flat.basis.col(0) - eta).norm(), (flat.basis.col(0) + eta).norm()) < 1e-9);

  auto cp2 = make_germ("su", 3, "s(u(2)+u(1))");
  REQUIRE(cp2->maximal_abelian_through(random_unit(rng, 4)).dimension == 1);
  REQUIRE(cp2->rank() == 1);

  auto rank2 = make_germ("su", 3, "so(3)");
  REQUIRE(rank2->maximal_abelian_through(random_unit(rng, 5)).dimension == 2);
  REQUIRE(rank2->rank() == 2);
}

TEST_CASE("zero sectional vs vanishing operator (curvature-sign property)") {
  auto germ = make_germ("su", 3, "so(3)");
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    VectorXd eta = random_unit(rng, germ->dim());
    auto flat = germ->maximal_abelian_through(eta);
    for (int c = 0; c < flat.dimension; ++c) {
      VectorXd a = flat.basis.col(c);
      if (std::abs(germ->sectional_numerator(eta, a)) <= 1e-12)
        REQUIRE(germ->curvature_op(eta, a).norm() <= 1e-6);
    }
  }
}

TEST_CASE("transport_along_flat: identity on the flat, isometric, validated input") {
  auto germ = make_germ("so", 4, "so(3)");
  Rng rng(21);
  VectorXd eta = random_unit(rng, germ->dim());
  auto flat = germ->maximal_abelian_through(eta);

  auto tr = germ->transport_along_flat(flat, eta, eta, 0.7);
  REQUIRE((tr.local - eta).norm() < 1e-12);  // flat torus: coordinates fixed

  VectorXd w = random_unit(rng, germ->dim());
  auto tw = germ->transport_along_flat(flat, w, eta, 0.9);
  REQUIRE(std::abs(tw.generator.norm() - w.norm()) < 1e-9);  // isometry
  auto t0 = germ->transport_along_flat(flat, w, eta, 0.0);
  REQUIRE((t0.generator - germ->pair().embed_p(w)).norm() < 1e-12);

  VectorXd outside = orthonormal_complement(flat.basis, germ->dim()).col(0);
  REQUIRE_THROWS_AS(germ->transport_along_flat(flat, w, outside, 0.5), Error);
}

TEST_CASE("points: exp/log round trip and distances") {
  auto germ = make_germ("su", 3, "s(u(2)+u(1))");
  Rng rng(30);
  for (int t = 0; t < 10; ++t) {
    VectorXd eta = 0.4 * random_unit(rng, germ->dim());
    auto q = germ->exp_point(eta);
    VectorXd back = germ->log_to_base(q);
    REQUIRE((back - eta).norm() < 1e-9);
    REQUIRE(std::abs(germ->distance(germ->base_point(), q) - eta.norm()) < 1e-9);
  }
  auto a = germ->exp_point(0.3 * random_unit(rng, 4));
  auto b = germ->exp_point(0.2 * random_unit(rng, 4));
  REQUIRE(std::abs(germ->distance(a, b) - germ->distance(b, a)) < 1e-9);
}
