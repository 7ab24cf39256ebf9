#include <doctest.h>

#include <cmath>

#include "metaprior/math.hpp"
#include "metaprior/prior.hpp"
#include "metaprior/reptile.hpp"
#include "oracles.hpp"

using namespace metaprior;

namespace {

// 1 -> 1 identity network computing w*x + b.
WeightVector affine_net(Scalar w, Scalar b) {
  WeightVector net;
  net.layout = {{1, 1, Activation::kIdentity}};
  net.values = Vector(2);
  net.values << w, b;
  return net;
}

}  // namespace

TEST_CASE("constant positive network normalizes to the uniform density") {
  const Boundary boundary{4.0};
  const PriorDensity prior =
      PriorDensity::from_network(affine_net(0.0, 3.7), boundary, 128);
  for (Index i = 0; i < prior.density().size(); ++i) {
    CHECK(prior.density()[i] == doctest::Approx(0.125).epsilon(1e-12));
  }
  CHECK(prior.kind() == PriorKind::kMeta);
}

TEST_CASE("every constructor integrates to one") {
  const Boundary boundary{4.0};
  for (int seed = 0; seed < 5; ++seed) {
    WeightVector theta = init_weights(dense_layout({1, 16, 16, 1}), seed);
    theta.values[theta.values.size() - 1] = 1.0;  // keep output positive somewhere
    const PriorDensity prior =
        PriorDensity::from_network(theta, boundary, 1024);
    CHECK(std::abs(trapezoid(prior.grid(), prior.density()) - 1.0) < 1e-9);
  }
  const PriorDensity uni = PriorDensity::uniform(boundary, 512);
  CHECK(std::abs(trapezoid(uni.grid(), uni.density()) - 1.0) < 1e-12);
  const PriorDensity norm = PriorDensity::standard_normal(boundary, 512);
  CHECK(std::abs(trapezoid(norm.grid(), norm.density()) - 1.0) < 1e-9);
}

TEST_CASE("uniform prior is flat and symmetric") {
  const PriorDensity prior = PriorDensity::uniform(Boundary{4.0}, 257);
  for (Index i = 0; i < prior.grid().size(); ++i) {
    CHECK(prior.density()[i] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(prior.at(prior.grid()[i]) ==
          doctest::Approx(prior.at(-prior.grid()[i])));
  }
}

TEST_CASE("standard normal prior peaks at zero with the Gaussian decay") {
  const PriorDensity prior = PriorDensity::standard_normal(Boundary{4.0}, 1025);
  CHECK(prior.mode() == doctest::Approx(0.0));
  // normalization cancels in the ratio
  CHECK(prior.at(0.0) / prior.at(4.0) ==
        doctest::Approx(std::exp(8.0)).epsilon(1e-9));
}

TEST_CASE("degenerate networks are rejected") {
  const Boundary boundary{4.0};
  SUBCASE("identically zero output") {
    CHECK_THROWS_AS(
        PriorDensity::from_network(affine_net(0.0, 0.0), boundary, 64),
        DegeneratePriorError);
  }
  SUBCASE("strictly negative output") {
    CHECK_THROWS_AS(
        PriorDensity::from_network(affine_net(0.0, -2.0), boundary, 64),
        DegeneratePriorError);
  }
  SUBCASE("grid too coarse") {
    CHECK_THROWS_AS(
        PriorDensity::from_network(affine_net(0.0, 1.0), boundary, 8),
        std::invalid_argument);
  }
}

TEST_CASE("positive rescaling of the network leaves the density unchanged") {
  const Boundary boundary{4.0};
  WeightVector theta = init_weights(dense_layout({1, 16, 16, 1}), 11);
  // lift the output bias so no grid point is clamped
  theta.values[theta.values.size() - 1] = 5.0;

  // scaling the final layer (16 weights + bias) scales the output linearly
  WeightVector scaled = theta;
  scaled.values.tail(17) *= 3.0;

  const PriorDensity a = PriorDensity::from_network(theta, boundary, 512);
  const PriorDensity b = PriorDensity::from_network(scaled, boundary, 512);
  CHECK((a.density() - b.density()).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("grid refinement is stable at shared points") {
  const Boundary boundary{4.0};
  WeightVector theta = init_weights(dense_layout({1, 16, 16, 1}), 13);
  theta.values[theta.values.size() - 1] = 5.0;

  const PriorDensity coarse = PriorDensity::from_network(theta, boundary, 257);
  const PriorDensity fine = PriorDensity::from_network(theta, boundary, 513);
  for (Index i = 0; i < coarse.grid().size(); ++i) {
    CHECK(std::abs(coarse.density()[i] - fine.density()[2 * i]) < 1e-3);
  }
}

TEST_CASE("interpolation and mode lookup") {
  const Boundary boundary{2.0};
  const PriorDensity prior = PriorDensity::standard_normal(boundary, 401);

  SUBCASE("interpolated values match grid values exactly on the grid") {
    for (Index i = 0; i < prior.grid().size(); i += 37) {
      CHECK(prior.at(prior.grid()[i]) == doctest::Approx(prior.density()[i]));
    }
  }
  SUBCASE("between grid points the value is between the endpoints") {
    const Scalar x = 0.5 * (prior.grid()[10] + prior.grid()[11]);
    const Scalar v = prior.at(x);
    CHECK(v >= std::min(prior.density()[10], prior.density()[11]));
    CHECK(v <= std::max(prior.density()[10], prior.density()[11]));
  }
  SUBCASE("outside the grid clamps to the edge") {
    CHECK(prior.at(-10.0) == prior.density()[0]);
    CHECK(prior.at(10.0) == prior.density()[prior.density().size() - 1]);
  }
}

TEST_CASE("a briefly trained network yields a unimodal interior prior") {
  TaskClassConfig task_cfg;
  ReptileConfig cfg;
  cfg.outer_iters = 400;
  cfg.seed = 31;
  const MetaState state =
      train(cfg, task_cfg, dense_layout({1, 32, 32, 1}));

  const PriorDensity prior =
      PriorDensity::from_network(state.theta, task_cfg.boundary, 1024);
  CHECK(oracles::is_unimodal(prior.density(), 1e-3));
  CHECK(std::abs(prior.mode()) < 4.0 - 1e-6);
  CHECK(std::abs(trapezoid(prior.grid(), prior.density()) - 1.0) < 1e-9);
}
