// Copyright 2026 The DNSM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "dnsm/core_model.hpp"
#include "dnsm/error.hpp"
#include "fixtures.hpp"

using namespace dnsm;

TEST_CASE("coordinate frame maps the longest side to [0, 1]") {
  const CoordFrame f(200, 100);
  CHECK(f.scale() == doctest::Approx(0.005));
  CHECK(f.pixel_area() == doctest::Approx(2.5e-5));
  const Point2 p = f.to_normalized(0, 199);
  CHECK(p.x == doctest::Approx(0.9975));
  CHECK(p.y == doctest::Approx(0.0025));
  double row = 0, col = 0;
  f.to_pixel(p, row, col);
  CHECK(row == doctest::Approx(0.0));
  CHECK(col == doctest::Approx(199.0));
}

TEST_CASE("shape raster rejects bad input") {
  CHECK_THROWS_AS(ShapeRaster(2, 2, {1, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(ShapeRaster(2, 2, {0, 0, 0, 0}), InvalidArgument);
  const ShapeRaster s(2, 2, {0, 7, 0, 1});
  CHECK(s.foreground_count() == 2);
  CHECK(s.at(0, 1));
  CHECK_FALSE(s.at(1, 0));
}

TEST_CASE("sigmoid matches the logistic function") {
  // Independent values of 1 / (1 + exp(-z)).
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(10.0) == doctest::Approx(0.9999546021312976).epsilon(1e-15));
  CHECK(sigmoid(-10.0) ==
        doctest::Approx(4.5397868702434395e-05).epsilon(1e-13));
  CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));

  // The complement is accurate where 1 - value would cancel.
  const auto deep = sigmoid_pair(40.0);
  CHECK(deep.value == 1.0);
  CHECK(deep.complement ==
        doctest::Approx(4.248354255291589e-18).epsilon(1e-12));

  const auto far = sigmoid_pair(-800.0);
  CHECK(std::isfinite(far.value));
  CHECK(far.value >= 0.0);
  CHECK(far.complement == 1.0);
}

TEST_CASE("model config validation") {
  CHECK_NOTHROW(ModelConfig{}.validate());
  CHECK_THROWS_AS((ModelConfig{.n_polytopes = 0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelConfig{.m_halfspaces = 2}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelConfig{.dimension = 3}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelConfig{.slope = 0.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModelConfig{.slope = INFINITY}.validate()),
                  InvalidArgument);
}

TEST_CASE("model construction checks shapes and finiteness") {
  const Polytope box = fixtures::box_polytope(0.1, 0.9, 0.1, 0.9, 50.0);
  ModelConfig cfg{.n_polytopes = 2, .m_halfspaces = 4};
  CHECK_THROWS_AS(DnsmModel(cfg, {box}), InvalidArgument);
  cfg.n_polytopes = 1;
  cfg.m_halfspaces = 5;
  CHECK_THROWS_AS(DnsmModel(cfg, {box}), InvalidArgument);
  cfg.m_halfspaces = 4;
  Polytope bad = box;
  bad.discriminants[2].bias = NAN;
  CHECK_THROWS_AS(DnsmModel(cfg, {bad}), InvalidArgument);
  CHECK_NOTHROW(DnsmModel(cfg, {box}));
}

TEST_CASE("flatten and unflatten are inverse") {
  std::mt19937_64 rng(7);
  const DnsmModel m = fixtures::random_model(rng, 3, 5);
  CHECK(m.parameter_count() == 3u * 5u * 3u);
  const auto flat = m.flatten();
  REQUIRE(flat.size() == m.parameter_count());
  CHECK(flat[0] == m[0].discriminants[0].weights[0]);
  CHECK(flat[1] == m[0].discriminants[0].weights[1]);
  CHECK(flat[2] == m[0].discriminants[0].bias);
  CHECK(flat[3 * 5] == m[1].discriminants[0].weights[0]);
  CHECK(DnsmModel::unflatten(m.config(), flat) == m);
  CHECK_THROWS_AS(
      DnsmModel::unflatten(m.config(), std::span(flat).first(flat.size() - 1)),
      InvalidArgument);
}

TEST_CASE("subset keeps the listed polytopes in order") {
  std::mt19937_64 rng(8);
  const DnsmModel m = fixtures::random_model(rng, 4, 3);
  const std::vector<std::size_t> keep{3, 1};
  const DnsmModel s = m.subset(keep);
  REQUIRE(s.size() == 2);
  CHECK(s.config().n_polytopes == 2);
  CHECK(s[0] == m[3]);
  CHECK(s[1] == m[1]);
  const std::vector<std::size_t> bad{4};
  CHECK_THROWS_AS(m.subset(bad), InvalidArgument);
}

TEST_CASE("hardened half-space agrees with the affine indicator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 2000; ++k) {
    const Discriminant d{{u(rng) * 30, u(rng) * 30}, u(rng) * 30};
    const Point2 x{u(rng), u(rng)};
    CHECK((eval_halfspace(d, x) >= 0.5) == (d.affine(x) >= 0.0));
  }
}

TEST_CASE("model value equals inclusion-exclusion for up to three polytopes") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 3; ++n) {
    const DnsmModel m = fixtures::random_model(rng, n, 4);
    for (int k = 0; k < 200; ++k) {
      const Point2 x{u(rng), u(rng)};
      std::vector<double> g;
      for (const auto& p : m.polytopes()) g.push_back(eval_polytope(p, x));
      double expanded = 0.0;
      if (n == 1) {
        expanded = g[0];
      } else if (n == 2) {
        expanded = g[0] + g[1] - g[0] * g[1];
      } else {
        expanded = g[0] + g[1] + g[2] - g[0] * g[1] - g[0] * g[2] -
                   g[1] * g[2] + g[0] * g[1] * g[2];
      }
      const double f = eval_model(m, x);
      CHECK(f == doctest::Approx(expanded).epsilon(1e-12));
      for (double gi : g) CHECK(f >= gi - 1e-15);
    }
  }
}

TEST_CASE("polytope value is the product of its sigmoids") {
  std::mt19937_64 rng(13);
  const DnsmModel m = fixtures::random_model(rng, 1, 5);
  const Point2 x{0.4, 0.6};
  double product = 1.0;
  for (const auto& d : m[0].discriminants) {
    product *= 1.0 / (1.0 + std::exp(-d.affine(x)));
  }
  CHECK(eval_polytope(m[0], x) == doctest::Approx(product).epsilon(1e-14));
}

TEST_CASE("hard polytopes are convex") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pairs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const DnsmModel m = fixtures::random_model(rng, 1, 6, 20.0, 80.0);
    std::vector<Point2> inside;
    for (int k = 0; k < 4000 && inside.size() < 40; ++k) {
      const Point2 x{u(rng), u(rng)};
      if (eval_polytope(m[0], x) >= 0.51) inside.push_back(x);
    }
    for (std::size_t a = 0; a < inside.size(); ++a) {
      for (std::size_t b = a + 1; b < inside.size(); ++b) {
        ++pairs;
        for (int s = 1; s < 10; ++s) {
          const double t = s / 10.0;
          const Point2 x{inside[a].x + t * (inside[b].x - inside[a].x),
                         inside[a].y + t * (inside[b].y - inside[a].y)};
          CHECK(eval_polytope(m[0], x) >= 0.5);
        }
      }
    }
  }
  CHECK(pairs > 100);
}

TEST_CASE("disc polytope is a regular polygon of the given apothem") {
  const Point2 c{0.5, 0.4};
  const Polytope p = make_disc_polytope(c, 0.1, 16, 60.0);
  REQUIRE(p.discriminants.size() == 16);
  CHECK(eval_polytope(p, c) > 0.9);
  CHECK(eval_polytope(p, {0.5, 0.65}) < 1e-3);
  for (int j = 0; j < 16; ++j) {
    const auto& d = p.discriminants[static_cast<std::size_t>(j)];
    CHECK(std::hypot(d.weights[0], d.weights[1]) == doctest::Approx(60.0));
    // The face of half-space j passes through c - r n_j.
    const double angle = 2.0 * std::numbers::pi * j / 16;
    const Point2 face{c.x - 0.1 * std::cos(angle), c.y - 0.1 * std::sin(angle)};
    CHECK(d.affine(face) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_disc_polytope(c, 0.0, 16, 60.0), InvalidArgument);
}

TEST_CASE("with_slope keeps hyperplanes and resets sharpness") {
  std::mt19937_64 rng(15);
  const DnsmModel m = fixtures::random_model(rng, 2, 4);
  const DnsmModel r = with_slope(m, 30.0);
  CHECK(r.config().slope == 30.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& a = m[i].discriminants[j];
      const auto& b = r[i].discriminants[j];
      CHECK(std::hypot(b.weights[0], b.weights[1]) == doctest::Approx(30.0));
      const Point2 x{0.3, 0.7};
      CHECK((a.affine(x) >= 0) == (b.affine(x) >= 0));
      const double k = 30.0 / std::hypot(a.weights[0], a.weights[1]);
      CHECK(b.affine(x) == doctest::Approx(k * a.affine(x)));
    }
  }
}

TEST_CASE("initialization grid is centered on the foreground box") {
  // Full 8x8 foreground, spacing 0.25: four centers per axis.
  const ShapeRaster s = fixtures::paint(8, 8, [](int, int) { return true; });
  const DnsmModel m = init_polytopes(s, 0.1, 0.25, ModelConfig{});
  REQUIRE(m.size() == 16);
  CHECK(m.config().n_polytopes == 16);
  std::set<double> xs, ys;
  for (const auto& p : m.polytopes()) {
    // Half-space 0 has normal (1, 0), half-space M/4 has normal (0, 1).
    const auto& dx = p.discriminants[0];
    const auto& dy = p.discriminants[kDefaultHalfspaces / 4];
    xs.insert(std::round((0.1 - dx.bias / dx.weights[0]) * 1e9) / 1e9);
    ys.insert(std::round((0.1 - dy.bias / dy.weights[1]) * 1e9) / 1e9);
  }
  const std::set<double> expected{0.125, 0.375, 0.625, 0.875};
  CHECK(xs == expected);
  CHECK(ys == expected);
}

TEST_CASE("initialization keeps only centers on the foreground") {
  const ShapeRaster l = fixtures::l_shape(96);
  const DnsmModel m = init_polytopes(l, 0.08, 0.08, ModelConfig{});
  CHECK(m.size() > 10);
  for (const auto& p : m.polytopes()) {
    const auto& dx = p.discriminants[0];
    const auto& dy = p.discriminants[kDefaultHalfspaces / 4];
    const double cx = 0.08 - dx.bias / dx.weights[0];
    const double cy = 0.08 - dy.bias / dy.weights[1];
    const double sc = l.frame().scale();
    CHECK(l.at(static_cast<int>(cy / sc), static_cast<int>(cx / sc)));
  }
}

TEST_CASE("initialization fails when no center lands on the foreground") {
  const ShapeRaster corners = fixtures::paint(
      8, 8, [](int r, int c) { return (r == 0 && c == 0) || (r == 7 && c == 7); });
  CHECK_THROWS_AS(init_polytopes(corners, 0.1, 1.0, ModelConfig{}), Error);
  CHECK_THROWS_AS(init_polytopes(corners, 0.0, 0.1, ModelConfig{}),
                  InvalidArgument);
  CHECK_THROWS_AS(init_polytopes(corners, 0.1, -1.0, ModelConfig{}),
                  InvalidArgument);
}
