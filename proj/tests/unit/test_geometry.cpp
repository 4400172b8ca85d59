#include <cmath>
#include <limits>

#include "doctest.h"
#include "spherepol/geometry.hpp"

using namespace spherepol;

TEST_CASE("lattice of unit spheres at edge 2.5") {
  Configuration c = build_lattice(5, 5, 5, 2.5, {{1.0, 10.0, 1.0}}, Pattern::Alternating);
  REQUIRE(c.size() == 125);
  AssumptionReport r = validate(c);
  CHECK(r.min_separation == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.sign_uniform == SignCase::AllGreater);
  // i fastest ordering and checkerboard charges
  CHECK(c.spheres[1].center == Vec3{2.5, 0, 0});
  CHECK(c.spheres[5].center == Vec3{0, 2.5, 0});
  CHECK(c.spheres[0].charge == 1.0);
  CHECK(c.spheres[1].charge == -1.0);
  CHECK(c.spheres[6].charge == 1.0);
}

TEST_CASE("two-species lattice") {
  Configuration c = build_lattice(8, 8, 8, 7.0, {{3, 10, -1}, {2, 5, 1}}, Pattern::Alternating);
  REQUIRE(c.size() == 512);
  CHECK(validate(c).min_separation == doctest::Approx(2.0));
  CHECK(c.spheres[0].radius == 3.0);
  CHECK(c.spheres[1].radius == 2.0);
  CHECK(c.spheres[1].charge == 1.0);
}

TEST_CASE("striped pattern follows the layer index") {
  Configuration c = build_lattice(2, 2, 2, 3.0, {{1, 10, 1}}, Pattern::Striped);
  for (int k = 0; k < 8; ++k) CHECK(c.spheres[k].charge == (k < 4 ? 1.0 : -1.0));
}

TEST_CASE("single sphere has infinite separation") {
  Configuration c = build_lattice(1, 1, 1, 0.1, {{1, 10, 1}}, Pattern::Alternating);
  CHECK(c.size() == 1);
  CHECK(validate(c).min_separation == std::numeric_limits<double>::infinity());
}

TEST_CASE("overlap and invalid data are rejected") {
  CHECK_THROWS_AS(build_lattice(2, 1, 1, 1.9, {{1, 10, 1}}, Pattern::Alternating), GeometryError);
  Configuration c;
  c.spheres = {{{0, 0, 0}, 1, 10, 0}, {{1.5, 0, 0}, 1, 10, 0}};
  CHECK_THROWS_AS(validate(c), GeometryError);
  c.spheres = {{{0, 0, 0}, -1, 10, 0}};
  CHECK_THROWS_AS(validate(c), GeometryError);
  c.spheres = {{{0, 0, 0}, 1, 1.0, 0}};
  CHECK_THROWS_AS(validate(c), GeometryError);
}

TEST_CASE("separation arithmetic and sign cases") {
  Configuration c;
  c.spheres = {{{0, 0, 0}, 1, 10, 0}, {{2.0001, 0, 0}, 1, 0.5, 0}};
  AssumptionReport r = validate(c);
  CHECK(r.min_separation == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(r.sign_uniform == SignCase::Mixed);
  c.spheres[0].kappa = 0.2;
  CHECK(sign_case(c) == SignCase::AllLess);
}

TEST_CASE("separation is invariant under reordering and rigid motion") {
  Configuration c;
  c.spheres = {{{0, 0, 0}, 1, 10, 0}, {{3, 1, 0}, 0.5, 10, 0}, {{0, 4, 2}, 2, 10, 0}};
  double s = min_separation(c);
  std::swap(c.spheres[0], c.spheres[2]);
  CHECK(min_separation(c) == doctest::Approx(s));
  for (Sphere& sp : c.spheres) sp.center = Vec3{-sp.center.y, sp.center.x, sp.center.z} + Vec3{5, -2, 7};
  CHECK(min_separation(c) == doctest::Approx(s));
}
