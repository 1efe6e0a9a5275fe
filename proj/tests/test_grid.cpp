#include <gtest/gtest.h>

#include <algorithm>

#include "gbu/grid.hpp"

namespace {

TEST(Grid, DefaultSpacing) {
  const gbu::Grid g = gbu::build_grid(gbu::DomainSpec{}, 151, 251);
  EXPECT_DOUBLE_EQ(g.hx(), 0.02);
  EXPECT_DOUBLE_EQ(g.hy(), 0.01);
  EXPECT_EQ(g.center_column(), 75u);
  EXPECT_EQ(g.x(g.center_column()), 0.0);
  EXPECT_EQ(g.x(0), -1.5);
  EXPECT_EQ(g.x(150), 1.5);
  EXPECT_EQ(g.y(250), 2.5);
}

TEST(Grid, EvenColumnCountRejected) {
  EXPECT_THROW(gbu::build_grid(gbu::DomainSpec{}, 150, 251), gbu::GeometryError);
}

TEST(Grid, TooSmallRejected) { EXPECT_THROW(gbu::Grid(1.0, 1.0, 3, 11), gbu::GeometryError); }

TEST(Grid, AbscissaeMirrorBitwise) {
  const gbu::Grid g(1.5, 2.5, 151, 251);
  for (std::size_t i = 0; i < g.nx(); ++i) EXPECT_EQ(g.x(i), -g.x(g.mirror(i)));
}

TEST(Grid, BoundaryFlags) {
  const gbu::Grid g(1.0, 1.0, 11, 11);
  EXPECT_TRUE(g.is_boundary(0, 5));
  EXPECT_TRUE(g.is_boundary(10, 5));
  EXPECT_TRUE(g.is_boundary(5, 0));
  EXPECT_TRUE(g.is_boundary(5, 10));
  EXPECT_FALSE(g.is_boundary(5, 5));
}

TEST(Domain, ValidationRejectsRhoBeyondX1) {
  gbu::DomainSpec d;
  d.rho = 0.8;
  EXPECT_THROW(gbu::validate_domain(d), gbu::GeometryError);
}

TEST(BoundaryDistance, RectangleValues) {
  const gbu::Grid g(1.5, 2.5, 151, 251);
  const gbu::Field d = gbu::boundary_distance(g);
  EXPECT_DOUBLE_EQ(d(75, 125), 1.25);
  EXPECT_EQ(d(40, 0), 0.0);
  EXPECT_DOUBLE_EQ(d(75, 1), g.hy());
  double m = 0.0;
  for (double v : d.values) m = std::max(m, v);
  EXPECT_DOUBLE_EQ(m, 1.25);
}

TEST(Field, MirrorIsInvolution) {
  const gbu::Grid g(1.0, 1.0, 21, 11);
  const gbu::Field f = gbu::Field::sample(g, [](double x, double y) { return x * x * x + y; });
  const gbu::Field m = gbu::mirror_x(f);
  EXPECT_EQ(m(0, 3), f(20, 3));
  EXPECT_EQ(gbu::mirror_x(m).values, f.values);
}

}  // namespace
