#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/grid.hpp"
#include "test_util.hpp"

using namespace dtlab;

TEST_CASE("interval grid layout") {
  Grid g = Grid::interval(0.0, 1.0, 9);
  CHECK(g.dim == 1);
  CHECK(g.h[0] == doctest::Approx(0.1));
  CHECK(g.nx() == 11);
  CHECK(g.ny() == 1);
  CHECK(g.total() == 11);
  CHECK(g.coord(0, 0) == doctest::Approx(0.0));
  CHECK(g.coord(0, 10) == doctest::Approx(1.0));
  CHECK(g.on_boundary(0));
  CHECK(g.on_boundary(10));
  CHECK_FALSE(g.on_boundary(5));
  CHECK(g.cell_volume() == doctest::Approx(0.1));
  CHECK(g.at(3) == 3);

  CHECK_ERRCODE(Err::InvalidArgument, Grid::interval(1.0, 0.0, 5));
  CHECK_ERRCODE(Err::InvalidArgument, Grid::interval(0.0, 1.0, 0));
}

TEST_CASE("rectangle grid layout") {
  Grid g = Grid::rectangle(0.0, 1.0, 3, 0.0, 2.0, 4);
  CHECK(g.dim == 2);
  CHECK(g.h[0] == doctest::Approx(0.25));
  CHECK(g.h[1] == doctest::Approx(0.4));
  CHECK(g.nx() == 5);
  CHECK(g.ny() == 6);
  CHECK(g.total() == 30);
  Vec p = g.point(1, 2);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.8));
  CHECK(g.on_boundary(0, 3));
  CHECK(g.on_boundary(2, 0));
  CHECK(g.on_boundary(4, 5));
  CHECK_FALSE(g.on_boundary(2, 3));
  CHECK(g.cell_volume() == doctest::Approx(0.1));
  CHECK(g.at(1, 2) == 8);
  CHECK(g.same_layout(Grid::rectangle(0.0, 1.0, 3, 0.0, 2.0, 4)));
  CHECK_FALSE(g.same_layout(Grid::rectangle(0.0, 1.0, 4, 0.0, 2.0, 4)));

  CHECK_ERRCODE(Err::InvalidArgument, Grid::rectangle(0.0, 1.0, 3, 2.0, 2.0, 4));
}

TEST_CASE("fields: extrema, finiteness, distance") {
  Grid g = Grid::interval(0.0, 1.0, 3);
  Field z = Field::zeros(g);
  CHECK(z.v.size() == g.total());
  CHECK(z.max() == 0.0);

  Field c = Field::constant(g, 2.5, 1.0);
  CHECK(c.t == 1.0);
  CHECK(c.min() == 2.5);
  c.v[2] = -3.0;
  CHECK(c.min() == -3.0);
  CHECK(c.max() == 2.5);
  CHECK(c.max_abs() == 3.0);
  CHECK(c.all_finite());
  c.v[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(c.all_finite());

  Field a = Field::constant(g, 1.0);
  Field b = Field::constant(g, 0.25);
  CHECK(max_abs_diff(a, b) == doctest::Approx(0.75));
  Field other = Field::zeros(Grid::interval(0.0, 1.0, 5));
  CHECK_ERRCODE(Err::InvalidArgument, max_abs_diff(a, other));
}

TEST_CASE("trajectory row lookup") {
  Trajectory tr;
  tr.summary = {{0.0, 1.0, 0.0}, {0.5, 0.8, 0.0}, {1.0, 0.6, 0.0}};
  CHECK(tr.row_at_or_after(0.0) == 0);
  CHECK(tr.row_at_or_after(0.4) == 1);
  CHECK(tr.row_at_or_after(0.5) == 1);
  CHECK(tr.row_at_or_after(0.6) == 2);
  CHECK(tr.row_at_or_after(5.0) == 2);
  CHECK(tr.t_end() == doctest::Approx(1.0));
  CHECK(tr.summary[1].osc() == doctest::Approx(0.8));
}
