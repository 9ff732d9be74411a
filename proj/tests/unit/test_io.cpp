#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "../support/generators.hpp"
#include "starnls/io.hpp"

using namespace starnls;

TEST_CASE("fmt round-trips doubles") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 0; r < 200; ++r) {
    const double x = u(rng) * std::pow(10.0, 40.0 * u(rng));
    CHECK(std::stod(io::fmt(x)) == x);
  }
  CHECK(std::stod(io::fmt(0.1)) == 0.1);
  CHECK(std::strtod(io::fmt(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) ==
        std::numeric_limits<double>::denorm_min());
}

TEST_CASE("snapshot round trip is exact") {
  std::mt19937_64 rng(62);
  const EdgeGrid grid(7.5, 151);
  const auto f = testgen::rough_graph(grid, 4, rng);
  std::stringstream ss;
  io::write_snapshot(ss, f);
  const auto g = io::read_snapshot(ss);
  CHECK(g.n_edges() == 4);
  CHECK(g.grid().same_as(grid));
  for (size_t i = 0; i < f.flat().size(); ++i) CHECK(g.flat()[i] == f.flat()[i]);
}

TEST_CASE("line triple round trip keeps values and parity tags") {
  std::mt19937_64 rng(63);
  const auto t = testgen::random_triple(EdgeGrid(5.0, 101), 3, rng);
  std::stringstream ss;
  io::write_triple(ss, t);
  const auto back = io::read_triple(ss);
  REQUIRE(back.n_parts() == 3);
  for (int k = 0; k < 3; ++k)
    for (int j = -100; j <= 100; ++j) CHECK(back.parts[size_t(k)].at(j) == t.parts[size_t(k)].at(j));
}

TEST_CASE("malformed snapshots name the line") {
  auto error_of = [](const std::string& text) {
    std::istringstream is(text);
    try {
      (void)io::read_snapshot(is);
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string head = "# starnls snapshot\nN 3\nL 1\nn_points 16\nh 0.0666666666666666667\nx re_1 im_1 re_2 im_2 re_3 im_3\n";
  CHECK(error_of("").size() > 0);
  CHECK(error_of("# starnls snapshot\nN three\n").find("line 2") != std::string::npos);
  CHECK(error_of(head + "0 1 0 1 0 1\n").find("line 7") != std::string::npos);
  std::string rows;
  for (int i = 0; i < 16; ++i) rows += "0 0 0 0 0 0 0\n";
  rows[rows.size() - 2] = 'z';
  CHECK(error_of(head + rows).find("line 22") != std::string::npos);
}

TEST_CASE("CSV table layout") {
  io::CsvTable t({"a", "b"});
  t.add_row({1.5, -2.0});
  t.add_text_row({"x", "y"});
  std::ostringstream os;
  t.write(os);
  CHECK(t.rows() == 2);
  CHECK(os.str().rfind("a,b\n", 0) == 0);
  CHECK(os.str().find("x,y") != std::string::npos);
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("SVG plot is a self-contained document") {
  const auto svg = io::svg_plot("decay", {{"ratio", {1.0, 2.0, 3.0}, {0.5, 0.4, 0.45}}, {"empty", {}, {}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("ratio") != std::string::npos);
}
