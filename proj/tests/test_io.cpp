#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "gorlicz/errors.hpp"
#include "gorlicz/io.hpp"
#include "test_support.hpp"

using namespace gorlicz;
using gorlicz::testing::Rng;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gorlicz_io_" + name)).string();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("CSV field round trip is exact") {
    Rng rng(1);
    for (const Grid& g : {Grid(17, 0.0625), Grid(7, 5, 0.3)}) {
      const auto u = testing::random_field(g, rng, -1e3, 1e3);
      std::stringstream s;
      write_csv_field(s, u);
      const auto back = read_csv_field(s);
      CHECK(back.grid() == g);
      CHECK(back.values() == u.values());
    }
  }

  TEST_CASE("CSV field layout") {
    Vector<double> v(3);
    v << 0.5, -1, 2;
    std::stringstream s;
    write_csv_field(s, ScalarFieldd(Grid(3, 0.5), v));
    CHECK(s.str() == "3,0.5\n0.5\n-1\n2\n");
    std::istringstream labelled("dims,h\n2x2,1\n1\n2\n3\n4\n");
    const auto u = read_csv_field(labelled);
    CHECK(u.grid() == Grid(2, 2, 1.0));
    CHECK(u[3] == 4.0);
  }

  TEST_CASE("malformed CSV fields") {
    for (const char* text : {"", "3\n1\n2\n3\n", "3,0.5\n1\n2\n", "3,0.5\n1\n2\n3\n4\n", "3,0.5\n1\nabc\n3\n",
                             "3,-1\n1\n2\n3\n", "1,1\n1\n", "3,0.5\n1\nnan\n3\n"}) {
      std::istringstream in(text);
      CHECK_THROWS_AS(read_csv_field(in), IoError);
    }
  }

  TEST_CASE("PGM round trip within quantization") {
    Rng rng(2);
    const Grid g(13, 9, 1.0);
    const auto u = testing::random_field(g, rng, -3.0, 5.0);
    for (bool binary : {true, false}) {
      for (int maxval : {255, 65535}) {
        PgmOptions opts;
        opts.binary = binary;
        opts.maxval = maxval;
        std::stringstream s;
        write_pgm(s, u, opts);
        const auto back = read_pgm(s);
        CHECK(back.grid() == g);
        const double step = (u.max() - u.min()) / maxval;
        CHECK((back.values() - u.values()).cwiseAbs().maxCoeff() <= 0.5 * step * (1 + 1e-12));
        CHECK(back.min() == u.min());
      }
    }
  }

  TEST_CASE("PGM header conventions") {
    std::istringstream plain("P2\n# a comment\n3 2\n# another\n4\n0 1 2\n3 4 0\n");
    const auto u = read_pgm(plain);
    CHECK(u.grid() == Grid(3, 2, 1.0));
    CHECK(u[0] == 0.0);
    CHECK(u[4] == 1.0);  // no range comment: [0, 1]
    CHECK(u[1] == 0.25);

    std::istringstream ranged("P2\n# range -2 2\n# spacing 0.25\n4 1\n2\n0 1 2 2\n");
    const auto v = read_pgm(ranged);
    CHECK(v.grid() == Grid(4, 0.25));
    CHECK(v[0] == -2.0);
    CHECK(v[1] == 0.0);
    CHECK(v[3] == 2.0);

    std::istringstream again("P2\n# spacing 0.25\n4 1\n2\n0 1 2 2\n");
    CHECK(read_pgm(again, 0.5).grid() == Grid(4, 0.5));
  }

  TEST_CASE("constant image round trips unchanged") {
    const ScalarFieldd c(Grid(6, 4, 1.0), 0.375);
    std::stringstream s;
    write_pgm(s, c);
    CHECK(read_pgm(s).values() == c.values());
  }

  TEST_CASE("malformed PGM files") {
    for (const std::string text :
         {"", "P3\n2 2\n255\n", "P2\n2 2\n", "P2\n2 2\n255\n1 2 3\n", "P2\n2 2\n255\n1 2 3 300\n",
          "P2\n0 2\n255\n", "P2\n2 2\n70000\n1 1 1 1\n", "P5\n4 4\n255\nab", "P2\n# range 1 0\n2 2\n1\n0 0 0 0\n",
          "P2\n1 3\n255\n0 0 0\n"}) {
      std::istringstream in(text);
      CHECK_THROWS_AS(read_pgm(in), IoError);
    }
  }

  TEST_CASE("write options are validated") {
    const ScalarFieldd u(Grid(3, 1.0), 1.0);
    std::stringstream s;
    PgmOptions opts;
    opts.maxval = 0;
    CHECK_THROWS_AS(write_pgm(s, u, opts), UsageError);
    opts.maxval = 255;
    opts.lo = 2.0;
    opts.hi = 1.0;
    CHECK_THROWS_AS(write_pgm(s, u, opts), UsageError);
  }

  TEST_CASE("file dispatch by extension") {
    Rng rng(3);
    const auto u = testing::random_field(Grid(8, 6, 0.5), rng);
    const auto csv = temp_path("field.csv");
    const auto pgm = temp_path("field.pgm");
    write_field(csv, u);
    write_field(pgm, u);
    CHECK(read_field(csv).values() == u.values());
    CHECK(read_field(pgm).grid() == u.grid());
    CHECK(read_field(csv, 2.0).grid() == Grid(8, 6, 2.0));
    CHECK_THROWS_AS(read_field(temp_path("field.txt")), IoError);
    CHECK_THROWS_AS(write_field(temp_path("field.txt"), u), IoError);
    CHECK_THROWS_AS(read_field(temp_path("missing.csv")), IoError);
    std::filesystem::remove(csv);
    std::filesystem::remove(pgm);
  }
}
