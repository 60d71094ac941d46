#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "apx/grid_field.hpp"

using namespace apx;

TEST_CASE("node layout, masks and step extent") {
    auto g = GridField::cartesian(-1.0, -2.0, 0.5, 3, 5, 2);
    CHECK(g.point(0, 0) == Complex(-1.0, -2.0));
    CHECK(g.point(2, 4) == Complex(0.0, 0.0));
    CHECK(g.step_extent() == 0.5);

    g.sample([](Complex z) { return VectorValue{{z, 2.0 * z}}; },
             [](Complex z) { return z.real() <= 0.0; });
    CHECK(g.is_valid(0, 0));
    CHECK(!g.is_valid(2, 4) == false);  // x = 0 kept
    CHECK(g.at(1, 1)[1] == 2.0 * g.point(1, 1));

    auto p = GridField::polar(1.0, 0.0, 0.1, 0.25, 2, 4, 1);
    CHECK(std::abs(p.point(1, 2) - std::polar(1.1, 0.5)) < 1e-15);
    CHECK(p.step_extent() == doctest::Approx(1.1 * 0.25));
}

TEST_CASE("max_norm respects the validity mask") {
    auto g = GridField::cartesian(0.0, 0.0, 1.0, 3, 3, 1);
    g.sample([](Complex z) { return VectorValue::scalar(z); },
             [](Complex z) { return std::abs(z) < 2.0; });
    CHECK(g.max_norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("CSV writer emits one row per valid node") {
    auto g = GridField::cartesian(0.0, 0.0, 1.0, 2, 2, 1);
    g.sample([](Complex z) { return VectorValue::scalar(z); },
             [](Complex z) { return z != Complex(1.0, 1.0); });
    std::string path = "test_grid_field_out.csv";
    write_csv(g, path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == "x,y,re_1,im_1");
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
    std::remove(path.c_str());
}
