#include <doctest.h>

#include "canosys/io.hpp"

using namespace canosys;

TEST_CASE("parse_complex handles the documented forms") {
    CHECK(parse_complex("0+1i") == Complex{0.0, 1.0});
    CHECK(parse_complex("1.5-2i") == Complex{1.5, -2.0});
    CHECK(parse_complex("2i") == Complex{0.0, 2.0});
    CHECK(parse_complex("-3") == Complex{-3.0, 0.0});
    CHECK(parse_complex("-1+0.5i") == Complex{-1.0, 0.5});
    CHECK(parse_complex("1e-3+2e-4i") == Complex{1e-3, 2e-4});
    CHECK(parse_complex("-i") == Complex{0.0, -1.0});
    CHECK_THROWS_AS(parse_complex("abc"), validation_error);
    CHECK_THROWS_AS(parse_complex("1+2"), validation_error);
    CHECK_THROWS_AS(parse_complex("1+2i3"), validation_error);
}

TEST_CASE("hamiltonian json round trip") {
    const HalfLineHamiltonian H(
        {{1.0, PSDMatrix2::identity()}, {0.5, PSDMatrix2::rank_one(2.0, 0.3)}},
        Extension::Periodic);
    const auto j = to_json(H);
    const HalfLineHamiltonian back = half_line_from_json(j);
    CHECK(back.extension() == Extension::Periodic);
    REQUIRE(back.cells().size() == 2);
    CHECK(back.cells()[1].matrix.a12 == H.cells()[1].matrix.a12);

    const WholeLineHamiltonian W = constant_whole_line(PSDMatrix2::identity());
    const WholeLineHamiltonian wback = whole_line_from_json(to_json(W));
    CHECK(wback.left.side() == Side::Left);
}

TEST_CASE("hamiltonian json rejects bad cells with the offending index") {
    nlohmann::json j;
    j["side"] = "right";
    j["extension"] = "repeat-last";
    j["cells"] = {{{"len", 1.0}, {"H", {{1.0, 0.0}, {0.0, 1.0}}}},
                  {{"len", 1.0}, {"H", {{1.0, 2.0}, {2.0, 1.0}}}}};
    try {
        half_line_from_json(j);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("cell 1") != std::string::npos);
    }

    j["cells"][1]["H"] = {{1.0, 0.5}, {0.25, 1.0}};
    CHECK_THROWS_AS(half_line_from_json(j), validation_error);
}

TEST_CASE("problem json parsing") {
    const auto js = nlohmann::json::parse(
        R"({"type": "schrodinger", "cells": [{"len": 2.0, "V": -1.5}]})");
    const ProblemFile p = problem_from_json(js);
    CHECK(p.type == "schrodinger");
    CHECK(p.schrodinger.cells[0].second == -1.5);

    const auto jj = nlohmann::json::parse(R"({"type": "jacobi", "a": [1, 1], "b": [0, 0.5]})");
    CHECK(problem_from_json(jj).jacobi.b[1] == 0.5);

    CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse(R"({"type": "nope"})")),
                    validation_error);
}

TEST_CASE("interval set json") {
    const IntervalSet s = parse_interval_set("[[0, 1], [2, 3.5]]");
    CHECK(s.measure() == doctest::Approx(2.5));
    CHECK_THROWS_AS(parse_interval_set("[[0]]"), validation_error);
}

TEST_CASE("fmt_double round trips and is deterministic") {
    for (double v : {1.0, -0.3333333333333333, 1e-300, 6.02214076e23}) {
        const std::string s = fmt_double(v);
        CHECK(std::stod(s) == v);
        CHECK(fmt_double(v) == s);
    }
}
