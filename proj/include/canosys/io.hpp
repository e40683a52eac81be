#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/intervals.hpp"
#include "canosys/reductions.hpp"

namespace canosys {

/// 17 significant digits: enough to round-trip any double, and fixed so that
/// identical runs produce byte-identical files.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// "a+bi" with optional signs, decimal only ("1.5-2i", "2i", "-3", "0+1i").
inline Complex parse_complex(const std::string& s) {
    const std::string err = "cannot parse complex number '" + s + "' (expected a+bi)";
    std::size_t pos = 0;
    auto read_num = [&](bool* ok) -> double {
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            ++pos;
            ++digits;
        }
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            ++pos;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        if (digits == 0) {
            // bare sign before 'i' means +-1
            if (pos < s.size() && s[pos] == 'i') {
                *ok = true;
                return (start < s.size() && s[start] == '-') ? -1.0 : 1.0;
            }
            *ok = false;
            return 0.0;
        }
        *ok = true;
        return std::stod(s.substr(start, pos - start));
    };

    bool ok = false;
    double first = read_num(&ok);
    if (!ok) throw validation_error(err);
    if (pos == s.size()) return {first, 0.0};
    if (s[pos] == 'i') {
        if (pos + 1 != s.size()) throw validation_error(err);
        return {0.0, first};
    }
    double second = read_num(&ok);
    if (!ok || pos >= s.size() || s[pos] != 'i' || pos + 1 != s.size())
        throw validation_error(err);
    return {first, second};
}

// ---- Hamiltonian files -------------------------------------------------
//
// Half line: {"side": "right"|"left", "extension": "periodic"|"repeat-last",
//             "cells": [{"len": <number>, "H": [[h11,h12],[h12,h22]]}, ...]}
// Whole line: {"right": <half-line object>, "left": <half-line object>}

inline nlohmann::json to_json(const HalfLineHamiltonian& H) {
    nlohmann::json j;
    j["side"] = H.side() == Side::Right ? "right" : "left";
    j["extension"] = H.extension() == Extension::Periodic ? "periodic" : "repeat-last";
    j["cells"] = nlohmann::json::array();
    for (const auto& c : H.cells()) {
        j["cells"].push_back({{"len", c.length},
                              {"H",
                               {{c.matrix.a11, c.matrix.a12}, {c.matrix.a12, c.matrix.a22}}}});
    }
    return j;
}

inline nlohmann::json to_json(const WholeLineHamiltonian& H) {
    return {{"right", to_json(H.right)}, {"left", to_json(H.left)}};
}

inline HalfLineHamiltonian half_line_from_json(const nlohmann::json& j) {
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
        throw validation_error("hamiltonian json: missing or empty 'cells'");
    const std::string side_s = j.value("side", "right");
    const std::string ext_s = j.value("extension", "repeat-last");
    if (side_s != "right" && side_s != "left")
        throw validation_error("hamiltonian json: side must be 'right' or 'left'");
    if (ext_s != "periodic" && ext_s != "repeat-last")
        throw validation_error("hamiltonian json: extension must be 'periodic' or 'repeat-last'");
    std::vector<HamiltonianCell> cells;
    for (std::size_t i = 0; i < j["cells"].size(); ++i) {
        const auto& cj = j["cells"][i];
        if (!cj.contains("len") || !cj.contains("H"))
            throw validation_error("cell " + std::to_string(i) + ": needs 'len' and 'H'");
        const auto& m = cj["H"];
        if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
            throw validation_error("cell " + std::to_string(i) + ": 'H' must be a 2x2 matrix");
        const double h11 = m[0][0], h12 = m[0][1], h21 = m[1][0], h22 = m[1][1];
        if (h12 != h21)
            throw validation_error("cell " + std::to_string(i) + ": matrix must be symmetric");
        const PSDMatrix2 M{h11, h12, h22};
        if (!M.is_valid())
            throw validation_error("cell " + std::to_string(i) +
                                   ": matrix is not positive semidefinite with positive trace");
        const double len = cj["len"];
        if (!(len > 0.0))
            throw validation_error("cell " + std::to_string(i) + ": len must be > 0");
        cells.push_back({len, M});
    }
    return {std::move(cells), ext_s == "periodic" ? Extension::Periodic : Extension::RepeatLast,
            side_s == "right" ? Side::Right : Side::Left};
}

inline bool json_is_whole_line(const nlohmann::json& j) {
    return j.contains("right") && j.contains("left");
}

inline WholeLineHamiltonian whole_line_from_json(const nlohmann::json& j) {
    if (!json_is_whole_line(j))
        throw validation_error("whole-line hamiltonian json: needs 'right' and 'left'");
    HalfLineHamiltonian r = half_line_from_json(j["right"]);
    HalfLineHamiltonian l = half_line_from_json(j["left"]);
    if (r.side() != Side::Right) r = r.with_side(Side::Right);
    if (l.side() != Side::Left) l = l.with_side(Side::Left);
    return {std::move(r), std::move(l)};
}

// ---- Problem files -----------------------------------------------------
//
// {"type": "schrodinger"|"dirac", "cells": [{"len": .., "V"|"W": ..}, ...]}
// {"type": "jacobi", "a": [...], "b": [...]}

struct ProblemFile {
    std::string type;
    SchrodingerProblem schrodinger;
    DiracPotential dirac;
    JacobiProblem jacobi;
};

inline ProblemFile problem_from_json(const nlohmann::json& j) {
    ProblemFile p;
    if (!j.contains("type")) throw validation_error("problem json: missing 'type'");
    p.type = j["type"];
    if (p.type == "schrodinger" || p.type == "dirac") {
        if (!j.contains("cells") || j["cells"].empty())
            throw validation_error("problem json: missing or empty 'cells'");
        const char* key = p.type == "schrodinger" ? "V" : "W";
        for (std::size_t i = 0; i < j["cells"].size(); ++i) {
            const auto& cj = j["cells"][i];
            if (!cj.contains("len") || !cj.contains(key))
                throw validation_error("cell " + std::to_string(i) + ": needs 'len' and '" +
                                       std::string(key) + "'");
            const double len = cj["len"], val = cj[key];
            if (!(len > 0.0))
                throw validation_error("cell " + std::to_string(i) + ": len must be > 0");
            if (p.type == "schrodinger")
                p.schrodinger.cells.push_back({len, val});
            else
                p.dirac.cells.push_back({len, val});
        }
    } else if (p.type == "jacobi") {
        if (!j.contains("a") || !j.contains("b"))
            throw validation_error("problem json: jacobi needs 'a' and 'b'");
        p.jacobi.a = j["a"].get<std::vector<double>>();
        p.jacobi.b = j["b"].get<std::vector<double>>();
    } else {
        throw validation_error("problem json: unknown type '" + p.type + "'");
    }
    return p;
}

// ---- IntervalSet: [[a1,b1],[a2,b2],...] --------------------------------

inline IntervalSet interval_set_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw validation_error("interval set json: expected [[a,b],...]");
    std::vector<std::pair<double, double>> iv;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw validation_error("interval set json: each entry must be [a, b]");
        iv.push_back({e[0], e[1]});
    }
    return IntervalSet(std::move(iv));
}

inline IntervalSet parse_interval_set(const std::string& text) {
    return interval_set_from_json(nlohmann::json::parse(text));
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error(path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write file: " + path);
    out << text;
}

/// Deterministic CSV assembly: header then rows, "%.17g" cells, comma
/// separated, '.' decimal point.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) buf_ << ',';
            buf_ << header[i];
        }
        buf_ << '\n';
        cols_ = header.size();
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_ << ',';
            buf_ << cells[i];
        }
        buf_ << '\n';
    }

    std::string str() const { return buf_.str(); }

  private:
    std::ostringstream buf_;
    std::size_t cols_ = 0;
};

}  // namespace canosys
