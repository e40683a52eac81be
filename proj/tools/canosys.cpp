// canosys: canonical-system spectral toolbox.
//
// Verbs: m, disk, classify, convert, relations, reflectionless, bp, omega,
// metric.  Inputs are JSON files (Hamiltonians, problems) and inline JSON
// interval sets; outputs are JSON or CSV with fixed 17-significant-digit
// formatting so identical invocations are byte identical.
//
// Exit codes: 0 success, 1 usage, 2 validation error, 3 convergence failure
// (partial results are still written, with flag columns).

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canosys/analysis.hpp"
#include "canosys/io.hpp"
#include "canosys/picard.hpp"
#include "canosys/reductions.hpp"
#include "canosys/test_family.hpp"
#include "canosys/weyl.hpp"

using namespace canosys;

namespace {

struct OutputTarget {
    std::string path;  // empty = stdout

    void write(const std::string& text) const {
        if (path.empty())
            std::cout << text;
        else
            write_text_file(path, text);
    }
};

std::string json_complex_pair(Complex v) {
    return "[" + fmt_double(v.real()) + ", " + fmt_double(v.imag()) + "]";
}

HalfLineHamiltonian load_half_line(const std::string& path, const std::string& side_flag) {
    const nlohmann::json j = load_json_file(path);
    if (json_is_whole_line(j)) {
        const WholeLineHamiltonian W = whole_line_from_json(j);
        if (side_flag == "+") return W.right;
        if (side_flag == "-") return W.left;
        throw validation_error(path + ": whole-line file; pass --side + or --side -");
    }
    return half_line_from_json(j);
}

std::vector<double> doubling_sweep(double top, int levels) {
    std::vector<double> out;
    for (int j = levels - 1; j >= 0; --j) out.push_back(top / double(1 << j));
    return out;
}

int run_m(const std::string& ham, const std::string& side, const std::string& z_s,
          double tol, double n_max, const OutputTarget& out) {
    const HalfLineHamiltonian H = load_half_line(ham, side);
    const Complex z = parse_complex(z_s);
    const MValue m = m_halfline(H, z, tol, n_max);
    std::string j = "{\"m\": " + json_complex_pair(m.value) +
                    ", \"error_radius\": " + fmt_double(m.error_radius) +
                    ", \"N_used\": " + fmt_double(m.N_used) +
                    ", \"converged\": " + (m.converged ? "true" : "false") + "}\n";
    out.write(j);
    return m.converged ? 0 : 3;
}

int run_disk(const std::string& ham, const std::string& side, const std::string& z_s,
             double N, int levels, const OutputTarget& out) {
    const HalfLineHamiltonian H = load_half_line(ham, side);
    const Complex z = parse_complex(z_s);
    CsvWriter csv({"N", "center_re", "center_im", "radius"});
    for (double n : doubling_sweep(N, levels)) {
        const WeylDisk d = disk_at(H, n, z);
        csv.row({fmt_double(n), fmt_double(d.center.real()), fmt_double(d.center.imag()),
                 fmt_double(d.radius)});
    }
    out.write(csv.str());
    return 0;
}

int run_classify(const std::string& ham, const std::string& side, const std::string& z_s,
                 double N_max, int levels, const OutputTarget& out) {
    const HalfLineHamiltonian H = load_half_line(ham, side);
    const auto r = classify_limit_type(H, parse_complex(z_s), doubling_sweep(N_max, levels));
    std::string verdict = r.type == LimitType::LimitPoint    ? "limit-point"
                          : r.type == LimitType::LimitCircle ? "limit-circle"
                                                             : "undetermined";
    std::string j = "{\"classification\": \"" + verdict + "\", \"trace\": [";
    for (std::size_t i = 0; i < r.radius_trace.size(); ++i) {
        if (i) j += ", ";
        j += "[" + fmt_double(r.radius_trace[i].first) + ", " +
             fmt_double(r.radius_trace[i].second) + "]";
    }
    j += "]}\n";
    out.write(j);
    return 0;
}

int run_convert(const std::string& in, int cells, const std::string& orientation,
                const OutputTarget& out) {
    const ProblemFile p = problem_from_json(load_json_file(in));
    HalfLineHamiltonian H = constant_hamiltonian(PSDMatrix2::identity());
    if (p.type == "schrodinger") {
        H = schrodinger_to_canonical(p.schrodinger, cells);
    } else if (p.type == "dirac") {
        H = dirac_to_canonical(p.dirac,
                               orientation == "-" ? DiracOrientation::Minus
                                                  : DiracOrientation::Plus,
                               cells);
    } else {
        H = jacobi_to_canonical(p.jacobi).hamiltonian;
    }
    out.write(to_json(H).dump(2) + "\n");
    return 0;
}

int run_relations(const std::string& kind, const std::string& in, int cells,
                  const std::vector<std::string>& z_flags, double tol,
                  const OutputTarget& out) {
    const ProblemFile p = problem_from_json(load_json_file(in));
    std::vector<Complex> grid;
    for (const auto& s : z_flags) grid.push_back(parse_complex(s));
    if (grid.empty()) throw validation_error("relations: need at least one --z");

    RelationReport rep{RelationKind::Schrodinger, {}, 0.0};
    if (kind == "schrodinger") {
        if (p.type != "schrodinger") throw validation_error("relations schrodinger: input must be a schrodinger problem");
        rep = relation_report_schrodinger(p.schrodinger, cells, grid, tol);
    } else if (kind == "dirac") {
        if (p.type != "dirac") throw validation_error("relations dirac: input must be a dirac potential");
        rep = relation_report_dirac(p.dirac, cells, grid, tol);
    } else if (kind == "flip") {
        if (p.type != "dirac") throw validation_error("relations flip: input must be a dirac potential");
        rep = relation_report_flip(p.dirac, cells, grid, tol);
    } else {
        throw validation_error("relations: unknown kind '" + kind + "'");
    }

    CsvWriter csv({"z_re", "z_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "defect",
                   "converged"});
    bool all_converged = true;
    for (const auto& r : rep.rows) {
        all_converged = all_converged && r.converged;
        csv.row({fmt_double(r.z.real()), fmt_double(r.z.imag()), fmt_double(r.lhs.real()),
                 fmt_double(r.lhs.imag()), fmt_double(r.rhs.real()), fmt_double(r.rhs.imag()),
                 fmt_double(r.defect), r.converged ? "1" : "0"});
    }
    out.write(csv.str());
    return all_converged ? 0 : 3;
}

int run_reflectionless(const std::string& ham, const std::string& A_s, double y_start,
                       double y_end, int grid, const OutputTarget& out) {
    const WholeLineHamiltonian W = whole_line_from_json(load_json_file(ham));
    const IntervalSet A = parse_interval_set(A_s);
    CsvWriter csv({"y", "defect", "flagged"});
    bool all_converged = true;
    for (double y = y_start; y >= y_end * 0.999; y /= 2.0) {
        const DefectReport rep = reflectionless_defect(W, A, y, grid);
        all_converged = all_converged && rep.flagged_nodes.empty();
        csv.row({fmt_double(y), fmt_double(rep.max_defect),
                 std::to_string(rep.flagged_nodes.size())});
    }
    out.write(csv.str());
    return all_converged ? 0 : 3;
}

int run_bp(const std::string& ham, const std::string& side, const std::string& A_s,
           const std::string& S_s, double N, int levels, double y, int nodes,
           const OutputTarget& out) {
    const HalfLineHamiltonian H = load_half_line(ham, side);
    const IntervalSet A = parse_interval_set(A_s);
    const IntervalSet S = parse_interval_set(S_s);
    CsvWriter csv({"N", "y", "discrepancy", "flagged"});
    bool all_converged = true;
    for (double n : doubling_sweep(N, levels)) {
        const BpResult r = bp_discrepancy(H, A, S, n, y, nodes);
        all_converged = all_converged && r.flagged_nodes.empty();
        csv.row({fmt_double(n), fmt_double(y), fmt_double(r.discrepancy),
                 std::to_string(r.flagged_nodes.size())});
    }
    out.write(csv.str());
    return all_converged ? 0 : 3;
}

int run_omega(const std::string& mu_s, const std::string& nu_s,
              const std::vector<double>& xs, int n_max, const OutputTarget& out) {
    const WholeLineHamiltonian mu = whole_line_from_json(load_json_file(mu_s));
    const WholeLineHamiltonian nu = whole_line_from_json(load_json_file(nu_s));
    const TestFamily fam(n_max);
    CsvWriter csv({"x", "distance", "tail_bound"});
    for (const auto& [x, d] : omega_limit_probe(mu, nu, xs, fam))
        csv.row({fmt_double(x), fmt_double(d), fmt_double(std::pow(2.0, -n_max))});
    out.write(csv.str());
    return 0;
}

int run_metric(const std::string& mu_s, const std::string& nu_s, int n_max,
               const OutputTarget& out) {
    const WholeLineHamiltonian mu = whole_line_from_json(load_json_file(mu_s));
    const WholeLineHamiltonian nu = whole_line_from_json(load_json_file(nu_s));
    const MetricResult d = metric_distance(mu, nu, TestFamily(n_max));
    out.write("{\"distance\": " + fmt_double(d.value) +
              ", \"tail_bound\": " + fmt_double(d.tail_bound) + "}\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical-system spectral toolbox"};
    app.require_subcommand(1);

    std::string ham, side, z_s = "0+1i", in, out_path, mu_s, nu_s, kind, A_s = "[]",
                           S_s = "[]", orientation = "+";
    std::vector<std::string> z_flags;
    std::vector<double> xs;
    double tol = 1e-8, n_max_d = 1e7, N = 1.0, y = 1e-3, y_start = 1e-1, y_end = 1e-3;
    int levels = 1, cells = 64, grid = 16, nodes = 32, fam_n = 20;

    auto* m_cmd = app.add_subcommand("m", "half-line m-function with certified error radius");
    m_cmd->add_option("--ham", ham, "Hamiltonian JSON file")->required();
    m_cmd->add_option("--side", side, "half line of a whole-line file: + or -");
    m_cmd->add_option("--z", z_s, "spectral parameter a+bi (Im > 0)")->required();
    m_cmd->add_option("--tol", tol, "target error radius");
    m_cmd->add_option("--N-max", n_max_d, "largest truncation tried");
    m_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* disk_cmd = app.add_subcommand("disk", "Weyl disk sweep over N");
    disk_cmd->add_option("--ham", ham)->required();
    disk_cmd->add_option("--side", side);
    disk_cmd->add_option("--z", z_s)->required();
    disk_cmd->add_option("--N", N, "largest truncation in the sweep")->required();
    disk_cmd->add_option("--levels", levels, "number of doubling rows ending at N");
    disk_cmd->add_option("--out", out_path);

    auto* cls_cmd = app.add_subcommand("classify", "limit-point/limit-circle probe");
    cls_cmd->add_option("--ham", ham)->required();
    cls_cmd->add_option("--side", side);
    cls_cmd->add_option("--z", z_s)->required();
    cls_cmd->add_option("--N-max", N, "largest truncation")->required();
    cls_cmd->add_option("--levels", levels, "number of doubling steps");
    cls_cmd->add_option("--out", out_path);

    auto* conv_cmd = app.add_subcommand("convert", "reduce a problem file to a canonical system");
    conv_cmd->add_option("--in", in, "problem JSON file")->required();
    conv_cmd->add_option("--cells", cells, "sub-cells per potential piece");
    conv_cmd->add_option("--orientation", orientation, "dirac orientation: + or -");
    conv_cmd->add_option("--out", out_path);

    auto* rel_cmd = app.add_subcommand("relations", "m-function relation report");
    rel_cmd->add_option("--kind", kind, "schrodinger | dirac | flip")->required();
    rel_cmd->add_option("--in", in, "problem JSON file")->required();
    rel_cmd->add_option("--cells", cells);
    rel_cmd->add_option("--z", z_flags, "grid point a+bi (repeatable)")->required();
    rel_cmd->add_option("--tol", tol, "relation tolerance");
    rel_cmd->add_option("--out", out_path);

    auto* refl_cmd = app.add_subcommand("reflectionless", "reflectionless defect over a y-schedule");
    refl_cmd->add_option("--ham", ham, "whole-line Hamiltonian JSON")->required();
    refl_cmd->add_option("--A", A_s, "interval set [[a,b],...]")->required();
    refl_cmd->add_option("--y-start", y_start, "largest y in the halving schedule");
    refl_cmd->add_option("--y", y_end, "smallest y in the schedule");
    refl_cmd->add_option("--grid", grid, "nodes per interval of A");
    refl_cmd->add_option("--out", out_path);

    auto* bp_cmd = app.add_subcommand("bp", "Breimesser-Pearson discrepancy sweep over N");
    bp_cmd->add_option("--ham", ham)->required();
    bp_cmd->add_option("--side", side);
    bp_cmd->add_option("--A", A_s)->required();
    bp_cmd->add_option("--S", S_s)->required();
    bp_cmd->add_option("--N", N, "largest truncation")->required();
    bp_cmd->add_option("--levels", levels);
    bp_cmd->add_option("--y", y, "offset above the real axis");
    bp_cmd->add_option("--nodes", nodes, "quadrature nodes per interval of A");
    bp_cmd->add_option("--out", out_path);

    auto* omega_cmd = app.add_subcommand("omega", "metric distances along a shift sequence");
    omega_cmd->add_option("--mu", mu_s, "whole-line Hamiltonian JSON")->required();
    omega_cmd->add_option("--nu", nu_s, "whole-line Hamiltonian JSON")->required();
    omega_cmd->add_option("--x", xs, "shift (repeatable)")->required();
    omega_cmd->add_option("--n-max", fam_n, "test-family truncation");
    omega_cmd->add_option("--out", out_path);

    auto* metric_cmd = app.add_subcommand("metric", "metric distance between two Hamiltonians");
    metric_cmd->add_option("--mu", mu_s)->required();
    metric_cmd->add_option("--nu", nu_s)->required();
    metric_cmd->add_option("--n-max", fam_n);
    metric_cmd->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const OutputTarget out{out_path};
    try {
        if (app.got_subcommand(m_cmd)) return run_m(ham, side, z_s, tol, n_max_d, out);
        if (app.got_subcommand(disk_cmd)) return run_disk(ham, side, z_s, N, levels, out);
        if (app.got_subcommand(cls_cmd)) return run_classify(ham, side, z_s, N, levels, out);
        if (app.got_subcommand(conv_cmd)) return run_convert(in, cells, orientation, out);
        if (app.got_subcommand(rel_cmd)) return run_relations(kind, in, cells, z_flags, tol, out);
        if (app.got_subcommand(refl_cmd))
            return run_reflectionless(ham, A_s, y_start, y_end, grid, out);
        if (app.got_subcommand(bp_cmd))
            return run_bp(ham, side, A_s, S_s, N, levels, y, nodes, out);
        if (app.got_subcommand(omega_cmd)) return run_omega(mu_s, nu_s, xs, fam_n, out);
        if (app.got_subcommand(metric_cmd)) return run_metric(mu_s, nu_s, fam_n, out);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pole_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
