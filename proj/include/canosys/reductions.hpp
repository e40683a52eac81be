#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/weyl.hpp"

namespace canosys {

/// -y'' + V y = z y with piecewise-constant V on [0, x_max], repeat-last
/// beyond.
struct SchrodingerProblem {
    std::vector<std::pair<double, double>> cells;  // (length, V)
};

struct DiracPotential {
    std::vector<std::pair<double, double>> cells;  // (length, W)
};

/// a(n) u(n+1) + a(n-1) u(n-1) + b(n) u(n) = z u(n), n >= 1, with the
/// convention a(0) = 1 for the first step.
struct JacobiProblem {
    std::vector<double> a;  // a(1)..a(L), all > 0
    std::vector<double> b;  // b(1)..b(L)
};

namespace detail {

/// (y, y') transfer across a constant-V piece of -y'' + V y = 0 (or = z y
/// when kappa2 = V - z is passed).
inline Mat2 schrodinger_piece_transfer(Complex kappa2, double delta) {
    const Complex k = std::sqrt(kappa2);
    if (std::abs(k) * delta < 1e-8) {
        // series around the free case; entries are even in k
        const Complex k2 = kappa2;
        const double d = delta;
        return {1.0 + k2 * d * d / 2.0, d + k2 * d * d * d / 6.0,
                k2 * d + k2 * k2 * d * d * d / 6.0, 1.0 + k2 * d * d / 2.0};
    }
    const Complex ch = std::cosh(k * delta), sh = std::sinh(k * delta);
    return {ch, sh / k, k * sh, ch};
}

struct ZeroEnergyState {
    double u = 1.0, du = 0.0;  // u0, u0'
    double v = 0.0, dv = 1.0;  // v0, v0'

    void advance(double V, double delta) {
        const Mat2 S = schrodinger_piece_transfer(Complex{V, 0.0}, delta);
        const double su = S.a.real() * u + S.b.real() * du;
        const double sdu = S.c.real() * u + S.d.real() * du;
        const double sv = S.a.real() * v + S.b.real() * dv;
        const double sdv = S.c.real() * v + S.d.real() * dv;
        u = su;
        du = sdu;
        v = sv;
        dv = sdv;
    }
};

}  // namespace detail

/// H(x) = [[u0^2, u0 v0], [u0 v0, v0^2]] built from the zero-energy
/// solutions, sampled at midpoints of cells_per_piece sub-cells per
/// potential cell.  Every emitted matrix is exactly rank one.
inline HalfLineHamiltonian schrodinger_to_canonical(const SchrodingerProblem& P,
                                                    int cells_per_piece) {
    if (cells_per_piece < 1)
        throw std::invalid_argument("schrodinger_to_canonical: cells_per_piece >= 1");
    if (P.cells.empty()) throw validation_error("schrodinger problem: no cells");
    std::vector<HamiltonianCell> out;
    out.reserve(P.cells.size() * cells_per_piece);
    detail::ZeroEnergyState s;
    for (const auto& [len, V] : P.cells) {
        if (!(len > 0.0)) throw validation_error("schrodinger problem: cell length must be > 0");
        const double h = len / cells_per_piece;
        for (int k = 0; k < cells_per_piece; ++k) {
            detail::ZeroEnergyState mid = s;
            mid.advance(V, h / 2.0);
            out.push_back({h, {mid.u * mid.u, mid.u * mid.v, mid.v * mid.v}});
            s.advance(V, h);
        }
    }
    return {std::move(out), Extension::RepeatLast, Side::Right};
}

enum class DiracOrientation { Plus, Minus };

/// Exponential Hamiltonian diag(e^{+-2 int W}, e^{-+2 int W}); the running
/// integral of W is exact (piecewise linear), sampled at sub-cell midpoints.
inline HalfLineHamiltonian dirac_to_canonical(const DiracPotential& P,
                                              DiracOrientation orientation,
                                              int cells_per_piece = 64) {
    if (cells_per_piece < 1)
        throw std::invalid_argument("dirac_to_canonical: cells_per_piece >= 1");
    if (P.cells.empty()) throw validation_error("dirac potential: no cells");
    const double sgn = (orientation == DiracOrientation::Plus) ? 1.0 : -1.0;
    std::vector<HamiltonianCell> out;
    out.reserve(P.cells.size() * cells_per_piece);
    double I = 0.0;  // int_0^x W
    for (const auto& [len, W] : P.cells) {
        if (!(len > 0.0)) throw validation_error("dirac potential: cell length must be > 0");
        const double h = len / cells_per_piece;
        for (int k = 0; k < cells_per_piece; ++k) {
            const double Imid = I + W * h / 2.0;
            out.push_back({h, PSDMatrix2::diag(std::exp(2.0 * sgn * Imid),
                                               std::exp(-2.0 * sgn * Imid))});
            I += W * h;
        }
    }
    return {std::move(out), Extension::RepeatLast, Side::Right};
}

struct JacobiReduction {
    HalfLineHamiltonian hamiltonian;
    std::vector<int> applied_signs;  // -1 where the raw cell was negated
    std::vector<double> h, phi;      // h * P_phi factorization per cell
    std::vector<double> p0, q0;      // zero-energy solutions, indices 0..L+1
};

/// Unit cells H(n) = J T^{-1}(n+1) A(n) T(n) from the zero-energy
/// solutions p0, q0 (p(0)=p(1)=1, q(0)=0, q(1)=1), replaced by the PSD
/// representative: the raw product is negative semidefinite whenever
/// det T(n) > 0, which the recursion makes permanent, so the sign fix is
/// recorded per cell.
inline JacobiReduction jacobi_to_canonical(const JacobiProblem& P) {
    const std::size_t L = P.a.size();
    if (L < 2 || P.b.size() != L)
        throw validation_error("jacobi problem: need a(1..L), b(1..L) with L >= 2");
    for (std::size_t i = 0; i < L; ++i)
        if (!(P.a[i] > 0.0)) throw validation_error("jacobi problem: a(" + std::to_string(i + 1) + ") must be > 0");

    auto a = [&](std::size_t n) { return n == 0 ? 1.0 : P.a[n - 1]; };
    auto b = [&](std::size_t n) { return P.b[n - 1]; };

    std::vector<double> p0(L + 2), q0(L + 2);
    p0[0] = 1.0;
    p0[1] = 1.0;
    q0[0] = 0.0;
    q0[1] = 1.0;
    for (std::size_t n = 1; n <= L; ++n) {
        p0[n + 1] = -(a(n - 1) * p0[n - 1] + b(n) * p0[n]) / a(n);
        q0[n + 1] = -(a(n - 1) * q0[n - 1] + b(n) * q0[n]) / a(n);
    }

    std::vector<HamiltonianCell> cells;
    std::vector<int> signs;
    std::vector<double> hs, phis;
    const Mat2 J = symplectic_j();
    for (std::size_t n = 1; n <= L; ++n) {
        const Mat2 Tn{p0[n - 1], q0[n - 1], p0[n], q0[n]};
        const Mat2 Tn1{p0[n], q0[n], p0[n + 1], q0[n + 1]};
        const Complex det = Tn1.det();
        if (std::abs(det) < 1e-300)
            throw validation_error("jacobi reduction: T(n+1) singular at n = " + std::to_string(n));
        const Mat2 Tn1_inv = Mat2{Tn1.d, -Tn1.b, -Tn1.c, Tn1.a} * (1.0 / det);
        const Mat2 A{0.0, 0.0, 0.0, 1.0 / a(n)};
        const Mat2 Hn = J * Tn1_inv * A * Tn;
        double h11 = Hn.a.real(), h12 = 0.5 * (Hn.b.real() + Hn.c.real()), h22 = Hn.d.real();
        int sign = 1;
        if (h11 + h22 < 0.0) {
            sign = -1;
            h11 = -h11;
            h12 = -h12;
            h22 = -h22;
        }
        cells.push_back({1.0, {h11, h12, h22}});
        signs.push_back(sign);
        hs.push_back(h11 + h22);
        double ph = std::atan2(q0[n], p0[n]);  // rank-one direction (p0, q0) mod pi
        if (ph < 0.0) ph += M_PI;
        if (ph >= M_PI) ph -= M_PI;
        phis.push_back(ph);
    }
    return {HalfLineHamiltonian(std::move(cells), Extension::RepeatLast),
            std::move(signs), std::move(hs), std::move(phis), std::move(p0), std::move(q0)};
}

/// Independent Weyl m-function oracle for -y'' + V y = z y on [0, inf)
/// (Dirichlet frame, m = f'(0)/f(0) for the decaying solution): backward
/// Riccati sweep through the potential cells starting from the repeat-last
/// tail value i sqrt(z - V_last).  interface_deltas, when given, are
/// delta-potential strengths at the cell interfaces (used by the Dirac
/// relation, where V = W^2 + W' has jumps of W as point parts).
inline Complex schrodinger_m_dirichlet(const std::vector<std::pair<double, double>>& cells,
                                       Complex z,
                                       const std::vector<double>* interface_deltas = nullptr) {
    if (cells.empty()) throw validation_error("schrodinger_m_dirichlet: no cells");
    if (!(z.imag() > 0.0)) throw std::domain_error("schrodinger_m_dirichlet: Im z must be > 0");
    const std::size_t K = cells.size();
    Complex m = Complex{0.0, 1.0} * std::sqrt(z - cells.back().second);
    for (std::size_t k = K; k-- > 0;) {
        const Mat2 T = detail::schrodinger_piece_transfer(Complex{cells[k].second, 0.0} - z,
                                                          cells[k].first);
        const Complex den = T.b * m - T.d;
        if (std::abs(den) <= 1e-14 * (std::abs(T.b) * std::abs(m) + std::abs(T.d)))
            throw pole_error("schrodinger_m_dirichlet: pole in backward sweep");
        m = (T.c - T.a * m) / den;
        if (k > 0 && interface_deltas)
            m -= (*interface_deltas)[k - 1];
    }
    return m;
}

enum class RelationKind { Schrodinger, Dirac, Flip };

struct RelationRow {
    Complex z;
    Complex lhs, rhs;
    double defect = 0.0;
    bool converged = true;
};

struct RelationReport {
    RelationKind kind;
    std::vector<RelationRow> rows;
    double max_defect = 0.0;

    void push(RelationRow r) {
        r.defect = std::abs(r.lhs - r.rhs);
        if (r.converged) max_defect = std::max(max_defect, r.defect);
        rows.push_back(r);
    }
};

/// m_s(z) == m_c(z): Riccati oracle on V against the half-line m of the
/// reduced canonical system.  The m-function is invariant under the trace
/// reparametrization, and the raw x scale is the one on which the disks
/// shrink exponentially (the normalized time of these reductions grows like
/// e^{2x}, turning the decay polynomial), so the raw Hamiltonian is used.
inline RelationReport relation_report_schrodinger(const SchrodingerProblem& P,
                                                  int cells_per_piece,
                                                  const std::vector<Complex>& z_grid,
                                                  double tol) {
    RelationReport rep{RelationKind::Schrodinger, {}, 0.0};
    const HalfLineHamiltonian H = schrodinger_to_canonical(P, cells_per_piece);
    for (Complex z : z_grid) {
        const Complex ms = schrodinger_m_dirichlet(P.cells, z);
        const MValue mc = m_halfline(H, z, tol / 10.0);
        rep.push({z, ms, mc.value, 0.0, mc.converged});
    }
    return rep;
}

/// m_s(z^2) == z m_c(z) + W(0+): the canonical side is the orientation-+
/// exponential Hamiltonian; the boundary term W(0+) accounts for the
/// z-dependent frame the Schrodinger-to-Dirac substitution carries at 0
/// (it vanishes for W(0) = 0).  The Schrodinger potential is W^2 with
/// delta parts of strength (W jump) at the steps of W.
inline RelationReport relation_report_dirac(const DiracPotential& P, int cells_per_piece,
                                            const std::vector<Complex>& z_grid,
                                            double tol) {
    RelationReport rep{RelationKind::Dirac, {}, 0.0};
    const HalfLineHamiltonian H = dirac_to_canonical(P, DiracOrientation::Plus, cells_per_piece);
    std::vector<std::pair<double, double>> v_cells;
    std::vector<double> deltas;
    for (std::size_t i = 0; i < P.cells.size(); ++i) {
        v_cells.push_back({P.cells[i].first, P.cells[i].second * P.cells[i].second});
        if (i + 1 < P.cells.size()) deltas.push_back(P.cells[i + 1].second - P.cells[i].second);
    }
    const double W0 = P.cells.front().second;
    for (Complex z : z_grid) {
        if (!(z.imag() > 0.0) || !((z * z).imag() > 0.0))
            throw std::domain_error("relation_report_dirac: grid must lie in the open first-quadrant sector");
        const Complex ms = schrodinger_m_dirichlet(v_cells, z * z, &deltas);
        const MValue mc = m_halfline(H, z, tol / 10.0);
        rep.push({z, ms, z * mc.value + W0, 0.0, mc.converged});
    }
    return rep;
}

/// m_{c+} == -1/m_{c-} for the two orientations of the exponential
/// Hamiltonian (-J H_+ J = H_-).
inline RelationReport relation_report_flip(const DiracPotential& P, int cells_per_piece,
                                           const std::vector<Complex>& z_grid, double tol) {
    RelationReport rep{RelationKind::Flip, {}, 0.0};
    const HalfLineHamiltonian Hp = dirac_to_canonical(P, DiracOrientation::Plus, cells_per_piece);
    const HalfLineHamiltonian Hm = dirac_to_canonical(P, DiracOrientation::Minus, cells_per_piece);
    for (Complex z : z_grid) {
        const MValue mp = m_halfline(Hp, z, tol / 10.0);
        const MValue mm = m_halfline(Hm, z, tol / 10.0);
        rep.push({z, mp.value, -1.0 / mm.value, 0.0, mp.converged && mm.converged});
    }
    return rep;
}

}  // namespace canosys
