#include <doctest.h>

#include <random>

#include "canosys/analysis.hpp"
#include "canosys/reductions.hpp"

using namespace canosys;

namespace {

constexpr Complex kI{0.0, 1.0};

// free-Schrodinger canonical half line, long enough for boundary probes
// down to y ~ 0.05
const HalfLineHamiltonian& free_schrodinger_half() {
    static const HalfLineHamiltonian H =
        schrodinger_to_canonical(SchrodingerProblem{{{256.0, 0.0}}}, 2048);
    return H;
}

WholeLineHamiltonian free_schrodinger_whole() {
    const HalfLineHamiltonian& r = free_schrodinger_half();
    // H(-s) = R H(s) R for this Hamiltonian, so the left side is the mirror
    return {r, r.mirrored().with_side(Side::Left)};
}

}  // namespace

TEST_CASE("weyl_separation_bound: identity H closed form at z = i, N = 1") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const SeparationBound s = weyl_separation_bound(H, 1.0, kI, kI);
    CHECK(s.I == doctest::Approx((std::cosh(2.0) - 1.0) / 2.0).epsilon(1e-12));
    CHECK(s.bound == doctest::Approx(1.0 / std::sqrt(s.I * (s.I + 1.0))));
    CHECK(s.gamma <= s.bound + 1e-9);
}

TEST_CASE("weyl_separation_bound: holds for real and complex w, bound decays in N") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    for (Complex w : {Complex{0.0, 0.0}, Complex{1.0, 0.0}, kI, Complex{1.0, 1.0}}) {
        const SeparationBound s = weyl_separation_bound(H, 1.0, kI, w);
        CHECK(s.gamma <= s.bound + 1e-9);
    }
    double prev = 1e300;
    for (double N : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const SeparationBound s = weyl_separation_bound(H, N, kI, Complex{0.3, 0.2});
        CHECK(s.bound < prev);
        prev = s.bound;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("weyl_separation_bound: randomized probes") {
    std::mt19937 rng(139);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<HamiltonianCell> cells;
        for (int i = 0; i < 1 + trial % 3; ++i) {
            const double a11 = 0.05 + unif(rng), a22 = 0.05 + unif(rng);
            const double rho = 2.0 * unif(rng) - 1.0;
            cells.push_back({0.3 + unif(rng), {a11, rho * std::sqrt(a11 * a22), a22}});
        }
        const auto H = normalize_trace(
                           HalfLineHamiltonian(std::move(cells), Extension::Periodic))
                           .hamiltonian;
        const Complex z{2.0 * unif(rng) - 1.0, 0.2 + unif(rng)};
        const Complex w{2.0 * unif(rng) - 1.0, unif(rng) < 0.3 ? 0.0 : unif(rng)};
        const SeparationBound s = weyl_separation_bound(H, 0.5 + 6.0 * unif(rng), z, w);
        CHECK(s.gamma <= s.bound + 1e-9);
    }
}

TEST_CASE("value_distribution_integral: constant and degenerate integrands") {
    const IntervalSet A = IntervalSet::single(0.0, 1.0);
    const IntervalSet S = IntervalSet::single(0.0, 1e300);
    // F == i constant
    CHECK(value_distribution_integral([](double) { return kI; }, A, S) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // F(t) = t real: degenerate indicator, |A \cap S| = 1
    CHECK(value_distribution_integral([](double t) { return Complex{t, 0.0}; }, A, S) ==
          doctest::Approx(1.0));
    // |A| * omega_i(S) for a bounded S
    const IntervalSet S2 = IntervalSet::single(-1.0, 1.0);
    CHECK(value_distribution_integral([](double) { return kI; }, A, S2) ==
          doctest::Approx(harmonic_measure(kI, S2)).epsilon(1e-12));
}

TEST_CASE("boundary_m: identity Hamiltonian converges to i at the smallest y") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const std::vector<double> ys{0.1, 0.05, 0.025};
    const HerglotzSample s = boundary_m(H, 0.7, ys, 1e-6, 1e7);
    CHECK(s.y == 0.025);
    CHECK(std::abs(s.value - kI) < 1e-6);
}

TEST_CASE("boundary_m: free-Schrodinger boundary values i sqrt(t)") {
    const auto& H = free_schrodinger_half();
    const std::vector<double> ys{0.2, 0.1};
    const HerglotzSample at4 = boundary_m(H, 4.0, ys, 0.05, 1e7);
    const Complex expected = kI * std::sqrt(Complex{4.0, at4.y});
    CHECK(std::abs(at4.value - expected) < 0.08);

    // below the spectrum the boundary value is real (-2 at t = -4); the
    // enclosure shrinks fast there, so a tight tolerance is cheap
    const HerglotzSample atm4 = boundary_m(H, -4.0, ys, 0.01, 1e7);
    CHECK(std::abs(atm4.value.real() + 2.0) < 0.05);
    CHECK(atm4.value.imag() < 0.05);
}

TEST_CASE("boundary_m: unconverged schedules throw with partial results") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    try {
        boundary_m(H, 0.0, {0.5, 0.25}, 1e-30, 8.0);
        FAIL("expected BoundaryUnconverged");
    } catch (const BoundaryUnconverged& e) {
        CHECK(e.partials.size() == 2);
    }
}

TEST_CASE("reflectionless_defect: whole-line identity is exactly zero") {
    const auto mu = constant_whole_line(PSDMatrix2::identity());
    const DefectReport rep = reflectionless_defect(mu, IntervalSet::single(1.0, 4.0), 1e-2, 9);
    CHECK(rep.flagged_nodes.empty());
    CHECK(rep.max_defect == 0.0);
}

TEST_CASE("reflectionless_defect: free-Schrodinger whole line is O(y) on (1,4)") {
    const auto mu = free_schrodinger_whole();
    const DefectReport rep = reflectionless_defect(mu, IntervalSet::single(1.0, 4.0), 0.1, 5);
    CHECK(rep.flagged_nodes.empty());
    CHECK(rep.max_defect < 0.2);  // true defect ~ y/sqrt(t) plus discretization
}

TEST_CASE("reflectionless_defect: mismatched sides below the spectrum stay bounded away from 0") {
    // right side free (m_+ = i), left side the free-Schrodinger system:
    // below its spectrum m_-(t) is nearly real (~ -sqrt|t|), so
    // |m_+ + conj m_-| ~ sqrt(1 + |t|) >= sqrt(2)
    const HalfLineHamiltonian left_half =
        schrodinger_to_canonical(SchrodingerProblem{{{64.0, 0.0}}}, 512);
    const WholeLineHamiltonian mixed(constant_hamiltonian(PSDMatrix2::identity()),
                                     left_half.mirrored().with_side(Side::Left));
    const DefectReport rep =
        reflectionless_defect(mixed, IntervalSet::single(-4.0, -1.0), 0.05, 5);
    CHECK(rep.flagged_nodes.empty());
    CHECK(rep.max_defect > 1.0);
}

TEST_CASE("reflectionless defect is stable under boundary rotation and base change") {
    // identity H: m_+ = m_- = i; rotating both or translating both keeps
    // the defect at zero
    const Complex mp = kI, mm = kI;
    for (double g : {0.3, 1.2, 2.8}) {
        const Complex mpb = mobius_change_alpha(mp, g);
        const Complex mmb = mobius_change_alpha_minus(mm, g);
        CHECK(std::abs(mpb + std::conj(mmb)) < 1e-14);
    }
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    for (double a : {0.8, 2.5}) {
        const TransferMatrix T = transfer(H, a, Complex{0.3, 0.7});
        const Complex mpa = translate_m(mp, T, MSign::Plus);
        const Complex mma = translate_m(mm, T, MSign::Minus);
        CHECK(std::abs(mpa + std::conj(mma)) < 1e-12);
    }
}

TEST_CASE("bp_discrepancy: S = R makes both integrals |A|") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const IntervalSet A = IntervalSet::single(0.5, 2.0);
    const BpResult r = bp_discrepancy(H, A, IntervalSet::real_line(), 3.0, 0.05, 16);
    CHECK(r.integral_minus == doctest::Approx(A.measure()).epsilon(1e-9));
    CHECK(r.integral_plus == doctest::Approx(A.measure()).epsilon(1e-9));
    CHECK(std::abs(r.discrepancy) < 1e-9);
}

TEST_CASE("bp_discrepancy: identity H discrepancy shrinks with N") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const IntervalSet A = IntervalSet::single(0.5, 2.0);
    const IntervalSet S = IntervalSet::single(0.0, 1.0);
    const double d2 = std::abs(bp_discrepancy(H, A, S, 2.0, 0.05, 24).discrepancy);
    const double d32 = std::abs(bp_discrepancy(H, A, S, 32.0, 0.05, 24).discrepancy);
    CHECK(d32 < d2 + 1e-6);
    CHECK(d32 < 5e-2);
}

TEST_CASE("ac_support_estimate: identity H keeps the whole grid; high threshold empties it") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const IntervalSet grid = IntervalSet::single(-2.0, 2.0);
    const AcSupportEstimate est = ac_support_estimate(H, grid, 1e-2, 1e-3, 32);
    CHECK(est.excluded_nodes.empty());
    CHECK(est.estimate.measure() == doctest::Approx(4.0).epsilon(0.1));
    const AcSupportEstimate none = ac_support_estimate(H, grid, 1e-2, 1.5, 16);
    CHECK(none.estimate.empty());
}

TEST_CASE("ac_support_estimate: free-Schrodinger estimate stays on the positive axis") {
    const auto& H = free_schrodinger_half();
    const IntervalSet grid = IntervalSet::single(-2.0, 4.0);
    const AcSupportEstimate est = ac_support_estimate(H, grid, 0.05, 0.3, 24);
    for (const auto& [a, b] : est.estimate.intervals()) CHECK(a > -0.5);
    CHECK(est.estimate.measure() > 2.0);
}

TEST_CASE("omega_limit_probe: constants, periodicity, escaping perturbation") {
    const TestFamily fam(20);
    const auto nu = constant_whole_line(PSDMatrix2::identity());
    const auto probe_const = omega_limit_probe(nu, nu, {0.5, 1.0, 7.0}, fam);
    for (const auto& [x, d] : probe_const) CHECK(d == 0.0);

    // free + compactly supported perturbation
    const WholeLineHamiltonian mu(
        HalfLineHamiltonian({{1.0, {2.0, 0.5, 1.0}}, {1.0, PSDMatrix2::identity()}},
                            Extension::RepeatLast),
        constant_hamiltonian(PSDMatrix2::identity(), 1.0, Side::Left));
    const auto probe = omega_limit_probe(mu, nu, {0.5, 2.0, 4.0, 16.0}, fam);
    CHECK(probe.front().second > 1e-3);   // perturbation still visible
    CHECK(probe[2].second < 1e-12);       // cleared once the shift passes support + tent range
    CHECK(probe.back().second < 1e-12);
}

TEST_CASE("y-stability of value-distribution integrals for closed-form Herglotz functions") {
    const IntervalSet A = IntervalSet::single(1.0, 4.0);
    const IntervalSet S = IntervalSet::single(0.0, 2.0);
    auto sqrt_m = [](Complex z) { return kI * std::sqrt(z); };
    double prev = 1e300;
    for (double y : {0.4, 0.2, 0.1, 0.05}) {
        const double a =
            value_distribution_integral([&](double t) { return sqrt_m({t, y}); }, A, S);
        const double b =
            value_distribution_integral([&](double t) { return sqrt_m({t, y / 2.0}); }, A, S);
        const double diff = std::abs(a - b);
        CHECK(diff <= prev + 1e-12);
        prev = diff;
    }
    // constant Herglotz function: no y dependence at all
    const double c1 = value_distribution_integral([](double) { return kI; }, A, S);
    const double c2 = value_distribution_integral([](double) { return kI; }, A, S);
    CHECK(c1 == c2);
}

TEST_CASE("value distribution: interval m of the identity H converges to the constant i") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const IntervalSet A = IntervalSet::single(0.5, 2.0);
    const IntervalSet S = IntervalSet::single(-1.0, 1.0);
    const double y = 0.5;
    const double target =
        value_distribution_integral([](double) { return kI; }, A, S);
    double prev = 1e300;
    for (double N : {1.0, 2.0, 4.0, 8.0}) {
        const double v = value_distribution_integral(
            [&](double t) { return m_on_interval(H, N, {t, y}, 0.0); }, A, S);
        const double err = std::abs(v - target);
        CHECK(err <= prev + 1e-9);
        prev = err;
    }
    CHECK(prev < 1e-3);
}
