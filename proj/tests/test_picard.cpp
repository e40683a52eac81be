#include <doctest.h>

#include <random>

#include "canosys/picard.hpp"
#include "canosys/solver.hpp"

using namespace canosys;

namespace {
constexpr Complex kI{0.0, 1.0};
}

TEST_CASE("picard_solve: x = 0 returns u0 exactly") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const Vec2 u0{0.3, Complex{0.1, -0.2}};
    const Vec2 r = picard_solve(H, 0.0, kI, u0);
    CHECK(r.x == u0.x);
    CHECK(r.y == u0.y);
}

TEST_CASE("picard_solve: one-step integral by hand (first iterate shape)") {
    // Tu(x) = (1, -z x) for H = I, u0 = (1, 0); the fixed point at small
    // |z| x stays within O((zx)^2) of that.
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const Complex z{0.0, 0.01};
    const double x = 0.1;
    const Vec2 r = picard_solve(H, x, z, {1.0, 0.0});
    CHECK(std::abs(r.x - 1.0) < 1e-5);
    CHECK(std::abs(r.y - (-z * x)) < 1e-5);
}

TEST_CASE("picard_solve agrees with the closed-form propagator") {
    const auto H = constant_hamiltonian(PSDMatrix2::identity());
    const Vec2 u0{1.0, 0.0};
    const Vec2 p = picard_solve(H, 0.1, kI, u0);
    const Vec2 t = transfer(H, 0.1, kI).T * u0;
    CHECK(std::abs(p.x - t.x) < 1e-10);
    CHECK(std::abs(p.y - t.y) < 1e-10);
}

TEST_CASE("picard_solve vs transfer on random contraction-regime instances") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<HamiltonianCell> cells;
        double var = 0.0;
        for (int i = 0; i < 1 + trial % 3; ++i) {
            const double a11 = 0.1 + unif(rng), a22 = 0.1 + unif(rng);
            const double rho = 2.0 * unif(rng) - 1.0;
            const double len = 0.05 + 0.3 * unif(rng);
            cells.push_back({len, {a11, rho * std::sqrt(a11 * a22), a22}});
            var += len * (a11 + a22);
        }
        HalfLineHamiltonian H(cells, Extension::RepeatLast);
        const double span = H.cell_span();
        Complex z{2.0 * unif(rng) - 1.0, 0.1 + unif(rng)};
        z *= std::min(1.0, 0.4 / (std::abs(z) * var));  // keep |z| * variation small
        const Vec2 u0{2.0 * unif(rng) - 1.0, Complex{2.0 * unif(rng) - 1.0, unif(rng)}};
        const Vec2 p = picard_solve(H, span, z, u0, 80, 1e-12);
        const Vec2 t = transfer(H, span, z).T * u0;
        CHECK((p - t).norm_inf() < 1e-8);
    }
}

TEST_CASE("picard_solve refuses outside the contraction regime") {
    const auto H = constant_hamiltonian(PSDMatrix2::diag(4.0, 4.0));
    CHECK_THROWS_AS(picard_solve(H, 6.0, Complex{0.0, 3.0}, {1.0, 0.0}, 200),
                    non_contraction_error);
}
