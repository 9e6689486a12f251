#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ringdefect/spectrum.hpp"

using namespace ringdefect;
using Catch::Approx;

namespace {
const SystemConfig kBench{0.1, 5.0, {2.0, 0.0}};       // benchmark defect: eta=2, alpha=0, c=0.1, L=5
const SystemConfig kFreeBench{0.0, 5.0, {2.0, 0.0}};
}  // namespace

TEST_CASE("spectral_residual degenerate diagonal at c=0") {
    SystemConfig cfg{0.0, 5.0, {1.2, 0.8}};
    for (double k : {0.3, 1.0, 2.7}) {
        const auto [f1, f2] = spectral_residual(k, k, cfg);
        CHECK(f1 == 0.0);
        CHECK(f2 == 0.0);
    }
}

TEST_CASE("spectral_residual closed-form zero at c=0") {
    // k1 L = 2 pi - arccos(1/cosh 2) solves Re(u e^{-i k L}) = 1
    const double k1 = (2.0 * M_PI - std::acos(1.0 / std::cosh(2.0))) / 5.0;
    for (double k2 : {0.4, 1.1, 2.9}) {
        const auto [f1, f2] = spectral_residual(k1, k2, kFreeBench);
        CHECK(std::abs(f1) < 1e-12);
        (void)f2;
    }
}

TEST_CASE("spectral_residual swap symmetry is exact") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> k(0.05, 5.0);
    for (int m = 0; m < 50; ++m) {
        const double k1 = k(rng), k2 = k(rng);
        const auto [f1, f2] = spectral_residual(k1, k2, kBench);
        const auto [g1, g2] = spectral_residual(k2, k1, kBench);
        CHECK(f1 == g2);
        CHECK(f2 == g1);
    }
}

TEST_CASE("free_root closed form") {
    CHECK(free_root(kFreeBench, +1, 0) == Approx(0.26035206720920304).epsilon(1e-12));
    CHECK(free_root(kFreeBench, -1, 1) == Approx(0.9962849942267142).epsilon(1e-12));
    // each closed-form root nulls the spectral relation
    for (int n : {0, 1, 2})
        for (int b : {+1, -1}) {
            if (b == -1 && n == 0) continue;  // k would not be positive
            const double k = free_root(kFreeBench, b, n);
            const auto [f1, f2] = spectral_residual(k, 0.77, kFreeBench);
            CHECK(std::abs(f1) < 1e-10);
            (void)f2;
        }
    // large-eta limit: k L -> alpha +/- pi/2 + 2 pi n
    SystemConfig hard{0.0, 5.0, {40.0, 0.3}};
    CHECK(free_root(hard, +1, 0) * 5.0 == Approx(0.3 + M_PI / 2.0).margin(1e-12));
    CHECK_THROWS_AS(free_root(kFreeBench, -1, 0), out_of_range_error);
    CHECK_THROWS_AS(free_root(kBench, +1, 0), invalid_parameter_error);  // c != 0
}

TEST_CASE("free_root_list is sorted, positive, and consistent with free_root") {
    const auto roots = free_root_list(kFreeBench, 8);
    REQUIRE(roots.size() == 8);
    CHECK(roots[0] == Approx(free_root(kFreeBench, +1, 0)));
    CHECK(roots[1] == Approx(free_root(kFreeBench, -1, 1)));
    CHECK(roots[2] == Approx(free_root(kFreeBench, +1, 1)));
    for (std::size_t m = 1; m < roots.size(); ++m) CHECK(roots[m] > roots[m - 1]);
}

TEST_CASE("find_root fixed point at a free pair") {
    const auto roots = free_root_list(kFreeBench, 3);
    const auto p = find_root(roots[0], roots[2], kFreeBench);
    CHECK(p.k1 == roots[0]);
    CHECK(p.k2 == roots[2]);
    CHECK(p.residual < 1e-10);
}

TEST_CASE("find_root from the free (1,3) seed at the benchmark parameters") {
    const auto roots = free_root_list(kFreeBench, 3);
    const auto p = find_root(roots[0], roots[2], kBench);
    CHECK(p.residual < 1e-10);
    CHECK(std::abs(p.k1 - roots[0]) < 0.05);
    CHECK(std::abs(p.k2 - roots[2]) < 0.05);
    CHECK(p.k1 > 0.0);
    CHECK(p.k2 > 0.0);
}

TEST_CASE("find_root at the degenerate origin fails loudly") {
    CHECK_THROWS_AS(find_root(0.0, 0.0, kBench), error);  // convergence or singular step
}

TEST_CASE("find_root basin around the free roots at c=0") {
    // Damped Newton reliably resolves seeds within about a fifth of the local
    // root spacing; wider seeds can hop periods or hit the stationary points
    // of the spectral curves.
    for (double alpha : {0.0, 1.0}) {
        SystemConfig cfg{0.0, 5.0, {2.0, alpha}};
        const auto roots = free_root_list(cfg, 4);
        auto local_gap = [&](std::size_t i) {
            double g = 2.0 * roots[i];
            if (i > 0) g = std::min(g, roots[i] - roots[i - 1]);
            if (i + 1 < roots.size()) g = std::min(g, roots[i + 1] - roots[i]);
            return g;
        };
        for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
            for (std::size_t j : {std::size_t{2}, std::size_t{3}}) {
                for (double s1 : {-0.2, 0.2}) {
                    for (double s2 : {-0.2, 0.2}) {
                        const double seed1 = roots[i] + s1 * local_gap(i);
                        const double seed2 = roots[j] + s2 * local_gap(j);
                        const auto p = find_root(seed1, seed2, cfg);
                        CHECK(p.k1 == Approx(roots[i]).margin(1e-9));
                        CHECK(p.k2 == Approx(roots[j]).margin(1e-9));
                    }
                }
            }
        }
    }
}

TEST_CASE("find_root does not terminate on the c=0 diagonal from off-diagonal seeds") {
    // the diagonal factor of the c=0 relations is excluded by the guard
    const auto roots = free_root_list(kFreeBench, 3);
    try {
        const auto p = find_root(1.25, 1.27, kFreeBench);  // near the diagonal, off-root
        CHECK(std::abs(p.k1 - p.k2) > 1e-6 * (p.k1 + p.k2));
    } catch (const error&) {
        SUCCEED("loud failure is acceptable");
    }
}

TEST_CASE("enumerate_states at c=0 returns the analytic roots") {
    const auto states = enumerate_states(kFreeBench, 4);
    const auto roots = free_root_list(kFreeBench, 4);
    REQUIRE(states.size() == 16);
    for (const auto& [ij, p] : states) {
        CHECK(p.k1 == Approx(roots[ij.first - 1]).epsilon(1e-12));
        CHECK(p.k2 == Approx(roots[ij.second - 1]).epsilon(1e-12));
        CHECK(p.residual < 1e-10);
    }
}

TEST_CASE("enumerate_states at the benchmark parameters") {
    const auto states = enumerate_states(kBench, 4);
    REQUIRE(states.size() == 16);
    for (const auto& [ij, p] : states) {
        CHECK(p.residual < 1e-10);
        CHECK(p.k1 > 0.0);
        CHECK(p.k2 > 0.0);
        CHECK(std::abs(p.k1 - p.k2) > 1e-6 * (p.k1 + p.k2));
        REQUIRE(p.index.has_value());
        CHECK(*p.index == ij);
    }
    // (i,j) and (j,i) are coordinate swaps (off-diagonal pairs)
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            if (i == j) continue;
            const auto& a = states.at({i, j});
            const auto& b = states.at({j, i});
            CHECK(a.k1 == Approx(b.k2).epsilon(1e-12));
            CHECK(a.k2 == Approx(b.k1).epsilon(1e-12));
        }
    // diagonal seeds unfold off the diagonal with k1 < k2
    const auto& d = states.at({1, 1});
    CHECK(d.k1 < d.k2);
}

TEST_CASE("enumerate_states is deterministic") {
    const auto a = enumerate_states(kBench, 3);
    const auto b = enumerate_states(kBench, 3);
    for (const auto& [ij, p] : a) {
        CHECK(p.k1 == b.at(ij).k1);
        CHECK(p.k2 == b.at(ij).k2);
    }
}

TEST_CASE("root set is 2pi-periodic in alpha") {
    SystemConfig shifted = kBench;
    shifted.defect.alpha = 2.0 * M_PI;
    const auto a = enumerate_states(kBench, 3);
    const auto b = enumerate_states(shifted, 3);
    for (const auto& [ij, p] : a) {
        CHECK(p.k1 == Approx(b.at(ij).k1).margin(1e-9));
        CHECK(p.k2 == Approx(b.at(ij).k2).margin(1e-9));
    }
}

TEST_CASE("track_alpha constant grid gives a constant path") {
    const std::vector<double> grid(5, 0.0);
    const auto path = track_alpha({1, 3}, kBench, grid);
    REQUIRE(path.points.size() == 5);
    for (const auto& p : path.points) {
        CHECK(p.k1 == path.points.front().k1);
        CHECK(p.k2 == path.points.front().k2);
    }
}

TEST_CASE("track_alpha at c=0 shifts roots linearly") {
    std::vector<double> grid;
    for (int m = 0; m <= 32; ++m) grid.push_back(2.0 * M_PI * m / 32.0);
    const auto path = track_alpha({1, 2}, kFreeBench, grid);
    const auto roots = free_root_list(kFreeBench, 2);
    for (std::size_t m = 0; m < grid.size(); ++m) {
        CHECK(path.points[m].k1 == Approx(roots[0] + grid[m] / 5.0).margin(1e-10));
        CHECK(path.points[m].k2 == Approx(roots[1] + grid[m] / 5.0).margin(1e-10));
    }
}

TEST_CASE("full alpha cycle carries (1,3) to (3,5)") {
    std::vector<double> grid;
    for (int m = 0; m <= 128; ++m) grid.push_back(2.0 * M_PI * m / 128.0);
    const auto path = track_alpha({1, 3}, kBench, grid);
    const auto states = enumerate_states(kBench, 5);
    const auto& target = states.at({3, 5});
    CHECK(std::abs(path.points.back().k1 - target.k1) < 1e-8);
    CHECK(std::abs(path.points.back().k2 - target.k2) < 1e-8);
}

TEST_CASE("track_alpha validates its grid") {
    CHECK_THROWS_AS(track_alpha({1, 2}, kBench, {}), invalid_parameter_error);
    CHECK_THROWS_AS(track_alpha({1, 2}, kBench, {0.5, 1.0}), invalid_parameter_error);
    CHECK_THROWS_AS(track_alpha({1, 2}, kBench, {0.0, 1.0, 0.5}), invalid_parameter_error);
}

TEST_CASE("energy") {
    CHECK(energy({1.0, 2.0, 0.0, std::nullopt}) == Approx(2.5));
    CHECK(energy({2.0, 1.0, 0.0, std::nullopt}) == Approx(2.5));
    const auto roots = free_root_list(kFreeBench, 3);
    const auto states = enumerate_states(kFreeBench, 3);
    CHECK(energy(states.at({1, 3})) ==
          Approx(0.5 * (roots[0] * roots[0] + roots[2] * roots[2])).epsilon(1e-12));
}

TEST_CASE("curve_samples transposition property") {
    const auto v = curve_samples(kBench, CurveFamily::vertical, 0.05, 2.0, 0.02);
    const auto h = curve_samples(kBench, CurveFamily::horizontal, 0.05, 2.0, 0.02);
    REQUIRE(v.size() == h.size());
    for (std::size_t b = 0; b < v.size(); ++b) {
        REQUIRE(v[b].points.size() == h[b].points.size());
        for (std::size_t m = 0; m < v[b].points.size(); ++m) {
            CHECK(v[b].points[m][0] == h[b].points[m][1]);
            CHECK(v[b].points[m][1] == h[b].points[m][0]);
        }
    }
}

TEST_CASE("curve_samples points satisfy the spectral relation (vertical)") {
    const auto v = curve_samples(kBench, CurveFamily::vertical, 0.05, 2.0, 0.02);
    REQUIRE(!v.empty());
    std::size_t npts = 0;
    for (const auto& line : v)
        for (const auto& pt : line.points) {
            const auto [f1, f2] = spectral_residual(pt[0], pt[1], kBench);
            CHECK(std::abs(f1) < 1e-6);
            (void)f2;
            ++npts;
        }
    CHECK(npts > 50);
}

TEST_CASE("curve_samples degenerates to lines plus diagonal at c=0") {
    const auto v = curve_samples(kFreeBench, CurveFamily::vertical, 0.05, 2.0, 0.05);
    const auto roots = free_root_list(kFreeBench, 8);
    // one straight line per free root in window, plus the diagonal
    std::size_t in_window = 0;
    for (double r : roots)
        if (r >= 0.05 && r <= 2.0) ++in_window;
    REQUIRE(v.size() == in_window + 1);
    for (std::size_t b = 0; b < in_window; ++b) {
        const double k1 = v[b].points.front()[0];
        for (const auto& pt : v[b].points) CHECK(pt[0] == k1);
    }
    for (const auto& pt : v.back().points) CHECK(pt[0] == pt[1]);
}

TEST_CASE("curve_samples empty window") {
    CHECK(curve_samples(kBench, CurveFamily::vertical, 0.05, 0.01, 0.02).empty());
}

TEST_CASE("enumerated roots are ordered like their indices") {
    // the intersection pattern: coordinates grow with the curve numbers
    const auto states = enumerate_states(kBench, 5);
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            if (i < 5) CHECK(states.at({i + 1, j}).k1 > states.at({i, j}).k1);
            if (j < 5) CHECK(states.at({i, j + 1}).k2 > states.at({i, j}).k2);
        }
}

TEST_CASE("roots lie on the sampled curves") {
    // every enumerated root inside the window is met by the vertical family
    const double step = 0.02;
    const auto v = curve_samples(kBench, CurveFamily::vertical, 0.05, 3.0, step);
    const auto states = enumerate_states(kBench, 3);
    for (const auto& [ij, p] : states) {
        if (p.k1 > 2.9 || p.k2 > 2.9) continue;
        double nearest = 1e300;
        for (const auto& line : v)
            for (const auto& pt : line.points)
                nearest = std::min(nearest, std::hypot(pt[0] - p.k1, pt[1] - p.k2));
        CHECK(nearest < 2.0 * step);
    }
}
