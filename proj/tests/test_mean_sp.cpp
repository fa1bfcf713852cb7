#include <cmath>
#include <random>

#include "doctest.h"
#include "meanreflect/errors.hpp"
#include "meanreflect/mean_sp.hpp"
#include "meanreflect/parallel.hpp"
#include "test_util.hpp"

using namespace meanreflect;

namespace {

// Law path Y_i(t) = base(t) + offset_i + walk_i(t); pairing across problems
// comes from sharing the generator seed.
EnsemblePath synthetic_law(std::mt19937_64& rng, TimeGridPtr grid, const GridPath& base,
                           std::size_t particles, double offset_scale = 0.3,
                           double walk_scale = 0.2) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> rows(grid->size(), std::vector<double>(particles));
    for (std::size_t i = 0; i < particles; ++i) {
        const double offset = offset_scale * normal(rng);
        double walk = 0.0;
        rows[0][i] = base.value(0) + offset;
        for (std::size_t j = 1; j < grid->size(); ++j) {
            walk += walk_scale * std::sqrt(grid->point(j) - grid->point(j - 1)) * normal(rng);
            rows[j][i] = base.value(j) + offset + walk;
        }
    }
    EnsemblePath law;
    law.grid = std::move(grid);
    for (auto& row : rows) law.slices.emplace_back(std::move(row));
    return law;
}

MeanProblem random_problem(std::mt19937_64& rng, std::size_t particles = 200,
                           std::size_t max_points = 60,
                           ConstraintFunction h = make_soft(0.4)) {
    const auto inst = testutil::random_instance(rng, max_points);
    MeanProblem p;
    p.law = synthetic_law(rng, inst.y.grid(), inst.y, particles);
    p.h = std::move(h);
    // Barriers around mean h(t, Y): shift the instance band so t = 0 is
    // admissible for h applied to the law.
    const double eh0 = [&] {
        double s = 0.0;
        for (double v : p.law.slices[0].particles()) s += p.h(0.0, v);
        return s / static_cast<double>(p.law.slices[0].size());
    }();
    const double mid =
        0.5 * (inst.barriers.lower->value(0) + inst.barriers.upper->value(0));
    std::vector<double> l(p.law.grid->size()), u(p.law.grid->size());
    for (std::size_t j = 0; j < l.size(); ++j) {
        l[j] = inst.barriers.lower->value(j) - mid + eh0;
        u[j] = inst.barriers.upper->value(j) - mid + eh0;
    }
    p.barriers = BarrierPair::two_sided(GridPath(p.law.grid, std::move(l)),
                                        GridPath(p.law.grid, std::move(u)));
    p.tol = 1e-10;
    return p;
}

}  // namespace

TEST_CASE("identity constraint reduces to the deterministic problem") {
    std::mt19937_64 rng(3);
    const auto grid = TimeGrid::uniform(25, 2.0);
    const GridPath base = testutil::random_path(rng, grid, 0.5, 0.8);
    MeanProblem p;
    p.law = synthetic_law(rng, grid, base, 300);
    p.h = make_identity();
    p.barriers = BarrierPair::two_sided(GridPath::constant(grid, -2.5),
                                        GridPath::constant(grid, 2.5));
    p.tol = 1e-10;
    const MeanSolution sol = solve_mean_two_barrier(p);
    const SkorokhodSolution det = solve_two_barrier(p.law.mean_path(), p.barriers);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        CHECK(std::fabs(sol.k.value(j) - det.k.value(j)) <= 1e-10);
        // particles are shifted by exactly k
        CHECK(sol.x_slices[j].particles()[0] ==
              p.law.slices[j].particles()[0] + sol.k.value(j));
    }
}

TEST_CASE("point-mass law with identity is the deterministic problem itself") {
    const auto grid = std::make_shared<TimeGrid>(std::vector<double>{0.0, 1.0, 2.0});
    EnsemblePath law;
    law.grid = grid;
    for (double v : {0.0, 2.0, -1.0}) law.slices.emplace_back(std::vector<double>{v});
    MeanProblem p{std::move(law), make_identity(),
                  BarrierPair::two_sided(GridPath::constant(grid, 0.0),
                                         GridPath::constant(grid, 1.0)),
                  1e-10};
    const MeanSolution sol = solve_mean_two_barrier(p);
    CHECK(sol.k.values() == std::vector<double>{0.0, -1.0, 1.0});
    CHECK(sol.eh.values() == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("affine equivariance of the compensating path") {
    std::mt19937_64 rng(7);
    const double a = 2.0, b = 1.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto grid = TimeGrid::uniform(20, 1.5);
        const GridPath base = testutil::random_path(rng, grid, 0.0, 0.6);
        const std::uint64_t law_seed = rng();
        std::mt19937_64 rng_a(law_seed), rng_b(law_seed);
        MeanProblem ident;
        ident.law = synthetic_law(rng_a, grid, base, 250);
        ident.h = make_identity();
        ident.barriers = BarrierPair::two_sided(GridPath::constant(grid, -2.0),
                                                GridPath::constant(grid, 2.0));
        MeanProblem affine;
        affine.law = synthetic_law(rng_b, grid, base, 250);
        affine.h = make_affine(a, b);
        affine.barriers =
            BarrierPair::two_sided(GridPath::constant(grid, a * -2.0 + b),
                                   GridPath::constant(grid, a * 2.0 + b));
        const MeanSolution si = solve_mean_two_barrier(ident);
        const MeanSolution sa = solve_mean_two_barrier(affine);
        for (std::size_t j = 0; j < grid->size(); ++j)
            CHECK(std::fabs(si.k.value(j) - sa.k.value(j)) <= 1e-10);
    }
}

TEST_CASE("lower-barrier solver") {
    SUBCASE("no reflection when the constraint stays above the floor") {
        std::mt19937_64 rng(11);
        const auto grid = TimeGrid::uniform(10, 1.0);
        MeanProblem p;
        p.law = synthetic_law(rng, grid, GridPath::constant(grid, 2.0), 200);
        p.h = make_soft(0.3);
        p.barriers = BarrierPair::lower_only(GridPath::constant(grid, -1.0));
        const MeanSolution sol = solve_mean_lower(p);
        for (double k : sol.k.values()) CHECK(k == 0.0);
    }
    SUBCASE("declining mean with identity constraint has the closed form") {
        const auto grid = TimeGrid::uniform(16, 2.0);
        EnsemblePath law;
        law.grid = grid;
        for (std::size_t j = 0; j < grid->size(); ++j)
            law.slices.emplace_back(std::vector<double>{1.0 - grid->point(j)});
        MeanProblem p{std::move(law), make_identity(),
                      BarrierPair::lower_only(GridPath::constant(grid, 0.0)), 1e-10};
        const MeanSolution sol = solve_mean_lower(p);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            const double t = grid->point(j);
            CHECK(sol.k.value(j) == doctest::Approx(std::max(t - 1.0, 0.0)).epsilon(1e-12));
        }
    }
    SUBCASE("matches the direct monotone-search characterisation") {
        std::mt19937_64 rng(13);
        const auto grid = TimeGrid::uniform(30, 1.5);
        MeanProblem p;
        p.law = synthetic_law(rng, grid, GridPath::constant(grid, 0.6), 300);
        p.h = make_soft(0.4);
        p.barriers = BarrierPair::lower_only(GridPath::constant(grid, 0.5));
        const MeanSolution sol = solve_mean_lower(p);
        std::uniform_int_distribution<std::size_t> pick(0, grid->size() - 1);
        for (int s = 0; s < 10; ++s) {
            const std::size_t j = pick(rng);
            const double t = grid->point(j);
            const double inner = std::max(
                sol.transformed.lower->value(j) - sol.y.value(j), 0.0);
            // smallest x >= 0 with mean h(t, Y + x) >= floor, by bisection
            const auto level = [&](double x) {
                double acc = 0.0;
                for (double v : p.law.slices[j].particles()) acc += p.h(t, v + x);
                return acc / static_cast<double>(p.law.slices[j].size());
            };
            double lo = 0.0, hi = 4.0;
            if (level(0.0) >= 0.5) {
                CHECK(inner <= 4.0 * p.tol);
                continue;
            }
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (level(mid) >= 0.5 ? hi : lo) = mid;
            }
            CHECK(inner == doctest::Approx(hi).epsilon(1e-7));
        }
    }
    SUBCASE("single-particle law reduces to the deterministic one-barrier form") {
        std::mt19937_64 rng(17);
        const auto grid = TimeGrid::uniform(12, 1.0);
        const GridPath base = testutil::random_path(rng, grid, 1.0, 0.8);
        EnsemblePath law;
        law.grid = grid;
        for (std::size_t j = 0; j < grid->size(); ++j)
            law.slices.emplace_back(std::vector<double>{base.value(j)});
        const GridPath floor = GridPath::constant(grid, base.value(0) - 0.2);
        MeanProblem p{std::move(law), make_identity(), BarrierPair::lower_only(floor),
                      1e-10};
        const MeanSolution sol = solve_mean_lower(p);
        const SkorokhodSolution det = solve_lower(base, floor);
        CHECK(sol.k.values() == det.k.values());
    }
}

TEST_CASE("upper-barrier solver mirrors the lower one") {
    std::mt19937_64 rng(19);
    const auto grid = TimeGrid::uniform(20, 1.0);
    const GridPath base = testutil::random_path(rng, grid, 0.0, 0.5);
    const std::uint64_t seed = rng();
    std::mt19937_64 ra(seed), rb(seed);
    MeanProblem up;
    up.law = synthetic_law(ra, grid, base, 150);
    up.h = make_identity();
    up.barriers = BarrierPair::upper_only(GridPath::constant(grid, 0.4));
    const MeanSolution su = solve_mean_upper(up);
    CHECK(su.k.value(0) == 0.0);
    for (std::size_t j = 1; j < grid->size(); ++j)
        CHECK(su.k.value(j) <= su.k.value(j - 1) + 1e-15);
    // mirrored problem: negate law and barrier
    std::vector<double> neg_base(grid->size());
    for (std::size_t j = 0; j < grid->size(); ++j) neg_base[j] = -base.value(j);
    MeanProblem low;
    low.law = synthetic_law(rb, grid, GridPath(grid, neg_base), 150, -0.3, -0.2);
    low.h = make_identity();
    low.barriers = BarrierPair::lower_only(GridPath::constant(grid, -0.4));
    const MeanSolution sl = solve_mean_lower(low);
    for (std::size_t j = 0; j < grid->size(); ++j)
        CHECK(su.k.value(j) == doctest::Approx(-sl.k.value(j)).epsilon(1e-10));
}

TEST_CASE("two-barrier solver with one sentinel side equals the one-barrier solver") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto grid = TimeGrid::uniform(15, 1.0);
        const GridPath base = testutil::random_path(rng, grid, 0.7, 0.6);
        const std::uint64_t seed = rng();
        std::mt19937_64 ra(seed), rb(seed);
        MeanProblem one, two;
        one.law = synthetic_law(ra, grid, base, 100);
        two.law = synthetic_law(rb, grid, base, 100);
        one.h = two.h = make_soft(0.35);
        const GridPath floor = GridPath::constant(grid, 0.0);
        one.barriers = BarrierPair::lower_only(floor);
        two.barriers = BarrierPair::lower_only(floor);
        const MeanSolution s1 = solve_mean_lower(one);
        const MeanSolution s2 = solve_mean_two_barrier(two);
        CHECK(s1.k.values() == s2.k.values());
    }
}

TEST_CASE("minimality verification") {
    std::mt19937_64 rng(29);
    SUBCASE("solver outputs pass all checks") {
        for (int trial = 0; trial < 25; ++trial) {
            const MeanProblem p = random_problem(rng);
            const MeanSolution sol = solve_mean_two_barrier(p);
            const MinimalityReport rep = verify_minimality(sol);
            CHECK(rep.all_ok);
        }
    }
    SUBCASE("zero compensation gives exactly zero integrals") {
        const auto grid = TimeGrid::uniform(8, 1.0);
        MeanProblem p;
        p.law = synthetic_law(rng, grid, GridPath::constant(grid, 0.5), 100);
        p.h = make_identity();
        p.barriers = BarrierPair::two_sided(GridPath::constant(grid, -5.0),
                                            GridPath::constant(grid, 5.0));
        const MeanSolution sol = solve_mean_two_barrier(p);
        const MinimalityReport rep = verify_minimality(sol);
        CHECK(rep.all_ok);
        for (const auto& chk : rep.integral_checks) {
            CHECK(chk.lower_integral == 0.0);
            CHECK(chk.upper_integral == 0.0);
        }
    }
    SUBCASE("a corrupted compensation path is flagged") {
        const auto grid = TimeGrid::uniform(10, 1.0);
        MeanProblem p;
        p.law = synthetic_law(rng, grid, GridPath::constant(grid, 0.2), 200);
        p.h = make_identity();
        p.barriers = BarrierPair::two_sided(GridPath::constant(grid, -3.0),
                                            GridPath::constant(grid, 3.0));
        MeanSolution sol = solve_mean_two_barrier(p);
        // push k up at an interior time where the constraint is strictly inside
        sol.k.values()[5] += 0.1;
        sol.eh.values()[5] += 0.1;  // keep eh consistent with the shifted particles
        const MinimalityReport rep = verify_minimality(sol);
        CHECK_FALSE(rep.all_ok);
        CHECK_FALSE(rep.jump_violations.empty());
    }
}

TEST_CASE("stability report across paired problems") {
    std::mt19937_64 rng(31);
    SUBCASE("identical problems have zero distances") {
        const MeanProblem p = random_problem(rng);
        const MeanStabilityReport rep = stability_report(p, p, p.law.grid->horizon());
        CHECK(rep.lhs_k == 0.0);
        CHECK(rep.lhs_x == 0.0);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
    SUBCASE("barrier shift with identity constraint") {
        const auto grid = TimeGrid::uniform(20, 1.0);
        const std::uint64_t seed = rng();
        std::mt19937_64 ra(seed), rb(seed);
        MeanProblem p1, p2;
        p1.law = synthetic_law(ra, grid, GridPath::constant(grid, 0.2), 200);
        p2.law = synthetic_law(rb, grid, GridPath::constant(grid, 0.2), 200);
        p1.h = p2.h = make_identity();
        p1.barriers = BarrierPair::two_sided(GridPath::constant(grid, -0.1),
                                             GridPath::constant(grid, 0.5));
        p2.barriers = BarrierPair::two_sided(GridPath::constant(grid, 0.1),
                                             GridPath::constant(grid, 0.7));
        const MeanStabilityReport rep = stability_report(p1, p2, 1.0);
        CHECK(rep.constant == doctest::Approx(3.0));
        CHECK(rep.barrier_distance == doctest::Approx(0.2));
        CHECK(rep.lhs_k <= rep.constant * 0.2 + 1e-9);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
    SUBCASE("constraint-function perturbation") {
        const auto grid = TimeGrid::uniform(20, 1.0);
        const std::uint64_t seed = rng();
        std::mt19937_64 ra(seed), rb(seed);
        MeanProblem p1, p2;
        p1.law = synthetic_law(ra, grid, GridPath::constant(grid, 0.3), 200);
        p2.law = synthetic_law(rb, grid, GridPath::constant(grid, 0.3), 200);
        p1.h = make_identity();
        p2.h = make_affine(1.0, 0.1);
        p1.barriers = p2.barriers = BarrierPair::two_sided(
            GridPath::constant(grid, -0.4), GridPath::constant(grid, 0.9));
        const MeanStabilityReport rep = stability_report(p1, p2, 1.0);
        CHECK(rep.h_distance == doctest::Approx(0.1));
        CHECK(rep.h_distance_exact);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
    SUBCASE("grid mismatch is rejected") {
        std::mt19937_64 ra(1), rb(1);
        MeanProblem p1, p2;
        const auto g1 = TimeGrid::uniform(10, 1.0);
        const auto g2 = TimeGrid::uniform(11, 1.0);
        p1.law = synthetic_law(ra, g1, GridPath::constant(g1, 0.0), 50);
        p2.law = synthetic_law(rb, g2, GridPath::constant(g2, 0.0), 50);
        p1.h = p2.h = make_identity();
        p1.barriers = BarrierPair::lower_only(GridPath::constant(g1, -1.0));
        p2.barriers = BarrierPair::lower_only(GridPath::constant(g2, -1.0));
        CHECK_THROWS_AS(stability_report(p1, p2, 1.0), InvalidArgumentError);
    }
}

TEST_CASE("modulus report") {
    std::mt19937_64 rng(37);
    SUBCASE("constant law and barriers after t give zero oscillation") {
        const auto grid = TimeGrid::uniform(10, 1.0);
        EnsemblePath law;
        law.grid = grid;
        std::vector<double> particles(100);
        std::normal_distribution<double> n01(0.0, 0.3);
        for (auto& v : particles) v = 0.4 + n01(rng);
        for (std::size_t j = 0; j < grid->size(); ++j) law.slices.emplace_back(particles);
        MeanProblem p{std::move(law), make_soft(0.2),
                      BarrierPair::two_sided(GridPath::constant(grid, -1.0),
                                             GridPath::constant(grid, 2.0)),
                      1e-10};
        const ModulusReport rep = modulus_report(p, 0.2, 1.0);
        CHECK(rep.lhs_k == 0.0);
        CHECK(rep.lhs_x == 0.0);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
    SUBCASE("drifting mean against flat barriers") {
        const auto grid = TimeGrid::uniform(25, 2.0);
        std::mt19937_64 ra(17);
        MeanProblem p;
        std::vector<double> ramp(grid->size());
        for (std::size_t j = 0; j < grid->size(); ++j) ramp[j] = 0.5 - 0.4 * grid->point(j);
        p.law = synthetic_law(ra, grid, GridPath(grid, ramp), 300);
        p.h = make_identity();
        p.barriers = BarrierPair::two_sided(GridPath::constant(grid, -0.2),
                                            GridPath::constant(grid, 0.9));
        const ModulusReport rep = modulus_report(p, 0.5, 2.0);
        CHECK(rep.lhs_k > 0.0);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
    SUBCASE("time-dependent constraint activates the drift term") {
        const auto grid = TimeGrid::uniform(25, 2.0);
        std::mt19937_64 ra(19);
        MeanProblem p;
        p.law = synthetic_law(ra, grid, GridPath::constant(grid, 0.1), 300);
        p.h = make_time_tilt(0.5, 4.0);
        p.barriers = BarrierPair::two_sided(GridPath::constant(grid, -1.2),
                                            GridPath::constant(grid, 1.2));
        const ModulusReport rep = modulus_report(p, 0.0, 2.0);
        CHECK(rep.k_bound_holds);
        CHECK(rep.x_bound_holds);
    }
}

TEST_CASE("variation bound through the transformed band") {
    std::mt19937_64 rng(41);
    SUBCASE("identity coincides with the deterministic bound") {
        const MeanProblem p = random_problem(rng, 200, 60, make_identity());
        const MeanSolution sol = solve_mean_two_barrier(p);
        double band = 1e300;
        for (std::size_t j = 0; j < p.law.grid->size(); ++j)
            band = std::min(band, sol.transformed.upper->value(j) -
                                      sol.transformed.lower->value(j));
        if (band <= 0.0) return;
        const double eta = band / 6.5;
        const double q = p.law.grid->horizon();
        const double got = mean_variation_bound(sol, eta, q);
        const double det = variation_bound(sol.y, *p.barriers.lower, *p.barriers.upper,
                                           eta, q);
        CHECK(got == doctest::Approx(det).epsilon(1e-12));
        CHECK(total_variation(sol.k, q) <= got);
    }
    SUBCASE("eta at the boundary is accepted, above it rejected") {
        const auto grid = TimeGrid::uniform(8, 1.0);
        MeanProblem p;
        std::mt19937_64 ra(3);
        p.law = synthetic_law(ra, grid, GridPath::constant(grid, 0.5), 150);
        p.h = make_identity();
        p.barriers = BarrierPair::two_sided(GridPath::constant(grid, 0.0),
                                            GridPath::constant(grid, 1.2));
        const MeanSolution sol = solve_mean_two_barrier(p);
        const double band = 1.2;
        CHECK_NOTHROW(mean_variation_bound(sol, band / 6.0, 1.0));
        CHECK_THROWS_AS(mean_variation_bound(sol, band / 6.0 * 1.01, 1.0),
                        InvalidArgumentError);
    }
}

TEST_CASE("stepwise recursion matches the direct solve") {
    std::mt19937_64 rng(43);
    SUBCASE("internal consistency on random problems") {
        for (int trial = 0; trial < 10; ++trial) {
            const MeanProblem p = random_problem(rng, 150, 40);
            const MeanSolution direct = solve_mean_two_barrier(p);
            const MeanSolution stepwise = solve_discretized(p);
            for (std::size_t j = 0; j < p.law.grid->size(); ++j)
                CHECK(std::fabs(direct.k.value(j) - stepwise.k.value(j)) <= 1e-10);
        }
    }
    SUBCASE("identity with a deterministic law collapses to the clamp recursion") {
        const auto grid = std::make_shared<TimeGrid>(std::vector<double>{0.0, 1.0, 2.0});
        EnsemblePath law;
        law.grid = grid;
        for (double v : {0.0, 2.0, -1.0}) law.slices.emplace_back(std::vector<double>{v});
        MeanProblem p{std::move(law), make_identity(),
                      BarrierPair::two_sided(GridPath::constant(grid, 0.0),
                                             GridPath::constant(grid, 1.0)),
                      1e-10};
        const MeanSolution sol = solve_discretized(p);
        CHECK(sol.k.values() == std::vector<double>{0.0, -1.0, 1.0});
    }
    SUBCASE("refining the grid converges to a fine reference") {
        // smooth law sampled at increasing resolutions, common randomness
        const long fine_n = 4096;
        const auto fine_grid = TimeGrid::uniform(fine_n, 1.0);
        std::mt19937_64 ra(7);
        const std::size_t particles = 200;
        std::normal_distribution<double> n01(0.0, 1.0);
        std::vector<double> offsets(particles);
        for (auto& v : offsets) v = 0.3 * n01(ra);

        auto law_at = [&](long n) {
            const auto grid = TimeGrid::uniform(n, 1.0);
            EnsemblePath law;
            law.grid = grid;
            for (std::size_t j = 0; j < grid->size(); ++j) {
                const double t = grid->point(j);
                std::vector<double> row(particles);
                for (std::size_t i = 0; i < particles; ++i)
                    row[i] = 1.0 - 0.8 * t * t + offsets[i];
                law.slices.emplace_back(std::move(row));
            }
            return law;
        };
        auto solve_at = [&](long n) {
            MeanProblem p;
            p.law = law_at(n);
            p.h = make_soft(0.3);
            p.barriers =
                BarrierPair::lower_only(GridPath::constant(p.law.grid, 0.4));
            return solve_mean_two_barrier(p);
        };
        const MeanSolution ref = solve_at(fine_n);
        double prev_err = 1e300;
        for (long n : {16L, 64L, 256L}) {
            const MeanSolution sol = solve_at(n);
            double err = 0.0;
            for (std::size_t j = 0; j < sol.grid->size(); ++j)
                err = std::max(err, std::fabs(sol.k.value(j) - ref.k(sol.grid->point(j))));
            CHECK(err <= prev_err * 1.05);
            prev_err = err;
        }
        CHECK(prev_err <= 0.05);
    }
}

TEST_CASE("solves are bit-identical across worker counts") {
    std::mt19937_64 rng(47);
    const MeanProblem p = random_problem(rng, 700);
    set_worker_count(1);
    const MeanSolution a = solve_mean_two_barrier(p);
    set_worker_count(6);
    const MeanSolution b = solve_mean_two_barrier(p);
    set_worker_count(1);
    CHECK(a.k.values() == b.k.values());
    CHECK(a.eh.values() == b.eh.values());
    CHECK(a.transformed.lower->values() == b.transformed.lower->values());
}

TEST_CASE("admissibility is enforced at time zero") {
    const auto grid = TimeGrid::uniform(5, 1.0);
    EnsemblePath law;
    law.grid = grid;
    for (std::size_t j = 0; j < grid->size(); ++j)
        law.slices.emplace_back(std::vector<double>{5.0});
    MeanProblem p{std::move(law), make_identity(),
                  BarrierPair::two_sided(GridPath::constant(grid, 0.0),
                                         GridPath::constant(grid, 1.0)),
                  1e-10};
    CHECK_THROWS_AS(solve_mean_two_barrier(p), ConstraintViolationError);
}
