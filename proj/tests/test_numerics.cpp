#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "warcast/lbfgs.hpp"
#include "warcast/numerics.hpp"
#include "warcast/random.hpp"

using warcast::DenseMatrix;
using warcast::RandomStream;

namespace {

// Independent oracle: Gaussian elimination with partial pivoting.
std::vector<double> gaussian_elimination(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
        x[i] = s / a(i, i);
    }
    return x;
}

DenseMatrix random_spd(std::size_t n, RandomStream& rng) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    DenseMatrix spd(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += m(k, i) * m(k, j);
            spd(i, j) = s + (i == j ? 1.0 : 0.0);
        }
    return spd;
}

}  // namespace

TEST_CASE("solve_spd identity returns rhs") {
    DenseMatrix eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    std::vector<double> b{1.5, -2.0, 7.25};
    auto x = warcast::solve_spd(eye, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == Catch::Approx(b[i]).margin(0));
}

TEST_CASE("solve_spd matches Gaussian elimination oracle on random SPD systems") {
    auto rng = warcast::seeded_stream(7, "spd");
    for (int trial = 0; trial < 5; ++trial) {
        auto a = random_spd(8, rng);
        std::vector<double> b(8);
        for (auto& v : b) v = rng.uniform(-5.0, 5.0);

        auto x = warcast::solve_spd(a, b);
        auto expected = gaussian_elimination(a, b);
        for (std::size_t i = 0; i < 8; ++i)
            CHECK(std::fabs(x[i] - expected[i]) <= 1e-10);

        // Residual bound on a well-conditioned system.
        auto ax = warcast::matvec(a, x);
        double rnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            rnorm += (ax[i] - b[i]) * (ax[i] - b[i]);
            bnorm += b[i] * b[i];
        }
        CHECK(std::sqrt(rnorm) <= 1e-8 * std::sqrt(bnorm));
    }
}

TEST_CASE("solve_spd rejects non positive definite input") {
    DenseMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 1) = 1.0;  // second pivot eliminates to zero
    std::vector<double> b{1.0, 1.0};
    CHECK_THROWS_WITH(warcast::solve_spd(a, b),
                      Catch::Matchers::ContainsSubstring("not positive definite"));

    DenseMatrix neg(1, 1);
    neg(0, 0) = -4.0;
    CHECK_THROWS(warcast::solve_spd(neg, std::vector<double>{1.0}));
}

TEST_CASE("finite difference gradient of a linear function is the coefficient vector") {
    std::vector<double> c{2.0, -3.0, 0.5};
    auto f = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * x[i];
        return s;
    };
    std::vector<double> x{0.3, -1.0, 4.0};
    auto g = warcast::finite_difference_gradient(f, x, 1e-5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::fabs(g[i] - c[i]) <= 1e-10);
}

TEST_CASE("finite difference gradient matches analytic quadratic gradient") {
    auto rng = warcast::seeded_stream(11, "fd");
    auto a = random_spd(4, rng);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);

    auto f = [&](std::span<const double> p) {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) s += 0.5 * p[i] * a(i, j) * p[j];
        return s;
    };
    auto analytic = warcast::matvec(a, x);
    auto fd = warcast::finite_difference_gradient(f, x, 1e-5);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::fabs(fd[i] - analytic[i]) <= 1e-6 * std::max(1.0, std::fabs(analytic[i])));
}

TEST_CASE("finite difference gradient is antisymmetric for even functions") {
    auto f = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v * v * v;  // even
        return s;
    };
    std::vector<double> x{0.7, -1.3};
    std::vector<double> nx{-0.7, 1.3};
    auto g = warcast::finite_difference_gradient(f, x, 1e-4);
    auto gn = warcast::finite_difference_gradient(f, nx, 1e-4);
    for (std::size_t i = 0; i < 2; ++i) CHECK(gn[i] == Catch::Approx(-g[i]).margin(1e-8));
}

TEST_CASE("lbfgs solves a quadratic to the closed-form minimum") {
    auto rng = warcast::seeded_stream(23, "lbfgs-quad");
    auto a = random_spd(6, rng);
    std::vector<double> b(6);
    for (auto& v : b) v = rng.uniform(-3.0, 3.0);
    auto expected = warcast::solve_spd(a, b);

    warcast::Objective f = [&](std::span<const double> x, std::span<double> grad) {
        auto ax = warcast::matvec(a, x);
        double val = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            val += 0.5 * x[i] * ax[i] - b[i] * x[i];
            grad[i] = ax[i] - b[i];
        }
        return val;
    };
    auto res = warcast::lbfgs_minimize(f, std::vector<double>(6, 0.0));
    REQUIRE(res.converged);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::fabs(res.x[i] - expected[i]) <= 1e-6);
}

TEST_CASE("lbfgs returns immediately from a stationary point") {
    warcast::Objective f = [](std::span<const double> x, std::span<double> grad) {
        double val = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            val += x[i] * x[i];
            grad[i] = 2.0 * x[i];
        }
        return val;
    };
    auto res = warcast::lbfgs_minimize(f, std::vector<double>(3, 0.0));
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.value == 0.0);
}

TEST_CASE("lbfgs minimizes the 2-D Rosenbrock function") {
    warcast::Objective f = [](std::span<const double> p, std::span<double> grad) {
        const double x = p[0], y = p[1];
        grad[0] = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        grad[1] = 200.0 * (y - x * x);
        return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
    };
    warcast::OptimizerConfig cfg;
    cfg.gradient_tolerance = 1e-8;
    auto res = warcast::lbfgs_minimize(f, {-1.2, 1.0}, cfg);
    REQUIRE(res.converged);
    CHECK(std::fabs(res.x[0] - 1.0) <= 1e-5);
    CHECK(std::fabs(res.x[1] - 1.0) <= 1e-5);
}

TEST_CASE("lbfgs objective is non-increasing across accepted iterates") {
    // Re-run with increasing iteration caps; the value at cap k is the k-th
    // accepted iterate's objective.
    warcast::Objective f = [](std::span<const double> p, std::span<double> grad) {
        const double x = p[0], y = p[1];
        grad[0] = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        grad[1] = 200.0 * (y - x * x);
        return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
    };
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t cap = 1; cap <= 25; ++cap) {
        warcast::OptimizerConfig cfg;
        cfg.max_iterations = cap;
        auto res = warcast::lbfgs_minimize(f, {-1.2, 1.0}, cfg);
        CHECK(res.value <= prev + 1e-12);
        prev = res.value;
    }
}

TEST_CASE("lbfgs rejects a start point with non-finite objective") {
    warcast::Objective f = [](std::span<const double> x, std::span<double> grad) {
        grad[0] = 1.0;
        return std::log(x[0]);  // -inf at 0, nan below
    };
    CHECK_THROWS(warcast::lbfgs_minimize(f, {-1.0}));
}

TEST_CASE("seeded streams are deterministic and label-separated") {
    auto a1 = warcast::seeded_stream(42, "split");
    auto a2 = warcast::seeded_stream(42, "split");
    auto b = warcast::seeded_stream(42, "bootstrap");

    bool labels_differ = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a1.next_u64();
        CHECK(va == a2.next_u64());
        if (va != b.next_u64()) labels_differ = true;
    }
    CHECK(labels_differ);
}

TEST_CASE("uniform stream mean is near one half") {
    auto rng = warcast::seeded_stream(1, "uniform-smoke");
    double sum = 0.0;
    for (int i = 0; i < 1000; ++i) sum += rng.uniform();
    const double mean = sum / 1000.0;
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);
}

TEST_CASE("below stays in range and forks are independent") {
    auto rng = warcast::seeded_stream(9, "range");
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);

    auto f1 = rng.fork("a");
    auto f2 = rng.fork("b");
    auto f1_again = rng.fork("a");
    bool differ = false;
    for (int i = 0; i < 50; ++i) {
        const auto v1 = f1.next_u64();
        CHECK(v1 == f1_again.next_u64());
        if (v1 != f2.next_u64()) differ = true;
    }
    CHECK(differ);
}

TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    auto rng1 = warcast::seeded_stream(3, "shuffle");
    auto rng2 = warcast::seeded_stream(3, "shuffle");
    auto v1 = v, v2 = v;
    rng1.shuffle(v1);
    rng2.shuffle(v2);
    CHECK(v1 == v2);
    auto sorted = v1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == v);
}
