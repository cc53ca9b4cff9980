#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "barrierlab/spectral.hpp"

using namespace barrierlab;

namespace {

/// Deterministic 64-bit mix generator for the randomized invariants.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    double uniform(double lo, double hi) {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

SymmetricMatrix random_symmetric(int n, SplitMix64& rng) {
    SymmetricMatrix x(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) x.set(i, j, rng.uniform(-2.0, 2.0));
    return x;
}

double dot_quadratic(const SymmetricMatrix& x, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < x.order(); ++i)
        for (int j = 0; j < x.order(); ++j) s += v[static_cast<std::size_t>(i)] * x(i, j) * v[static_cast<std::size_t>(j)];
    return s;
}

} // namespace

TEST_CASE("eigenvalues of simple matrices") {
    SUBCASE("diagonal matrix sorts ascending") {
        auto e = eigenvalues(SymmetricMatrix::diagonal({3.0, 1.0, 2.0}));
        REQUIRE(e.size() == 3);
        CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(e[2] == doctest::Approx(3.0).epsilon(1e-13));
    }
    SUBCASE("swap matrix has eigenvalues -1, 1") {
        auto x = SymmetricMatrix::from_dense({{0.0, 1.0}, {1.0, 0.0}});
        auto e = eigenvalues(x);
        REQUIRE(e.size() == 2);
        CHECK(e[0] == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("zero matrix") {
        SymmetricMatrix z(4);
        for (double e : eigenvalues(z)) CHECK(e == 0.0);
    }
    SUBCASE("orthogonal-similarity invariance: rotated diagonal") {
        // R diag(5, -1) R^T for a rotation by 0.7.
        const double c = std::cos(0.7), s = std::sin(0.7);
        const double a = 5.0 * c * c - s * s;
        const double b = 5.0 * c * s + c * s;
        const double d = 5.0 * s * s - c * c;
        auto e = eigenvalues(SymmetricMatrix::from_dense({{a, b}, {b, d}}));
        CHECK(e[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(e[1] == doctest::Approx(5.0).epsilon(1e-12));
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(SymmetricMatrix(0), DomainError);
    CHECK_THROWS_AS(SymmetricMatrix(9), DomainError);
    CHECK_THROWS_AS(SymmetricMatrix::from_dense({{0.0, 1.0}, {0.5, 0.0}}), DomainError);
    CHECK_THROWS_AS(SymmetricMatrix::from_dense({{0.0, 1.0}}), DomainError);
    SymmetricMatrix x(2);
    CHECK_THROWS_AS(x.set(0, 0, std::nan("")), DomainError);
    CHECK_THROWS_AS(x.set(2, 0, 1.0), DomainError);
    SymmetricMatrix y(3);
    CHECK_THROWS_AS(x + y, DomainError);
}

TEST_CASE("eigen decomposition reconstructs the matrix") {
    SplitMix64 rng(0x5eedull);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 4;
        auto x = random_symmetric(n, rng);
        auto dec = eigen_decompose(x);
        REQUIRE(static_cast<int>(dec.values.size()) == n);
        // Rebuild sum_k e_k v_k v_k^T and compare entrywise.
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += dec.values[static_cast<std::size_t>(k)] *
                         dec.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                         dec.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                worst = std::max(worst, std::abs(s - x(i, j)));
            }
        CHECK(worst <= 1e-12 * std::max(1.0, x.max_abs()));
        // Rayleigh quotients of the reported vectors match the values.
        for (int k = 0; k < n; ++k) {
            const auto& v = dec.vectors[static_cast<std::size_t>(k)];
            CHECK(dot_quadratic(x, v) ==
                  doctest::Approx(dec.values[static_cast<std::size_t>(k)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("signed-part split") {
    SUBCASE("diagonal split") {
        auto [p, m] = split_signed_parts(SymmetricMatrix::diagonal({2.0, -3.0}));
        CHECK(p(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(p(1, 1) == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(m(0, 0) == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(m(1, 1) == doctest::Approx(3.0).epsilon(1e-13));
    }
    SUBCASE("positive definite matrix splits as (X, 0)") {
        auto x = SymmetricMatrix::from_dense({{2.0, 0.5}, {0.5, 2.0}});
        auto [p, m] = split_signed_parts(x);
        CHECK(m.max_abs() <= 1e-12);
        CHECK((p - x).max_abs() <= 1e-12);
    }
    SUBCASE("swap matrix: both parts have trace 1") {
        auto x = SymmetricMatrix::from_dense({{0.0, 1.0}, {1.0, 0.0}});
        auto [p, m] = split_signed_parts(x);
        CHECK(p.trace() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random matrices: PSD parts, difference, orthogonality") {
        SplitMix64 rng(0xabcdull);
        for (int trial = 0; trial < 10; ++trial) {
            auto x = random_symmetric(3, rng);
            auto [p, m] = split_signed_parts(x);
            CHECK((p - m - x).max_abs() <= 1e-11 * std::max(1.0, x.max_abs()));
            CHECK(eigenvalues(p).front() >= -1e-11);
            CHECK(eigenvalues(m).front() >= -1e-11);
            // product X+ X- = 0 within 1e-10 * |X|^2
            double worst = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < 3; ++k) s += p(i, k) * m(k, j);
                    worst = std::max(worst, std::abs(s));
                }
            CHECK(worst <= 1e-10 * x.max_abs() * x.max_abs() + 1e-12);
        }
    }
}

TEST_CASE("extremal operators") {
    const EllipticityPair ell(1.0, 2.0);
    SUBCASE("identity") {
        auto i2 = SymmetricMatrix::diagonal({1.0, 1.0});
        CHECK(pucci(i2, ell, PucciSign::Plus) == doctest::Approx(-2.0).epsilon(1e-13));
        CHECK(pucci(i2, ell, PucciSign::Minus) == doctest::Approx(-4.0).epsilon(1e-13));
    }
    SUBCASE("mixed signs") {
        auto x = SymmetricMatrix::diagonal({1.0, -1.0});
        CHECK(pucci(x, ell, PucciSign::Plus) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(pucci(x, ell, PucciSign::Minus) == doctest::Approx(-1.0).epsilon(1e-13));
    }
    SUBCASE("minus never exceeds plus; equality when lambda == Lambda") {
        SplitMix64 rng(0x777ull);
        const EllipticityPair tight(1.5, 1.5);
        for (int trial = 0; trial < 10; ++trial) {
            auto x = random_symmetric(3, rng);
            CHECK(pucci(x, ell, PucciSign::Minus) <= pucci(x, ell, PucciSign::Plus) + 1e-12);
            CHECK(pucci(x, tight, PucciSign::Minus) ==
                  doctest::Approx(pucci(x, tight, PucciSign::Plus)).epsilon(1e-12));
            CHECK(pucci(x, tight, PucciSign::Plus) ==
                  doctest::Approx(-1.5 * x.trace()).epsilon(1e-11));
        }
    }
    SUBCASE("positive homogeneity and duality") {
        SplitMix64 rng(0x1234ull);
        for (int trial = 0; trial < 10; ++trial) {
            auto x = random_symmetric(4, rng);
            for (double c : {0.0, 0.5, 3.0}) {
                CHECK(pucci(x.scaled(c), ell, PucciSign::Plus) ==
                      doctest::Approx(c * pucci(x, ell, PucciSign::Plus)).epsilon(1e-11));
                CHECK(pucci(x.scaled(c), ell, PucciSign::Minus) ==
                      doctest::Approx(c * pucci(x, ell, PucciSign::Minus)).epsilon(1e-11));
            }
            CHECK(pucci(x, ell, PucciSign::Plus) ==
                  doctest::Approx(-pucci(-x, ell, PucciSign::Minus)).epsilon(1e-11));
        }
    }
    SUBCASE("eigenvalue-sum formula directly") {
        SplitMix64 rng(0x99ull);
        for (int trial = 0; trial < 6; ++trial) {
            auto x = random_symmetric(3, rng);
            auto e = eigenvalues(x);
            double plus = 0.0, minus = 0.0;
            for (double v : e) {
                if (v >= 0.0) {
                    plus += -ell.lambda * v;
                    minus += -ell.Lambda * v;
                } else {
                    plus += -ell.Lambda * v;
                    minus += -ell.lambda * v;
                }
            }
            CHECK(pucci(x, ell, PucciSign::Plus) == doctest::Approx(plus).epsilon(1e-11));
            CHECK(pucci(x, ell, PucciSign::Minus) == doctest::Approx(minus).epsilon(1e-11));
        }
    }
}

TEST_CASE("ellipticity pair guards") {
    CHECK_THROWS_AS(EllipticityPair(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(EllipticityPair(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(EllipticityPair(2.0, 1.0), DomainError);
    CHECK_NOTHROW(EllipticityPair(1.0, 1.0));
}
