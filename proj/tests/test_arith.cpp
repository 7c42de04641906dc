#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "qtm/arith.hpp"

using namespace qtm;

namespace {
// Legendre symbol by Euler's criterion
int legendre_euler(std::int64_t a, std::int64_t p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    std::int64_t r = 1, b = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}
std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(double(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}
}  // namespace

TEST_CASE("mobius examples") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(4) == 0);
    CHECK(mobius(30) == -1);
    CHECK_THROWS_AS(mobius(0), DomainError);
}

TEST_CASE("mobius sums over divisors vanish") {
    const auto& sv = default_sieve(10001);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        int s = 0;
        for (std::uint64_t d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                s += sv.mobius(d);
                if (d * d != n) s += sv.mobius(n / d);
            }
        REQUIRE(s == (n == 1 ? 1 : 0));
        REQUIRE(sv.mobius(n) == mobius(n));
    }
}

TEST_CASE("sieve factorization matches trial division") {
    const auto& sv = default_sieve();
    for (std::uint64_t n : {2ull, 97ull, 360ull, 999983ull, 123456789ull, 4294967311ull * 3}) {
        auto a = sv.factor(n), b = factor_trial(n);
        CHECK(a.factors == b.factors);
        std::uint64_t prod = 1;
        for (auto [p, e] : a.factors)
            for (int i = 0; i < e; ++i) prod *= p;
        CHECK(prod == n);
    }
    for (std::uint64_t n = 2; n < 5000; ++n) CHECK(sv.least_prime_factor(n) == factor_trial(n).factors[0].first);
}

TEST_CASE("squarefree_square_split") {
    CHECK(squarefree_square_split(1) == std::pair<std::uint64_t, std::uint64_t>{1, 1});
    CHECK(squarefree_square_split(12) == std::pair<std::uint64_t, std::uint64_t>{3, 4});
    CHECK(squarefree_square_split(45) == std::pair<std::uint64_t, std::uint64_t>{5, 9});
    const auto& sv = default_sieve();
    for (std::uint64_t m = 1; m <= 100000; ++m) {
        auto [a, b] = squarefree_square_split(m);
        REQUIRE(a * b == m);
        REQUIRE(sv.mobius(a) != 0);
        const auto r = isqrt(b);
        REQUIRE(r * r == b);
    }
}

TEST_CASE("kronecker examples and Euler criterion") {
    CHECK(kronecker(8, 3) == -1);
    CHECK(kronecker(8, 7) == 1);
    CHECK(kronecker(15, 5) == 0);
    CHECK(kronecker(5, 1) == 1);
    for (std::int64_t p : {3, 5, 7, 11, 13, 101, 199, 997})
        for (std::int64_t a = -60; a <= 60; ++a) REQUIRE(kronecker(a, p) == legendre_euler(a, p));
}

TEST_CASE("kronecker is multiplicative in the modulus") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> A(-100000, 100000);
    for (std::int64_t m = 1; m <= 500; m += 2)
        for (std::int64_t n = 1; n <= 500; n += 2) {
            const auto a = A(rng);
            REQUIRE(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
        }
}

TEST_CASE("sigma_shifted examples") {
    const ShiftTriple z{};
    CHECK(std::abs(sigma_shifted(1, ShiftTriple{0.1, 0.2, 0.3}) - 1.0) < 1e-15);
    CHECK(std::abs(sigma_shifted(7, z) - 3.0) < 1e-14);
    const ShiftTriple s{0.1, cplx(0.2, 1.0), -0.05};
    const double p = 11;
    const cplx want = std::pow(p, -s.alpha) + std::pow(p, -s.beta) + std::pow(p, -s.gamma);
    CHECK(std::abs(sigma_shifted(11, s) - want) < 1e-14);
}

TEST_CASE("sigma_shifted at zero shifts is the ternary divisor count") {
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        long d3 = 0;
        for (std::uint64_t a = 1; a <= n; ++a)
            if (n % a == 0)
                for (std::uint64_t b = 1; b <= n / a; ++b)
                    if ((n / a) % b == 0) ++d3;
        REQUIRE(std::abs(sigma_shifted(n, ShiftTriple{}) - double(d3)) < 1e-9);
    }
}

TEST_CASE("sigma_shifted is multiplicative") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        const ShiftTriple s{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        for (std::uint64_t m = 1; m <= 1000; m += 37)
            for (std::uint64_t n = 1; n <= 1000; n += 53) {
                if (std::gcd(m, n) != 1) continue;
                const cplx a = sigma_shifted(m * n, s), b = sigma_shifted(m, s) * sigma_shifted(n, s);
                REQUIRE(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
            }
    }
}
