#include "doctest.h"

#include <cmath>
#include <random>

#include "qtm/mainterm.hpp"
#include "qtm/moment.hpp"

using namespace qtm;

namespace {
// Hurwitz zeta by Euler-Maclaurin, for the L(s, chi_8) oracle
cplx hurwitz(cplx s, double a) {
    const int N = 200;
    cplx sum = 0;
    for (int n = 0; n < N; ++n) sum += std::exp(-s * std::log(n + a));
    const double x = N + a;
    auto xp = [&](cplx e) { return std::exp(-e * std::log(x)); };
    sum += xp(s - 1.0) / (s - 1.0) + 0.5 * xp(s);
    // B_2k/(2k)! s(s+1)...(s+2k-2) x^{-s-2k+1}
    const double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66};
    cplx rising = s;
    double fact = 2;
    for (int k = 1; k <= 5; ++k) {
        sum += B[k - 1] / fact * rising * xp(s + double(2 * k - 1));
        rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
        fact *= double(2 * k + 1) * double(2 * k + 2);
    }
    return sum;
}
cplx l_chi8(cplx s) {
    return std::exp(-s * std::log(8.0)) * (hurwitz(s, 0.125) - hurwitz(s, 0.375) - hurwitz(s, 0.625) + hurwitz(s, 0.875));
}
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

std::vector<std::uint64_t> odd_squarefree_sample(int n, std::uint64_t hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> D(1, hi);
    std::vector<std::uint64_t> out;
    while (int(out.size()) < n) {
        const auto d = D(rng) | 1;
        if (d <= hi && mobius(d) != 0) out.push_back(d);
    }
    return out;
}
}  // namespace

TEST_CASE("L(1/2, chi_8) against the Hurwitz zeta oracle") {
    const auto r = lvalue_single(1, 0.0);
    CHECK(r.value.real() > 0);
    CHECK(std::abs(r.value - l_chi8(0.5)) < 1e-12);
    CHECK(r.error_bound < 1e-10);
    const cplx u(0.04, 0.03);
    CHECK(std::abs(lvalue_single(1, u).value - l_chi8(0.5 + u)) < 1e-12);
}

TEST_CASE("character table is multiplicative and matches kronecker") {
    std::vector<std::int8_t> chi;
    for (std::uint64_t d : {1ull, 3ull, 17ull, 105ull, 9999ull}) {
        fill_chi8d(d, 3000, chi);
        for (std::int64_t n = 1; n <= 3000; n += 2) REQUIRE(chi[n] == chi8d(std::int64_t(d), n));
    }
}

TEST_CASE("lvalue_single symmetries") {
    const cplx u(0.03, 0.07);
    for (std::uint64_t d : {5ull, 17ull, 1001ull}) {
        const cplx a = lvalue_single(d, u).value, b = lvalue_single(d, std::conj(u)).value;
        CHECK(std::abs(a - std::conj(b)) < 1e-10);
        // functional equation L(1/2+u) = Gamma_u d^{-u} L(1/2-u)
        const cplx p = lvalue_single(d, 0.05).value, m = lvalue_single(d, -0.05).value;
        CHECK(std::abs(p - gamma_ratio_shift(0.05) * std::pow(double(d), -0.05) * m) < 1e-7);
    }
    const SingleAFE afe(0.0, AFEWeightG::one(), 10000);
    for (auto d : odd_squarefree_sample(200, 10000, 1)) REQUIRE(std::abs(afe(d).imag()) < 1e-8);
    CHECK_THROWS_AS(lvalue_single(9, 0.0), DomainError);
    CHECK_THROWS_AS(lvalue_single(6, 0.0), DomainError);
    CHECK_THROWS_AS(lvalue_single(5, 0.2), DomainError);
}

TEST_CASE("triple AFE against the product of single values") {
    const ShiftTriple s{0.02, 0.03, -0.01};
    const cplx prod = lvalue_single(17, s.alpha).value * lvalue_single(17, s.beta).value * lvalue_single(17, s.gamma).value;
    const cplx t = triple_product_afe(17, s, AFEWeightG::one());
    CHECK(rel(t, prod) < 1e-6);
    CHECK(std::abs(triple_product_afe(17, {s.gamma, s.alpha, s.beta}, AFEWeightG::one()) - t) < 1e-10);
    const cplx l0 = lvalue_single(33, 0.0).value;
    CHECK(rel(triple_product_afe(33, ShiftTriple{}, AFEWeightG::one()), l0 * l0 * l0) < 1e-6);
    // complex shifts take the complex path
    const ShiftTriple c{{0.02, 0.05}, {-0.03, 0.01}, {0.01, -0.04}};
    const cplx pc = lvalue_single(21, c.alpha).value * lvalue_single(21, c.beta).value * lvalue_single(21, c.gamma).value;
    CHECK(rel(triple_product_afe(21, c, AFEWeightG::one()), pc) < 1e-6);
}

TEST_CASE("triple AFE does not depend on G") {
    const ShiftTriple s{0.02, -0.04, 0.03};
    for (std::uint64_t d : {1ull, 3ull, 5ull}) {
        const cplx a = triple_product_afe(d, s, AFEWeightG::one());
        const cplx b = triple_product_afe(d, s, AFEWeightG::gaussian());
        CHECK(rel(a, b) < 1e-7);
    }
}

TEST_CASE("triple AFE parallel and serial agree") {
    const ShiftTriple s{0.05, -0.02, 0.01};
    const auto a = triple_product_afe_detail(101, s, AFEWeightG::one(), true);
    const auto b = triple_product_afe_detail(101, s, AFEWeightG::one(), false);
    CHECK(a.value == b.value);
}

TEST_CASE("pairwise sum") {
    CHECK(pairwise_sum({}) == 0.0);
    CHECK(pairwise_sum({1.5}) == 1.5);
    CHECK(pairwise_sum({1, 2, 3, 4, 5}) == 15.0);
    CHECK(pairwise_sum({1e16, 1, -1e16, 1}) == ((1e16 + 1) + (-1e16 + 1)));
}

TEST_CASE("moment on an empty support is zero") {
    MomentConfig cfg;
    cfg.X = 100;
    MomentWeight w{8.1, 8.9, [](double) { return 1.0; }};
    auto r = third_moment_empirical(cfg, w);
    CHECK(r.value == 0.0);
    CHECK(r.count == 0);
}

TEST_CASE("moment matches a serial recomputation exactly") {
    MomentConfig cfg;
    cfg.X = 2000;
    SmoothWeight F(cfg.X);
    const auto w = MomentWeight::from(F);
    const auto ser = third_moment_serial(cfg, w);
    for (int workers : {1, 2, 3, 8}) {
        cfg.workers = workers;
        const auto par = third_moment_empirical(cfg, w);
        CHECK(par.value == ser.value);
        CHECK(par.count == ser.count);
    }
    // oracle: plain ascending sum of cubes from the generic AFE path
    const SingleAFE afe(0.0, AFEWeightG::one(), 6000);
    double direct = 0;
    for (std::uint64_t d = 1001; d <= 6000; d += 2)
        if (mobius(d) != 0) {
            const double L = afe(d).real();
            direct += L * L * L * F(double(d));
        }
    CHECK(std::abs(direct - ser.value) < 1e-9 * std::abs(direct));
}

TEST_CASE("moment at X = 1e4 within 10% of the main term") {
    MomentConfig cfg;
    SmoothWeight F(cfg.X);
    const double e = third_moment_empirical(cfg).value;
    const double m = main_term_at_zero(1, F).value;
    CHECK(std::abs(e - m) <= 0.1 * m);
}

TEST_CASE("config validation") {
    MomentConfig cfg;
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.workers = 1;
    cfg.X = 10;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("poisson check") {
    SmoothWeight F(1000.0);
    const double f1 = F.mellin1();
    auto r1 = poisson_check(1, F);
    CHECK(r1.gap <= 1e-8 * f1);
    CHECK(std::abs(r1.lhs - 0.5 * f1) < 0.01 * f1);
    CHECK(poisson_check(15, F).gap <= 1e-7 * f1);
    auto r9 = poisson_check(9, F);
    CHECK(r9.gap <= 1e-7 * f1);
    CHECK(std::abs(r9.lhs) > 0.1 * f1);
    CHECK_THROWS_AS(poisson_check(15, F, 0), ConvergenceError);
    CHECK_THROWS_AS(poisson_check(4, F), DomainError);
}

TEST_CASE("alternating sum identity") {
    auto r2 = alternating_sum_check(2.0);
    CHECK(std::abs(r2.lhs + kPi * kPi / 12) < 1e-12);
    CHECK(r2.gap <= 1e-9);
    CHECK(alternating_sum_check(3.0).gap <= 1e-9);
    CHECK(alternating_sum_check({1.5, 1.0}).gap <= 1e-8);
    CHECK_THROWS_AS(alternating_sum_check(1.0), DomainError);
}

TEST_CASE("orthogonality at X = 1e4") {
    MomentConfig cfg;
    SmoothWeight F(cfg.X);
    for (std::uint64_t m : {1ull, 9ull, 25ull}) {
        auto r = orthogonality_check(m, cfg);
        CHECK(r.square);
        CHECK(r.ratio > 0.95);
        CHECK(r.ratio < 1.05);
    }
    auto r3 = orthogonality_check(3, cfg);
    CHECK_FALSE(r3.square);
    CHECK(std::abs(r3.empirical) <= 0.05 * F.mellin1());
}

TEST_CASE("scaling fit reports failures per row") {
    MomentConfig cfg;
    auto rep = moment_scaling_fit({50.0, 2000.0, 4000.0}, cfg);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].failed);
    CHECK_FALSE(rep.rows[1].failed);
    CHECK(rep.rows[1].predicted > 0);
    CHECK(rep.fit_ok);
}
