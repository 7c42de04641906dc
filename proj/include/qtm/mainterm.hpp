#pragma once

#include <functional>
#include <map>
#include <vector>

#include "qtm/arith.hpp"
#include "qtm/common.hpp"
#include "qtm/special.hpp"
#include "qtm/symbolic.hpp"

namespace qtm {

// Plan for the zeta-extracted product representation of A_{a,b,c}(l).
// M counts total degree in x = p^{-1/2-alpha}: every monomial of degree <= M-1
// of the generic local factor is pulled out as a zeta factor.
struct ArithFactorPlan {
    int M = 4;
    std::uint64_t P = 10'000;
    std::map<MonomialKey, long> exponents;       // degree 1..M-1
    std::map<MonomialKey, long> next_exponents;  // degree M..M+1, feeds the tail estimate
    FactoredInteger l;
    std::vector<std::uint32_t> primes;  // odd primes <= P

    static ArithFactorPlan make(std::uint64_t l, int M = 4, std::uint64_t P = 10'000);
};

struct AFactorResult {
    cplx value;
    double tail_bound = 0;  // estimated size of what the tail correction neglects
    cplx zeta_part;
    cplx residual_part;
};

// Parallel over prime blocks; the block partition is fixed so the result does
// not depend on the thread count.
AFactorResult a_factor_product(const ArithFactorPlan& plan, const ShiftTriple& shifts);
AFactorResult a_factor_product_serial(const ArithFactorPlan& plan, const ShiftTriple& shifts);

// Oracle: Euler product of local factors summed term by term from the
// defining sigma sums, over p <= prime_cutoff, plus a prime-zeta tail.
// Requires Re(shift) >= 0.05.
AFactorResult a_factor_direct(const ShiftTriple& shifts, std::uint64_t l, std::uint64_t prime_cutoff = 1'000'000);
// Literal truncated n-sum, for small sanity checks only (converges slowly).
cplx a_factor_nsum(const ShiftTriple& shifts, std::uint64_t l, std::uint64_t n_cutoff);

// P(s) = sum_p p^{-s}, Re s > 1, via sum_k mu(k)/k log zeta(ks).
cplx prime_zeta(cplx s);
// sum_{p > P} p^{-s}; the list holds the odd primes <= P
cplx prime_zeta_tail(cplx s, const std::vector<std::uint32_t>& primes_upto_P);

struct MainTermSpec {
    ShiftTriple shifts;
    std::uint64_t l = 1;
    const SmoothWeight* weight = nullptr;
};

struct EightTermComponents {
    std::array<cplx, 8> terms{};
    cplx total;
};

EightTermComponents eight_term_sum_detail(const MainTermSpec& spec, const ArithFactorPlan& plan);
cplx eight_term_sum(const MainTermSpec& spec, const ArithFactorPlan& plan);
inline cplx eight_term_sum(const MainTermSpec& spec) {
    return eight_term_sum(spec, ArithFactorPlan::make(spec.l));
}

struct MainTermResult {
    double value = 0;
    double error_estimate = 0;
    double imag_part = 0;
    double direction_gap = 0;       // relative gap between the two direction patterns
    double node_refinement_gap = 0;  // relative gap between N and N/2 nodes
    double radius = 0;
    int nodes = 0;
};

// Shift -> 0 limit of the eight-term sum. The sum is an entire, even function
// of t along shifts t*(1,2,3), so its value at t = 0 is the mean over a circle
// |t| = r (trapezoid, exponentially convergent). Cross-checked along
// t*(1,-1.5,2.5) and against N/2 nodes.
MainTermResult main_term_at_zero(std::uint64_t l, const SmoothWeight& F, int M = 4, std::uint64_t P = 10'000,
                                 int nodes = 32);

// (1/N) sum_k f(r e^{2 pi i (k+1/2)/N})
cplx circle_mean(const std::function<cplx(cplx)>& f, double r, int N);

}  // namespace qtm
