#include "qtm/mainterm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtm {

namespace {

constexpr std::size_t kPrimeBlock = 256;

int degree(const MonomialKey& m) { return m[0] + m[1] + m[2]; }

// m = x^a y^b z^c with x = p^{-1/2-alpha}: m = p^{-s_m}
cplx monomial_exponent(const MonomialKey& m, const ShiftTriple& sh) {
    return 0.5 * degree(m) + double(m[0]) * sh.alpha + double(m[1]) * sh.beta + double(m[2]) * sh.gamma;
}

std::vector<std::uint32_t> odd_primes_upto(std::uint64_t P) {
    const auto& sv = default_sieve(static_cast<std::uint32_t>(std::max<std::uint64_t>(P + 1, 1000)));
    std::vector<std::uint32_t> out;
    for (auto p : sv.primes()) {
        if (p > P) break;
        if (p != 2) out.push_back(p);
    }
    return out;
}

struct LocalVars {
    cplx x, y, z;
};

LocalVars local_vars(double logp, const ShiftTriple& sh) {
    return {std::exp(-logp * (0.5 + sh.alpha)), std::exp(-logp * (0.5 + sh.beta)), std::exp(-logp * (0.5 + sh.gamma))};
}

// T and U closed forms
cplx T_val(const LocalVars& v) {
    return (1.0 + v.x * v.y + v.x * v.z + v.y * v.z) / ((1.0 - v.x * v.x) * (1.0 - v.y * v.y) * (1.0 - v.z * v.z));
}
cplx U_val(const LocalVars& v) {
    return (v.x + v.y + v.z + v.x * v.y * v.z) / ((1.0 - v.x * v.x) * (1.0 - v.y * v.y) * (1.0 - v.z * v.z));
}

int vp(std::uint64_t n, std::uint64_t p) {
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    return e;
}

std::uint64_t squarefree_part(const FactoredInteger& f) {
    std::uint64_t r = 1;
    for (auto [p, e] : f.factors)
        if (e % 2) r *= p;
    return r;
}

// exact local A_p at an odd prime, closed form
cplx a_local_closed(std::uint64_t p, int lp, const ShiftTriple& sh) {
    const double logp = std::log(double(p));
    auto v = local_vars(logp, sh);
    const double c = 1.0 / (1.0 + 1.0 / double(p));
    if (lp == 0) return 1.0 + c * (T_val(v) - 1.0);
    if (lp % 2 == 0) return c * T_val(v);
    return c * std::sqrt(double(p)) * U_val(v);
}

cplx residual_local(std::uint64_t p, int lp, const ShiftTriple& sh, const ArithFactorPlan& plan) {
    const double logp = std::log(double(p));
    cplx a = (p == 2) ? cplx(1.0) : a_local_closed(p, lp, sh);
    for (const auto& [m, e] : plan.exponents) {
        cplx mp = std::exp(-logp * monomial_exponent(m, sh));
        a *= std::pow(1.0 - mp, double(-e));
    }
    return a;
}

cplx zeta_part(const ArithFactorPlan& plan, const ShiftTriple& sh) {
    cplx z = 1.0;
    for (const auto& [m, e] : plan.exponents) {
        cplx s = monomial_exponent(m, sh);
        if (std::abs(s - 1.0) < 1e-3) throw DomainError("a_factor_product: zeta argument too close to the pole");
        z *= std::pow(zeta(s), double(-e));
    }
    return z;
}

// sum_{p > P} log(residual_p) to first order, plus a bound on what it neglects
std::pair<cplx, double> residual_tail(const ArithFactorPlan& plan, const ShiftTriple& sh) {
    cplx t = 0;
    // (c - 1)(T - 1) with c - 1 = -1/p + 1/p^2 - ...
    static const MonomialKey deg2[6] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    for (const auto& m : deg2) {
        cplx s = monomial_exponent(m, sh);
        t += -prime_zeta_tail(s + 1.0, plan.primes) + prime_zeta_tail(s + 2.0, plan.primes);
    }
    // unextracted monomials of the p-free part: log (1-m)^{e} ~ -e m
    for (const auto& [m, e] : plan.next_exponents) t += -double(e) * prime_zeta_tail(monomial_exponent(m, sh), plan.primes);
    double rho = std::max({std::abs(sh.alpha.real()), std::abs(sh.beta.real()), std::abs(sh.gamma.real())});
    double sig = 3.0 - 2.0 * rho;
    double P = double(plan.P);
    double bound = 10.0 * std::pow(P, 1.0 - sig) / ((sig - 1.0) * std::log(P));
    return {t, bound};
}

template <bool Parallel>
AFactorResult a_factor_product_impl(const ArithFactorPlan& plan, const ShiftTriple& sh) {
    AFactorResult r;
    r.zeta_part = zeta_part(plan, sh);
    const auto& pr = plan.primes;
    const std::size_t nb = (pr.size() + kPrimeBlock - 1) / kPrimeBlock;
    std::vector<cplx> block(nb, cplx(1.0));
    auto is_l_prime = [&](std::uint64_t p) {
        for (auto [q, e] : plan.l.factors)
            if (q == p) return true;
        return false;
    };
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::size_t b = 0; b < nb; ++b) {
        cplx acc = 1.0;
        const std::size_t hi = std::min(pr.size(), (b + 1) * kPrimeBlock);
        for (std::size_t i = b * kPrimeBlock; i < hi; ++i)
            if (!is_l_prime(pr[i])) acc *= residual_local(pr[i], 0, sh, plan);
        block[b] = acc;
    }
    cplx res = residual_local(2, 0, sh, plan);
    for (auto [p, e] : plan.l.factors) res *= residual_local(p, e, sh, plan);
    for (const auto& v : block) res *= v;
    auto [tail, bound] = residual_tail(plan, sh);
    res *= std::exp(tail);
    r.residual_part = res;
    r.tail_bound = bound;
    r.value = r.zeta_part * res;
    return r;
}

}  // namespace

ArithFactorPlan ArithFactorPlan::make(std::uint64_t l, int M, std::uint64_t P) {
    if (M < 3) throw DomainError("ArithFactorPlan: M must be >= 3");
    if (P < 1000) throw DomainError("ArithFactorPlan: P must be >= 1000");
    if (l == 0 || l % 2 == 0) throw DomainError("ArithFactorPlan: l must be odd and positive");
    static std::mutex mu;
    static std::map<int, std::pair<std::map<MonomialKey, long>, std::map<MonomialKey, long>>> cache;
    ArithFactorPlan plan;
    plan.M = M;
    plan.P = P;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(M);
        if (it == cache.end()) {
            auto lo = zeta_exponent_extract(ap_prime_closed(), M);
            auto hi = zeta_exponent_extract(ap_prime_closed(), M + 2);
            std::map<MonomialKey, long> next;
            for (const auto& [m, e] : hi)
                if (degree(m) >= M && e != 0) next[m] = e;
            std::map<MonomialKey, long> low;
            for (const auto& [m, e] : lo)
                if (e != 0) low[m] = e;
            it = cache.emplace(M, std::make_pair(low, next)).first;
        }
        plan.exponents = it->second.first;
        plan.next_exponents = it->second.second;
    }
    plan.l = factor_trial(l);
    plan.primes = odd_primes_upto(P);
    return plan;
}

AFactorResult a_factor_product(const ArithFactorPlan& plan, const ShiftTriple& shifts) {
    return a_factor_product_impl<true>(plan, shifts);
}

AFactorResult a_factor_product_serial(const ArithFactorPlan& plan, const ShiftTriple& shifts) {
    return a_factor_product_impl<false>(plan, shifts);
}

cplx prime_zeta(cplx s) {
    if (s.real() <= 1.0) throw DomainError("prime_zeta: Re s must exceed 1");
    cplx r = 0;
    const int K = int(std::ceil(60.0 / s.real())) + 2;
    for (int k = 1; k <= K; ++k) {
        int mu = mobius(static_cast<std::uint64_t>(k));
        if (!mu) continue;
        cplx ks = double(k) * s;
        cplx z = zeta(ks);
        r += double(mu) / k * std::log(z);
    }
    return r;
}

cplx prime_zeta_tail(cplx s, const std::vector<std::uint32_t>& primes_upto_P) {
    // primes_upto_P lists odd primes; p = 2 is added here
    cplx partial = std::exp(-s * std::log(2.0));
    for (auto p : primes_upto_P) partial += std::exp(-s * std::log(double(p)));
    return prime_zeta(s) - partial;
}

AFactorResult a_factor_direct(const ShiftTriple& sh, std::uint64_t l, std::uint64_t prime_cutoff) {
    for (int i = 0; i < 3; ++i)
        if (sh[i].real() < 0.05) throw ConvergenceError("a_factor_direct: needs Re(shift) >= 0.05");
    if (l == 0 || l % 2 == 0) throw DomainError("a_factor_direct: l must be odd");
    auto primes = odd_primes_upto(prime_cutoff);
    cplx logsum = 0;
    for (auto p : primes) {
        const double logp = std::log(double(p));
        const int lp = vp(l, p);
        const double c = 1.0 / (1.0 + 1.0 / double(p));
        // sum_j sigma(p^{lp%2 + 2j}) / p^j, flagged when p | n l
        cplx s = (lp == 0) ? cplx(1.0) : c * sigma_prime_power(logp, lp % 2, sh);
        for (int j = 1; j < 400; ++j) {
            cplx term = c * sigma_prime_power(logp, lp % 2 + 2 * j, sh) * std::exp(-double(j) * logp);
            s += term;
            if (std::abs(term) < 1e-18 * std::abs(s)) break;
        }
        logsum += std::log(s);
    }
    // tail: log A_p ~ c (T - 1) ~ sum_{deg 2} m (1 - 1/p + 1/p^2)
    static const MonomialKey deg2[6] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    cplx tail = 0;
    for (const auto& m : deg2) {
        cplx s = monomial_exponent(m, sh);
        tail += prime_zeta_tail(s, primes) - prime_zeta_tail(s + 1.0, primes) + prime_zeta_tail(s + 2.0, primes);
    }
    double rho = std::min({sh.alpha.real(), sh.beta.real(), sh.gamma.real()});
    double sig = 2.0 + 4.0 * rho;
    double P = double(prime_cutoff);
    AFactorResult r;
    r.value = std::exp(logsum + tail);
    r.tail_bound = 30.0 * std::pow(P, 1.0 - sig) / ((sig - 1.0) * std::log(P));
    r.zeta_part = 1.0;
    r.residual_part = r.value;
    return r;
}

cplx a_factor_nsum(const ShiftTriple& sh, std::uint64_t l, std::uint64_t n_cutoff) {
    if (l == 0 || l % 2 == 0) throw DomainError("a_factor_nsum: l must be odd");
    const auto lf = factor_trial(l);
    cplx s = 0;
    for (std::uint64_t n = 1; n <= n_cutoff; n += 2) {
        const auto nf = factor_trial(n);
        // sigma(l1 n^2) and prod_{p | l n} (1 + 1/p)^{-1}, both multiplicative
        std::map<std::uint64_t, int> ex;
        for (auto [p, e] : nf.factors) ex[p] += 2 * e;
        for (auto [p, e] : lf.factors) ex[p] += e % 2;
        cplx sig = 1.0;
        double flag = 1.0;
        for (auto [p, e] : ex) {
            if (e) sig *= sigma_prime_power(std::log(double(p)), e, sh);
            flag /= (1.0 + 1.0 / double(p));
        }
        s += sig * flag / double(n);
    }
    return s;
}

EightTermComponents eight_term_sum_detail(const MainTermSpec& spec, const ArithFactorPlan& plan) {
    if (!spec.weight) throw DomainError("eight_term_sum: weight missing");
    const auto& sh = spec.shifts;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(sh[i]) == 0.0) throw DomainError("eight_term_sum: shifts must be nonzero");
        if (std::abs(sh[i]) > 0.1 + 1e-12) throw DomainError("eight_term_sum: |shift| must be <= 0.1");
        for (int j = i + 1; j < 3; ++j)
            if (sh[i] == sh[j]) throw DomainError("eight_term_sum: shifts must be pairwise distinct");
    }
    const std::uint64_t l1 = squarefree_part(plan.l);
    const double zeta2_2 = kPi * kPi / 8.0;
    const double denom = 2.0 * zeta2_2 * std::sqrt(double(l1));
    EightTermComponents out;
    for (int mask = 0; mask < 8; ++mask) {
        // bit i set: epsilon_i = -1, delta_i = 1
        ShiftTriple e = sh;
        cplx gam = 1.0, shift_sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (!(mask >> i & 1)) continue;
            cplx v = sh[i];
            if (i == 0) e.alpha = -v;
            if (i == 1) e.beta = -v;
            if (i == 2) e.gamma = -v;
            gam *= gamma_ratio_shift(v);
            shift_sum += v;
        }
        cplx A = a_factor_product(plan, e).value;
        out.terms[mask] = A * gam * spec.weight->mellin(1.0 - shift_sum) / denom;
    }
    // fixed order, pairwise
    out.total = ((out.terms[0] + out.terms[1]) + (out.terms[2] + out.terms[3])) +
                ((out.terms[4] + out.terms[5]) + (out.terms[6] + out.terms[7]));
    return out;
}

cplx eight_term_sum(const MainTermSpec& spec, const ArithFactorPlan& plan) {
    return eight_term_sum_detail(spec, plan).total;
}

cplx circle_mean(const std::function<cplx(cplx)>& f, double r, int N) {
    if (N < 4 || N % 2) throw DomainError("circle_mean: N must be even and >= 4");
    // f is even and real on the real axis: use the nodes in the upper half
    // plane only, pairing theta with -theta (conjugates) and pi - theta (t -> -t)
    cplx s = 0;
    for (int k = 0; k < N; ++k) {
        cplx t = std::polar(r, 2.0 * kPi * (k + 0.5) / N);
        s += f(t);
    }
    return s / double(N);
}

MainTermResult main_term_at_zero(std::uint64_t l, const SmoothWeight& F, int M, std::uint64_t P, int nodes) {
    const auto plan = ArithFactorPlan::make(l, M, P);
    const double r = 0.02;
    auto along = [&](double a, double b, double c) {
        return [&, a, b, c](cplx t) {
            MainTermSpec spec{{t * a, t * b, t * c}, l, &F};
            return eight_term_sum(spec, plan);
        };
    };
    MainTermResult res;
    res.radius = r;
    res.nodes = nodes;
    const cplx v1 = circle_mean(along(1.0, 2.0, 3.0), r, nodes);
    const cplx v1h = circle_mean(along(1.0, 2.0, 3.0), r, nodes / 2);
    const cplx v2 = circle_mean(along(1.0, -1.5, 2.5), r, nodes);
    res.value = v1.real();
    res.imag_part = v1.imag();
    res.direction_gap = std::abs(v1 - v2) / std::abs(v1);
    res.error_estimate = std::max(std::abs(v1 - v1h), std::abs(v1 - v2));
    res.node_refinement_gap = std::abs(v1 - v1h) / std::abs(v1);
    if (res.direction_gap > 1e-4)
        throw ConvergenceError("main_term_at_zero: direction patterns disagree (relative gap " +
                               std::to_string(res.direction_gap) + ")");
    return res;
}

}  // namespace qtm
