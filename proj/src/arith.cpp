#include "qtm/arith.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

namespace qtm {

SquarefreeSieve::SquarefreeSieve(std::uint32_t limit) : limit_(limit) {
    if (limit < 2) limit_ = 2;
    lpf_.assign(limit_ + 1, 0);
    mu_.assign(limit_ + 1, 1);
    mu_[0] = 0;
    for (std::uint32_t i = 2; i <= limit_; ++i) {
        if (lpf_[i] == 0) {
            lpf_[i] = i;
            primes_.push_back(i);
        }
        for (std::uint32_t p : primes_) {
            std::uint64_t ip = std::uint64_t(i) * p;
            if (p > lpf_[i] || ip > limit_) break;
            lpf_[ip] = p;
        }
    }
    for (std::uint32_t i = 2; i <= limit_; ++i) {
        std::uint32_t p = lpf_[i];
        std::uint32_t r = i / p;
        mu_[i] = (r % p == 0) ? 0 : static_cast<std::int8_t>(-mu_[r]);
    }
}

int SquarefreeSieve::mobius(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw DomainError("mobius: n outside [1, limit]");
    return mu_[n];
}

std::uint32_t SquarefreeSieve::least_prime_factor(std::uint64_t n) const {
    if (n < 2 || n > limit_) throw DomainError("least_prime_factor: n outside [2, limit]");
    return lpf_[n];
}

FactoredInteger factor_trial(std::uint64_t n) {
    if (n == 0) throw DomainError("factor: n = 0");
    FactoredInteger f;
    f.value = n;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) n /= p, ++e;
        f.factors.emplace_back(p, e);
    }
    if (n > 1) f.factors.emplace_back(n, 1);
    return f;
}

FactoredInteger SquarefreeSieve::factor(std::uint64_t n) const {
    if (n == 0) throw DomainError("factor: n = 0");
    if (n > limit_) return factor_trial(n);
    FactoredInteger f;
    f.value = n;
    while (n > 1) {
        std::uint32_t p = lpf_[n];
        int e = 0;
        while (n % p == 0) n /= p, ++e;
        f.factors.emplace_back(p, e);
    }
    return f;
}

const SquarefreeSieve& default_sieve(std::uint32_t min_limit) {
    static std::mutex mtx;
    // outgrown sieves are kept alive: callers may still hold references
    static std::vector<std::unique_ptr<SquarefreeSieve>> sieves;
    std::lock_guard<std::mutex> lock(mtx);
    if (sieves.empty() || sieves.back()->limit() < min_limit)
        sieves.push_back(std::make_unique<SquarefreeSieve>(std::max<std::uint32_t>(min_limit, 1'000'000)));
    return *sieves.back();
}

int mobius(std::uint64_t n) {
    if (n == 0) throw DomainError("mobius: n = 0");
    int m = 1;
    for (auto [p, e] : factor_trial(n).factors) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

std::pair<std::uint64_t, std::uint64_t> squarefree_square_split(std::uint64_t m) {
    if (m == 0) throw DomainError("squarefree_square_split: m = 0");
    std::uint64_t m1 = 1;
    for (auto [p, e] : factor_trial(m).factors)
        if (e & 1) m1 *= p;
    return {m1, m / m1};
}

int kronecker(std::int64_t a, std::int64_t n) {
    if (n <= 0 || (n & 1) == 0) throw DomainError("kronecker: n must be odd and positive");
    std::int64_t r = a % n;
    if (r < 0) r += n;
    std::uint64_t x = static_cast<std::uint64_t>(r), m = static_cast<std::uint64_t>(n);
    int t = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            std::uint64_t k = m & 7;
            if (k == 3 || k == 5) t = -t;
        }
        std::swap(x, m);
        if ((x & 3) == 3 && (m & 3) == 3) t = -t;
        x %= m;
    }
    return m == 1 ? t : 0;
}

cplx sigma_prime_power(double log_p, int k, const ShiftTriple& s) {
    const cplx u = std::exp(-s.alpha * log_p);
    const cplx v = std::exp(-s.beta * log_p);
    const cplx w = std::exp(-s.gamma * log_p);
    // h_m(v, w) = v^m + w h_{m-1}(v, w); then h_k(u, v, w) = sum_i u^i h_{k-i}(v, w)
    std::vector<cplx> h2(k + 1);
    cplx vm = 1.0;
    for (int m = 0; m <= k; ++m) {
        h2[m] = vm + (m > 0 ? w * h2[m - 1] : cplx(0));
        vm *= v;
    }
    cplx acc = 0, up = 1;
    for (int i = 0; i <= k; ++i) {
        acc += up * h2[k - i];
        up *= u;
    }
    return acc;
}

cplx sigma_shifted(const FactoredInteger& n, const ShiftTriple& s) {
    cplx r = 1.0;
    for (auto [p, e] : n.factors) r *= sigma_prime_power(std::log(double(p)), e, s);
    return r;
}

cplx sigma_shifted(std::uint64_t n, const ShiftTriple& s) {
    return sigma_shifted(factor_trial(n), s);
}

std::uint64_t euler_phi(const FactoredInteger& n) {
    std::uint64_t r = 1;
    for (auto [p, e] : n.factors) {
        r *= p - 1;
        for (int i = 1; i < e; ++i) r *= p;
    }
    return r;
}

}  // namespace qtm
