#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qtm/common.hpp"

namespace qtm {

struct FactoredInteger {
    std::uint64_t value = 1;
    std::vector<std::pair<std::uint64_t, int>> factors;  // (prime, exponent), increasing primes
};

// Least-prime-factor sieve with Moebius values. Immutable after construction.
class SquarefreeSieve {
public:
    explicit SquarefreeSieve(std::uint32_t limit = 20'000'000);

    std::uint32_t limit() const { return limit_; }
    int mobius(std::uint64_t n) const;
    std::uint32_t least_prime_factor(std::uint64_t n) const;
    bool is_squarefree(std::uint64_t n) const { return mobius(n) != 0; }
    // Sieve factorization up to the limit, trial division above it.
    FactoredInteger factor(std::uint64_t n) const;
    const std::vector<std::uint32_t>& primes() const { return primes_; }

private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> lpf_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint32_t> primes_;
};

// Shared default sieve, built lazily on first use (thread-safe static init).
const SquarefreeSieve& default_sieve(std::uint32_t min_limit = 1'000'000);

FactoredInteger factor_trial(std::uint64_t n);

int mobius(std::uint64_t n);

// m = m1 * m2, m1 squarefree, m2 a perfect square.
std::pair<std::uint64_t, std::uint64_t> squarefree_square_split(std::uint64_t m);

// Jacobi symbol (a/n) for odd positive n, by reciprocity.
int kronecker(std::int64_t a, std::int64_t n);

// chi_{8d}(n) for odd n; zero for even n.
inline int chi8d(std::int64_t d, std::int64_t n) {
    if ((n & 1) == 0) return 0;
    return kronecker(8 * d, n);
}

// sigma_{a,b,c}(p^k) = sum_{i+j+l=k} p^{-i a - j b - l c}
cplx sigma_prime_power(double log_p, int k, const ShiftTriple& s);
cplx sigma_shifted(const FactoredInteger& n, const ShiftTriple& s);
cplx sigma_shifted(std::uint64_t n, const ShiftTriple& s);

std::uint64_t euler_phi(const FactoredInteger& n);

}  // namespace qtm
