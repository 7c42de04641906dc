#include "qtm/gauss.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qtm {

double GaussSumValue::to_double() const { return double(coeff) * std::sqrt(double(radicand)); }

std::string GaussSumValue::to_string() const {
    std::ostringstream os;
    if (coeff == 0 || radicand == 1) {
        os << coeff;
    } else {
        os << coeff << "*sqrt(" << radicand << ")";
    }
    return os.str();
}

GaussSumValue operator*(const GaussSumValue& a, const GaussSumValue& b) {
    if (a.coeff == 0 || b.coeff == 0) return {0, 1};
    // radicands are squarefree; sqrt(r1) sqrt(r2) = g sqrt(r1 r2 / g^2) with g = gcd
    std::uint64_t g = std::gcd(a.radicand, b.radicand);
    return {a.coeff * b.coeff * std::int64_t(g), (a.radicand / g) * (b.radicand / g)};
}

cplx gauss_direct(std::int64_t k, std::int64_t n) {
    if (n <= 0 || (n & 1) == 0) throw DomainError("gauss_direct: n must be odd and positive");
    if (n > 1'000'000) throw DomainError("gauss_direct: n beyond brute-force range");
    std::int64_t kr = k % n;
    if (kr < 0) kr += n;
    cplx s = 0;
    for (std::int64_t a = 0; a < n; ++a) {
        int c = kronecker(a, n);
        if (c == 0) continue;
        // reduce a*k mod n before scaling to keep the phase accurate
        std::int64_t r = (a * kr) % n;
        double th = 2.0 * kPi * double(r) / double(n);
        s += double(c) * cplx(std::cos(th), std::sin(th));
    }
    const int m1 = kronecker(-1, n);
    const cplx pre = cplx(0.5, -0.5) + double(m1) * cplx(0.5, 0.5);
    return pre * s;
}

GaussSumValue gauss_prime_power(std::int64_t k, std::uint64_t p, int beta) {
    if (p == 2) throw DomainError("gauss_prime_power: even modulus");
    if (beta == 0) return {1, 1};
    const bool k_zero = (k == 0);
    int alpha = 0;
    std::int64_t kred = k;
    if (!k_zero) {
        while (kred % std::int64_t(p) == 0) kred /= std::int64_t(p), ++alpha;
    }
    auto ipow = [](std::uint64_t b, int e) {
        std::int64_t r = 1;
        for (int i = 0; i < e; ++i) r *= std::int64_t(b);
        return r;
    };
    if (k_zero || beta <= alpha) {
        if (beta & 1) return {0, 1};
        return {ipow(p, beta) - ipow(p, beta - 1), 1};  // phi(p^beta)
    }
    if (beta == alpha + 1) {
        if ((beta & 1) == 0) return {-ipow(p, alpha), 1};
        return {kronecker(kred, std::int64_t(p)) * ipow(p, alpha), p};
    }
    return {0, 1};
}

GaussSumValue gauss_formula(std::int64_t k, const FactoredInteger& n) {
    GaussSumValue v{1, 1};
    for (auto [p, e] : n.factors) {
        if (p == 2) throw DomainError("gauss_formula: n must be odd");
        v = v * gauss_prime_power(k, p, e);
        if (v.coeff == 0) break;
    }
    return v;
}

GaussSumValue gauss_formula(std::int64_t k, std::int64_t n) {
    if (n <= 0 || (n & 1) == 0) throw DomainError("gauss_formula: n must be odd and positive");
    return gauss_formula(k, factor_trial(std::uint64_t(n)));
}

GaussCrosscheckReport gauss_crosscheck(std::int64_t limit_n, std::int64_t limit_k, double tol) {
    GaussCrosscheckReport rep;
    for (std::int64_t n = 1; n <= limit_n; n += 2) {
        const FactoredInteger fn = factor_trial(std::uint64_t(n));
        for (std::int64_t k = -limit_k; k <= limit_k; ++k) {
            const cplx d = gauss_direct(k, n);
            const double f = gauss_formula(k, fn).to_double();
            const double dev = std::abs(d - f) / (1.0 + std::abs(f));
            ++rep.count;
            if (dev > rep.max_deviation) rep.max_deviation = dev;
            if (dev > tol) rep.failures.push_back({k, n, d, f});
        }
    }
    return rep;
}

}  // namespace qtm
