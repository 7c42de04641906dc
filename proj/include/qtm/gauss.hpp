#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtm/arith.hpp"

namespace qtm {

// Exact value coeff * sqrt(radicand), radicand squarefree and odd.
struct GaussSumValue {
    std::int64_t coeff = 0;
    std::uint64_t radicand = 1;

    double to_double() const;
    std::string to_string() const;
    bool operator==(const GaussSumValue& o) const {
        return coeff == o.coeff && (coeff == 0 || radicand == o.radicand);
    }
};

GaussSumValue operator*(const GaussSumValue& a, const GaussSumValue& b);

// G_k(n) by direct summation, prefactor included.
cplx gauss_direct(std::int64_t k, std::int64_t n);

// G_k(p^beta) from the five-case prime-power table.
GaussSumValue gauss_prime_power(std::int64_t k, std::uint64_t p, int beta);
GaussSumValue gauss_formula(std::int64_t k, const FactoredInteger& n);
GaussSumValue gauss_formula(std::int64_t k, std::int64_t n);

struct GaussMismatch {
    std::int64_t k, n;
    cplx direct;
    double formula;
};

struct GaussCrosscheckReport {
    std::uint64_t count = 0;
    double max_deviation = 0.0;  // relative, |d - f| / (1 + |f|)
    std::vector<GaussMismatch> failures;
    bool pass() const { return failures.empty(); }
};

GaussCrosscheckReport gauss_crosscheck(std::int64_t limit_n, std::int64_t limit_k, double tol = 1e-9);

}  // namespace qtm
