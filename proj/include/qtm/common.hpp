#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qtm {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shift parameters (alpha, beta, gamma).
struct ShiftTriple {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx gamma{0.0, 0.0};

    cplx operator[](int i) const { return i == 0 ? alpha : (i == 1 ? beta : gamma); }
    ShiftTriple negated() const { return {-alpha, -beta, -gamma}; }
    ShiftTriple plus(cplx s) const { return {alpha + s, beta + s, gamma + s}; }
    // Enforced safety box |Re| <= 0.25 used by the numeric engines.
    void check_box(double bound = 0.25) const {
        for (int i = 0; i < 3; ++i)
            if (std::abs((*this)[i].real()) > bound)
                throw DomainError("shift real part outside |Re| <= " + std::to_string(bound));
    }
};

}  // namespace qtm
