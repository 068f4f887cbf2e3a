#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace loewner_lab {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

inline constexpr const char* kVersion = "1.0.0";

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest ambient dimension supported by the fixed-capacity vector types.
inline constexpr std::size_t kMaxDim = 8;

// Error taxonomy. Everything the library throws derives from LabError so the
// CLI can map failures onto exit codes.
class LabError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (|zeta| >= 1, z outside ball, t < s).
class DomainError : public LabError {
public:
    using LabError::LabError;
};

/// Numerical estimates disagree beyond tolerance, or an integrator left the ball.
class NumericalInstability : public LabError {
public:
    using LabError::LabError;
};

/// Operation not available for this input (custom g without boundary hook).
class Unsupported : public LabError {
public:
    using LabError::LabError;
};

/// Mathematical hypothesis of a construction is not met.
class PreconditionError : public LabError {
public:
    using LabError::LabError;
};

/// Malformed configuration or command line.
class UsageError : public LabError {
public:
    using LabError::LabError;
};

/// Complex n-vector with inline storage. Coordinates are taken with respect to
/// the fixed orthogonal basis of the ball realization.
class CVec {
public:
    CVec() = default;

    explicit CVec(std::size_t n) : n_(n) {
        if (n > kMaxDim) {
            throw DomainError("CVec: dimension " + std::to_string(n) + " exceeds kMaxDim");
        }
    }

    CVec(std::initializer_list<cplx> values) : CVec(values.size()) {
        std::copy(values.begin(), values.end(), v_.begin());
    }

    static CVec unit(std::size_t n, std::size_t k) {
        CVec e(n);
        e[k] = 1.0;
        return e;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    cplx& operator[](std::size_t k) noexcept { return v_[k]; }
    const cplx& operator[](std::size_t k) const noexcept { return v_[k]; }

    cplx* begin() noexcept { return v_.data(); }
    cplx* end() noexcept { return v_.data() + n_; }
    const cplx* begin() const noexcept { return v_.data(); }
    const cplx* end() const noexcept { return v_.data() + n_; }

    [[nodiscard]] std::span<const cplx> span() const noexcept { return {v_.data(), n_}; }

    CVec& operator+=(const CVec& o) noexcept {
        for (std::size_t k = 0; k < n_; ++k) v_[k] += o.v_[k];
        return *this;
    }
    CVec& operator-=(const CVec& o) noexcept {
        for (std::size_t k = 0; k < n_; ++k) v_[k] -= o.v_[k];
        return *this;
    }
    CVec& operator*=(cplx s) noexcept {
        for (std::size_t k = 0; k < n_; ++k) v_[k] *= s;
        return *this;
    }

    friend CVec operator+(CVec a, const CVec& b) noexcept { return a += b; }
    friend CVec operator-(CVec a, const CVec& b) noexcept { return a -= b; }
    friend CVec operator*(cplx s, CVec a) noexcept { return a *= s; }
    friend CVec operator*(CVec a, cplx s) noexcept { return a *= s; }
    friend CVec operator*(double s, CVec a) noexcept { return a *= cplx(s); }

    friend bool operator==(const CVec& a, const CVec& b) noexcept {
        return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
    }

private:
    std::array<cplx, kMaxDim> v_{};
    std::size_t n_ = 0;
};

inline double sup_norm(const CVec& v) noexcept {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

inline double l2_norm(const CVec& v) noexcept {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

/// Dense n x n complex matrix with inline storage (row-major).
class CMat {
public:
    CMat() = default;
    explicit CMat(std::size_t n) : n_(n) {
        if (n > kMaxDim) throw DomainError("CMat: dimension exceeds kMaxDim");
    }

    static CMat identity(std::size_t n) {
        CMat m(n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    cplx& operator()(std::size_t r, std::size_t c) noexcept { return a_[r * kMaxDim + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return a_[r * kMaxDim + c]; }

    CMat& operator+=(const CMat& o) noexcept {
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c) (*this)(r, c) += o(r, c);
        return *this;
    }
    CMat& operator*=(cplx s) noexcept {
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c) (*this)(r, c) *= s;
        return *this;
    }

    friend CVec operator*(const CMat& m, const CVec& v) noexcept {
        CVec out(m.n_);
        for (std::size_t r = 0; r < m.n_; ++r) {
            cplx s = 0.0;
            for (std::size_t c = 0; c < m.n_; ++c) s += m(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    /// Largest entry modulus; used for closeness checks against the identity.
    [[nodiscard]] double max_abs() const noexcept {
        double m = 0.0;
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c) m = std::max(m, std::abs((*this)(r, c)));
        return m;
    }

private:
    std::array<cplx, kMaxDim * kMaxDim> a_{};
    std::size_t n_ = 0;
};

inline CMat operator-(CMat a, const CMat& b) noexcept {
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a.size(); ++c) a(r, c) -= b(r, c);
    return a;
}

/// Solves A x = b by Gaussian elimination with partial pivoting. Returns false
/// when a pivot falls below `singular_tol` (relative to the largest entry).
inline bool solve_linear(CMat a, CVec b, CVec& x, double singular_tol = 1e-13) {
    const std::size_t n = a.size();
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        }
        if (std::abs(a(piv, col)) < singular_tol * scale) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a(r, col) / a(col, col);
            if (f == cplx(0.0)) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    x = CVec(n);
    for (std::size_t r = n; r-- > 0;) {
        cplx s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return true;
}

/// Uniform point in the closed disc of the given radius.
inline cplx uniform_disc(Rng& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double phi = 2.0 * kPi * u(rng);
    return std::polar(r, phi);
}

inline cplx unit_phase(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    return std::polar(1.0, u(rng));
}

inline cplx complex_gaussian(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace loewner_lab
