#pragma once

// Three concrete unit balls: the Euclidean ball, the polydisc and the spectral
// ball of 2x2 matrices, with norms, frames, support functionals and samplers.

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"

namespace loewner_lab {

enum class BallKind { euclidean, polydisc, spectral2 };

inline const char* ball_kind_name(BallKind k) noexcept {
    switch (k) {
        case BallKind::euclidean: return "euclidean";
        case BallKind::polydisc: return "polydisc";
        case BallKind::spectral2: return "spectral2";
    }
    return "?";
}

inline BallKind ball_kind_from_name(const std::string& s) {
    if (s == "euclidean") return BallKind::euclidean;
    if (s == "polydisc") return BallKind::polydisc;
    if (s == "spectral2") return BallKind::spectral2;
    throw UsageError("unknown domain kind '" + s + "'");
}

/// Unit ball of one of the supported realizations. Indices are 0-based.
/// spectral2 uses coordinates (z1, z2, z3, z4) for the matrix [[z1, z3], [z4, z2]].
class BallGeometry {
public:
    static BallGeometry euclidean(std::size_t n) {
        if (n < 1 || n > kMaxDim) throw DomainError("euclidean: dimension must lie in [1, kMaxDim]");
        return BallGeometry(BallKind::euclidean, n);
    }

    static BallGeometry polydisc(std::size_t n) {
        if (n < 2 || n > kMaxDim) throw DomainError("polydisc: dimension must lie in [2, kMaxDim]");
        return BallGeometry(BallKind::polydisc, n);
    }

    static BallGeometry spectral2() { return BallGeometry(BallKind::spectral2, 4); }

    static BallGeometry from_kind(BallKind k, std::size_t n) {
        switch (k) {
            case BallKind::euclidean: return euclidean(n);
            case BallKind::polydisc: return polydisc(n);
            case BallKind::spectral2:
                if (n != 4) throw UsageError("spectral2 has dimension 4");
                return spectral2();
        }
        throw UsageError("unknown domain kind");
    }

    [[nodiscard]] BallKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return n_; }

    [[nodiscard]] std::size_t rank() const noexcept {
        switch (kind_) {
            case BallKind::euclidean: return 1;
            case BallKind::polydisc: return n_;
            case BallKind::spectral2: return 2;
        }
        return 0;
    }

    /// Coordinates carrying the frame; empty for the rank-one Euclidean ball.
    [[nodiscard]] std::vector<std::size_t> frame_coords() const {
        std::vector<std::size_t> out;
        if (kind_ == BallKind::euclidean) return out;
        for (std::size_t k = 0; k < rank(); ++k) out.push_back(k);
        return out;
    }

    [[nodiscard]] bool is_frame_coord(std::size_t k) const noexcept {
        return kind_ != BallKind::euclidean && k < rank();
    }

    /// Sharp constant multiplying d1(g) in the pure second-coefficient bound.
    [[nodiscard]] double shear_factor() const noexcept {
        return kind_ == BallKind::euclidean ? 3.0 * std::sqrt(3.0) / 2.0 : 1.0;
    }

    /// (i, j) admissible for shearing and coefficient bounds.
    [[nodiscard]] bool admissible_pair(std::size_t i, std::size_t j) const noexcept {
        if (i == j || i >= n_ || j >= n_) return false;
        if (kind_ == BallKind::euclidean) return true;
        return is_frame_coord(i) && is_frame_coord(j);
    }

    void require_pair(std::size_t i, std::size_t j, const char* what) const {
        if (!admissible_pair(i, j)) {
            throw DomainError(std::string(what) + ": index pair (" + std::to_string(i + 1) + ", " +
                              std::to_string(j + 1) + ") is not admissible for " + label());
        }
    }

    [[nodiscard]] std::string label() const {
        return std::string(ball_kind_name(kind_)) + "(n=" + std::to_string(n_) + ")";
    }

    friend bool operator==(const BallGeometry& a, const BallGeometry& b) noexcept {
        return a.kind_ == b.kind_ && a.n_ == b.n_;
    }

private:
    BallGeometry(BallKind k, std::size_t n) : kind_(k), n_(n) {}

    BallKind kind_;
    std::size_t n_;
};

namespace detail {

struct Mat2 {
    cplx a, b, c, d;  // [[a, b], [c, d]]
};

inline Mat2 as_matrix(const CVec& z) { return {z[0], z[2], z[3], z[1]}; }

struct SingularValues {
    double s1;
    double s2;
};

inline SingularValues singular_values(const Mat2& m) {
    const double fro2 = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
    const double det = std::abs(m.a * m.d - m.b * m.c);
    const double disc = std::sqrt(std::max(0.0, (fro2 - 2.0 * det) * (fro2 + 2.0 * det)));
    const double s1 = std::sqrt(0.5 * (fro2 + disc));
    const double s2 = s1 > 0.0 ? det / s1 : 0.0;
    return {s1, s2};
}

inline void require_dim(const BallGeometry& dom, const CVec& z, const char* what) {
    if (z.size() != dom.dim()) {
        throw DomainError(std::string(what) + ": vector has dimension " + std::to_string(z.size()) + ", domain " +
                          dom.label());
    }
}

}  // namespace detail

inline double norm(const BallGeometry& dom, const CVec& z) {
    detail::require_dim(dom, z, "norm");
    switch (dom.kind()) {
        case BallKind::euclidean: return l2_norm(z);
        case BallKind::polydisc: return sup_norm(z);
        case BallKind::spectral2: return detail::singular_values(detail::as_matrix(z)).s1;
    }
    return 0.0;
}

/// l(w) = sum_k coeffs[k] w[k].
struct LinearFunctional {
    CVec coeffs;

    cplx operator()(const CVec& w) const noexcept {
        cplx s = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * w[k];
        return s;
    }

    static LinearFunctional coordinate(std::size_t n, std::size_t k, cplx phase = 1.0) {
        LinearFunctional l{CVec(n)};
        l.coeffs[k] = phase;
        return l;
    }
};

/// Extreme points of T(z) used for membership testing. `degenerate` means the
/// extreme set is a continuum at z and the caller should resample.
struct SupportSet {
    std::vector<LinearFunctional> functionals;
    bool degenerate = false;
};

inline SupportSet support_functionals(const BallGeometry& dom, const CVec& z) {
    detail::require_dim(dom, z, "support_functionals");
    const std::size_t n = dom.dim();
    const double nz = norm(dom, z);
    if (!(nz > 0.0)) throw DomainError("support_functionals: z must be nonzero");
    SupportSet out;
    switch (dom.kind()) {
        case BallKind::euclidean: {
            LinearFunctional l{CVec(n)};
            for (std::size_t k = 0; k < n; ++k) l.coeffs[k] = std::conj(z[k]) / nz;
            out.functionals.push_back(l);
            break;
        }
        case BallKind::polydisc: {
            const double tol = 1e-12 * std::max(1.0, nz);
            for (std::size_t k = 0; k < n; ++k) {
                if (std::abs(z[k]) >= nz - tol) {
                    out.functionals.push_back(LinearFunctional::coordinate(n, k, std::conj(z[k]) / std::abs(z[k])));
                }
            }
            break;
        }
        case BallKind::spectral2: {
            const detail::Mat2 m = detail::as_matrix(z);
            const auto sv = detail::singular_values(m);
            const bool diagonal = m.b == cplx(0.0) && m.c == cplx(0.0);
            if (diagonal) {
                const double tol = 1e-10;
                for (std::size_t k = 0; k < 2; ++k) {
                    if (std::abs(z[k]) >= nz - tol) {
                        out.functionals.push_back(
                            LinearFunctional::coordinate(n, k, std::conj(z[k]) / std::abs(z[k])));
                    }
                }
                break;
            }
            if (sv.s1 - sv.s2 < 1e-10) {
                out.degenerate = true;
                break;
            }
            // Top eigenvector of A^H A = [[p, q], [conj(q), r]].
            const double p = std::norm(m.a) + std::norm(m.c);
            const double r = std::norm(m.b) + std::norm(m.d);
            const cplx q = std::conj(m.a) * m.b + std::conj(m.c) * m.d;
            const double lam = sv.s1 * sv.s1;
            cplx v1 = q;
            cplx v2 = lam - p;
            const cplx w1 = lam - r;
            const cplx w2 = std::conj(q);
            if (std::norm(w1) + std::norm(w2) > std::norm(v1) + std::norm(v2)) {
                v1 = w1;
                v2 = w2;
            }
            const double vn = std::sqrt(std::norm(v1) + std::norm(v2));
            v1 /= vn;
            v2 /= vn;
            const cplx u1 = (m.a * v1 + m.b * v2) / sv.s1;
            const cplx u2 = (m.c * v1 + m.d * v2) / sv.s1;
            LinearFunctional l{CVec(n)};
            l.coeffs[0] = std::conj(u1) * v1;
            l.coeffs[1] = std::conj(u2) * v2;
            l.coeffs[2] = std::conj(u1) * v2;
            l.coeffs[3] = std::conj(u2) * v1;
            out.functionals.push_back(l);
            break;
        }
    }
    return out;
}

/// Random point on the unit sphere of the domain.
inline CVec sample_sphere(const BallGeometry& dom, Rng& rng) {
    const std::size_t n = dom.dim();
    CVec z(n);
    switch (dom.kind()) {
        case BallKind::euclidean:
        case BallKind::spectral2: {
            for (auto& c : z) c = complex_gaussian(rng);
            const double nz = norm(dom, z);
            for (auto& c : z) c /= nz;
            break;
        }
        case BallKind::polydisc: {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            const std::size_t k = pick(rng);
            for (std::size_t m = 0; m < n; ++m) z[m] = m == k ? unit_phase(rng) : uniform_disc(rng, 0.999);
            break;
        }
    }
    return z;
}

/// Polydisc sphere point with two coordinates of modulus one (ties in T(z)).
inline CVec sample_polydisc_edge(const BallGeometry& dom, Rng& rng) {
    if (dom.kind() != BallKind::polydisc) throw DomainError("sample_polydisc_edge: polydisc only");
    const std::size_t n = dom.dim();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    CVec z(n);
    for (std::size_t m = 0; m < n; ++m) z[m] = (m == a || m == b) ? unit_phase(rng) : uniform_disc(rng, 0.999);
    return z;
}

}  // namespace loewner_lab
