#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qtyper/gates.hpp"
#include "qtyper/program.hpp"
#include "qtyper/types.hpp"

namespace qtyper::oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct oracle_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All numeric tolerances and size caps in one place.
struct Tolerances {
    double equality = 1e-9;   // matrix/state comparison
    double drop = 1e-12;      // coefficients treated as zero
    uint32_t qubit_cap = 5;   // default dense cap; 7 for code checks
};

inline const Tolerances& default_tol() {
    static const Tolerances t{};
    return t;
}

inline void check_cap(uint32_t n, const Tolerances& tol) {
    if (n > tol.qubit_cap)
        throw oracle_error("dense oracle capped at " + std::to_string(tol.qubit_cap) +
                           " qubits (got " + std::to_string(n) + ")");
}

// ------------------------------------------------------------- matrices ---

/// Basis convention: qubit 0 is the leftmost tensor factor, i.e. the
/// most significant bit of the basis index.
inline bool basis_bit(size_t index, uint32_t q, uint32_t n) {
    return (index >> (n - 1 - q)) & 1;
}

inline Mat matrix_of(const PauliString& p, const Tolerances& tol = default_tol()) {
    const uint32_t n = p.n();
    check_cap(n, tol);
    const size_t dim = size_t(1) << n;
    Mat m = Mat::Zero(dim, dim);
    static const cplx iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (size_t k = 0; k < dim; ++k) {
        size_t row = k;
        cplx amp = iphase[p.phase & 3];
        for (uint32_t q = 0; q < n; ++q) {
            bool bit = basis_bit(k, q, n);
            switch (p.w.letter(q)) {
                case Letter::I: break;
                case Letter::X: row ^= size_t(1) << (n - 1 - q); break;
                case Letter::Z:
                    if (bit)
                        amp = -amp;
                    break;
                case Letter::Y:
                    row ^= size_t(1) << (n - 1 - q);
                    amp *= bit ? cplx(0, -1) : cplx(0, 1);
                    break;
            }
        }
        m(row, k) += amp;
    }
    return m;
}

inline Mat matrix_of(const AdditiveOperator& a, const Tolerances& tol = default_tol()) {
    check_cap(a.n, tol);
    const size_t dim = size_t(1) << a.n;
    Mat m = Mat::Zero(dim, dim);
    for (auto& t : a.terms)
        m += t.c.value() * matrix_of(PauliString(t.word, 0), tol);
    return m;
}

inline Mat gate_matrix(OpCode code) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    Mat m;
    switch (code) {
        case OpCode::I: m = Mat::Identity(2, 2); return m;
        case OpCode::X: m.resize(2, 2); m << 0, 1, 1, 0; return m;
        case OpCode::Y: m.resize(2, 2); m << 0, -i, i, 0; return m;
        case OpCode::Z: m.resize(2, 2); m << 1, 0, 0, -1; return m;
        case OpCode::H: m.resize(2, 2); m << s, s, s, -s; return m;
        case OpCode::S: m.resize(2, 2); m << 1, 0, 0, i; return m;
        case OpCode::SDG: m.resize(2, 2); m << 1, 0, 0, -i; return m;
        case OpCode::T: m.resize(2, 2); m << 1, 0, 0, std::exp(i * (M_PI / 4)); return m;
        case OpCode::TDG: m.resize(2, 2); m << 1, 0, 0, std::exp(-i * (M_PI / 4)); return m;
        default: throw oracle_error("no 2x2 matrix for a two-qubit opcode");
    }
}

/// Apply one primitive gate to a state vector in place.
inline void apply_op(Vec& psi, const Op& op, uint32_t n) {
    if (op.meas)
        throw oracle_error("apply_op cannot apply a measurement");
    const size_t dim = size_t(1) << n;
    if (op.code == OpCode::CNOT || op.code == OpCode::CZ) {
        const uint32_t c = op.qubits[0], t = op.qubits[1];
        Vec out = Vec::Zero(dim);
        for (size_t k = 0; k < dim; ++k) {
            bool cb = basis_bit(k, c, n), tb = basis_bit(k, t, n);
            if (op.code == OpCode::CNOT) {
                size_t dst = cb ? k ^ (size_t(1) << (n - 1 - t)) : k;
                out(dst) += psi(k);
            } else {
                out(k) += (cb && tb) ? -psi(k) : psi(k);
            }
        }
        psi = out;
        return;
    }
    Mat g = gate_matrix(op.code);
    const uint32_t q = op.qubits[0];
    const size_t mask = size_t(1) << (n - 1 - q);
    for (size_t k = 0; k < dim; ++k) {
        if (k & mask)
            continue;
        cplx a = psi(k), b = psi(k | mask);
        psi(k) = g(0, 0) * a + g(0, 1) * b;
        psi(k | mask) = g(1, 0) * a + g(1, 1) * b;
    }
}

/// Full unitary of a measurement-free program (ops applied in order).
inline Mat matrix_of(const Program& p, const Tolerances& tol = default_tol()) {
    check_cap(p.n, tol);
    const size_t dim = size_t(1) << p.n;
    Mat u = Mat::Identity(dim, dim);
    for (auto& op : p.ops) {
        if (op.meas)
            throw oracle_error("program contains a measurement; no single unitary exists");
        for (size_t col = 0; col < dim; ++col) {
            Vec v = u.col(col);
            apply_op(v, op, p.n);
            u.col(col) = v;
        }
    }
    return u;
}

// ------------------------------------------------------- decomposition ---

struct NumericTerm {
    PauliBits word;
    cplx c;
};

/**
 * Pauli-basis coefficients tr(P m) / 2^n for all 4^n words, with
 * magnitudes below the drop tolerance removed.  Each word is a signed
 * permutation, so one coefficient costs O(2^n).
 */
inline std::vector<NumericTerm> pauli_decompose(const Mat& m, uint32_t n,
                                                const Tolerances& tol = default_tol()) {
    check_cap(n, tol);
    const size_t dim = size_t(1) << n;
    std::vector<NumericTerm> out;
    PauliBits w(n);
    // Iterate words in mixed-radix order over letters.
    const size_t total = size_t(1) << (2 * n);
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        for (uint32_t q = 0; q < n; ++q) {
            w.set_letter(q, static_cast<Letter>(rem & 3));
            rem >>= 2;
        }
        cplx tr = 0;
        for (size_t k = 0; k < dim; ++k) {
            size_t row = k;
            cplx amp = 1;
            for (uint32_t q = 0; q < n; ++q) {
                bool bit = basis_bit(k, q, n);
                switch (w.letter(q)) {
                    case Letter::I: break;
                    case Letter::X: row ^= size_t(1) << (n - 1 - q); break;
                    case Letter::Z:
                        if (bit)
                            amp = -amp;
                        break;
                    case Letter::Y:
                        row ^= size_t(1) << (n - 1 - q);
                        amp *= bit ? cplx(0, -1) : cplx(0, 1);
                        break;
                }
            }
            tr += amp * m(k, row);
        }
        cplx coeff = tr / double(dim);
        if (std::abs(coeff) > tol.drop)
            out.push_back({w, coeff});
    }
    return out;
}

/// Nearest exact ring element within the equality tolerance, smallest
/// denominator exponent first (which also makes the result canonical).
inline std::optional<RingCoeff> exactify(double x, const Tolerances& tol = default_tol()) {
    static const double rt2 = std::sqrt(2.0);
    for (uint32_t k = 0; k <= 12; ++k) {
        const double scaled = std::ldexp(x, int(k));
        const double bound = std::max(tol.equality * std::ldexp(1.0, int(k)), 1e-9);
        const int64_t bmax = int64_t(std::abs(scaled) / rt2) + 2;
        for (int64_t b = -bmax; b <= bmax; ++b) {
            int64_t a = std::llround(scaled - double(b) * rt2);
            if (std::abs(double(a) + double(b) * rt2 - scaled) <= bound) {
                RingCoeff c(a, b, k);
                if (std::abs(c.value() - x) <= tol.equality)
                    return c;
            }
        }
    }
    return std::nullopt;
}

/// Exactified hermitian decomposition; nullopt when any coefficient is
/// non-real or outside the ring.
inline std::optional<AdditiveOperator> exact_additive_of(const Mat& m, uint32_t n,
                                                         const Tolerances& tol = default_tol()) {
    AdditiveOperator out(n);
    for (auto& t : pauli_decompose(m, n, tol)) {
        if (std::abs(t.c.imag()) > tol.equality)
            return std::nullopt;
        auto c = exactify(t.c.real(), tol);
        if (!c)
            return std::nullopt;
        out.terms.push_back({t.word, *c});
    }
    std::sort(out.terms.begin(), out.terms.end());
    return out;
}

// ----------------------------------------------------------- judgments ---

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

/// Checks U mat(a) U^dag == mat(b) within tolerance.
inline bool verify_arrow(const Mat& u, const AdditiveOperator& a, const AdditiveOperator& b,
                         const Tolerances& tol = default_tol()) {
    Mat lhs = u * matrix_of(a, tol) * u.adjoint();
    return max_abs(lhs - matrix_of(b, tol)) <= tol.equality;
}

inline bool verify_arrow(const Program& p, const AdditiveOperator& a, const AdditiveOperator& b,
                         const Tolerances& tol = default_tol()) {
    return verify_arrow(matrix_of(p, tol), a, b, tol);
}

/// Projector onto a branch: product of (I + mat(term)) / 2.
inline Mat projector_of(const Branch& b, const Tolerances& tol = default_tol()) {
    check_cap(b.n, tol);
    const size_t dim = size_t(1) << b.n;
    Mat pi = Mat::Identity(dim, dim);
    for (auto& t : b.terms)
        pi = pi * (Mat::Identity(dim, dim) + matrix_of(t, tol)) / 2.0;
    return pi;
}

/// Dimension of the branch's joint +1 eigenspace.
inline int branch_rank(const Branch& b, const Tolerances& tol = default_tol()) {
    Mat pi = projector_of(b, tol);
    return int(std::lround(pi.trace().real()));
}

/// A unit state inhabiting the branch, when one exists.
inline std::optional<Vec> state_of(const Branch& b, const Tolerances& tol = default_tol()) {
    Mat pi = projector_of(b, tol);
    Eigen::SelfAdjointEigenSolver<Mat> es(pi);
    Eigen::Index best;
    es.eigenvalues().maxCoeff(&best);
    if (es.eigenvalues()(best) < 0.5)
        return std::nullopt;
    Vec v = es.eigenvectors().col(best);
    // Residuals confirm it satisfies every term exactly.
    for (auto& t : b.terms)
        if ((matrix_of(t, tol) * v - v).cwiseAbs().maxCoeff() > 1e-7)
            return std::nullopt;
    return v.normalized();
}

inline bool verify_inhabitation(const Vec& s, const QType& t,
                                const Tolerances& tol = default_tol()) {
    for (auto& b : t.branches) {
        bool all = true;
        for (auto& term : b.terms) {
            Vec proj = (s + matrix_of(term, tol) * s) / 2.0;
            if ((proj - s).cwiseAbs().maxCoeff() > tol.equality) {
                all = false;
                break;
            }
        }
        if (all)
            return true;
    }
    return false;
}

/// Count of singular values above threshold across the (K, rest) cut.
inline int schmidt_rank(const Vec& s, const std::vector<uint32_t>& K, uint32_t n,
                        const Tolerances& tol = default_tol()) {
    check_cap(n, tol);
    std::vector<bool> in_k(n, false);
    for (uint32_t q : K)
        in_k[q] = true;
    uint32_t kn = uint32_t(K.size());
    Mat resh = Mat::Zero(size_t(1) << kn, size_t(1) << (n - kn));
    for (size_t idx = 0; idx < size_t(s.size()); ++idx) {
        size_t r = 0, c = 0;
        for (uint32_t q = 0; q < n; ++q) {
            bool bit = basis_bit(idx, q, n);
            if (in_k[q])
                r = (r << 1) | size_t(bit);
            else
                c = (c << 1) | size_t(bit);
        }
        resh(r, c) = s(idx);
    }
    Eigen::JacobiSVD<Mat> svd(resh);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-9)
            ++rank;
    return rank;
}

struct BornResult {
    double p_plus = 0, p_minus = 0;
    std::optional<Vec> post_plus, post_minus;
};

/// Z-basis measurement of one qubit: probabilities and renormalized
/// post-states (absent for zero-probability outcomes).
inline BornResult born_measure(const Vec& s, uint32_t q, uint32_t n,
                               const Tolerances& tol = default_tol()) {
    check_cap(n, tol);
    BornResult r;
    Vec plus = s, minus = s;
    for (size_t idx = 0; idx < size_t(s.size()); ++idx) {
        if (basis_bit(idx, q, n))
            plus(idx) = 0;
        else
            minus(idx) = 0;
    }
    r.p_plus = plus.squaredNorm();
    r.p_minus = minus.squaredNorm();
    if (r.p_plus > tol.drop)
        r.post_plus = plus / std::sqrt(r.p_plus);
    if (r.p_minus > tol.drop)
        r.post_minus = minus / std::sqrt(r.p_minus);
    return r;
}

// ------------------------------------------- additive type of a gate ---

/**
 * Reconstruct the additive type of a hermitian gate from its
 * conjugation action: rebuild the unitary column by column (the image
 * of |x> is image(X^x) applied to the image of |0...0>), cancel the
 * global phase, and exactify the Pauli decomposition.  The sign
 * convention makes the first nonzero coefficient positive.
 */
inline std::optional<AdditiveOperator> reconstruct_additive_type(
    const GateSemantics& g, const Tolerances& tol = default_tol()) {
    check_cap(g.n, tol);
    const size_t dim = size_t(1) << g.n;

    Branch zbasis(g.n);
    for (uint32_t q = 0; q < g.n; ++q)
        zbasis.terms.push_back(g.zimg[q]);
    auto psi0 = state_of(zbasis, tol);
    if (!psi0)
        return std::nullopt;

    Mat u(dim, dim);
    for (size_t x = 0; x < dim; ++x) {
        PauliBits w(g.n);
        for (uint32_t q = 0; q < g.n; ++q)
            if (basis_bit(x, q, g.n))
                w.set_letter(q, Letter::X);
        u.col(x) = matrix_of(g.image_of_word(w), tol) * *psi0;
    }

    // U is determined up to phase; hermitian means U^2 is that phase
    // squared times I.
    Mat u2 = u * u;
    cplx lambda = u2.trace() / double(dim);
    if (max_abs(u2 - lambda * Mat::Identity(dim, dim)) > 1e-7 ||
        std::abs(std::abs(lambda) - 1.0) > 1e-7)
        return std::nullopt;
    cplx phase = std::sqrt(lambda);
    Mat h = u / phase;
    if (max_abs(h - h.adjoint()) > 1e-7) {
        h *= cplx(0, 1);  // the other square root
        if (max_abs(h - Mat(h.adjoint())) > 1e-7)
            return std::nullopt;
    }

    auto result = exact_additive_of(h, g.n, tol);
    if (!result)
        return std::nullopt;
    if (!result->terms.empty() && result->terms[0].c.value() < 0)
        *result = -*result;
    return result;
}

}  // namespace qtyper::oracle
