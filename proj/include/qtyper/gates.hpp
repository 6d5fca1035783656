#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtyper/additive.hpp"

namespace qtyper {

struct semantics_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * The conjugation action of a unitary on the Pauli group, given by the
 * images of the generators X_j and Z_j.  Images of arbitrary words are
 * derived by factoring: the image of a product is the product of the
 * images, and Y_j = i X_j Z_j.  Derived images are memoized.
 */
struct GateSemantics {
    std::string name;
    uint32_t n = 0;
    std::vector<AdditiveOperator> ximg, zimg;

    GateSemantics() = default;
    GateSemantics(std::string name_, uint32_t n_) : name(std::move(name_)), n(n_) {
        ximg.resize(n);
        zimg.resize(n);
        for (uint32_t q = 0; q < n; ++q) {
            ximg[q] = AdditiveOperator::from_pauli(PauliString::single(n, q, Letter::X));
            zimg[q] = AdditiveOperator::from_pauli(PauliString::single(n, q, Letter::Z));
        }
    }

    bool is_clifford() const {
        for (auto& m : ximg)
            if (!m.is_single_pauli())
                return false;
        for (auto& m : zimg)
            if (!m.is_single_pauli())
                return false;
        return true;
    }

    /// Image of an arbitrary phase-free word under conjugation.
    const AdditiveOperator& image_of_word(const PauliBits& w) const {
        auto it = cache_.find(w);
        if (it != cache_.end())
            return it->second;
        AdditiveOperator img = compute_image(w);
        return cache_.emplace(w, std::move(img)).first->second;
    }

    AdditiveOperator image_of_string(const PauliString& p) const {
        if (!p.is_hermitian())
            throw semantics_error("cannot conjugate a non-hermitian Pauli string");
        AdditiveOperator m = image_of_word(p.w);
        return p.sign() < 0 ? -m : m;
    }

    AdditiveOperator image_of_operator(const AdditiveOperator& m) const {
        std::map<PauliBits, RingCoeff> acc;
        for (auto& t : m.terms)
            for (auto& u : image_of_word(t.word).terms)
                acc[u.word] += t.c * u.c;
        return AdditiveOperator::from_map(m.n, acc);
    }

    /**
     * Check the defining relations of a conjugation action: every
     * generator image squares to the identity, images of X_j and Z_j
     * anticommute, and images of generators on distinct qubits commute.
     */
    bool is_valid() const {
        if (ximg.size() != n || zimg.size() != n)
            return false;
        for (uint32_t q = 0; q < n; ++q) {
            if (ximg[q].n != n || zimg[q].n != n)
                return false;
            if (!ximg[q].is_valid() || !zimg[q].is_valid())
                return false;
            ComplexExpansion xz = ximg[q].complex() * zimg[q].complex();
            ComplexExpansion zx = zimg[q].complex() * ximg[q].complex();
            if (!(xz + zx).is_zero())
                return false;
        }
        auto commute_gen = [&](const AdditiveOperator& a, const AdditiveOperator& b) {
            return additive_commute(a, b);
        };
        for (uint32_t p = 0; p < n; ++p)
            for (uint32_t q = p + 1; q < n; ++q) {
                if (!commute_gen(ximg[p], ximg[q]) || !commute_gen(ximg[p], zimg[q]) ||
                    !commute_gen(zimg[p], ximg[q]) || !commute_gen(zimg[p], zimg[q]))
                    return false;
            }
        return true;
    }

  private:
    mutable std::map<PauliBits, AdditiveOperator> cache_;

    AdditiveOperator compute_image(const PauliBits& w) const {
        if (w.is_identity())
            return AdditiveOperator::identity(n);
        uint32_t q = w.support().front();
        Letter l = w.letter(q);
        PauliBits rest = w;
        rest.set_letter(q, Letter::I);

        ComplexExpansion head(n);
        switch (l) {
            case Letter::X: head = ximg[q].complex(); break;
            case Letter::Z: head = zimg[q].complex(); break;
            case Letter::Y:
                // Y = i X Z, and conjugation is multiplicative.
                head = (ximg[q].complex() * zimg[q].complex())
                           .scaled({RingCoeff::zero(), RingCoeff::one()});
                break;
            case Letter::I: break;
        }
        if (rest.is_identity())
            return certify_real(head);
        return certify_real(head * image_of_word(rest).complex());
    }

    AdditiveOperator certify_real(const ComplexExpansion& e) const {
        std::map<PauliBits, RingCoeff> acc;
        for (auto& [w, c] : e.terms) {
            if (!c.is_real())
                throw semantics_error("conjugation image of a hermitian word must be hermitian");
            acc[w] += c.re;
        }
        return AdditiveOperator::from_map(n, acc);
    }
};

// ------------------------------------------------------------- builtins ---

enum class OpCode { I, X, Y, Z, H, S, SDG, T, TDG, CNOT, CZ };

inline unsigned opcode_arity(OpCode c) {
    return (c == OpCode::CNOT || c == OpCode::CZ) ? 2 : 1;
}

inline const char* opcode_name(OpCode c) {
    switch (c) {
        case OpCode::I: return "I";
        case OpCode::X: return "X";
        case OpCode::Y: return "Y";
        case OpCode::Z: return "Z";
        case OpCode::H: return "H";
        case OpCode::S: return "S";
        case OpCode::SDG: return "Sdg";
        case OpCode::T: return "T";
        case OpCode::TDG: return "Tdg";
        case OpCode::CNOT: return "CNOT";
        case OpCode::CZ: return "CZ";
    }
    return "?";
}

inline std::optional<OpCode> opcode_by_name(std::string s) {
    for (auto& ch : s)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (s == "I" || s == "ID") return OpCode::I;
    if (s == "X") return OpCode::X;
    if (s == "Y") return OpCode::Y;
    if (s == "Z") return OpCode::Z;
    if (s == "H") return OpCode::H;
    if (s == "S" || s == "P") return OpCode::S;
    if (s == "SDG" || s == "SD" || s == "S+") return OpCode::SDG;
    if (s == "T") return OpCode::T;
    if (s == "TDG" || s == "TD" || s == "T+") return OpCode::TDG;
    if (s == "CNOT" || s == "CX") return OpCode::CNOT;
    if (s == "CZ") return OpCode::CZ;
    return std::nullopt;
}

/// Generator images of the builtin gates.
inline const GateSemantics& builtin_semantics(OpCode code) {
    static const std::map<OpCode, GateSemantics> table = [] {
        std::map<OpCode, GateSemantics> t;
        auto P = [](uint32_t n, uint32_t q, Letter l, bool neg = false) {
            return AdditiveOperator::from_pauli(PauliString::single(n, q, l, neg));
        };
        auto half = [](AdditiveOperator m) { return m.scaled(RingCoeff::inv_rt2()); };

        GateSemantics g;

        g = GateSemantics("I", 1);
        t[OpCode::I] = g;

        g = GateSemantics("X", 1);
        g.zimg[0] = P(1, 0, Letter::Z, true);
        t[OpCode::X] = g;

        g = GateSemantics("Y", 1);
        g.ximg[0] = P(1, 0, Letter::X, true);
        g.zimg[0] = P(1, 0, Letter::Z, true);
        t[OpCode::Y] = g;

        g = GateSemantics("Z", 1);
        g.ximg[0] = P(1, 0, Letter::X, true);
        t[OpCode::Z] = g;

        g = GateSemantics("H", 1);
        g.ximg[0] = P(1, 0, Letter::Z);
        g.zimg[0] = P(1, 0, Letter::X);
        t[OpCode::H] = g;

        g = GateSemantics("S", 1);
        g.ximg[0] = P(1, 0, Letter::Y);
        t[OpCode::S] = g;

        g = GateSemantics("Sdg", 1);
        g.ximg[0] = P(1, 0, Letter::Y, true);
        t[OpCode::SDG] = g;

        g = GateSemantics("T", 1);
        g.ximg[0] = half(P(1, 0, Letter::X) + P(1, 0, Letter::Y));
        t[OpCode::T] = g;

        g = GateSemantics("Tdg", 1);
        g.ximg[0] = half(P(1, 0, Letter::X) - P(1, 0, Letter::Y));
        t[OpCode::TDG] = g;

        auto two = [](PauliString p) { return AdditiveOperator::from_pauli(p); };
        auto pair2 = [](Letter a, Letter b) {
            PauliBits w(2);
            w.set_letter(0, a);
            w.set_letter(1, b);
            return PauliString(w, 0);
        };

        g = GateSemantics("CNOT", 2);
        g.ximg[0] = two(pair2(Letter::X, Letter::X));
        g.zimg[1] = two(pair2(Letter::Z, Letter::Z));
        t[OpCode::CNOT] = g;

        g = GateSemantics("CZ", 2);
        g.ximg[0] = two(pair2(Letter::X, Letter::Z));
        g.ximg[1] = two(pair2(Letter::Z, Letter::X));
        t[OpCode::CZ] = g;

        return t;
    }();
    return table.at(code);
}

/**
 * Exact expansion of a builtin unitary itself (not its conjugation
 * action) over Pauli words, used for real/imaginary part extraction.
 */
inline ComplexExpansion builtin_expansion(OpCode code) {
    auto w1 = [](Letter l) {
        PauliBits w(1);
        w.set_letter(0, l);
        return w;
    };
    auto w2 = [](Letter a, Letter b) {
        PauliBits w(2);
        w.set_letter(0, a);
        w.set_letter(1, b);
        return w;
    };
    const RingCoeff zero = RingCoeff::zero();
    const RingCoeff one = RingCoeff::one();
    const RingCoeff h = RingCoeff::dyadic(1, 1);   // 1/2
    const RingCoeff r = RingCoeff::inv_rt2();      // rt2/2
    ComplexExpansion e(1);
    switch (code) {
        case OpCode::I: e.add(w1(Letter::I), {one, zero}); return e;
        case OpCode::X: e.add(w1(Letter::X), {one, zero}); return e;
        case OpCode::Y: e.add(w1(Letter::Y), {one, zero}); return e;
        case OpCode::Z: e.add(w1(Letter::Z), {one, zero}); return e;
        case OpCode::H:
            e.add(w1(Letter::X), {r, zero});
            e.add(w1(Letter::Z), {r, zero});
            return e;
        case OpCode::S:
            // S = (1+i)/2 I + (1-i)/2 Z, up to global phase exp(i pi/4).
            e.add(w1(Letter::I), {h, h});
            e.add(w1(Letter::Z), {h, -h});
            return e;
        case OpCode::SDG:
            e.add(w1(Letter::I), {h, -h});
            e.add(w1(Letter::Z), {h, h});
            return e;
        case OpCode::T: {
            // T = c I + (1-c) Z with c = (1 + exp(i pi/4)) / 2.
            RingCoeff re_i = RingCoeff(2, 1, 2);   // (2+rt2)/4
            RingCoeff re_z = RingCoeff(2, -1, 2);  // (2-rt2)/4
            RingCoeff im = RingCoeff(0, 1, 2);     // rt2/4
            e.add(w1(Letter::I), {re_i, im});
            e.add(w1(Letter::Z), {re_z, -im});
            return e;
        }
        case OpCode::TDG: {
            RingCoeff re_i = RingCoeff(2, 1, 2);
            RingCoeff re_z = RingCoeff(2, -1, 2);
            RingCoeff im = RingCoeff(0, 1, 2);
            e.add(w1(Letter::I), {re_i, -im});
            e.add(w1(Letter::Z), {re_z, im});
            return e;
        }
        case OpCode::CNOT: {
            ComplexExpansion f(2);
            f.add(w2(Letter::I, Letter::I), {h, zero});
            f.add(w2(Letter::I, Letter::X), {h, zero});
            f.add(w2(Letter::Z, Letter::I), {h, zero});
            f.add(w2(Letter::Z, Letter::X), {-h, zero});
            return f;
        }
        case OpCode::CZ: {
            ComplexExpansion f(2);
            f.add(w2(Letter::I, Letter::I), {h, zero});
            f.add(w2(Letter::I, Letter::Z), {h, zero});
            f.add(w2(Letter::Z, Letter::I), {h, zero});
            f.add(w2(Letter::Z, Letter::Z), {-h, zero});
            return f;
        }
    }
    throw semantics_error("no expansion for opcode");
}

/**
 * Split a unitary's expansion into hermitian real and imaginary parts
 * U = Re + i Im.  For unitary U these satisfy Re^2 + Im^2 = I and
 * Re Im = Im Re, which is checked.
 */
struct ReImParts {
    AdditiveOperator re, im;
};

inline ReImParts re_im_parts(const ComplexExpansion& u) {
    AdditiveOperator re(u.n), im(u.n);
    std::map<PauliBits, RingCoeff> racc, iacc;
    for (auto& [w, c] : u.terms) {
        racc[w] += c.re;
        iacc[w] += c.im;
    }
    re = AdditiveOperator::from_map(u.n, racc);
    im = AdditiveOperator::from_map(u.n, iacc);
    ComplexExpansion check = re.complex() * re.complex() + im.complex() * im.complex();
    if (!check.is_identity())
        throw semantics_error("real/imaginary split does not come from a unitary");
    ComplexExpansion ri = re.complex() * im.complex();
    ComplexExpansion ir = im.complex() * re.complex();
    if (!(ri.terms == ir.terms))
        throw semantics_error("real and imaginary parts of a unitary must commute");
    return {re, im};
}

// ----------------------------------------------------------- controlled ---

namespace detail {

/// (I - Z) at one control slot, as a complex expansion factor.
inline ComplexExpansion ctrl_factor(uint32_t n, uint32_t q) {
    ComplexExpansion e(n);
    e.add(PauliBits(n), CRing::real(RingCoeff::one()));
    PauliBits z(n);
    z.set_letter(q, Letter::Z);
    e.add(z, CRing::real(-RingCoeff::one()));
    return e;
}

inline ComplexExpansion embed_complex(const ComplexExpansion& e, uint32_t big_n,
                                      uint32_t offset) {
    ComplexExpansion r(big_n);
    for (auto& [w, c] : e.terms) {
        PauliBits big(big_n);
        for (uint32_t q = 0; q < e.n; ++q)
            big.set_letter(offset + q, w.letter(q));
        r.add(big, c);
    }
    return r;
}

inline AdditiveOperator certify_real_expansion(const ComplexExpansion& e) {
    std::map<PauliBits, RingCoeff> acc;
    for (auto& [w, c] : e.terms) {
        if (!c.is_real())
            throw semantics_error("expected a hermitian expansion");
        acc[w] += c.re;
    }
    return AdditiveOperator::from_map(e.n, acc);
}

}  // namespace detail

/// Qubit indices of the target block when k controls are prepended.
inline std::vector<uint32_t> target_slots(uint32_t k, uint32_t n) {
    std::vector<uint32_t> v(n);
    for (uint32_t q = 0; q < n; ++q)
        v[q] = k + q;
    return v;
}

/**
 * Conjugation action of the k-fold controlled version of a unitary on
 * qubits 1..k (controls) and k+1..k+n (targets).  Takes the target's
 * conjugation action together with its real/imaginary parts.
 *
 * Controls:  Z_j fixed;
 *   X_j -> X_j - 2^(1-k) Pi_j (I^n - Re) + 2^(1-k) Pi_j^Y Im,
 * where Pi_j is the product of (I-Z) over the other controls with X at
 * slot j, and Pi_j^Y the same with Y.  Targets:
 *   P -> P - 2^-k (I-Z)^k (P - image(P)).
 */
inline GateSemantics controlled_semantics(const GateSemantics& target, const ReImParts& parts,
                                          uint32_t k) {
    if (k == 0)
        return target;
    const uint32_t n = target.n;
    const uint32_t N = k + n;
    GateSemantics g("C" + target.name, N);

    RingCoeff scale = RingCoeff::dyadic(1, k);  // 2^-k
    ComplexExpansion ctrl_all = ComplexExpansion::identity(N);
    for (uint32_t j = 0; j < k; ++j)
        ctrl_all = ctrl_all * detail::ctrl_factor(N, j);

    // Target generators.
    for (uint32_t q = 0; q < n; ++q) {
        for (bool zgen : {false, true}) {
            PauliString p = PauliString::single(N, k + q, zgen ? Letter::Z : Letter::X);
            const AdditiveOperator& img = zgen ? target.zimg[q] : target.ximg[q];
            AdditiveOperator big_p = AdditiveOperator::from_pauli(p);
            AdditiveOperator diff = big_p - img.embed(N, target_slots(k, n));
            ComplexExpansion corr = ctrl_all * diff.complex();
            AdditiveOperator res =
                big_p - detail::certify_real_expansion(corr).scaled(scale);
            (zgen ? g.zimg : g.ximg)[k + q] = res;
        }
    }

    // Control generators.  Z_j is fixed (already the default).
    RingCoeff cscale = RingCoeff::dyadic(1, k - 1);  // 2^(1-k)
    AdditiveOperator id_n = AdditiveOperator::identity(n);
    AdditiveOperator re_def = id_n - parts.re;  // I^n - Re
    for (uint32_t j = 0; j < k; ++j) {
        auto other_ctrls = [&](Letter at_j) {
            ComplexExpansion e = ComplexExpansion::identity(N);
            for (uint32_t i = 0; i < k; ++i) {
                if (i == j)
                    continue;
                e = e * detail::ctrl_factor(N, i);
            }
            PauliBits w(N);
            w.set_letter(j, at_j);
            ComplexExpansion letter(N);
            letter.add(w, CRing::real(RingCoeff::one()));
            return e * letter;
        };
        ComplexExpansion xterm =
            other_ctrls(Letter::X) * re_def.embed(N, target_slots(k, n)).complex();
        ComplexExpansion yterm =
            other_ctrls(Letter::Y) * parts.im.embed(N, target_slots(k, n)).complex();
        AdditiveOperator x_j =
            AdditiveOperator::from_pauli(PauliString::single(N, j, Letter::X));
        g.ximg[j] = x_j - detail::certify_real_expansion(xterm).scaled(cscale) +
                    detail::certify_real_expansion(yterm).scaled(cscale);
    }
    return g;
}

/**
 * Additive type of the controlled gate C^k(m) given the type m of the
 * target: I - 2^-k (I-Z)^k tensor (I - m).
 */
inline AdditiveOperator controlled_additive_type(const AdditiveOperator& m, uint32_t k) {
    if (k == 0)
        return m;
    const uint32_t N = k + m.n;
    ComplexExpansion ctrl_all = ComplexExpansion::identity(N);
    for (uint32_t j = 0; j < k; ++j)
        ctrl_all = ctrl_all * detail::ctrl_factor(N, j);
    AdditiveOperator diff = AdditiveOperator::identity(m.n) - m;
    ComplexExpansion corr = ctrl_all * diff.embed(N, target_slots(k, m.n)).complex();
    return AdditiveOperator::identity(N) -
           detail::certify_real_expansion(corr).scaled(RingCoeff::dyadic(1, k));
}

// -------------------------------------------------------- T-count bound ---

/**
 * Lower bound on the number of T gates in any ancilla-free circuit
 * implementing the given conjugation action: the least s such that all
 * generator-image coefficients lie in (1/rt2)^s Z[rt2].  Returns
 * nullopt when some coefficient admits no such s (the action is not
 * realizable over the exact gate set without ancillas).
 */
inline std::optional<unsigned> tcount_lower_bound(const GateSemantics& g) {
    unsigned best = 0;
    for (auto list : {&g.ximg, &g.zimg})
        for (auto& m : *list)
            for (auto& t : m.terms) {
                auto s = t.c.denominator_exponent();
                if (!s)
                    return std::nullopt;
                best = std::max(best, *s);
            }
    return best;
}

}  // namespace qtyper
