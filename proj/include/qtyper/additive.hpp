#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qtyper/pauli.hpp"
#include "qtyper/ring.hpp"

namespace qtyper {

/// Complex ring scalar re + i*im with both parts in Z[sqrt2, 1/2].
struct CRing {
    RingCoeff re, im;

    static CRing real(RingCoeff r) { return {r, RingCoeff::zero()}; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    CRing operator+(const CRing& o) const { return {re + o.re, im + o.im}; }
    CRing operator-(const CRing& o) const { return {re - o.re, im - o.im}; }
    CRing operator*(const CRing& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    CRing conj() const { return {re, -im}; }
    /// Multiply by i^t.
    CRing rot(unsigned t) const {
        switch (t & 3) {
            case 0: return *this;
            case 1: return {-im, re};
            case 2: return {-re, -im};
            default: return {im, -re};
        }
    }
    friend bool operator==(const CRing&, const CRing&) = default;
};

struct AdditiveOperator;

/**
 * A complex linear combination of phase-free Pauli words.  This is the
 * closure of additive operators under multiplication; intermediate
 * products (e.g. when deriving a Y action as i * Nx * Nz) pass through
 * here before being certified real again.
 */
struct ComplexExpansion {
    uint32_t n = 0;
    std::map<PauliBits, CRing> terms;

    ComplexExpansion() = default;
    explicit ComplexExpansion(uint32_t n_) : n(n_) {}

    static ComplexExpansion identity(uint32_t n_) {
        ComplexExpansion e(n_);
        e.add(PauliBits(n_), CRing::real(RingCoeff::one()));
        return e;
    }

    void add(const PauliBits& w, const CRing& c) {
        if (c.is_zero())
            return;
        auto [it, fresh] = terms.emplace(w, c);
        if (!fresh) {
            it->second = it->second + c;
            if (it->second.is_zero())
                terms.erase(it);
        }
    }

    bool is_real() const {
        for (auto& [w, c] : terms)
            if (!c.is_real())
                return false;
        return true;
    }

    bool is_identity() const {
        if (terms.size() != 1)
            return false;
        auto& [w, c] = *terms.begin();
        return w.is_identity() && c.re.is_one() && c.im.is_zero();
    }

    bool is_zero() const { return terms.empty(); }

    ComplexExpansion operator+(const ComplexExpansion& o) const {
        ComplexExpansion r = *this;
        for (auto& [w, c] : o.terms)
            r.add(w, c);
        return r;
    }

    ComplexExpansion operator*(const ComplexExpansion& o) const {
        ComplexExpansion r(n);
        for (auto& [w1, c1] : terms)
            for (auto& [w2, c2] : o.terms)
                r.add(w1 ^ w2, (c1 * c2).rot(mul_phase_exponent(w1, w2)));
        return r;
    }

    ComplexExpansion scaled(const CRing& s) const {
        ComplexExpansion r(n);
        for (auto& [w, c] : terms)
            r.add(w, c * s);
        return r;
    }

    /// Adjoint: words are hermitian, so conjugate the coefficients.
    ComplexExpansion dagger() const {
        ComplexExpansion r(n);
        for (auto& [w, c] : terms)
            r.add(w, c.conj());
        return r;
    }
};

/**
 * A real linear combination of phase-free Pauli words with exact ring
 * coefficients: the symbolic form of a hermitian operator.  Valid type
 * terms additionally square to the identity (checked by is_valid()).
 * Terms are kept sorted by word with nonzero coefficients, so equality
 * is structural.
 */
struct AdditiveOperator {
    struct Term {
        PauliBits word;
        RingCoeff c;
        friend bool operator==(const Term&, const Term&) = default;
        friend bool operator<(const Term& s, const Term& t) {
            if (s.word < t.word)
                return true;
            if (t.word < s.word)
                return false;
            return std::tie(s.c.a, s.c.b, s.c.k) < std::tie(t.c.a, t.c.b, t.c.k);
        }
    };

    uint32_t n = 0;
    std::vector<Term> terms;  // sorted by word, no zeros

    AdditiveOperator() = default;
    explicit AdditiveOperator(uint32_t n_) : n(n_) {}

    static AdditiveOperator identity(uint32_t n_) {
        AdditiveOperator m(n_);
        m.terms.push_back({PauliBits(n_), RingCoeff::one()});
        return m;
    }

    /// From a hermitian Pauli string (phase must be 0 or 2).
    static AdditiveOperator from_pauli(const PauliString& p) {
        if (!p.is_hermitian())
            throw ring_error("non-hermitian Pauli string used as a type term");
        AdditiveOperator m(p.n());
        m.terms.push_back({p.w, RingCoeff::integer(p.sign())});
        return m;
    }

    static AdditiveOperator from_map(uint32_t n_, const std::map<PauliBits, RingCoeff>& acc) {
        AdditiveOperator m(n_);
        for (auto& [w, c] : acc)
            if (!c.is_zero())
                m.terms.push_back({w, c});
        return m;
    }

    bool empty() const { return terms.empty(); }
    size_t size() const { return terms.size(); }

    bool is_single_pauli() const { return terms.size() == 1 && terms[0].c.is_pm_one(); }
    bool is_identity_term() const {
        return terms.size() == 1 && terms[0].word.is_identity() && terms[0].c.is_one();
    }
    bool is_traceless() const {
        for (auto& t : terms)
            if (t.word.is_identity())
                return false;
        return true;
    }

    PauliString as_pauli() const {
        assert(is_single_pauli());
        return PauliString(terms[0].word, terms[0].c.is_one() ? 0 : 2);
    }

    RingCoeff coeff(const PauliBits& w) const {
        for (auto& t : terms)
            if (t.word == w)
                return t.c;
        return RingCoeff::zero();
    }

    RingCoeff identity_coeff() const { return coeff(PauliBits(n)); }

    friend bool operator==(const AdditiveOperator&, const AdditiveOperator&) = default;
    friend bool operator<(const AdditiveOperator& a, const AdditiveOperator& b) {
        return a.terms < b.terms;
    }

    AdditiveOperator operator-() const {
        AdditiveOperator r = *this;
        for (auto& t : r.terms)
            t.c = -t.c;
        return r;
    }

    AdditiveOperator operator+(const AdditiveOperator& o) const {
        std::map<PauliBits, RingCoeff> acc;
        for (auto& t : terms)
            acc[t.word] += t.c;
        for (auto& t : o.terms)
            acc[t.word] += t.c;
        return from_map(n, acc);
    }

    AdditiveOperator operator-(const AdditiveOperator& o) const { return *this + (-o); }

    AdditiveOperator scaled(const RingCoeff& s) const {
        AdditiveOperator r(n);
        if (s.is_zero())
            return r;
        r.terms = terms;
        for (auto& t : r.terms)
            t.c = t.c * s;
        return r;
    }

    ComplexExpansion complex() const {
        ComplexExpansion e(n);
        for (auto& t : terms)
            e.add(t.word, CRing::real(t.c));
        return e;
    }

    /// Tensor product; this acts on the first block.
    AdditiveOperator tensor(const AdditiveOperator& o) const {
        AdditiveOperator r(n + o.n);
        std::map<PauliBits, RingCoeff> acc;
        for (auto& t1 : terms)
            for (auto& t2 : o.terms) {
                PauliBits w(n + o.n);
                for (uint32_t q = 0; q < n; ++q)
                    w.set_letter(q, t1.word.letter(q));
                for (uint32_t q = 0; q < o.n; ++q)
                    w.set_letter(n + q, t2.word.letter(q));
                acc[w] += t1.c * t2.c;
            }
        return from_map(n + o.n, acc);
    }

    /// Place this |K|-qubit operator at the given qubits of an n-qubit system.
    AdditiveOperator embed(uint32_t big_n, const std::vector<uint32_t>& at) const {
        assert(at.size() == n);
        AdditiveOperator r(big_n);
        for (auto& t : terms) {
            PauliBits w(big_n);
            for (uint32_t q = 0; q < n; ++q)
                w.set_letter(at[q], t.word.letter(q));
            r.terms.push_back({w, t.c});
        }
        std::sort(r.terms.begin(), r.terms.end(),
                  [](const Term& a, const Term& b) { return a.word < b.word; });
        return r;
    }

    /// Union of the supports of all summands.
    std::vector<uint32_t> support() const {
        std::vector<bool> seen(n, false);
        for (auto& t : terms)
            for (uint32_t q : t.word.support())
                seen[q] = true;
        std::vector<uint32_t> s;
        for (uint32_t q = 0; q < n; ++q)
            if (seen[q])
                s.push_back(q);
        return s;
    }

    bool has_x_or_y_at(uint32_t q) const {
        for (auto& t : terms)
            if (t.word.xbit(q))
                return true;
        return false;
    }

    /**
     * Split by the letter at qubit q: returns the four (n-1)-qubit
     * components N_I, N_X, N_Z, N_Y with M = sum_L (L at q) tensor N_L.
     * Index by static_cast<unsigned>(Letter).
     */
    std::array<AdditiveOperator, 4> split_at(uint32_t q) const {
        std::array<std::map<PauliBits, RingCoeff>, 4> acc;
        for (auto& t : terms) {
            unsigned l = static_cast<unsigned>(t.word.letter(q));
            PauliBits rest(n - 1);
            for (uint32_t p = 0, o = 0; p < n; ++p) {
                if (p == q)
                    continue;
                rest.set_letter(o++, t.word.letter(p));
            }
            acc[l][rest] += t.c;
        }
        std::array<AdditiveOperator, 4> out;
        for (unsigned l = 0; l < 4; ++l)
            out[l] = from_map(n - 1, acc[l]);
        return out;
    }

    /// Re-insert a letter at position q (inverse of split_at).
    AdditiveOperator insert_at(uint32_t q, Letter l) const {
        AdditiveOperator r(n + 1);
        std::map<PauliBits, RingCoeff> acc;
        for (auto& t : terms) {
            PauliBits w(n + 1);
            for (uint32_t p = 0, o = 0; p < n + 1; ++p)
                w.set_letter(p, p == q ? l : t.word.letter(o++));
            acc[w] += t.c;
        }
        return from_map(n + 1, acc);
    }

    /// Drop the summand structure down to the traceless part.
    AdditiveOperator traceless_part() const {
        AdditiveOperator r(n);
        for (auto& t : terms)
            if (!t.word.is_identity())
                r.terms.push_back(t);
        return r;
    }

    /**
     * A term is a valid type component iff it is hermitian (true by
     * construction) and unitary, i.e. squares to the identity.
     */
    bool is_valid() const {
        if (terms.empty())
            return false;
        ComplexExpansion sq = complex() * complex();
        return sq.is_identity();
    }

    std::string str() const;
};

/// Real product; throws if the result has an imaginary component.
inline AdditiveOperator real_product(const AdditiveOperator& a, const AdditiveOperator& b) {
    ComplexExpansion p = a.complex() * b.complex();
    AdditiveOperator r(a.n);
    std::map<PauliBits, RingCoeff> acc;
    for (auto& [w, c] : p.terms) {
        if (!c.is_real())
            throw ring_error("operator product is not hermitian");
        acc[w] += c.re;
    }
    return AdditiveOperator::from_map(a.n, acc);
}

inline bool additive_commute(const AdditiveOperator& a, const AdditiveOperator& b) {
    ComplexExpansion ab = a.complex() * b.complex();
    ComplexExpansion ba = b.complex() * a.complex();
    return ab.terms == ba.terms;
}

// ------------------------------------------------------------------ print ---

inline std::string AdditiveOperator::str() const {
    if (terms.empty())
        return "0";
    if (is_single_pauli())
        return as_pauli().str();
    if (terms.size() == 1)
        return terms[0].c.str() + " " + terms[0].word.letters();
    // Readable, deterministic display order: identity first, then by
    // letter spelling.  (Storage order stays canonical-by-word.)
    std::vector<Term> terms = this->terms;
    std::stable_sort(terms.begin(), terms.end(), [](const Term& s, const Term& t) {
        bool si = s.word.is_identity(), ti = t.word.is_identity();
        if (si != ti)
            return si;
        return s.word.letters() < t.word.letters();
    });
    // Factor out a common magnitude when every summand carries one.
    RingCoeff mag = terms[0].c;
    if (mag.a < 0 || (mag.a == 0 && mag.b < 0))
        mag = -mag;
    bool common = true;
    for (auto& t : terms)
        if (!(t.c == mag || t.c == -mag))
            common = false;
    std::string out;
    if (common) {
        if (!mag.is_one())
            out = mag.str() + "(";
        bool first = true;
        for (auto& t : terms) {
            bool neg = (t.c == -mag);
            if (first)
                out += (neg ? "-" : "") + t.word.letters();
            else
                out += (neg ? " - " : " + ") + t.word.letters();
            first = false;
        }
        if (!mag.is_one())
            out += ")";
        return out;
    }
    bool first = true;
    for (auto& t : terms) {
        RingCoeff c = t.c;
        bool neg = c.a < 0 || (c.a == 0 && c.b < 0);
        if (neg)
            c = -c;
        if (first)
            out += (neg ? "-" : "");
        else
            out += neg ? " - " : " + ";
        first = false;
        if (c.is_one())
            out += t.word.letters();
        else
            out += c.str() + " " + t.word.letters();
    }
    return out;
}

}  // namespace qtyper
