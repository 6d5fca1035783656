#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "qtyper/ring.hpp"

namespace qtyper {

using std::size_t;
using std::uint32_t;
using std::uint64_t;

/// One-letter Pauli encoded as (x bit) + 2*(z bit): I=0, X=1, Z=2, Y=3.
enum class Letter : unsigned { I = 0, X = 1, Z = 2, Y = 3 };

inline char letter_char(Letter l) {
    switch (l) {
        case Letter::I: return 'I';
        case Letter::X: return 'X';
        case Letter::Z: return 'Z';
        case Letter::Y: return 'Y';
    }
    return '?';
}

/**
 * A phase-free Pauli word on n qubits, stored as packed x/z bitplanes.
 * Bit q of plane x is set when qubit q carries X or Y; bit q of plane z
 * when it carries Z or Y.  Total order is lexicographic on the planes
 * and is used only to keep containers deterministic.
 */
struct PauliBits {
    uint32_t n = 0;
    std::vector<uint64_t> x, z;

    PauliBits() = default;
    explicit PauliBits(uint32_t n_) : n(n_), x(words(n_), 0), z(words(n_), 0) {}

    static size_t words(uint32_t n) { return (n + 63) / 64; }

    bool xbit(uint32_t q) const { return (x[q >> 6] >> (q & 63)) & 1; }
    bool zbit(uint32_t q) const { return (z[q >> 6] >> (q & 63)) & 1; }

    Letter letter(uint32_t q) const {
        return static_cast<Letter>((xbit(q) ? 1u : 0u) | (zbit(q) ? 2u : 0u));
    }

    void set_letter(uint32_t q, Letter l) {
        uint64_t mask = uint64_t{1} << (q & 63);
        unsigned v = static_cast<unsigned>(l);
        if (v & 1)
            x[q >> 6] |= mask;
        else
            x[q >> 6] &= ~mask;
        if (v & 2)
            z[q >> 6] |= mask;
        else
            z[q >> 6] &= ~mask;
    }

    bool is_identity() const {
        for (auto w : x)
            if (w) return false;
        for (auto w : z)
            if (w) return false;
        return true;
    }

    /// Qubits with a non-identity letter.
    std::vector<uint32_t> support() const {
        std::vector<uint32_t> s;
        for (uint32_t q = 0; q < n; ++q)
            if (xbit(q) || zbit(q))
                s.push_back(q);
        return s;
    }

    friend bool operator==(const PauliBits&, const PauliBits&) = default;

    friend bool operator<(const PauliBits& p, const PauliBits& q) {
        if (p.n != q.n)
            return p.n < q.n;
        if (p.x != q.x)
            return p.x < q.x;
        return p.z < q.z;
    }

    PauliBits operator^(const PauliBits& o) const {
        assert(n == o.n);
        PauliBits r(n);
        for (size_t i = 0; i < x.size(); ++i) {
            r.x[i] = x[i] ^ o.x[i];
            r.z[i] = z[i] ^ o.z[i];
        }
        return r;
    }

    std::string letters() const {
        std::string s(n, 'I');
        for (uint32_t q = 0; q < n; ++q)
            s[q] = letter_char(letter(q));
        return s;
    }
};

inline bool commutes(const PauliBits& p, const PauliBits& q) {
    assert(p.n == q.n);
    int parity = 0;
    for (size_t i = 0; i < p.x.size(); ++i)
        parity ^= __builtin_parityll(p.x[i] & q.z[i]) ^ __builtin_parityll(p.z[i] & q.x[i]);
    return parity == 0;
}

/// i-exponent picked up when multiplying the words left*right (mod 4).
inline unsigned mul_phase_exponent(const PauliBits& p, const PauliBits& q) {
    // Per qubit: XY, YZ, ZX contribute +1; YX, ZY, XZ contribute -1.
    uint64_t plus = 0, minus = 0;
    for (size_t i = 0; i < p.x.size(); ++i) {
        uint64_t a = p.x[i], b = p.z[i], c = q.x[i], d = q.z[i];
        uint64_t xy = a & ~b & c & d;
        uint64_t yz = a & b & ~c & d;
        uint64_t zx = ~a & b & c & ~d;
        uint64_t yx = a & b & c & ~d;
        uint64_t zy = ~a & b & c & d;
        uint64_t xz = a & ~b & ~c & d;
        plus += __builtin_popcountll(xy | yz | zx);
        minus += __builtin_popcountll(yx | zy | xz);
    }
    return static_cast<unsigned>((plus + 3 * minus) % 4);
}

/**
 * A Pauli string with phase: value = i^phase * (tensor of letters).
 * Hermitian strings have phase 0 or 2.
 */
struct PauliString {
    PauliBits w;
    unsigned phase = 0;  // exponent of i, mod 4

    PauliString() = default;
    explicit PauliString(uint32_t n) : w(n) {}
    PauliString(PauliBits bits, unsigned ph) : w(std::move(bits)), phase(ph & 3) {}

    uint32_t n() const { return w.n; }
    bool is_hermitian() const { return phase == 0 || phase == 2; }
    /// +1 or -1; only meaningful for hermitian strings.
    int sign() const { return phase == 0 ? 1 : -1; }

    static PauliString identity(uint32_t n) { return PauliString(n); }

    static PauliString single(uint32_t n, uint32_t q, Letter l, bool negative = false) {
        PauliString p(n);
        p.w.set_letter(q, l);
        p.phase = negative ? 2 : 0;
        return p;
    }

    friend bool operator==(const PauliString&, const PauliString&) = default;

    PauliString operator-() const { return PauliString(w, phase + 2); }

    PauliString operator*(const PauliString& o) const {
        assert(w.n == o.w.n);
        return PauliString(w ^ o.w, phase + o.phase + mul_phase_exponent(w, o.w));
    }

    PauliString tensor(const PauliString& o) const {
        PauliString r(w.n + o.w.n);
        r.phase = (phase + o.phase) & 3;
        for (uint32_t q = 0; q < w.n; ++q)
            r.w.set_letter(q, w.letter(q));
        for (uint32_t q = 0; q < o.w.n; ++q)
            r.w.set_letter(w.n + q, o.w.letter(q));
        return r;
    }

    std::string str() const {
        static const char* prefix[4] = {"", "i", "-", "-i"};
        return std::string(prefix[phase & 3]) + w.letters();
    }
};

/// Parse "-ZII", "iYX", "XI" style literals; returns nullopt on bad input.
inline std::optional<PauliString> parse_pauli(const std::string& text) {
    size_t pos = 0;
    unsigned phase = 0;
    if (pos < text.size() && text[pos] == '+')
        ++pos;
    if (pos < text.size() && text[pos] == '-') {
        phase = 2;
        ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        ++pos;
    }
    if (pos >= text.size())
        return std::nullopt;
    std::string body = text.substr(pos);
    PauliString p(static_cast<uint32_t>(body.size()));
    p.phase = phase & 3;
    for (uint32_t q = 0; q < body.size(); ++q) {
        switch (body[q]) {
            case 'I': p.w.set_letter(q, Letter::I); break;
            case 'X': p.w.set_letter(q, Letter::X); break;
            case 'Y': p.w.set_letter(q, Letter::Y); break;
            case 'Z': p.w.set_letter(q, Letter::Z); break;
            default: return std::nullopt;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// In-place Clifford conjugation, one bit-twiddle per gate.  These are the
// O(1)-per-term updates behind the inference fast path; the sign rules are
// exactly the single- and two-qubit conjugation tables.

inline void apply_h(PauliString& p, uint32_t q) {
    bool x = p.w.xbit(q), z = p.w.zbit(q);
    if (x && z)
        p.phase = (p.phase + 2) & 3;  // Y -> -Y
    p.w.set_letter(q, static_cast<Letter>((x ? 2u : 0u) | (z ? 1u : 0u)));
}

inline void apply_s(PauliString& p, uint32_t q) {
    bool x = p.w.xbit(q), z = p.w.zbit(q);
    if (x && z)
        p.phase = (p.phase + 2) & 3;  // Y -> -X
    if (x)
        p.w.set_letter(q, static_cast<Letter>((x ? 1u : 0u) | (z ? 0u : 2u)));
}

inline void apply_sdg(PauliString& p, uint32_t q) {
    bool x = p.w.xbit(q), z = p.w.zbit(q);
    if (x && !z)
        p.phase = (p.phase + 2) & 3;  // X -> -Y
    if (x)
        p.w.set_letter(q, static_cast<Letter>((x ? 1u : 0u) | (z ? 0u : 2u)));
}

inline void apply_x(PauliString& p, uint32_t q) {
    if (p.w.zbit(q))
        p.phase = (p.phase + 2) & 3;
}

inline void apply_y(PauliString& p, uint32_t q) {
    if (p.w.xbit(q) != p.w.zbit(q))
        p.phase = (p.phase + 2) & 3;
}

inline void apply_z(PauliString& p, uint32_t q) {
    if (p.w.xbit(q))
        p.phase = (p.phase + 2) & 3;
}

inline void apply_cnot(PauliString& p, uint32_t c, uint32_t t) {
    bool xc = p.w.xbit(c), zc = p.w.zbit(c);
    bool xt = p.w.xbit(t), zt = p.w.zbit(t);
    if (xc && zt && (xt == zc))
        p.phase = (p.phase + 2) & 3;
    p.w.set_letter(t, static_cast<Letter>(((xt ^ xc) ? 1u : 0u) | (zt ? 2u : 0u)));
    p.w.set_letter(c, static_cast<Letter>((xc ? 1u : 0u) | ((zc ^ zt) ? 2u : 0u)));
}

inline void apply_cz(PauliString& p, uint32_t a, uint32_t b) {
    bool xa = p.w.xbit(a), za = p.w.zbit(a);
    bool xb = p.w.xbit(b), zb = p.w.zbit(b);
    if (xa && xb && (za != zb))
        p.phase = (p.phase + 2) & 3;
    p.w.set_letter(a, static_cast<Letter>((xa ? 1u : 0u) | ((za ^ xb) ? 2u : 0u)));
    p.w.set_letter(b, static_cast<Letter>((xb ? 1u : 0u) | ((zb ^ xa) ? 2u : 0u)));
}

}  // namespace qtyper
