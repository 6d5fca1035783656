#pragma once
// Stabilizer codes: validated code objects, logical types, encoder
// verification, and transversality checking.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infer.hpp"
#include "normal_form.hpp"
#include "pauli.hpp"
#include "program.hpp"
#include "types.hpp"

namespace qtyper {

class code_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct StabilizerCode {
    uint32_t n = 0;
    std::vector<PauliString> generators;
    PauliString logical_x{PauliBits(0), 0};
    PauliString logical_z{PauliBits(0), 0};

    /// Y_L = i * X_L * Z_L; Hermitian because the logicals anticommute.
    PauliString logical_y() const {
        PauliString y = logical_x * logical_z;
        y.phase = (y.phase + 1) % 4;
        return y;
    }

    std::optional<PauliString> logical(Letter l) const {
        switch (l) {
            case Letter::I: return std::nullopt;
            case Letter::X: return logical_x;
            case Letter::Z: return logical_z;
            case Letter::Y: return logical_y();
        }
        return std::nullopt;
    }
};

/// Validate and build a code; throws code_error carrying a witness.
inline StabilizerCode make_code(uint32_t n, std::vector<PauliString> generators,
                                PauliString logical_x, PauliString logical_z) {
    auto width_ok = [&](const PauliString& p) { return p.n() == n && p.is_hermitian(); };
    for (size_t i = 0; i < generators.size(); ++i)
        if (!width_ok(generators[i]))
            throw code_error("generator " + std::to_string(i + 1) +
                             " is not a Hermitian width-" + std::to_string(n) + " Pauli");
    if (!width_ok(logical_x) || !width_ok(logical_z))
        throw code_error("logical operators must be Hermitian width-" +
                         std::to_string(n) + " Paulis");

    for (size_t i = 0; i < generators.size(); ++i)
        for (size_t j = i + 1; j < generators.size(); ++j)
            if (!commutes(generators[i].w, generators[j].w))
                throw code_error("generators " + std::to_string(i + 1) + " and " +
                                 std::to_string(j + 1) + " anticommute");

    // Independence: each generator must not lie in the group of its
    // predecessors; also catches products equal to -I.
    for (size_t i = 1; i < generators.size(); ++i) {
        std::vector<PauliString> prefix(generators.begin(), generators.begin() + i);
        NormalForm nf = normalize_pauli(prefix);
        if (!nf.ok())
            throw code_error("generator set is inconsistent: " + nf.diagnostic());
        if (group_sign_of(nf, generators[i]))
            throw code_error("generator " + std::to_string(i + 1) +
                             " is a product of earlier generators");
    }

    for (size_t i = 0; i < generators.size(); ++i) {
        if (!commutes(logical_x.w, generators[i].w))
            throw code_error("logical X anticommutes with generator " +
                             std::to_string(i + 1));
        if (!commutes(logical_z.w, generators[i].w))
            throw code_error("logical Z anticommutes with generator " +
                             std::to_string(i + 1));
    }
    if (commutes(logical_x.w, logical_z.w))
        throw code_error("logical X and Z must anticommute");

    StabilizerCode c;
    c.n = n;
    c.generators = std::move(generators);
    c.logical_x = std::move(logical_x);
    c.logical_z = std::move(logical_z);
    if (!c.logical_y().is_hermitian())
        throw code_error("internal: logical Y is not Hermitian");
    return c;
}

inline StabilizerCode steane_code() {
    auto P = [](const char* s) { return *parse_pauli(s); };
    return make_code(7,
                     {P("IIIXXXX"), P("IXXIIXX"), P("XIXIXIX"), P("IIIZZZZ"),
                      P("IZZIIZZ"), P("ZIZIZIZ")},
                     P("XXXXXXX"), P("ZZZZZZZ"));
}

/// Code definition file: `N <int>`, `GEN <word>`, `LOGX <word>`, `LOGZ <word>`;
/// '#' comments.
inline StabilizerCode parse_code_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<uint32_t> n;
    std::vector<PauliString> gens;
    std::optional<PauliString> lx, lz;
    size_t lineno = 0;
    auto word = [&](const std::string& w) -> PauliString {
        auto p = parse_pauli(w);
        if (!p || !p->is_hermitian())
            throw code_error("line " + std::to_string(lineno) + ": bad Pauli word '" +
                             w + "'");
        return *p;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line = line.substr(0, h);
        std::istringstream ls(line);
        std::string key, val;
        if (!(ls >> key))
            continue;
        if (!(ls >> val) || (ls >> std::ws, !ls.eof()))
            throw code_error("line " + std::to_string(lineno) +
                             ": expected '<directive> <value>'");
        if (key == "N")
            n = static_cast<uint32_t>(std::stoul(val));
        else if (key == "GEN")
            gens.push_back(word(val));
        else if (key == "LOGX")
            lx = word(val);
        else if (key == "LOGZ")
            lz = word(val);
        else
            throw code_error("line " + std::to_string(lineno) + ": unknown directive '" +
                             key + "'");
    }
    if (!n || !lx || !lz)
        throw code_error("code file needs N, LOGX and LOGZ directives");
    return make_code(*n, std::move(gens), std::move(*lx), std::move(*lz));
}

// ---------------------------------------------------------- logical types ---

/// St ∩ logical-operator branch for one basis (I gives the bare codespace).
inline Branch logical_branch(const StabilizerCode& c, Letter basis) {
    Branch b(c.n);
    for (auto& g : c.generators)
        b.terms.push_back(AdditiveOperator::from_pauli(g));
    if (auto l = c.logical(basis))
        b.terms.push_back(AdditiveOperator::from_pauli(*l));
    return b;
}

namespace detail {

/// Embed a code-width Pauli into block `b` of `blocks` code copies.
inline PauliString embed_block(const PauliString& p, uint32_t b, uint32_t blocks) {
    PauliString out(PauliBits(p.n() * blocks), p.phase);
    for (uint32_t q : p.w.support())
        out.w.set_letter(b * p.n() + q, p.w.letter(q));
    return out;
}

}  // namespace detail

/// (St ⊗ I) ∩ (I ⊗ St) ∩ (A_L ⊗ B_L) over two code blocks.
inline Branch logical_tensor(const StabilizerCode& c, Letter a, Letter b) {
    Branch out(2 * c.n);
    for (uint32_t blk = 0; blk < 2; ++blk)
        for (auto& g : c.generators)
            out.terms.push_back(
                AdditiveOperator::from_pauli(detail::embed_block(g, blk, 2)));
    std::optional<PauliString> la = c.logical(a), lb = c.logical(b);
    if (la || lb) {
        PauliString term(PauliBits(2 * c.n), 0);
        if (la)
            term = term * detail::embed_block(*la, 0, 2);
        if (lb)
            term = term * detail::embed_block(*lb, 1, 2);
        out.terms.push_back(AdditiveOperator::from_pauli(term));
    }
    return out;
}

// ---------------------------------------------------------- encoder check ---

struct EncoderReport {
    bool pass = false;
    std::string inferred;  ///< printed normalized output type
    std::string expected;  ///< printed norm(logical type)
};

/**
 * Feed `basis` on the data qubit and Z on every ancilla through the
 * encoder and compare with the logical type up to normalization.
 */
inline EncoderReport encoder_check(const StabilizerCode& c, const Program& p,
                                   Letter basis, uint32_t data = 0) {
    if (p.n != c.n)
        throw code_error("encoder acts on " + std::to_string(p.n) +
                         " qubits, code has " + std::to_string(c.n));
    if (basis == Letter::I)
        throw code_error("encoder check needs a non-identity basis");
    Branch in(c.n);
    for (uint32_t q = 0; q < c.n; ++q)
        in.terms.push_back(AdditiveOperator::from_pauli(
            PauliString::single(c.n, q, q == data ? basis : Letter::Z)));
    QType out = infer(p, QType::single(std::move(in))).type;
    QType want = QType::single(logical_branch(c, basis));
    EncoderReport r;
    r.pass = types_equal(out, want);
    NormalizeResult no = normalize_branch(out.branches[0]);
    NormalizeResult nw = normalize_branch(want.branches[0]);
    r.inferred = no.ok() ? branch_str(no.branch) : branch_str(out.branches[0]);
    r.expected = nw.ok() ? branch_str(nw.branch) : branch_str(want.branches[0]);
    return r;
}

// ---------------------------------------------------- transversality check ---

struct TransversalityReport {
    enum class Failure { none, additive_escape, outside_group, logical_defect };
    bool pass = false;
    Failure failure = Failure::none;
    std::string witness;                   ///< first failing fact
    std::vector<std::string> logical_map;  ///< e.g. "X_L -> Z_L" per logical generator
};

namespace detail {

/// Materialize a signed logical-alphabet word as a physical Pauli.
inline PauliString materialize_logical(const StabilizerCode& c, const PauliString& w,
                                       uint32_t blocks) {
    PauliString out(PauliBits(c.n * blocks), w.phase);
    for (uint32_t b = 0; b < blocks; ++b) {
        auto l = c.logical(w.w.letter(b));
        if (!l)
            continue;
        PauliString e = embed_block(*l, b, blocks);
        out = out * e;
    }
    return out;
}

inline std::string logical_name(const PauliString& w) {
    std::string s = w.sign() < 0 ? "-" : "";
    return s + w.w.letters() + "_L";
}

}  // namespace detail

/**
 * Decide whether `p` implements `target` at the logical level: every
 * stabilizer generator must map into the stabilizer group (codespace
 * preservation) and every logical generator must map to the target's
 * image up to stabilizer multiplication.  Additive images and sign
 * defects are reported as distinct failures.
 */
inline TransversalityReport transversality_check(const StabilizerCode& c,
                                                 const Program& p,
                                                 const GateSemantics& target) {
    const uint32_t blocks = target.n;
    if (p.n != c.n * blocks)
        throw code_error("program acts on " + std::to_string(p.n) + " qubits, expected " +
                         std::to_string(c.n * blocks));
    GateSemantics sem = track_semantics(p);

    std::vector<PauliString> all_gens;
    for (uint32_t b = 0; b < blocks; ++b)
        for (auto& g : c.generators)
            all_gens.push_back(detail::embed_block(g, b, blocks));
    NormalForm nf = normalize_pauli(all_gens);
    if (!nf.ok())
        throw code_error("stabilizer group is inconsistent: " + nf.diagnostic());

    TransversalityReport r;
    auto fail = [&](TransversalityReport::Failure f, std::string w) {
        r.pass = false;
        r.failure = f;
        r.witness = std::move(w);
        return r;
    };

    // (i) codespace preservation
    for (uint32_t b = 0; b < blocks; ++b)
        for (size_t i = 0; i < c.generators.size(); ++i) {
            PauliString ge = detail::embed_block(c.generators[i], b, blocks);
            AdditiveOperator img = sem.image_of_string(ge);
            std::string who = "g" + std::to_string(i + 1) +
                              (blocks > 1 ? " of block " + std::to_string(b + 1) : "");
            if (!img.is_single_pauli())
                return fail(TransversalityReport::Failure::additive_escape,
                            who + " maps to the additive type " + img.str());
            auto s = group_sign_of(nf, img.as_pauli());
            if (!s)
                return fail(TransversalityReport::Failure::outside_group,
                            who + " maps to " + img.as_pauli().str() +
                                ", outside the stabilizer group");
            if (*s != +1)
                return fail(TransversalityReport::Failure::outside_group,
                            who + " maps to the negated stabilizer " +
                                img.as_pauli().str());
        }

    // (ii) logical action
    for (uint32_t b = 0; b < blocks; ++b)
        for (Letter l : {Letter::X, Letter::Z}) {
            PauliString lg = detail::embed_block(*c.logical(l), b, blocks);
            AdditiveOperator img = sem.image_of_string(lg);
            PauliString gen = PauliString::single(blocks, b, l);
            std::string who = detail::logical_name(gen);
            if (!img.is_single_pauli())
                return fail(TransversalityReport::Failure::additive_escape,
                            who + " maps to the additive type " + img.str());
            const AdditiveOperator& timg =
                l == Letter::X ? target.ximg[b] : target.zimg[b];
            if (!timg.is_single_pauli())
                return fail(TransversalityReport::Failure::logical_defect,
                            who + " maps to the Pauli " + img.as_pauli().str() +
                                " but the target image is additive: " + timg.str());
            PauliString got = img.as_pauli();
            // got == candidate * (positive stabilizer)?  The candidate
            // reached names the logical coset of the actual image.
            auto reaches = [&](const PauliString& cand) {
                PauliString m = detail::materialize_logical(c, cand, blocks);
                PauliString q = got * m;
                if (!q.is_hermitian())
                    return false;
                auto s = group_sign_of(nf, q);
                return s && *s == +1;
            };
            PauliString want = timg.as_pauli();
            if (reaches(want)) {
                r.logical_map.push_back(who + " -> " + detail::logical_name(want));
                continue;
            }
            std::string reached = got.str();
            for (uint32_t code = 0; code < (1u << (2 * blocks)); ++code) {
                PauliBits wbits(blocks);
                for (uint32_t bb = 0; bb < blocks; ++bb)
                    wbits.set_letter(bb, static_cast<Letter>((code >> (2 * bb)) & 3u));
                bool named = false;
                for (unsigned sgn : {0u, 2u}) {
                    PauliString cand(wbits, sgn);
                    if (reaches(cand)) {
                        reached = detail::logical_name(cand);
                        named = true;
                        break;
                    }
                }
                if (named)
                    break;
            }
            return fail(TransversalityReport::Failure::logical_defect,
                        who + " maps to " + reached + ", target wants " +
                            detail::logical_name(want));
        }

    r.pass = true;
    return r;
}

}  // namespace qtyper
