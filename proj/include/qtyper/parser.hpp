#pragma once
// Text frontend: the type grammar and the circuit DSL.
//
//   file   := (decl | stmt)*                 separators: newline or ';'
//   decl   := "QUBITS" INT | "INIT" type | "EXPECT" type
//           | "GATE" NAME param* "{" stmt* "}"
//   stmt   := NAME operand+ | "MEAS" INT
//   type   := branch ("|" branch)*
//   branch := term ("&" term)*
//   term   := sum ["@{" INT ("," INT)* "}"]
//           | "(" branch ")" "@{" INT ("," INT)* "}"
//   sum    := prod (("+" | "-") prod)*
//   prod   := [coeff] factor factor*         juxtaposed factors tensor together
//   factor := WORD | "(" sum ")"
//   coeff  := ["-"] atom ["/" INT]          atom := INT ["rt2"] | "rt2" | "(" ring ")"
//
// Comments: '#' to end of line and '(*' ... '*)'.  Gate names are
// case-insensitive; indices are 1-based in source text.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "program.hpp"
#include "ring.hpp"
#include "types.hpp"

namespace qtyper {

class parse_error : public std::runtime_error {
  public:
    size_t line, col;
    parse_error(size_t line_, size_t col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ": " + msg),
          line(line_),
          col(col_) {}
};

struct ParseOptions {
    bool numeric = false;  ///< accept decimal literals, snapped into the ring
    std::function<std::optional<RingCoeff>(double)> snap;  ///< the snapper
};

namespace detail {

// ----------------------------------------------------------- type lexer ---

enum class Tok {
    word,     // [IXYZ]+
    integer,  // [0-9]+
    decimal,  // [0-9]+ "." [0-9]+
    rt2,
    lparen,
    rparen,
    plus,
    minus,
    amp,
    bar,
    at,      // "@{"
    rbrace,  // "}"
    comma,
    slash,
    arrow,  // "->"
    end,
};

struct Token {
    Tok kind;
    std::string text;
    size_t col;  // 1-based column in the source line
};

inline std::vector<Token> lex_type(const std::string& s, size_t line) {
    std::vector<Token> out;
    size_t i = 0;
    auto fail = [&](const std::string& m) { throw parse_error(line, i + 1, m); };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        size_t col = i + 1;
        auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), col}); };
        if (c == 'I' || c == 'X' || c == 'Y' || c == 'Z') {
            size_t j = i;
            while (j < s.size() &&
                   (s[j] == 'I' || s[j] == 'X' || s[j] == 'Y' || s[j] == 'Z'))
                ++j;
            push(Tok::word, s.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
            if (j < s.size() && s[j] == '.' && j + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                    ++j;
                push(Tok::decimal, s.substr(i, j - i));
            } else {
                push(Tok::integer, s.substr(i, j - i));
            }
            i = j;
        } else if (s.compare(i, 3, "rt2") == 0) {
            push(Tok::rt2, "rt2");
            i += 3;
        } else if (s.compare(i, 2, "->") == 0) {
            push(Tok::arrow, "->");
            i += 2;
        } else if (c == '@') {
            if (i + 1 >= s.size() || s[i + 1] != '{')
                fail("expected '{' after '@'");
            push(Tok::at, "@{");
            i += 2;
        } else {
            switch (c) {
                case '(': push(Tok::lparen, "("); break;
                case ')': push(Tok::rparen, ")"); break;
                case '+': push(Tok::plus, "+"); break;
                case '-': push(Tok::minus, "-"); break;
                case '&': push(Tok::amp, "&"); break;
                case '|': push(Tok::bar, "|"); break;
                case '}': push(Tok::rbrace, "}"); break;
                case ',': push(Tok::comma, ","); break;
                case '/': push(Tok::slash, "/"); break;
                default:
                    fail(std::string("unexpected character '") + c + "' in type");
            }
            ++i;
        }
    }
    out.push_back({Tok::end, "", s.size() + 1});
    return out;
}

// ---------------------------------------------------------- type parser ---

class TypeParser {
  public:
    TypeParser(const std::string& text, size_t line, const ParseOptions& opt)
        : toks_(lex_type(text, line)), line_(line), opt_(opt) {}

    QType parse_type() {
        QType t = parse_union();
        expect(Tok::end, "end of type");
        return t;
    }

    std::pair<QType, QType> parse_arrow() {
        QType lhs = parse_union();
        expect(Tok::arrow, "'->'");
        QType rhs = parse_union();
        expect(Tok::end, "end of type");
        return {std::move(lhs), std::move(rhs)};
    }

    bool at_arrow_toplevel() const {
        int depth = 0;
        for (auto& t : toks_) {
            if (t.kind == Tok::lparen)
                ++depth;
            else if (t.kind == Tok::rparen)
                --depth;
            else if (t.kind == Tok::arrow && depth == 0)
                return true;
        }
        return false;
    }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    size_t line_;
    const ParseOptions& opt_;

    const Token& peek(size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    [[noreturn]] void fail(const std::string& m) const {
        throw parse_error(line_, peek().col, m);
    }
    void expect(Tok k, const std::string& what) {
        if (peek().kind != k)
            fail("expected " + what);
        take();
    }

    // A parenthesized group is a ring coefficient iff it contains no
    // Pauli word before the matching ')'.
    bool paren_is_coeff() const {
        int depth = 0;
        for (size_t i = pos_; i < toks_.size(); ++i) {
            if (toks_[i].kind == Tok::lparen)
                ++depth;
            else if (toks_[i].kind == Tok::rparen) {
                if (--depth == 0)
                    return true;
            } else if (toks_[i].kind == Tok::word || toks_[i].kind == Tok::amp)
                return false;
        }
        return true;
    }

    std::int64_t parse_int() {
        if (peek().kind != Tok::integer)
            fail("expected an integer");
        return std::stoll(take().text);
    }

    RingCoeff apply_divisor(RingCoeff c) {
        if (peek().kind != Tok::slash)
            return c;
        take();
        if (peek().kind == Tok::integer) {
            RingCoeff d(parse_int(), 0, 0);
            try {
                return c / d;
            } catch (const ring_error& e) {
                fail(std::string("coefficient is outside the ring: ") + e.what());
            }
        }
        if (peek().kind == Tok::rt2) {
            take();
            return c.times_inv_rt2();
        }
        fail("expected a divisor");
    }

    // ring := sum of INT / INT "rt2" / "rt2" terms with +/- signs and
    // optional "/ INT" or "/ rt2" divisors (inside parens)
    RingCoeff parse_ring_expr() {
        RingCoeff acc = RingCoeff::zero();
        bool first = true;
        while (true) {
            std::int64_t sign = 1;
            if (peek().kind == Tok::minus) {
                take();
                sign = -1;
            } else if (peek().kind == Tok::plus) {
                take();
            } else if (!first) {
                break;
            }
            RingCoeff term = RingCoeff::zero();
            if (peek().kind == Tok::integer) {
                std::int64_t v = sign * parse_int();
                if (peek().kind == Tok::rt2) {
                    take();
                    term = RingCoeff(0, v, 0);
                } else {
                    term = RingCoeff(v, 0, 0);
                }
            } else if (peek().kind == Tok::rt2) {
                take();
                term = RingCoeff(0, sign, 0);
            } else {
                fail("expected a ring term");
            }
            acc += apply_divisor(term);
            first = false;
        }
        return acc;
    }

    RingCoeff snap_decimal(const std::string& text) {
        if (!opt_.numeric || !opt_.snap)
            fail("decimal coefficients require --numeric");
        auto r = opt_.snap(std::stod(text));
        if (!r)
            fail("decimal " + text + " is not representable as (a+b*rt2)/2^k");
        return *r;
    }

    std::optional<RingCoeff> try_coeff(bool negative) {
        RingCoeff c = RingCoeff::one();
        bool have = false;
        if (peek().kind == Tok::integer) {
            c = RingCoeff(std::stoll(take().text), 0, 0);
            have = true;
            if (peek().kind == Tok::rt2) {
                take();
                c = RingCoeff(0, c.a, 0);
            }
        } else if (peek().kind == Tok::rt2) {
            take();
            c = RingCoeff(0, 1, 0);
            have = true;
        } else if (peek().kind == Tok::decimal) {
            c = snap_decimal(take().text);
            have = true;
        } else if (peek().kind == Tok::lparen && paren_is_coeff()) {
            take();
            c = parse_ring_expr();
            expect(Tok::rparen, "')' after ring expression");
            have = true;
        }
        if (have)
            c = apply_divisor(c);
        if (!have)
            return std::nullopt;
        return negative ? -c : c;
    }

    /// factor := WORD | "(" sum ")"
    AdditiveOperator parse_factor() {
        if (peek().kind == Tok::word) {
            Token w = take();
            auto p = parse_pauli(w.text);
            if (!p)
                fail("bad Pauli word '" + w.text + "'");
            return AdditiveOperator::from_pauli(*p);
        }
        expect(Tok::lparen, "a Pauli word or '('");
        AdditiveOperator inner = parse_sum();
        expect(Tok::rparen, "')'");
        return inner;
    }

    /// prod := [coeff] factor factor*; juxtaposed factors tensor together,
    /// so I(-X) is the two-qubit operator -IX.
    AdditiveOperator parse_prod(bool negative) {
        std::optional<RingCoeff> c = try_coeff(negative);
        RingCoeff scale = c.value_or(negative ? -RingCoeff::one() : RingCoeff::one());
        if (peek().kind != Tok::word && peek().kind != Tok::lparen)
            fail("expected a Pauli word or '('");
        AdditiveOperator acc = parse_factor();
        while (peek().kind == Tok::word ||
               (peek().kind == Tok::lparen && !paren_is_coeff()))
            acc = acc.tensor(parse_factor());
        return acc.scaled(scale);
    }

    /// sum := prod (("+" | "-") prod)*
    AdditiveOperator parse_sum() {
        bool neg = false;
        if (peek().kind == Tok::minus) {
            take();
            neg = true;
        }
        AdditiveOperator acc = parse_prod(neg);
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            bool minus = take().kind == Tok::minus;
            AdditiveOperator rhs = parse_prod(false);
            if (rhs.n != acc.n)
                fail("summands act on different qubit counts");
            acc = minus ? acc - rhs : acc + rhs;
        }
        return acc;
    }

    std::vector<uint32_t> parse_block() {
        expect(Tok::at, "'@{'");
        std::vector<uint32_t> qs;
        while (true) {
            std::int64_t v = parse_int();
            if (v < 1)
                fail("partition indices are 1-based");
            qs.push_back(static_cast<uint32_t>(v - 1));
            if (peek().kind == Tok::comma) {
                take();
                continue;
            }
            break;
        }
        expect(Tok::rbrace, "'}'");
        std::vector<uint32_t> sorted = qs;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            fail("repeated qubit inside a partition block");
        return qs;
    }

    struct Element {
        std::vector<AdditiveOperator> terms;    // local width when annotated
        std::optional<std::vector<uint32_t>> block;  // 0-based, listed order
        size_t col;
    };

    Element parse_element() {
        Element e;
        e.col = peek().col;
        // Lookahead for "(" branch ")" ["@{...}"]: either a partition
        // group or a parenthesized branch as printed inside unions.  A
        // parenthesized *sum* followed by more sum syntax stays a term.
        if (peek().kind == Tok::lparen && !paren_is_coeff()) {
            size_t save = pos_;
            take();
            std::vector<AdditiveOperator> terms;
            terms.push_back(parse_sum());
            while (peek().kind == Tok::amp) {
                take();
                terms.push_back(parse_sum());
            }
            Tok after = peek(1).kind;
            if (peek().kind == Tok::rparen &&
                (after == Tok::at || after == Tok::amp || after == Tok::bar ||
                 after == Tok::arrow || after == Tok::end)) {
                take();
                e.terms = std::move(terms);
                if (peek().kind == Tok::at)
                    e.block = parse_block();
                return e;
            }
            pos_ = save;  // plain parenthesized sum; reparse as one term
        }
        e.terms.push_back(parse_sum());
        if (peek().kind == Tok::at)
            e.block = parse_block();
        return e;
    }

    Branch parse_branch() {
        std::vector<Element> elems;
        elems.push_back(parse_element());
        while (peek().kind == Tok::amp) {
            take();
            elems.push_back(parse_element());
        }
        // Width: bare elements carry the full width; annotated ones are
        // local to their block.
        uint32_t n = 0;
        for (auto& e : elems) {
            if (e.block) {
                for (uint32_t q : *e.block)
                    n = std::max(n, q + 1);
            } else {
                for (auto& t : e.terms)
                    n = std::max(n, t.n);
            }
        }
        Branch b(n);
        std::vector<bool> used(n, false);
        for (auto& e : elems) {
            if (e.block) {
                if (e.terms[0].n != e.block->size())
                    throw parse_error(line_, e.col,
                                      "annotated term width differs from its block size");
                for (uint32_t q : *e.block) {
                    if (used[q])
                        throw parse_error(line_, e.col,
                                          "partition blocks overlap at qubit " +
                                              std::to_string(q + 1));
                    used[q] = true;
                }
                Partition part;
                part.qubits = *e.block;
                std::sort(part.qubits.begin(), part.qubits.end());
                for (auto& t : e.terms) {
                    if (t.n != e.block->size())
                        throw parse_error(line_, e.col,
                                          "annotated term width differs from its block size");
                    part.term_indices.push_back(b.terms.size());
                    b.terms.push_back(t.embed(n, *e.block));
                }
                b.partitions.push_back(std::move(part));
            } else {
                for (auto& t : e.terms) {
                    if (t.n != n)
                        throw parse_error(line_, e.col,
                                          "terms of one branch act on different widths");
                    b.terms.push_back(t);
                }
            }
        }
        for (auto& t : b.terms) {
            if (t.empty())
                throw parse_error(line_, elems[0].col, "term is identically zero");
            if (!t.is_valid())
                throw parse_error(line_, elems[0].col,
                                  "term `" + t.str() + "` does not square to the identity");
        }
        return b;
    }

    QType parse_union() {
        std::vector<Branch> branches;
        branches.push_back(parse_branch());
        while (peek().kind == Tok::bar) {
            take();
            branches.push_back(parse_branch());
        }
        uint32_t n = 0;
        for (auto& b : branches)
            n = std::max(n, b.n);
        for (auto& b : branches)
            if (b.n != n)
                fail("union branches act on different qubit counts");
        QType t(n);
        t.branches = std::move(branches);
        return t;
    }
};

}  // namespace detail

/// Parse a type expression.  Throws parse_error.
inline QType parse_type(const std::string& text, const ParseOptions& opt = {},
                        size_t line = 1) {
    return detail::TypeParser(text, line, opt).parse_type();
}

/// Parse a top-level arrow `A -> B`.
inline std::pair<QType, QType> parse_arrow(const std::string& text,
                                           const ParseOptions& opt = {},
                                           size_t line = 1) {
    return detail::TypeParser(text, line, opt).parse_arrow();
}

/// True when the text is an arrow rather than a plain type.
inline bool looks_like_arrow(const std::string& text) {
    return detail::TypeParser(text, 1, {}).at_arrow_toplevel();
}

// -------------------------------------------------------------- programs ---

namespace detail {

struct Stmt {
    std::string head;                // uppercased name
    std::vector<std::string> args;   // raw operand tokens
    size_t line, col;
};

/// Strip '#' line comments and '(* ... *)' block comments, preserving
/// newlines so error positions stay meaningful.
inline std::string strip_comments(const std::string& text, size_t base_line) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0, line = base_line;
    while (i < text.size()) {
        if (text[i] == '#') {
            while (i < text.size() && text[i] != '\n')
                ++i;
        } else if (text.compare(i, 2, "(*") == 0) {
            size_t close = text.find("*)", i + 2);
            if (close == std::string::npos)
                throw parse_error(line, 1, "unterminated '(*' comment");
            for (size_t j = i; j < close + 2; ++j)
                if (text[j] == '\n') {
                    out += '\n';
                    ++line;
                }
            i = close + 2;
        } else {
            if (text[i] == '\n')
                ++line;
            out += text[i++];
        }
    }
    return out;
}

inline std::string upper(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline bool is_identifier(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

struct CompositeDef {
    std::vector<std::string> params;  // uppercased formal names
    std::vector<Op> body;             // with placeholder indices; see expand()
    std::vector<std::vector<int>> operand_map;  // per body op: param index or
                                                // -(absolute+1) for literals
};

class ProgramParser {
  public:
    ProgramParser(const std::string& text, const ParseOptions& opt) : opt_(opt) {
        std::string clean = strip_comments(text, 1);
        split_statements(clean);
    }

    Program parse() {
        Program p;
        bool have_qubits = false;
        for (size_t s = 0; s < stmts_.size(); ++s) {
            const Stmt& st = stmts_[s];
            if (st.head == "QUBITS") {
                if (have_qubits)
                    throw parse_error(st.line, st.col, "duplicate QUBITS declaration");
                if (st.args.size() != 1)
                    throw parse_error(st.line, st.col, "QUBITS takes one integer");
                long v = to_int(st, 0);
                if (v < 1 || v > 4096)
                    throw parse_error(st.line, st.col, "qubit count out of range");
                p.n = static_cast<uint32_t>(v);
                have_qubits = true;
                continue;
            }
            if (!have_qubits)
                throw parse_error(st.line, st.col,
                                  "QUBITS must be declared before '" + st.head + "'");
            if (st.head == "INIT" || st.head == "EXPECT") {
                QType t = parse_type(join_args(st), opt_, st.line);
                if (t.n > p.n)
                    throw parse_error(st.line, st.col,
                                      st.head + " type uses more qubits than declared");
                widen(t, p.n);
                (st.head == "INIT" ? p.init : p.expect) = std::move(t);
                continue;
            }
            if (st.head == "GATE") {
                s = parse_definition(s);
                continue;
            }
            if (st.head == "}")
                throw parse_error(st.line, st.col, "unmatched '}'");
            append_stmt(p, st);
        }
        return p;
    }

  private:
    const ParseOptions& opt_;
    std::vector<Stmt> stmts_;
    std::map<std::string, CompositeDef> defs_;

    static long to_int(const Stmt& st, size_t i) {
        const std::string& a = st.args[i];
        if (a.empty() ||
            !std::all_of(a.begin(), a.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw parse_error(st.line, st.col, "expected an integer, got '" + a + "'");
        return std::stol(a);
    }

    static std::string join_args(const Stmt& st) {
        std::string s;
        for (auto& a : st.args) {
            if (!s.empty())
                s += " ";
            s += a;
        }
        return s;
    }

    static void widen(QType& t, uint32_t n) {
        if (t.n == n)
            return;
        // Types narrower than the declaration pad with identity qubits.
        QType w(n);
        for (auto& b : t.branches) {
            Branch nb(n);
            nb.partitions = b.partitions;
            for (auto& term : b.terms) {
                std::vector<uint32_t> at(term.n);
                for (uint32_t i = 0; i < term.n; ++i)
                    at[i] = i;
                nb.terms.push_back(term.embed(n, at));
            }
            w.branches.push_back(std::move(nb));
        }
        t = std::move(w);
    }

    void split_statements(const std::string& clean) {
        size_t line = 1;
        size_t i = 0;
        while (i <= clean.size()) {
            size_t eol = clean.find_first_of(";\n", i);
            std::string piece = clean.substr(i, (eol == std::string::npos ? clean.size() : eol) - i);
            tokenize_statement(piece, line);
            if (eol == std::string::npos)
                break;
            if (clean[eol] == '\n')
                ++line;
            i = eol + 1;
        }
    }

    void tokenize_statement(const std::string& piece, size_t line) {
        // '{' and '}' separate tokens even when glued to a name.
        std::vector<std::pair<std::string, size_t>> words;
        size_t i = 0;
        while (i < piece.size()) {
            if (std::isspace(static_cast<unsigned char>(piece[i]))) {
                ++i;
                continue;
            }
            size_t start = i;
            if (piece[i] == '{' || piece[i] == '}') {
                words.push_back({piece.substr(i, 1), start + 1});
                ++i;
                continue;
            }
            while (i < piece.size() && !std::isspace(static_cast<unsigned char>(piece[i])) &&
                   piece[i] != '{' && piece[i] != '}')
                ++i;
            words.push_back({piece.substr(start, i - start), start + 1});
        }
        if (words.empty())
            return;
        Stmt st;
        st.line = line;
        st.col = words[0].second;
        std::string head = upper(words[0].first);
        // INIT/EXPECT swallow the raw remainder (types contain '{', '}').
        if (head == "INIT" || head == "EXPECT") {
            st.head = head;
            size_t after = piece.find_first_not_of(
                " \t", words[0].second - 1 + words[0].first.size());
            st.args = {after == std::string::npos ? "" : piece.substr(after)};
            stmts_.push_back(std::move(st));
            return;
        }
        st.head = head;
        for (size_t w = 1; w < words.size(); ++w) {
            if (words[w].first == "{" || words[w].first == "}") {
                if (!st.head.empty() || !st.args.empty())
                    stmts_.push_back(st);
                Stmt brace;
                brace.line = line;
                brace.col = words[w].second;
                brace.head = words[w].first;
                stmts_.push_back(std::move(brace));
                st = Stmt{};
                st.line = line;
                st.col = words[w].second;
                continue;
            }
            if (st.head.empty()) {
                st.head = upper(words[w].first);
                st.col = words[w].second;
            } else {
                st.args.push_back(words[w].first);
            }
        }
        if (!st.head.empty())
            stmts_.push_back(std::move(st));
    }

    /// Parse `GATE name params { body }` starting at stmts_[s]; returns the
    /// index of the closing brace.
    size_t parse_definition(size_t s) {
        const Stmt& head = stmts_[s];
        if (head.args.empty())
            throw parse_error(head.line, head.col, "GATE needs a name");
        std::string name = upper(head.args[0]);
        if (!is_identifier(head.args[0]))
            throw parse_error(head.line, head.col, "bad gate name '" + head.args[0] + "'");
        if (opcode_by_name(name) || defs_.count(name))
            throw parse_error(head.line, head.col,
                              "gate '" + head.args[0] + "' is already defined");
        CompositeDef def;
        for (size_t i = 1; i < head.args.size(); ++i) {
            if (!is_identifier(head.args[i]))
                throw parse_error(head.line, head.col,
                                  "bad parameter name '" + head.args[i] + "'");
            def.params.push_back(upper(head.args[i]));
        }
        size_t i = s + 1;
        if (i >= stmts_.size() || stmts_[i].head != "{")
            throw parse_error(head.line, head.col, "expected '{' after GATE header");
        ++i;
        for (; i < stmts_.size() && stmts_[i].head != "}"; ++i) {
            const Stmt& st = stmts_[i];
            if (st.head == "QUBITS" || st.head == "INIT" || st.head == "EXPECT" ||
                st.head == "GATE")
                throw parse_error(st.line, st.col,
                                  "'" + st.head + "' cannot appear inside a GATE body");
            append_body_stmt(def, st);
        }
        if (i >= stmts_.size())
            throw parse_error(head.line, head.col, "missing '}' for GATE '" + name + "'");
        defs_[name] = std::move(def);
        return i;
    }

    int resolve_operand(const CompositeDef& def, const Stmt& st, const std::string& tok) {
        std::string u = upper(tok);
        for (size_t p = 0; p < def.params.size(); ++p)
            if (def.params[p] == u)
                return static_cast<int>(p);
        if (!tok.empty() &&
            std::all_of(tok.begin(), tok.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return -(std::stoi(tok) + 1);  // absolute 1-based literal
        throw parse_error(st.line, st.col, "unknown operand '" + tok + "'");
    }

    void append_body_stmt(CompositeDef& def, const Stmt& st) {
        // Expanded against dummy indices now (validating names/arity) and
        // re-targeted per call site through operand_map.
        std::vector<Op> ops;
        std::vector<std::vector<int>> maps;
        if (st.head == "MEAS") {
            if (st.args.size() != 1)
                throw parse_error(st.line, st.col, "MEAS takes one qubit");
            ops.push_back(Op::measure(0));
            maps.push_back({resolve_operand(def, st, st.args[0])});
        } else if (auto code = opcode_by_name(st.head)) {
            if (st.args.size() != opcode_arity(*code))
                throw parse_error(st.line, st.col,
                                  "'" + st.head + "' expects " +
                                      std::to_string(opcode_arity(*code)) + " operand(s)");
            std::vector<uint32_t> dummy(st.args.size(), 0);
            std::vector<int> m;
            for (auto& a : st.args)
                m.push_back(resolve_operand(def, st, a));
            ops.push_back(Op::gate(*code, dummy));
            maps.push_back(std::move(m));
        } else if (auto it = defs_.find(st.head); it != defs_.end()) {
            const CompositeDef& callee = it->second;
            if (st.args.size() != callee.params.size())
                throw parse_error(st.line, st.col,
                                  "'" + st.head + "' expects " +
                                      std::to_string(callee.params.size()) + " operand(s)");
            std::vector<int> outer;
            for (auto& a : st.args)
                outer.push_back(resolve_operand(def, st, a));
            for (size_t b = 0; b < callee.body.size(); ++b) {
                std::vector<int> m;
                for (int slot : callee.operand_map[b])
                    m.push_back(slot >= 0 ? outer[slot] : slot);
                ops.push_back(callee.body[b]);
                maps.push_back(std::move(m));
            }
        } else {
            throw parse_error(st.line, st.col, "unknown gate '" + st.head + "'");
        }
        for (size_t j = 0; j < ops.size(); ++j) {
            def.body.push_back(std::move(ops[j]));
            def.operand_map.push_back(std::move(maps[j]));
        }
    }

    void check_indices(const Stmt& st, Program& p, std::vector<uint32_t>& qs) {
        for (uint32_t q : qs)
            if (q >= p.n)
                throw parse_error(st.line, st.col,
                                  "qubit " + std::to_string(q + 1) + " out of range (QUBITS " +
                                      std::to_string(p.n) + ")");
        std::vector<uint32_t> sorted = qs;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw parse_error(st.line, st.col, "repeated qubit operand");
    }

    std::vector<uint32_t> parse_operands(const Stmt& st, Program& p, size_t arity) {
        if (st.args.size() != arity)
            throw parse_error(st.line, st.col,
                              "'" + st.head + "' expects " + std::to_string(arity) +
                                  " operand(s), got " + std::to_string(st.args.size()));
        std::vector<uint32_t> qs;
        for (size_t i = 0; i < st.args.size(); ++i) {
            long v = to_int(st, i);
            if (v < 1)
                throw parse_error(st.line, st.col, "qubit indices are 1-based");
            qs.push_back(static_cast<uint32_t>(v - 1));
        }
        check_indices(st, p, qs);
        return qs;
    }

    void append_stmt(Program& p, const Stmt& st) {
        if (st.head == "MEAS") {
            auto qs = parse_operands(st, p, 1);
            p.ops.push_back(Op::measure(qs[0]));
            return;
        }
        if (auto code = opcode_by_name(st.head)) {
            auto qs = parse_operands(st, p, opcode_arity(*code));
            p.ops.push_back(Op::gate(*code, qs));
            return;
        }
        if (auto it = defs_.find(st.head); it != defs_.end()) {
            const CompositeDef& def = it->second;
            auto qs = parse_operands(st, p, def.params.size());
            for (size_t b = 0; b < def.body.size(); ++b) {
                std::vector<uint32_t> at;
                for (int slot : def.operand_map[b]) {
                    uint32_t q = slot >= 0 ? qs[slot] : static_cast<uint32_t>(-slot - 1);
                    at.push_back(q);
                }
                Stmt expanded = st;
                check_indices(expanded, p, at);
                Op op = def.body[b];
                op.qubits = at;
                op.text = op.meas ? "MEAS " + std::to_string(at[0] + 1)
                                  : Op::gate(op.code, at).text;
                p.ops.push_back(std::move(op));
            }
            return;
        }
        throw parse_error(st.line, st.col, "unknown gate '" + st.head + "'");
    }
};

}  // namespace detail

/// Parse a full source file into an inlined program.
inline Program parse_program(const std::string& text, const ParseOptions& opt = {}) {
    return detail::ProgramParser(text, opt).parse();
}

/// Canonical rendering; parse(print(parse(t))) is a fixed point.
inline std::string print_program(const Program& p) {
    std::string out = "QUBITS " + std::to_string(p.n) + "\n";
    if (p.init)
        out += "INIT " + type_str(*p.init) + "\n";
    for (auto& op : p.ops)
        out += op.text + "\n";
    if (p.expect)
        out += "EXPECT " + type_str(*p.expect) + "\n";
    return out;
}

}  // namespace qtyper
