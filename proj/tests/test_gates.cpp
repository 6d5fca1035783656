// Gate semantics in the Heisenberg picture and T-count lower bounds.
#include <catch2/catch_amalgamated.hpp>

#include "qtyper/gates.hpp"
#include "qtyper/oracle.hpp"
#include "qtyper/parser.hpp"

using namespace qtyper;

namespace {
AdditiveOperator A(const std::string& s) { return parse_type(s).branches[0].terms[0]; }

GateSemantics controlled_z_power(uint32_t controls) {
    ReImParts parts = re_im_parts(builtin_expansion(OpCode::Z));
    return controlled_semantics(builtin_semantics(OpCode::Z), parts, controls);
}
}  // namespace

TEST_CASE("builtin generator images match the conjugation tables", "[gates]") {
    auto h = builtin_semantics(OpCode::H);
    CHECK(h.ximg[0] == A("Z"));
    CHECK(h.zimg[0] == A("X"));
    auto s = builtin_semantics(OpCode::S);
    CHECK(s.ximg[0] == A("Y"));
    CHECK(s.zimg[0] == A("Z"));
    auto t = builtin_semantics(OpCode::T);
    CHECK(t.ximg[0] == A("rt2/2(X + Y)"));
    CHECK(t.zimg[0] == A("Z"));
    auto tdg = builtin_semantics(OpCode::TDG);
    CHECK(tdg.ximg[0] == A("rt2/2(X - Y)"));
    auto cx = builtin_semantics(OpCode::CNOT);
    CHECK(cx.ximg[0] == A("XX"));
    CHECK(cx.ximg[1] == A("IX"));
    CHECK(cx.zimg[0] == A("ZI"));
    CHECK(cx.zimg[1] == A("ZZ"));
    auto cz = builtin_semantics(OpCode::CZ);
    CHECK(cz.ximg[0] == A("XZ"));
    CHECK(cz.ximg[1] == A("ZX"));
}

TEST_CASE("every builtin is certified against the dense matrix", "[gates][oracle]") {
    for (OpCode c : {OpCode::X, OpCode::Y, OpCode::Z, OpCode::H, OpCode::S, OpCode::SDG,
                     OpCode::T, OpCode::TDG, OpCode::CNOT, OpCode::CZ}) {
        GateSemantics g = builtin_semantics(c);
        Program p(g.n);
        std::vector<uint32_t> wires(g.n);
        for (uint32_t q = 0; q < g.n; ++q)
            wires[q] = q;
        p.ops = {Op::gate(c, wires)};
        oracle::Mat u = oracle::matrix_of(p);
        for (uint32_t q = 0; q < g.n; ++q) {
            PauliString xq = PauliString::single(g.n, q, Letter::X);
            PauliString zq = PauliString::single(g.n, q, Letter::Z);
            INFO(opcode_name(c));
            CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(xq), g.ximg[q]));
            CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(zq), g.zimg[q]));
        }
    }
}

TEST_CASE("image_of_word is multiplicative on products", "[gates][property]") {
    GateSemantics t = builtin_semantics(OpCode::T);
    // Y = iXZ, so image(Y) = i image(X) image(Z)
    AdditiveOperator yimg = t.image_of_word(parse_pauli("Y")->w);
    CHECK(yimg == A("rt2/2(Y - X)"));
    GateSemantics cx = builtin_semantics(OpCode::CNOT);
    oracle::Mat prod = oracle::matrix_of(cx.image_of_word(parse_pauli("XI")->w)) *
                       oracle::matrix_of(cx.image_of_word(parse_pauli("IZ")->w));
    CHECK(oracle::max_abs(prod - oracle::matrix_of(cx.image_of_word(parse_pauli("XZ")->w))) <
          1e-12);
}

TEST_CASE("controlled semantics reproduce CZ and the control-S arrow", "[gates]") {
    GateSemantics c1z = controlled_z_power(1);
    GateSemantics cz = builtin_semantics(OpCode::CZ);
    REQUIRE(c1z.n == 2);
    // wire order: controls first, target last
    CHECK(c1z.ximg[0] == cz.ximg[0]);
    CHECK(c1z.ximg[1] == cz.ximg[1]);
    CHECK(c1z.zimg[0] == cz.zimg[0]);
    CHECK(c1z.zimg[1] == cz.zimg[1]);

    ReImParts sparts = re_im_parts(builtin_expansion(OpCode::S));
    GateSemantics cs = controlled_semantics(builtin_semantics(OpCode::S), sparts, 1);
    // control-S sends X(control) to the CZ-type-weighted branch mixing S into
    // the target wire; certify numerically instead of pinning the formula.
    oracle::Mat u = oracle::Mat::Identity(4, 4);
    u(3, 3) = std::complex<double>(0, 1);
    for (uint32_t q = 0; q < 2; ++q) {
        PauliString xq = PauliString::single(2, q, Letter::X);
        PauliString zq = PauliString::single(2, q, Letter::Z);
        CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(xq), cs.ximg[q]));
        CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(zq), cs.zimg[q]));
    }
}

TEST_CASE("multiply controlled Z images certify against dense matrices for k = 1..4",
          "[gates][oracle]") {
    for (uint32_t k = 1; k <= 4; ++k) {
        GateSemantics g = controlled_z_power(k);
        const uint32_t n = k + 1;
        const size_t dim = size_t(1) << n;
        oracle::Mat u = oracle::Mat::Identity(dim, dim);
        u(dim - 1, dim - 1) = -1;  // phase on |1...1>
        for (uint32_t q = 0; q < n; ++q) {
            PauliString xq = PauliString::single(n, q, Letter::X);
            PauliString zq = PauliString::single(n, q, Letter::Z);
            INFO("k = " << k << ", qubit " << q);
            CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(xq), g.ximg[q]));
            CHECK(oracle::verify_arrow(u, AdditiveOperator::from_pauli(zq), g.zimg[q]));
        }
    }
}

TEST_CASE("the closed form for control^k-Z images holds for k = 1..6", "[gates]") {
    // X on a control of control^k-Z maps to X tensor control^(k-1)-Z on the
    // remaining wires: I - (1/2^(k-1)) sum over nonempty Z-subsets with
    // alternating signs.  That gives one Pauli for k = 1 and 2^k summands
    // otherwise, with maximal denominator exponent 2k - 2, the quantity the
    // T-count bound reads off.
    for (uint32_t k = 1; k <= 6; ++k) {
        GateSemantics g = controlled_z_power(k);
        const AdditiveOperator& img = g.ximg[0];
        INFO("k = " << k << ": " << img.str());
        CHECK(img.terms.size() == (k == 1 ? 1 : size_t(1) << k));
        unsigned max_e = 0;
        for (auto& t : img.terms) {
            // X stays on the acted wire; the rest is a Z/I word
            CHECK(t.word.letter(0) == Letter::X);
            for (uint32_t q = 1; q < g.n; ++q)
                CHECK((t.word.letter(q) == Letter::I || t.word.letter(q) == Letter::Z));
            auto e = t.c.denominator_exponent();
            REQUIRE(e.has_value());
            max_e = std::max(max_e, *e);
        }
        CHECK(max_e == (k == 1 ? 0 : 2 * k - 2));
        // Z on any wire stays a plain Pauli: diagonal gates fix Z words.
        for (uint32_t q = 0; q < g.n; ++q)
            CHECK(g.zimg[q].is_single_pauli());
    }
}

TEST_CASE("T-count lower bounds from denominator exponents", "[gates]") {
    CHECK(tcount_lower_bound(builtin_semantics(OpCode::H)) == 0u);
    CHECK(tcount_lower_bound(builtin_semantics(OpCode::S)) == 0u);
    CHECK(tcount_lower_bound(builtin_semantics(OpCode::T)) == 1u);
    CHECK(tcount_lower_bound(builtin_semantics(OpCode::TDG)) == 1u);
    for (uint32_t k = 2; k <= 6; ++k) {
        INFO("controls = " << k);
        CHECK(tcount_lower_bound(controlled_z_power(k)) == 2 * k - 2);
    }
}

TEST_CASE("controlled X and controlled S bounds", "[gates]") {
    ReImParts xparts = re_im_parts(builtin_expansion(OpCode::X));
    GateSemantics ccx = controlled_semantics(builtin_semantics(OpCode::X), xparts, 2);
    CHECK(tcount_lower_bound(ccx) == 2u);  // Toffoli needs at least 2 by this bound
    ReImParts sparts = re_im_parts(builtin_expansion(OpCode::S));
    GateSemantics cs = controlled_semantics(builtin_semantics(OpCode::S), sparts, 1);
    auto b = tcount_lower_bound(cs);
    REQUIRE(b.has_value());
    CHECK(*b >= 1u);  // control-S is not Clifford
}
