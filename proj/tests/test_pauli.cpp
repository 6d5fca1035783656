// Pauli words, phases, products, and the Clifford conjugation tables.
#include <catch2/catch_amalgamated.hpp>

#include "qtyper/pauli.hpp"

using namespace qtyper;

namespace {
PauliString P(const std::string& s) {
    auto p = parse_pauli(s);
    REQUIRE(p.has_value());
    return *p;
}
}  // namespace

TEST_CASE("letter encoding round-trips", "[pauli]") {
    PauliBits w(4);
    w.set_letter(0, Letter::I);
    w.set_letter(1, Letter::X);
    w.set_letter(2, Letter::Z);
    w.set_letter(3, Letter::Y);
    CHECK(w.letters() == "IXZY");
    CHECK(w.letter(0) == Letter::I);
    CHECK(w.letter(1) == Letter::X);
    CHECK(w.letter(2) == Letter::Z);
    CHECK(w.letter(3) == Letter::Y);
}

TEST_CASE("single-qubit products follow the Pauli algebra", "[pauli]") {
    // XY = iZ, YX = -iZ, XZ = -iY, ZX = iY, YZ = iX, ZY = -iX
    CHECK((P("X") * P("Y")).str() == "iZ");
    CHECK((P("Y") * P("X")).str() == "-iZ");
    CHECK((P("X") * P("Z")).str() == "-iY");
    CHECK((P("Z") * P("X")).str() == "iY");
    CHECK((P("Y") * P("Z")).str() == "iX");
    CHECK((P("Z") * P("Y")).str() == "-iX");
    for (const char* s : {"X", "Y", "Z"})
        CHECK((P(s) * P(s)).str() == "I");
}

TEST_CASE("multi-qubit products multiply letterwise with phase bookkeeping", "[pauli]") {
    CHECK((P("XX") * P("ZZ")).str() == "-YY");
    CHECK((P("XZ") * P("ZX")).str() == "YY");
    CHECK((P("IX") * P("ZI")).str() == "ZX");
    CHECK((P("-ZI") * P("IX")).str() == "-ZX");
}

TEST_CASE("hermiticity and sign", "[pauli]") {
    CHECK(P("XYZ").is_hermitian());
    CHECK(P("-XYZ").is_hermitian());
    CHECK(P("XYZ").sign() == +1);
    CHECK(P("-XYZ").sign() == -1);
    CHECK_FALSE((P("X") * P("Y")).is_hermitian());  // iZ
    CHECK((-P("Z")).str() == "-Z");
    CHECK((-(-P("Z"))).str() == "Z");
}

TEST_CASE("commutation is decided by anticommuting-position parity", "[pauli]") {
    CHECK(commutes(P("XX").w, P("ZZ").w));
    CHECK_FALSE(commutes(P("XI").w, P("ZI").w));
    CHECK(commutes(P("XI").w, P("IZ").w));
    CHECK(commutes(P("XXX").w, P("ZZI").w));  // two clashing positions commute
    CHECK(commutes(P("XYZ").w, P("YXZ").w));  // X/Y and Y/X clash twice
    CHECK_FALSE(commutes(P("XII").w, P("YII").w));
}

TEST_CASE("parse accepts signs and rejects junk", "[pauli]") {
    CHECK(P("-XIZ").str() == "-XIZ");
    CHECK(P("iX").str() == "iX");
    CHECK(P("-iX").str() == "-iX");
    CHECK_FALSE(parse_pauli("XQ").has_value());
    CHECK_FALSE(parse_pauli("").has_value());
    CHECK(PauliString::single(3, 1, Letter::Y, true).str() == "-IYI");
}

TEST_CASE("conjugation tables match the textbook Clifford action", "[pauli]") {
    auto conj = [](const std::string& in, auto&& f) {
        PauliString p = P(in);
        f(p);
        return p.str();
    };
    // H: X <-> Z, Y -> -Y
    CHECK(conj("X", [](PauliString& p) { apply_h(p, 0); }) == "Z");
    CHECK(conj("Z", [](PauliString& p) { apply_h(p, 0); }) == "X");
    CHECK(conj("Y", [](PauliString& p) { apply_h(p, 0); }) == "-Y");
    // S: X -> Y, Y -> -X, Z fixed
    CHECK(conj("X", [](PauliString& p) { apply_s(p, 0); }) == "Y");
    CHECK(conj("Y", [](PauliString& p) { apply_s(p, 0); }) == "-X");
    CHECK(conj("Z", [](PauliString& p) { apply_s(p, 0); }) == "Z");
    // Sdg inverts S
    CHECK(conj("Y", [](PauliString& p) { apply_sdg(p, 0); }) == "X");
    CHECK(conj("X", [](PauliString& p) { apply_sdg(p, 0); }) == "-Y");
    // Pauli frame flips
    CHECK(conj("Z", [](PauliString& p) { apply_x(p, 0); }) == "-Z");
    CHECK(conj("X", [](PauliString& p) { apply_z(p, 0); }) == "-X");
    CHECK(conj("X", [](PauliString& p) { apply_y(p, 0); }) == "-X");
    CHECK(conj("Z", [](PauliString& p) { apply_y(p, 0); }) == "-Z");
    // CNOT: XI -> XX, IX -> IX, ZI -> ZI, IZ -> ZZ, YY -> -XZ
    CHECK(conj("XI", [](PauliString& p) { apply_cnot(p, 0, 1); }) == "XX");
    CHECK(conj("IX", [](PauliString& p) { apply_cnot(p, 0, 1); }) == "IX");
    CHECK(conj("ZI", [](PauliString& p) { apply_cnot(p, 0, 1); }) == "ZI");
    CHECK(conj("IZ", [](PauliString& p) { apply_cnot(p, 0, 1); }) == "ZZ");
    CHECK(conj("YY", [](PauliString& p) { apply_cnot(p, 0, 1); }) == "-XZ");
    // CZ: XI -> XZ, IX -> ZX, ZZ fixed
    CHECK(conj("XI", [](PauliString& p) { apply_cz(p, 0, 1); }) == "XZ");
    CHECK(conj("IX", [](PauliString& p) { apply_cz(p, 0, 1); }) == "ZX");
    CHECK(conj("ZZ", [](PauliString& p) { apply_cz(p, 0, 1); }) == "ZZ");
}

TEST_CASE("conjugations preserve products", "[pauli][property]") {
    // phi(pq) = phi(p) phi(q) for each table entry, over all two-letter pairs
    const char* letters = "IXZY";
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            PauliString p = P(std::string(1, letters[i]) + std::string(1, letters[j]));
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    PauliString q = P(std::string(1, letters[a]) + std::string(1, letters[b]));
                    PauliString lhs = p * q;
                    apply_cnot(lhs, 0, 1);
                    PauliString cp = p, cq = q;
                    apply_cnot(cp, 0, 1);
                    apply_cnot(cq, 0, 1);
                    CHECK(lhs.str() == (cp * cq).str());
                }
        }
}
