#include "support.hpp"

#include "surfalg/oracle.hpp"

#include <catch_amalgamated.hpp>

using namespace surfalg;
using testing::load;

TEST_CASE("truncated path algebra agrees with the engine", "[oracle]") {
    int checked = 0;
    for (const auto& name : testing::fixtureNames()) {
        Surface s = load(name);
        if (!s.specialMonogons().empty()) continue;
        INFO(name);
        Algebra A(s);
        OracleReport r = bruteForceOracle(A);
        CHECK(r.dimension == A.dim());
        CHECK(r.dimensionAtL2 == r.dimension);
        CHECK(r.basisIndependent);
        CHECK(r.tableMatches);
        ++checked;
    }
    CHECK(checked >= 12);
}

TEST_CASE("oracle on the larger fixtures", "[oracle][large]") {
    for (const auto& name : testing::fixtureNames("large")) {
        INFO(name);
        Algebra A(load(name));
        OracleReport r = bruteForceOracle(A);
        CHECK(r.dimension == A.dim());
        CHECK(r.tableMatches);
    }
}

TEST_CASE("oracle refuses special monogons", "[oracle]") {
    Algebra A(load("t2_m1_n1"));
    try {
        bruteForceOracle(A);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.name() == "SpecialMonogonPresent");
        CHECK(e.exitCode() == 3);
    }
}

TEST_CASE("too short a truncation is detected", "[oracle]") {
    Algebra A(load("t4"));
    try {
        bruteForceOracle(A, 2);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.name() == "UnstableTruncation");
        CHECK(e.exitCode() == 4);
    }
}

TEST_CASE("path oracle dimension for a single loop", "[oracle]") {
    // T2 with m_M = 2, m_N = 2: rank 4 m_M = 8 once paths of length m_M + 1 vanish
    Surface s = load("t2_m2_n2");
    Presentation P(s);
    PathOracle o(P, 8);
    CHECK(o.dimension() == 8);
}
