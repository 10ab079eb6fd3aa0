#include "support.hpp"

#include "surfalg/invariants.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace surfalg;
using testing::load;

namespace {

RibbonGraph ribbon(const std::string& name, std::int64_t& prime) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/ribbon/" + name + ".json");
    return ribbonFromJson(nlohmann::json::parse(in), prime);
}

std::string errorName(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.name();
    }
    return "";
}

}  // namespace

TEST_CASE("Brauer graph algebras of ribbon graphs", "[invariants][brauer]") {
    for (const auto& name : {"loop", "star3", "theta", "t5"}) {
        INFO(name);
        std::int64_t p = 0;
        RibbonGraph g = ribbon(name, p);
        Algebra A(ribbonGraphToSurface(g, p));
        BrauerReport r = brauerCompare(A, brauerDataOf(g, p));
        CHECK(r.identityIdentification);
        CHECK(r.dimension == r.brauerDimension);
        CHECK(r.ok);
    }
}

TEST_CASE("Brauer comparison needs sparseness", "[invariants][brauer]") {
    CHECK(errorName([] { brauerCompare(Algebra(load("t4"))); }) == "NotSparse");
    // a monogon of multiplicity two changes generators: only the centres are compared
    BrauerReport r = brauerCompare(Algebra(load("t2_m2_n2")));
    CHECK_FALSE(r.identityIdentification);
    CHECK(r.ok);
}

TEST_CASE("Brauer table has the expected rank", "[invariants][brauer]") {
    // idempotent and socle element per edge, plus m d - 1 windings per edge end
    std::int64_t p = 0;
    BrauerTable B(brauerDataOf(ribbon("star3", p), p));
    int expected = 3 * 2 + (1 * 3 - 1) * 3 + (1 - 1) + (2 - 1) + (3 - 1);
    CHECK(B.dim() == expected);
}

TEST_CASE("trivial extension of boundary-only algebras", "[invariants]") {
    for (const auto& name : {"annulus", "fan", "square_diagonal", "square_heavy"}) {
        INFO(name);
        TrivialExtensionReport r = trivialExtensionCheck(Algebra(load(name)));
        CHECK(r.extensionDim == r.brauerDim);
        CHECK(r.ok);
    }
    CHECK(errorName([] { trivialExtensionCheck(Algebra(load("t1"))); }) == "PreconditionFailed");
}

TEST_CASE("idempotent restriction", "[invariants]") {
    int pairs = 0;
    for (const auto& name : {"t1", "t3_m2", "t4", "secflip_m1", "spectria2", "annulus_punctured", "torus1"}) {
        Surface s = load(name);
        Algebra A(s);
        for (int drop = 0; drop < s.numArcs; ++drop) {
            std::vector<int> keep;
            for (int e = 0; e < s.numArcs; ++e)
                if (e != drop) keep.push_back(e);
            INFO(name << " without " << s.edges[drop].id);
            RestrictionReport r = restrictionCheck(A, keep);
            CHECK(r.restrictedDim == r.subDim);
            CHECK(r.ok);
            ++pairs;
        }
    }
    // two arcs removed at once
    Surface t4 = load("t4");
    RestrictionReport r = restrictionCheck(Algebra(t4), {0, 2, 4, 5});
    CHECK(r.ok);
    CHECK(pairs >= 5);
}

TEST_CASE("retagging at a special puncture", "[invariants]") {
    for (int m : {1, 2, 3}) {
        Surface s = load("t2_m" + std::to_string(m) + "_n1");
        Algebra A(s);
        auto mons = s.specialMonogons();
        REQUIRE(mons.size() == 1);
        RetagReport r = retagCheck(A, mons[0].side);
        CHECK(r.bijective);
        CHECK(r.multiplicative);
    }
    Surface sf = load("weights/selffolded4");
    CHECK(errorName([&] { retagCheck(Algebra(sf), sf.specialMonogons()[0].side); }) == "RadiusArcPresent");
}

TEST_CASE("Jacobian relations vanish", "[invariants][jacobian]") {
    for (const auto& name : {"t4", "torus1", "large/t4_m1112", "large/torus2"}) {
        INFO(name);
        JacobianReport r = jacobianCheck(Algebra(load(name)));
        CHECK(r.arrows > 0);
        CHECK(r.ok());
    }
    CHECK(errorName([] { jacobianCheck(Algebra(load("t1"))); }) == "PreconditionFailed");
}

TEST_CASE("bimodule resolution is exact", "[invariants][resolution]") {
    for (const auto& name : {"t4", "torus1", "sphere3_m222"}) {
        INFO(name);
        ResolutionReport r = verifyBimoduleResolution(Algebra(load(name)));
        CHECK(r.alphaBetaZero);
        CHECK(r.betaGammaZero);
        CHECK(r.exact);
        CHECK(r.gammaSelfDual);
        // alpha is onto A and beta maps onto its kernel
        CHECK(r.rankAlpha == r.dimDelta);
        CHECK(r.rankBeta == r.dimP0 - r.dimDelta);
    }
}

TEST_CASE("flips preserve derived invariants", "[invariants][flip]") {
    for (int m : {1, 2}) {
        Surface t3 = load("t3_m" + std::to_string(m));
        FlipReport r = checkFlipInvariants(t3, t3.arcIndex("e_MP"));
        CHECK(r.invariantsAgree);
        CHECK(r.roundTrip);
        InvariantTuple other = derivedInvariants(Algebra(load("secflip_m" + std::to_string(m))));
        CHECK(r.before.derivedEqual(other));
    }
    std::vector<std::pair<std::string, int>> candidates;
    for (const auto& name : testing::fixtureNames()) {
        Surface s = load(name);
        for (int e = 0; e < s.numArcs; ++e)
            if (!s.isCloseToBoundary(e)) candidates.push_back({name, e});
    }
    std::mt19937 rng(20240611);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    int done = 0;
    for (const auto& [name, e] : candidates) {
        if (done == 12) break;
        Surface s = load(name);
        INFO(name << " " << s.edges[e].id);
        FlipReport r;
        try {
            r = checkFlipInvariants(s, e);
        } catch (const Error& err) {
            CHECK(err.name() == "DegenerateFlip");
            continue;
        }
        CHECK(r.invariantsAgree);
        CHECK(r.roundTrip);
        ++done;
    }
    CHECK(done == 12);
}

TEST_CASE("tame weights", "[invariants][weights]") {
    for (const auto& name : {"sphere3_m222", "sphere3_m223", "torus1", "large/torus2", "large/t4_m1112",
                             "weights/selffolded4"}) {
        INFO(name);
        Surface s = load(name);
        TameWeights w = tameWeights(s);
        CHECK(weightsValid(s, w));
    }
    bool selfFolded = false;
    Surface sf = load("weights/selffolded4");
    for (const auto& f : sf.faces()) selfFolded = selfFolded || isSpecialSelfFolded(sf, f);
    CHECK(selfFolded);
    CHECK(errorName([] { tameWeights(load("t4")); }) == "ExceptionalTriangulation");
    CHECK(errorName([] { tameWeights(load("spectria2")); }) == "ExceptionalTriangulation");
    CHECK(errorName([] { tameWeights(load("t1")); }) == "NotATriangulation");
}

TEST_CASE("weight constraints checked independently", "[invariants][weights]") {
    // recompute both constraints from the raw weights
    for (const auto& name : {"torus1", "weights/selffolded4"}) {
        INFO(name);
        Surface s = load(name);
        TameWeights w = tameWeights(s);
        for (const auto& [a, x] : w.p) CHECK(s.S(0) < x);
        for (int p = 0; p < s.numPoints(); ++p) {
            if (!s.isVertex(p)) continue;
            Scalar total = s.S(0);
            for (int h : s.rotation[p]) total += w.p.at(h);
            CHECK(total * s.S(s.m(p)) == w.kappa);
        }
        for (const auto& f : s.faces()) {
            Scalar t = s.S(0);
            for (int h : f.sides) t += w.p.at(h);
            bool selfFolded = false;
            for (int x : f.sides) {
                if (std::find(f.sides.begin(), f.sides.end(), Surface::opp(x)) == f.sides.end()) continue;
                for (int q : {s.start(x), s.end(x)}) selfFolded = selfFolded || (s.degree(q) == 1 && s.m(q) == 1);
            }
            if (selfFolded) CHECK(w.kappa < t);
            else CHECK(t < w.kappa);
        }
    }
}

TEST_CASE("derived invariants of small examples", "[invariants]") {
    InvariantTuple t = derivedInvariants(Algebra(load("t2_m1_n1")));
    CHECK(t.numSimples == 2);
    CHECK(t.totalRank == 4);
    InvariantTuple u = derivedInvariants(Algebra(load("t4")));
    CHECK(u.numSimples == 6);
    CHECK(u.symmetric);
}
