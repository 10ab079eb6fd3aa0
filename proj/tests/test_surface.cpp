#include "support.hpp"

#include "surfalg/invariants.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace surfalg;
using testing::load;

namespace {

int errorCode(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.exitCode();
    }
    return 0;
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
    for (const auto& e : errs)
        if (e.find(what) != std::string::npos) return true;
    return false;
}

nlohmann::json rawFixture(const std::string& name) {
    std::ifstream in(testing::fixture(name));
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("every shipped fixture validates", "[surface]") {
    for (const auto& name : testing::allSurfaceFixtures()) {
        INFO(name);
        Surface s = load(name);
        CHECK(s.validate().empty());
        CHECK(s.eulerLeft() == s.eulerRight());
    }
}

TEST_CASE("serialization round trip and determinism", "[surface][io]") {
    for (const auto& name : testing::allSurfaceFixtures()) {
        INFO(name);
        Surface s = load(name);
        std::string once = dumpSurface(s);
        Surface t = parseSurface(once);
        CHECK(t.canonicalKey() == s.canonicalKey());
        CHECK(dumpSurface(t) == once);
    }
}

TEST_CASE("rotations are emitted from their least token", "[surface][io]") {
    auto doc = surfaceToJson(load("spectria2"));
    for (auto it = doc["rotations"].begin(); it != doc["rotations"].end(); ++it) {
        auto toks = it.value().get<std::vector<std::string>>();
        CHECK(toks.front() == *std::min_element(toks.begin(), toks.end()));
    }
}

TEST_CASE("parse errors carry exit code 2", "[surface][io]") {
    auto doc = rawFixture("t1");
    SECTION("unknown field") {
        doc["colour"] = "red";
        CHECK(errorCode([&] { surfaceFromJson(doc); }) == 2);
    }
    SECTION("missing coefficient") {
        doc["points"][0].erase("lambda");
        CHECK(errorCode([&] { surfaceFromJson(doc); }) == 2);
    }
    SECTION("unknown arc in a rotation") {
        doc["rotations"]["D"] = {"q-"};
        CHECK(errorCode([&] { surfaceFromJson(doc); }) == 2);
    }
    SECTION("unsupported version") {
        doc["version"] = 2;
        CHECK(errorCode([&] { surfaceFromJson(doc); }) == 2);
    }
    SECTION("composite modulus") {
        doc["ring"] = {{"kind", "Fp"}, {"p", 9}};
        CHECK(errorCode([&] { surfaceFromJson(doc); }) == 2);
    }
    SECTION("unicode minus is accepted") {
        doc["rotations"]["D"] = {"v\xE2\x88\x92"};
        CHECK(surfaceFromJson(doc).validate().empty());
    }
}

TEST_CASE("validation reports broken data", "[surface]") {
    SECTION("Euler characteristic") {
        auto doc = rawFixture("t1");
        doc["declared"]["genus"] = 1;
        CHECK(mentions(surfaceFromJson(doc).validate(), "EulerMismatch"));
    }
    SECTION("vanishing coefficient") {
        auto doc = rawFixture("t4");
        doc["points"][0]["lambda"] = 0;
        CHECK(mentions(surfaceFromJson(doc).validate(), "ZeroCoefficient"));
    }
    SECTION("sphere with three points of multiplicity one") {
        auto doc = rawFixture("sphere3_m222");
        for (auto& p : doc["points"]) p["m"] = 1;
        CHECK(mentions(surfaceFromJson(doc).validate(), "sphere-multiplicity"));
    }
    SECTION("nu vanishes on a four-punctured sphere") {
        auto doc = rawFixture("t4");
        for (auto& p : doc["points"]) p["lambda"] = 1;
        CHECK(mentions(surfaceFromJson(doc).validate(), "nu"));
    }
}

TEST_CASE("face tracing on T1", "[surface]") {
    Surface s = load("t1");
    // a triangle on w and two boundary segments, and a square around v
    CHECK(s.faces().size() == 2);
    std::multiset<size_t> sizes;
    for (const auto& f : s.faces()) sizes.insert(f.sides.size());
    CHECK(sizes == std::multiset<size_t>{3, 4});
    int A = s.pointIndex("A"), D = s.pointIndex("D");
    CHECK(s.degree(A) == 2);
    CHECK(s.degree(D) == 1);
    CHECK(s.isInterior(D));
}

TEST_CASE("classification trichotomy", "[surface]") {
    auto labels = [](const std::string& name) {
        Surface s = load(name);
        std::set<ComponentLabel> out;
        for (const auto& c : s.components()) {
            bool hasArc = false;
            for (int e : c) hasArc = hasArc || s.isArc(e);
            if (hasArc) out.insert(s.classifyComponent(c));
        }
        return out;
    };
    using L = std::set<ComponentLabel>;
    for (const auto& n : {"t2_m1_n1", "t2_m2_n2", "t2_m3_n1", "t3_m1", "t3_m2"}) {
        INFO(n);
        CHECK(labels(n) == L{ComponentLabel::FiniteRank});
    }
    CHECK(labels("square_heavy") == L{ComponentLabel::Lattice});
    CHECK(labels("punctured_triangle") == L{ComponentLabel::Lattice});
    CHECK(labels("fan") == L{ComponentLabel::Lattice});
    CHECK(labels("annulus_punctured") == L{ComponentLabel::NotFiniteOverCentre});
}

TEST_CASE("sparseness", "[surface]") {
    CHECK(load("t5").isSparse());
    CHECK(load("t2_m2_n2").isSparse());
    CHECK_FALSE(load("t1").isSparse());
    CHECK_FALSE(load("t4").isSparse());
    CHECK_FALSE(load("t2_m1_n1").isSparse());
}

TEST_CASE("special monogons", "[surface]") {
    CHECK(load("t2_m1_n1").specialMonogons().size() == 1);
    CHECK(load("t2_m2_n2").specialMonogons().empty());
    auto sf = load("weights/selffolded4").specialMonogons();
    REQUIRE(sf.size() == 1);
    CHECK(sf[0].radius >= 0);
}

TEST_CASE("flip of the triangle T3 gives the loop around M", "[surface][flip]") {
    for (int m : {1, 2}) {
        Surface t3 = load("t3_m" + std::to_string(m));
        Surface flipped = t3.flip(t3.arcIndex("e_MP"));
        // the new arc is the loop l_N traversed backwards
        auto doc = nlohmann::json::parse(dumpSurface(flipped));
        std::string text = doc.dump();
        auto swapTok = [&](const std::string& a, const std::string& b) {
            for (size_t at = text.find(a); at != std::string::npos; at = text.find(a, at + b.size()))
                text.replace(at, a.size(), b);
        };
        swapTok("\"e_MP+\"", "\"l_N@\"");
        swapTok("\"e_MP-\"", "\"l_N+\"");
        swapTok("\"l_N@\"", "\"l_N-\"");
        swapTok("\"e_MP\"", "\"l_N\"");
        Surface renamed = parseSurface(text);
        Surface expected = load("secflip_m" + std::to_string(m));
        INFO(m);
        CHECK(renamed.canonicalKey() == expected.canonicalKey());
    }
}

TEST_CASE("flip then inverse flip is the identity on combinatorial data", "[surface][flip]") {
    int checked = 0;
    for (const auto& name : testing::allSurfaceFixtures()) {
        Surface s = load(name);
        for (int e = 0; e < s.numArcs; ++e) {
            if (s.isCloseToBoundary(e)) continue;
            Surface f;
            try {
                f = s.flip(e);
            } catch (const Error& err) {
                CHECK(err.kind() == ErrorKind::Hypothesis);
                continue;
            }
            INFO(name << " " << s.edges[e].id);
            CHECK(f.validate().empty());
            CHECK(f.flip(e, true).canonicalKey(false) == s.canonicalKey(false));
            ++checked;
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("arcs close to the boundary are refused", "[surface][flip]") {
    Surface s = load("annulus");
    int u = s.arcIndex("u");
    CHECK(s.isCloseToBoundary(u));
    CHECK(errorCode([&] { s.flip(u); }) == 3);
}

TEST_CASE("coefficient mutation", "[surface][flip]") {
    SECTION("triangle with unit coefficients is unchanged") {
        Surface s = load("t3_m1");
        for (int e = 0; e < s.numArcs; ++e)
            for (int p = 0; p < s.numPoints(); ++p) CHECK(s.mutateCoefficients(e)[p] == s.lambda(p));
    }
    SECTION("loop around a lone special puncture") {
        Surface s = load("t2_m2_n1");
        auto lam = s.mutateCoefficients(s.arcIndex("u"));
        int M = s.pointIndex("M"), N = s.pointIndex("N");
        CHECK(lam[N] == -s.lambda(N));
        CHECK(lam[M] == s.lambda(M));  // nu is 1 away from the four-punctured sphere
    }
    SECTION("empty plus on the far side") {
        Surface s = load("t1");
        auto lam = s.mutateCoefficients(s.arcIndex("v"));
        int A = s.pointIndex("A"), B = s.pointIndex("B"), D = s.pointIndex("D");
        CHECK(lam[D] == -s.lambda(D));
        CHECK(lam[A] == -s.lambda(A));  // m_A = 1 is odd
        CHECK(lam[B] == s.lambda(B));
    }
    SECTION("coefficients never vanish") {
        for (const auto& name : testing::allSurfaceFixtures()) {
            Surface s = load(name);
            for (int e = 0; e < s.numArcs; ++e) {
                if (s.isCloseToBoundary(e)) continue;
                for (const auto& x : s.mutateCoefficients(e)) CHECK_FALSE(x.isZero());
            }
        }
    }
}

TEST_CASE("augmentation closes the surface", "[surface]") {
    Surface t1 = load("t1");
    Surface a = t1.augment();
    CHECK(a.isClosed());
    CHECK(a.validate().empty());
    CHECK(a.numPoints() == t1.numPoints() + 2);
    // Euler: one boundary circle becomes a face holding two new punctures
    Surface ann = load("annulus").augment();
    CHECK(ann.numPoints() == 3 + 4);
    CHECK(ann.validate().empty());
    CHECK(load("t4").augment().canonicalKey() == load("t4").canonicalKey());
}

TEST_CASE("ribbon graphs realize closed surfaces with holes", "[surface]") {
    RibbonGraph g;
    g.vertices = {{"v", 2, Scalar(1, 0)}};
    g.edges = {{"e", 0, 0}, {"f", 0, 0}};
    g.cyclic = {{{0, true}, {1, true}, {0, false}, {1, false}}};
    Surface s = ribbonGraphToSurface(g);
    CHECK(s.validate().empty());
    // one face with a hole: 1 - 2 + (1 - 1) = -1 = 2 - 2g - 1 gives g = 1
    CHECK(s.faces().size() == 1);
    CHECK(s.declaredBoundaryCount == 1);
    CHECK(s.declaredGenus == 1);
    CHECK(s.canonicalKey() == load("t5").canonicalKey());
}
