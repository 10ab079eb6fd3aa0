#include "support.hpp"

#include "surfalg/invariants.hpp"

#include <catch_amalgamated.hpp>

using namespace surfalg;

namespace {

nlohmann::json ribbonDoc(const std::string& name) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/ribbon/" + name + ".json");
    return nlohmann::json::parse(in);
}

int errorCode(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.exitCode();
    }
    return 0;
}

}  // namespace

TEST_CASE("ribbon documents", "[io]") {
    std::int64_t p = -1;
    RibbonGraph g = ribbonFromJson(ribbonDoc("star3"), p);
    CHECK(p == 0);
    CHECK(g.vertices.size() == 4);
    CHECK(g.edges.size() == 3);
    CHECK(g.vertices[3].lambda == Scalar::fromString("5/2", 0));
    CHECK(g.cyclic[0].size() == 3);

    auto doc = ribbonDoc("theta");
    SECTION("missing edge end") {
        doc["cyclic"]["q"] = {"a-", "c-"};
        CHECK(errorCode([&] { ribbonFromJson(doc, p); }) == 2);
    }
    SECTION("end at the wrong vertex") {
        doc["cyclic"]["q"] = {"a+", "c-", "b-"};
        CHECK(errorCode([&] { ribbonFromJson(doc, p); }) == 2);
    }
    SECTION("unknown field") {
        doc["extra"] = 1;
        CHECK(errorCode([&] { ribbonFromJson(doc, p); }) == 2);
    }
    SECTION("nonpositive multiplicity") {
        doc["vertices"][0]["m"] = 0;
        CHECK(errorCode([&] { ribbonFromJson(doc, p); }) == 2);
    }
}

TEST_CASE("imported ribbon graphs are valid sparse surfaces", "[io]") {
    for (const auto& name : {"loop", "star3", "theta", "t5"}) {
        INFO(name);
        std::int64_t p = 0;
        Surface s = ribbonGraphToSurface(ribbonFromJson(ribbonDoc(name), p), p);
        CHECK(s.validate().empty());
        CHECK(s.isSparse());
        CHECK(parseSurface(dumpSurface(s)).canonicalKey() == s.canonicalKey());
    }
}

TEST_CASE("shipped T5 matches its ribbon graph", "[io]") {
    std::int64_t p = 0;
    Surface s = ribbonGraphToSurface(ribbonFromJson(ribbonDoc("t5"), p), p);
    CHECK(dumpSurface(s) == dumpSurface(testing::load("t5")));
}

TEST_CASE("coefficients are written as strings", "[io]") {
    auto doc = nlohmann::json::parse(dumpSurface(testing::load("t1")));
    for (const auto& pt : doc["points"]) CHECK(pt["lambda"].is_string());
    auto fp = nlohmann::json::parse(dumpSurface(testing::load("t1")));
    fp["ring"] = {{"kind", "Fp"}, {"p", 7}};
    fp["points"][0]["lambda"] = "3/2";
    Surface s = surfaceFromJson(fp);
    // 3/2 = 3 * 4 = 12 = 5 mod 7
    CHECK(s.lambda(0) == Scalar(5, 7));
    auto out = surfaceToJson(s);
    CHECK(out["ring"]["p"] == 7);
}

TEST_CASE("stable key order", "[io]") {
    auto doc = surfaceToJson(testing::load("t4"));
    std::vector<std::string> keys;
    for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"version", "ring", "points", "boundaries", "arcs", "rotations", "faces",
                                           "declared"});
}

TEST_CASE("error kinds map to exit codes", "[io]") {
    CHECK(parseError("x").exitCode() == 2);
    CHECK(mapInconsistent("x").exitCode() == 2);
    CHECK(hypothesis("H", "x").exitCode() == 3);
    CHECK(computation("C", "x").exitCode() == 4);
    CHECK(errorCode([] { loadSurface(std::string(FIXTURE_DIR) + "/missing.json"); }) == 2);
}
