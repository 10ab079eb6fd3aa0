// Acceptance battery: one PASS/FAIL line per criterion.
#include "support.hpp"

#include "surfalg/invariants.hpp"
#include "surfalg/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>

using namespace surfalg;
using testing::load;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

Elem scaled(Elem x, const Scalar& c) { return testing::scale(std::move(x), c); }

RibbonGraph ribbon(const std::string& name, std::int64_t& prime) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/ribbon/" + name + ".json");
    return ribbonFromJson(nlohmann::json::parse(in), prime);
}

Outcome ranks() {
    Outcome o;
    o.require(Algebra(load("t1")).dim() == 5, "T1 rank");
    for (int mM : {1, 2, 3})
        for (int mN : {1, 2}) {
            std::string n = "t2_m" + std::to_string(mM) + "_n" + std::to_string(mN);
            Algebra A(load(n));
            o.require(A.dim() == 4 * mM && A.rankFormula() == 4 * mM, n + " rank");
        }
    o.detail = o.ok ? "T1 = 5, T2 = 4 m_M for m_M = 1, 2, 3" : o.detail;
    return o;
}

Outcome presentation() {
    Outcome o;
    for (int mM : {1, 2, 3})
        for (int mN : {1, 2}) {
            std::string n = "t2_m" + std::to_string(mM) + "_n" + std::to_string(mN);
            Surface s = load(n);
            Algebra A(s);
            int u = s.arcIndex("u");
            int ha = Surface::half(u, true);
            if (s.faceAt(ha).kind != ContentKind::OnePuncture) ha = Surface::opp(ha);
            Elem a = testing::arrow(A, ha), b = testing::arrow(A, Surface::opp(ha));
            Scalar lN = s.lambda(s.pointIndex("N")), lM = s.lambda(s.pointIndex("M"));
            o.require(A.isZero(A.mul(b, b)), n + ": b^2 != 0");
            if (mN == 2) {
                Elem target = scaled(testing::power(A, A.mul(a, b), mM, u), lN * lM);
                o.require(!A.isZero(target) && A.mul(a, a) == target, n + ": a^2 != lN lM (ab)^m");
            } else {
                Elem e1 = scaled(a, lN.inverse());
                Elem e2 = A.add(A.unit(A.idem(u)), e1, A.S(-1));
                o.require(A.mul(e1, e1) == e1 && A.mul(e2, e2) == e2 && A.isZero(A.mul(e1, e2)) &&
                              A.isZero(A.mul(e2, e1)) && !A.isZero(e2),
                          n + ": idempotent splitting");
            }
        }
    if (o.ok) o.detail = "six T2 variants";
    return o;
}

Outcome closure() {
    Outcome o;
    auto names = testing::fixtureNames();
    int maxDim = 0;
    for (const auto& n : names) {
        Algebra A(load(n));
        maxDim = std::max(maxDim, A.dim());
        o.require(A.dim() <= 40, n + " exceeds 40");
        o.require(A.dim() == A.rankFormula(), n + " rank formula");
        for (int i = 0; i < A.dim(); ++i)
            for (int j = 0; j < A.dim(); ++j) {
                const Product& p = A.product(i, j);
                o.require(p.zero || (p.index >= 0 && p.index < A.dim()), n + " closure");
            }
        o.require(!A.associativityFailure(), n + " associativity");
    }
    o.require(names.size() >= 12, "fewer than 12 fixtures");
    if (o.ok) o.detail = std::to_string(names.size()) + " fixtures, largest rank " + std::to_string(maxDim);
    return o;
}

Outcome oracle() {
    Outcome o;
    int count = 0;
    for (const auto& n : testing::fixtureNames()) {
        Surface s = load(n);
        if (!s.specialMonogons().empty()) continue;
        Algebra A(s);
        OracleReport r = bruteForceOracle(A);
        o.require(r.dimension == A.dim() && r.dimensionAtL2 == r.dimension, n + " dimension");
        o.require(r.basisIndependent && r.tableMatches, n + " table " + r.mismatch);
        ++count;
    }
    if (o.ok) o.detail = std::to_string(count) + " special-monogon-free fixtures";
    return o;
}

Outcome symmetry() {
    Outcome o;
    int count = 0;
    for (const auto& n : testing::allSurfaceFixtures()) {
        Surface s = load(n);
        if (testing::hasBoundaryArc(s)) continue;
        Algebra A(s);
        o.require(A.traceIsSymmetric(), n + " trace not symmetric");
        o.require(!determinant(A.gram(), s.prime).isZero(), n + " degenerate Gram matrix");
        ++count;
    }
    if (o.ok) o.detail = std::to_string(count) + " fixtures without boundary arcs";
    return o;
}

Outcome brauer() {
    Outcome o;
    for (const auto& n : {"loop", "star3", "theta", "t5"}) {
        std::int64_t p = 0;
        RibbonGraph g = ribbon(n, p);
        Algebra A(ribbonGraphToSurface(g, p));
        BrauerReport r = brauerCompare(A, brauerDataOf(g, p));
        o.require(r.identityIdentification && r.ok, std::string(n) + " " + r.mismatch);
    }
    if (o.ok) o.detail = "loop, star-3, theta, T5";
    return o;
}

Outcome restriction() {
    Outcome o;
    int pairs = 0;
    for (const auto& n : {"t1", "t3_m2", "t4", "secflip_m1", "annulus_punctured", "torus1"}) {
        Surface s = load(n);
        Algebra A(s);
        for (int drop = 0; drop < s.numArcs; ++drop) {
            std::vector<int> keep;
            for (int e = 0; e < s.numArcs; ++e)
                if (e != drop) keep.push_back(e);
            RestrictionReport r = restrictionCheck(A, keep);
            o.require(r.ok, std::string(n) + " without " + s.edges[drop].id + ": " + r.mismatch);
            ++pairs;
        }
    }
    o.require(pairs >= 5, "fewer than 5 pairs");
    if (o.ok) o.detail = std::to_string(pairs) + " pairs";
    return o;
}

Outcome jacobian() {
    Outcome o;
    for (const auto& n : {"t4", "large/t4_m1112", "large/torus2"}) {
        JacobianReport r = jacobianCheck(Algebra(load(n)));
        o.require(r.arrows > 0 && r.ok(), std::string(n) + ": " + std::to_string(r.derivativesMatching) + "/" +
                                              std::to_string(r.relationsVanishing) + " of " +
                                              std::to_string(r.arrows));
    }
    if (o.ok) o.detail = "four-punctured spheres and twice-punctured torus";
    return o;
}

Outcome flips() {
    Outcome o;
    for (int m : {1, 2}) {
        Surface t3 = load("t3_m" + std::to_string(m));
        FlipReport r = checkFlipInvariants(t3, t3.arcIndex("e_MP"));
        InvariantTuple other = derivedInvariants(Algebra(load("secflip_m" + std::to_string(m))));
        o.require(r.ok() && r.after.derivedEqual(other), "triangle pair m = " + std::to_string(m));
    }
    std::vector<std::pair<std::string, int>> candidates;
    for (const auto& n : testing::fixtureNames()) {
        Surface s = load(n);
        for (int e = 0; e < s.numArcs; ++e)
            if (!s.isCloseToBoundary(e)) candidates.push_back({n, e});
    }
    std::mt19937 rng(20240611);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    int done = 0;
    for (const auto& [n, e] : candidates) {
        if (done == 12) break;
        Surface s = load(n);
        FlipReport r;
        try {
            r = checkFlipInvariants(s, e);
        } catch (const Error& err) {
            if (err.name() == "DegenerateFlip") continue;
            throw;
        }
        o.require(r.invariantsAgree, n + " flip " + s.edges[e].id + " invariants");
        o.require(r.roundTrip, n + " flip " + s.edges[e].id + " round trip");
        ++done;
    }
    o.require(done >= 10, "fewer than 10 flips");
    if (o.ok) o.detail = "triangle pair for m = 1, 2 and " + std::to_string(done) + " random flips";
    return o;
}

Outcome resolution() {
    Outcome o;
    for (const auto& n : {"t4", "torus1"}) {
        ResolutionReport r = verifyBimoduleResolution(Algebra(load(n)));
        o.require(r.ok(), std::string(n) + " resolution");
    }
    if (o.ok) o.detail = "t4, torus1";
    return o;
}

Outcome classification() {
    Outcome o;
    auto labels = [](const std::string& n) {
        Surface s = load(n);
        std::set<ComponentLabel> out;
        for (const auto& c : s.components()) {
            bool arc = false;
            for (int e : c) arc = arc || s.isArc(e);
            if (arc) out.insert(s.classifyComponent(c));
        }
        return out;
    };
    using L = std::set<ComponentLabel>;
    for (const auto& n : {"t2_m1_n1", "t2_m2_n1", "t2_m3_n2", "t3_m1", "t3_m2"})
        o.require(labels(n) == L{ComponentLabel::FiniteRank}, std::string(n) + " not FiniteRank");
    for (const auto& n : {"square_heavy", "punctured_triangle", "fan"})
        o.require(labels(n) == L{ComponentLabel::Lattice}, std::string(n) + " not Lattice");
    o.require(labels("annulus_punctured") == L{ComponentLabel::NotFiniteOverCentre},
              "annulus_punctured not NotFiniteOverCentre");
    if (o.ok) o.detail = "FiniteRank, Lattice x3, NotFiniteOverCentre";
    return o;
}

Outcome weights() {
    Outcome o;
    int count = 0;
    bool selfFolded = false;
    for (const auto& n : {"sphere3_m222", "sphere3_m223", "torus1", "large/torus2", "large/t4_m1112",
                          "weights/selffolded4"}) {
        Surface s = load(n);
        o.require(weightsValid(s, tameWeights(s)), std::string(n) + " weights");
        for (const auto& f : s.faces()) selfFolded = selfFolded || isSpecialSelfFolded(s, f);
        ++count;
    }
    o.require(selfFolded, "no special self-folded triangle covered");
    for (const auto& n : {"t4", "spectria2"}) {
        std::string got;
        try {
            tameWeights(load(n));
        } catch (const Error& e) {
            got = e.name();
        }
        o.require(got == "ExceptionalTriangulation", std::string(n) + " not exceptional");
    }
    if (o.ok) o.detail = std::to_string(count) + " triangulations, 2 exceptional";
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"rank reproduction", ranks},
        {"presentation reproduction", presentation},
        {"closure and associativity", closure},
        {"oracle equivalence", oracle},
        {"symmetry", symmetry},
        {"Brauer specialization", brauer},
        {"idempotent restriction", restriction},
        {"Jacobian identity", jacobian},
        {"flip invariants", flips},
        {"bimodule resolution", resolution},
        {"classification labels", classification},
        {"tame weights", weights},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.ok) ++failed;
        std::printf("%s %2zu %s: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
    }
    return failed == 0 ? 0 : 1;
}
