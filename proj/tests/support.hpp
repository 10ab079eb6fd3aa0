#pragma once

#include "surfalg/algebra.hpp"
#include "surfalg/io.hpp"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name + ".json"; }

inline surfalg::Surface load(const std::string& name) { return surfalg::loadSurface(fixture(name)); }

// Stems of the fixtures in a subdirectory ("" for the top level), sorted.
inline std::vector<std::string> fixtureNames(const std::string& sub = "") {
    std::vector<std::string> out;
    std::filesystem::path dir = std::filesystem::path(FIXTURE_DIR) / sub;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            out.push_back((sub.empty() ? "" : sub + "/") + entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::string> allSurfaceFixtures() {
    auto v = fixtureNames();
    for (const auto& sub : {"large", "weights"}) {
        auto w = fixtureNames(sub);
        v.insert(v.end(), w.begin(), w.end());
    }
    return v;
}

inline bool hasBoundaryArc(const surfalg::Surface& s) {
    for (int e = 0; e < s.numArcs; ++e)
        if (s.arcTouchesBoundary(e)) return true;
    return false;
}

// Basis element as an algebra element of A.
inline surfalg::Elem element(const surfalg::Algebra& A, int i) { return A.unit(i); }

// Arrow h -> succ(h) as an element of A.
inline surfalg::Elem arrow(const surfalg::Algebra& A, int h) {
    return A.pathElement(A.presentation().segPath(h, 1), A.S(1));
}

inline surfalg::Elem power(const surfalg::Algebra& A, surfalg::Elem x, int k, int vertex) {
    auto r = A.unit(A.idem(vertex));
    for (int i = 0; i < k; ++i) r = A.mul(r, x);
    return r;
}

inline surfalg::Elem scale(surfalg::Elem x, const surfalg::Scalar& c) {
    for (auto& v : x) v *= c;
    return x;
}

}  // namespace testing
