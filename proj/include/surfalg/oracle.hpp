#pragma once

#include "algebra.hpp"

#include <map>
#include <vector>

namespace surfalg {

struct OracleReport {
    int L = 0;
    int dimension = 0;
    int dimensionAtL2 = 0;
    int candidates = 0;
    bool basisIndependent = false;
    bool tableMatches = false;
    std::string mismatch;
};

// Independent computation of the algebra as truncated path space modulo the
// relations, by exact elimination. Requires every arrow to lie in the radical.
class PathOracle {
public:
    PathOracle(const Presentation& P, int L) : P_(P), s_(P.surface()), L_(L) {
        enumerate();
        relations();
    }

    int dimension() const { return static_cast<int>(paths_.size()) - static_cast<int>(pivots_.size()); }
    int candidates() const { return static_cast<int>(paths_.size()); }

    using Vec = std::map<int, Scalar>;

    // Coordinates of a scaled path; zero when it is not a candidate.
    Vec pathVec(const QPath& p, const Scalar& c) const {
        Vec v;
        auto it = index_.find(p);
        if (it != index_.end() && !c.isZero()) v.emplace(it->second, c);
        return v;
    }
    Vec reduce(Vec v) const {
        auto it = v.end();
        while (it != v.begin()) {
            --it;
            auto piv = pivots_.find(it->first);
            if (piv == pivots_.end()) continue;
            Scalar f = it->second;
            int col = it->first;
            for (const auto& [c, x] : piv->second) addEntry(v, c, -f * x);
            it = v.upper_bound(col);
        }
        return v;
    }

private:
    const Presentation& P_;
    const Surface& s_;
    int L_;
    std::vector<QPath> paths_;
    std::map<QPath, int> index_;
    std::map<int, Vec> pivots_;
    std::vector<std::vector<int>> outArrows_, inPaths_, outPaths_;

    static void addEntry(Vec& v, int c, const Scalar& x) {
        if (x.isZero()) return;
        auto [it, fresh] = v.emplace(c, x);
        if (!fresh) {
            it->second += x;
            if (it->second.isZero()) v.erase(it);
        }
    }

    int target(const QPath& p) const {
        return p.arrows.empty() ? p.vertex : Surface::edgeOf(s_.succ(p.arrows.back()));
    }

    // Monomial zeros: turns whose relation has no right-hand side, and any
    // arrow next to a full turn.
    bool zeroPair(int a, int b) const {
        if (b == s_.succ(a)) return false;
        int v = Surface::opp(s_.succ(a));
        return P_.hasTurnRelation(v) && P_.alt0(v).kind == FTerm::Zero;
    }
    // Winding run at the end of a path: its length and first arrow.
    std::pair<int, int> lastRun(const std::vector<int>& arrows) const {
        int n = static_cast<int>(arrows.size()), len = 1;
        while (len < n && s_.succ(arrows[n - len - 1]) == arrows[n - len]) ++len;
        return {len, arrows[n - len]};
    }
    bool fullTurn(int len, int first) const {
        int q = s_.start(first);
        return s_.isInterior(q) && len >= P_.md(q);
    }
    // p is a candidate; is p followed by arrow a one as well?
    bool candidateExtension(const QPath& p, int a) const {
        if (p.arrows.empty()) return true;
        if (zeroPair(p.arrows.back(), a)) return false;
        auto [len, first] = lastRun(p.arrows);
        if (s_.succ(p.arrows.back()) != a) return !fullTurn(len, first);
        int n = static_cast<int>(p.arrows.size()) + 1;
        if (!fullTurn(len + 1, first)) return true;
        return n == len + 1 && len + 1 == P_.md(s_.start(first));
    }

    void enumerate() {
        int n = s_.numArcs;
        outArrows_.assign(n, {});
        for (int a : P_.arrows()) outArrows_[Surface::edgeOf(a)].push_back(a);
        std::vector<QPath> layer;
        for (int u = 0; u < n; ++u) layer.push_back({u, {}});
        for (int len = 0; len < L_ && !layer.empty(); ++len) {
            std::vector<QPath> next;
            for (const auto& p : layer) {
                index_.emplace(p, static_cast<int>(paths_.size()));
                paths_.push_back(p);
                for (int a : outArrows_[target(p)]) {
                    if (!candidateExtension(p, a)) continue;
                    QPath q = p;
                    q.arrows.push_back(a);
                    next.push_back(q);
                }
            }
            layer = std::move(next);
        }
        inPaths_.assign(n, {});
        outPaths_.assign(n, {});
        for (int i = 0; i < static_cast<int>(paths_.size()); ++i) {
            outPaths_[paths_[i].vertex].push_back(i);
            inPaths_[target(paths_[i])].push_back(i);
        }
    }

    void insert(Vec v) {
        v = reduce(std::move(v));
        if (v.empty()) return;
        auto last = std::prev(v.end());
        Scalar inv = last->second.inverse();
        for (auto& [c, x] : v) x *= inv;
        pivots_.emplace(last->first, std::move(v));
    }

    static QPath join(const QPath& a, const QPath& b) {
        QPath r = a;
        r.arrows.insert(r.arrows.end(), b.arrows.begin(), b.arrows.end());
        return r;
    }

    void relations() {
        std::vector<PathCombo> rels;
        for (int v = 0; v < 2 * s_.numArcs; ++v)
            if (P_.hasTurnRelation(v)) rels.push_back(P_.turnRelation(v));
        for (int e = 0; e < s_.numArcs; ++e) {
            auto c = P_.centralRelation(e);
            if (!c.empty()) rels.push_back(c);
        }
        for (const auto& r : rels) {
            int from = r.begin()->first.vertex;
            int to = target(r.begin()->first);
            size_t shortest = L_;
            for (const auto& [p, x] : r) shortest = std::min(shortest, p.arrows.size());
            for (int i : inPaths_[from]) {
                const QPath& left = paths_[i];
                if (left.arrows.size() + shortest >= static_cast<size_t>(L_)) continue;
                for (int j : outPaths_[to]) {
                    const QPath& right = paths_[j];
                    if (left.arrows.size() + shortest + right.arrows.size() >= static_cast<size_t>(L_)) continue;
                    Vec row;
                    for (const auto& [p, x] : r) {
                        QPath full = join(join(left, p), right);
                        full.vertex = left.vertex;
                        auto it = index_.find(full);
                        if (it != index_.end()) addEntry(row, it->second, x);
                    }
                    insert(std::move(row));
                }
            }
        }
    }
};

// Compares the engine table with the path oracle at L and L + 2.
inline OracleReport bruteForceOracle(const Algebra& A, int L = 0) {
    const Surface& s = A.surface();
    const Presentation& P = A.presentation();
    if (!s.specialMonogons().empty())
        throw hypothesis("SpecialMonogonPresent", "special arrows are not nilpotent; truncation does not apply");
    int maxMd = 1;
    for (int p = 0; p < s.numPoints(); ++p) maxMd = std::max(maxMd, P.md(p));
    OracleReport rep;
    rep.L = L > 0 ? L : maxMd + 3;
    PathOracle lo(P, rep.L), hi(P, rep.L + 2);
    rep.dimension = lo.dimension();
    rep.dimensionAtL2 = hi.dimension();
    rep.candidates = lo.candidates();
    if (rep.dimension != rep.dimensionAtL2)
        throw computation("UnstableTruncation", "dimension " + std::to_string(rep.dimension) + " at L=" +
                                                    std::to_string(rep.L) + " but " +
                                                    std::to_string(rep.dimensionAtL2) + " at L+2");

    // engine basis element as a scaled path
    auto image = [&](int i) {
        const auto& b = A.basis()[i];
        std::pair<QPath, Scalar> r{{A.source(i), {}}, s.S(1)};
        if (b.kind == BasisKind::Wind) r.first = P.segPath(b.seg.h, b.seg.k);
        if (b.kind == BasisKind::Central) {
            const auto& c = P.centralPath(b.arc);
            r = *c.begin();
        }
        return r;
    };
    std::vector<std::pair<QPath, Scalar>> img;
    for (int i = 0; i < A.dim(); ++i) img.push_back(image(i));

    // the images must be independent modulo the relations
    std::map<int, PathOracle::Vec> span;
    bool independent = true;
    for (const auto& [p, c] : img) {
        auto v = lo.reduce(lo.pathVec(p, c));
        for (auto it = v.end(); it != v.begin();) {
            --it;
            auto piv = span.find(it->first);
            if (piv == span.end()) continue;
            Scalar f = it->second / piv->second.rbegin()->second;
            int col = it->first;
            for (const auto& [k, x] : piv->second) {
                auto [e, fresh] = v.emplace(k, -f * x);
                if (!fresh) {
                    e->second -= f * x;
                    if (e->second.isZero()) v.erase(e);
                }
            }
            it = v.upper_bound(col);
        }
        if (v.empty()) {
            independent = false;
            break;
        }
        int col = v.rbegin()->first;
        span.emplace(col, std::move(v));
    }
    rep.basisIndependent = independent && A.dim() == rep.dimension;

    rep.tableMatches = rep.basisIndependent;
    for (int i = 0; i < A.dim() && rep.tableMatches; ++i)
        for (int j = 0; j < A.dim(); ++j) {
            const Product& pr = A.product(i, j);
            PathOracle::Vec v;
            if (A.target(i) == A.source(j)) {
                QPath joined = img[i].first;
                joined.arrows.insert(joined.arrows.end(), img[j].first.arrows.begin(), img[j].first.arrows.end());
                v = lo.pathVec(joined, img[i].second * img[j].second);
            } else if (!pr.zero) {
                rep.tableMatches = false;
            }
            if (!pr.zero) {
                auto w = lo.pathVec(img[pr.index].first, -(pr.coef * img[pr.index].second));
                for (const auto& [k, x] : w) {
                    auto [e, fresh] = v.emplace(k, x);
                    if (!fresh) {
                        e->second += x;
                        if (e->second.isZero()) v.erase(e);
                    }
                }
            }
            if (!rep.tableMatches || !lo.reduce(v).empty()) {
                rep.tableMatches = false;
                rep.mismatch = A.label(i) + " * " + A.label(j);
                break;
            }
        }
    return rep;
}

}  // namespace surfalg
