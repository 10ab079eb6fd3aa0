#pragma once

#include "surface.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace surfalg {

// Winding path: k counter-clockwise steps around start(h), beginning at h.
struct Seg {
    int h = -1;
    int k = 0;
    bool operator==(const Seg& o) const { return h == o.h && k == o.k; }
};

// Scalar multiple of a winding (possibly of length 0) or of c_u.
struct FTerm {
    enum Kind { Zero, Path, Central } kind = Zero;
    Scalar coef;
    Seg seg;
    int arc = -1;
    static FTerm zero() { return {}; }
};

// A path in the arc quiver, as the list of source half-edges of its arrows
// (arrow h goes from arc(h) to arc(succ h)); empty paths carry their vertex.
struct QPath {
    int vertex = -1;
    std::vector<int> arrows;
    bool operator<(const QPath& o) const {
        return vertex != o.vertex ? vertex < o.vertex : arrows < o.arrows;
    }
    bool operator==(const QPath& o) const { return vertex == o.vertex && arrows == o.arrows; }
};

using PathCombo = std::map<QPath, Scalar>;

inline void addTo(PathCombo& c, const QPath& p, const Scalar& x) {
    if (x.isZero()) return;
    auto it = c.find(p);
    if (it == c.end()) c.emplace(p, x);
    else {
        it->second += x;
        if (it->second.isZero()) c.erase(it);
    }
}

class Presentation {
public:
    explicit Presentation(const Surface& s) : s_(s) {}

    const Surface& surface() const { return s_; }

    int md(int point) const { return s_.m(point) * s_.rotSize(point); }

    // Arrows of the arc quiver.
    std::vector<int> arrows() const {
        std::vector<int> out;
        for (int h = 0; h < 2 * s_.numArcs; ++h)
            if (s_.isArcHalf(s_.succ(h))) out.push_back(h);
        return out;
    }

    int walk(int h, int k) const {
        for (int i = 0; i < k; ++i) h = s_.succ(h);
        return h;
    }
    // True when one of succ^1..succ^k of h is a boundary end.
    bool passesBoundary(int h, int k) const {
        int x = h;
        for (int i = 0; i < k; ++i) {
            x = s_.succ(x);
            if (s_.isBoundaryHalf(x)) return true;
        }
        return false;
    }
    int steps0(int x, int y) const {
        int k = 0;
        while (x != y) {
            x = s_.succ(x);
            ++k;
        }
        return k;
    }

    // io(x, y) = lambda ic(x,x)^(m-1) ic(x -> y), zero if it runs through the boundary.
    FTerm io(int x, int y) const {
        int p = s_.start(x);
        int k = (s_.m(p) - 1) * s_.rotSize(p) + steps0(x, y);
        if (passesBoundary(x, k)) return FTerm::zero();
        return {FTerm::Path, s_.lambda(p), {x, k}, -1};
    }
    FTerm scaled(FTerm t, const Scalar& c) const {
        if (t.kind != FTerm::Zero) t.coef *= c;
        return t;
    }
    FTerm central(int arc, const Scalar& c) const {
        if (s_.arcTouchesBoundary(arc)) return FTerm::zero();
        return {FTerm::Central, c, {}, arc};
    }

    // Face sides starting at v.
    std::vector<int> sidesFrom(int v) const {
        const auto& f = s_.faceAt(v).sides;
        auto it = std::find(f.begin(), f.end(), v);
        std::vector<int> r(it, f.end());
        r.insert(r.end(), f.begin(), it);
        return r;
    }

    // Right-hand side of the turn relation at v, in the presentation that is
    // compatible with idempotent restriction.
    FTerm alt0(int v) const {
        auto sd = sidesFrom(v);
        const Face& face = s_.faceAt(v);
        int n = static_cast<int>(sd.size());
        int u = sd.size() > 1 ? sd[1] : v, w = sd.back();
        if (!s_.isArcHalf(u) || !s_.isArcHalf(w)) return FTerm::zero();
        auto opp = Surface::opp;
        auto mOf = [&](int p) { return s_.m(p); };
        auto lam = [&](int p) { return s_.lambda(p); };
        bool empty = face.kind == ContentKind::EmptyDisk;
        bool one = face.kind == ContentKind::OnePuncture;
        int M = face.puncture;
        if (n == 3 && empty) return io(opp(u), w);
        if (n == 2 && one && mOf(M) == 1) return central(Surface::edgeOf(u), lam(M));
        if (n == 4 && empty) {
            if (sd[2] == opp(sd[1]) && w != opp(v) && mOf(s_.end(u)) == 1)
                return scaled(io(u, w), lam(s_.end(u)));
            if (sd[2] == opp(sd[3]) && u != opp(v) && mOf(s_.start(w)) == 1)
                return scaled(io(opp(u), opp(w)), lam(s_.start(w)));
            int z = sd[2];
            if (s_.isArcHalf(z) && twoTipTriangle(v, u, z, w))
                return scaled(io(u, opp(w)), lam(s_.end(u)) * lam(s_.start(w)));
        }
        if (n == 1 && one) {
            if (mOf(M) == 1) return {FTerm::Path, lam(M), {v, 1}, -1};
            if (mOf(M) == 2) return central(Surface::edgeOf(v), lam(M));
        }
        if (n == 3 && one && sd[2] == opp(sd[1]) && mOf(s_.end(u)) == 1 && mOf(M) == 1)
            return central(Surface::edgeOf(u), lam(M) * lam(s_.end(u)));
        if (n == 5 && empty) {
            // radius z inside the loop v: sides v, u, z, -z, -u
            if (sd[3] == opp(sd[2]) && sd[4] == opp(u) && mOf(s_.end(u)) == 1 && mOf(s_.end(sd[2])) == 1 &&
                s_.isInterior(s_.end(sd[2])) && s_.rotSize(s_.end(sd[2])) == 1)
                return central(Surface::edgeOf(u), lam(s_.end(sd[2])) * lam(s_.end(u)));
            // two tips: sides v, u, -u, -w, w
            if (sd[2] == opp(u) && sd[3] == opp(w) && mOf(s_.end(u)) == 1 && mOf(s_.start(w)) == 1)
                return scaled(io(u, opp(w)), lam(s_.end(u)) * lam(s_.start(w)));
        }
        return FTerm::zero();
    }

    // Right-hand side in the second presentation; only used for display.
    FTerm alt2(int v) const {
        auto sd = sidesFrom(v);
        const Face& face = s_.faceAt(v);
        int n = static_cast<int>(sd.size());
        int u = n > 1 ? sd[1] : v, w = sd.back();
        if (!s_.isArcHalf(u) || !s_.isArcHalf(w)) return FTerm::zero();
        if (n == 3 && face.kind == ContentKind::EmptyDisk) return io(Surface::opp(u), w);
        if (n == 1 && face.kind == ContentKind::OnePuncture) {
            int M = face.puncture;
            if (s_.m(M) == 1) return {FTerm::Path, s_.lambda(M), {v, 1}, -1};
            if (s_.m(M) == 2 && s_.prime == 2) {
                int p = s_.start(v);
                int k = s_.m(p) * s_.rotSize(p);
                if (passesBoundary(v, k)) return FTerm::zero();
                return {FTerm::Path, s_.lambda(M) * s_.lambda(p), {v, k}, -1};
            }
        }
        return FTerm::zero();
    }

    // Arrow h -> succ(h) outside the ideal J.
    bool isSpecialArrow(int h) const { return s_.isSpecialArrow(h); }

    // c_u as a path combination through its forward end.
    PathCombo centralPath(int arc) const {
        PathCombo c;
        if (s_.arcTouchesBoundary(arc)) return c;
        int h = Surface::half(arc, true);
        addTo(c, segPath(h, md(s_.start(h))), s_.lambda(s_.start(h)));
        return c;
    }

    QPath segPath(int h, int k) const {
        QPath p;
        p.vertex = Surface::edgeOf(h);
        for (int i = 0; i < k; ++i) {
            p.arrows.push_back(h);
            h = s_.succ(h);
        }
        return p;
    }

    PathCombo ftermPaths(const FTerm& t, int fromArc) const {
        PathCombo c;
        if (t.kind == FTerm::Path) {
            QPath p = segPath(t.seg.h, t.seg.k);
            if (t.seg.k == 0) p.vertex = fromArc;
            addTo(c, p, t.coef);
        } else if (t.kind == FTerm::Central) {
            for (auto& [p, x] : centralPath(t.arc)) addTo(c, p, x * t.coef);
        }
        return c;
    }

    // Head of the turn relation at v: arrow u -> -v followed by arrow v -> -w.
    QPath turnHead(int v) const {
        auto sd = sidesFrom(v);
        int u = sd.size() > 1 ? sd[1] : v;
        QPath p;
        p.vertex = Surface::edgeOf(u);
        p.arrows = {u, v};
        return p;
    }
    bool hasTurnRelation(int v) const {
        auto sd = sidesFrom(v);
        int u = sd.size() > 1 ? sd[1] : v;
        return s_.isArcHalf(v) && s_.isArcHalf(u) && s_.isArcHalf(sd.back());
    }

    // Relation at v (head minus right-hand side) as a path combination.
    PathCombo turnRelation(int v, bool second = false) const {
        PathCombo c;
        QPath head = turnHead(v);
        addTo(c, head, s_.S(1));
        FTerm f = second ? alt2(v) : alt0(v);
        for (auto& [p, x] : ftermPaths(f, head.vertex)) addTo(c, p, -x);
        return c;
    }

    // Full-turn relation for arc e; one side is dropped at a boundary end.
    PathCombo centralRelation(int e) const {
        PathCombo c;
        for (bool fwd : {true, false}) {
            int h = Surface::half(e, fwd);
            int p = s_.start(h);
            if (!s_.isInterior(p)) continue;
            addTo(c, segPath(h, md(p)), fwd ? s_.lambda(p) : -s_.lambda(p));
        }
        return c;
    }

    // Potential of a closed triangulation: triangle cycles minus lambda/m alpha^m.
    // Cycles are stored with their starting arrow; the derivative handles rotation.
    std::vector<std::pair<Scalar, std::vector<int>>> potential() const {
        std::vector<std::pair<Scalar, std::vector<int>>> w;
        for (const auto& f : s_.faces()) {
            if (f.sides.size() != 3 || f.kind != ContentKind::EmptyDisk) continue;
            int s0 = f.sides[0], s1 = f.sides[1], s2 = f.sides[2];
            w.push_back({s_.S(1), {s0, s2, s1}});
        }
        for (int p = 0; p < s_.numPoints(); ++p) {
            if (!s_.isVertex(p) || !s_.isInterior(p)) continue;
            int h = s_.rotation[p][0];
            std::vector<int> cyc;
            for (int i = 0; i < md(p); ++i, h = s_.succ(h)) cyc.push_back(h);
            w.push_back({-(s_.lambda(p) / s_.S(s_.m(p))), cyc});
        }
        return w;
    }

    // Cyclic derivative of the potential with respect to arrow a.
    PathCombo cyclicDerivative(int a) const {
        PathCombo c;
        for (const auto& [coef, cyc] : potential()) {
            int n = static_cast<int>(cyc.size());
            for (int i = 0; i < n; ++i) {
                if (cyc[i] != a) continue;
                QPath p;
                p.vertex = Surface::edgeOf(s_.succ(a));
                for (int j = 1; j < n; ++j) p.arrows.push_back(cyc[(i + j) % n]);
                addTo(c, p, coef);
            }
        }
        return c;
    }

    // ----- text rendering -----
    std::string arrowName(int h) const { return "[" + s_.token(h) + ">" + s_.token(s_.succ(h)) + "]"; }
    std::string pathText(const QPath& p) const {
        if (p.arrows.empty()) return "e(" + s_.edges[p.vertex].id + ")";
        std::string r;
        for (int a : p.arrows) r += arrowName(a);
        return r;
    }
    std::string comboText(const PathCombo& c) const {
        if (c.empty()) return "0";
        std::string r;
        bool first = true;
        for (const auto& [p, x] : c) {
            if (!first) r += " + ";
            first = false;
            if (!x.isOne()) r += "(" + x.str() + ")";
            r += pathText(p);
        }
        return r;
    }

private:
    const Surface& s_;

    // Inner triangle -z, -u, -w with both tips of degree two and multiplicity one.
    bool twoTipTriangle(int v, int u, int z, int w) const {
        (void)v;
        const Face& g = s_.faceAt(Surface::opp(z));
        if (g.sides.size() != 3 || g.kind != ContentKind::EmptyDisk) return false;
        auto sd = sidesFrom(Surface::opp(z));
        if (sd[1] != Surface::opp(u) || sd[2] != Surface::opp(w)) return false;
        int a = s_.end(u), b = s_.start(w);
        return s_.isInterior(a) && s_.isInterior(b) && s_.rotSize(a) == 2 && s_.rotSize(b) == 2 && s_.m(a) == 1 &&
               s_.m(b) == 1;
    }
};

}  // namespace surfalg
