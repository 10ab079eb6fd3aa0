#pragma once

#include "errors.hpp"
#include "scalar.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace surfalg {

struct MarkedPoint {
    std::string id;
    int m = 1;
    Scalar lambda;
    int boundary = -1;  // index into boundaries, -1 for punctures
};

struct BoundaryComponent {
    std::string id;
    std::vector<int> points;  // counter-clockwise
};

struct EdgeRec {
    std::string id;
    int from = -1;
    int to = -1;
    int boundary = -1;  // boundary edges only
    int index = -1;     // position k: points[k] -> points[k+1]
    bool isBoundary() const { return boundary >= 0; }
};

enum class ContentKind { EmptyDisk, OnePuncture, Big };

struct FaceContent {
    std::vector<int> punctures;  // point indices
    int holes = 0;
    int genus = 0;
    bool linked = false;  // region bounded by several traced cycles (derived surfaces only)

    bool empty() const { return punctures.empty() && holes == 0 && genus == 0 && !linked; }
    void absorb(const FaceContent& o) {
        punctures.insert(punctures.end(), o.punctures.begin(), o.punctures.end());
        std::sort(punctures.begin(), punctures.end());
        holes += o.holes;
        genus += o.genus;
        linked = linked || o.linked;
    }
};

struct Face {
    std::vector<int> sides;  // half-edges, rotated to least token first
    FaceContent content;
    ContentKind kind = ContentKind::EmptyDisk;
    int puncture = -1;  // for OnePuncture
};

enum class ComponentLabel { FiniteRank, Lattice, NotFiniteOverCentre };

inline std::string labelName(ComponentLabel l) {
    switch (l) {
        case ComponentLabel::FiniteRank: return "FiniteRank";
        case ComponentLabel::Lattice: return "Lattice";
        default: return "NotFiniteOverCentre";
    }
}

// A loop side enclosing exactly one puncture, either directly or through a radius.
struct Monogon {
    int side = -1;
    int puncture = -1;
    int radius = -1;  // half-edge pointing to the puncture, -1 if absent
};

// Marked surface with a partial triangulation, stored as a rotation system.
// Half-edge h belongs to edge h/2; even h leaves edges[h/2].from.
class Surface {
public:
    std::int64_t prime = 0;
    std::vector<MarkedPoint> points;
    std::vector<BoundaryComponent> boundaries;
    std::vector<EdgeRec> edges;  // arcs first, then boundary edges
    int numArcs = 0;
    std::vector<std::vector<int>> rotation;  // per point, counter-clockwise half-edges
    int declaredGenus = 0;
    int declaredBoundaryCount = 0;
    std::map<int, FaceContent> contentByAnchor;

    // ----- construction -----
    int addPoint(const std::string& id, int m, const Scalar& lambda) {
        points.push_back({id, m, lambda, -1});
        rotation.emplace_back();
        return static_cast<int>(points.size()) - 1;
    }
    int addArc(const std::string& id, int from, int to) {
        if (numArcs != static_cast<int>(edges.size()))
            throw std::logic_error("arcs must be added before boundaries");
        edges.push_back({id, from, to, -1, -1});
        return numArcs++;
    }
    int addBoundary(const std::string& id, const std::vector<int>& pts) {
        int b = static_cast<int>(boundaries.size());
        boundaries.push_back({id, pts});
        int n = static_cast<int>(pts.size());
        for (int k = 0; k < n; ++k) {
            points[pts[k]].boundary = b;
            edges.push_back({"bnd:" + id + ":" + std::to_string(k), pts[k], pts[(k + 1) % n], b, k});
        }
        return b;
    }
    int boundaryEdge(int b, int k) const {
        for (int e = numArcs; e < numEdges(); ++e)
            if (edges[e].boundary == b && edges[e].index == k) return e;
        return -1;
    }

    // ----- basic accessors -----
    int numEdges() const { return static_cast<int>(edges.size()); }
    int numHalfEdges() const { return 2 * numEdges(); }
    int numPoints() const { return static_cast<int>(points.size()); }
    static int edgeOf(int h) { return h >> 1; }
    static int opp(int h) { return h ^ 1; }
    static int half(int e, bool forward) { return 2 * e + (forward ? 0 : 1); }
    bool isArc(int e) const { return e < numArcs; }
    bool isArcHalf(int h) const { return isArc(edgeOf(h)); }
    bool isBoundaryHalf(int h) const { return !isArcHalf(h); }
    // Boundary half-edge running against the boundary orientation.
    bool isReversedBoundary(int h) const { return isBoundaryHalf(h) && (h & 1); }
    int start(int h) const { const auto& e = edges[edgeOf(h)]; return (h & 1) ? e.to : e.from; }
    int end(int h) const { return start(opp(h)); }
    int succ(int h) const { return succ_[h]; }
    int pred(int h) const { return pred_[h]; }
    int next(int h) const { return pred_[opp(h)]; }
    int faceOf(int h) const { return faceOf_[h]; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& faceAt(int h) const { return faces_.at(faceOf_[h]); }
    bool isLoop(int e) const { return edges[e].from == edges[e].to; }
    bool isInterior(int p) const { return points[p].boundary < 0; }
    int rotSize(int p) const { return static_cast<int>(rotation[p].size()); }
    int degree(int p) const {
        int d = 0;
        for (int h : rotation[p]) d += isArcHalf(h) ? 1 : 0;
        return d;
    }
    bool isVertex(int p) const { return !rotation[p].empty(); }
    bool arcTouchesBoundary(int e) const {
        return !isInterior(edges[e].from) || !isInterior(edges[e].to);
    }
    int m(int p) const { return points[p].m; }
    const Scalar& lambda(int p) const { return points[p].lambda; }
    Scalar S(long v) const { return Scalar(v, prime); }

    int pointIndex(const std::string& id) const {
        for (int i = 0; i < numPoints(); ++i)
            if (points[i].id == id) return i;
        return -1;
    }
    int arcIndex(const std::string& id) const {
        for (int i = 0; i < numArcs; ++i)
            if (edges[i].id == id) return i;
        return -1;
    }

    // ----- tokens -----
    std::string token(int h) const {
        const auto& e = edges[edgeOf(h)];
        if (!e.isBoundary()) return e.id + ((h & 1) ? "-" : "+");
        if (boundaries[e.boundary].points.size() == 1) return e.id + ((h & 1) ? "-" : "+");
        return e.id;
    }
    // Resolves a token; boundary tokens need the point whose rotation they sit in
    // (pass -1 for face anchors, which are always forward boundary halves).
    int parseToken(std::string t, int atPoint) const {
        const std::string minus = "\xE2\x88\x92";
        if (t.size() >= minus.size() && t.compare(t.size() - minus.size(), minus.size(), minus) == 0)
            t = t.substr(0, t.size() - minus.size()) + "-";
        if (t.rfind("bnd:", 0) == 0) {
            char suffix = 0;
            if (!t.empty() && (t.back() == '+' || t.back() == '-')) {
                suffix = t.back();
                t.pop_back();
            }
            for (int e = numArcs; e < numEdges(); ++e) {
                if (edges[e].id != t) continue;
                bool single = boundaries[edges[e].boundary].points.size() == 1;
                if (single) {
                    if (suffix == 0 && atPoint >= 0) throw parseError("single-point boundary token needs +/-: " + t);
                    return half(e, suffix != '-');
                }
                if (suffix != 0) throw parseError("unexpected suffix on boundary token: " + t);
                if (atPoint < 0) return half(e, true);
                if (edges[e].from == atPoint) return half(e, true);
                if (edges[e].to == atPoint) return half(e, false);
                throw parseError("boundary token " + t + " not incident to point " + points[atPoint].id);
            }
            throw parseError("unknown boundary token: " + t);
        }
        if (t.empty() || (t.back() != '+' && t.back() != '-')) throw parseError("bad end token: " + t);
        bool fwd = t.back() == '+';
        int a = arcIndex(t.substr(0, t.size() - 1));
        if (a < 0) throw parseError("unknown arc in token: " + t);
        return half(a, fwd);
    }

    // ----- derived structure -----
    // Recomputes successor maps, faces and face contents. Throws on a broken map.
    void rebuild() {
        int H = numHalfEdges();
        succ_.assign(H, -1);
        pred_.assign(H, -1);
        std::vector<int> seen(H, 0);
        for (int p = 0; p < numPoints(); ++p) {
            const auto& r = rotation[p];
            int n = static_cast<int>(r.size());
            for (int i = 0; i < n; ++i) {
                int h = r[i];
                if (h < 0 || h >= H) throw mapInconsistent("half-edge out of range");
                if (start(h) != p) throw mapInconsistent("end " + token(h) + " listed at " + points[p].id);
                if (seen[h]++) throw mapInconsistent("end listed twice: " + token(h));
                succ_[h] = r[(i + 1) % n];
                pred_[r[(i + 1) % n]] = h;
            }
        }
        for (int h = 0; h < H; ++h)
            if (!seen[h]) throw mapInconsistent("end missing from rotations: " + token(h));
        for (int e = numArcs; e < numEdges(); ++e) {
            const auto& ed = edges[e];
            const auto& pts = boundaries[ed.boundary].points;
            int n = static_cast<int>(pts.size());
            int prevEdge = boundaryEdge(ed.boundary, (ed.index + n - 1) % n);
            if (succ_[half(prevEdge, false)] != half(e, true))
                throw mapInconsistent("boundary ends out of order at " + points[ed.from].id);
        }
        faceOf_.assign(H, -1);
        faces_.clear();
        std::vector<std::vector<int>> cycles;
        for (int h = 0; h < H; ++h) {
            if (isReversedBoundary(h) || faceOf_[h] != -1) continue;
            std::vector<int> cyc;
            int x = h;
            do {
                if (isReversedBoundary(x)) throw mapInconsistent("face runs along reversed boundary");
                faceOf_[x] = -2;
                cyc.push_back(x);
                x = next(x);
            } while (x != h && cyc.size() <= static_cast<size_t>(H));
            if (x != h) throw mapInconsistent("face tracing did not close");
            auto least = std::min_element(cyc.begin(), cyc.end(),
                                          [&](int a, int b) { return token(a) < token(b); });
            std::rotate(cyc.begin(), least, cyc.end());
            cycles.push_back(cyc);
        }
        std::sort(cycles.begin(), cycles.end(),
                  [&](const auto& a, const auto& b) { return token(a[0]) < token(b[0]); });
        for (auto& c : cycles) {
            Face f;
            f.sides = c;
            for (int x : c) faceOf_[x] = static_cast<int>(faces_.size());
            faces_.push_back(f);
        }
        for (const auto& [anchor, content] : contentByAnchor) {
            if (anchor < 0 || anchor >= H || faceOf_[anchor] < 0)
                throw mapInconsistent("face anchor is not a face side");
            auto& f = faces_[faceOf_[anchor]];
            if (!f.content.empty() || f.content.linked)
                throw mapInconsistent("two contents for face " + token(f.sides[0]));
            f.content = content;
        }
        for (auto& f : faces_) classify(f);
    }

    // Re-keys contents so that every non-empty face is anchored at its canonical side.
    void canonicalizeAnchors() {
        contentByAnchor.clear();
        for (const auto& f : faces_)
            if (!f.content.empty()) contentByAnchor[f.sides[0]] = f.content;
    }

    // ----- global quantities -----
    bool isClosed() const { return declaredBoundaryCount == 0; }
    bool isSphere() const { return declaredGenus == 0 && declaredBoundaryCount == 0; }
    bool isDisc() const { return declaredGenus == 0 && declaredBoundaryCount == 1 && boundaries.size() == 1; }
    Scalar lambdaProduct() const {
        Scalar r = S(1);
        for (const auto& p : points) r *= p.lambda;
        return r;
    }
    bool nuApplies() const {
        if (!isSphere() || numPoints() != 4) return false;
        for (const auto& p : points)
            if (p.m != 1) return false;
        return true;
    }
    Scalar nu() const { return nuApplies() ? S(1) - lambdaProduct() : S(1); }
    int eulerLeft() const {
        int V = 0;
        for (int p = 0; p < numPoints(); ++p) V += isVertex(p) ? 1 : 0;
        int total = V - numEdges();
        for (const auto& f : faces_) total += 1 - f.content.holes - 2 * f.content.genus;
        return total;
    }
    int eulerRight() const { return 2 - 2 * declaredGenus - declaredBoundaryCount; }
    bool hasLinkedFaces() const {
        for (const auto& f : faces_)
            if (f.content.linked) return true;
        return false;
    }
    bool isTriangulation() const {
        for (const auto& f : faces_) {
            bool ok = f.kind == ContentKind::EmptyDisk && f.sides.size() == 3;
            if (!ok) return false;
        }
        return true;
    }

    // ----- validation -----
    std::vector<std::string> validate() const {
        std::vector<std::string> v;
        if (prime != 0 && !isPrime(prime)) v.push_back("HypothesisViolated(prime): ring modulus is not prime");
        for (const auto& p : points) {
            if (p.m < 1) v.push_back("MapInconsistent: multiplicity < 1 at " + p.id);
            if (p.lambda.isZero()) v.push_back("ZeroCoefficient: lambda vanishes at " + p.id);
        }
        std::map<int, int> owner;
        for (const auto& f : faces_)
            for (int q : f.content.punctures) {
                if (q < 0 || q >= numPoints()) { v.push_back("MapInconsistent: bad puncture"); continue; }
                if (!isInterior(q)) v.push_back("MapInconsistent: boundary point listed as free puncture: " + points[q].id);
                if (isVertex(q)) v.push_back("MapInconsistent: vertex listed as free puncture: " + points[q].id);
                if (owner[q]++) v.push_back("MapInconsistent: puncture in two faces: " + points[q].id);
            }
        for (const auto& f : faces_)
            if (f.content.holes < 0 || f.content.genus < 0)
                v.push_back("MapInconsistent: negative hole or genus count");
        for (int q = 0; q < numPoints(); ++q)
            if (!isVertex(q) && isInterior(q) && !owner.count(q))
                v.push_back("MapInconsistent: free puncture not assigned to a face: " + points[q].id);
        for (const auto& f : faces_)
            if (f.kind == ContentKind::EmptyDisk && f.sides.size() <= 2)
                v.push_back("MapInconsistent: empty face with " + std::to_string(f.sides.size()) +
                            " sides at " + token(f.sides[0]));
        int holes = 0;
        for (const auto& f : faces_) holes += f.content.holes;
        if (declaredBoundaryCount != static_cast<int>(boundaries.size()) + holes)
            v.push_back("EulerMismatch: boundaryCount must equal map boundaries plus bare holes");
        if (!hasLinkedFaces() && eulerLeft() != eulerRight())
            v.push_back("EulerMismatch: V - E + sum(1 - holes - 2 genus) = " + std::to_string(eulerLeft()) +
                        " but 2 - 2g - b = " + std::to_string(eulerRight()));
        int nM = numPoints();
        if (isSphere() && nM < 3) v.push_back("HypothesisViolated(sphere-points): closed sphere needs >= 3 marked points");
        if (isSphere() && nM == 3)
            for (const auto& p : points)
                if (p.m <= 1) {
                    v.push_back("HypothesisViolated(sphere-multiplicity): sphere with 3 points needs all m > 1");
                    break;
                }
        if (nu().isZero()) v.push_back("HypothesisViolated(nu): nu vanishes");
        if (isDisc() && nM < 3) {
            int punct = 0;
            bool big = false;
            for (int q = 0; q < nM; ++q)
                if (isInterior(q)) {
                    ++punct;
                    big = big || points[q].m > 1;
                }
            if (!big && punct < 2) v.push_back("HypothesisViolated(disc): small disc needs a heavy puncture or two punctures");
        }
        return v;
    }

    // ----- monogons -----
    // Loop side h whose left region holds exactly one puncture (radius allowed).
    std::optional<Monogon> monogonAt(int h) const {
        if (!isArcHalf(h) || !isLoop(edgeOf(h))) return std::nullopt;
        const Face& f = faceAt(h);
        if (f.sides.size() == 1 && f.kind == ContentKind::OnePuncture) return Monogon{h, f.puncture, -1};
        if (f.sides.size() == 3 && f.kind == ContentKind::EmptyDisk) {
            int x = next(h);
            if (next(x) == opp(x) && next(opp(x)) == h && isArcHalf(x) && isInterior(end(x)) && end(x) != start(h))
                return Monogon{h, end(x), x};
        }
        return std::nullopt;
    }
    std::optional<Monogon> specialMonogonAt(int h) const {
        auto mg = monogonAt(h);
        if (mg && m(mg->puncture) == 1) return mg;
        return std::nullopt;
    }
    std::vector<Monogon> specialMonogons() const {
        std::vector<Monogon> r;
        for (int h = 0; h < 2 * numArcs; ++h)
            if (auto mg = specialMonogonAt(h)) r.push_back(*mg);
        return r;
    }
    // The arrow h -> succ(h) is special when h is a special monogon side or its radius.
    bool isSpecialArrow(int h) const {
        if (!isArcHalf(h)) return false;
        if (specialMonogonAt(h)) return true;
        int side = succ(h);
        if (!isArcHalf(side)) return false;
        auto mg = specialMonogonAt(opp(side));
        return mg && mg->radius == h;
    }

    // Loop h enclosing a disc with exactly two punctures of multiplicity one.
    std::optional<std::pair<int, int>> twoSpecial(int h) const {
        if (!isArcHalf(h) || !isLoop(edgeOf(h))) return std::nullopt;
        int u = edgeOf(h);
        std::set<int> region{faceOf(h)};
        std::vector<int> stack{faceOf(h)};
        std::set<int> regionEdges;
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int s : faces_[f].sides) {
                if (edgeOf(s) == u) continue;
                if (!isArcHalf(s)) return std::nullopt;
                regionEdges.insert(edgeOf(s));
                int g = faceOf(opp(s));
                if (g == faceOf(opp(h))) return std::nullopt;
                if (region.insert(g).second) stack.push_back(g);
            }
        }
        if (region.count(faceOf(opp(h)))) return std::nullopt;
        std::set<int> marked, verts;
        for (int f : region) {
            const auto& c = faces_[f].content;
            if (c.holes || c.genus || c.linked) return std::nullopt;
            marked.insert(c.punctures.begin(), c.punctures.end());
            for (int s : faces_[f].sides)
                if (start(s) != start(h)) verts.insert(start(s));
        }
        int chi = static_cast<int>(verts.size()) + 1 - (static_cast<int>(regionEdges.size()) + 1) +
                  static_cast<int>(region.size());
        if (chi != 1) return std::nullopt;
        marked.insert(verts.begin(), verts.end());
        if (marked.size() != 2) return std::nullopt;
        int a = *marked.begin(), b = *marked.rbegin();
        if (m(a) != 1 || m(b) != 1 || !isInterior(a) || !isInterior(b)) return std::nullopt;
        return std::make_pair(a, b);
    }

    // ----- flips -----
    // u-plus of an arc half-edge; -1 stands for the empty value. With inverse,
    // the clockwise neighbour is used (mirror construction).
    int uPlus(int h, bool inverse = false) const {
        int p = start(h);
        int e = edgeOf(h);
        bool only = true;
        for (int x : rotation[p])
            if (isArcHalf(x) && edgeOf(x) != e) only = false;
        if (only) return -1;
        int n = inverse ? pred(h) : succ(h);
        if (n != opp(h)) return n;
        return uPlus(opp(h), inverse);
    }
    bool isCloseToBoundary(int e, bool inverse = false) const {
        int a = uPlus(half(e, true), inverse), b = uPlus(half(e, false), inverse);
        return (a >= 0 && isBoundaryHalf(a)) || (b >= 0 && isBoundaryHalf(b));
    }

    // Radius of a special self-folded triangle, pointing to its puncture.
    bool isSpecialRadius(int e) const {
        for (int h = 0; h < 2 * numArcs; ++h) {
            auto mg = specialMonogonAt(h);
            if (mg && mg->radius >= 0 && edgeOf(mg->radius) == e) return true;
        }
        return false;
    }

    Surface flip(int e, bool inverse = false) const {
        if (!isArc(e)) throw parseError("not an arc");
        if (isCloseToBoundary(e, inverse))
            throw hypothesis("CloseToBoundary", "arc " + edges[e].id + " is close to the boundary");
        if (isSpecialRadius(e)) return *this;
        int hu = half(e, true), hm = half(e, false);
        int a = uPlus(hu, inverse), b = uPlus(hm, inverse);
        Surface r = *this;
        if (a < 0 && b < 0) return r;
        // placement: (point, anchor, end); anchor -1 keeps the old slot
        struct Ins { int point; int anchor; int half; };
        std::vector<Ins> ins;
        auto place = [&](int plus, int self) -> Ins {
            if (plus < 0) {
                int nb = inverse ? succ(self) : pred(self);
                if (edgeOf(nb) == e) nb = inverse ? succ(nb) : pred(nb);
                if (edgeOf(nb) == e) return {start(self), -1, self};
                return {start(self), nb, self};
            }
            return {end(plus), opp(plus), self};
        };
        ins.push_back(place(a, hu));
        ins.push_back(place(b, hm));
        for (auto& rot : r.rotation)
            rot.erase(std::remove_if(rot.begin(), rot.end(), [&](int h) { return edgeOf(h) == e; }), rot.end());
        if (ins[0].point == ins[1].point && ins[0].anchor == ins[1].anchor) {
            // keep the old relative order of the two ends
            int along = inverse ? pred(hm) : succ(hm);
            bool minusFirst = along == hu;
            if (minusFirst) std::swap(ins[0], ins[1]);
        }
        // anchors refer to edge ends, which stay in place
        std::vector<int> newFrom(2);
        for (int i = 0; i < 2; ++i) {
            auto& rot = r.rotation[ins[i].point];
            int h = ins[i].half;
            if (ins[i].anchor < 0) {
                rot.push_back(h);
            } else {
                auto it = std::find(rot.begin(), rot.end(), ins[i].anchor);
                if (it == rot.end()) throw computation("UnsupportedCase", "flip anchor vanished");
                if (inverse) {
                    // insert counter-clockwise before the anchor; a second end with the
                    // same anchor goes after the first one
                    if (i == 1 && ins[0].point == ins[1].point && ins[0].anchor == ins[1].anchor) {
                        auto it0 = std::find(rot.begin(), rot.end(), ins[0].half);
                        rot.insert(it0, h);
                    } else {
                        rot.insert(it, h);
                    }
                } else {
                    if (i == 1 && ins[0].point == ins[1].point && ins[0].anchor == ins[1].anchor) {
                        auto it0 = std::find(rot.begin(), rot.end(), ins[0].half);
                        rot.insert(it0 + 1, h);
                    } else {
                        rot.insert(it + 1, h);
                    }
                }
            }
        }
        r.edges[e].from = ins[0].point;
        r.edges[e].to = ins[1].point;
        if (ins[0].half != hu) std::swap(r.edges[e].from, r.edges[e].to);
        // contents follow the isotopy: left of u goes left of u*, right goes right
        FaceContent left = faceAt(hu).content, right = faceAt(hm).content;
        bool same = faceOf(hu) == faceOf(hm);
        std::map<int, FaceContent> keep;
        for (const auto& f : faces_) {
            if (&f == &faceAt(hu) || &f == &faceAt(hm)) continue;
            if (!f.content.empty()) keep[f.sides[0]] = f.content;
        }
        r.contentByAnchor.clear();
        r.succ_.clear();
        try {
            r.rebuildRotationsOnly();
        } catch (const Error&) {
            throw computation("UnsupportedCase", "flip produced an inconsistent map");
        }
        FaceContent newLeft = left, newRight = same ? FaceContent{} : right;
        int fl = r.faceOf_[hu], fr = r.faceOf_[hm];
        if (fl == fr) newLeft.absorb(newRight), newRight = FaceContent{};
        for (auto& [anchor, c] : keep) {
            int g = r.faceOf_[anchor];
            if (g == fl || g == fr) throw computation("UnsupportedCase", "flip touched an unrelated face");
            r.contentByAnchor[anchor] = c;
        }
        if (!newLeft.empty()) r.contentByAnchor[hu] = newLeft;
        if (!newRight.empty()) r.contentByAnchor[hm] = newRight;
        r.rebuild();
        r.canonicalizeAnchors();
        if (!r.hasLinkedFaces() && r.eulerLeft() != r.eulerRight())
            throw computation("UnsupportedCase", "face contents cannot be redistributed for flip of " + edges[e].id);
        for (const auto& f : r.faces())
            if (f.kind == ContentKind::EmptyDisk && f.sides.size() <= 2)
                throw hypothesis("DegenerateFlip", "the flipped arc bounds an empty monogon or digon");
        return r;
    }

    // Coefficients after flipping e.
    std::vector<Scalar> mutateCoefficients(int e, bool inverse = false) const {
        if (isCloseToBoundary(e, inverse))
            throw hypothesis("CloseToBoundary", "arc " + edges[e].id + " is close to the boundary");
        std::vector<Scalar> lam;
        for (const auto& p : points) lam.push_back(p.lambda);
        for (int h = 0; h < 2 * numArcs; ++h) {
            auto mg = monogonAt(h);
            if (!mg) continue;
            bool hit = (edgeOf(h) == e && mg->radius < 0) || (mg->radius >= 0 && edgeOf(mg->radius) == e);
            if (!hit) continue;
            lam[mg->puncture] = -lam[mg->puncture];
            lam[start(h)] = lam[start(h)] / nu();
            return lam;
        }
        for (int x : {half(e, true), half(e, false)}) {
            if (uPlus(opp(x), inverse) >= 0) continue;
            if (sideOfSelfFolded(x)) continue;
            int t = end(x), s = start(x);
            lam[t] = -lam[t];
            if (m(s) % 2) lam[s] = -lam[s];
            return lam;
        }
        return lam;
    }
    bool sideOfSelfFolded(int x) const {
        for (int h = 0; h < 2 * numArcs; ++h) {
            auto mg = monogonAt(h);
            if (mg && mg->radius >= 0 && (edgeOf(x) == edgeOf(h) || edgeOf(x) == edgeOf(mg->radius))) return true;
        }
        return false;
    }
    Surface withLambdas(const std::vector<Scalar>& lam) const {
        Surface r = *this;
        for (int i = 0; i < numPoints(); ++i) r.points[i].lambda = lam[i];
        return r;
    }

    // ----- sub-triangulations -----
    // Keeps the listed arcs (in their current order) and all boundary edges.
    Surface restrictTo(const std::vector<int>& keepArcs) const {
        std::vector<int> newIndex(numEdges(), -1);
        Surface r;
        r.prime = prime;
        r.points = points;
        r.rotation.assign(numPoints(), {});
        r.declaredGenus = declaredGenus;
        r.declaredBoundaryCount = declaredBoundaryCount;
        std::vector<int> sorted = keepArcs;
        std::sort(sorted.begin(), sorted.end());
        for (int e : sorted) newIndex[e] = r.addArc(edges[e].id, edges[e].from, edges[e].to);
        for (int b = 0; b < static_cast<int>(boundaries.size()); ++b) {
            r.boundaries.push_back(boundaries[b]);
        }
        for (int e = numArcs; e < numEdges(); ++e) {
            newIndex[e] = static_cast<int>(r.edges.size());
            r.edges.push_back(edges[e]);
        }
        auto mapHalf = [&](int h) { return newIndex[edgeOf(h)] < 0 ? -1 : 2 * newIndex[edgeOf(h)] + (h & 1); };
        for (int p = 0; p < numPoints(); ++p)
            for (int h : rotation[p])
                if (mapHalf(h) >= 0) r.rotation[p].push_back(mapHalf(h));
        // regions: union of old faces glued along removed arcs
        std::vector<int> uf(faces_.size());
        std::iota(uf.begin(), uf.end(), 0);
        std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
        std::vector<int> removed;
        for (int e = 0; e < numArcs; ++e)
            if (newIndex[e] < 0) {
                removed.push_back(e);
                uf[find(faceOf(half(e, true)))] = find(faceOf(half(e, false)));
            }
        r.rebuildRotationsOnly();
        std::map<int, FaceContent> regionContent;
        std::map<int, int> regionChi;
        for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
            regionContent[find(f)].absorb(faces_[f].content);
            regionChi[find(f)] += 1 - faces_[f].content.holes - 2 * faces_[f].content.genus;
        }
        for (int e : removed) regionChi[find(faceOf(half(e, true)))] -= 1;
        for (int p = 0; p < numPoints(); ++p)
            if (isVertex(p) && r.rotation[p].empty()) {
                int f = find(faceOf(rotation[p][0]));
                regionContent[f].punctures.push_back(p);
                std::sort(regionContent[f].punctures.begin(), regionContent[f].punctures.end());
                regionChi[f] += 1;
            }
        std::map<int, std::vector<int>> cycles;
        for (int f = 0; f < static_cast<int>(r.faces_.size()); ++f) {
            int old = faceOf(r.faces_[f].sides[0] == -1 ? 0 : oldHalf(r.faces_[f].sides[0], newIndex));
            cycles[find(old)].push_back(f);
        }
        for (auto& [reg, fs] : cycles) {
            FaceContent c = regionContent[reg];
            int nc = static_cast<int>(fs.size());
            int g2 = 2 - c.holes - nc - regionChi[reg];
            if (nc == 1) {
                c.genus = g2 / 2;
                if (!c.empty()) r.contentByAnchor[r.faces_[fs[0]].sides[0]] = c;
            } else {
                c.linked = true;
                c.genus = 0;
                for (int i = 0; i < nc; ++i) {
                    FaceContent ci = i == 0 ? c : FaceContent{};
                    ci.linked = true;
                    r.contentByAnchor[r.faces_[fs[i]].sides[0]] = ci;
                }
            }
        }
        r.rebuild();
        r.canonicalizeAnchors();
        return r;
    }

    // ----- augmentation -----
    Surface augment() const {
        if (isClosed()) return *this;
        Surface r;
        r.prime = prime;
        r.points = points;
        for (auto& p : r.points) p.boundary = -1;
        r.rotation = rotation;
        for (int e = 0; e < numEdges(); ++e) {
            r.edges.push_back(edges[e]);
            r.edges.back().boundary = -1;
            r.edges.back().index = -1;
        }
        r.numArcs = numEdges();
        r.declaredGenus = declaredGenus;
        r.declaredBoundaryCount = 0;
        int fresh = 0;
        auto newPuncture = [&]() {
            std::string id;
            do {
                id = "aug" + std::to_string(fresh++);
            } while (pointIndex(id) >= 0);
            return r.addPoint(id, 1, S(1));
        };
        r.contentByAnchor.clear();
        for (const auto& f : faces_) {
            FaceContent c = f.content;
            for (int i = 0; i < c.holes; ++i) {
                c.punctures.push_back(newPuncture());
                c.punctures.push_back(newPuncture());
            }
            c.holes = 0;
            if (!c.empty()) r.contentByAnchor[f.sides[0]] = c;
        }
        for (int b = 0; b < static_cast<int>(boundaries.size()); ++b) {
            FaceContent c;
            c.punctures = {newPuncture(), newPuncture()};
            r.contentByAnchor[half(boundaryEdge(b, 0), false)] = c;
        }
        r.rebuild();
        r.canonicalizeAnchors();
        return r;
    }

    // ----- predicates -----
    bool isSparse() const {
        for (int e = 0; e < numArcs; ++e)
            if (arcTouchesBoundary(e)) return false;
        for (const auto& f : faces_)
            if (f.sides.size() == 3 && f.kind == ContentKind::EmptyDisk) return false;
        if (!specialMonogons().empty()) return false;
        if (prime == 2)
            for (int h = 0; h < 2 * numArcs; ++h) {
                auto mg = monogonAt(h);
                if (mg && m(mg->puncture) == 2) return false;
            }
        return true;
    }

    // Connected components of the edge graph, as lists of edge indices.
    std::vector<std::vector<int>> components() const {
        std::vector<int> uf(numPoints());
        std::iota(uf.begin(), uf.end(), 0);
        std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
        for (const auto& e : edges) uf[find(e.from)] = find(e.to);
        std::map<int, std::vector<int>> comp;
        for (int e = 0; e < numEdges(); ++e) comp[find(edges[e].from)].push_back(e);
        std::vector<std::vector<int>> out;
        for (auto& [k, v] : comp) out.push_back(v);
        return out;
    }

    // Arc homotopic to a part of a boundary component.
    bool homotopicToBoundary(int e) const {
        for (int h : {half(e, true), half(e, false)}) {
            const Face& f = faceAt(h);
            if (f.kind != ContentKind::EmptyDisk) continue;
            bool ok = true;
            for (int s : f.sides)
                if (s != h && !isBoundaryHalf(s)) ok = false;
            if (ok) return true;
        }
        return false;
    }

    ComponentLabel classifyComponent(const std::vector<int>& comp) const {
        bool touches = false;
        for (int e : comp) touches = touches || edges[e].isBoundary();
        if (!touches) return ComponentLabel::FiniteRank;
        int punct = 0, heavy = 0, heavyBoundary = 0;
        for (int q = 0; q < numPoints(); ++q) {
            if (isInterior(q)) ++punct;
            if (points[q].m > 1) {
                ++heavy;
                if (!isInterior(q)) ++heavyBoundary;
            }
        }
        if (isDisc() && punct == 0 && heavy <= 1) return ComponentLabel::Lattice;
        if (isDisc() && punct == 1 && heavyBoundary == 0) return ComponentLabel::Lattice;
        bool allOne = true, allHomotopic = true;
        for (int e : comp) {
            if (m(edges[e].from) != 1 || m(edges[e].to) != 1) allOne = false;
            if (isArc(e) && !homotopicToBoundary(e)) allHomotopic = false;
        }
        if (allOne && allHomotopic) return ComponentLabel::Lattice;
        return ComponentLabel::NotFiniteOverCentre;
    }

    // Comparable description of the combinatorial data (ids preserved).
    std::string canonicalKey(bool withCoefficients = true) const {
        std::string k;
        for (int p = 0; p < numPoints(); ++p) {
            k += points[p].id + "|" + std::to_string(points[p].m) + "|";
            if (withCoefficients) k += points[p].lambda.str();
            k += ":";
            std::vector<std::string> toks;
            for (int h : rotation[p]) toks.push_back(token(h));
            if (!toks.empty()) {
                auto least = std::min_element(toks.begin(), toks.end());
                std::rotate(toks.begin(), least, toks.end());
            }
            for (auto& t : toks) k += t + ",";
            k += ";";
        }
        for (const auto& f : faces_) {
            k += "F" + token(f.sides[0]) + "[";
            for (int q : f.content.punctures) k += points[q].id + ",";
            k += "]" + std::to_string(f.content.holes) + "/" + std::to_string(f.content.genus) + ";";
        }
        return k;
    }

    // Successors and faces without reading contents.
    void rebuildRotationsOnly() {
        auto saved = contentByAnchor;
        contentByAnchor.clear();
        rebuild();
        contentByAnchor = saved;
    }

private:
    std::vector<int> succ_, pred_, faceOf_;
    std::vector<Face> faces_;

    int oldHalf(int newHalf, const std::vector<int>& newIndex) const {
        int ne = edgeOf(newHalf);
        for (int e = 0; e < numEdges(); ++e)
            if (newIndex[e] == ne) return 2 * e + (newHalf & 1);
        return -1;
    }

    void classify(Face& f) const {
        const auto& c = f.content;
        if (c.linked || c.holes > 0 || c.genus > 0 || c.punctures.size() >= 2) f.kind = ContentKind::Big;
        else if (c.punctures.size() == 1) f.kind = ContentKind::OnePuncture, f.puncture = c.punctures[0];
        else f.kind = ContentKind::EmptyDisk;
    }
};

// Ribbon graph: vertices with multiplicity and coefficient, edges between
// vertices, and for each vertex the counter-clockwise list of edge ends
// (edge index, true for the end at the edge's first vertex).
struct RibbonGraph {
    struct Vertex { std::string id; int m = 1; Scalar lambda; };
    struct Edge { std::string id; int a = -1, b = -1; };
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, bool>>> cyclic;
};

// Closed surface obtained by gluing one 2d-gon per vertex; every face gets a hole.
inline Surface ribbonGraphToSurface(const RibbonGraph& g, std::int64_t prime = 0) {
    Surface s;
    s.prime = prime;
    for (const auto& v : g.vertices) s.addPoint(v.id, v.m, v.lambda);
    for (const auto& e : g.edges) s.addArc(e.id, e.a, e.b);
    for (size_t v = 0; v < g.vertices.size(); ++v)
        for (auto [e, first] : g.cyclic[v]) s.rotation[v].push_back(Surface::half(e, first));
    s.rebuildRotationsOnly();
    for (const auto& f : s.faces()) {
        FaceContent c;
        c.holes = 1;
        s.contentByAnchor[f.sides[0]] = c;
    }
    int F = static_cast<int>(s.faces().size());
    int V = static_cast<int>(g.vertices.size()), E = static_cast<int>(g.edges.size());
    s.declaredBoundaryCount = F;
    s.declaredGenus = (2 - F - V + E) / 2;
    s.rebuild();
    return s;
}

}  // namespace surfalg
