#pragma once

#include "linalg.hpp"
#include "presentation.hpp"

#include <memory>
#include <optional>
#include <tuple>

namespace surfalg {

enum class BasisKind { Idem, Central, Wind };

struct BasisElement {
    BasisKind kind = BasisKind::Idem;
    int arc = -1;  // Idem and Central
    Seg seg;       // Wind
    auto key() const { return std::make_tuple(static_cast<int>(kind), arc, seg.h, seg.k); }
};

// Zero or a scalar multiple of one basis element.
struct Product {
    bool zero = true;
    Scalar coef;
    int index = -1;
};

// Word in the arc quiver: coef * C^centrals * (segments), starting at arc `vertex`.
struct Word {
    Scalar coef;
    int centrals = 0;
    int vertex = -1;
    std::vector<Seg> segs;
};

using Elem = std::vector<Scalar>;

class Algebra {
public:
    explicit Algebra(const Surface& s)
        : surface_(std::make_unique<Surface>(s)), pres_(std::make_unique<Presentation>(*surface_)) {
        enumerate();
        int maxMd = 1;
        for (int p = 0; p < s.numPoints(); ++p) maxMd = std::max(maxMd, s.m(p) * s.rotSize(p));
        cap_ = 8 * std::max(1, s.numArcs) * maxMd + 64;
        monotone_ = checkMonotone();
        buildTable();
    }
    Algebra(const Algebra&) = delete;
    Algebra& operator=(const Algebra&) = delete;

    const Surface& surface() const { return *surface_; }
    const Presentation& presentation() const { return *pres_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisElement>& basis() const { return basis_; }
    std::int64_t prime() const { return surface_->prime; }
    Scalar S(long v) const { return Scalar(v, prime()); }

    int indexOf(const BasisElement& b) const {
        auto it = index_.find(b.key());
        return it == index_.end() ? -1 : it->second;
    }
    int idem(int arc) const { return indexOf({BasisKind::Idem, arc, {}}); }
    int centralIndex(int arc) const { return indexOf({BasisKind::Central, arc, {}}); }
    int wind(int h, int k) const { return indexOf({BasisKind::Wind, -1, {h, k}}); }

    int source(int i) const {
        const auto& b = basis_[i];
        return b.kind == BasisKind::Wind ? Surface::edgeOf(b.seg.h) : b.arc;
    }
    int target(int i) const {
        const auto& b = basis_[i];
        return b.kind == BasisKind::Wind ? Surface::edgeOf(pres_->walk(b.seg.h, b.seg.k)) : b.arc;
    }

    const Product& product(int i, int j) const { return table_[i][j]; }

    // Rank predicted by the degree formula.
    int rankFormula() const {
        const Surface& s = *surface_;
        int r = 0;
        for (int p = 0; p < s.numPoints(); ++p) {
            int d = s.degree(p);
            r += s.isInterior(p) ? s.m(p) * d * d : d * (d - 1) / 2;
        }
        for (int e = 0; e < s.numArcs; ++e)
            if (!s.isInterior(s.edges[e].from) && !s.isInterior(s.edges[e].to)) ++r;
        return r;
    }

    std::string label(int i) const {
        const auto& b = basis_[i];
        const Surface& s = *surface_;
        if (b.kind == BasisKind::Idem) return "e_" + s.edges[b.arc].id;
        if (b.kind == BasisKind::Central) return "c_" + s.edges[b.arc].id;
        return windLabel(b.seg);
    }
    std::string windLabel(const Seg& g) const {
        const Surface& s = *surface_;
        int d = s.rotSize(s.start(g.h));
        int r = (g.k - 1) % d + 1, l = (g.k - r) / d;
        std::string h = s.token(g.h);
        std::string out;
        if (l > 0) out = "ic(" + h + "," + h + ")" + (l > 1 ? "^" + std::to_string(l) : "") + " ";
        return out + "ic(" + h + "," + s.token(pres_->walk(g.h, g.k)) + ")";
    }

    // ----- words -----
    Word wordOf(int i) const {
        const auto& b = basis_[i];
        Word w;
        w.coef = S(1);
        w.vertex = source(i);
        if (b.kind == BasisKind::Central) w.centrals = 1;
        if (b.kind == BasisKind::Wind) w.segs.push_back(b.seg);
        return w;
    }
    std::optional<Word> concat(const Word& a, const Word& b) const {
        if (wordEnd(a) != b.vertex) return std::nullopt;
        Word w = a;
        w.coef *= b.coef;
        w.centrals += b.centrals;
        w.segs.insert(w.segs.end(), b.segs.begin(), b.segs.end());
        return w;
    }
    int wordEnd(const Word& w) const {
        if (w.segs.empty()) return w.vertex;
        const Seg& g = w.segs.back();
        return Surface::edgeOf(pres_->walk(g.h, g.k));
    }

    Word wordOfPath(const QPath& p, const Scalar& c) const {
        Word w;
        w.coef = c;
        w.vertex = p.vertex;
        for (int a : p.arrows) w.segs.push_back({a, 1});
        return w;
    }

    // Normal form of a word: zero or a multiple of one basis element.
    Product normalize(Word w) const {
        const Surface& s = *surface_;
        const Presentation& P = *pres_;
        std::map<std::vector<int>, Scalar> seen;
        for (int step = 0;; ++step) {
            if (step > cap_) throw computation("DepthCapExceeded", "rewrite budget exhausted");
            if (w.coef.isZero()) return {};
            tidy(w);
            for (const auto& g : w.segs)
                if (P.passesBoundary(g.h, g.k)) return {};
            for (auto& g : w.segs) {
                int p = s.start(g.h);
                if (!s.isInterior(p) || g.k < P.md(p)) continue;
                if (s.arcTouchesBoundary(Surface::edgeOf(g.h))) return {};
                w.coef /= s.lambda(p);
                g.k -= P.md(p);
                w.centrals += 1;
            }
            tidy(w);
            if (w.centrals >= 2) return {};
            if (monotone_ && weight(w) > 1.0 + 1e-9) return {};
            if (w.centrals == 1)
                for (const auto& g : w.segs) {
                    int x = g.h;
                    for (int i = 0; i < g.k; ++i, x = s.succ(x))
                        if (!P.isSpecialArrow(x)) return {};
                }
            // a turn with no right-hand side kills the word; shrinking turns go first
            int turn = -1, shrink = -1;
            for (size_t i = 0; i + 1 < w.segs.size(); ++i) {
                if (P.walk(w.segs[i].h, w.segs[i].k) == w.segs[i + 1].h) continue;
                FTerm f = P.alt0(w.segs[i + 1].h);
                if (f.kind == FTerm::Zero) return {};
                if (turn < 0) turn = static_cast<int>(i);
                if (shrink < 0 && f.kind == FTerm::Path && f.seg.k < 2) shrink = static_cast<int>(i);
            }
            if (shrink >= 0) turn = shrink;
            if (turn >= 0) {
                // a word that comes back as k times itself vanishes unless k = 1
                std::vector<int> key{w.centrals, w.vertex};
                for (const auto& g : w.segs) key.insert(key.end(), {g.h, g.k});
                auto [it, fresh] = seen.emplace(key, w.coef);
                if (!fresh) {
                    if (it->second == w.coef) throw computation("UnsupportedCase", "rewrite cycle without scaling");
                    return {};
                }
                Seg a = w.segs[turn], b = w.segs[turn + 1];
                int v = b.h;
                FTerm f = P.alt0(v);
                if (f.kind == FTerm::Zero) return {};
                std::vector<Seg> mid;
                if (f.kind == FTerm::Path) mid.push_back(f.seg);
                else w.centrals += 1;
                w.coef *= f.coef;
                std::vector<Seg> segs(w.segs.begin(), w.segs.begin() + turn);
                segs.push_back({a.h, a.k - 1});
                segs.insert(segs.end(), mid.begin(), mid.end());
                segs.push_back({s.succ(v), b.k - 1});
                segs.insert(segs.end(), w.segs.begin() + turn + 2, w.segs.end());
                w.segs = segs;
                continue;
            }
            if (w.segs.empty()) {
                if (w.centrals == 0) return {false, w.coef, idem(w.vertex)};
                int c = centralIndex(w.vertex);
                if (c < 0) return {};
                return {false, w.coef, c};
            }
            Seg g = w.segs[0];
            if (w.centrals == 0) {
                int i = wind(g.h, g.k);
                if (i < 0) throw computation("UnsupportedCase", "winding outside the basis: " + windLabel(g));
                return {false, w.coef, i};
            }
            // c_u times a special winding: expand c_u through the opposite end
            int y = Surface::opp(g.h);
            int py = s.start(y);
            if (!s.isInterior(py)) return {};
            FTerm f = P.alt0(g.h);
            if (f.kind == FTerm::Zero) return {};
            w.coef *= s.lambda(py) * f.coef;
            w.centrals = f.kind == FTerm::Central ? 1 : 0;
            std::vector<Seg> segs{{y, P.md(py) - 1}};
            if (f.kind == FTerm::Path) segs.push_back(f.seg);
            segs.push_back({s.succ(g.h), g.k - 1});
            w.segs = segs;
            w.vertex = Surface::edgeOf(y);
        }
    }

    Product multiplyBasis(int i, int j) const {
        auto w = concat(wordOf(i), wordOf(j));
        if (!w) return {};
        return normalize(*w);
    }

    // ----- elements -----
    Elem zeroElem() const { return Elem(dim(), S(0)); }
    Elem unit(int i) const {
        Elem e = zeroElem();
        e[i] = S(1);
        return e;
    }
    Elem one() const {
        Elem e = zeroElem();
        for (int u = 0; u < surface_->numArcs; ++u) e[idem(u)] = S(1);
        return e;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        Elem r = zeroElem();
        for (int i = 0; i < dim(); ++i) {
            if (a[i].isZero()) continue;
            for (int j = 0; j < dim(); ++j) {
                if (b[j].isZero()) continue;
                const Product& p = table_[i][j];
                if (!p.zero) r[p.index] += a[i] * b[j] * p.coef;
            }
        }
        return r;
    }
    Elem add(Elem a, const Elem& b, const Scalar& c) const {
        for (int i = 0; i < dim(); ++i) a[i] += c * b[i];
        return a;
    }
    bool isZero(const Elem& a) const {
        for (const auto& x : a)
            if (!x.isZero()) return false;
        return true;
    }
    Elem fromProduct(const Product& p) const {
        Elem e = zeroElem();
        if (!p.zero) e[p.index] = p.coef;
        return e;
    }
    Elem pathElement(const QPath& p, const Scalar& c) const { return fromProduct(normalize(wordOfPath(p, c))); }
    Elem comboElement(const PathCombo& combo) const {
        Elem e = zeroElem();
        for (const auto& [p, c] : combo) e = add(e, pathElement(p, c), S(1));
        return e;
    }

    // ----- checks and invariants -----
    // Every triple (ab)c = a(bc); returns the first failure.
    std::optional<std::tuple<int, int, int>> associativityFailure() const {
        int n = dim();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const Product& ab = table_[a][b];
                for (int c = 0; c < n; ++c) {
                    const Product& bc = table_[b][c];
                    Product left, right;
                    if (!ab.zero) {
                        left = table_[ab.index][c];
                        if (!left.zero) left.coef *= ab.coef;
                    }
                    if (!bc.zero) {
                        right = table_[a][bc.index];
                        if (!right.zero) right.coef *= bc.coef;
                    }
                    bool same = left.zero == right.zero &&
                                (left.zero || (left.index == right.index && left.coef == right.coef));
                    if (!same) return std::make_tuple(a, b, c);
                }
            }
        return std::nullopt;
    }

    std::vector<Elem> centerBasis() const {
        int n = dim();
        Matrix m;
        for (int j = 0; j < n; ++j) {
            Matrix block = zeroMatrix(n, n, prime());
            for (int i = 0; i < n; ++i) {
                const Product& l = table_[i][j];
                const Product& r = table_[j][i];
                if (!l.zero) block[l.index][i] += l.coef;
                if (!r.zero) block[r.index][i] -= r.coef;
            }
            for (auto& row : block) {
                bool nz = false;
                for (auto& x : row) nz = nz || !x.isZero();
                if (nz) m.push_back(row);
            }
        }
        return kernel(m, n, prime());
    }
    int centerDim() const { return static_cast<int>(centerBasis().size()); }

    Elem centralSum() const {
        Elem e = zeroElem();
        for (int u = 0; u < surface_->numArcs; ++u) {
            int c = centralIndex(u);
            if (c >= 0) e[c] = S(1);
        }
        return e;
    }

    // Trace functional: 1 on every c_u, lambda_M lambda_N on ic(u,-u) for 2-special u.
    Elem traceValues() const {
        const Surface& s = *surface_;
        Elem t = zeroElem();
        for (int u = 0; u < s.numArcs; ++u)
            if (centralIndex(u) >= 0) t[centralIndex(u)] = S(1);
        for (int h = 0; h < 2 * s.numArcs; ++h) {
            auto pair = s.twoSpecial(h);
            if (!pair) continue;
            int k = pres_->steps0(h, Surface::opp(h));
            int i = wind(h, k);
            if (i >= 0) t[i] = s.lambda(pair->first) * s.lambda(pair->second);
        }
        return t;
    }
    Scalar trace(const Elem& x) const {
        Elem t = traceValues();
        Scalar r = S(0);
        for (int i = 0; i < dim(); ++i) r += t[i] * x[i];
        return r;
    }
    Matrix gram() const {
        Elem t = traceValues();
        Matrix g = zeroMatrix(dim(), dim(), prime());
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) {
                const Product& p = table_[i][j];
                if (!p.zero) g[i][j] = t[p.index] * p.coef;
            }
        return g;
    }
    bool traceIsSymmetric() const {
        Matrix g = gram();
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < i; ++j)
                if (g[i][j] != g[j][i]) return false;
        return true;
    }
    bool isSymmetricAlgebra() const {
        return traceIsSymmetric() && !determinant(gram(), prime()).isZero();
    }

    // Complete set of pairwise non-isomorphic primitive idempotents.
    std::vector<Elem> primitiveIdempotents() const {
        const Surface& s = *surface_;
        std::vector<Elem> out;
        std::vector<bool> isRadius(s.numArcs, false);
        for (const auto& mg : s.specialMonogons())
            if (mg.radius >= 0) isRadius[Surface::edgeOf(mg.radius)] = true;
        for (int u = 0; u < s.numArcs; ++u) {
            Elem e = unit(idem(u));
            bool split = false;
            for (int h : {Surface::half(u, true), Surface::half(u, false)}) {
                auto mg = s.specialMonogonAt(h);
                if (!mg) continue;
                if (split) throw computation("UnsupportedCase", "arc with two special sides");
                split = true;
                int i = wind(h, pres_->steps0(h, Surface::opp(h)));
                if (i < 0) throw computation("UnsupportedCase", "special idempotent outside the basis");
                Elem a = unit(i);
                for (auto& x : a) x /= s.lambda(mg->puncture);
                if (mul(a, a) != a) throw computation("UnsupportedCase", "special winding is not idempotent");
                if (mg->radius < 0) out.push_back(a);
                e = add(e, a, S(-1));
            }
            out.push_back(e);
        }
        return out;
    }
    int numSimples() const { return static_cast<int>(primitiveIdempotents().size()); }

    Matrix cartan() const {
        auto f = primitiveIdempotents();
        size_t r = f.size();
        Matrix c = zeroMatrix(r, r, 0);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < r; ++j) {
                Matrix rows;
                for (int b = 0; b < dim(); ++b) {
                    Elem x = mul(mul(f[i], unit(b)), f[j]);
                    if (!isZero(x)) rows.push_back(x);
                }
                c[i][j] = Scalar(static_cast<long>(rows.empty() ? 0 : rank(rows)));
            }
        return c;
    }

private:
    std::unique_ptr<Surface> surface_;
    std::unique_ptr<Presentation> pres_;
    std::vector<BasisElement> basis_;
    std::map<std::tuple<int, int, int, int>, int> index_;
    std::vector<std::vector<Product>> table_;
    int cap_ = 64;
    bool monotone_ = false;

    // Weight with 1/(m d) per ordinary arrow at its pivot and 0 per special arrow;
    // a full turn through ordinary arrows weighs 1.
    double segWeight(const Seg& g) const {
        double r = 0;
        int x = g.h;
        for (int i = 0; i < g.k; ++i, x = surface_->succ(x))
            if (!pres_->isSpecialArrow(x)) r += 1.0 / pres_->md(surface_->start(x));
        return r;
    }
    double weight(const Word& w) const {
        double r = w.centrals;
        for (const auto& g : w.segs) r += segWeight(g);
        return r;
    }
    double ftermWeight(const FTerm& f) const {
        return f.kind == FTerm::Central ? 1.0 : segWeight(f.seg);
    }
    // Words heavier than a full turn vanish when no rewrite lowers the weight.
    bool checkMonotone() const {
        const Surface& s = *surface_;
        const double eps = 1e-9;
        for (int v = 0; v < 2 * s.numArcs; ++v) {
            if (pres_->hasTurnRelation(v)) {
                FTerm f = pres_->alt0(v);
                if (f.kind != FTerm::Zero) {
                    QPath head = pres_->turnHead(v);
                    double hw = 0;
                    bool fires = true;
                    for (int a : head.arrows) {
                        hw += segWeight({a, 1});
                        // a one-arrow full turn becomes central before any turn is rewritten
                        if (s.isInterior(s.start(a)) && pres_->md(s.start(a)) == 1) fires = false;
                    }
                    if (fires && ftermWeight(f) + eps < hw) return false;
                }
            }
            if (pres_->isSpecialArrow(v)) {
                int y = Surface::opp(v);
                int py = s.start(y);
                if (!s.isInterior(py)) continue;
                FTerm f = pres_->alt0(v);
                if (f.kind == FTerm::Zero) continue;
                if (segWeight({y, pres_->md(py) - 1}) + ftermWeight(f) + eps < 1.0) return false;
            }
        }
        return true;
    }

    void tidy(Word& w) const {
        if (!w.segs.empty()) w.vertex = Surface::edgeOf(w.segs[0].h);
        std::vector<Seg> out;
        for (const auto& g : w.segs) {
            if (g.k < 0) throw computation("UnsupportedCase", "negative winding");
            if (g.k == 0) continue;
            if (!out.empty() && pres_->walk(out.back().h, out.back().k) == g.h) out.back().k += g.k;
            else out.push_back(g);
        }
        w.segs = out;
    }

    void enumerate() {
        const Surface& s = *surface_;
        for (int u = 0; u < s.numArcs; ++u) basis_.push_back({BasisKind::Idem, u, {}});
        for (int u = 0; u < s.numArcs; ++u)
            if (!s.arcTouchesBoundary(u)) basis_.push_back({BasisKind::Central, u, {}});
        std::vector<std::tuple<std::string, std::string, int, int, int>> winds;
        for (int h = 0; h < 2 * s.numArcs; ++h) {
            int p = s.start(h);
            int limit = s.isInterior(p) ? pres_->md(p) - 1 : 0;
            if (!s.isInterior(p)) {
                int x = s.succ(h);
                while (s.isArcHalf(x) && x != h) {
                    ++limit;
                    x = s.succ(x);
                }
            }
            for (int k = 1; k <= limit; ++k)
                winds.emplace_back(s.points[p].id, s.edges[Surface::edgeOf(h)].id, h & 1, k, h);
        }
        std::sort(winds.begin(), winds.end());
        for (const auto& [pid, aid, dir, k, h] : winds) basis_.push_back({BasisKind::Wind, -1, {h, k}});
        for (int i = 0; i < dim(); ++i) index_[basis_[i].key()] = i;
    }

    void buildTable() {
        int n = dim();
        table_.assign(n, std::vector<Product>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) table_[i][j] = multiplyBasis(i, j);
    }
};

}  // namespace surfalg
