#pragma once

#include "algebra.hpp"

#include <numeric>
#include <set>

namespace surfalg {

// ---------------------------------------------------------------------------
// Derived invariants and flips

struct InvariantTuple {
    int numSimples = 0;
    int totalRank = 0;
    int centerDim = 0;
    std::string cartanDetAbs;
    bool symmetric = false;

    // Fields preserved by derived equivalence; the rank is not among them.
    bool derivedEqual(const InvariantTuple& o) const {
        return numSimples == o.numSimples && centerDim == o.centerDim && cartanDetAbs == o.cartanDetAbs &&
               symmetric == o.symmetric;
    }
};

inline InvariantTuple derivedInvariants(const Algebra& A) {
    InvariantTuple t;
    t.numSimples = A.numSimples();
    t.totalRank = A.dim();
    t.centerDim = A.centerDim();
    Scalar det = determinant(A.cartan(), 0);
    std::string d = det.str();
    if (!d.empty() && d[0] == '-') d.erase(0, 1);
    t.cartanDetAbs = d;
    t.symmetric = A.isSymmetricAlgebra();
    return t;
}

// Flip together with the coefficient mutation.
inline Surface performFlip(const Surface& s, int e, bool inverse = false) {
    auto lam = s.mutateCoefficients(e, inverse);
    return s.flip(e, inverse).withLambdas(lam);
}

struct FlipReport {
    std::string arc;
    InvariantTuple before, after;
    bool invariantsAgree = false;
    bool roundTrip = false;
    bool ok() const { return invariantsAgree && roundTrip; }
};

inline FlipReport checkFlipInvariants(const Surface& s, int e) {
    FlipReport r;
    r.arc = s.edges[e].id;
    Surface f = performFlip(s, e);
    {
        Algebra a(s), b(f);
        r.before = derivedInvariants(a);
        r.after = derivedInvariants(b);
    }
    r.invariantsAgree = r.before.derivedEqual(r.after);
    r.roundTrip = f.flip(e, true).canonicalKey(false) == s.canonicalKey(false);
    return r;
}

// ---------------------------------------------------------------------------
// Brauer graph algebras, built from ribbon data alone

struct BrauerData {
    std::int64_t prime = 0;
    std::vector<int> m;
    std::vector<Scalar> lambda;
    std::vector<std::vector<int>> cyclic;  // half-edges per vertex, counter-clockwise
    std::vector<std::string> edgeIds;
};

// Ribbon data of the arcs of s; boundary ends are dropped from the cyclic orders.
inline BrauerData brauerDataOf(const Surface& s, bool multiplicityOne = false) {
    BrauerData d;
    d.prime = s.prime;
    for (int p = 0; p < s.numPoints(); ++p) {
        d.m.push_back(multiplicityOne ? 1 : s.m(p));
        d.lambda.push_back(s.lambda(p));
        std::vector<int> c;
        for (int h : s.rotation[p])
            if (s.isArcHalf(h)) c.push_back(h);
        d.cyclic.push_back(c);
    }
    for (int e = 0; e < s.numArcs; ++e) d.edgeIds.push_back(s.edges[e].id);
    return d;
}

inline BrauerData brauerDataOf(const RibbonGraph& g, std::int64_t prime = 0) {
    BrauerData d;
    d.prime = prime;
    for (size_t v = 0; v < g.vertices.size(); ++v) {
        d.m.push_back(g.vertices[v].m);
        d.lambda.push_back(g.vertices[v].lambda);
        std::vector<int> c;
        for (auto [e, first] : g.cyclic[v]) c.push_back(Surface::half(e, first));
        d.cyclic.push_back(c);
    }
    for (const auto& e : g.edges) d.edgeIds.push_back(e.id);
    return d;
}

class BrauerTable {
public:
    explicit BrauerTable(BrauerData d) : d_(std::move(d)) {
        int n = static_cast<int>(d_.edgeIds.size());
        succ_.assign(2 * n, -1);
        vertexOf_.assign(2 * n, -1);
        for (int v = 0; v < static_cast<int>(d_.cyclic.size()); ++v) {
            const auto& c = d_.cyclic[v];
            for (size_t i = 0; i < c.size(); ++i) {
                succ_[c[i]] = c[(i + 1) % c.size()];
                vertexOf_[c[i]] = v;
            }
        }
        for (int u = 0; u < n; ++u) add({BasisKind::Idem, u, {}});
        for (int u = 0; u < n; ++u) add({BasisKind::Central, u, {}});
        for (int h = 0; h < 2 * n; ++h)
            for (int k = 1; k < md(h); ++k) add({BasisKind::Wind, -1, {h, k}});
    }

    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisElement>& basis() const { return basis_; }
    int indexOf(const BasisElement& b) const {
        auto it = index_.find(b.key());
        return it == index_.end() ? -1 : it->second;
    }
    int md(int h) const {
        int v = vertexOf_[h];
        return d_.m[v] * static_cast<int>(d_.cyclic[v].size());
    }
    int walk(int h, int k) const {
        for (int i = 0; i < k; ++i) h = succ_[h];
        return h;
    }
    int source(int i) const {
        const auto& b = basis_[i];
        return b.kind == BasisKind::Wind ? Surface::edgeOf(b.seg.h) : b.arc;
    }
    int target(int i) const {
        const auto& b = basis_[i];
        return b.kind == BasisKind::Wind ? Surface::edgeOf(walk(b.seg.h, b.seg.k)) : b.arc;
    }

    Product product(int i, int j) const {
        const auto& x = basis_[i];
        const auto& y = basis_[j];
        Scalar one(1, d_.prime);
        if (target(i) != source(j)) return {};
        if (x.kind == BasisKind::Idem) return {false, one, j};
        if (y.kind == BasisKind::Idem) return {false, one, i};
        if (x.kind == BasisKind::Central || y.kind == BasisKind::Central) return {};
        if (walk(x.seg.h, x.seg.k) != y.seg.h) return {};
        int k = x.seg.k + y.seg.k, full = md(x.seg.h);
        if (k < full) return {false, one, indexOf({BasisKind::Wind, -1, {x.seg.h, k}})};
        if (k > full) return {};
        int v = vertexOf_[x.seg.h];
        return {false, one / d_.lambda[v], indexOf({BasisKind::Central, Surface::edgeOf(x.seg.h), {}})};
    }

private:
    BrauerData d_;
    std::vector<int> succ_, vertexOf_;
    std::vector<BasisElement> basis_;
    std::map<std::tuple<int, int, int, int>, int> index_;

    void add(const BasisElement& b) {
        index_[b.key()] = static_cast<int>(basis_.size());
        basis_.push_back(b);
    }
};

struct BrauerReport {
    bool identityIdentification = false;  // table compared entry by entry
    bool ok = false;
    int dimension = 0, brauerDimension = 0;
    std::string mismatch;
};

// Turn relations with a nonzero right-hand side on a sparse surface.
inline bool hasNonzeroTurnRule(const Algebra& A) {
    const Presentation& P = A.presentation();
    for (int v = 0; v < 2 * A.surface().numArcs; ++v)
        if (P.hasTurnRelation(v) && P.alt0(v).kind != FTerm::Zero) return true;
    return false;
}

inline bool sameProduct(const Product& a, const Product& b) {
    if (a.zero != b.zero) return false;
    return a.zero || (a.index == b.index && a.coef == b.coef);
}

// Compares A with the Brauer graph algebra of the given ribbon data; the edges
// of the data are the arcs of A in the same order.
inline BrauerReport brauerCompare(const Algebra& A, const BrauerData& data) {
    const Surface& s = A.surface();
    if (!s.isSparse()) throw hypothesis("NotSparse", "partial triangulation is not sparse");
    if (static_cast<int>(data.edgeIds.size()) != s.numArcs)
        throw hypothesis("PreconditionFailed", "ribbon data and surface have different edge counts");
    BrauerTable B(data);
    BrauerReport r;
    r.dimension = A.dim();
    r.brauerDimension = B.dim();
    if (A.dim() != B.dim()) {
        r.mismatch = "dimension";
        return r;
    }
    if (hasNonzeroTurnRule(A)) {
        // the isomorphism changes generators here; compare the centres instead
        int n = B.dim();
        Matrix rows;
        for (int j = 0; j < n; ++j) {
            Matrix block = zeroMatrix(n, n, s.prime);
            for (int i = 0; i < n; ++i) {
                auto l = B.product(i, j), rr = B.product(j, i);
                if (!l.zero) block[l.index][i] += l.coef;
                if (!rr.zero) block[rr.index][i] -= rr.coef;
            }
            for (auto& row : block) rows.push_back(row);
        }
        r.ok = static_cast<int>(kernel(rows, n, s.prime).size()) == A.centerDim();
        if (!r.ok) r.mismatch = "centre dimension";
        return r;
    }
    r.identityIdentification = true;
    std::vector<int> toA(B.dim());
    for (int i = 0; i < B.dim(); ++i) {
        toA[i] = A.indexOf(B.basis()[i]);
        if (toA[i] < 0) {
            r.mismatch = "basis element missing in the algebra";
            return r;
        }
    }
    for (int i = 0; i < B.dim(); ++i)
        for (int j = 0; j < B.dim(); ++j) {
            Product p = B.product(i, j);
            if (!p.zero) p.index = toA[p.index];
            if (!sameProduct(p, A.product(toA[i], toA[j]))) {
                r.mismatch = A.label(toA[i]) + " * " + A.label(toA[j]);
                return r;
            }
        }
    r.ok = true;
    return r;
}

inline BrauerReport brauerCompare(const Algebra& A) { return brauerCompare(A, brauerDataOf(A.surface())); }

// ---------------------------------------------------------------------------
// Trivial extension versus the multiplicity-one Brauer graph algebra

struct TrivialExtensionReport {
    int extensionDim = 0, brauerDim = 0;
    bool ok = false;
    std::string mismatch;
};

inline TrivialExtensionReport trivialExtensionCheck(const Algebra& A) {
    const Surface& s = A.surface();
    for (int e = 0; e < s.numArcs; ++e)
        if (s.isInterior(s.edges[e].from) || s.isInterior(s.edges[e].to))
            throw hypothesis("PreconditionFailed", "arc " + s.edges[e].id + " ends at a puncture");
    if (!s.specialMonogons().empty()) throw hypothesis("PreconditionFailed", "special monogon present");
    BrauerTable B(brauerDataOf(s, true));
    int n = A.dim(), N = 2 * n;
    TrivialExtensionReport r;
    r.extensionDim = N;
    r.brauerDim = B.dim();
    if (N != B.dim()) {
        r.mismatch = "dimension";
        return r;
    }
    Scalar zero = s.S(0);
    // image of each basis vector of the extension: (coefficient, Brauer index)
    std::vector<std::pair<Scalar, int>> phi(N);
    for (int i = 0; i < n; ++i) {
        const auto& b = A.basis()[i];
        if (b.kind == BasisKind::Idem) {
            phi[i] = {s.S(1), B.indexOf(b)};
            phi[n + i] = {s.S(1), B.indexOf({BasisKind::Central, b.arc, {}})};
        } else if (b.kind == BasisKind::Wind) {
            int p = s.start(b.seg.h);
            int t = B.walk(b.seg.h, b.seg.k);
            phi[i] = {s.S(1), B.indexOf(b)};
            phi[n + i] = {s.lambda(p), B.indexOf({BasisKind::Wind, -1, {t, B.md(t) - b.seg.k}})};
        } else {
            r.mismatch = "central element in the algebra";
            return r;
        }
    }
    std::set<int> hit;
    for (auto& [c, k] : phi)
        if (k < 0 || !hit.insert(k).second) {
            r.mismatch = "generator identification is not a bijection";
            return r;
        }
    // multiplication of the extension, as coordinate vectors
    auto extProduct = [&](int i, int j) {
        std::vector<Scalar> v(N, zero);
        bool di = i >= n, dj = j >= n;
        if (di && dj) return v;
        if (!di && !dj) {
            const Product& p = A.product(i, j);
            if (!p.zero) v[p.index] += p.coef;
        } else if (!di) {
            // (b_i . f)(x) = f(x b_i)
            for (int x = 0; x < n; ++x) {
                const Product& p = A.product(x, i);
                if (!p.zero && p.index == j - n) v[n + x] += p.coef;
            }
        } else {
            // (f . b_j)(x) = f(b_j x)
            for (int x = 0; x < n; ++x) {
                const Product& p = A.product(j, x);
                if (!p.zero && p.index == i - n) v[n + x] += p.coef;
            }
        }
        return v;
    };
    std::map<int, int> inverse;
    for (int i = 0; i < N; ++i) inverse[phi[i].second] = i;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            std::vector<Scalar> lhs(N, zero), rhs(N, zero);
            auto v = extProduct(i, j);
            for (int k = 0; k < N; ++k)
                if (!v[k].isZero()) lhs[phi[k].second] += v[k] * phi[k].first;
            Product p = B.product(phi[i].second, phi[j].second);
            if (!p.zero) rhs[p.index] += p.coef * phi[i].first * phi[j].first;
            if (lhs != rhs) {
                r.mismatch = std::to_string(i) + " * " + std::to_string(j);
                return r;
            }
        }
    r.ok = true;
    return r;
}

// ---------------------------------------------------------------------------
// Idempotent restriction

struct RestrictionReport {
    std::vector<std::string> arcs;
    int restrictedDim = 0, subDim = 0;
    bool ok = false;
    std::string mismatch;
};

inline RestrictionReport restrictionCheck(const Algebra& A, std::vector<int> keep) {
    const Surface& s = A.surface();
    std::sort(keep.begin(), keep.end());
    Surface t = s.restrictTo(keep);
    Algebra B(t);
    RestrictionReport r;
    for (int e : keep) r.arcs.push_back(s.edges[e].id);
    r.subDim = B.dim();
    std::set<int> kept(keep.begin(), keep.end());
    for (int i = 0; i < A.dim(); ++i)
        if (kept.count(A.source(i)) && kept.count(A.target(i))) ++r.restrictedDim;
    if (r.restrictedDim != r.subDim) {
        r.mismatch = "dimension";
        return r;
    }
    auto up = [&](int h) { return 2 * keep[Surface::edgeOf(h)] + (h & 1); };
    std::vector<int> toA(B.dim());
    for (int i = 0; i < B.dim(); ++i) {
        const auto& b = B.basis()[i];
        if (b.kind == BasisKind::Idem) toA[i] = A.idem(keep[b.arc]);
        else if (b.kind == BasisKind::Central) toA[i] = A.centralIndex(keep[b.arc]);
        else {
            int cur = b.seg.h, big = up(cur), steps = 0;
            for (int k = 0; k < b.seg.k; ++k) {
                cur = t.succ(cur);
                int goal = up(cur);
                do {
                    big = s.succ(big);
                    ++steps;
                } while (big != goal);
            }
            toA[i] = A.wind(up(b.seg.h), steps);
        }
        if (toA[i] < 0) {
            r.mismatch = "no image for " + B.label(i);
            return r;
        }
    }
    for (int i = 0; i < B.dim(); ++i)
        for (int j = 0; j < B.dim(); ++j) {
            Product p = B.product(i, j);
            if (!p.zero) p.index = toA[p.index];
            if (!sameProduct(p, A.product(toA[i], toA[j]))) {
                r.mismatch = B.label(i) + " * " + B.label(j);
                return r;
            }
        }
    r.ok = true;
    return r;
}

// ---------------------------------------------------------------------------
// Change of tag at a special puncture

struct RetagReport {
    std::string side;
    bool multiplicative = false;
    bool bijective = false;
    bool ok() const { return multiplicative && bijective; }
};

inline std::vector<Scalar> retagCoefficients(const Surface& s, int h) {
    auto mg = s.specialMonogonAt(h);
    std::vector<Scalar> mu;
    for (const auto& p : s.points) mu.push_back(p.lambda);
    mu[mg->puncture] = -mu[mg->puncture];
    mu[s.start(h)] = mu[s.start(h)] / s.nu();
    return mu;
}

// psi: algebra for the retagged coefficients -> algebra for the original ones.
inline RetagReport retagCheck(const Algebra& A, int h) {
    const Surface& s = A.surface();
    auto mg = s.specialMonogonAt(h);
    if (!mg) throw hypothesis("PreconditionFailed", s.token(h) + " does not enclose a special monogon");
    if (mg->radius >= 0) throw hypothesis("RadiusArcPresent", "the arc to the special puncture is present");
    auto mu = retagCoefficients(s, h);
    Algebra M(s.withLambdas(mu));
    const Presentation& P = A.presentation();
    int n = A.dim();
    auto arrowImage = [&](int a) {
        Elem x = A.pathElement(P.segPath(a, 1), s.S(1));
        if (a == h) x = A.add(x, A.unit(A.idem(Surface::edgeOf(h))), -s.lambda(mg->puncture));
        return x;
    };
    auto pathImage = [&](int g, int k, int vertex) {
        Elem x = A.unit(A.idem(vertex));
        for (int i = 0; i < k; ++i, g = s.succ(g)) x = A.mul(x, arrowImage(g));
        return x;
    };
    std::vector<Elem> psi(n);
    for (int i = 0; i < n; ++i) {
        const auto& b = M.basis()[i];
        if (b.kind == BasisKind::Idem) psi[i] = A.unit(A.idem(b.arc));
        else if (b.kind == BasisKind::Wind) psi[i] = pathImage(b.seg.h, b.seg.k, Surface::edgeOf(b.seg.h));
        else {
            int f = Surface::half(b.arc, true);
            int p = s.start(f);
            psi[i] = pathImage(f, P.md(p), b.arc);
            for (auto& x : psi[i]) x *= mu[p];
        }
    }
    RetagReport r;
    r.side = s.token(h);
    Matrix rows(psi.begin(), psi.end());
    r.bijective = rank(rows) == static_cast<size_t>(n);
    r.multiplicative = true;
    for (int i = 0; i < n && r.multiplicative; ++i)
        for (int j = 0; j < n; ++j) {
            const Product& p = M.product(i, j);
            Elem lhs = A.mul(psi[i], psi[j]);
            Elem rhs = A.zeroElem();
            if (!p.zero) rhs = A.add(rhs, psi[p.index], p.coef);
            if (lhs != rhs) {
                r.multiplicative = false;
                break;
            }
        }
    return r;
}

// ---------------------------------------------------------------------------
// Jacobian presentation

struct JacobianReport {
    int arrows = 0;
    int derivativesMatching = 0;
    int relationsVanishing = 0;
    bool ok() const { return derivativesMatching == arrows && relationsVanishing == arrows; }
};

inline JacobianReport jacobianCheck(const Algebra& A) {
    const Surface& s = A.surface();
    if (!s.isClosed() || !s.isTriangulation())
        throw hypothesis("PreconditionFailed", "not a triangulation of a closed surface");
    const Presentation& P = A.presentation();
    JacobianReport r;
    for (int a : P.arrows()) {
        ++r.arrows;
        PathCombo d = P.cyclicDerivative(a);
        int v = P.sidesFrom(a)[1];
        if (P.hasTurnRelation(v) && d == P.turnRelation(v)) ++r.derivativesMatching;
        if (A.isZero(A.comboElement(d))) ++r.relationsVanishing;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Bimodule resolution of a closed triangulation

namespace detail {

// Rank over F_q for a large prime q; a lower bound for the rank over the rationals.
inline size_t rankModQ(const std::vector<std::map<int, Scalar>>& rows, size_t cols) {
    const std::int64_t q = 2147483647;
    auto red = [&](const Scalar& x) -> std::int64_t {
        if (x.prime() != 0) return x.residue();
        mpz_class num = x.rationalValue().get_num() % q, den = x.rationalValue().get_den() % q;
        std::int64_t n = num.get_si(), d = den.get_si();
        if (n < 0) n += q;
        if (d == 0) throw computation("UnsupportedCase", "denominator vanishes in the rank test");
        return static_cast<std::int64_t>(static_cast<__int128>(n) * Scalar(d, q).inverse().residue() % q);
    };
    std::vector<std::vector<std::int64_t>> m;
    for (const auto& row : rows) {
        std::vector<std::int64_t> r(cols, 0);
        for (const auto& [c, x] : row) r[c] = red(x);
        m.push_back(std::move(r));
    }
    auto inv = [&](std::int64_t a) { return Scalar(a, q).inverse().residue(); };
    size_t rk = 0;
    for (size_t c = 0; c < cols && rk < m.size(); ++c) {
        size_t piv = rk;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rk]);
        std::int64_t f = inv(m[rk][c]);
        for (size_t j = c; j < cols; ++j) m[rk][j] = static_cast<std::int64_t>(static_cast<__int128>(m[rk][j]) * f % q);
        for (size_t i = rk + 1; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            std::int64_t g = m[i][c];
            for (size_t j = c; j < cols; ++j) {
                if (m[rk][j] == 0) continue;
                m[i][j] = static_cast<std::int64_t>((m[i][j] - static_cast<__int128>(g) * m[rk][j]) % q);
                if (m[i][j] < 0) m[i][j] += q;
            }
        }
        ++rk;
    }
    return rk;
}

}  // namespace detail

struct ResolutionReport {
    int dimDelta = 0, dimP0 = 0, dimP1 = 0, dimP2 = 0;
    int rankAlpha = 0, rankBeta = 0, rankGamma = 0;
    bool alphaBetaZero = false, betaGammaZero = false;
    bool exact = false;
    bool gammaSelfDual = false;
    bool ok() const { return alphaBetaZero && betaGammaZero && exact && gammaSelfDual; }
};

class BimoduleComplex {
public:
    explicit BimoduleComplex(const Algebra& A) : A_(A), s_(A.surface()), P_(A.presentation()) {
        if (!s_.isClosed() || !s_.isTriangulation())
            throw hypothesis("PreconditionFailed", "not a triangulation of a closed surface");
        int n = A.dim();
        into_.assign(s_.numArcs, {});
        outof_.assign(s_.numArcs, {});
        for (int i = 0; i < n; ++i) {
            into_[A.target(i)].push_back(i);
            outof_[A.source(i)].push_back(i);
        }
        for (int u = 0; u < s_.numArcs; ++u) addBlock(p0_, u, u);
        arrows_ = P_.arrows();
        for (int a : arrows_) addBlock(p1_, Surface::edgeOf(a), Surface::edgeOf(s_.succ(a)));
        for (int a : arrows_) {
            // relation mirrored to the arrow a
            int v = P_.sidesFrom(a)[1];
            PathCombo rel = P_.turnRelation(v);
            relations_.push_back(rel);
            const QPath& head = rel.begin()->first;
            addBlock(p2_, head.vertex, endOf(head));
        }
        for (int a : arrows_) arrowElem_.push_back(A.pathElement(P_.segPath(a, 1), s_.S(1)));
    }

    ResolutionReport run() const {
        ResolutionReport r;
        r.dimDelta = A_.dim();
        r.dimP0 = p0_.size();
        r.dimP1 = p1_.size();
        r.dimP2 = p2_.size();
        std::vector<Vec> alpha, beta, gamma;
        for (int k = 0; k < r.dimP0; ++k) alpha.push_back(alphaOf(k));
        for (int k = 0; k < r.dimP1; ++k) beta.push_back(betaOf(k));
        for (int k = 0; k < r.dimP2; ++k) gamma.push_back(gammaOf(k));
        r.alphaBetaZero = std::all_of(beta.begin(), beta.end(), [&](const Vec& v) { return apply(alpha, v).empty(); });
        r.betaGammaZero = std::all_of(gamma.begin(), gamma.end(), [&](const Vec& v) { return apply(beta, v).empty(); });
        r.rankAlpha = static_cast<int>(detail::rankModQ(alpha, r.dimDelta));
        r.rankBeta = static_cast<int>(detail::rankModQ(beta, r.dimP0));
        r.rankGamma = static_cast<int>(detail::rankModQ(gamma, r.dimP1));
        // ranks mod q bound the rational ranks from below; the zero composites bound them from above
        r.exact = r.alphaBetaZero && r.betaGammaZero && r.rankAlpha == r.dimDelta &&
                  r.rankBeta == r.dimP0 - r.dimDelta && r.rankGamma == r.dimP1 - r.rankBeta &&
                  r.dimP2 - r.rankGamma == r.dimP0 - r.dimDelta;
        r.gammaSelfDual = selfDual(gamma);
        return r;
    }

private:
    using Vec = std::map<int, Scalar>;
    struct Block {
        std::vector<std::tuple<int, int, int>> cells;  // (component, left, right)
        std::map<std::tuple<int, int, int>, int> index;
        int components = 0;
        int size() const { return static_cast<int>(cells.size()); }
    };

    const Algebra& A_;
    const Surface& s_;
    const Presentation& P_;
    std::vector<std::vector<int>> into_, outof_;
    Block p0_, p1_, p2_;
    std::vector<int> arrows_;
    std::vector<PathCombo> relations_;
    std::vector<Elem> arrowElem_;

    int endOf(const QPath& p) const {
        return p.arrows.empty() ? p.vertex : Surface::edgeOf(s_.succ(p.arrows.back()));
    }
    void addBlock(Block& b, int left, int right) {
        int comp = b.components++;
        for (int x : into_[left])
            for (int y : outof_[right]) {
                b.index[{comp, x, y}] = b.size();
                b.cells.push_back({comp, x, y});
            }
    }

    static void addEntry(Vec& v, int c, const Scalar& x) {
        if (x.isZero()) return;
        auto [it, fresh] = v.emplace(c, x);
        if (!fresh) {
            it->second += x;
            if (it->second.isZero()) v.erase(it);
        }
    }
    // x (tensor) y in component comp of block b, x and y algebra elements
    void addTensor(Vec& v, const Block& b, int comp, const Elem& x, const Elem& y, const Scalar& c) const {
        for (int i = 0; i < A_.dim(); ++i) {
            if (x[i].isZero()) continue;
            for (int j = 0; j < A_.dim(); ++j) {
                if (y[j].isZero()) continue;
                auto it = b.index.find({comp, i, j});
                if (it == b.index.end()) throw computation("UnsupportedCase", "tensor outside its component");
                addEntry(v, it->second, c * x[i] * y[j]);
            }
        }
    }
    Vec apply(const std::vector<Vec>& map, const Vec& v) const {
        Vec out;
        for (const auto& [k, x] : v)
            for (const auto& [c, y] : map[k]) addEntry(out, c, x * y);
        return out;
    }

    Vec alphaOf(int k) const {
        auto [comp, x, y] = p0_.cells[k];
        Vec v;
        const Product& p = A_.product(x, y);
        if (!p.zero) addEntry(v, p.index, p.coef);
        return v;
    }
    Vec betaOf(int k) const {
        auto [comp, x, y] = p1_.cells[k];
        int a = arrows_[comp];
        Elem ex = A_.unit(x), ey = A_.unit(y);
        Vec v;
        addTensor(v, p0_, Surface::edgeOf(a), ex, A_.mul(arrowElem_[comp], ey), s_.S(1));
        addTensor(v, p0_, Surface::edgeOf(s_.succ(a)), A_.mul(ex, arrowElem_[comp]), ey, s_.S(-1));
        return v;
    }
    Vec gammaOf(int k) const {
        auto [comp, x, y] = p2_.cells[k];
        Vec v;
        for (const auto& [path, c] : relations_[comp]) {
            int n = static_cast<int>(path.arrows.size());
            for (int i = 0; i < n; ++i) {
                Elem left = A_.unit(x);
                for (int j = 0; j < i; ++j) left = A_.mul(left, arrowOf(path.arrows[j]));
                Elem right = A_.unit(y);
                for (int j = n - 1; j > i; --j) right = A_.mul(arrowOf(path.arrows[j]), right);
                int slot = static_cast<int>(std::find(arrows_.begin(), arrows_.end(), path.arrows[i]) - arrows_.begin());
                addTensor(v, p1_, slot, left, right, c);
            }
        }
        return v;
    }
    const Elem& arrowOf(int a) const {
        return arrowElem_[std::find(arrows_.begin(), arrows_.end(), a) - arrows_.begin()];
    }

    // <x (x) y, x' (x) y'> = E(y x') E(y' x) between the relation block and the arrow block
    bool selfDual(const std::vector<Vec>& gamma) const {
        Elem t = A_.traceValues();
        auto tr = [&](int i, int j) {
            const Product& p = A_.product(i, j);
            return p.zero ? s_.S(0) : t[p.index] * p.coef;
        };
        int n2 = p2_.size();
        auto form = [&](int xi, int eta) {
            auto [ce, x, y] = p2_.cells[eta];
            Scalar r = s_.S(0);
            for (const auto& [k, c] : gamma[xi]) {
                auto [cg, x2, y2] = p1_.cells[k];
                if (cg != ce) continue;
                r += c * tr(y, x2) * tr(y2, x);
            }
            return r;
        };
        for (int i = 0; i < n2; ++i)
            for (int j = 0; j < i; ++j)
                if (form(i, j) != form(j, i)) return false;
        return true;
    }
};

inline ResolutionReport verifyBimoduleResolution(const Algebra& A) { return BimoduleComplex(A).run(); }

// ---------------------------------------------------------------------------
// Weights for tameness

struct TameWeights {
    std::map<int, Scalar> p;  // arrow (source half-edge) -> weight
    Scalar kappa;
};

// Triangle with a degree-one tip of multiplicity one inside.
inline bool isSpecialSelfFolded(const Surface& s, const Face& f) {
    for (int x : f.sides) {
        if (std::find(f.sides.begin(), f.sides.end(), Surface::opp(x)) == f.sides.end()) continue;
        int q = s.end(x);
        if (s.rotSize(q) == 1 && s.m(q) == 1) return true;
        q = s.start(x);
        if (s.rotSize(q) == 1 && s.m(q) == 1) return true;
    }
    return false;
}

inline Scalar triangleWeight(const Face& f, const std::map<int, Scalar>& p) {
    Scalar r = p.begin()->second.zero();
    for (int x : f.sides) r += p.at(x);
    return r;
}

// Per point the weighted full turn equals kappa; triangles are strictly lighter,
// special self-folded ones strictly heavier.
inline bool weightsValid(const Surface& s, const TameWeights& w) {
    for (const auto& [a, x] : w.p)
        if (!(s.S(0) < x)) return false;
    for (int q = 0; q < s.numPoints(); ++q) {
        if (s.rotation[q].empty()) continue;
        Scalar turn = s.S(0);
        for (int h : s.rotation[q]) turn += s.S(s.m(q)) * w.p.at(h);
        if (turn != w.kappa) return false;
    }
    for (const auto& f : s.faces()) {
        Scalar k = triangleWeight(f, w.p);
        if (isSpecialSelfFolded(s, f) ? !(w.kappa < k) : !(k < w.kappa)) return false;
    }
    return true;
}

inline TameWeights tameWeights(const Surface& s) {
    if (!s.isClosed() || !s.isTriangulation())
        throw hypothesis("NotATriangulation", "weights need a triangulation of a closed surface");
    TameWeights w;
    w.kappa = s.S(1);
    long l = 1;
    for (int q = 0; q < s.numPoints(); ++q) {
        int md = s.m(q) * s.rotSize(q);
        if (md > 0) l = std::lcm(l, static_cast<long>(md));
        for (int h : s.rotation[q]) w.p[h] = s.S(1) / s.S(md);
    }
    Scalar eps = s.S(1) / s.S(4 * l);
    const auto& faces = s.faces();
    auto special = [&](int f) { return isSpecialSelfFolded(s, faces[f]); };
    auto slack = [&](int f) { return w.kappa - triangleWeight(faces[f], w.p); };
    for (size_t round = 0; round <= faces.size(); ++round) {
        int bad = -1;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (!special(f) && !(s.S(0) < slack(f))) {
                bad = f;
                break;
            }
        if (bad < 0) break;
        bool moved = false;
        for (int a : faces[bad].sides) {
            if (!(eps < w.p[a])) continue;
            int q = s.start(a);
            for (int b : s.rotation[q]) {
                int g = s.faceOf(b);
                if (b == a || g == bad) continue;
                if (!special(g) && !(eps < slack(g))) continue;
                w.p[a] -= eps;
                w.p[b] += eps;
                moved = true;
                break;
            }
            if (moved) break;
        }
        if (!moved) throw hypothesis("ExceptionalTriangulation", "no perturbation makes every triangle strict");
    }
    if (!weightsValid(s, w))
        throw hypothesis("ExceptionalTriangulation", "no perturbation makes every triangle strict");
    return w;
}

}  // namespace surfalg
