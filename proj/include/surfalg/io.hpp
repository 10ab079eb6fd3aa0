#pragma once

#include "surface.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace surfalg {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline void onlyKeys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw parseError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw parseError("unknown field '" + it.key() + "' in " + where);
    }
}

template <class T>
T need(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw parseError("missing field '" + std::string(key) + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw parseError("bad field '" + std::string(key) + "' in " + where + ": " + e.what());
    }
}

inline Scalar parseScalar(const nlohmann::json& v, std::int64_t p) {
    try {
        if (v.is_number_integer()) return Scalar::fromString(std::to_string(v.get<long long>()), p);
        if (v.is_string()) return Scalar::fromString(v.get<std::string>(), p);
    } catch (const std::exception& e) {
        throw parseError(std::string("bad coefficient: ") + e.what());
    }
    throw parseError("coefficient must be an integer or a \"num/den\" string");
}

}  // namespace detail

inline Surface surfaceFromJson(const nlohmann::json& doc) {
    using detail::need;
    detail::onlyKeys(doc, {"version", "ring", "points", "boundaries", "arcs", "rotations", "faces", "declared"},
                     "document");
    if (need<int>(doc, "version", "document") != 1) throw parseError("unsupported version");
    Surface s;
    const auto& ring = doc.at("ring");
    detail::onlyKeys(ring, {"kind", "p"}, "ring");
    auto kind = need<std::string>(ring, "kind", "ring");
    if (kind == "Fp") {
        s.prime = need<std::int64_t>(ring, "p", "ring");
        if (!isPrime(s.prime)) throw parseError("ring modulus is not prime");
    } else if (kind != "Q") {
        throw parseError("ring kind must be Q or Fp");
    }
    std::map<std::string, std::string> boundaryOf;
    for (const auto& p : need<nlohmann::json>(doc, "points", "document")) {
        detail::onlyKeys(p, {"id", "m", "lambda", "boundary"}, "point");
        auto id = need<std::string>(p, "id", "point");
        if (s.pointIndex(id) >= 0) throw parseError("duplicate point id " + id);
        if (!p.contains("lambda")) throw parseError("missing lambda at " + id);
        s.addPoint(id, need<int>(p, "m", "point " + id), detail::parseScalar(p.at("lambda"), s.prime));
        if (p.contains("boundary") && !p.at("boundary").is_null())
            boundaryOf[id] = need<std::string>(p, "boundary", "point " + id);
    }
    auto pointId = [&](const std::string& id) {
        int i = s.pointIndex(id);
        if (i < 0) throw parseError("unknown point " + id);
        return i;
    };
    std::set<std::string> names;
    for (const auto& a : need<nlohmann::json>(doc, "arcs", "document")) {
        detail::onlyKeys(a, {"id", "from", "to"}, "arc");
        auto id = need<std::string>(a, "id", "arc");
        if (id.empty() || id.rfind("bnd:", 0) == 0 || !names.insert(id).second)
            throw parseError("bad or duplicate arc id " + id);
        s.addArc(id, pointId(need<std::string>(a, "from", "arc " + id)), pointId(need<std::string>(a, "to", "arc " + id)));
    }
    std::set<int> onBoundary;
    for (const auto& b : need<nlohmann::json>(doc, "boundaries", "document")) {
        detail::onlyKeys(b, {"id", "points"}, "boundary");
        auto id = need<std::string>(b, "id", "boundary");
        std::vector<int> pts;
        for (const auto& pid : need<std::vector<std::string>>(b, "points", "boundary " + id)) {
            int q = pointId(pid);
            if (!onBoundary.insert(q).second) throw parseError("point on two boundaries: " + pid);
            if (!boundaryOf.count(pid) || boundaryOf[pid] != id)
                throw parseError("point " + pid + " does not declare boundary " + id);
            pts.push_back(q);
        }
        if (pts.empty()) throw parseError("boundary without marked points: " + id);
        s.addBoundary(id, pts);
    }
    for (const auto& [pid, bid] : boundaryOf)
        if (!onBoundary.count(pointId(pid))) throw parseError("point " + pid + " names a missing boundary " + bid);
    const auto& rots = need<nlohmann::json>(doc, "rotations", "document");
    if (!rots.is_object()) throw parseError("rotations must be an object");
    for (auto it = rots.begin(); it != rots.end(); ++it) {
        int q = pointId(it.key());
        for (const auto& t : it.value().get<std::vector<std::string>>()) s.rotation[q].push_back(s.parseToken(t, q));
    }
    for (const auto& f : need<nlohmann::json>(doc, "faces", "document")) {
        detail::onlyKeys(f, {"anchor", "punctures", "holes", "genus"}, "face");
        int anchor = s.parseToken(need<std::string>(f, "anchor", "face"), -1);
        if (s.contentByAnchor.count(anchor)) throw parseError("duplicate face anchor");
        FaceContent c;
        if (f.contains("punctures"))
            for (const auto& pid : f.at("punctures").get<std::vector<std::string>>()) c.punctures.push_back(pointId(pid));
        std::sort(c.punctures.begin(), c.punctures.end());
        c.holes = f.value("holes", 0);
        c.genus = f.value("genus", 0);
        s.contentByAnchor[anchor] = c;
    }
    const auto& decl = need<nlohmann::json>(doc, "declared", "document");
    detail::onlyKeys(decl, {"genus", "boundaryCount"}, "declared");
    s.declaredGenus = need<int>(decl, "genus", "declared");
    s.declaredBoundaryCount = need<int>(decl, "boundaryCount", "declared");
    s.rebuild();
    s.canonicalizeAnchors();
    return s;
}

inline ordered_json scalarJson(const Scalar& x) {
    if (x.prime() != 0) return ordered_json(x.residue());
    return ordered_json(x.str());
}

inline ordered_json surfaceToJson(const Surface& s) {
    ordered_json doc;
    doc["version"] = 1;
    if (s.prime == 0) doc["ring"] = {{"kind", "Q"}};
    else doc["ring"] = {{"kind", "Fp"}, {"p", s.prime}};
    ordered_json pts = ordered_json::array();
    for (const auto& p : s.points) {
        ordered_json j;
        j["id"] = p.id;
        j["m"] = p.m;
        j["lambda"] = scalarJson(p.lambda);
        j["boundary"] = p.boundary < 0 ? ordered_json(nullptr) : ordered_json(s.boundaries[p.boundary].id);
        pts.push_back(j);
    }
    doc["points"] = pts;
    ordered_json bs = ordered_json::array();
    for (const auto& b : s.boundaries) {
        ordered_json ids = ordered_json::array();
        for (int q : b.points) ids.push_back(s.points[q].id);
        bs.push_back({{"id", b.id}, {"points", ids}});
    }
    doc["boundaries"] = bs;
    ordered_json arcs = ordered_json::array();
    for (int e = 0; e < s.numArcs; ++e)
        arcs.push_back({{"id", s.edges[e].id}, {"from", s.points[s.edges[e].from].id}, {"to", s.points[s.edges[e].to].id}});
    doc["arcs"] = arcs;
    std::map<std::string, std::vector<std::string>> rot;
    for (int q = 0; q < s.numPoints(); ++q) {
        if (s.rotation[q].empty()) continue;
        std::vector<std::string> toks;
        for (int h : s.rotation[q]) toks.push_back(s.token(h));
        std::rotate(toks.begin(), std::min_element(toks.begin(), toks.end()), toks.end());
        rot[s.points[q].id] = toks;
    }
    ordered_json rj = ordered_json::object();
    for (const auto& [k, v] : rot) rj[k] = v;
    doc["rotations"] = rj;
    ordered_json faces = ordered_json::array();
    for (const auto& f : s.faces()) {
        if (f.content.empty()) continue;
        if (f.content.linked) throw computation("UnsupportedCase", "face bounded by several cycles cannot be serialized");
        std::vector<std::string> ids;
        for (int q : f.content.punctures) ids.push_back(s.points[q].id);
        std::sort(ids.begin(), ids.end());
        faces.push_back({{"anchor", s.token(f.sides[0])}, {"punctures", ids}, {"holes", f.content.holes},
                         {"genus", f.content.genus}});
    }
    doc["faces"] = faces;
    doc["declared"] = {{"genus", s.declaredGenus}, {"boundaryCount", s.declaredBoundaryCount}};
    return doc;
}

inline Surface loadSurface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parseError("cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parseError(std::string("invalid JSON: ") + e.what());
    }
    return surfaceFromJson(doc);
}

inline Surface parseSurface(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parseError(std::string("invalid JSON: ") + e.what());
    }
    return surfaceFromJson(doc);
}

// Ribbon graph document: vertices with m and lambda, edges between vertices, and
// for each vertex the counter-clockwise list of edge ends ("e+" is the end at
// the edge's "from" vertex, "e-" the end at its "to" vertex).
inline RibbonGraph ribbonFromJson(const nlohmann::json& doc, std::int64_t& prime) {
    using detail::need;
    detail::onlyKeys(doc, {"version", "ring", "vertices", "edges", "cyclic"}, "ribbon document");
    if (need<int>(doc, "version", "ribbon document") != 1) throw parseError("unsupported version");
    const auto& ring = doc.at("ring");
    detail::onlyKeys(ring, {"kind", "p"}, "ring");
    auto kind = need<std::string>(ring, "kind", "ring");
    prime = 0;
    if (kind == "Fp") {
        prime = need<std::int64_t>(ring, "p", "ring");
        if (!isPrime(prime)) throw parseError("ring modulus is not prime");
    } else if (kind != "Q") {
        throw parseError("ring kind must be Q or Fp");
    }
    RibbonGraph g;
    std::map<std::string, int> vid, eid;
    for (const auto& v : need<nlohmann::json>(doc, "vertices", "ribbon document")) {
        detail::onlyKeys(v, {"id", "m", "lambda"}, "vertex");
        auto id = need<std::string>(v, "id", "vertex");
        if (!vid.emplace(id, static_cast<int>(g.vertices.size())).second) throw parseError("duplicate vertex " + id);
        if (!v.contains("lambda")) throw parseError("missing lambda at " + id);
        int m = need<int>(v, "m", "vertex " + id);
        if (m < 1) throw parseError("multiplicity must be positive at " + id);
        g.vertices.push_back({id, m, detail::parseScalar(v.at("lambda"), prime)});
    }
    auto vertex = [&](const std::string& id) {
        auto it = vid.find(id);
        if (it == vid.end()) throw parseError("unknown vertex " + id);
        return it->second;
    };
    for (const auto& e : need<nlohmann::json>(doc, "edges", "ribbon document")) {
        detail::onlyKeys(e, {"id", "from", "to"}, "edge");
        auto id = need<std::string>(e, "id", "edge");
        if (id.empty() || id.rfind("bnd:", 0) == 0 || !eid.emplace(id, static_cast<int>(g.edges.size())).second)
            throw parseError("bad or duplicate edge id " + id);
        g.edges.push_back({id, vertex(need<std::string>(e, "from", "edge " + id)),
                           vertex(need<std::string>(e, "to", "edge " + id))});
    }
    g.cyclic.assign(g.vertices.size(), {});
    const auto& cyc = need<nlohmann::json>(doc, "cyclic", "ribbon document");
    if (!cyc.is_object()) throw parseError("cyclic must be an object");
    std::set<std::pair<int, bool>> seen;
    for (auto it = cyc.begin(); it != cyc.end(); ++it) {
        int v = vertex(it.key());
        for (auto t : it.value().get<std::vector<std::string>>()) {
            if (t.empty() || (t.back() != '+' && t.back() != '-')) throw parseError("bad end token: " + t);
            bool first = t.back() == '+';
            t.pop_back();
            auto e = eid.find(t);
            if (e == eid.end()) throw parseError("unknown edge in token: " + t);
            const auto& rec = g.edges[e->second];
            if ((first ? rec.a : rec.b) != v) throw parseError("edge end " + t + " is not at vertex " + it.key());
            if (!seen.emplace(e->second, first).second) throw parseError("edge end listed twice: " + t);
            g.cyclic[v].push_back({e->second, first});
        }
    }
    if (seen.size() != 2 * g.edges.size()) throw parseError("every edge end must appear in a cyclic order");
    return g;
}

inline std::string dumpSurface(const Surface& s) { return surfaceToJson(s).dump(2) + "\n"; }

}  // namespace surfalg
