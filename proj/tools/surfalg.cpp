#include "surfalg/algebra.hpp"
#include "surfalg/invariants.hpp"
#include "surfalg/io.hpp"
#include "surfalg/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>

using namespace surfalg;

namespace {

constexpr int kVerifyFailed = 1;

// Either collects text lines or fills a JSON object; printed once at the end.
struct Out {
    bool json = false;
    ordered_json doc = ordered_json::object();
    std::vector<std::string> lines;

    void line(const std::string& s) { lines.push_back(s); }
    void flush() const {
        if (json) std::cout << doc.dump(2) << "\n";
        else
            for (const auto& l : lines) std::cout << l << "\n";
    }
};

std::string yesNo(bool b) { return b ? "yes" : "no"; }

Surface loadValid(const std::string& path) {
    Surface s = loadSurface(path);
    auto errs = s.validate();
    if (!errs.empty()) throw mapInconsistent(errs.front());
    return s;
}

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw parseError("cannot write " + path);
    out << text;
}

std::string arcName(const Surface& s, int e) { return s.edges[e].id; }

std::string joined(const std::vector<std::string>& v, const std::string& sep = " ") {
    std::string r;
    for (size_t i = 0; i < v.size(); ++i) r += (i ? sep : "") + v[i];
    return r;
}

// ----- validate -----
int cmdValidate(const std::string& file, Out& out) {
    Surface s = loadSurface(file);
    auto errs = s.validate();
    out.doc["valid"] = errs.empty();
    out.doc["errors"] = errs;
    if (errs.empty()) out.line("ok");
    for (const auto& e : errs) out.line("error: " + e);
    out.flush();
    return errs.empty() ? 0 : static_cast<int>(ErrorKind::Validation);
}

// ----- describe -----
int cmdDescribe(const std::string& file, Out& out) {
    Surface s = loadValid(file);
    out.doc["genus"] = s.declaredGenus;
    out.doc["boundaryCount"] = s.declaredBoundaryCount;
    out.doc["ring"] = s.prime ? "F" + std::to_string(s.prime) : "Q";
    out.doc["closed"] = s.isClosed();
    out.doc["triangulation"] = s.isTriangulation();
    out.doc["sparse"] = s.isSparse();
    out.line("surface genus " + std::to_string(s.declaredGenus) + " boundaries " +
             std::to_string(s.declaredBoundaryCount) + " ring " + out.doc["ring"].get<std::string>());
    out.line("closed " + yesNo(s.isClosed()) + " triangulation " + yesNo(s.isTriangulation()) + " sparse " +
             yesNo(s.isSparse()));

    ordered_json pts = ordered_json::array();
    for (int p = 0; p < s.numPoints(); ++p) {
        std::vector<std::string> rot;
        for (int h : s.rotation[p]) rot.push_back(s.token(h));
        const auto& pt = s.points[p];
        std::string where = pt.boundary >= 0 ? "boundary " + s.boundaries[pt.boundary].id : "puncture";
        pts.push_back({{"id", pt.id},
                       {"m", pt.m},
                       {"lambda", pt.lambda.str()},
                       {"where", where},
                       {"degree", s.degree(p)},
                       {"rotation", rot}});
        out.line("point " + pt.id + " m " + std::to_string(pt.m) + " lambda " + pt.lambda.str() + " " + where +
                 " degree " + std::to_string(s.degree(p)) + " rotation [" + joined(rot) + "]");
    }
    out.doc["points"] = pts;

    ordered_json arcs = ordered_json::array();
    for (int e = 0; e < s.numArcs; ++e) {
        const auto& r = s.edges[e];
        arcs.push_back({{"id", r.id}, {"from", s.points[r.from].id}, {"to", s.points[r.to].id}});
        out.line("arc " + r.id + " " + s.points[r.from].id + " -> " + s.points[r.to].id);
    }
    out.doc["arcs"] = arcs;

    ordered_json faces = ordered_json::array();
    for (const auto& f : s.faces()) {
        std::vector<std::string> sides, punct;
        for (int h : f.sides) sides.push_back(s.token(h));
        for (int q : f.content.punctures) punct.push_back(s.points[q].id);
        faces.push_back({{"sides", sides},
                         {"punctures", punct},
                         {"holes", f.content.holes},
                         {"genus", f.content.genus}});
        std::string txt = "face [" + joined(sides) + "]";
        if (!punct.empty()) txt += " punctures " + joined(punct, ",");
        if (f.content.holes) txt += " holes " + std::to_string(f.content.holes);
        if (f.content.genus) txt += " genus " + std::to_string(f.content.genus);
        out.line(txt);
    }
    out.doc["faces"] = faces;

    ordered_json comps = ordered_json::array();
    for (const auto& c : s.components()) {
        std::vector<std::string> ids;
        for (int e : c)
            if (s.isArc(e)) ids.push_back(arcName(s, e));
        if (ids.empty()) continue;
        std::string label = labelName(s.classifyComponent(c));
        comps.push_back({{"arcs", ids}, {"label", label}});
        out.line("component {" + joined(ids, ",") + "} " + label);
    }
    out.doc["components"] = comps;

    std::vector<std::string> special;
    for (const auto& mg : s.specialMonogons()) special.push_back(s.token(mg.side));
    out.doc["specialMonogons"] = special;
    if (!special.empty()) out.line("special monogons " + joined(special));
    out.flush();
    return 0;
}

// ----- present -----
int cmdPresent(const std::string& file, const std::string& style, Out& out) {
    Surface s = loadValid(file);
    Presentation P(s);
    ordered_json arrows = ordered_json::array(), rels = ordered_json::array();
    std::vector<std::string> vertices;
    for (int e = 0; e < s.numArcs; ++e) vertices.push_back(arcName(s, e));
    out.line("vertices " + joined(vertices));
    for (int a : P.arrows()) {
        arrows.push_back(P.arrowName(a));
        out.line("arrow " + P.arrowName(a) + " : " + arcName(s, Surface::edgeOf(a)) + " -> " +
                 arcName(s, Surface::edgeOf(s.succ(a))));
    }
    auto rel = [&](const std::string& kind, const PathCombo& c) {
        if (c.empty()) return;
        rels.push_back({{"kind", kind}, {"relation", P.comboText(c)}});
        out.line(kind + " " + P.comboText(c) + " = 0");
    };
    if (style == "jacobian") {
        if (!s.isClosed() || !s.isTriangulation())
            throw hypothesis("PreconditionFailed", "the Jacobian style needs a triangulation of a closed surface");
        ordered_json pot = ordered_json::array();
        for (const auto& [c, cyc] : P.potential()) {
            QPath p;
            p.vertex = Surface::edgeOf(cyc.front());
            p.arrows = cyc;
            std::string t = "(" + c.str() + ")" + P.pathText(p);
            pot.push_back(t);
            out.line("potential " + t);
        }
        out.doc["potential"] = pot;
        for (int a : P.arrows()) rel("derivative " + P.arrowName(a), P.cyclicDerivative(a));
    } else {
        bool second = style == "alt2";
        for (int v = 0; v < 2 * s.numArcs; ++v)
            if (P.hasTurnRelation(v)) rel("turn " + s.token(v), P.turnRelation(v, second));
        for (int e = 0; e < s.numArcs; ++e) rel("full-turn " + arcName(s, e), P.centralRelation(e));
    }
    out.doc["style"] = style;
    out.doc["vertices"] = vertices;
    out.doc["arrows"] = arrows;
    out.doc["relations"] = rels;
    out.flush();
    return 0;
}

// ----- basis / table -----
int cmdBasis(const std::string& file, Out& out) {
    Surface s = loadValid(file);
    Algebra A(s);
    out.line("rank " + std::to_string(A.dim()));
    ordered_json b = ordered_json::array();
    for (int i = 0; i < A.dim(); ++i) {
        b.push_back({{"label", A.label(i)},
                     {"source", arcName(s, A.source(i))},
                     {"target", arcName(s, A.target(i))}});
        out.line(A.label(i));
    }
    out.doc["rank"] = A.dim();
    out.doc["basis"] = b;
    out.flush();
    return 0;
}

int cmdTable(const std::string& file, Out& out) {
    Surface s = loadValid(file);
    Algebra A(s);
    ordered_json t = ordered_json::array();
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            const Product& p = A.product(i, j);
            if (p.zero) continue;
            t.push_back({{"left", A.label(i)},
                         {"right", A.label(j)},
                         {"coefficient", p.coef.str()},
                         {"result", A.label(p.index)}});
            std::string c = p.coef.isOne() ? "" : "(" + p.coef.str() + ") ";
            out.line(A.label(i) + " * " + A.label(j) + " = " + c + A.label(p.index));
        }
    out.doc["rank"] = A.dim();
    out.doc["products"] = t;
    out.flush();
    return 0;
}

// ----- invariants -----
ordered_json tupleJson(const InvariantTuple& t) {
    return {{"numSimples", t.numSimples},
            {"totalRank", t.totalRank},
            {"centerDim", t.centerDim},
            {"cartanDetAbs", t.cartanDetAbs},
            {"symmetric", t.symmetric}};
}

int cmdInvariants(const std::string& file, Out& out) {
    Surface s = loadValid(file);
    Algebra A(s);
    InvariantTuple t = derivedInvariants(A);
    out.doc = tupleJson(t);
    out.line("simples " + std::to_string(t.numSimples));
    out.line("rank " + std::to_string(t.totalRank));
    out.line("centre " + std::to_string(t.centerDim));
    out.line("|det cartan| " + t.cartanDetAbs);
    out.line("symmetric " + yesNo(t.symmetric));
    out.flush();
    return 0;
}

// ----- flip -----
int cmdFlip(const std::string& file, const std::string& arc, const std::string& write, Out& out) {
    Surface s = loadValid(file);
    int e = s.arcIndex(arc);
    if (e < 0 || !s.isArc(e)) throw parseError("unknown arc " + arc);
    Surface f = performFlip(s, e);
    auto errs = f.validate();
    if (!errs.empty()) throw computation("UnsupportedCase", "flipped surface is inconsistent: " + errs.front());
    std::string text = dumpSurface(f);
    out.doc["arc"] = arc;
    ordered_json changed = ordered_json::array();
    for (int p = 0; p < s.numPoints(); ++p)
        if (s.lambda(p) != f.lambda(p)) {
            changed.push_back({{"point", s.points[p].id}, {"from", s.lambda(p).str()}, {"to", f.lambda(p).str()}});
            out.line("lambda " + s.points[p].id + " " + s.lambda(p).str() + " -> " + f.lambda(p).str());
        }
    out.doc["lambdaChanges"] = changed;
    if (!write.empty()) {
        writeFile(write, text);
        out.doc["written"] = write;
        out.line("wrote " + write);
    } else {
        out.doc["surface"] = surfaceToJson(f);
        out.lines.insert(out.lines.begin(), text.substr(0, text.size() - 1));
    }
    out.flush();
    return 0;
}

// ----- verify -----
struct CheckResult {
    std::string suite, name, status, detail;
};

class Verifier {
public:
    Verifier(const Surface& s, const Algebra& A) : s_(s), A_(A) {}

    void run(const std::string& suite) {
        bool all = suite == "all";
        if (all || suite == "core") core();
        if (all || suite == "symmetry") symmetry();
        if (all || suite == "brauer") brauer();
        if (all || suite == "flip") flip();
        if (all || suite == "resolution") resolution();
        if (all || suite == "weights") weights();
    }
    const std::vector<CheckResult>& results() const { return results_; }
    bool failed() const {
        for (const auto& r : results_)
            if (r.status == "FAIL") return true;
        return false;
    }

private:
    const Surface& s_;
    const Algebra& A_;
    std::vector<CheckResult> results_;

    // body returns {passed, detail}; hypothesis errors skip, others fail
    void check(const std::string& suite, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
        CheckResult r{suite, name, "", ""};
        try {
            auto [ok, detail] = body();
            r.status = ok ? "PASS" : "FAIL";
            r.detail = detail;
        } catch (const Error& e) {
            r.status = e.kind() == ErrorKind::Hypothesis ? "SKIP" : "FAIL";
            r.detail = e.what();
        }
        results_.push_back(r);
    }

    void core() {
        check("core", "rank formula", [&] {
            return std::pair{A_.dim() == A_.rankFormula(),
                             std::to_string(A_.dim()) + " = " + std::to_string(A_.rankFormula())};
        });
        check("core", "associativity", [&] {
            auto f = A_.associativityFailure();
            if (!f) return std::pair{true, std::string()};
            auto [i, j, k] = *f;
            return std::pair{false, A_.label(i) + " " + A_.label(j) + " " + A_.label(k)};
        });
        check("core", "document round trip", [&] {
            return std::pair{parseSurface(dumpSurface(s_)).canonicalKey() == s_.canonicalKey(), std::string()};
        });
        check("core", "path oracle", [&] {
            auto r = bruteForceOracle(A_);
            return std::pair{r.basisIndependent && r.tableMatches,
                             "L " + std::to_string(r.L) + " dimension " + std::to_string(r.dimension) +
                                 (r.mismatch.empty() ? "" : " mismatch " + r.mismatch)};
        });
        for (int e = 0; e < s_.numArcs && s_.numArcs > 1; ++e) {
            std::vector<int> keep;
            for (int k = 0; k < s_.numArcs; ++k)
                if (k != e) keep.push_back(k);
            check("core", "restriction without " + arcName(s_, e), [&] {
                auto r = restrictionCheck(A_, keep);
                return std::pair{r.ok, r.mismatch};
            });
        }
    }

    void symmetry() {
        check("symmetry", "symmetric trace", [&] {
            for (int e = 0; e < s_.numArcs; ++e)
                if (s_.arcTouchesBoundary(e))
                    throw hypothesis("BoundaryArc", "arc " + arcName(s_, e) + " touches the boundary");
            return std::pair{A_.isSymmetricAlgebra(), std::string()};
        });
    }

    void brauer() {
        check("brauer", "Brauer graph algebra", [&] {
            auto r = brauerCompare(A_);
            std::string how = r.identityIdentification ? "structure constants" : "centre dimension";
            return std::pair{r.ok, how + (r.mismatch.empty() ? "" : " mismatch " + r.mismatch)};
        });
        check("brauer", "trivial extension", [&] {
            auto r = trivialExtensionCheck(A_);
            return std::pair{r.ok, r.mismatch};
        });
        for (const auto& mg : s_.specialMonogons())
            check("brauer", "retag at " + s_.token(mg.side), [&] {
                auto r = retagCheck(A_, mg.side);
                return std::pair{r.ok(), std::string()};
            });
    }

    void flip() {
        for (int e = 0; e < s_.numArcs; ++e)
            check("flip", "flip " + arcName(s_, e), [&] {
                if (s_.isCloseToBoundary(e))
                    throw hypothesis("CloseToBoundary", "arc " + arcName(s_, e) + " is close to the boundary");
                auto r = checkFlipInvariants(s_, e);
                std::string d = "rank " + std::to_string(r.before.totalRank) + " -> " +
                                std::to_string(r.after.totalRank);
                if (!r.invariantsAgree) d += " invariants differ";
                if (!r.roundTrip) d += " inverse flip differs";
                return std::pair{r.ok(), d};
            });
    }

    void resolution() {
        check("resolution", "Jacobian presentation", [&] {
            auto r = jacobianCheck(A_);
            return std::pair{r.ok(), std::to_string(r.derivativesMatching) + "/" + std::to_string(r.arrows)};
        });
        check("resolution", "bimodule resolution", [&] {
            if (!s_.isClosed() || !s_.isTriangulation())
                throw hypothesis("PreconditionFailed", "not a triangulation of a closed surface");
            auto r = verifyBimoduleResolution(A_);
            return std::pair{r.ok(), "ranks " + std::to_string(r.rankAlpha) + " " + std::to_string(r.rankBeta) +
                                         " " + std::to_string(r.rankGamma)};
        });
    }

    void weights() {
        check("weights", "tame weights", [&] {
            auto w = tameWeights(s_);
            return std::pair{weightsValid(s_, w), "kappa " + w.kappa.str()};
        });
    }
};

int cmdVerify(const std::string& file, const std::string& suite, Out& out) {
    Surface s = loadValid(file);
    Algebra A(s);
    Verifier v(s, A);
    v.run(suite);
    ordered_json checks = ordered_json::array();
    for (const auto& r : v.results()) {
        checks.push_back({{"suite", r.suite}, {"check", r.name}, {"status", r.status}, {"detail", r.detail}});
        out.line(r.status + " " + r.suite + ": " + r.name + (r.detail.empty() ? "" : " (" + r.detail + ")"));
    }
    out.doc["suite"] = suite;
    out.doc["checks"] = checks;
    out.doc["ok"] = !v.failed();
    out.flush();
    return v.failed() ? kVerifyFailed : 0;
}

// ----- oracle -----
int cmdOracle(const std::string& file, int L, Out& out) {
    Surface s = loadValid(file);
    Algebra A(s);
    auto r = bruteForceOracle(A, L);
    out.doc = {{"L", r.L},
               {"dimension", r.dimension},
               {"dimensionAtL2", r.dimensionAtL2},
               {"candidates", r.candidates},
               {"engineRank", A.dim()},
               {"basisIndependent", r.basisIndependent},
               {"tableMatches", r.tableMatches},
               {"mismatch", r.mismatch}};
    out.line("L " + std::to_string(r.L) + " candidates " + std::to_string(r.candidates));
    out.line("dimension " + std::to_string(r.dimension) + " at L, " + std::to_string(r.dimensionAtL2) + " at L+2");
    out.line("engine rank " + std::to_string(A.dim()));
    out.line("basis independent " + yesNo(r.basisIndependent));
    out.line("table matches " + yesNo(r.tableMatches) + (r.mismatch.empty() ? "" : " (" + r.mismatch + ")"));
    out.flush();
    return r.basisIndependent && r.tableMatches ? 0 : kVerifyFailed;
}

// ----- import-brauer -----
int cmdImportBrauer(const std::string& file, const std::string& write, Out& out) {
    std::ifstream in(file);
    if (!in) throw parseError("cannot open " + file);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parseError(std::string("invalid JSON: ") + e.what());
    }
    std::int64_t prime = 0;
    RibbonGraph g = ribbonFromJson(doc, prime);
    Surface s = ribbonGraphToSurface(g, prime);
    auto errs = s.validate();
    if (!errs.empty()) throw mapInconsistent(errs.front());
    std::string text = dumpSurface(s);
    if (!write.empty()) {
        writeFile(write, text);
        out.doc["written"] = write;
        out.line("wrote " + write);
    } else {
        out.doc = surfaceToJson(s);
        out.line(text.substr(0, text.size() - 1));
    }
    out.flush();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebras of partial triangulations of marked surfaces"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "Machine-readable output")->trigger_on_parse();

    std::string file, style = "alt0", arc, write, suite = "all";
    int L = 0;
    auto withFile = [&](CLI::App* c) {
        c->add_option("FILE", file, "Surface document")->required();
        c->add_flag("--json", json, "Machine-readable output");
        return c;
    };
    auto* validate = withFile(app.add_subcommand("validate", "Check a surface document"));
    auto* describe = withFile(app.add_subcommand("describe", "Faces, degrees and classification labels"));
    auto* present = withFile(app.add_subcommand("present", "Quiver and relations"));
    present->add_option("--style", style, "alt0, alt2 or jacobian")
        ->check(CLI::IsMember({"alt0", "alt2", "jacobian"}));
    auto* basis = withFile(app.add_subcommand("basis", "Explicit basis"));
    auto* table = withFile(app.add_subcommand("table", "Nonzero structure constants"));
    auto* invariants = withFile(app.add_subcommand("invariants", "Derived-equivalence invariants"));
    auto* flip = withFile(app.add_subcommand("flip", "Flip an arc with coefficient mutation"));
    flip->add_option("--arc", arc, "Arc to flip")->required();
    flip->add_option("--write", write, "Write the flipped document here");
    auto* verify = withFile(app.add_subcommand("verify", "Run a verification suite"));
    verify->add_option("--suite", suite, "core, symmetry, brauer, flip, resolution, weights or all")
        ->check(CLI::IsMember({"core", "symmetry", "brauer", "flip", "resolution", "weights", "all"}));
    auto* oracle = withFile(app.add_subcommand("oracle", "Compare with the truncated path algebra"));
    oracle->add_option("--L", L, "Truncation length");
    auto* importBrauer = withFile(app.add_subcommand("import-brauer", "Surface document of a ribbon graph"));
    importBrauer->add_option("--write", write, "Write the document here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Parse);
    }

    Out out;
    out.json = json;
    try {
        if (*validate) return cmdValidate(file, out);
        if (*describe) return cmdDescribe(file, out);
        if (*present) return cmdPresent(file, style, out);
        if (*basis) return cmdBasis(file, out);
        if (*table) return cmdTable(file, out);
        if (*invariants) return cmdInvariants(file, out);
        if (*flip) return cmdFlip(file, arc, write, out);
        if (*verify) return cmdVerify(file, suite, out);
        if (*oracle) return cmdOracle(file, L, out);
        if (*importBrauer) return cmdImportBrauer(file, write, out);
    } catch (const Error& e) {
        if (json) std::cout << ordered_json{{"error", e.name()}, {"detail", e.what()}}.dump(2) << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return e.exitCode();
    }
    return 0;
}
