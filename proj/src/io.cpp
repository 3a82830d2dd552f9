#include "asdim/io.hpp"

#include <fstream>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace io {

std::string write_ball(const MetricSpace& s) {
    std::ostringstream out;
    int n = s.size();
    out << "asdim-ball v1\n";
    out << "points " << n << "\n";
    for (int i = 0; i < n; ++i) out << s.label(i) << "\n";
    out << "matrix\n";
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (j) out << " ";
            out << s.dist(i, j).str();
        }
        out << "\n";
    }
    return out.str();
}

std::shared_ptr<DenseSpace> read_ball(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-ball v1")
        throw ParseError("ball file: bad header");
    if (!std::getline(in, line)) throw ParseError("ball file: truncated");
    auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "points")
        throw ParseError("ball file: expected points count");
    int n = std::stoi(toks[1]);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ParseError("ball file: missing labels");
        labels.push_back(trim(line));
    }
    if (!std::getline(in, line) || trim(line) != "matrix")
        throw ParseError("ball file: expected matrix section");
    std::vector<Rat> m;
    for (int i = 1; i < n; ++i) {
        if (!std::getline(in, line)) throw ParseError("ball file: matrix truncated");
        auto row = split_ws(line);
        if (int(row.size()) != i) throw ParseError("ball file: bad matrix row");
        for (auto& t : row) m.push_back(Rat::parse(t));
    }
    return std::make_shared<DenseSpace>(std::move(labels), std::move(m));
}

std::string write_certificate(const covers::ScaleDimCertificate& c) {
    std::ostringstream out;
    out << "asdim-cert v1\n";
    out << "kind scale-dim\n";
    out << "space-hash " << hex64(c.space_hash) << "\n";
    out << "d " << c.d.str() << "\n";
    out << "B " << c.B.str() << "\n";
    out << "n " << c.n << "\n";
    switch (c.verdict) {
        case covers::Verdict::Upper: out << "verdict upper\n"; break;
        case covers::Verdict::Refuted: out << "verdict refuted\n"; break;
        case covers::Verdict::Unknown: out << "verdict unknown\n"; break;
    }
    if (c.witness) {
        out << "families " << c.witness->families.size() << "\n";
        for (size_t f = 0; f < c.witness->families.size(); ++f)
            for (const auto& set : c.witness->families[f]) {
                out << "set " << f;
                for (int p : set) out << " " << p;
                out << "\n";
            }
    }
    if (!c.transcript.empty()) out << "transcript " << c.transcript << "\n";
    if (!c.note.empty()) out << "note " << c.note << "\n";
    out << "verifier v1\n";
    out << "content-hash " << hex64(c.content_hash()) << "\n";
    return out.str();
}

covers::ScaleDimCertificate read_certificate(const std::string& text,
                                             const covers::SpaceRef& space) {
    covers::ScaleDimCertificate c;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-cert v1")
        throw ParseError("certificate: bad header");
    bool have_witness = false;
    covers::ColoredFamilies cf;
    cf.space = space;
    while (std::getline(in, line)) {
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "kind") continue;
        if (toks[0] == "space-hash") {
            c.space_hash = std::stoull(toks[1], nullptr, 16);
        } else if (toks[0] == "d") {
            c.d = Rat::parse(toks[1]);
        } else if (toks[0] == "B") {
            c.B = Rat::parse(toks[1]);
        } else if (toks[0] == "n") {
            c.n = std::stoi(toks[1]);
        } else if (toks[0] == "verdict") {
            if (toks[1] == "upper") c.verdict = covers::Verdict::Upper;
            else if (toks[1] == "refuted") c.verdict = covers::Verdict::Refuted;
            else c.verdict = covers::Verdict::Unknown;
        } else if (toks[0] == "families") {
            cf.families.assign(std::stoul(toks[1]), {});
            have_witness = true;
        } else if (toks[0] == "set") {
            size_t f = std::stoul(toks[1]);
            if (f >= cf.families.size()) throw ParseError("certificate: bad family");
            covers::PointSet s;
            for (size_t i = 2; i < toks.size(); ++i) s.push_back(std::stoi(toks[i]));
            cf.families[f].push_back(std::move(s));
        } else if (toks[0] == "transcript") {
            c.transcript = trim(line.substr(line.find("transcript") + 10));
        } else if (toks[0] == "note") {
            c.note = trim(line.substr(line.find("note") + 4));
        }
    }
    if (have_witness) {
        cf.scale_d = c.d;
        cf.bound_B = c.B;
        c.witness = cf;
    }
    return c;
}

std::string write_complex(const simp::OrientedComplex& k) {
    std::ostringstream out;
    out << "asdim-complex v1\n";
    out << "vertices " << k.vertex_count() << "\n";
    for (int v = 0; v < k.vertex_count(); ++v) out << k.vertex_label(v) << "\n";
    out << "maximal\n";
    for (const auto& s : k.maximal_simplices()) {
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) out << " ";
            out << s[i];
        }
        out << "\n";
    }
    return out.str();
}

simp::ComplexRef read_complex(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-complex v1")
        throw ParseError("complex: bad header");
    if (!std::getline(in, line)) throw ParseError("complex: truncated");
    auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "vertices")
        throw ParseError("complex: expected vertex count");
    int n = std::stoi(toks[1]);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ParseError("complex: missing labels");
        labels.push_back(trim(line));
    }
    if (!std::getline(in, line) || trim(line) != "maximal")
        throw ParseError("complex: expected maximal section");
    auto k = std::make_shared<simp::OrientedComplex>(labels);
    while (std::getline(in, line)) {
        auto row = split_ws(line);
        if (row.empty()) continue;
        simp::Simplex s;
        for (auto& t : row) s.push_back(std::stoi(t));
        k->add_simplex(s);
    }
    return k;
}

std::string complex_dot(const simp::OrientedComplex& k) {
    std::ostringstream out;
    out << "graph complex {\n";
    for (int v = 0; v < k.vertex_count(); ++v)
        out << "  v" << v << " [label=\"" << k.vertex_label(v) << "\"];\n";
    for (const auto& s : k.simplices())
        if (s.size() == 2)
            out << "  v" << s[0] << " -- v" << s[1] << ";\n";
    out << "}\n";
    return out.str();
}

std::string tree_ball_dot(const gog::GraphOfGroups::TreeBall& tb) {
    std::ostringstream out;
    out << "graph bass_serre_ball {\n";
    for (size_t v = 0; v < tb.labels.size(); ++v) {
        std::string lbl = tb.labels[v].empty() ? "1" : tb.labels[v];
        out << "  v" << v << " [label=\"" << lbl << "\"];\n";
    }
    for (int v = 0; v < tb.tree.size(); ++v)
        if (tb.tree.parent[v] >= 0)
            out << "  v" << tb.tree.parent[v] << " -- v" << v << ";\n";
    out << "}\n";
    return out.str();
}

std::string cover_dot(const covers::Cover& c) {
    auto nv = simp::nerve(c);
    return complex_dot(*nv);
}

// ------------------------------------------------------------------ models

groups::CayleyBall ModelHandle::ball(i64 radius, i64 cap) const {
    switch (kind) {
        case Kind::Zm: return zm->ball(radius, cap);
        case Kind::Free: return free_model->ball(radius, cap);
        case Kind::Finite: return finite->ball(radius, cap);
        case Kind::Gog: {
            auto kb = graph->k_ball(radius, cap, false, true);
            groups::CayleyBall b;
            b.radius = radius;
            b.space = kb.space;
            return b;
        }
    }
    throw std::logic_error("bad model kind");
}

namespace {

groups::FiniteTableModel parse_finite_block(std::istream& in,
                                            const std::vector<std::string>& names) {
    int n = int(names.size());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "table")
        throw ParseError("finite group: expected table");
    std::vector<int> table(size_t(n) * n);
    std::map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx[names[i]] = i;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ParseError("finite group: table truncated");
        auto row = split_ws(line);
        if (int(row.size()) != n) throw ParseError("finite group: bad table row");
        for (int j = 0; j < n; ++j) {
            auto it = idx.find(row[j]);
            if (it == idx.end()) throw ParseError("finite group: unknown element " + row[j]);
            table[size_t(i) * n + j] = it->second;
        }
    }
    if (!std::getline(in, line)) throw ParseError("finite group: expected gens");
    auto toks = split_ws(line);
    if (toks.empty() || toks[0] != "gens")
        throw ParseError("finite group: expected gens line");
    std::vector<int> gens;
    for (size_t i = 1; i < toks.size(); ++i) gens.push_back(idx.at(toks[i]));
    // identity = the unique two-sided neutral element
    int id = -1;
    for (int e = 0; e < n; ++e) {
        bool neutral = true;
        for (int a = 0; a < n; ++a)
            if (table[size_t(e) * n + a] != a || table[size_t(a) * n + e] != a)
                neutral = false;
        if (neutral) id = e;
    }
    if (id < 0) throw ParseError("finite group: no identity");
    return groups::FiniteTableModel(names, table, id, gens);
}

} // namespace

std::shared_ptr<gog::GraphOfGroups> parse_gog(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-gog v1")
        throw ParseError("gog file: bad header");

    std::vector<std::string> vnames;
    std::map<std::string, int> vidx;
    std::string base;
    std::map<std::string, std::shared_ptr<groups::FiniteTableModel>> finite_groups;
    std::map<std::string, gog::VGroup> vgroup_of;
    struct EdgeSpec {
        std::string name, from, to, group_kind, group_ref;
        std::vector<std::string> phi_fwd, phi_rev;
        bool in_tree = false;
    };
    std::vector<EdgeSpec> especs;

    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks[0] == "vertices") {
            for (size_t i = 1; i < toks.size(); ++i) {
                vidx[toks[i]] = int(vnames.size());
                vnames.push_back(toks[i]);
            }
        } else if (toks[0] == "base") {
            base = toks[1];
        } else if (toks[0] == "finite-group") {
            std::vector<std::string> names(toks.begin() + 2, toks.end());
            finite_groups[toks[1]] =
                std::make_shared<groups::FiniteTableModel>(parse_finite_block(in, names));
        } else if (toks[0] == "vgroup") {
            const std::string& v = toks[1];
            const std::string& kind = toks[2];
            if (kind == "Z") vgroup_of[v] = gog::VGroup::z();
            else if (kind == "trivial") vgroup_of[v] = gog::VGroup::trivial();
            else if (kind == "Zm") vgroup_of[v] = gog::VGroup::zm(std::stoi(toks[3]));
            else if (kind == "finite") vgroup_of[v] = gog::VGroup::finite(finite_groups.at(toks[3]));
            else throw ParseError("gog: unknown vertex group kind " + kind);
        } else if (toks[0] == "edge") {
            EdgeSpec e;
            e.name = toks[1];
            e.from = toks[2];
            e.to = toks[3];
            e.group_kind = toks[4];
            if (toks.size() > 5) e.group_ref = toks[5];
            especs.push_back(e);
        } else if (toks[0] == "phi") {
            const std::string& ename = toks[1];
            bool rev = ename.size() > 1 && ename.back() == '-';
            std::string plain = rev ? ename.substr(0, ename.size() - 1) : ename;
            for (auto& e : especs)
                if (e.name == plain) {
                    auto& dst = rev ? e.phi_rev : e.phi_fwd;
                    dst.assign(toks.begin() + 2, toks.end());
                }
        } else if (toks[0] == "tree") {
            for (size_t i = 1; i < toks.size(); ++i)
                for (auto& e : especs)
                    if (e.name == toks[i]) e.in_tree = true;
        } else {
            throw ParseError("gog: unknown directive " + toks[0]);
        }
    }
    if (base.empty() || !vidx.count(base)) throw ParseError("gog: missing base vertex");

    std::vector<gog::VGroup> vgroups;
    for (const auto& n : vnames) {
        if (!vgroup_of.count(n)) throw ParseError("gog: vertex group missing for " + n);
        vgroups.push_back(vgroup_of[n]);
    }
    auto g = std::make_shared<gog::GraphOfGroups>(vnames, vgroups, vidx[base]);
    for (const auto& e : especs) {
        int from = vidx.at(e.from);
        int to = vidx.at(e.to);
        gog::VGroup eg;
        gog::Injection fwd = gog::Injection::trivial_into(vgroups[size_t(to)]);
        gog::Injection rev = gog::Injection::trivial_into(vgroups[size_t(from)]);
        if (e.group_kind == "trivial") {
            eg = gog::VGroup::trivial();
        } else if (e.group_kind == "Z") {
            eg = gog::VGroup::z();
            if (e.phi_fwd.empty() || e.phi_rev.empty())
                throw ParseError("gog: edge " + e.name + " needs phi images");
            fwd = gog::Injection::z_into(vgroups[size_t(to)],
                                         vgroups[size_t(to)].parse(e.phi_fwd[0]));
            rev = gog::Injection::z_into(vgroups[size_t(from)],
                                         vgroups[size_t(from)].parse(e.phi_rev[0]));
        } else if (e.group_kind == "finite") {
            eg = gog::VGroup::finite(finite_groups.at(e.group_ref));
            auto images = [&](const std::vector<std::string>& names, int target) {
                std::vector<int> imgs;
                for (const auto& n : names)
                    imgs.push_back(int(vgroups[size_t(target)].parse(n)[0]));
                return imgs;
            };
            fwd = gog::Injection::finite_into(eg, vgroups[size_t(to)],
                                              images(e.phi_fwd, to));
            rev = gog::Injection::finite_into(eg, vgroups[size_t(from)],
                                              images(e.phi_rev, from));
        } else {
            throw ParseError("gog: unknown edge group kind " + e.group_kind);
        }
        g->add_edge_pair(e.name, from, to, eg, fwd, rev, e.in_tree);
    }
    std::string why;
    if (!g->validate(&why)) throw ParseError("gog: invalid graph of groups: " + why);
    return g;
}

ModelHandle parse_model(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-group v1")
        throw ParseError("group model: bad header");
    ModelHandle h;
    h.name = name;
    std::string kind;
    int rank = 0;
    std::string rest;
    std::vector<std::string> fin_names;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks[0] == "kind") kind = toks[1];
        else if (toks[0] == "rank") rank = std::stoi(toks[1]);
        else if (toks[0] == "elements") {
            fin_names.assign(toks.begin() + 1, toks.end());
            h.finite = parse_finite_block(in, fin_names);
        } else if (toks[0] == "gog-file") {
            rest = toks[1];
        } else if (toks[0] == "gog-inline") {
            std::ostringstream gtext;
            while (std::getline(in, line)) gtext << line << "\n";
            h.graph = parse_gog(gtext.str());
        }
    }
    if (kind == "free-abelian") {
        h.kind = ModelHandle::Kind::Zm;
        h.zm = groups::ZmModel(rank);
    } else if (kind == "free") {
        h.kind = ModelHandle::Kind::Free;
        h.free_model = groups::FreeModel(rank);
    } else if (kind == "finite-table") {
        h.kind = ModelHandle::Kind::Finite;
        if (!h.finite) throw ParseError("finite-table model without table");
    } else if (kind == "graph-of-groups") {
        h.kind = ModelHandle::Kind::Gog;
        if (!h.graph && !rest.empty()) h.graph = parse_gog(read_file(rest));
        if (!h.graph) throw ParseError("graph-of-groups model without gog data");
    } else {
        throw ParseError("unknown model kind: " + kind);
    }
    return h;
}

namespace {

const char* kKleinBottleGog = R"(asdim-gog v1
vertices P Q
base P
vgroup P Z
vgroup Q Z
edge y P Q Z
phi y 2
phi y- 2
tree y
)";

const char* kBs12Gog = R"(asdim-gog v1
vertices P
base P
vgroup P Z
edge y P P Z
phi y 1
phi y- 2
)";

const char* kFreeProductZzGog = R"(asdim-gog v1
vertices P Q
base P
vgroup P Z
vgroup Q Z
edge y P Q trivial
tree y
)";

const char* kInfiniteDihedralGog = R"(asdim-gog v1
finite-group C2 e a
table
e a
a e
gens a
vertices P Q
base P
vgroup P finite C2
vgroup Q finite C2
edge y P Q trivial
tree y
)";

const char* kF2WedgeGog = R"(asdim-gog v1
vertices P
base P
vgroup P trivial
edge y P P trivial
edge z P P trivial
)";

} // namespace

std::shared_ptr<gog::GraphOfGroups> builtin_gog(const std::string& name) {
    if (name == "klein-bottle") return parse_gog(kKleinBottleGog);
    if (name == "bs12") return parse_gog(kBs12Gog);
    if (name == "zz-free-product") return parse_gog(kFreeProductZzGog);
    if (name == "infinite-dihedral") return parse_gog(kInfiniteDihedralGog);
    if (name == "f2-wedge") return parse_gog(kF2WedgeGog);
    throw ParseError("unknown builtin graph of groups: " + name);
}

ModelHandle builtin_model(const std::string& name) {
    ModelHandle h;
    h.name = name;
    if (name == "Z") {
        h.kind = ModelHandle::Kind::Zm;
        h.zm = groups::ZmModel(1);
    } else if (name == "Z2") {
        h.kind = ModelHandle::Kind::Zm;
        h.zm = groups::ZmModel(2);
    } else if (name == "F2") {
        h.kind = ModelHandle::Kind::Free;
        h.free_model = groups::FreeModel(2);
    } else {
        h.kind = ModelHandle::Kind::Gog;
        h.graph = builtin_gog(name);
    }
    return h;
}

std::vector<std::string> builtin_model_names() {
    return {"Z",    "Z2",              "F2",
            "klein-bottle",            "bs12",
            "zz-free-product",         "infinite-dihedral",
            "f2-wedge"};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(kInternal, "cannot write file: " + path);
    out << content;
}

} // namespace io
} // namespace asdim
