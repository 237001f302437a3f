#include "snse/diagram.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace snse::deform {

using sym::Atom;
using sym::Expr;
using sym::Term;
using sym::Token;
using nlohmann::json;

const char* edge_kind_name(EdgeKind k) {
    switch (k) {
    case EdgeKind::G: return "G";
    case EdgeKind::Gbar: return "Gbar";
    case EdgeKind::Q: return "Q";
    case EdgeKind::Qbar: return "Qbar";
    }
    return "?";
}

const char* decoration_name(Decoration d) {
    switch (d) {
    case Decoration::C: return "C";
    case Decoration::Cbar: return "Cbar";
    case Decoration::Chi: return "Chi";
    case Decoration::EtaLeg: return "EtaLeg";
    case Decoration::EtaBarLeg: return "EtaBarLeg";
    case Decoration::DeltaC: return "DeltaC";
    case Decoration::DeltaCbar: return "DeltaCbar";
    case Decoration::DiagonalId: return "DiagonalId";
    }
    return "?";
}

namespace {

EdgeKind edge_kind_from(const std::string& s) {
    if (s == "G") return EdgeKind::G;
    if (s == "Gbar") return EdgeKind::Gbar;
    if (s == "Q") return EdgeKind::Q;
    if (s == "Qbar") return EdgeKind::Qbar;
    throw std::invalid_argument("unknown edge kind: " + s);
}

Decoration decoration_from(const std::string& s) {
    if (s == "C") return Decoration::C;
    if (s == "Cbar") return Decoration::Cbar;
    if (s == "Chi") return Decoration::Chi;
    if (s == "EtaLeg") return Decoration::EtaLeg;
    if (s == "EtaBarLeg") return Decoration::EtaBarLeg;
    if (s == "DeltaC") return Decoration::DeltaC;
    if (s == "DeltaCbar") return Decoration::DeltaCbar;
    if (s == "DiagonalId") return Decoration::DiagonalId;
    throw std::invalid_argument("unknown decoration: " + s);
}

struct Builder {
    Diagram d;
    std::map<int, std::pair<int, int>> pair_sites;  // pair id -> (plain site, conj site)
    bool strict = false;

    int new_internal() {
        d.vertices.push_back({false, {}});
        return int(d.vertices.size()) - 1;
    }

    void walk(const std::vector<Atom>& atoms, int vertex) {
        for (const auto& a : atoms) {
            switch (a.kind) {
            case Atom::Kind::FieldLeg:
                if (strict)
                    throw std::invalid_argument("to_diagrams: field leg in strict kernel mode");
                d.vertices[vertex].decorations.push_back(
                    a.bar ? Decoration::EtaBarLeg : Decoration::EtaLeg);
                break;
            case Atom::Kind::Tok:
                switch (a.token) {
                case Token::C: d.vertices[vertex].decorations.push_back(Decoration::C); break;
                case Token::Cbar: d.vertices[vertex].decorations.push_back(Decoration::Cbar); break;
                case Token::Chi: d.vertices[vertex].decorations.push_back(Decoration::Chi); break;
                case Token::DeltaC: d.vertices[vertex].decorations.push_back(Decoration::DeltaC); break;
                case Token::DeltaCbar: d.vertices[vertex].decorations.push_back(Decoration::DeltaCbar); break;
                case Token::Eta:
                case Token::EtaBar:
                    if (strict)
                        throw std::invalid_argument("to_diagrams: eta token in strict kernel mode");
                    d.vertices[vertex].decorations.push_back(
                        a.token == Token::Eta ? Decoration::EtaLeg : Decoration::EtaBarLeg);
                    break;
                }
                break;
            case Atom::Kind::PairLeg: {
                auto& sites = pair_sites[a.pair];
                if (a.bar) sites.second = vertex; else sites.first = vertex;
                break;
            }
            case Atom::Kind::Conv: {
                int w = new_internal();
                d.edges.push_back({vertex, w, a.bar ? EdgeKind::Gbar : EdgeKind::G});
                walk(a.arg, w);
                break;
            }
            case Atom::Kind::OpSlot:
                throw std::invalid_argument("to_diagrams: operator slot has no kernel");
            }
        }
    }
};

std::string decoration_key(const std::vector<Decoration>& ds) {
    std::string k;
    for (auto d : ds) k.push_back(char('a' + int(d)));
    return k;
}

Diagram build_diagram(const Term& t, const std::vector<std::string>& labels, bool strict) {
    Builder b;
    b.strict = strict;
    int n = int(t.slots.size());
    for (int i = 0; i < n; ++i) {
        b.d.vertices.push_back({true, {}});
        b.d.externals.push_back(i < int(labels.size()) ? labels[i]
                                                       : "x" + std::to_string(i + 1));
    }
    for (int i = 0; i < n; ++i) b.walk(t.slots[i], i);

    for (auto& [id, sites] : b.pair_sites) {
        (void)id;
        if (sites.first <= sites.second)
            b.d.edges.push_back({sites.first, sites.second, EdgeKind::Q});
        else
            b.d.edges.push_back({sites.second, sites.first, EdgeKind::Qbar});
    }

    Diagram& d = b.d;
    for (auto& v : d.vertices) std::sort(v.decorations.begin(), v.decorations.end());

    // Canonical vertex order: externals keep slot order, internals sorted by
    // (decoration multiset, degree), discovery order breaking ties.
    std::vector<int> degree(d.vertices.size(), 0);
    for (const auto& e : d.edges) { ++degree[e.src]; ++degree[e.dst]; }
    std::vector<int> order;
    for (size_t i = 0; i < d.vertices.size(); ++i) order.push_back(int(i));
    std::stable_sort(order.begin() + n, order.end(), [&](int x, int y) {
        auto kx = std::make_tuple(decoration_key(d.vertices[x].decorations), degree[x], x);
        auto ky = std::make_tuple(decoration_key(d.vertices[y].decorations), degree[y], y);
        return kx < ky;
    });
    std::vector<int> remap(d.vertices.size());
    for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = int(i);
    std::vector<Diagram::Vertex> vs(d.vertices.size());
    for (size_t i = 0; i < d.vertices.size(); ++i) vs[remap[i]] = d.vertices[i];
    d.vertices = std::move(vs);
    for (auto& e : d.edges) { e.src = remap[e.src]; e.dst = remap[e.dst]; }
    std::sort(d.edges.begin(), d.edges.end(), [](const Diagram::Edge& a, const Diagram::Edge& b) {
        return std::tie(a.src, a.dst, a.kind) < std::tie(b.src, b.dst, b.kind);
    });

    d.symmetry_factor = t.coeff;
    d.lambda_power = t.lambda;
    return d;
}

} // namespace

std::vector<Diagram> to_diagrams(const Expr& e, const std::vector<std::string>& slot_labels,
                                 bool strict) {
    std::vector<Diagram> out;
    out.reserve(e.terms().size());
    for (const auto& t : e.terms()) out.push_back(build_diagram(t, slot_labels, strict));
    return out;
}

namespace {

json diagram_to_json_obj(const Diagram& d) {
    json j;
    j["externals"] = d.externals;
    json vs = json::array();
    for (const auto& v : d.vertices) {
        json decs = json::array();
        for (auto dec : v.decorations) decs.push_back(decoration_name(dec));
        vs.push_back({{"external", v.external}, {"decorations", decs}});
    }
    j["vertices"] = std::move(vs);
    json es = json::array();
    for (const auto& e : d.edges)
        es.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", edge_kind_name(e.kind)}});
    j["edges"] = std::move(es);
    j["symmetry_factor"] = {d.symmetry_factor.num(), d.symmetry_factor.den()};
    j["lambda_power"] = d.lambda_power;
    return j;
}

Diagram diagram_from_json_obj(const json& j) {
    Diagram d;
    for (const auto& s : j.at("externals")) d.externals.push_back(s.get<std::string>());
    for (const auto& v : j.at("vertices")) {
        Diagram::Vertex vert;
        vert.external = v.at("external").get<bool>();
        for (const auto& s : v.at("decorations"))
            vert.decorations.push_back(decoration_from(s.get<std::string>()));
        d.vertices.push_back(std::move(vert));
    }
    for (const auto& e : j.at("edges"))
        d.edges.push_back({e.at("src").get<int>(), e.at("dst").get<int>(),
                           edge_kind_from(e.at("kind").get<std::string>())});
    auto sf = j.at("symmetry_factor");
    d.symmetry_factor = Rational(sf.at(0).get<long long>(), sf.at(1).get<long long>());
    d.lambda_power = j.at("lambda_power").get<int>();
    return d;
}

} // namespace

std::string to_json(const Diagram& d, int indent) {
    return diagram_to_json_obj(d).dump(indent);
}

std::string to_json(const std::vector<Diagram>& ds, int indent) {
    json arr = json::array();
    for (const auto& d : ds) arr.push_back(diagram_to_json_obj(d));
    return arr.dump(indent);
}

Diagram diagram_from_json(const std::string& text) {
    return diagram_from_json_obj(json::parse(text));
}

std::string to_dot(const Diagram& d, const std::string& name) {
    std::string out = "digraph " + name + " {\n";
    for (size_t i = 0; i < d.vertices.size(); ++i) {
        const auto& v = d.vertices[i];
        std::string label = v.external ? d.externals[i] : "y" + std::to_string(i);
        for (auto dec : v.decorations) label += std::string(" ") + decoration_name(dec);
        out += "  v" + std::to_string(i) + " [label=\"" + label + "\"" +
               (v.external ? ", shape=box" : "") + "];\n";
    }
    for (const auto& e : d.edges) {
        out += "  v" + std::to_string(e.src) + " -> v" + std::to_string(e.dst) +
               " [label=\"" + edge_kind_name(e.kind) + "\"];\n";
    }
    out += "}\n";
    return out;
}

} // namespace snse::deform
