#include "snse/expr_json.hpp"

#include <json.hpp>

namespace snse::sym {

using nlohmann::json;

namespace {

const char* token_name(Token t) {
    switch (t) {
    case Token::C: return "C";
    case Token::Cbar: return "Cbar";
    case Token::Chi: return "Chi";
    case Token::Eta: return "Eta";
    case Token::EtaBar: return "EtaBar";
    case Token::DeltaC: return "DeltaC";
    case Token::DeltaCbar: return "DeltaCbar";
    }
    return "?";
}

Token token_from(const std::string& s) {
    if (s == "C") return Token::C;
    if (s == "Cbar") return Token::Cbar;
    if (s == "Chi") return Token::Chi;
    if (s == "Eta") return Token::Eta;
    if (s == "EtaBar") return Token::EtaBar;
    if (s == "DeltaC") return Token::DeltaC;
    if (s == "DeltaCbar") return Token::DeltaCbar;
    throw std::invalid_argument("unknown token name: " + s);
}

json atoms_to_json(const std::vector<Atom>& atoms) {
    json arr = json::array();
    for (const auto& a : atoms) {
        json j;
        switch (a.kind) {
        case Atom::Kind::FieldLeg:
            j = {{"type", "field"}, {"bar", a.bar}};
            break;
        case Atom::Kind::Tok:
            j = {{"type", "token"}, {"name", token_name(a.token)}};
            break;
        case Atom::Kind::Conv:
            j = {{"type", "conv"}, {"bar", a.bar}, {"arg", atoms_to_json(a.arg)}};
            break;
        case Atom::Kind::PairLeg:
            j = {{"type", "pair"}, {"bar", a.bar}, {"id", a.pair}};
            break;
        case Atom::Kind::OpSlot:
            j = {{"type", "slot"}};
            break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<Atom> atoms_from_json(const json& arr) {
    std::vector<Atom> atoms;
    for (const auto& j : arr) {
        std::string type = j.at("type").get<std::string>();
        if (type == "field") {
            atoms.push_back(Atom::field(j.at("bar").get<bool>()));
        } else if (type == "token") {
            atoms.push_back(Atom::tok(token_from(j.at("name").get<std::string>())));
        } else if (type == "conv") {
            atoms.push_back(Atom::conv(j.at("bar").get<bool>(), atoms_from_json(j.at("arg"))));
        } else if (type == "pair") {
            atoms.push_back(Atom::pair_leg(j.at("bar").get<bool>(), j.at("id").get<int>()));
        } else if (type == "slot") {
            atoms.push_back(Atom::op_slot());
        } else {
            throw std::invalid_argument("unknown atom type: " + type);
        }
    }
    return atoms;
}

} // namespace

std::string to_json(const Expr& e, int indent) {
    json root;
    root["slots"] = e.slot_count();
    json monomials = json::array();
    for (const auto& t : e.terms()) {
        json m;
        m["coeff"] = {t.coeff.num(), t.coeff.den()};
        m["lambda"] = t.lambda;
        if (e.slot_count() == 1) {
            m["atoms"] = atoms_to_json(t.slots[0]);
        } else {
            json ss = json::array();
            for (const auto& s : t.slots) ss.push_back(atoms_to_json(s));
            m["slots"] = std::move(ss);
        }
        monomials.push_back(std::move(m));
    }
    root["monomials"] = std::move(monomials);
    return root.dump(indent);
}

Expr expr_from_json(const std::string& text) {
    json root = json::parse(text);
    int nslots = root.at("slots").get<int>();
    std::vector<Term> ts;
    for (const auto& m : root.at("monomials")) {
        Term t(nslots);
        auto c = m.at("coeff");
        t.coeff = Rational(c.at(0).get<long long>(), c.at(1).get<long long>());
        t.lambda = m.at("lambda").get<int>();
        if (nslots == 1) {
            t.slots[0] = atoms_from_json(m.at("atoms"));
        } else {
            const auto& ss = m.at("slots");
            for (int i = 0; i < nslots; ++i) t.slots[i] = atoms_from_json(ss.at(i));
        }
        ts.push_back(std::move(t));
    }
    return Expr::from_terms(nslots, std::move(ts));
}

} // namespace snse::sym
