#include "snse/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace snse {

using nlohmann::json;
using num::Extension;
using num::SignConvention;

void RunConfig::validate() const {
    if (kappa < 1) throw std::invalid_argument("config: kappa must be >= 1");
    if (order < 0) throw std::invalid_argument("config: order must be >= 0");
    if (n_real < 1) throw std::invalid_argument("config: realizations must be >= 1");
    lattice.validate();
}

namespace {

json bump_to_json(const num::BumpSpec& b) {
    return {{"center", b.center}, {"halfwidth", b.halfwidth}, {"plateau", b.plateau}};
}

num::BumpSpec bump_from_json(const json& j) {
    return {j.at("center").get<double>(), j.at("halfwidth").get<double>(),
            j.at("plateau").get<double>()};
}

} // namespace

std::string config_to_json(const RunConfig& cfg, int indent) {
    json j;
    j["kappa"] = cfg.kappa;
    j["order"] = cfg.order;
    j["lambda"] = cfg.lambda;
    j["n_real"] = cfg.n_real;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["extension"] = cfg.extension == Extension::EpsilonCut ? "epsilon_cut" : "epsilon_cut_logsub";
    j["out"] = cfg.out_dir;
    json l;
    l["d"] = cfg.lattice.d;
    l["T"] = cfg.lattice.T;
    l["Lx"] = cfg.lattice.Lx;
    l["nt"] = cfg.lattice.nt;
    l["nx"] = cfg.lattice.nx;
    l["epsilon"] = cfg.lattice.epsilon;
    l["sign_convention"] = cfg.lattice.sign == SignConvention::Minus ? "minus" : "plus";
    l["chi"] = {{"time", bump_to_json(cfg.lattice.chi.time)},
                {"space", bump_to_json(cfg.lattice.chi.space)}};
    j["lattice"] = std::move(l);
    return j.dump(indent);
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    if (j.contains("kappa")) cfg.kappa = j["kappa"].get<int>();
    if (j.contains("order")) cfg.order = j["order"].get<int>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("n_real")) cfg.n_real = j["n_real"].get<long long>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("extension")) {
        std::string e = j["extension"].get<std::string>();
        if (e == "epsilon_cut") cfg.extension = Extension::EpsilonCut;
        else if (e == "epsilon_cut_logsub") cfg.extension = Extension::EpsilonCutLogSub;
        else throw std::invalid_argument("config: unknown extension '" + e + "'");
    }
    if (j.contains("lattice")) {
        const json& l = j["lattice"];
        num::LatticeSpec& s = cfg.lattice;
        if (l.contains("d")) s.d = l["d"].get<int>();
        if (l.contains("T")) s.T = l["T"].get<double>();
        if (l.contains("Lx")) s.Lx = l["Lx"].get<double>();
        if (l.contains("nt")) s.nt = l["nt"].get<int>();
        if (l.contains("nx")) s.nx = l["nx"].get<int>();
        if (l.contains("epsilon")) s.epsilon = l["epsilon"].get<double>();
        if (l.contains("sign_convention")) {
            std::string sc = l["sign_convention"].get<std::string>();
            if (sc == "minus") s.sign = SignConvention::Minus;
            else if (sc == "plus") s.sign = SignConvention::Plus;
            else throw std::invalid_argument("config: unknown sign_convention '" + sc + "'");
        }
        if (l.contains("chi")) {
            s.chi.time = bump_from_json(l["chi"].at("time"));
            s.chi.space = bump_from_json(l["chi"].at("space"));
        } else {
            // keep cutoff proportional to the requested box
            s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
            s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace snse
