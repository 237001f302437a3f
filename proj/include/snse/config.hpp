#pragma once

#include <cstdint>
#include <string>

#include "snse/kernels.hpp"

namespace snse {

struct RunConfig {
    int kappa = 1;
    int order = 2;
    double lambda = 0.05;
    long long n_real = 10000;
    uint64_t seed = 987654321;
    int threads = 0;
    num::Extension extension = num::Extension::EpsilonCut;
    std::string out_dir = "out";
    num::LatticeSpec lattice = num::LatticeSpec::defaults();

    void validate() const;
};

std::string config_to_json(const RunConfig& cfg, int indent = 2);
RunConfig config_from_json(const std::string& text);
RunConfig load_config_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace snse
