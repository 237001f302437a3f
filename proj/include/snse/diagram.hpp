#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snse/expr.hpp"

namespace snse::deform {

enum class EdgeKind : uint8_t { G = 0, Gbar, Q, Qbar };
enum class Decoration : uint8_t { C = 0, Cbar, Chi, EtaLeg, EtaBarLeg, DeltaC, DeltaCbar, DiagonalId };

// Directed kernel graph. External vertices carry test-function slots,
// internal vertices are integration points. G/Gbar edges are causal
// (src time >= dst time). A Q edge (a,b) stands for the covariance kernel
// with its plain argument at a; Qbar (a,b) is the conjugate kernel, plain
// argument at b. Canonical form lists the lower-indexed endpoint first,
// flipping Q <-> Qbar as needed.
struct Diagram {
    struct Vertex {
        bool external = false;
        std::vector<Decoration> decorations;   // sorted multiset
        friend bool operator==(const Vertex&, const Vertex&) = default;
    };
    struct Edge {
        int src = 0;
        int dst = 0;
        EdgeKind kind = EdgeKind::G;
        friend bool operator==(const Edge&, const Edge&) = default;
    };

    std::vector<std::string> externals;
    std::vector<Vertex> vertices;              // externals first
    std::vector<Edge> edges;
    Rational symmetry_factor = Rational(1);
    int lambda_power = 0;

    int edge_count() const { return int(edges.size()); }
    int vertex_count() const { return int(vertices.size()); }

    friend bool operator==(const Diagram&, const Diagram&) = default;
};

const char* edge_kind_name(EdgeKind k);
const char* decoration_name(Decoration d);

// One diagram per monomial of a fully deformed expression. In strict mode
// any remaining field leg or eta token is an error; otherwise such legs
// become eta-leg decorations.
std::vector<Diagram> to_diagrams(const sym::Expr& e,
                                 const std::vector<std::string>& slot_labels = {},
                                 bool strict = false);

std::string to_json(const Diagram& d, int indent = -1);
std::string to_json(const std::vector<Diagram>& ds, int indent = -1);
Diagram diagram_from_json(const std::string& text);
std::string to_dot(const Diagram& d, const std::string& name = "diagram");

} // namespace snse::deform
