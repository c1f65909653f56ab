#pragma once

#include "ifed/mesh/structural_mesh.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ifed {

// Plain-text mesh format (whitespace-delimited, line-oriented):
//
//   <kind> <n_nodes> <n_elements>        kind is p1 | p2 | q1 | q2
//   x y                                  n_nodes lines
//   i0 i1 ... i{k-1}                     n_elements lines, 0-based node indices
//   elem side marker                     optional, until end of input
//
// Facets that are not listed keep marker 0.

inline StructuralMesh read_mesh(std::istream& in)
{
    std::string kind_token;
    std::size_t n_nodes = 0, n_elements = 0;
    if (!(in >> kind_token >> n_nodes >> n_elements)) throw GeometryError("mesh text: malformed header");
    const ElementKind kind = parse_element_kind(kind_token);

    std::vector<Vec2> nodes(n_nodes);
    for (auto& x : nodes)
        if (!(in >> x.x >> x.y)) throw GeometryError("mesh text: truncated node section");

    const int npe = node_count(kind);
    std::vector<int> conn(n_elements * npe);
    for (auto& c : conn)
        if (!(in >> c)) throw GeometryError("mesh text: truncated element section");

    std::vector<BoundaryFacet> facets;
    BoundaryFacet f;
    while (in >> f.element >> f.side >> f.marker)
    {
        if (f.element >= n_elements || f.side < 0 || f.side >= vertex_count(kind))
            throw GeometryError("mesh text: facet references invalid element or side");
        facets.push_back(f);
    }
    if (!in.eof()) throw GeometryError("mesh text: trailing garbage in facet section");
    return StructuralMesh(kind, std::move(nodes), std::move(conn), facets);
}

inline StructuralMesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const StructuralMesh& mesh)
{
    out << to_string(mesh.kind()) << ' ' << mesh.num_nodes() << ' ' << mesh.num_elements() << '\n';
    out << std::setprecision(17);
    for (const auto& x : mesh.nodes()) out << x.x << ' ' << x.y << '\n';
    for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    {
        const auto conn = mesh.element(e);
        for (std::size_t k = 0; k < conn.size(); ++k) out << (k ? " " : "") << conn[k];
        out << '\n';
    }
    for (const auto& f : mesh.boundary_facets())
        if (f.marker != 0) out << f.element << ' ' << f.side << ' ' << f.marker << '\n';
}

} // namespace ifed
