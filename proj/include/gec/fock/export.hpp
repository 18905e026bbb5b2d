#pragma once

#include <cstddef>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/fock/gec.hpp"
#include "gec/fock/hamiltonian.hpp"

namespace gec {

enum class GraphFormat { EdgeCsv, Dot };

inline GraphFormat parse_graph_format(std::string_view tag) {
    if (tag == "edge-csv" || tag == "csv") return GraphFormat::EdgeCsv;
    if (tag == "dot" || tag == "dot-like") return GraphFormat::Dot;
    throw ConfigError("unknown graph format '" + std::string(tag) + "' (expected edge-csv or dot)");
}

inline constexpr std::string_view kGecNormalization = "D*(Tr(H~^2)-Tr((H~\\i)^2))/Tr(H~^2)";

/// Node table `index,bitstring,gec` and edge table `src,dst,weight`.
/// Self-loops carry the centered diagonal H~_ii and are emitted when nonzero.
struct GraphCsv {
    std::string nodes;
    std::string edges;
};

namespace detail {

inline void check_export_dims(const SparseHamiltonian& h, const FockBasis& basis, const GecVector& g) {
    if (h.dim() != basis.size() || g.values.size() != h.dim())
        throw ConfigError("export_graph: Hamiltonian, basis and GEC dimensions differ");
}

inline std::ostream& full_precision(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace detail

inline GraphCsv export_graph_csv(const SparseHamiltonian& h, const FockBasis& basis, const GecVector& g) {
    detail::check_export_dims(h, basis, g);
    std::ostringstream nodes, edges;
    detail::full_precision(nodes);
    detail::full_precision(edges);
    nodes << "# normalization=" << kGecNormalization << " shift=" << g.shift << " width=" << g.width << '\n';
    nodes << "index,bitstring,gec\n";
    for (std::size_t i = 0; i < h.dim(); ++i) nodes << i << ',' << basis.label(i) << ',' << g.values[i] << '\n';
    edges << "src,dst,weight\n";
    for (std::size_t i = 0; i < h.dim(); ++i) {
        const double d = h.diagonal()[i] - g.shift;
        if (d != 0.0) edges << i << ',' << i << ',' << d << '\n';
    }
    h.for_each_edge([&](std::size_t i, std::size_t j, double w) { edges << i << ',' << j << ',' << w << '\n'; });
    return {nodes.str(), edges.str()};
}

inline std::string export_graph_dot(const SparseHamiltonian& h, const FockBasis& basis, const GecVector& g) {
    detail::check_export_dims(h, basis, g);
    std::ostringstream os;
    detail::full_precision(os);
    os << "graph fock {\n";
    os << "  graph [normalization=\"" << kGecNormalization << "\", shift=" << g.shift << ", width=" << g.width
       << "];\n";
    for (std::size_t i = 0; i < h.dim(); ++i)
        os << "  " << i << " [label=\"" << basis.label(i) << "\", gec=" << g.values[i] << "];\n";
    for (std::size_t i = 0; i < h.dim(); ++i) {
        const double d = h.diagonal()[i] - g.shift;
        if (d != 0.0) os << "  " << i << " -- " << i << " [weight=" << d << "];\n";
    }
    h.for_each_edge(
        [&](std::size_t i, std::size_t j, double w) { os << "  " << i << " -- " << j << " [weight=" << w << "];\n"; });
    os << "}\n";
    return os.str();
}

/// Serializes the graph; CSV output is the node table followed by a blank
/// line and the edge table.
inline std::string export_graph(const SparseHamiltonian& h, const FockBasis& basis, const GecVector& g,
                                GraphFormat format) {
    if (format == GraphFormat::Dot) return export_graph_dot(h, basis, g);
    auto csv = export_graph_csv(h, basis, g);
    return csv.nodes + "\n" + csv.edges;
}

inline std::string export_graph(const SparseHamiltonian& h, const FockBasis& basis, const GecVector& g,
                                std::string_view format) {
    return export_graph(h, basis, g, parse_graph_format(format));
}

}  // namespace gec
