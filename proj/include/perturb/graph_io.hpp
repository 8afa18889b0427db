#pragma once

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perturb/graph.hpp"

namespace perturb {

// Text format:
//
//   n r
//   u v c      (one line per edge)
//
// Blank lines and lines starting with '#' are ignored on input.

inline void write_graph(std::ostream& os, const ColouredGraph& g)
{
    os << g.vertex_count() << ' ' << g.palette_size() << '\n';
    for (const auto& e : g.edges()) os << e.u << ' ' << e.v << ' ' << e.colour << '\n';
}

namespace detail {

inline bool next_content_line(std::istream& is, std::string& line, std::size_t& lineno)
{
    while (std::getline(is, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        return true;
    }
    return false;
}

inline std::vector<unsigned long long> parse_fields(const std::string& line, std::size_t expected,
                                                    std::size_t lineno)
{
    std::istringstream ss(line);
    std::vector<unsigned long long> out;
    std::string tok;
    while (ss >> tok) {
        if (tok.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": not a non-negative integer: '" +
                             tok + "'");
        out.push_back(std::stoull(tok));
    }
    if (out.size() != expected)
        throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                         " fields, got " + std::to_string(out.size()));
    return out;
}

} // namespace detail

inline ColouredGraph read_graph(std::istream& is)
{
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(is, line, lineno)) throw ParseError("empty graph file");
    auto header = detail::parse_fields(line, 2, lineno);
    if (header[1] > std::numeric_limits<Colour>::max()) throw ParseError("palette too large");
    ColouredGraph g(header[0], static_cast<Colour>(header[1]));
    while (detail::next_content_line(is, line, lineno)) {
        auto f = detail::parse_fields(line, 3, lineno);
        try {
            if (f[0] >= g.vertex_count() || f[1] >= g.vertex_count() || f[2] > g.palette_size())
                throw ContractError("value out of range");
            auto res = g.add_edge(static_cast<Vertex>(f[0]), static_cast<Vertex>(f[1]),
                                  static_cast<Colour>(f[2]));
            if (res.collision && g.colour(f[0], f[1]) != f[2])
                throw ContractError("edge listed twice with different colours");
        } catch (const ContractError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return g;
}

/// Vertex sequence on one whitespace-separated line.
inline void write_sequence(std::ostream& os, std::span<const Vertex> seq)
{
    for (std::size_t i = 0; i < seq.size(); ++i) os << (i ? " " : "") << seq[i];
    os << '\n';
}

inline std::vector<Vertex> read_sequence(std::istream& is)
{
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(is, line, lineno)) return {};
    std::istringstream ss(line);
    std::vector<Vertex> out;
    unsigned long long v = 0;
    while (ss >> v) out.push_back(static_cast<Vertex>(v));
    if (!ss.eof()) throw ParseError("malformed vertex sequence");
    return out;
}

} // namespace perturb
