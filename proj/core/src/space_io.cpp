#include "coarse/space_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace {
std::string next_token(std::istream& in) {
    std::string t;
    if (!(in >> t)) return {};
    return t;
}
} // namespace

SpaceFile read_space(std::istream& in) {
    std::string kw = next_token(in);
    if (kw != "space") throw ParseError("expected 'space <n>' header");
    int n = 0;
    if (!(in >> n) || n <= 0) throw ParseError("bad point count");
    std::string section = next_token(in);
    std::vector<double> measure;
    std::optional<Graph> graph;
    std::vector<double> dist;

    auto read_measure = [&](std::istream& s) {
        measure.resize(n);
        for (int i = 0; i < n; ++i)
            if (!(s >> measure[i])) throw ParseError("short measure section");
    };

    if (section == "dist") {
        dist.resize(static_cast<std::size_t>(n) * n);
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (!(in >> dist[i])) throw ParseError("short distance matrix");
        std::string tail = next_token(in);
        if (tail == "measure")
            read_measure(in);
        else if (!tail.empty())
            throw ParseError("unexpected trailing content: " + tail);
    } else if (section == "edges") {
        Graph g;
        g.n = n;
        std::string tok;
        while (true) {
            tok = next_token(in);
            if (tok.empty() || tok == "measure") break;
            Graph::Edge e;
            e.u = std::stoi(tok);
            if (!(in >> e.v >> e.length)) throw ParseError("bad edge line");
            g.edges.push_back(e);
        }
        if (tok == "measure") read_measure(in);
        graph = std::move(g);
    } else {
        throw ParseError("expected 'dist' or 'edges' section");
    }

    if (graph) return SpaceFile{from_graph(*graph, measure), graph};
    return SpaceFile{FiniteSpace(n, std::move(dist), std::move(measure)), std::nullopt};
}

SpaceFile read_space_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_space(in);
}

void write_space(std::ostream& out, const FiniteSpace& s) {
    out << "space " << s.n() << "\n" << "dist\n";
    out << std::setprecision(17);
    for (int i = 0; i < s.n(); ++i) {
        for (int j = 0; j < s.n(); ++j) out << (j ? " " : "") << s.dist(i, j);
        out << "\n";
    }
    out << "measure\n";
    for (int i = 0; i < s.n(); ++i) out << (i ? " " : "") << s.measure(i);
    out << "\n";
}

void write_space(std::ostream& out, const Graph& g, const std::vector<double>& measure) {
    out << "space " << g.n << "\n" << "edges\n";
    out << std::setprecision(17);
    for (const auto& e : g.edges) out << e.u << " " << e.v << " " << e.length << "\n";
    if (!measure.empty()) {
        out << "measure\n";
        for (std::size_t i = 0; i < measure.size(); ++i)
            out << (i ? " " : "") << measure[i];
        out << "\n";
    }
}

void write_space_file(const std::string& path, const FiniteSpace& s) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_space(out, s);
}

void write_space_file(const std::string& path, const Graph& g,
                      const std::vector<double>& measure) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_space(out, g, measure);
}

} // namespace coarse
