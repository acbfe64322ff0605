#pragma once
#include <iosfwd>
#include <optional>
#include <string>

#include "coarse/space.hpp"

namespace coarse {

// Space file format (text, UTF-8):
//   space <n>
//   dist            | edges
//   <n rows of n>   | lines "i j length"
//   measure         (optional section, n decimals)
// Writers emit 17 significant digits.
struct SpaceFile {
    FiniteSpace space;
    std::optional<Graph> graph; // present when the file had an edges section
};

SpaceFile read_space(std::istream& in);
SpaceFile read_space_file(const std::string& path);

void write_space(std::ostream& out, const FiniteSpace& s);
void write_space(std::ostream& out, const Graph& g,
                 const std::vector<double>& measure = {});
void write_space_file(const std::string& path, const FiniteSpace& s);
void write_space_file(const std::string& path, const Graph& g,
                      const std::vector<double>& measure = {});

} // namespace coarse
