#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "directwf/discrete.hpp"
#include "directwf/grid.hpp"

namespace directwf {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Round-trip formatting for doubles (17 significant digits).
std::string format_double(double value);

// Writes "# key = value" lines; readers in this library skip lines starting with '#'.
void write_metadata(std::ostream& out, const Metadata& metadata);

// CSV with header "x_mm,re,im" (or "k_rad_per_mm,re,im" for momentum states).
void save_grid_state(std::ostream& out, const GridState& state, const Metadata& metadata = {});
void save_grid_state(const std::filesystem::path& path, const GridState& state,
                     const Metadata& metadata = {});
GridState load_grid_state(std::istream& in);
GridState load_grid_state(const std::filesystem::path& path);

// CSV with header "index,re,im".
void save_discrete_state(std::ostream& out, const DiscreteState& state,
                         const Metadata& metadata = {});
DiscreteState load_discrete_state(std::istream& in);
DiscreteState load_discrete_state(const std::filesystem::path& path);

// Splits on commas, trimming surrounding blanks.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace directwf
