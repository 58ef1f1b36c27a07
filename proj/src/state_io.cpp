#include "directwf/state_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <numbers>
#include <sstream>

#include "directwf/error.hpp"

namespace directwf {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& token, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
  }
}

// Reads the header and numeric rows of a three-column CSV, skipping comments.
struct Table {
  std::vector<std::string> header;
  std::vector<std::array<double, 3>> rows;
};

Table read_three_columns(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv_line(t);
    if (fields.size() != 3) {
      throw Error(ErrorKind::Io, "line " + std::to_string(line_no) + ": expected 3 columns");
    }
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    table.rows.push_back({parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                          parse_double(fields[2], line_no)});
  }
  if (table.header.empty()) throw Error(ErrorKind::Io, "missing CSV header");
  return table;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << " = " << value << '\n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void save_grid_state(std::ostream& out, const GridState& state, const Metadata& metadata) {
  write_metadata(out, metadata);
  out << (state.representation() == Representation::Position ? "x_mm" : "k_rad_per_mm")
      << ",re,im\n";
  for (std::size_t i = 0; i < state.size(); ++i) {
    out << format_double(state.coordinate(i)) << ',' << format_double(state[i].real()) << ','
        << format_double(state[i].imag()) << '\n';
  }
}

void save_grid_state(const std::filesystem::path& path, const GridState& state,
                     const Metadata& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  save_grid_state(out, state, metadata);
}

GridState load_grid_state(std::istream& in) {
  const Table table = read_three_columns(in);
  Representation rep;
  if (table.header[0] == "x_mm") {
    rep = Representation::Position;
  } else if (table.header[0] == "k_rad_per_mm") {
    rep = Representation::Momentum;
  } else {
    throw Error(ErrorKind::Io, "first column must be x_mm or k_rad_per_mm");
  }
  const std::size_t n = table.rows.size();
  if (n < 2) throw Error(ErrorKind::Io, "grid state needs at least two rows");

  // The first coordinate of a centred grid is exactly -(n/2) * spacing.
  const double first = table.rows.front()[0];
  const double spacing = -2.0 * first / static_cast<double>(n);
  if (!(spacing > 0.0)) throw Error(ErrorKind::Io, "coordinates are not a centred grid");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = (static_cast<double>(i) - static_cast<double>(n / 2)) * spacing;
    if (std::abs(table.rows[i][0] - expected) > 1e-9 * spacing * static_cast<double>(n)) {
      throw Error(ErrorKind::Io, "coordinates are not uniformly spaced at row " + std::to_string(i));
    }
  }
  // A momentum grid with spacing dk corresponds to position spacing 2 pi / (n dk).
  const double dx = rep == Representation::Position
                        ? spacing
                        : 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
  const double half = dx * static_cast<double>(n / 2);
  GridSpec spec(n, -half, half);
  ComplexVector amps(n);
  for (std::size_t i = 0; i < n; ++i) amps[i] = {table.rows[i][1], table.rows[i][2]};
  return GridState(spec, std::move(amps), rep);
}

GridState load_grid_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return load_grid_state(in);
}

void save_discrete_state(std::ostream& out, const DiscreteState& state, const Metadata& metadata) {
  write_metadata(out, metadata);
  out << "index,re,im\n";
  for (std::size_t a = 0; a < state.dim(); ++a) {
    const auto c = state.amplitudes()(static_cast<Eigen::Index>(a));
    out << a << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  }
}

DiscreteState load_discrete_state(std::istream& in) {
  const Table table = read_three_columns(in);
  if (table.header[0] != "index") throw Error(ErrorKind::Io, "first column must be index");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(table.rows.size()));
  std::vector<bool> seen(table.rows.size(), false);
  for (const auto& row : table.rows) {
    const double idx = row[0];
    if (idx < 0 || idx >= static_cast<double>(table.rows.size()) || idx != std::floor(idx) ||
        seen[static_cast<std::size_t>(idx)]) {
      throw Error(ErrorKind::Io, "indices must be a permutation of 0..N-1");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    amps(static_cast<Eigen::Index>(idx)) = {row[1], row[2]};
  }
  return DiscreteState(std::move(amps));
}

DiscreteState load_discrete_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return load_discrete_state(in);
}

}  // namespace directwf
