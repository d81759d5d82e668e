#include "contagion/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/process.hpp"

namespace contagion {

namespace {

std::ofstream open_out(const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);  // '\n' endings everywhere
  if (!out) throw ConfigError("cannot open for writing: " + filename);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& filename) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric field '" + s + "' in " + filename);
  }
}

/// Reads non-comment lines, checks the header, returns the data rows split
/// into fields.
std::vector<std::vector<std::string>> read_rows(const std::string& filename,
                                                const std::string& header) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open for reading: " + filename);
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != header)
        throw ConfigError("unexpected header in " + filename + ": " + line);
      header_seen = true;
      continue;
    }
    rows.push_back(split_csv(line));
  }
  if (!header_seen) throw ConfigError("missing header row in " + filename);
  return rows;
}

/// Rebuilds the rectangular grid from row-major (t, lambda) rows.
struct GridRows {
  std::vector<double> ts, ls;
  std::vector<std::vector<double>> extras;  // per extra column, row-major
};

GridRows collect_grid(const std::vector<std::vector<std::string>>& rows,
                      std::size_t n_extra, const std::string& filename) {
  GridRows g;
  g.extras.resize(n_extra);
  for (const auto& row : rows) {
    if (row.size() != 2 + n_extra)
      throw ConfigError("wrong column count in " + filename);
    const double t = parse_double(row[0], filename);
    const double lam = parse_double(row[1], filename);
    if (g.ts.empty() || t > g.ts.back()) g.ts.push_back(t);
    if (g.ts.size() == 1) g.ls.push_back(lam);
    for (std::size_t k = 0; k < n_extra; ++k)
      g.extras[k].push_back(parse_double(row[2 + k], filename));
  }
  if (g.ts.size() * g.ls.size() != g.extras[0].size())
    throw ConfigError("rows do not form a rectangular grid in " + filename);
  return g;
}

}  // namespace

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string artifact_header(std::uint64_t config_hash, std::uint64_t seed) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

void write_path_csv(const std::string& filename, const ModelParams& params,
                    const PathRecord& path, const std::string& header) {
  auto out = open_out(filename);
  out << header << "\n";
  out << "time,kind,mark,lambda_after\n";
  for (std::size_t k = 0; k < path.jumps.size(); ++k) {
    const auto& j = path.jumps[k];
    const double lam_after = intensity_at(
        params, std::span(path.jumps.data(), k + 1), j.time);
    out << format_float(j.time) << ','
        << (j.kind == JumpKind::Claim ? "claim" : "external") << ','
        << format_float(j.mark) << ',' << format_float(lam_after) << "\n";
  }
}

void write_phi_csv(const std::string& filename, const PhiTable& table,
                   const std::string& header) {
  auto out = open_out(filename);
  out << header << "\n";
  out << "t,lambda,phi,stderr\n";
  const GridTable& phi = table.phi;
  for (std::size_t i = 0; i < phi.nt(); ++i)
    for (std::size_t j = 0; j < phi.nl(); ++j)
      out << format_float(phi.t_grid()[i]) << ','
          << format_float(phi.lambda_grid()[j]) << ','
          << format_float(phi.at(i, j)) << ','
          << format_float(table.stderr_.at(i, j)) << "\n";
}

PhiTable read_phi_csv(const std::string& filename) {
  const auto rows = read_rows(filename, "t,lambda,phi,stderr");
  const GridRows g = collect_grid(rows, 2, filename);
  PhiTable table;
  table.phi = GridTable(g.ts, g.ls);
  table.stderr_ = GridTable(g.ts, g.ls);
  std::copy(g.extras[0].begin(), g.extras[0].end(),
            table.phi.values().begin());
  std::copy(g.extras[1].begin(), g.extras[1].end(),
            table.stderr_.values().begin());
  return table;
}

void write_policy_csv(const std::string& filename, const PolicyTable& table,
                      const std::string& header) {
  auto out = open_out(filename);
  out << header << "\n";
  out << "t,lambda,u_star,region\n";
  const GridTable& u = table.u;
  for (std::size_t i = 0; i < u.nt(); ++i)
    for (std::size_t j = 0; j < u.nl(); ++j)
      out << format_float(u.t_grid()[i]) << ','
          << format_float(u.lambda_grid()[j]) << ','
          << format_float(u.at(i, j)) << ','
          << to_string(table.region_at(i, j)) << "\n";
}

PolicyTable read_policy_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open for reading: " + filename);
  std::string line;
  bool header_seen = false;
  std::vector<double> ts, ls, us;
  std::vector<FocRegion> regions;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "t,lambda,u_star,region")
        throw ConfigError("unexpected header in " + filename + ": " + line);
      header_seen = true;
      continue;
    }
    const auto row = split_csv(line);
    if (row.size() != 4) throw ConfigError("wrong column count in " + filename);
    const double t = parse_double(row[0], filename);
    const double lam = parse_double(row[1], filename);
    if (ts.empty() || t > ts.back()) ts.push_back(t);
    if (ts.size() == 1) ls.push_back(lam);
    us.push_back(parse_double(row[2], filename));
    regions.push_back(foc_region_from_string(row[3]));
  }
  if (!header_seen || ts.size() * ls.size() != us.size())
    throw ConfigError("rows do not form a rectangular grid in " + filename);
  PolicyTable table;
  table.u = GridTable(ts, ls);
  std::copy(us.begin(), us.end(), table.u.values().begin());
  table.regions = std::move(regions);
  return table;
}

void write_comparison_csv(const std::string& filename,
                          const ComparisonReport& report,
                          const std::string& header) {
  auto out = open_out(filename);
  out << header << "\n";
  out << "t,lambda,u_star,u_cox,violation\n";
  for (const auto& cell : report.cells)
    out << format_float(cell.t) << ',' << format_float(cell.lam) << ','
        << format_float(cell.u_star) << ',' << format_float(cell.u_cox) << ','
        << (cell.violation ? 1 : 0) << "\n";
}

void write_strana_csv(const std::string& filename, const StranaReport& report,
                      const std::string& header) {
  auto out = open_out(filename);
  out << header << "\n";
  out << "t,margin,pass\n";
  for (std::size_t i = 0; i < report.t_grid.size(); ++i)
    out << format_float(report.t_grid[i]) << ','
        << format_float(report.margins[i]) << ','
        << (report.margins[i] >= -report.tolerance ? 1 : 0) << "\n";
}

}  // namespace contagion
