#include "tscatter/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "tscatter/errors.hpp"

namespace tscatter {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw Error("csv line " + std::to_string(line) + ": not a finite number: '" + s + "'");
  return v;
}

}  // namespace

Sample read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) header = split(line);
  }
  if (header.empty()) throw Error("csv: missing header row");
  std::optional<std::size_t> weight_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "weight") {
      if (weight_col) throw Error("csv: duplicate weight column");
      weight_col = c;
    }
  }
  const std::size_t dim = header.size() - (weight_col ? 1 : 0);
  if (dim == 0) throw Error("csv: no coordinate columns");

  std::vector<Vector> points;
  Vector weights;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw Error("csv line " + std::to_string(lineno) + ": expected " +
                  std::to_string(header.size()) + " fields");
    Vector x;
    x.reserve(dim);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], lineno);
      if (weight_col && c == *weight_col) weights.push_back(v);
      else x.push_back(v);
    }
    points.push_back(std::move(x));
  }
  if (points.empty()) throw Error("csv: no data rows");
  if (!weight_col) return Sample::uniform(std::move(points));

  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error("csv: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw Error("csv: weights sum to zero");
  if (std::abs(total - 1.0) > 1e-12)
    for (double& w : weights) w /= total;
  return Sample(std::move(points), std::move(weights));
}

Sample read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Sample& s) {
  char buf[32];
  for (std::size_t k = 0; k < s.dim(); ++k) out << 'x' << (k + 1) << ',';
  out << "weight\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (double v : s.point(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.weight(i));
    out << buf << '\n';
  }
}

}  // namespace tscatter
