#include "wsbo/runner/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wsbo/errors.hpp"

namespace wsbo {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'", 0);
  }
  return value;
}

void emit_results(const std::vector<GainCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw InvalidArgument("emit_results: no curves");
  std::vector<const GainCurve*> sorted;
  for (const auto& c : curves) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GainCurve* a, const GainCurve* b) { return a->algorithm < b->algorithm; });
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results to '" + path.string() + "'");
  out << "iteration,algorithm,mean_gain,se,n\n";
  for (const GainCurve* curve : sorted) {
    std::vector<GainPoint> points = curve->points;
    std::stable_sort(points.begin(), points.end(),
                     [](const GainPoint& a, const GainPoint& b) { return a.iteration < b.iteration; });
    for (const auto& p : points) {
      out << p.iteration << ',' << curve->algorithm << ',' << format_double(p.mean_gain) << ','
          << format_double(p.se) << ',' << p.n << '\n';
    }
  }
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

std::vector<GainCurve> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<GainCurve> curves;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "iteration,algorithm,mean_gain,se,n") throw ParseError("results: bad header", 1);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw ParseError("results line " + std::to_string(line_no) + ": expected 5 fields", line_no);
    auto [it, inserted] = index.emplace(fields[1], curves.size());
    if (inserted) curves.push_back({fields[1], {}});
    GainPoint p;
    p.iteration = std::stoi(fields[0]);
    p.mean_gain = parse_double(fields[2]);
    p.se = parse_double(fields[3]);
    p.n = std::stoi(fields[4]);
    curves[it->second].points.push_back(p);
  }
  return curves;
}

}  // namespace wsbo
