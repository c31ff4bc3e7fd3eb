#include "wsbo/runner/history.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "wsbo/errors.hpp"
#include "wsbo/runner/results.hpp"

namespace wsbo {

int History::max_task() const {
  int m = 0;
  for (const auto& r : records) m = std::max(m, r.task);
  return m;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void parse_header(std::string_view line, std::size_t line_no, int& dim, int& m) {
  std::istringstream ss{std::string(line.substr(1))};
  std::string token;
  while (ss >> token) {
    if (token.rfind("d=", 0) == 0) dim = std::stoi(token.substr(2));
    else if (token.rfind("m=", 0) == 0) m = std::stoi(token.substr(2));
  }
  if (dim < 0) throw ParseError("history header on line " + std::to_string(line_no) + " lacks d=<dim>", line_no);
}

}  // namespace

History load_history(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("history file '" + path.string() + "' not found");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open history file '" + path.string() + "'");
  History history;
  int dim = -1;
  int header_m = -1;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": " + why, line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      if (line.find("d=") != std::string::npos) parse_header(line, line_no, dim, header_m);
      continue;
    }
    const auto fields = split(line, ',');
    if (dim < 0) dim = static_cast<int>(fields.size()) - 3;
    if (dim < 1 || fields.size() != static_cast<std::size_t>(dim) + 3) {
      fail("expected " + std::to_string(std::max(dim, 1) + 3) + " fields (task, x_1..x_d, y, noise_var), got " +
           std::to_string(fields.size()));
    }
    Observation obs;
    try {
      const double task = parse_double(fields[0]);
      if (task != std::floor(task) || task < 0) fail("task id must be a nonnegative integer");
      obs.task = static_cast<int>(task);
      obs.point.resize(dim);
      for (int i = 0; i < dim; ++i) obs.point[i] = parse_double(fields[static_cast<std::size_t>(i) + 1]);
      obs.value = parse_double(fields[static_cast<std::size_t>(dim) + 1]);
      obs.noise_var = parse_double(fields[static_cast<std::size_t>(dim) + 2]);
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      fail(e.what());
    }
    if (!(obs.noise_var >= 0.0)) fail("noise variance must be nonnegative");
    history.records.push_back(std::move(obs));
  }
  history.dim = std::max(dim, 0);
  if (header_m >= 0 && !history.records.empty() && header_m != history.max_task()) {
    throw ParseError(path.string() + ": header says m=" + std::to_string(header_m) + " but the largest task id is " +
                         std::to_string(history.max_task()),
                     1);
  }
  return history;
}

void save_history(const History& history, const std::filesystem::path& path) {
  for (const auto& r : history.records) {
    if (r.point.size() != history.dim) throw InvalidArgument("save_history: record dimension mismatch");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file '" + path.string() + "'");
  out << "# d=" << history.dim << " m=" << history.max_task() << '\n';
  for (const auto& r : history.records) {
    out << r.task;
    for (Eigen::Index i = 0; i < r.point.size(); ++i) out << ',' << format_double(r.point[i]);
    out << ',' << format_double(r.value) << ',' << format_double(r.noise_var) << '\n';
  }
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

History merge_histories(const std::vector<History>& histories) {
  History merged;
  std::map<std::pair<std::size_t, int>, int> renumber;
  for (std::size_t f = 0; f < histories.size(); ++f) {
    const History& h = histories[f];
    if (h.empty()) continue;
    if (merged.dim == 0) merged.dim = h.dim;
    if (h.dim != merged.dim) throw InvalidArgument("histories have different dimensions");
    for (auto r : h.records) {
      auto [it, inserted] = renumber.emplace(std::make_pair(f, r.task), static_cast<int>(renumber.size()) + 1);
      r.task = it->second;
      merged.records.push_back(std::move(r));
    }
  }
  return merged;
}

History history_from_run(const std::vector<Observation>& observations, int dim, int task) {
  History h;
  h.dim = dim;
  for (auto obs : observations) {
    obs.task = task;
    h.records.push_back(std::move(obs));
  }
  return h;
}

}  // namespace wsbo
