#include "wsbo/runner/hyperparams_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "wsbo/errors.hpp"
#include "wsbo/runner/results.hpp"

namespace wsbo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

void write_kernel(std::ostream& out, const std::string& prefix, const KernelParams& k) {
  out << prefix << ".family = " << to_string(k.family) << '\n';
  out << prefix << ".amplitude = " << format_double(k.amplitude) << '\n';
  out << prefix << ".length_scales = " << join(k.length_scales) << '\n';
}

}  // namespace

void save_hyperparams(const JointHyperParams& hp, const std::filesystem::path& path) {
  hp.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write hyperparameter file '" + path.string() + "'");
  out << "mean_const = " << format_double(hp.mean_const) << '\n';
  write_kernel(out, "base", hp.base);
  out << "num_deltas = " << hp.num_tasks() << '\n';
  for (int l = 1; l <= hp.num_tasks(); ++l) {
    write_kernel(out, "delta." + std::to_string(l), hp.deltas[static_cast<std::size_t>(l - 1)]);
  }
}

JointHyperParams load_hyperparams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hyperparameter file '" + path.string() + "'");
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected 'name = value'", line_no);
    }
    entries[trim(t.substr(0, eq))] = {trim(t.substr(eq + 1)), line_no};
  }
  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ParseError(path.string() + ": missing key '" + key + "'", 0);
    return it->second;
  };
  auto number = [&](const std::string& key) {
    const auto& [text, ln] = get(key);
    try {
      return parse_double(text);
    } catch (const ParseError&) {
      throw ParseError(path.string() + ": line " + std::to_string(ln) + ": bad number for '" + key + "'", ln);
    }
  };
  auto kernel = [&](const std::string& prefix) {
    KernelParams k;
    k.family = kernel_family_from_string(get(prefix + ".family").first);
    k.amplitude = number(prefix + ".amplitude");
    const auto& [text, ln] = get(prefix + ".length_scales");
    std::vector<double> scales;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        scales.push_back(parse_double(field));
      } catch (const ParseError&) {
        throw ParseError(path.string() + ": line " + std::to_string(ln) + ": bad length scale", ln);
      }
    }
    k.length_scales = Eigen::Map<Eigen::VectorXd>(scales.data(), static_cast<Eigen::Index>(scales.size()));
    return k;
  };
  JointHyperParams hp;
  hp.mean_const = number("mean_const");
  hp.base = kernel("base");
  const int m = entries.count("num_deltas") ? static_cast<int>(number("num_deltas")) : 0;
  for (int l = 1; l <= m; ++l) hp.deltas.push_back(kernel("delta." + std::to_string(l)));
  hp.validate();
  return hp;
}

}  // namespace wsbo
