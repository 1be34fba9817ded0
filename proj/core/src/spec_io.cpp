#include "rapidtail/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "rapidtail/errors.hpp"

namespace rapidtail {
namespace {

std::string num(double v) {
  std::string s = fmt::format("{:.17g}", v);
  // Keep integral values floats in TOML.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

double as_double(const toml::node& n, std::string_view key) {
  if (auto v = n.value<double>()) return *v;  // integers convert too
  throw InvalidSpec(fmt::format("'{}' must hold numbers", key));
}

std::vector<double> number_list(const toml::node& n, std::string_view key) {
  const auto* arr = n.as_array();
  if (!arr) throw InvalidSpec(fmt::format("'{}' must be an array of numbers", key));
  std::vector<double> out;
  for (const auto& e : *arr) out.push_back(as_double(e, key));
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const toml::node& require(const toml::table& t, std::string_view key) {
  const auto* n = t.get(key);
  if (!n) throw InvalidSpec(fmt::format("missing key '{}'", key));
  return *n;
}

}  // namespace

std::string serialize_spec(const SkewEllipticalSpec& spec) {
  if (!spec.is_normal())
    throw InvalidSpec("only the builtin normal generator has a serialized form");
  std::string s;
  s += "mu = " + vec(spec.mu()) + "\n";
  s += "sigma = [";
  for (Eigen::Index i = 0; i < spec.sigma().rows(); ++i)
    s += (i ? ", " : "") + vec(spec.sigma().row(i).transpose());
  s += "]\n";
  s += "delta = " + vec(spec.delta()) + "\n";
  s += "generator = \"normal\"\n";
  return s;
}

ConfigDocument parse_config(std::string_view text) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw InvalidSpec(fmt::format("config is not valid TOML: {} (line {})", e.description(),
                                  e.source().begin.line));
  }

  const auto mu = number_list(require(doc, "mu"), "mu");
  const auto delta = number_list(require(doc, "delta"), "delta");
  const auto* rows = require(doc, "sigma").as_array();
  if (!rows) throw InvalidSpec("'sigma' must be an array of rows");
  const auto d = static_cast<Eigen::Index>(mu.size());
  if (d == 0) throw InvalidSpec("'mu' is empty");
  if (static_cast<Eigen::Index>(rows->size()) != d)
    throw InvalidSpec(fmt::format("'sigma' has {} rows, expected {}", rows->size(), d));
  Eigen::MatrixXd sigma(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto row = number_list(*rows->get(static_cast<std::size_t>(i)), "sigma");
    if (static_cast<Eigen::Index>(row.size()) != d)
      throw InvalidSpec(fmt::format("'sigma' row {} has {} entries, expected {}", i, row.size(), d));
    for (Eigen::Index j = 0; j < d; ++j) sigma(i, j) = row[static_cast<std::size_t>(j)];
  }
  const std::string gen = doc["generator"].value_or(std::string("normal"));
  if (gen != "normal") throw InvalidSpec(fmt::format("unknown generator '{}'", gen));

  auto spec = build_spec(to_vector(mu), sigma, to_vector(delta),
                         make_normal_generator(static_cast<int>(d) + 1));

  RunSettings run;
  if (const auto* node = doc.get("run")) {
    const auto* t = node->as_table();
    if (!t) throw InvalidSpec("'run' must be a table");
    for (const auto& [key, value] : *t) {
      const std::string_view k = key.str();
      if (k == "t_grid") run.t_grid = number_list(value, k);
      else if (k == "u_grid") run.u_grid = number_list(value, k);
      else if (k == "w") run.w = number_list(value, k);
      else if (k == "x") run.x = number_list(value, k);
      else if (k == "threshold") run.threshold = as_double(value, k);
      else if (k == "seed") {
        const auto v = value.value<std::int64_t>();
        if (!v || *v < 0) throw InvalidSpec("'seed' must be a nonnegative integer");
        run.seed = static_cast<std::uint64_t>(*v);
      } else if (k == "out") {
        const auto v = value.value<std::string>();
        if (!v) throw InvalidSpec("'out' must be a string");
        run.out = *v;
      } else {
        throw InvalidSpec(fmt::format("unknown key 'run.{}'", k));
      }
    }
  }
  return {std::move(spec), std::move(run)};
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rapidtail
