#pragma once
// Experiment configuration: flat `section.key = value` text with `#`
// comments.  Parsing is strict (unknown keys are errors) and serialization is
// canonical, so parse(serialize(c)) serializes to identical bytes.

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace nhtrap {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // model
  double x_abs = 2.0;
  double width = 1.0;
  double strength = 10.0;
  double O_radius = 0.75;
  double energy_width = 0.5;
  // grid
  double x_min = -8.0;
  double x_max = 8.0;
  double xi_max = 4.0;
  long min_points = 512;
  long n_cap = 4096;
  // cutoffs
  double kappa = 0.05;
  double R = 0.25;
  double F = 1.0;
  double psi_width = 0.5;
  // trapped-set scan
  double energy_window = 1.0;
  double t_max = 6.0;
  double flow_dt = 0.01;
  double escape_x = 2.0;
  // sweeps
  std::vector<double> h_list = {0.1, 0.0707, 0.05, 0.0354, 0.025, 0.0177, 0.0125};
  std::vector<double> operator_h_list = {0.2, 0.1, 0.05};
  std::vector<double> norms_h_list = {0.2, 0.1, 0.05, 0.025};
  double operator_tol = 1.0;     // pass bound for ||D||/h
  double c_lower_min = 0.3;
  // resolvent
  double z_re = 0.0;
  double im_z_coeff = 0.0;       // Im z = im_z_coeff * h^2
  double im_z_bound = 1.0;       // admissible |Im z| <= im_z_bound * h^2
  double norm_tol = 1e-8;
  long max_iter = 400;
  long samples = 32;
  long seed = 12345;
  // bsymbols
  double b_m = 2.0;
  double b_c_d_sq = 2.0;
  double b_c_plus_sq = 2.0;
  double b_c_minus_sq = 2.0;
  double b_beta_plus = 0.5;
  double b_nu_plus = 0.3;
  double b_nu_minus = 0.3;
  double b_alpha_t = 0.2;
  double b_alpha_t1 = 0.1;
  double b_alpha_d1 = 0.0;
  double b_p1 = 0.0;
  double b_s = 1.0;
  double b_kappa = 0.05;
  double b_R = 0.25;
  double b_F = 1.0;
  double b_M = 2.0;
  double b_psi_width = 0.5;
  long b_nodes = 9;
  // output
  std::string out_dir = "out";
  bool wall_time = false;        // wall-clock columns are nondeterministic
};

namespace detail {

using ConfigSlot = std::variant<double ExperimentConfig::*, long ExperimentConfig::*,
                                bool ExperimentConfig::*, std::vector<double> ExperimentConfig::*,
                                std::string ExperimentConfig::*>;

struct ConfigEntry {
  std::string_view key;
  ConfigSlot slot;
};

inline const std::vector<ConfigEntry>& config_table() {
  using C = ExperimentConfig;
  static const std::vector<ConfigEntry> table = {
      {"model.x_abs", &C::x_abs},
      {"model.width", &C::width},
      {"model.strength", &C::strength},
      {"model.O_radius", &C::O_radius},
      {"model.energy_width", &C::energy_width},
      {"grid.x_min", &C::x_min},
      {"grid.x_max", &C::x_max},
      {"grid.xi_max", &C::xi_max},
      {"grid.min_points", &C::min_points},
      {"grid.n_cap", &C::n_cap},
      {"cutoffs.kappa", &C::kappa},
      {"cutoffs.R", &C::R},
      {"cutoffs.F", &C::F},
      {"cutoffs.psi_width", &C::psi_width},
      {"trapped.energy_window", &C::energy_window},
      {"trapped.t_max", &C::t_max},
      {"trapped.dt", &C::flow_dt},
      {"trapped.escape_x", &C::escape_x},
      {"sweep.h_list", &C::h_list},
      {"operators.h_list", &C::operator_h_list},
      {"operators.tol", &C::operator_tol},
      {"norms.h_list", &C::norms_h_list},
      {"norms.c_lower_min", &C::c_lower_min},
      {"resolvent.z_re", &C::z_re},
      {"resolvent.im_z_coeff", &C::im_z_coeff},
      {"resolvent.im_z_bound", &C::im_z_bound},
      {"resolvent.tol", &C::norm_tol},
      {"resolvent.max_iter", &C::max_iter},
      {"resolvent.samples", &C::samples},
      {"seeds.seed", &C::seed},
      {"bsymbols.m", &C::b_m},
      {"bsymbols.c_d_sq", &C::b_c_d_sq},
      {"bsymbols.c_plus_sq", &C::b_c_plus_sq},
      {"bsymbols.c_minus_sq", &C::b_c_minus_sq},
      {"bsymbols.beta_plus", &C::b_beta_plus},
      {"bsymbols.nu_plus", &C::b_nu_plus},
      {"bsymbols.nu_minus", &C::b_nu_minus},
      {"bsymbols.alpha_t", &C::b_alpha_t},
      {"bsymbols.alpha_t1", &C::b_alpha_t1},
      {"bsymbols.alpha_d1", &C::b_alpha_d1},
      {"bsymbols.p1", &C::b_p1},
      {"bsymbols.s", &C::b_s},
      {"bsymbols.kappa", &C::b_kappa},
      {"bsymbols.R", &C::b_R},
      {"bsymbols.F", &C::b_F},
      {"bsymbols.M", &C::b_M},
      {"bsymbols.psi_width", &C::b_psi_width},
      {"bsymbols.nodes", &C::b_nodes},
      {"output.dir", &C::out_dir},
      {"output.wall_time", &C::wall_time},
  };
  return table;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(where + ": expected an integer, got '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), where));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

}  // namespace detail

inline void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                             const std::string& where) {
  for (const auto& entry : detail::config_table()) {
    if (entry.key != key) continue;
    std::visit(
        [&](auto member) {
          using M = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<M, double>) {
            cfg.*member = detail::parse_double(value, where);
          } else if constexpr (std::is_same_v<M, long>) {
            cfg.*member = detail::parse_long(value, where);
          } else if constexpr (std::is_same_v<M, bool>) {
            if (value == "true") cfg.*member = true;
            else if (value == "false") cfg.*member = false;
            else throw ConfigError(where + ": expected true or false, got '" + value + "'");
          } else if constexpr (std::is_same_v<M, std::string>) {
            if (value.empty() || value.find_first_of(" \t#") != std::string::npos)
              throw ConfigError(where + ": expected a non-empty value without spaces or '#'");
            cfg.*member = value;
          } else {
            cfg.*member = detail::parse_list(value, where);
          }
        },
        entry.slot);
    return;
  }
  throw ConfigError(where + ": unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config") {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'section.key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.find('.') == std::string::npos)
      throw ConfigError(where + ": key '" + key + "' lacks a section");
    set_config_value(cfg, key, value, where + " (key '" + key + "')");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& entry : detail::config_table()) {
    os << entry.key << " = ";
    std::visit(
        [&](auto member) {
          const auto& v = cfg.*member;
          using M = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<M, double>) {
            os << detail::format_double(v);
          } else if constexpr (std::is_same_v<M, long>) {
            os << v;
          } else if constexpr (std::is_same_v<M, bool>) {
            os << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<M, std::string>) {
            os << v;
          } else {
            for (std::size_t i = 0; i < v.size(); ++i)
              os << (i ? ", " : "") << detail::format_double(v[i]);
          }
        },
        entry.slot);
    os << '\n';
  }
  return os.str();
}

/// Hex SHA-256 of the canonical serialization, ignoring where outputs go.
inline std::string config_hash(ExperimentConfig cfg) {
  cfg.out_dir.clear();
  const std::string text = serialize_config(cfg);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("config_hash: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace nhtrap
