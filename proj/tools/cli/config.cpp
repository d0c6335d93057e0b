#include "cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cli/format.hpp"
#include "phm/detail/overloaded.hpp"
#include "phm/errors.hpp"
#include "phm/table_io.hpp"

namespace phm::cli {
namespace {

namespace pt = boost::property_tree;
using detail::overloaded;

const std::map<std::string, std::set<std::string>> kSchema = {
    {"state_I", {"kind", "n", "alpha", "alpha_im", "xi", "xi_im", "amplitudes_re", "amplitudes_im", "amplitudes_file",
                 "n_max"}},
    {"state_II", {"kind", "n", "alpha", "alpha_im", "xi", "xi_im", "amplitudes_re", "amplitudes_im",
                  "amplitudes_file", "n_max"}},
    {"decay", {"kind", "tau_c", "gamma", "kappa_m", "kappa0", "kappa", "kernel_file", "table_file", "steps"}},
    {"grid", {"t_max", "n_points", "spacing", "n_max"}},
    {"metrics", {"metrics", "omega0"}},
    {"tolerances", {"eps_norm", "eps_tail", "eps_trace", "eps_psd", "eps_herm", "eps_eig", "bracket_width",
                    "residual", "tie"}},
};

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid config:";
  for (const auto& i : issues) out += "\n  " + (i.key.empty() ? std::string("<file>") : i.key) + ": " + i.message;
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& root, std::filesystem::path base_dir) : root_(root), base_dir_(std::move(base_dir)) {}

  std::vector<ConfigIssue> issues;
  std::map<std::string, std::string> files;

  void fail(const std::string& key, const std::string& message) { issues.push_back({key, message}); }

  bool has(const std::string& section, const std::string& key) const { return raw(section, key).has_value(); }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = root_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::optional<double> number(const std::string& section, const std::string& key, std::optional<double> fallback,
                               bool positive = false) {
    const auto text = raw(section, key);
    if (!text) {
      if (!fallback) fail(section + "." + key, "required key is missing");
      return fallback;
    }
    const auto v = parse_double(*text);
    if (!v || !std::isfinite(*v)) {
      fail(section + "." + key, "expected a number, got '" + *text + "'");
      return std::nullopt;
    }
    if (positive && !(*v > 0.0)) {
      fail(section + "." + key, "must be > 0, got " + *text);
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> integer(const std::string& section, const std::string& key, std::optional<int> fallback,
                             int minimum) {
    const auto text = raw(section, key);
    if (!text) {
      if (!fallback) fail(section + "." + key, "required key is missing");
      return fallback;
    }
    const auto v = parse_int(*text);
    if (!v) {
      fail(section + "." + key, "expected an integer, got '" + *text + "'");
      return std::nullopt;
    }
    if (*v < minimum) {
      fail(section + "." + key, "must be >= " + std::to_string(minimum) + ", got " + *text);
      return std::nullopt;
    }
    return v;
  }

  std::optional<ComplexTable> table(const std::string& section, const std::string& key) {
    const auto text = raw(section, key);
    if (!text) {
      fail(section + "." + key, "required key is missing");
      return std::nullopt;
    }
    std::filesystem::path p(*text);
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    p = p.lexically_normal();
    try {
      auto t = read_complex_table(p);
      files[section + "." + key] = std::filesystem::absolute(p).string();
      return t;
    } catch (const std::exception& e) {
      fail(section + "." + key, e.what());
      return std::nullopt;
    }
  }

  void check_unknown() {
    for (const auto& [name, sec] : root_) {
      const auto schema = kSchema.find(name);
      if (sec.data().size() > 0 && sec.empty()) {
        fail(name, "key outside of any section");
        continue;
      }
      if (schema == kSchema.end()) {
        fail(name, "unknown section");
        continue;
      }
      for (const auto& [key, value] : sec) {
        if (!schema->second.count(key)) fail(name + "." + key, "unknown key");
      }
    }
  }

 private:
  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

  const pt::ptree& root_;
  std::filesystem::path base_dir_;
};

std::optional<std::optional<int>> read_n_max(Reader& r, const std::string& section) {
  const auto text = r.raw(section, "n_max");
  if (!text) return std::nullopt;
  if (*text == "auto") return std::optional<int>{};
  const auto v = parse_int(*text);
  if (!v || *v < 0) {
    r.fail(section + ".n_max", "expected 'auto' or a non-negative integer, got '" + *text + "'");
    return std::nullopt;
  }
  return std::optional<int>{*v};
}

std::optional<StateKind> read_state_kind(Reader& r, const std::string& sec) {
  const auto kind = r.raw(sec, "kind");
  if (!kind) {
    r.fail(sec + ".kind", "required key is missing");
    return std::nullopt;
  }
  auto complex_param = [&](const char* re_key, const char* im_key) -> std::optional<Complex> {
    const auto re = r.number(sec, re_key, std::nullopt);
    const auto im = r.number(sec, im_key, 0.0);
    if (!re || !im) return std::nullopt;
    return Complex(*re, *im);
  };

  if (*kind == "fock") {
    const auto n = r.integer(sec, "n", std::nullopt, 0);
    if (!n) return std::nullopt;
    return Fock{*n};
  }
  if (*kind == "coherent" || *kind == "even_cat" || *kind == "odd_cat") {
    const auto alpha = complex_param("alpha", "alpha_im");
    if (!alpha) return std::nullopt;
    if (*kind == "coherent") return Coherent{*alpha};
    if (*kind == "even_cat") return EvenCat{*alpha};
    if (std::abs(*alpha) == 0.0) {
      r.fail(sec + ".alpha", "odd cat needs alpha != 0");
      return std::nullopt;
    }
    return OddCat{*alpha};
  }
  if (*kind == "squeezed_vacuum") {
    const auto xi = complex_param("xi", "xi_im");
    if (!xi) return std::nullopt;
    return SqueezedVacuum{*xi};
  }
  if (*kind == "custom") {
    std::vector<double> re, im;
    if (r.has(sec, "amplitudes_file")) {
      const auto t = r.table(sec, "amplitudes_file");
      if (!t) return std::nullopt;
      for (std::size_t i = 0; i < t->x.size(); ++i) {
        if (t->x[i] != static_cast<double>(i)) {
          r.fail(sec + ".amplitudes_file", "first column must list n = 0, 1, 2, ... in order");
          return std::nullopt;
        }
        re.push_back(t->y[i].real());
        im.push_back(t->y[i].imag());
      }
    } else {
      const auto re_text = r.raw(sec, "amplitudes_re");
      if (!re_text) {
        r.fail(sec + ".amplitudes_re", "custom state needs amplitudes_re or amplitudes_file");
        return std::nullopt;
      }
      for (const auto& tok : split_list(*re_text)) {
        const auto v = parse_double(tok);
        if (!v) {
          r.fail(sec + ".amplitudes_re", "cannot parse '" + tok + "'");
          return std::nullopt;
        }
        re.push_back(*v);
      }
      if (const auto im_text = r.raw(sec, "amplitudes_im")) {
        for (const auto& tok : split_list(*im_text)) {
          const auto v = parse_double(tok);
          if (!v) {
            r.fail(sec + ".amplitudes_im", "cannot parse '" + tok + "'");
            return std::nullopt;
          }
          im.push_back(*v);
        }
      }
      if (im.empty()) im.assign(re.size(), 0.0);
    }
    if (re.empty() || im.size() != re.size()) {
      r.fail(sec + ".amplitudes_re", "need a non-empty list, with amplitudes_im of the same length");
      return std::nullopt;
    }
    ComplexVector p(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) p(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
    return Custom{p};
  }
  r.fail(sec + ".kind",
         "unknown state kind '" + *kind + "' (expected fock, coherent, squeezed_vacuum, even_cat, odd_cat, custom)");
  return std::nullopt;
}

std::optional<DecaySpec> read_decay(Reader& r, int& steps) {
  const std::string sec = "decay";
  steps = r.integer(sec, "steps", 4096, 8).value_or(4096);
  const auto kind = r.raw(sec, "kind");
  if (!kind) {
    r.fail("decay.kind", "required key is missing");
    return std::nullopt;
  }
  if (*kind == "exponential" || *kind == "flat") {
    const auto tau = r.number(sec, "tau_c", 1.0, true);
    if (!tau) return std::nullopt;
    if (*kind == "exponential") return ExponentialLaw{*tau};
    return FlatKernel{*tau};
  }
  if (*kind == "lorentzian") {
    const auto gamma = r.number(sec, "gamma", std::nullopt, true);
    const auto kappa_m = r.number(sec, "kappa_m", std::nullopt, true);
    if (!gamma || !kappa_m) return std::nullopt;
    return LorentzianKernel{*gamma, *kappa_m};
  }
  if (*kind == "lattice") {
    const auto k0 = r.number(sec, "kappa0", std::nullopt, true);
    const auto k = r.number(sec, "kappa", std::nullopt, true);
    const auto table = r.table(sec, "kernel_file");
    if (!k0 || !k || !table) return std::nullopt;
    if (!(*k0 < *k)) {
      r.fail("decay.kappa0", "lattice rate formula requires kappa0 < kappa");
      return std::nullopt;
    }
    LatticeKernel lk{*k0, *k, *table};
    try {
      const auto check = check_lattice_kernel(lk);
      if (!check.ok) {
        r.fail("decay.kernel_file", "Markovian rate of the tabulated kernel (" + format_double(check.kernel_rate) +
                                        ") deviates from the lattice formula (" +
                                        format_double(check.expected_rate) + ") by more than 5%");
        return std::nullopt;
      }
    } catch (const std::exception& e) {
      r.fail("decay.kernel_file", e.what());
      return std::nullopt;
    }
    return lk;
  }
  if (*kind == "custom_kernel") {
    const auto table = r.table(sec, "kernel_file");
    if (!table) return std::nullopt;
    CustomKernel ck{*table};
    try {
      if (!(markovian_rate(ck) > 0.0)) {
        r.fail("decay.kernel_file", "kernel has non-positive Markovian rate 2 Re int G");
        return std::nullopt;
      }
    } catch (const std::exception& e) {
      r.fail("decay.kernel_file", e.what());
      return std::nullopt;
    }
    return ck;
  }
  if (*kind == "table") {
    const auto tau = r.number(sec, "tau_c", 1.0, true);
    const auto table = r.table(sec, "table_file");
    if (!tau || !table) return std::nullopt;
    try {
      decay_from_samples(table->x, table->y);
    } catch (const std::exception& e) {
      r.fail("decay.table_file", e.what());
      return std::nullopt;
    }
    return TabulatedLaw{*table, *tau};
  }
  r.fail("decay.kind", "unknown decay kind '" + *kind +
                           "' (expected exponential, flat, lorentzian, lattice, custom_kernel, table)");
  return std::nullopt;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ParsedConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({{"", "line " + std::to_string(e.line()) + ": " + e.message()}});
  }

  Reader r(root, base_dir);
  r.check_unknown();
  ParsedConfig parsed;
  ExperimentConfig& cfg = parsed.config;

  // Tolerances first: state construction depends on eps_tail.
  const std::string tol = "tolerances";
  if (auto v = r.number(tol, "eps_norm", cfg.tol.norm, true)) cfg.tol.norm = *v;
  if (auto v = r.number(tol, "eps_tail", cfg.tol.tail, true)) cfg.tol.tail = *v;
  if (auto v = r.number(tol, "eps_trace", cfg.tol.trace, true)) cfg.tol.trace = *v;
  if (auto v = r.number(tol, "eps_psd", cfg.tol.psd, true)) cfg.tol.psd = *v;
  if (auto v = r.number(tol, "eps_herm", cfg.tol.herm, true)) cfg.tol.herm = *v;
  if (auto v = r.number(tol, "eps_eig", cfg.tol.eig, true)) cfg.tol.eig = *v;
  if (auto v = r.number(tol, "bracket_width", cfg.crossing.bracket_width, true)) cfg.crossing.bracket_width = *v;
  if (auto v = r.number(tol, "residual", cfg.crossing.residual, true)) cfg.crossing.residual = *v;
  if (auto v = r.number(tol, "tie", cfg.crossing.tie, true)) cfg.crossing.tie = *v;

  if (auto v = r.number("grid", "t_max", 4.0, true)) cfg.grid.t_max = *v;
  if (auto v = r.integer("grid", "n_points", 400, 2)) cfg.grid.n_points = *v;
  if (const auto spacing = r.raw("grid", "spacing")) {
    if (*spacing == "linear")
      cfg.grid.spacing = Spacing::Linear;
    else if (*spacing == "log")
      cfg.grid.spacing = Spacing::Log;
    else
      r.fail("grid.spacing", "expected 'linear' or 'log', got '" + *spacing + "'");
  }
  if (cfg.grid.spacing == Spacing::Log && cfg.grid.n_points < 3) r.fail("grid.n_points", "log spacing needs >= 3");
  const auto grid_n_max = read_n_max(r, "grid").value_or(std::nullopt);

  for (const char* which : {"state_I", "state_II"}) {
    const std::string sec = which;
    StateSpec& spec = sec == "state_I" ? cfg.state_I : cfg.state_II;
    const auto kind = read_state_kind(r, sec);
    const auto own_n_max = read_n_max(r, sec);
    if (!kind) continue;
    spec.kind = *kind;
    spec.n_max = own_n_max.value_or(grid_n_max);
    const std::string n_max_key = own_n_max ? sec + ".n_max" : "grid.n_max";
    try {
      make_state(spec, cfg.tol);
    } catch (const TruncationError& e) {
      r.fail(n_max_key, e.what());
    } catch (const std::invalid_argument& e) {
      r.fail(sec, e.what());
    }
  }

  if (auto decay = read_decay(r, cfg.volterra_steps)) cfg.decay = *decay;

  if (const auto list = r.raw("metrics", "metrics")) {
    cfg.metrics.clear();
    for (const auto& tok : split_list(*list)) {
      if (tok == "both") {
        cfg.metrics.push_back(MetricKind::Trace);
        cfg.metrics.push_back(MetricKind::HilbertSchmidt);
        continue;
      }
      try {
        cfg.metrics.push_back(parse_metric(tok));
      } catch (const std::invalid_argument& e) {
        r.fail("metrics.metrics", e.what());
      }
    }
    if (cfg.metrics.empty()) r.fail("metrics.metrics", "no metric selected");
  }
  if (auto v = r.number("metrics", "omega0", 0.0)) cfg.omega0 = *v;

  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  parsed.files = std::move(r.files);
  return parsed;
}

ParsedConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"", "cannot open config file '" + path.string() + "'"}});
  return parse_config(in, path.parent_path());
}

std::string echo_config(const ParsedConfig& parsed) {
  const auto& cfg = parsed.config;
  std::ostringstream os;
  auto file_of = [&](const std::string& key) {
    const auto it = parsed.files.find(key);
    return it == parsed.files.end() ? std::string() : it->second;
  };

  for (const char* which : {"state_I", "state_II"}) {
    const std::string sec = which;
    const StateSpec& spec = sec == "state_I" ? cfg.state_I : cfg.state_II;
    os << "[" << sec << "]\n";
    std::visit(overloaded{
                   [&](const Fock& s) { os << "kind = fock\nn = " << s.n << "\n"; },
                   [&](const Coherent& s) {
                     os << "kind = coherent\nalpha = " << format_double(s.alpha.real())
                        << "\nalpha_im = " << format_double(s.alpha.imag()) << "\n";
                   },
                   [&](const EvenCat& s) {
                     os << "kind = even_cat\nalpha = " << format_double(s.alpha.real())
                        << "\nalpha_im = " << format_double(s.alpha.imag()) << "\n";
                   },
                   [&](const OddCat& s) {
                     os << "kind = odd_cat\nalpha = " << format_double(s.alpha.real())
                        << "\nalpha_im = " << format_double(s.alpha.imag()) << "\n";
                   },
                   [&](const SqueezedVacuum& s) {
                     os << "kind = squeezed_vacuum\nxi = " << format_double(s.xi.real())
                        << "\nxi_im = " << format_double(s.xi.imag()) << "\n";
                   },
                   [&](const Custom& s) {
                     os << "kind = custom\namplitudes_re =";
                     for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
                       os << " " << format_double(s.amplitudes(i).real());
                     os << "\namplitudes_im =";
                     for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
                       os << " " << format_double(s.amplitudes(i).imag());
                     os << "\n";
                   },
               },
               spec.kind);
    os << "n_max = " << (spec.n_max ? std::to_string(*spec.n_max) : std::string("auto")) << "\n\n";
  }

  os << "[decay]\n";
  std::visit(overloaded{
                 [&](const ExponentialLaw& d) { os << "kind = exponential\ntau_c = " << format_double(d.tau_c) << "\n"; },
                 [&](const FlatKernel& k) { os << "kind = flat\ntau_c = " << format_double(k.tau_c) << "\n"; },
                 [&](const LorentzianKernel& k) {
                   os << "kind = lorentzian\ngamma = " << format_double(k.gamma)
                      << "\nkappa_m = " << format_double(k.kappa_m) << "\n";
                 },
                 [&](const LatticeKernel& k) {
                   os << "kind = lattice\nkappa0 = " << format_double(k.kappa0) << "\nkappa = " << format_double(k.kappa)
                      << "\nkernel_file = " << file_of("decay.kernel_file") << "\n";
                 },
                 [&](const CustomKernel&) {
                   os << "kind = custom_kernel\nkernel_file = " << file_of("decay.kernel_file") << "\n";
                 },
                 [&](const TabulatedLaw& d) {
                   os << "kind = table\ntau_c = " << format_double(d.tau_c)
                      << "\ntable_file = " << file_of("decay.table_file") << "\n";
                 },
             },
             cfg.decay);
  os << "steps = " << cfg.volterra_steps << "\n\n";

  os << "[grid]\nt_max = " << format_double(cfg.grid.t_max) << "\nn_points = " << cfg.grid.n_points
     << "\nspacing = " << (cfg.grid.spacing == Spacing::Linear ? "linear" : "log") << "\n\n";

  os << "[metrics]\nmetrics =";
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i) os << (i ? ", " : " ") << to_string(cfg.metrics[i]);
  os << "\nomega0 = " << format_double(cfg.omega0) << "\n\n";

  os << "[tolerances]\neps_norm = " << format_double(cfg.tol.norm) << "\neps_tail = " << format_double(cfg.tol.tail)
     << "\neps_trace = " << format_double(cfg.tol.trace) << "\neps_psd = " << format_double(cfg.tol.psd)
     << "\neps_herm = " << format_double(cfg.tol.herm) << "\neps_eig = " << format_double(cfg.tol.eig)
     << "\nbracket_width = " << format_double(cfg.crossing.bracket_width)
     << "\nresidual = " << format_double(cfg.crossing.residual) << "\ntie = " << format_double(cfg.crossing.tie)
     << "\n";
  return os.str();
}

}  // namespace phm::cli
