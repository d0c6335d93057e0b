#include "cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/format.hpp"
#include "cli/svg_plot.hpp"
#include "phm/errors.hpp"
#include "phm/evolution.hpp"
#include "phm/mpemba.hpp"
#include "phm/table_io.hpp"

namespace phm::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files are collected in memory and written in insertion order once every
// computation has succeeded.
class OutputSet {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  std::vector<std::filesystem::path> paths(const std::filesystem::path& dir) const {
    std::vector<std::filesystem::path> out;
    for (const auto& f : files_) out.push_back(dir / f.first);
    return out;
  }

  void write(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, content] : files_) {
      std::ofstream f(dir / name, std::ios::binary);
      f << content;
      if (!f) throw UsageError("cannot write '" + (dir / name).string() + "'");
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string decay_label(const DecaySpec& spec) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) return "exponential";
        if constexpr (std::is_same_v<T, FlatKernel>) return "flat";
        if constexpr (std::is_same_v<T, LorentzianKernel>) return "lorentzian";
        if constexpr (std::is_same_v<T, LatticeKernel>) return "lattice";
        if constexpr (std::is_same_v<T, CustomKernel>) return "custom_kernel";
        return "table";
      },
      spec);
}

std::string distances_csv(const ComparisonRun& run) {
  std::string s = "t_over_tauc,state,metric,distance\n";
  for (const auto& mc : run.comparisons) {
    for (const auto* series : {&mc.first, &mc.second}) {
      for (std::size_t i = 0; i < series->times.size(); ++i) {
        s += format_double(series->times[i]) + "," + series->state + "," + to_string(mc.metric) + "," +
             format_double(series->values[i]) + "\n";
      }
    }
  }
  return s;
}

std::string crossings_text(const ParsedConfig& parsed, const ExperimentResult& result) {
  const auto& cfg = parsed.config;
  std::ostringstream os;
  os << "state I:  " << describe(cfg.state_I.kind) << " (n_max " << result.run.state_I.n_max() << ")\n";
  os << "state II: " << describe(cfg.state_II.kind) << " (n_max " << result.run.state_II.n_max() << ")\n";
  os << "decay:    " << decay_label(cfg.decay) << ", tau_c = " << format_double(result.run.tau_c) << "\n";
  for (const auto& w : result.run.warnings) os << "warning: " << w << "\n";
  for (const auto& r : result.reports) {
    os << "\n[" << to_string(r.metric) << "] verdict " << to_string(r.verdict) << ", D_I(0) = "
       << format_double(r.start_I) << ", D_II(0) = " << format_double(r.start_II) << (r.swapped ? ", swapped" : "")
       << "\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    os << "# metric, t_cross, t_lo, t_hi, residual, abs_A2\n";
    for (const auto& c : r.crossings) {
      os << to_string(r.metric) << ", " << format_double(c.t_cross) << ", " << format_double(c.t_lo) << ", "
         << format_double(c.t_hi) << ", " << format_double(c.residual) << ", " << format_double(c.survival) << "\n";
    }
  }
  return os.str();
}

json report_json(const CrossingReport& r) {
  json crossings = json::array();
  for (const auto& c : r.crossings) {
    crossings.push_back({{"t_cross", c.t_cross},
                         {"t_lo", c.t_lo},
                         {"t_hi", c.t_hi},
                         {"grid_lo", c.grid_lo},
                         {"grid_hi", c.grid_hi},
                         {"residual", c.residual},
                         {"abs_A2", std::isfinite(c.survival) ? json(c.survival) : json(nullptr)}});
  }
  return {{"metric", to_string(r.metric)}, {"verdict", to_string(r.verdict)}, {"swapped", r.swapped},
          {"start_I", r.start_I},          {"start_II", r.start_II},          {"crossings", crossings},
          {"warnings", r.warnings}};
}

std::string plot_svg(const MetricComparison& mc, const CrossingReport& report, const std::string& label_I,
                     const std::string& label_II) {
  PlotSpec spec;
  spec.title = (mc.metric == MetricKind::Trace ? "Trace distance" : "Hilbert-Schmidt distance") +
               std::string(" to the vacuum");
  spec.x_label = "t / tau_c";
  spec.y_label = mc.metric == MetricKind::Trace ? "D_T" : "D_HS";
  spec.curves.push_back({"I: " + label_I, "#c0392b", mc.first.times, mc.first.values});
  spec.curves.push_back({"II: " + label_II, "#2471a3", mc.second.times, mc.second.values});
  for (const auto& c : report.crossings) spec.markers.push_back(c.t_cross);
  return render_svg(spec);
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error [" << e.module() << "]: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  }
}

}  // namespace

std::filesystem::path default_out_dir() {
  const char* env = std::getenv("PHM_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("out");
}

int cmd_compare(const std::filesystem::path& config, const OutputOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ParsedConfig parsed = parse_config_file(config);
    const ExperimentResult result = run_experiment(parsed.config);
    const auto& run = result.run;
    const std::string label_I = describe(parsed.config.state_I.kind);
    const std::string label_II = describe(parsed.config.state_II.kind);

    OutputSet files;
    files.add("distances.csv", distances_csv(run));
    const std::string text = crossings_text(parsed, result);
    files.add("crossings.txt", text);
    json reports = json::array();
    for (const auto& r : result.reports) reports.push_back(report_json(r));
    files.add("crossings.json", reports.dump(2) + "\n");
    if (opts.plot) {
      for (std::size_t i = 0; i < run.comparisons.size(); ++i) {
        files.add("plot_" + to_string(run.comparisons[i].metric) + ".svg",
                  plot_svg(run.comparisons[i], result.reports[i], label_I, label_II));
      }
    }

    const auto& cfg = parsed.config;
    json manifest = {
        {"tool", "phmpemba"},
        {"version", kToolVersion},
        {"config_file", std::filesystem::absolute(config).lexically_normal().string()},
        {"config", echo_config(parsed)},
        {"states",
         {{"I", {{"label", label_I}, {"n_max", run.state_I.n_max()}}},
          {"II", {{"label", label_II}, {"n_max", run.state_II.n_max()}}}}},
        {"decay", {{"kind", decay_label(cfg.decay)}, {"tau_c", run.tau_c}, {"volterra_steps", cfg.volterra_steps}}},
        {"tolerances",
         {{"eps_norm", cfg.tol.norm},
          {"eps_tail", cfg.tol.tail},
          {"eps_trace", cfg.tol.trace},
          {"eps_psd", cfg.tol.psd},
          {"eps_herm", cfg.tol.herm},
          {"eps_eig", cfg.tol.eig},
          {"bracket_width", cfg.crossing.bracket_width},
          {"residual", cfg.crossing.residual},
          {"tie", cfg.crossing.tie}}},
        {"grid",
         {{"t_max", cfg.grid.t_max},
          {"n_points", cfg.grid.n_points},
          {"spacing", cfg.grid.spacing == Spacing::Linear ? "linear" : "log"}}},
        {"warnings", run.warnings},
        {"reports", reports},
    };
    json outputs = json::array();
    for (const auto& p : files.paths(opts.out_dir)) outputs.push_back(p.string());
    outputs.push_back((opts.out_dir / "manifest.json").string());
    manifest["outputs"] = outputs;
    files.add("manifest.json", manifest.dump(2) + "\n");

    files.write(opts.out_dir);
    out << text;
    return static_cast<int>(kOk);
  });
}

int cmd_snapshot(const std::filesystem::path& config, const std::vector<double>& times, const OutputOptions& opts,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ParsedConfig parsed = parse_config_file(config);
    const auto& cfg = parsed.config;
    if (times.empty()) throw UsageError("snapshot: --times needs at least one value");
    for (double t : times) {
      if (!std::isfinite(t) || t < 0.0 || t > cfg.grid.t_max) {
        throw UsageError("snapshot: time " + format_double(t) + " is outside the grid [0, " +
                         format_double(cfg.grid.t_max) + "]");
      }
    }
    const PhotonAmplitudes state_I = make_state(cfg.state_I, cfg.tol);
    const PhotonAmplitudes state_II = make_state(cfg.state_II, cfg.tol);
    const double tau_c = decay_time_unit(cfg.decay);
    const DecayLaw decay = build_decay_law(cfg.decay, cfg.grid.t_max * tau_c, cfg.volterra_steps);

    OutputSet files;
    for (const auto& [name, state] : {std::pair{"I", &state_I}, std::pair{"II", &state_II}}) {
      for (double t : times) {
        const DensityMatrix rho(
            reduced_density_general(*state, decay(t * tau_c), cfg.omega0 * t * tau_c, std::nullopt, cfg.tol));
        const auto report = validate_density(rho, cfg.tol);
        if (!report.ok()) {
          throw NumericError("evolution", "density matrix of state " + std::string(name) + " at t/tau_c = " +
                                              format_double(t) + " failed validation");
        }
        std::string csv = "n,m,abs_rho\n";
        for (Eigen::Index n = 0; n < rho.dim(); ++n)
          for (Eigen::Index m = 0; m < rho.dim(); ++m)
            csv += std::to_string(n) + "," + std::to_string(m) + "," + format_double(std::abs(rho(n, m))) + "\n";
        files.add("snapshot_" + std::string(name) + "_t" + format_double(t) + ".csv", std::move(csv));
      }
    }
    files.write(opts.out_dir);
    for (const auto& p : files.paths(opts.out_dir)) out << p.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_decay(const DecayArgs& args, const OutputOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto need = [](const std::optional<double>& v, const char* flag) {
      if (!v) throw UsageError(std::string("decay: ") + flag + " is required for this kernel");
      if (!(*v > 0.0) || !std::isfinite(*v)) throw UsageError(std::string("decay: ") + flag + " must be > 0");
      return *v;
    };
    auto table = [&]() {
      if (!args.kernel_file) throw UsageError("decay: --kernel-file is required for this kernel");
      try {
        return read_complex_table(*args.kernel_file);
      } catch (const std::exception& e) {
        throw UsageError(std::string("decay: --kernel-file: ") + e.what());
      }
    };
    if (!(args.t_max > 0.0) || !std::isfinite(args.t_max)) throw UsageError("decay: --tmax must be > 0");
    if (args.points < 2) throw UsageError("decay: --points must be >= 2");

    const auto grid = uniform_grid(args.t_max, args.points - 1);
    DecayLaw law;
    if (args.kernel == "exponential") {
      law = exponential_decay(args.tau_c ? need(args.tau_c, "--tau-c") : 1.0);
    } else {
      KernelSpec kernel;
      if (args.kernel == "flat") {
        kernel = FlatKernel{args.tau_c ? need(args.tau_c, "--tau-c") : 1.0};
      } else if (args.kernel == "lorentzian") {
        kernel = LorentzianKernel{need(args.gamma, "--gamma"), need(args.kappa_m, "--kappa-m")};
      } else if (args.kernel == "lattice") {
        LatticeKernel lk{need(args.kappa0, "--kappa0"), need(args.kappa, "--kappa"), table()};
        if (!(lk.kappa0 < lk.kappa)) throw UsageError("decay: --kappa0 must be smaller than --kappa");
        const auto check = check_lattice_kernel(lk);
        if (!check.ok) {
          throw UsageError("decay: --kernel-file: Markovian rate " + format_double(check.kernel_rate) +
                           " deviates from the lattice formula " + format_double(check.expected_rate));
        }
        kernel = lk;
      } else if (args.kernel == "custom") {
        kernel = CustomKernel{table()};
      } else {
        throw UsageError("decay: unknown kernel '" + args.kernel +
                         "' (expected exponential, flat, lorentzian, lattice, custom)");
      }
      try {
        check_kernel(kernel);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("decay: ") + e.what());
      }
      VolterraOptions vo;
      vo.check_order = args.order_check;
      law = solve_volterra(kernel, grid, vo);
    }

    std::string csv = "t,re_A,im_A,abs_A2\n";
    for (double t : grid) {
      const Complex a = law(t);
      csv += format_double(t) + "," + format_double(a.real()) + "," + format_double(a.imag()) + "," +
             format_double(std::norm(a)) + "\n";
    }
    OutputSet files;
    files.add("decay.csv", std::move(csv));
    files.write(opts.out_dir);
    out << (opts.out_dir / "decay.csv").string() << "\n";
    return static_cast<int>(kOk);
  });
}

}  // namespace phm::cli
