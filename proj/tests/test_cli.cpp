#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/svg_plot.hpp"
#include "phm/decay.hpp"

using namespace phm;
using namespace phm::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(PHM_SOURCE_DIR) / "configs";

fs::path scratch_dir(const std::string& name) {
  static const auto root = [] {
    std::random_device rd;
    auto p = fs::temp_directory_path() / ("phm_cli_test_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
  }();
  const auto p = root / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

ParsedConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, kConfigs);
}

}  // namespace

TEST_CASE("presets round-trip through the echoed config") {
  for (const char* name : {"fig2.ini", "fig3.ini", "fig4.ini"}) {
    const auto parsed = parse_config_file(kConfigs / name);
    const auto again = parse_text(echo_config(parsed));
    CHECK(again.config == parsed.config);
    CHECK(echo_config(again) == echo_config(parsed));
  }
  const auto fig4 = parse_config_file(kConfigs / "fig4.ini");
  CHECK_FALSE(fig4.config.state_II.n_max.has_value());
}

TEST_CASE("custom states, tables and tolerances round-trip") {
  const auto dir = scratch_dir("tables");
  fs::create_directories(dir);
  {
    std::ofstream k(dir / "kernel.txt");
    k << "# tau re im\n";
    for (int i = 0; i <= 2000; ++i) {
      const double t = 0.005 * i;
      k << t << " " << 0.5 * 4.0 * std::exp(-4.0 * t) << " 0\n";
    }
  }
  const auto parsed = parse_text(
      "[state_I]\nkind = custom\namplitudes_re = 0.6 0 0\namplitudes_im = 0 0 0.8\n"
      "[state_II]\nkind = odd_cat\nalpha = 0.5\nalpha_im = -0.25\nn_max = 30\n"
      "[decay]\nkind = custom_kernel\nkernel_file = " +
      (dir / "kernel.txt").string() +
      "\nsteps = 512\n[grid]\nt_max = 2\nn_points = 50\nspacing = log\n[metrics]\nmetrics = hs\nomega0 = 1.5\n"
      "[tolerances]\neps_tail = 1e-10\nbracket_width = 1e-5\n");
  CHECK(parsed.config.tol.tail == 1e-10);
  CHECK(parsed.config.crossing.bracket_width == 1e-5);
  CHECK(parsed.files.count("decay.kernel_file") == 1);
  const auto again = parse_text(echo_config(parsed));
  CHECK(again.config == parsed.config);
}

TEST_CASE("schema violations are listed with key paths") {
  auto issues_of = [](const std::string& text) {
    try {
      parse_text(text);
    } catch (const ConfigError& e) {
      std::vector<std::string> keys;
      for (const auto& i : e.issues()) keys.push_back(i.key);
      return keys;
    }
    return std::vector<std::string>{};
  };
  const std::string states = "[state_I]\nkind = fock\nn = 1\n[state_II]\nkind = coherent\nalpha = 1\n";
  auto keys = issues_of(states + "[decay]\nkind = exponential\ntau_c = -1\n");
  CHECK(keys == std::vector<std::string>{"decay.tau_c"});
  keys = issues_of(states + "[decay]\nkind = exponential\n[grid]\nn_points = two\ncolour = red\n[extra]\na = 1\n");
  CHECK(keys.size() == 3);
  keys = issues_of("[state_I]\nkind = squeezed_vacuum\nxi = 1\nn_max = 40\n[state_II]\nkind = coherent\nalpha = 1\n"
                   "[decay]\nkind = exponential\n");
  CHECK(keys == std::vector<std::string>{"state_I.n_max"});
  keys = issues_of(states + "[decay]\nkind = lorentzian\ngamma = 1\n");
  CHECK(keys == std::vector<std::string>{"decay.kappa_m"});
  keys = issues_of("[state_I]\nkind = fock\n[state_II]\nkind = wave\n[decay]\nkind = exponential\n");
  CHECK(keys == std::vector<std::string>{"state_I.n", "state_II.kind"});
}

TEST_CASE("compare: negative tau_c exits 2 naming the key") {
  const auto dir = scratch_dir("bad");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "bad.ini");
    f << "[state_I]\nkind = fock\nn = 1\n[state_II]\nkind = coherent\nalpha = 1\n[decay]\nkind = exponential\n"
         "tau_c = -1\n";
  }
  std::ostringstream out, err;
  CHECK(cmd_compare(dir / "bad.ini", {dir / "out", false}, out, err) == kConfigError);
  CHECK(err.str().find("decay.tau_c") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK(cmd_compare(dir / "missing.ini", {dir / "out", false}, out, err) == kConfigError);
}

TEST_CASE("compare: outputs, report rows and determinism") {
  const auto a = scratch_dir("run_a"), b = scratch_dir("run_b");
  std::ostringstream out, err;
  REQUIRE(cmd_compare(kConfigs / "fig2.ini", {a, true}, out, err) == kOk);
  REQUIRE(cmd_compare(kConfigs / "fig2.ini", {b, true}, out, err) == kOk);
  for (const char* f : {"distances.csv", "crossings.txt", "crossings.json", "plot_trace.svg", "plot_hs.svg"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(fs::exists(a / "manifest.json"));
  const auto csv = slurp(a / "distances.csv");
  CHECK(csv.rfind("t_over_tauc,state,metric,distance\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 400);

  const auto report = slurp(a / "crossings.txt");
  for (const char* metric : {"\ntrace, ", "\nhs, "}) {
    const auto pos = report.find(metric);
    REQUIRE(pos != std::string::npos);
    const double t = std::stod(report.substr(pos + std::string(metric).size()));
    CHECK(std::abs(t - 0.34) <= 0.02);
  }

  const auto c = scratch_dir("run_c");
  REQUIRE(cmd_compare(kConfigs / "fig3.ini", {c, false}, out, err) == kOk);
  CHECK_FALSE(fs::exists(c / "plot_trace.svg"));
  const auto r3 = slurp(c / "crossings.txt");
  CHECK(std::abs(std::stod(r3.substr(r3.find("\ntrace, ") + 8)) - 1.7) <= 0.1);
  CHECK(std::abs(std::stod(r3.substr(r3.find("\nhs, ") + 5)) - 1.0) <= 0.1);
}

TEST_CASE("snapshot: files and matrix entries") {
  const auto dir = scratch_dir("snap");
  std::ostringstream out, err;
  REQUIRE(cmd_snapshot(kConfigs / "fig2.ini", {0.0, 0.6, 1.6, 3.0}, {dir, true}, out, err) == kOk);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 8);

  std::string header;
  const auto t0 = read_csv(dir / "snapshot_I_t0.csv", &header);
  CHECK(header == "n,m,abs_rho");
  CHECK(t0.size() == 41u * 41u);
  for (const auto& row : t0) CHECK(row[2] == ((row[0] == 1 && row[1] == 1) ? 1.0 : 0.0));

  for (const char* f : {"snapshot_I_t3.csv", "snapshot_II_t3.csv"}) CHECK(read_csv(dir / f).front()[2] >= 0.95);

  CHECK(cmd_snapshot(kConfigs / "fig2.ini", {5.0}, {dir, true}, out, err) == kConfigError);
}

TEST_CASE("decay command") {
  std::ostringstream out, err;
  const auto e = scratch_dir("decay_exp");
  DecayArgs exp_args;
  exp_args.tau_c = 1.0;
  REQUIRE(cmd_decay(exp_args, {e, true}, out, err) == kOk);
  std::string header;
  auto rows = read_csv(e / "decay.csv", &header);
  CHECK(header == "t,re_A,im_A,abs_A2");
  CHECK(rows.size() == 4097);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r[3] - std::exp(-r[0])));
  CHECK(worst <= 1e-12);

  DecayArgs lor;
  lor.kernel = "lorentzian";
  lor.gamma = 1.0;
  lor.kappa_m = 100.0;
  const auto m = scratch_dir("decay_markov");
  REQUIRE(cmd_decay(lor, {m, true}, out, err) == kOk);
  worst = 0.0;
  for (const auto& r : read_csv(m / "decay.csv")) worst = std::max(worst, std::abs(r[3] - std::exp(-r[0])));
  CHECK(worst <= 0.02);

  lor.kappa_m = 2.0;
  const auto s = scratch_dir("decay_memory");
  REQUIRE(cmd_decay(lor, {s, true}, out, err) == kOk);
  const auto closed = lorentzian_decay(1.0, 2.0);
  worst = 0.0;
  double departure = 0.0;
  for (const auto& r : read_csv(s / "decay.csv")) {
    worst = std::max(worst, std::abs(r[3] - closed.survival(r[0])));
    departure = std::max(departure, std::abs(r[3] - std::exp(-r[0])));
  }
  CHECK(worst <= 1e-6);
  CHECK(departure > 0.05);

  DecayArgs bad;
  bad.kernel = "lorentzian";
  bad.gamma = 1.0;
  CHECK(cmd_decay(bad, {s, true}, out, err) == kConfigError);
  bad.kernel = "sinc";
  CHECK(cmd_decay(bad, {s, true}, out, err) == kConfigError);
}

TEST_CASE("svg plotter") {
  CHECK(nice_ticks(0.0, 4.0) == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
  PlotSpec spec;
  spec.title = "a < b";
  spec.curves.push_back({"I", "#000000", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.2}});
  spec.curves.push_back({"II", "#ff0000", {0.0, 1.0, 2.0}, {0.8, 0.6, 0.1}});
  spec.markers = {0.75};
  const auto svg = render_svg(spec);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("a &lt; b") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(render_svg(spec) == svg);
}
