// kappaln: command-line front end for the kappa-lognormal library.
//
// Subcommands: fit | moments | simulate | forecast | interpolate | tabulate.
// Data files are comma-separated with a mandatory header row ('.' decimal,
// UTF-8, no locale handling); lines starting with '#' are metadata comments
// and are skipped on input.  Reports are JSON.  Every command is
// deterministic under --seed.
//
// Exit codes: 0 success, 2 malformed input, 3 domain error in the data or
// parameters, 4 numerical failure (non-convergence / factorization).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kappaln/distribution.hpp"
#include "kappaln/estimation.hpp"
#include "kappaln/kappa_functions.hpp"
#include "kappaln/moments.hpp"
#include "kappaln/process.hpp"
#include "kappaln/regression.hpp"
#include "kappaln/rng.hpp"
#include "kappaln/special.hpp"

namespace {

using json = nlohmann::json;
using namespace kappaln;

constexpr std::uint64_t kDefaultSeed = 20240807ULL;

constexpr int kExitOk = 0;
constexpr int kExitFormat = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumerical = 4;

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw CsvError("no column named '" + name + "'");
    }
    return static_cast<int>(it - header.begin());
  }
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (csv.header.empty()) {
      csv.header = split_line(line);
      if (csv.header.empty()) throw CsvError("empty header row");
      continue;
    }
    const auto fields = split_line(line);
    if (fields.size() != csv.header.size()) {
      throw CsvError("row width differs from header in '" + path + "'");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(f, &pos);
      } catch (const std::exception&) {
        throw CsvError("non-numeric field '" + f + "' in '" + path + "'");
      }
      if (pos != f.size()) {
        throw CsvError("non-numeric field '" + f + "' in '" + path + "'");
      }
      row.push_back(v);
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) throw CsvError("'" + path + "' has no header row");
  return csv;
}

// The value column: an explicit name wins; otherwise a column literally
// named "value"; otherwise the last column.
int value_column(const Csv& csv, const std::string& requested) {
  if (!requested.empty()) return csv.column(requested);
  const auto it = std::find(csv.header.begin(), csv.header.end(), "value");
  if (it != csv.header.end()) {
    return static_cast<int>(it - csv.header.begin());
  }
  return static_cast<int>(csv.header.size()) - 1;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

void emit_report(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    auto out = open_output(path);
    out << report.dump(2) << "\n";
  }
}

// Flags given on the command line override config-file values; the config
// mirrors flag names without the leading dashes.
void apply_config(CLI::App* cmd, const json& cfg) {
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    const std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

struct KernelFlags {
  std::string name = "ldho";
  double sigma2 = 1.0;
  double tau_c = 30.0;
  double omega_d = 2.0 * std::numbers::pi / 50.0;
  double xi = 10.0;
  double nu = 0.5;
  double rho = 1.0;
  double phi = 0.0;

  void attach(CLI::App* cmd, bool spatial_only = false) {
    cmd->add_option("--kernel", name,
                    spatial_only ? "Kernel family: exp|matern"
                                 : "Kernel family: ldho|exp|matern");
    cmd->add_option("--sigma2", sigma2, "Kernel variance");
    cmd->add_option("--tau-c", tau_c, "LDHO correlation time");
    cmd->add_option("--omega-d", omega_d, "LDHO damped frequency");
    cmd->add_option("--xi", xi, "Spatial correlation length");
    cmd->add_option("--nu", nu, "Matern smoothness");
    cmd->add_option("--rho", rho, "Anisotropy ratio (>= 1)");
    cmd->add_option("--phi", phi, "Anisotropy angle, radians");
  }

  KernelSpec build() const {
    if (name == "ldho") return LdhoKernel{sigma2, tau_c, omega_d};
    if (name == "exp") return ExpAnisoKernel{sigma2, xi, rho, phi};
    if (name == "matern") {
      return MaternAnisoKernel{sigma2, xi, nu, rho, phi};
    }
    throw std::domain_error("unknown kernel '" + name + "'");
  }

  KernelFamily family() const {
    if (name == "ldho") return KernelFamily::kLdho;
    if (name == "exp") return KernelFamily::kExpAniso;
    if (name == "matern") return KernelFamily::kMaternAniso;
    throw std::domain_error("unknown kernel '" + name + "'");
  }
};

json kernel_to_json(const KernelSpec& kernel) {
  json j;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        j["sigma2"] = k.sigma2;
        if constexpr (std::is_same_v<T, LdhoKernel>) {
          j["family"] = "ldho";
          j["tau_c"] = k.tau_c;
          j["omega_d"] = k.omega_d;
        } else if constexpr (std::is_same_v<T, ExpAnisoKernel>) {
          j["family"] = "exp";
          j["xi"] = k.xi;
          j["rho"] = k.rho;
          j["phi"] = k.phi;
        } else {
          j["family"] = "matern";
          j["xi"] = k.xi;
          j["nu"] = k.nu;
          j["rho"] = k.rho;
          j["phi"] = k.phi;
        }
      },
      kernel);
  return j;
}

json cv_to_json(const CvReport& r) {
  return json{{"me", r.me},     {"mae", r.mae},     {"mare", r.mare},
              {"rmse", r.rmse}, {"rrmse", r.rrmse}, {"pearson_r", r.pearson_r}};
}

json metadata(std::uint64_t seed) {
  return json{{"rng_algorithm", kRngAlgorithm}, {"seed", seed}};
}

// ---------------------------------------------------------------- fit ----

int cmd_fit(const std::string& input, const std::string& column,
            const std::string& output, double kappa_init,
            std::optional<double> fix_kappa, const std::string& method,
            bool compare_lognormal) {
  const Csv csv = read_csv(input);
  const int col = value_column(csv, column);
  std::vector<double> x;
  x.reserve(csv.rows.size());
  for (const auto& row : csv.rows) x.push_back(row[col]);
  if (x.size() < 10) throw std::domain_error("need at least 10 samples");
  for (double v : x) {
    if (!(v > 0.0)) throw std::domain_error("data must be positive");
  }

  json report;
  report["n"] = x.size();
  report["method"] = method;
  if (method == "quantile") {
    const MarginalFitResult qf = fit_quantile(x);
    const auto& p = qf.params;
    report["params"] = {{"mu", p.mu}, {"sigma", p.sigma}, {"kappa", p.kappa}};
    report["nll_per_site"] = qf.nll_per_site;
  } else if (method == "mle") {
    FitConfig cfg;
    cfg.kappa_init = kappa_init;
    cfg.fix_kappa = fix_kappa;
    const MarginalFitResult fit = fit_marginal(x, cfg);
    if (!fit.converged) {
      throw std::runtime_error("maximum-likelihood fit did not converge");
    }
    const auto& p = fit.params;
    report["params"] = {{"mu", p.mu}, {"sigma", p.sigma}, {"kappa", p.kappa}};
    report["nll_per_site"] = fit.nll_per_site;
    report["aic"] = fit.aic;
    report["bic"] = fit.bic;
    report["gradient_norm"] = fit.gradient_norm;
    const ModeReport modes = mode_report(p);
    report["mode_report"] = {{"root_count", modes.root_count},
                             {"modes", modes.modes},
                             {"stationary_points", modes.stationary_points}};
    if (compare_lognormal) {
      FitConfig ln_cfg;
      ln_cfg.fix_kappa = 0.0;
      const MarginalFitResult ln_fit = fit_marginal(x, ln_cfg);
      report["lognormal"] = {
          {"mu", ln_fit.params.mu},
          {"sigma", ln_fit.params.sigma},
          {"nll_per_site", ln_fit.nll_per_site},
          {"aic", ln_fit.aic},
          {"bic", ln_fit.bic},
          {"delta_aic", ln_fit.aic - fit.aic},
          {"delta_bic", ln_fit.bic - fit.bic},
          {"preferred",
           fit.aic < ln_fit.aic ? "kappa-lognormal" : "lognormal"}};
    }
  } else {
    throw CsvError("unknown --method '" + method + "'");
  }
  emit_report(report, output);
  return kExitOk;
}

// ------------------------------------------------------------ moments ----

int cmd_moments(double mu, double sigma, double kappa, int max_order,
                int truncation, const std::string& output) {
  KappaParams p{mu, sigma, kappa};
  p.validate();
  if (max_order < 1) throw std::domain_error("--orders must be >= 1");
  std::ostringstream body;
  body.precision(10);
  body << "ell,mom,lb,ub,power_series,ell_over_2kappa\n";
  for (int ell = 1; ell <= max_order; ++ell) {
    MomentRequest req{p, ell, MomentMethod::kQuadrature, truncation};
    body << ell << "," << moment(req) << ",";
    if (kappa > 0.0) {
      req.method = MomentMethod::kLowerBound;
      body << moment(req) << ",";
      req.method = MomentMethod::kUpperBound;
      body << moment(req) << ",";
    } else {
      body << "na,na,";
    }
    req.method = MomentMethod::kPowerSeries;
    body << moment(req) << ",";
    if (kappa > 0.0) {
      body << ell / (2.0 * kappa) << "\n";
    } else {
      body << "inf\n";
    }
  }
  if (output.empty()) {
    std::cout << body.str();
  } else {
    open_output(output) << body.str();
  }
  return kExitOk;
}

// ----------------------------------------------------------- simulate ----

std::vector<Coord> simulation_coords(const KernelFlags& kernel, int n,
                                     double dt, int grid_n, double dx) {
  std::vector<Coord> coords;
  if (kernel.name == "ldho") {
    for (int i = 0; i < n; ++i) coords.push_back({i * dt, 0.0});
  } else {
    for (int j = 0; j < grid_n; ++j) {
      for (int i = 0; i < grid_n; ++i) coords.push_back({i * dx, j * dx});
    }
  }
  return coords;
}

int cmd_simulate(const KernelFlags& kernel, double mu, double sigma,
                 double kappa, int n, double dt, int grid_n, double dx,
                 int realizations, double noise_var, std::uint64_t seed,
                 const std::string& output) {
  KappaParams marginal{mu, sigma, kappa};
  marginal.validate();
  if (realizations < 1) throw std::domain_error("--realizations must be >= 1");
  LatentGaussianModel model{marginal, kernel.build(), noise_var};
  const auto coords = simulation_coords(kernel, n, dt, grid_n, dx);
  const Eigen::MatrixXd draws =
      simulate(model, coords, seed, realizations);

  std::ostringstream body;
  body.precision(17);
  body << "# rng: " << kRngAlgorithm << " seed: " << seed << "\n";
  const bool spatial = kernel.name != "ldho";
  body << (spatial ? "x,y" : "t");
  for (int r = 1; r <= realizations; ++r) body << ",real_" << r;
  body << "\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    body << coords[i][0];
    if (spatial) body << "," << coords[i][1];
    for (int r = 0; r < realizations; ++r) {
      body << "," << draws(r, static_cast<Eigen::Index>(i));
    }
    body << "\n";
  }
  if (output.empty()) {
    std::cout << body.str();
  } else {
    open_output(output) << body.str();
  }
  return kExitOk;
}

// ----------------------------------------------------------- forecast ----

int cmd_forecast(const std::string& input, const std::string& column,
                 double train_frac, const std::string& strategy,
                 const KernelFlags& kernel, double kappa_init,
                 bool estimate_noise, const std::string& output,
                 const std::string& report_path, std::uint64_t seed) {
  const Csv csv = read_csv(input);
  const int vcol = value_column(csv, column);
  const int tcol = vcol == 0 ? -1 : 0;
  SampleSet all;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    all.coords.push_back(
        {tcol >= 0 ? csv.rows[i][tcol] : double(i), 0.0});
    all.values.push_back(csv.rows[i][vcol]);
  }
  for (double v : all.values) {
    if (!(v > 0.0)) throw std::domain_error("data must be positive");
  }
  const std::size_t n_train =
      static_cast<std::size_t>(train_frac * all.values.size());
  if (n_train < 20 || n_train >= all.values.size()) {
    throw std::domain_error("--train-frac leaves an empty or tiny split");
  }
  SampleSet train, test;
  for (std::size_t i = 0; i < all.values.size(); ++i) {
    auto& dst = i < n_train ? train : test;
    dst.coords.push_back(all.coords[i]);
    dst.values.push_back(all.values[i]);
  }

  ProcessFitConfig cfg;
  cfg.marginal.kappa_init = kappa_init;
  cfg.estimate_noise = estimate_noise;
  const ProcessFitResult fit = fit_process(train, kernel.family(), cfg);
  if (!fit.converged) {
    throw std::runtime_error("process fit did not converge");
  }
  const ForecastStrategy strat = strategy == "onestep"
                                     ? ForecastStrategy::kOneStepRecursive
                                     : ForecastStrategy::kMultiStep;
  const ForecastResult fc = forecast(fit.model, train, test, strat);

  std::ostringstream body;
  body.precision(17);
  body << "t,truth,median,mode,lower95,upper95,sigma_star\n";
  for (std::size_t i = 0; i < test.values.size(); ++i) {
    const auto& pm = fc.marginals[i];
    const auto iv = prediction_interval(pm, 0.05);
    body << test.coords[i][0] << "," << test.values[i] << ","
         << fc.predictions[i] << "," << predict_mode(pm) << "," << iv.lower
         << "," << iv.upper << "," << std::sqrt(pm.sigma_star2) << "\n";
  }
  if (output.empty()) {
    std::cout << body.str();
  } else {
    open_output(output) << body.str();
  }

  json report;
  report["metadata"] = metadata(seed);
  report["strategy"] = strategy;
  report["n_train"] = train.values.size();
  report["n_test"] = test.values.size();
  report["marginal"] = {{"mu", fit.model.marginal.mu},
                        {"sigma", fit.model.marginal.sigma},
                        {"kappa", fit.model.marginal.kappa}};
  report["kernel"] = kernel_to_json(fit.model.kernel);
  report["noise_var"] = fit.model.noise_var;
  report["joint_nll"] = fit.joint_nll_value;
  report["cv"] = cv_to_json(fc.report);
  emit_report(report, report_path);
  return kExitOk;
}

// -------------------------------------------------------- interpolate ----

int cmd_interpolate(const std::string& input, int train_n,
                    const KernelFlags& kernel, bool aniso,
                    std::optional<double> fix_nu, int grid_nx, int grid_ny,
                    double kappa_init, const std::string& output,
                    const std::string& report_path, std::uint64_t seed) {
  const Csv csv = read_csv(input);
  if (csv.header.size() < 3) {
    throw CsvError("spatial input needs x,y,value columns");
  }
  const int xcol = 0, ycol = 1;
  const int vcol = value_column(csv, "");
  SampleSet all;
  for (const auto& row : csv.rows) {
    all.coords.push_back({row[xcol], row[ycol]});
    all.values.push_back(row[vcol]);
  }
  for (double v : all.values) {
    if (!(v > 0.0)) throw std::domain_error("data must be positive");
  }
  const std::size_t n = all.values.size();
  if (train_n < 20 || static_cast<std::size_t>(train_n) >= n) {
    throw std::domain_error("--train-n out of range");
  }

  // deterministic random split driven by the seed
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform() * (i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  SampleSet train, test;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < static_cast<std::size_t>(train_n) ? train : test;
    dst.coords.push_back(all.coords[order[i]]);
    dst.values.push_back(all.values[order[i]]);
  }

  ProcessFitConfig cfg;
  cfg.marginal.kappa_init = kappa_init;
  cfg.anisotropic = aniso;
  cfg.fix_nu = fix_nu;
  const ProcessFitResult fit = fit_process(train, kernel.family(), cfg);

  const auto pms = posterior(fit.model, train, test.coords);
  std::vector<double> preds;
  preds.reserve(pms.size());
  for (const auto& pm : pms) preds.push_back(predict_median(pm));
  const CvReport cv = score(preds, test.values);

  const GridPrediction grid =
      interpolate_grid(fit.model, train, grid_nx, grid_ny);
  std::ostringstream body;
  body.precision(17);
  body << "x,y,median,sigma_star\n";
  for (std::size_t j = 0; j < grid.ys.size(); ++j) {
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      const std::size_t idx = j * grid.xs.size() + i;
      body << grid.xs[i] << "," << grid.ys[j] << "," << grid.median[idx]
           << "," << grid.sigma_star[idx] << "\n";
    }
  }
  if (output.empty()) {
    std::cout << body.str();
  } else {
    open_output(output) << body.str();
  }

  json report;
  report["metadata"] = metadata(seed);
  report["n_train"] = train.values.size();
  report["n_test"] = test.values.size();
  report["marginal"] = {{"mu", fit.model.marginal.mu},
                        {"sigma", fit.model.marginal.sigma},
                        {"kappa", fit.model.marginal.kappa}};
  report["kernel"] = kernel_to_json(fit.model.kernel);
  report["joint_nll"] = fit.joint_nll_value;
  report["cv"] = cv_to_json(cv);
  emit_report(report, report_path);
  return kExitOk;
}

// ----------------------------------------------------------- tabulate ----

int cmd_tabulate(const std::string& what, double mu, double sigma,
                 double kappa, double lo, double hi, int points, int log2_n,
                 const std::string& output) {
  if (points < 2) throw std::domain_error("--points must be >= 2");
  std::ostringstream body;
  body.precision(12);
  const KappaParams p{mu, sigma, kappa};
  if (what != "extreme-ratio") p.validate();
  const auto abscissa = [&](int i) {
    return lo + (hi - lo) * i / (points - 1);
  };
  if (what == "pdf" || what == "cdf" || what == "hazard") {
    if (!(lo > 0.0) || !(hi > lo)) {
      throw std::domain_error("need 0 < min < max");
    }
    body << "x," << what << "\n";
    for (int i = 0; i < points; ++i) {
      const double x = abscissa(i);
      const double v = what == "pdf"   ? pdf(x, p)
                       : what == "cdf" ? cdf(x, p)
                                       : hazard(x, p);
      body << x << "," << v << "\n";
    }
  } else if (what == "quantile") {
    if (!(lo > 0.0) || !(hi < 1.0) || !(hi > lo)) {
      throw std::domain_error("quantile range must lie inside (0, 1)");
    }
    body << "p,quantile\n";
    for (int i = 0; i < points; ++i) {
      const double pr = abscissa(i);
      body << pr << "," << quantile(pr, p) << "\n";
    }
  } else if (what == "extreme-ratio") {
    if (!(lo >= 0.0) || !(hi > lo)) {
      throw std::domain_error("kappa range must be non-negative");
    }
    body << "kappa,ratio\n";
    for (int i = 0; i < points; ++i) {
      const double k = abscissa(i);
      body << k << ","
           << normalized_typical_extreme({mu, sigma, k}, log2_n) << "\n";
    }
  } else {
    throw CsvError("unknown --what '" + what + "'");
  }
  if (output.empty()) {
    std::cout << body.str();
  } else {
    open_output(output) << body.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kappa-lognormal distribution and process toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; flags override its values")
      ->expected(1);

  std::uint64_t seed = kDefaultSeed;
  std::string output, report_path, input, column;
  int threads = 0;

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the marginal distribution");
  double kappa_init = 1.5;
  std::optional<double> fix_kappa;
  std::string method = "mle";
  bool compare_lognormal = false;
  fit->add_option("--input", input, "CSV with a positive value column")
      ->required();
  fit->add_option("--column", column, "Value column name");
  fit->add_option("--kappa-init", kappa_init, "Initial kappa");
  fit->add_option("--fix-kappa", fix_kappa, "Hold kappa fixed");
  fit->add_option("--method", method, "mle|quantile");
  fit->add_flag("--compare-lognormal", compare_lognormal,
                "Add a lognormal comparison block");
  fit->add_option("--output", output, "Report path (default stdout)");

  // moments
  auto* moments = app.add_subcommand("moments", "Moment / bound table");
  double m_mu = 0.0, m_sigma = 1.0, m_kappa = 0.5;
  int orders = 10, truncation = 2;
  moments->add_option("--mu", m_mu, "Latent location");
  moments->add_option("--sigma", m_sigma, "Latent scale");
  moments->add_option("--kappa", m_kappa, "Deformation");
  moments->add_option("--orders", orders, "Max moment order");
  moments->add_option("--truncation", truncation, "Power-series order q*");
  moments->add_option("--output", output, "CSV path (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw process realizations");
  KernelFlags sim_kernel;
  double s_mu = 1.0, s_sigma = 1.0, s_kappa = 3.0, dt = 1.0, dx = 1.0,
         noise_var = 0.0;
  int n = 1024, grid_n = 40, realizations = 1;
  sim_kernel.attach(sim);
  sim->add_option("--mu", s_mu, "Marginal mu");
  sim->add_option("--sigma", s_sigma, "Marginal sigma");
  sim->add_option("--kappa", s_kappa, "Marginal kappa");
  sim->add_option("--n", n, "Series length (ldho)");
  sim->add_option("--dt", dt, "Series spacing (ldho)");
  sim->add_option("--grid-n", grid_n, "Grid side (spatial kernels)");
  sim->add_option("--dx", dx, "Grid spacing (spatial kernels)");
  sim->add_option("--realizations", realizations, "Realization count");
  sim->add_option("--noise-var", noise_var, "Latent nugget variance");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--output", output, "CSV path (default stdout)");

  // forecast
  auto* fc = app.add_subcommand("forecast", "Fit and forecast a series");
  KernelFlags fc_kernel;
  double train_frac = 0.95, fc_kappa_init = 1.5;
  std::string strategy = "multi";
  bool estimate_noise = false;
  fc->add_option("--input", input, "t,value CSV")->required();
  fc->add_option("--column", column, "Value column name");
  fc->add_option("--train-frac", train_frac, "Training fraction");
  fc->add_option("--strategy", strategy, "multi|onestep");
  fc_kernel.attach(fc);
  fc->add_option("--kappa-init", fc_kappa_init, "Initial kappa");
  fc->add_flag("--estimate-noise", estimate_noise, "Free nugget ratio");
  fc->add_option("--output", output, "Forecast CSV path (default stdout)");
  fc->add_option("--report", report_path, "JSON report path");
  fc->add_option("--seed", seed, "RNG seed (metadata)");

  // interpolate
  auto* interp = app.add_subcommand("interpolate", "Spatial interpolation");
  KernelFlags in_kernel;
  in_kernel.name = "exp";
  int train_n = 1100, grid_nx = 40, grid_ny = 40;
  bool aniso = true, no_aniso = false;
  std::optional<double> fix_nu;
  double in_kappa_init = 1.5;
  interp->add_option("--input", input, "x,y,value CSV")->required();
  interp->add_option("--train-n", train_n, "Training subset size");
  in_kernel.attach(interp, true);
  interp->add_flag("--no-aniso", no_aniso, "Force isotropic kernel");
  interp->add_option("--fix-nu", fix_nu, "Hold Matern nu fixed");
  interp->add_option("--grid-nx", grid_nx, "Output grid width");
  interp->add_option("--grid-ny", grid_ny, "Output grid height");
  interp->add_option("--kappa-init", in_kappa_init, "Initial kappa");
  interp->add_option("--output", output, "Grid CSV path (default stdout)");
  interp->add_option("--report", report_path, "JSON report path");
  interp->add_option("--seed", seed, "Split seed");

  // tabulate
  auto* tab = app.add_subcommand("tabulate", "Dense curve emission");
  std::string what = "pdf";
  double t_mu = 0.0, t_sigma = 1.0, t_kappa = 0.5, t_lo = 0.01, t_hi = 10.0;
  int t_points = 200;
  tab->add_option("--what", what,
                  "pdf|cdf|hazard|quantile|extreme-ratio");
  tab->add_option("--mu", t_mu, "Latent location");
  tab->add_option("--sigma", t_sigma, "Latent scale");
  tab->add_option("--kappa", t_kappa, "Deformation");
  tab->add_option("--min", t_lo, "Range start");
  tab->add_option("--max", t_hi, "Range end");
  tab->add_option("--points", t_points, "Sample count");
  int t_log2n = 10;
  tab->add_option("--log2-n", t_log2n,
                  "Sample-size exponent for extreme-ratio curves");
  tab->add_option("--output", output, "CSV path (default stdout)");

  app.add_option("--threads", threads,
                 "Worker cap for ensemble commands (0 = hardware)");
  for (auto* cmd : {fit, moments, sim, fc, interp, tab}) {
    cmd->fallthrough();  // lets --config / --threads follow the subcommand
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream cfg_in(config_path);
      if (!cfg_in) throw CsvError("cannot open config '" + config_path + "'");
      json cfg = json::parse(cfg_in);
      for (auto* cmd : {fit, moments, sim, fc, interp, tab}) {
        if (cmd->parsed()) {
          apply_config(cmd, cfg);
        }
      }
    }
    if (fit->parsed()) {
      return cmd_fit(input, column, output, kappa_init, fix_kappa, method,
                     compare_lognormal);
    }
    if (moments->parsed()) {
      return cmd_moments(m_mu, m_sigma, m_kappa, orders, truncation, output);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_kernel, s_mu, s_sigma, s_kappa, n, dt, grid_n,
                          dx, realizations, noise_var, seed, output);
    }
    if (fc->parsed()) {
      return cmd_forecast(input, column, train_frac, strategy, fc_kernel,
                          fc_kappa_init, estimate_noise, output, report_path,
                          seed);
    }
    if (interp->parsed()) {
      return cmd_interpolate(input, train_n, in_kernel, aniso && !no_aniso,
                             fix_nu, grid_nx, grid_ny, in_kappa_init, output,
                             report_path, seed);
    }
    if (tab->parsed()) {
      return cmd_tabulate(what, t_mu, t_sigma, t_kappa, t_lo, t_hi, t_points,
                          t_log2n, output);
    }
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
