// tomoforge command-line tool: one binary, one subcommand per experiment
// family, JSON (or CSV) artifacts on stdout or --out. Identical (argv, seed)
// pairs produce identical output bytes.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tomoforge/ambiguity.hpp"
#include "tomoforge/circle.hpp"
#include "tomoforge/coupled.hpp"
#include "tomoforge/entropy.hpp"
#include "tomoforge/json_io.hpp"
#include "tomoforge/reconstruct.hpp"
#include "tomoforge/selftest.hpp"
#include "tomoforge/stochastic.hpp"
#include "tomoforge/su2.hpp"

namespace {

using namespace tomoforge;

constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 66;

struct RunConfig {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string out;
  std::string format = "json";
};

Tolerances tolerances_of(const RunConfig& cfg) {
  return Tolerances{cfg.tol, cfg.tol, cfg.tol};
}

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_file_atomic(cfg.out, content);
  }
}

void emit_json(const RunConfig& cfg, Json j) {
  emit(cfg, j.dump(2) + "\n");
}

Json vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

RealMatrix real_matrix_from_json(const Json& j, const char* what) {
  ComplexMatrix m = matrix_from_json(j);
  if (m.imag().cwiseAbs().maxCoeff() > 0.0) {
    throw DataError(std::string(what) + ": expected a real matrix (im must be zero)");
  }
  return m.real();
}

RealVector parse_weights(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    vals.push_back(std::stod(item));
  }
  if (vals.empty()) throw InvalidInputError("weights: empty list");
  RealVector out(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
  return out;
}

std::vector<std::pair<int, double>> parse_mixture(const std::string& s) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidInputError("mixture: expected n:p pairs");
    out.push_back({std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return out;
}

DensityMatrix make_state(const std::string& spec, int n, SeedStream& rng,
                         const Tolerances& tol) {
  if (spec == "random") return random_density(n, rng);
  if (spec == "pure") return random_pure_density(n, rng);
  if (spec == "mixed") return DensityMatrix(ComplexMatrix::Identity(n, n) / double(n), tol);
  // anything else is a matrix JSON file
  return DensityMatrix(matrix_from_json(load_json_file(spec)), tol);
}

// --- subcommand implementations ---------------------------------------------

int cmd_basis(const RunConfig& cfg, int n) {
  HermitianBasis basis = build_basis(n);
  Json out;
  out["schema"] = 1;
  out["n"] = n;
  Json gens = Json::array();
  for (int k = 0; k < basis.size(); ++k) {
    Json g;
    g["index"] = k + 1;  // 1-based, matching the E_1 naming convention
    g["kind"] = basis.is_root(k) ? "root" : "cartan";
    g["matrix"] = matrix_to_json(basis.generators[k]);
    gens.push_back(std::move(g));
  }
  out["generators"] = std::move(gens);
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_tomo_reconstruct(const RunConfig& cfg, int n, const std::string& protocol,
                         const std::string& state, long samples) {
  SeedStream rng(cfg.seed);
  Tolerances tol = tolerances_of(cfg);
  DensityMatrix rho = make_state(state, n, rng, tol);

  Json out;
  out["schema"] = 1;
  out["n"] = n;
  out["protocol"] = protocol;
  HermitianBasis basis = build_basis(n);

  if (protocol == "finite") {
    FiniteReconstruction rec = finite_reconstruct(exact_oracle(rho), basis);
    out["bloch"] = vector_to_json(rec.bloch);
    out["matrix"] = matrix_to_json(rec.matrix);
    out["queries"] = rec.frame_queries;
    out["valid_density"] = validate_density(rec.matrix, tol).ok;
    out["trace_distance"] = trace_norm(rec.matrix - rho.matrix());
  } else if (protocol == "projector") {
    ProjectorReconstruction rec = projector_protocol(exact_scalar_oracle(rho), n);
    out["bloch"] = vector_to_json(rec.bloch);
    out["matrix"] = matrix_to_json(rec.matrix);
    out["queries"] = rec.scalar_queries;
    out["valid_density"] = validate_density(rec.matrix, tol).ok;
    out["trace_distance"] = trace_norm(rec.matrix - rho.matrix());
  } else if (protocol == "mc") {
    McReconstruction rec = mc_reconstruct(exact_oracle(rho), n, samples, rng.fork(1));
    out["bloch"] = vector_to_json(rec.bloch);
    out["matrix"] = matrix_to_json(rec.matrix);
    out["stderr"] = vector_to_json(rec.std_error);
    out["queries"] = rec.samples;
    out["valid_density"] = rec.valid_density;
    out["trace_distance"] = trace_norm(rec.matrix - rho.matrix());
    if (!rec.valid_density) {
      out["projected_matrix"] = matrix_to_json(clip_to_density(rec.matrix));
    }
  } else {
    throw InvalidInputError("unknown protocol: " + protocol);
  }
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_tomo_measure(const RunConfig& cfg, int n, const std::string& state,
                     const std::string& frame) {
  SeedStream rng(cfg.seed);
  Tolerances tol = tolerances_of(cfg);
  DensityMatrix rho = make_state(state, n, rng, tol);
  ComplexMatrix u;
  if (frame == "identity") {
    u = ComplexMatrix::Identity(n, n);
  } else if (frame == "haar") {
    SeedStream frame_rng = rng.fork(1);
    u = haar_sample(n, frame_rng);
  } else {
    u = matrix_from_json(load_json_file(frame));
  }
  MeasurementRecord rec = measure(rho, u);
  Json out;
  out["schema"] = 1;
  out["n"] = n;
  Json record = record_to_json(rec);
  for (auto& [key, value] : record.items()) out[key] = std::move(value);
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_tomo_orthogonality(const RunConfig& cfg, int n, long samples) {
  SeedStream rng(cfg.seed);
  double dev = orthogonality_check(n, samples, rng);
  Json out;
  out["schema"] = 1;
  out["n"] = n;
  out["samples"] = samples;
  out["max_deviation"] = dev;
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_ambiguity(const RunConfig& cfg, const std::string& weights, long budget) {
  SeedStream rng(cfg.seed);
  DiagonalState d(parse_weights(weights));
  DeltaRhoResult r = delta_rho(d, budget, rng);
  Json out;
  out["schema"] = 1;
  out["weights"] = vector_to_json(d.weights);
  out["budget"] = budget;
  out["delta"] = r.delta;
  out["evaluations"] = r.evaluations;
  out["pair"] = Json::array({matrix_to_json(r.lift_a), matrix_to_json(r.lift_b)});
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_stochastic_decompose(const RunConfig& cfg, const std::string& in, double tol) {
  StochasticMatrix t{real_matrix_from_json(load_json_file(in), "stochastic matrix")};
  auto terms = birkhoff_decompose(t, tol);
  Json out;
  out["schema"] = 1;
  out["dim"] = t.dim();
  Json list = Json::array();
  for (const auto& term : terms) {
    Json e;
    e["weight"] = term.weight;
    e["perm"] = term.perm;
    list.push_back(std::move(e));
  }
  out["terms"] = std::move(list);
  out["residual"] = (birkhoff_reassemble(terms, t.dim()) - t.t).cwiseAbs().maxCoeff();
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_stochastic_from_unitary(const RunConfig& cfg, const std::string& in) {
  ComplexMatrix u = matrix_from_json(load_json_file(in));
  StochasticMatrix t = from_unitary(u);
  Json out;
  out["schema"] = 1;
  ComplexMatrix tc = t.t.cast<Complex>();
  out["matrix"] = matrix_to_json(tc);
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_coupled(const RunConfig& cfg, const std::string& config_path) {
  Json spec = load_json_file(config_path);
  const int n = spec.at("n").get<int>();
  const int N = spec.at("N").get<int>();
  Tolerances tol = tolerances_of(cfg);
  DensityMatrix rho_m(matrix_from_json(spec.at("rho_M")), tol);

  std::vector<CoupledConfig> configs;
  std::vector<RealVector> given_obs;
  for (const auto& e : spec.at("experiments")) {
    CoupledConfig c;
    c.n = n;
    c.N = N;
    c.h_system = matrix_from_json(e.at("H_S"));
    c.h_apparatus = matrix_from_json(e.at("H_M"));
    c.couplings = real_matrix_from_json(e.at("couplings"), "couplings");
    c.t0 = e.value("t0", 0.0);
    c.window = e.at("window").get<double>();
    c.t_read = e.at("t_read").get<double>();
    c.validate();
    configs.push_back(std::move(c));
    if (e.contains("observations")) {
      const auto& obs = e.at("observations");
      RealVector v(static_cast<int>(obs.size()));
      for (int i = 0; i < v.size(); ++i) v[i] = obs.at(i).get<double>();
      given_obs.push_back(std::move(v));
    }
  }

  HermitianBasis basis_m = build_basis(N);
  RealVector observations(static_cast<Eigen::Index>(configs.size()) * basis_m.size());
  bool simulated = spec.contains("rho_S");
  if (simulated) {
    DensityMatrix rho_s(matrix_from_json(spec.at("rho_S")), tol);
    int row = 0;
    for (const auto& c : configs) {
      RealVector b = apparatus_read(evolve(c, rho_s, rho_m), basis_m, n);
      observations.segment(row, b.size()) = b;
      row += static_cast<int>(b.size());
    }
  } else {
    if (given_obs.size() != configs.size()) {
      throw ConfigError("coupled: every experiment needs observations when rho_S is absent");
    }
    int row = 0;
    for (const auto& v : given_obs) {
      if (v.size() != basis_m.size()) {
        throw ConfigError("coupled: observations must have N^2 - 1 entries");
      }
      observations.segment(row, v.size()) = v;
      row += static_cast<int>(v.size());
    }
  }

  DesignMatrix design = build_design(configs, rho_m);
  SystemRecovery rec = recover_system(design, observations);
  Json out;
  out["schema"] = 1;
  out["n"] = n;
  out["N"] = N;
  out["experiments"] = configs.size();
  out["rho_S"] = matrix_to_json(rec.rho_s);
  out["residual"] = rec.residual;
  out["rank"] = rec.rank;
  out["condition"] = rec.condition;
  out["valid_density"] = validate_density(rec.rho_s, tol).ok;
  if (simulated) {
    DensityMatrix rho_s(matrix_from_json(spec.at("rho_S")), tol);
    out["trace_distance"] = trace_norm(rec.rho_s - rho_s.matrix());
  }
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_circle(const RunConfig& cfg, const std::string& profile_name, double lambda0, double t_off,
               int n, const std::string& mixture, double h, double t_end,
               const std::string& profile_file) {
  CouplingProfile profile = [&] {
    if (profile_name == "bump") return CouplingProfile::bump(lambda0, t_off);
    if (profile_name == "rectangular") return CouplingProfile::rectangular(lambda0, t_off);
    if (profile_name == "constant") return CouplingProfile::constant_coupling(lambda0);
    if (profile_name == "tabulated") {
      if (profile_file.empty()) {
        throw InvalidInputError("tabulated profile needs --profile-file");
      }
      Json table = load_json_file(profile_file);
      std::vector<double> times = table.at("t").get<std::vector<double>>();
      std::vector<double> values = table.at("lambda").get<std::vector<double>>();
      return CouplingProfile::tabulated(std::move(times), std::move(values));
    }
    throw InvalidInputError("unknown profile: " + profile_name);
  }();

  double pi_expectation = static_cast<double>(n);
  if (!mixture.empty()) pi_expectation = mixture_momentum(parse_mixture(mixture));
  Trajectory traj = b_expectation(profile, pi_expectation, t_end, h);

  if (cfg.format == "csv") {
    std::ostringstream csv;
    csv << "t,u1,u2,u_par,B\n";
    csv.precision(17);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      csv << traj.t[k] << ',' << traj.u1[k] << ',' << traj.u2[k] << ',' << traj.u_par[k] << ','
          << traj.b[k] << '\n';
    }
    emit(cfg, csv.str());
    return 0;
  }

  Json out;
  out["schema"] = 1;
  out["profile"] = profile.name();
  out["lambda0"] = lambda0;
  out["T"] = profile.bounded_support() ? Json(profile.support_end()) : Json(nullptr);
  out["h"] = h;
  out["t_end"] = t_end;
  out["pi_expectation_true"] = pi_expectation;
  out["samples"] = traj.size();
  out["wronskian_drift"] = traj.max_wronskian_drift();
  out["lambda1"] = traj.lambda1;
  out["lambda2"] = traj.lambda2;
  if (profile.bounded_support() && profile.support_end() < t_end) {
    try {
      MomentumRecovery rec = recover_momentum(traj);
      Json r;
      r["pi_expectation"] = rec.pi_expectation;
      if (rec.integer_n) {
        r["integer_n"] = *rec.integer_n;
      } else {
        r["integer_n"] = Json(nullptr);
      }
      r["fit_rms"] = rec.fit_rms;
      r["fit_points"] = rec.fit_points;
      out["recovery"] = std::move(r);
    } catch (const NoInformationError& e) {
      out["recovery"] = Json{{"error", "no-information"}, {"message", e.what()}};
    }
  }
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_entropy_rn(const RunConfig& cfg, double p, int grid, double half_width,
                   const std::string& fn) {
  GridFunction psi = [&] {
    if (fn == "gaussian") return gaussian_line(half_width, grid);
    if (fn == "squeezed") return gaussian_line(half_width, grid, 2.0);
    if (fn == "double-bump") return double_bump_line(half_width, grid);
    throw InvalidInputError("unknown line function: " + fn);
  }();
  HyCheck hy = hy_check_rn(psi, p);
  EntropySum s = entropy_sum_rn(psi);
  Json out;
  out["schema"] = 1;
  out["domain"] = "rn";
  out["fn"] = fn;
  out["p"] = p;
  out["grid"] = grid;
  out["L"] = half_width;
  out["hy_slack"] = hy.slack;
  out["quad_error"] = hy.quad_error_estimate;
  out["S_x"] = s.s_x;
  out["S_p"] = s.s_p;
  out["sum"] = s.sum;
  out["bound"] = s.bound;
  out["q_derivative"] = s.q_derivative;
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_entropy_circle(const RunConfig& cfg, double p, int grid, const std::string& fn) {
  SeedStream rng(cfg.seed);
  GridFunction phi = [&]() -> GridFunction {
    if (fn == "single-mode") return single_mode_circle(3, grid);
    if (fn == "two-mode") {
      Eigen::VectorXcd v(grid);
      for (int j = 0; j < grid; ++j) {
        const double angle = 2.0 * M_PI * j / grid;
        v[j] = (1.0 + std::polar(1.0, angle)) / std::sqrt(2.0);
      }
      return GridFunction::circle(std::move(v));
    }
    if (fn == "random") {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid);
      for (int mode = -8; mode <= 8; ++mode) {
        const Complex c = rng.complex_normal();
        for (int j = 0; j < grid; ++j) v[j] += c * std::polar(1.0, mode * 2.0 * M_PI * j / grid);
      }
      GridFunction g = GridFunction::circle(std::move(v));
      g.samples /= g.norm_2();
      return g;
    }
    throw InvalidInputError("unknown circle function: " + fn);
  }();
  U1Check check = u1_check(phi, p);
  Json out;
  out["schema"] = 1;
  out["domain"] = "circle";
  out["fn"] = fn;
  out["p"] = p;
  out["grid"] = grid;
  out["hy_slack"] = check.hy_slack;
  out["entropy_slack"] = check.entropy_slack;
  out["S_x"] = check.s_function;
  out["S_p"] = check.s_coefficients;
  emit_json(cfg, std::move(out));
  return 0;
}

int cmd_entropy_su2(const RunConfig& cfg, double j_max) {
  SeedStream rng(cfg.seed);
  // random band-limited function with integer spins <= j_max
  const int two_jmax = su2::round_two_j(j_max);
  std::vector<su2::WignerEvaluator> reps;
  std::vector<std::array<int, 3>> labels;
  for (int two_j = 0; two_j <= two_jmax; two_j += 2) {
    reps.emplace_back(0.5 * two_j);
    for (int r = 0; r <= two_j; ++r)
      for (int c = 0; c <= two_j; ++c) labels.push_back({two_j, r, c});
  }
  Eigen::VectorXcd coeff(static_cast<Eigen::Index>(labels.size()));
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = rng.complex_normal();
  coeff /= coeff.norm();
  auto f = [&](const Euler& g) {
    Complex acc(0.0, 0.0);
    std::vector<ComplexMatrix> ds;
    ds.reserve(reps.size());
    for (const auto& rep : reps) ds.push_back(rep(g));
    for (std::size_t col = 0; col < labels.size(); ++col) {
      auto [two_j, r, c] = labels[col];
      acc += coeff[static_cast<Eigen::Index>(col)] * std::sqrt(two_j + 1.0) * ds[two_j / 2](r, c);
    }
    return acc;
  };
  GroupFourierData data = su2_quadrature(f, j_max);
  const double slack = group_entropy_check(f, j_max);
  Json out;
  out["schema"] = 1;
  out["domain"] = "su2";
  out["j_max"] = j_max;
  out["slack"] = slack;
  out["plancherel_residual"] = data.plancherel_residual;
  emit_json(cfg, std::move(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"tomoforge: abelian-frame quantum tomography toolkit"};
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "64-bit RNG seed (default 0)");
  app.add_option("--tol", cfg.tol, "density-matrix validation tolerance (default 1e-9)");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", cfg.format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // basis
  auto* basis_cmd = app.add_subcommand("basis", "export the su(N) generator basis");
  int basis_n = 2;
  basis_cmd->add_option("--n", basis_n, "dimension N >= 2")->required();

  // tomo
  auto* tomo_cmd = app.add_subcommand("tomo", "state reconstruction protocols");
  tomo_cmd->require_subcommand(1);
  auto* rec_cmd = tomo_cmd->add_subcommand("reconstruct", "reconstruct a state from frames");
  int tomo_n = 2;
  std::string tomo_protocol = "finite", tomo_state = "random";
  long tomo_samples = 10000;
  rec_cmd->add_option("--n", tomo_n, "dimension")->required();
  rec_cmd->add_option("--protocol", tomo_protocol, "finite|projector|mc");
  rec_cmd->add_option("--state", tomo_state, "random|pure|mixed|<matrix.json>");
  rec_cmd->add_option("--samples", tomo_samples, "Haar samples for the mc protocol");
  auto* orth_cmd = tomo_cmd->add_subcommand("orthogonality", "Monte-Carlo orthogonality check");
  int orth_n = 2;
  long orth_samples = 100000;
  orth_cmd->add_option("--n", orth_n, "dimension");
  orth_cmd->add_option("--samples", orth_samples, "Haar samples");

  // ambiguity
  auto* amb_cmd = app.add_subcommand("ambiguity", "lift-set diameter of a diagonal state");
  std::string amb_weights;
  long amb_budget = 10000;
  amb_cmd->add_option("--weights", amb_weights, "comma-separated diagonal weights")->required();
  amb_cmd->add_option("--budget", amb_budget, "objective evaluation budget");

  // stochastic
  auto* sto_cmd = app.add_subcommand("stochastic", "doubly stochastic maps");
  sto_cmd->require_subcommand(1);
  auto* dec_cmd = sto_cmd->add_subcommand("decompose", "Birkhoff-von Neumann decomposition");
  std::string sto_in;
  double sto_tol = 1e-12;
  dec_cmd->add_option("--in", sto_in, "doubly stochastic matrix JSON")->required();
  dec_cmd->add_option("--decompose-tol", sto_tol, "support threshold");
  auto* fu_cmd = sto_cmd->add_subcommand("from-unitary", "|u_sr|^2 of a unitary");
  std::string fu_in;
  fu_cmd->add_option("--in", fu_in, "unitary matrix JSON")->required();

  // coupled
  auto* cpl_cmd = app.add_subcommand("coupled", "system-apparatus recovery");
  std::string cpl_config;
  cpl_cmd->add_option("--config", cpl_config, "experiment batch JSON")->required();

  // circle ("--h" is the step size, so help stays on --help only here)
  auto* cir_cmd = app.add_subcommand("circle", "particle-on-a-circle model");
  cir_cmd->set_help_flag("--help", "print help");
  std::string cir_profile = "bump", cir_mixture;
  double cir_lambda0 = 0.8, cir_T = 5.0, cir_h = 1e-3, cir_tend = 15.0;
  int cir_n = 1;
  cir_cmd->add_option("--profile", cir_profile, "bump|rectangular|constant");
  cir_cmd->add_option("--lambda0", cir_lambda0, "coupling amplitude");
  cir_cmd->add_option("--T", cir_T, "switch-off time");
  cir_cmd->add_option("--n", cir_n, "integer system momentum");
  cir_cmd->add_option("--mixture", cir_mixture, "momentum mixture n:p,n:p (overrides --n)");
  cir_cmd->add_option("--h", cir_h, "integrator step");
  cir_cmd->add_option("--t-end", cir_tend, "end of the simulated window");

  // entropy
  auto* ent_cmd = app.add_subcommand("entropy", "entropic inequality checks");
  ent_cmd->require_subcommand(1);
  auto* rn_cmd = ent_cmd->add_subcommand("rn", "line domain");
  double rn_p = 1.5, rn_L = 20.0;
  int rn_grid = 4096;
  std::string rn_fn = "gaussian";
  rn_cmd->add_option("--p", rn_p, "exponent in (1, 2]");
  rn_cmd->add_option("--grid", rn_grid, "grid points");
  rn_cmd->add_option("--L", rn_L, "half width");
  rn_cmd->add_option("--fn", rn_fn, "gaussian|squeezed|double-bump");
  auto* ci_cmd = ent_cmd->add_subcommand("circle", "U(1) domain");
  double ci_p = 1.5;
  int ci_grid = 256;
  std::string ci_fn = "two-mode";
  ci_cmd->add_option("--p", ci_p, "exponent in (1, 2]");
  ci_cmd->add_option("--grid", ci_grid, "grid points");
  ci_cmd->add_option("--fn", ci_fn, "single-mode|two-mode|random");
  auto* su_cmd = ent_cmd->add_subcommand("su2", "SU(2) domain");
  double su_jmax = 2.0;
  su_cmd->add_option("--j-max", su_jmax, "band limit");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "run the built-in invariant suite");

  // allow the global options (--seed, --out, ...) after any subcommand
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* node) {
    for (CLI::App* sub : node->get_subcommands({})) {
      sub->fallthrough();
      enable_fallthrough(sub);
    }
  };
  enable_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*basis_cmd) return cmd_basis(cfg, basis_n);
    if (*tomo_cmd) {
      if (*rec_cmd) return cmd_tomo_reconstruct(cfg, tomo_n, tomo_protocol, tomo_state, tomo_samples);
      if (*orth_cmd) return cmd_tomo_orthogonality(cfg, orth_n, orth_samples);
    }
    if (*amb_cmd) return cmd_ambiguity(cfg, amb_weights, amb_budget);
    if (*sto_cmd) {
      if (*dec_cmd) return cmd_stochastic_decompose(cfg, sto_in, sto_tol);
      if (*fu_cmd) return cmd_stochastic_from_unitary(cfg, fu_in);
    }
    if (*cpl_cmd) return cmd_coupled(cfg, cpl_config);
    if (*cir_cmd)
      return cmd_circle(cfg, cir_profile, cir_lambda0, cir_T, cir_n, cir_mixture, cir_h, cir_tend);
    if (*ent_cmd) {
      if (*rn_cmd) return cmd_entropy_rn(cfg, rn_p, rn_grid, rn_L, rn_fn);
      if (*ci_cmd) return cmd_entropy_circle(cfg, ci_p, ci_grid, ci_fn);
      if (*su_cmd) return cmd_entropy_su2(cfg, su_jmax);
    }
    if (*self_cmd) {
      return run_selftest(cfg.seed) == 0 ? 0 : 1;
    }
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const IoError& e) {
    Json err{{"schema", 1}, {"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    Json err{{"schema", 1}, {"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    Json err{{"schema", 1}, {"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 70;
  }
}
