#include "bihamkit/cli.hpp"

#include "bihamkit/errors.hpp"
#include "bihamkit/flows.hpp"
#include "bihamkit/json_io.hpp"
#include "bihamkit/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace bihamkit {

namespace {

// A header plus numeric rows, emitted as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string render(const std::string& format) const {
    std::ostringstream out;
    if (format == "json") {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
        arr.push_back(obj);
      }
      out << arr.dump(2) << '\n';
      return out.str();
    }
    out << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
    return out.str();
  }
};

Part parse_kind(const std::string& s) {
  if (s == "re" || s == "real") return Part::Real;
  if (s == "im" || s == "imag") return Part::Imag;
  throw DomainError("kind must be re or im, got " + s);
}

// "1", "2", or "a,b" for a * {,}_1 + b * {,}_2.
BracketSelector parse_bracket(const std::string& s) {
  if (s == "1") return BracketSelector::canonical();
  if (s == "2") return BracketSelector::quadratic();
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw DomainError("bracket must be 1, 2 or a,b; got " + s);
  try {
    return BracketSelector::combination(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw DomainError("bracket must be 1, 2 or a,b; got " + s);
  }
}

int which_of(const BracketSelector& sel) {
  if (sel.is_canonical()) return 1;
  if (sel.is_quadratic()) return 2;
  throw DomainError("only the brackets 1 and 2 generate flows");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Common {
  std::size_t n = 3;
  int trials = 5;
  std::uint64_t seed = 1;
  double tol_abs = 1e-8;
  double tol_rel = 1e-5;
  double fd_step = kDefaultFdStep;
  std::string suites;
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& c, bool randomized) {
  app->add_option("--out", c.out_path, "Write results to this file instead of standard output");
  if (!randomized) return;
  app->add_option("--n", c.n, "Matrix size")->check(CLI::Range(2, 16));
  app->add_option("--trials", c.trials, "Trials per suite")->check(CLI::Range(1, 1000000));
  app->add_option("--seed", c.seed, "Random seed")->envname("BIHAMKIT_SEED");
  app->add_option("--tol-abs", c.tol_abs, "Threshold for closed-form identities")->check(CLI::PositiveNumber);
  app->add_option("--tol-rel", c.tol_rel, "Threshold for finite-difference identities")->check(CLI::PositiveNumber);
  app->add_option("--fd-step", c.fd_step, "Finite-difference step")->check(CLI::PositiveNumber);
}

VerificationConfig to_config(const Common& c) {
  VerificationConfig cfg;
  cfg.n = c.n;
  cfg.trials = c.trials;
  cfg.seed = c.seed;
  cfg.tol_abs = c.tol_abs;
  cfg.tol_rel = c.tol_rel;
  cfg.fd_step = c.fd_step;
  cfg.suites = split_list(c.suites);
  cfg.validate();
  return cfg;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path);
  if (!file) throw DomainError("cannot write " + c.out_path);
  file << text;
}

std::vector<std::string> hamiltonian_header(std::size_t n) {
  std::vector<std::string> h{"t"};
  for (std::size_t k = 1; k <= n; ++k) h.push_back("H_" + std::to_string(k));
  for (std::size_t k = 1; k <= n; ++k) h.push_back("Htilde_" + std::to_string(k));
  h.insert(h.end(), {"drift_H", "drift_Htilde", "drift_Jtilde"});
  return h;
}

Table flow_table(const std::vector<PhasePoint>& traj, double t_final, bool full) {
  const std::size_t n = traj.front().n();
  Table table{hamiltonian_header(n), {}};
  if (full) {
    for (const char* m : {"g", "J"}) {
      for (const char* part : {"re", "im"}) {
        for (std::size_t a = 1; a <= n; ++a) {
          for (std::size_t b = 1; b <= n; ++b) {
            table.header.push_back(std::string(m) + "_" + part + "_" + std::to_string(a) + std::to_string(b));
          }
        }
      }
    }
  }
  const std::size_t samples = traj.size() - 1;
  const CMatrix jt0 = tilde_J(traj.front());
  std::vector<double> h0(n), ht0(n);
  for (std::size_t k = 1; k <= n; ++k) {
    h0[k - 1] = hamiltonian(static_cast<int>(k), Part::Real)(traj.front());
    ht0[k - 1] = hamiltonian(static_cast<int>(k), Part::Imag)(traj.front());
  }
  for (std::size_t i = 0; i <= samples; ++i) {
    const PhasePoint& x = traj[i];
    std::vector<double> row{t_final * static_cast<double>(i) / static_cast<double>(samples)};
    double dh = 0.0, dht = 0.0;
    std::vector<double> hs, hts;
    for (std::size_t k = 1; k <= n; ++k) {
      hs.push_back(hamiltonian(static_cast<int>(k), Part::Real)(x));
      hts.push_back(hamiltonian(static_cast<int>(k), Part::Imag)(x));
      dh = std::max(dh, std::abs(hs.back() - h0[k - 1]));
      dht = std::max(dht, std::abs(hts.back() - ht0[k - 1]));
    }
    row.insert(row.end(), hs.begin(), hs.end());
    row.insert(row.end(), hts.begin(), hts.end());
    row.insert(row.end(), {dh, dht, max_abs(tilde_J(x) - jt0)});
    if (full) {
      for (const CMatrix* M : {&x.g, &x.J}) {
        for (int part = 0; part < 2; ++part) {
          for (Eigen::Index a = 0; a < M->rows(); ++a) {
            for (Eigen::Index b = 0; b < M->cols(); ++b) row.push_back(part == 0 ? (*M)(a, b).real() : (*M)(a, b).imag());
          }
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table reduced_flow_table(const std::vector<ReducedPoint>& traj, double t_final) {
  const std::size_t n = traj.front().n();
  Table table;
  table.header.push_back("t");
  for (std::size_t i = 1; i <= n; ++i) table.header.push_back("q_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) table.header.push_back("eig_re_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) table.header.push_back("eig_im_" + std::to_string(i));
  for (std::size_t k = 1; k <= n; ++k) table.header.push_back("drift_h_" + std::to_string(k));
  std::vector<Complex> tr0(n);
  for (std::size_t k = 1; k <= n; ++k) tr0[k - 1] = matrix_power(traj.front().J, static_cast<int>(k)).trace();
  const std::size_t samples = traj.size() - 1;
  for (std::size_t s = 0; s <= samples; ++s) {
    const ReducedPoint& y = traj[s];
    std::vector<double> row{t_final * static_cast<double>(s) / static_cast<double>(samples)};
    for (std::size_t i = 0; i < n; ++i) row.push_back(y.q(static_cast<Eigen::Index>(i)));
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<CMatrix>(y.J, false).eigenvalues();
    std::vector<Complex> sorted(ev.data(), ev.data() + ev.size());
    std::sort(sorted.begin(), sorted.end(), [](const Complex& a, const Complex& b) {
      return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    for (const auto& e : sorted) row.push_back(e.real());
    for (const auto& e : sorted) row.push_back(e.imag());
    // |tr J^k - tr J0^k| / k bounds the drift of both h_k and h~_k.
    for (std::size_t k = 1; k <= n; ++k) {
      row.push_back(std::abs(matrix_power(y.J, static_cast<int>(k)).trace() - tr0[k - 1]) / static_cast<double>(k));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Json double_check(const VerificationConfig& cfg, bool& pass) {
  VerificationConfig c = cfg;
  c.suites = {"double-transport"};
  const SuiteResult transport = run_one_suite("double-transport", c);
  Rng rng(cfg.seed);
  double jac_plus = 0.0, jac_minus = 0.0, min_sv = 1e300;
  for (int t = 0; t < cfg.trials; ++t) {
    const DoublePoint x = random_near_identity(cfg.n, rng);
    std::vector<DoubleFunction> fs;
    for (int i = 0; i < 3; ++i) {
      const Observable F = random_observable(cfg.n, rng);
      const CMatrix A = random_matrix(cfg.n, rng);
      // Mix the transported observable with a direct function of (g1, g2).
      fs.push_back([F, A](const DoublePoint& z) { return F(psi_map(z)) + (A * z.g1 * z.g2).trace().real(); });
    }
    double scale = 0.0;
    jac_plus = std::max(jac_plus, std::abs(double_jacobi_residual(DoubleSign::Plus, fs[0], fs[1], fs[2], x, &scale)) /
                                      std::max(1.0, scale));
    jac_minus = std::max(jac_minus, std::abs(double_jacobi_residual(DoubleSign::Minus, fs[0], fs[1], fs[2], x, &scale)) /
                                        std::max(1.0, scale));
    const RVector sv = poisson_tensor_singular_values(DoubleSign::Plus, x);
    min_sv = std::min(min_sv, sv(sv.size() - 1));
  }
  pass = transport.pass && jac_plus < cfg.tol_rel && jac_minus < cfg.tol_rel && min_sv > cfg.tol_abs;
  nlohmann::ordered_json out;
  out["n"] = cfg.n;
  out["trials"] = cfg.trials;
  out["transport_max_residual"] = transport.max_residual;
  out["jacobi_plus_max_residual"] = jac_plus;
  out["jacobi_minus_max_residual"] = jac_minus;
  out["plus_min_singular_value"] = min_sv;
  out["threshold"] = cfg.tol_rel;
  out["pass"] = pass;
  return Json::parse(out.dump());
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for a bi-Hamiltonian structure on GL(n,C) x gl(n,C) and its reductions",
               "bihamkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  Common verify_opts;
  auto* verify = app.add_subcommand("verify", "Run randomized verification suites");
  add_common(verify, verify_opts, true);
  verify->add_option("--suites", verify_opts.suites, "Comma-separated suite names (default: all)");
  verify->add_option("--format", verify_opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  Common flow_opts;
  std::string flow_point, flow_kind = "re", flow_bracket = "1", flow_method = "explicit";
  int flow_k = 1, flow_steps = 100;
  double flow_t = 1.0;
  bool flow_full = false;
  flow_opts.format = "csv";
  auto* flow = app.add_subcommand("flow", "Integrate the flow of H_k or H~_k and report conserved quantities");
  add_common(flow, flow_opts, false);
  flow->add_option("--point", flow_point, "JSON phase point {g, J} ('-' for stdin)")->required();
  flow->add_option("--k", flow_k, "Hamiltonian index")->check(CLI::PositiveNumber);
  flow->add_option("--kind", flow_kind, "re (H_k) or im (H~_k)");
  flow->add_option("--bracket", flow_bracket, "1 or 2");
  flow->add_option("--t", flow_t, "Final time");
  flow->add_option("--steps", flow_steps, "Number of steps / samples")->check(CLI::PositiveNumber);
  flow->add_option("--method", flow_method, "explicit or numeric")->check(CLI::IsMember({"explicit", "numeric"}));
  flow->add_flag("--full", flow_full, "Include the full point in every row");
  flow->add_option("--format", flow_opts.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

  Common rflow_opts;
  std::string rflow_point, rflow_kind = "re", rflow_bracket = "2", rflow_field = "full";
  int rflow_k = 1, rflow_steps = 100;
  double rflow_t = 1.0;
  rflow_opts.format = "csv";
  auto* rflow = app.add_subcommand("rflow", "Integrate a reduced Hamiltonian vector field");
  add_common(rflow, rflow_opts, false);
  rflow->add_option("--point", rflow_point, "JSON reduced point {q, J} ('-' for stdin)")->required();
  rflow->add_option("--k", rflow_k, "Hamiltonian index")->check(CLI::PositiveNumber);
  rflow->add_option("--kind", rflow_kind, "re (h_k) or im (h~_k)");
  rflow->add_option("--bracket", rflow_bracket, "1 or 2");
  rflow->add_option("--field", rflow_field, "full, v (Hermitian J) or u (anti-Hermitian J)")
      ->check(CLI::IsMember({"full", "v", "u"}));
  rflow->add_option("--t", rflow_t, "Final time");
  rflow->add_option("--steps", rflow_steps, "RK4 steps")->check(CLI::PositiveNumber);
  rflow->add_option("--format", rflow_opts.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

  Common reduce_opts;
  std::string reduce_point;
  auto* reduce = app.add_subcommand("reduce", "Map a phase point to its reduced representative (q, J)");
  add_common(reduce, reduce_opts, false);
  reduce->add_option("--point", reduce_point, "JSON phase point {g, J} ('-' for stdin)")->required();

  Common spin_opts;
  std::string spin_point;
  bool from_spin_flag = false;
  auto* spin = app.add_subcommand("spin", "Convert between reduced points and spin coordinates");
  add_common(spin, spin_opts, false);
  spin->add_option("--point", spin_point, "JSON reduced point, or spin coordinates with --from-spin")->required();
  spin->add_flag("--from-spin", from_spin_flag, "Input is {q, p, xi_l, xi_r}");

  Common bracket_opts;
  std::string bracket_point, bracket_f, bracket_h, bracket_sel = "1";
  auto* bracket = app.add_subcommand("bracket", "Evaluate {F, H} of two named observables at a point");
  bracket->set_help_flag("--help", "Print this help message and exit");  // frees -h
  add_common(bracket, bracket_opts, false);
  bracket->add_option("--point", bracket_point, "JSON phase point {g, J} ('-' for stdin)")->required();
  bracket->add_option("--f", bracket_f, "Observable name, e.g. H:2, Jk:1,2,re, gr:1,1, word:+1-2")->required();
  bracket->add_option("--h", bracket_h, "Observable name")->required();
  bracket->add_option("--bracket", bracket_sel, "1, 2 or a,b");

  Common double_opts;
  double_opts.n = 2;
  double_opts.trials = 3;
  auto* dcheck = app.add_subcommand("double-check", "Check the Heisenberg double transport and brackets");
  add_common(dcheck, double_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (verify->parsed()) {
      const VerificationReport report = run_suite(to_config(verify_opts));
      emit(verify_opts, verify_opts.format == "csv" ? report.to_csv() : report.to_json() + "\n", out);
      if (!report.pass()) {
        err << "verification failed\n";
        exit_code = 1;
      }
    } else if (flow->parsed()) {
      const PhasePoint x = phase_point_from_json(read_json(flow_point));
      FlowSpec spec{flow_k, parse_kind(flow_kind), parse_bracket(flow_bracket), flow_t, flow_steps};
      spec.validate();
      std::vector<PhasePoint> traj;
      if (flow_method == "explicit") {
        traj = explicit_trajectory(x, spec.k, spec.kind, spec.t_final, spec.steps);
      } else {
        const int index = spec.bracket.is_canonical() ? spec.k + 1 : spec.k;
        numeric_flow(x, hamiltonian(index, spec.kind), spec.bracket, spec.t_final, spec.steps, &traj);
      }
      emit(flow_opts, flow_table(traj, spec.t_final, flow_full).render(flow_opts.format), out);
    } else if (rflow->parsed()) {
      const ReducedPoint y = reduced_point_from_json(read_json(rflow_point));
      const Part kind = parse_kind(rflow_kind);
      const int which = which_of(parse_bracket(rflow_bracket));
      const int k = rflow_k;
      ReducedField field;
      if (rflow_field == "full") {
        field = [k, kind, which](const ReducedPoint& z) { return spectral_field(k, kind, which, z); };
      } else if (rflow_field == "v") {
        if (kind != Part::Real) throw DomainError("the v field is generated by h_k (kind re)");
        if (max_abs(anti_part(y.J)) > 1e-12 * std::max(1.0, max_abs(y.J)))
          throw DomainError("the v field needs Hermitian J");
        field = [k, which](const ReducedPoint& z) { return v_field(k, which, restrict_minus(z)); };
      } else {
        if (max_abs(herm_part(y.J)) > 1e-12 * std::max(1.0, max_abs(y.J)))
          throw DomainError("the u field needs anti-Hermitian J");
        field = [k, kind, which](const ReducedPoint& z) { return u_field(k, kind, which, restrict_plus(z)); };
      }
      std::vector<ReducedPoint> traj;
      reduced_flow(y, field, rflow_t, rflow_steps, &traj);
      emit(rflow_opts, reduced_flow_table(traj, rflow_t).render(rflow_opts.format), out);
    } else if (reduce->parsed()) {
      const PhasePoint x = phase_point_from_json(read_json(reduce_point));
      const ReducedPoint y = project_to_slice(x);
      y.validate();
      emit(reduce_opts, to_json(y).dump(2) + "\n", out);
    } else if (spin->parsed()) {
      const Json input = read_json(spin_point);
      SpinCoordinates s;
      ReducedPoint y;
      if (from_spin_flag) {
        s = spin_from_json(input);
        y = from_spin(s);
      } else {
        y = reduced_point_from_json(input);
        s = to_spin(y);
      }
      Json result;
      result["point"] = to_json(y);
      result["spin"] = to_json(s);
      result["h1"] = s.p.sum();
      result["h_spin2"] = spin_hamiltonian_2(s);
      emit(spin_opts, result.dump(2) + "\n", out);
    } else if (bracket->parsed()) {
      const PhasePoint x = phase_point_from_json(read_json(bracket_point));
      const Observable F = parse_observable(bracket_f, x.n());
      const Observable H = parse_observable(bracket_h, x.n());
      std::ostringstream text;
      text << std::setprecision(17) << pb(parse_bracket(bracket_sel), F, H, x) << '\n';
      emit(bracket_opts, text.str(), out);
    } else if (dcheck->parsed()) {
      bool pass = false;
      const Json result = double_check(to_config(double_opts), pass);
      emit(double_opts, result.dump(2) + "\n", out);
      if (!pass) {
        err << "double check failed\n";
        exit_code = 1;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}

}  // namespace bihamkit
