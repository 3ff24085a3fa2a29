#pragma once
// Experiment suites shared by the command-line runner and the acceptance
// binary.  Each suite returns its JSON artifact and a list of named checks;
// nothing here touches the filesystem.

#include "nhtrap/bsymbols.hpp"
#include "nhtrap/commutant.hpp"
#include "nhtrap/config.hpp"
#include "nhtrap/fit.hpp"
#include "nhtrap/flow.hpp"
#include "nhtrap/resolvent.hpp"
#include "nhtrap/spaces.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace nhtrap {

using json = nlohmann::json;

struct Check {
  std::string name;
  bool passed = false;
  bool warning_only = false;  // failure is reported but does not fail the run
  std::string detail;
};

inline json to_json(const Check& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"warning_only", c.warning_only},
          {"detail", c.detail}};
}

struct SuiteResult {
  json data = json::object();
  std::vector<Check> checks;
  std::map<std::string, std::string> files;  // extra artifacts: name -> content

  bool passed(bool strict) const {
    return std::all_of(checks.begin(), checks.end(),
                       [&](const Check& c) { return c.passed || (c.warning_only && !strict); });
  }
};

// ---------------------------------------------------------------- helpers

inline ModelSpec model_from(const ExperimentConfig& c) {
  return inverted_oscillator({c.x_abs, c.width, c.strength, c.O_radius, c.energy_width});
}

inline CutoffFamily cutoffs_from(const ExperimentConfig& c) {
  return build_cutoffs(c.kappa, c.R, c.F, c.psi_width);
}

inline PhaseGrid grid_for(const ExperimentConfig& c, double h) {
  return make_grid(h, c.x_min, c.x_max, c.xi_max, c.min_points, c.n_cap);
}

inline BStructuralModel bmodel_from(const ExperimentConfig& c) {
  BStructuralModel m;
  m.m = c.b_m;
  m.c_d_sq = c.b_c_d_sq;
  m.c_plus_sq = c.b_c_plus_sq;
  m.c_minus_sq = c.b_c_minus_sq;
  m.beta_plus = c.b_beta_plus;
  m.nu_plus = c.b_nu_plus;
  m.nu_minus = c.b_nu_minus;
  m.alpha_t = c.b_alpha_t;
  m.alpha_t1 = c.b_alpha_t1;
  m.alpha_d1 = c.b_alpha_d1;
  m.p1 = c.b_p1;
  return m;
}

inline BCommutantParams bparams_from(const ExperimentConfig& c) {
  BCommutantParams p;
  p.s = c.b_s;
  p.kappa = c.b_kappa;
  p.R = c.b_R;
  p.F = c.b_F;
  p.M = c.b_M;
  p.psi_width = c.b_psi_width;
  return p;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// max/min of a positive sequence.
inline double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

/// Runs task(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Unit-norm coherent state centered at (x0, xi0) with width sqrt(h).
inline Eigen::VectorXcd coherent_state(const PhaseGrid& g, double x0, double xi0) {
  return position_bump(g, x0, std::sqrt(g.h()), xi0);
}

// ---------------------------------------------------------------- symbols

inline SuiteResult run_verify_symbols(const ExperimentConfig& cfg) {
  SuiteResult out;
  const ModelSpec model = model_from(cfg);
  const CutoffFamily cut = cutoffs_from(cfg);
  const CommutantSet cs = build_commutant(model, cut);
  const PhaseGrid grid = grid_for(cfg, cfg.h_list.front());

  // chi' chi + chi1^2 = 0 on a fine 1-D grid.
  double identity = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double t = 1.2 * cut.R() * i / 20000.0;
    const Jet<1> c = cut.chi(make_variable<1>(t, 0));
    const double c1 = cut.chi1(t);
    identity = std::max(identity, std::abs(c.derivatives()(0) * c.value() + c1 * c1));
  }
  const DecompositionResult dec = verify_decomposition(cs, model, grid);
  const double a_gamma = cs.a(0.0, 0.0);

  // e- vanishes wherever phi_+^2 <= R0 (in particular on the unstable manifold).
  double e_on_core = 0.0;
  for (int i = -200; i <= 200; ++i)
    for (int j = -200; j <= 200; ++j) {
      const double x = 0.005 * i, xi = 0.005 * j;
      const double fp = model.phi_plus(x, xi);
      if (fp * fp <= cut.R0()) e_on_core = std::max(e_on_core, std::abs(cs.e_minus(x, xi)));
    }

  const SymbolField p = SymbolField::sample(grid, model.p);
  const TrappedMask mask = trapped_sets(p, outside_position(cfg.escape_x), cfg.t_max, cfg.flow_dt,
                                        {cfg.energy_window});
  double trapped_radius = 0.0;
  long trapped_count = 0;
  for (Eigen::Index j = 0; j < grid.n_x(); ++j)
    for (Eigen::Index k = 0; k < grid.n_x(); ++k)
      if (mask.trapped(j, k)) {
        ++trapped_count;
        trapped_radius = std::max(trapped_radius, std::hypot(grid.x(j), grid.xi(k)));
      }

  out.data = {{"h", grid.h()},
              {"n_x", grid.n_x()},
              {"max_residual", dec.max_abs},
              {"max_lhs", dec.max_lhs},
              {"cutoff_identity_max", identity},
              {"a_at_gamma", a_gamma},
              {"chi0_kappa", cut.chi0(cut.kappa())},
              {"e_minus_on_core_max", e_on_core},
              {"trapped_nodes", trapped_count},
              {"trapped_radius", trapped_radius}};
  out.checks.push_back({"decomposition_residual", dec.max_abs <= 1e-10, false,
                        "max |residual| = " + fmt(dec.max_abs) + " (bound 1e-10)"});
  out.checks.push_back({"cutoff_identity", identity <= 1e-12, false,
                        "max |chi' chi + chi1^2| = " + fmt(identity)});
  out.checks.push_back({"a_elliptic_at_gamma", a_gamma > 0.0 && a_gamma == cut.chi0(cut.kappa()),
                        false, "a(0,0) = " + fmt(a_gamma)});
  out.checks.push_back({"e_minus_off_unstable_manifold", e_on_core == 0.0, false,
                        "max |e-| on {phi_+^2 <= R0} = " + fmt(e_on_core)});
  out.checks.push_back({"trapped_set_near_gamma", trapped_count > 0 && trapped_radius <= 0.1, false,
                        std::to_string(trapped_count) + " trapped nodes within radius " +
                            fmt(trapped_radius)});

  std::ostringstream residual_csv;
  residual_csv.precision(17);
  residual_csv << "x,xi,residual\n";
  for (Eigen::Index j = 0; j < grid.n_x(); ++j)
    for (Eigen::Index k = 0; k < grid.n_x(); ++k)
      residual_csv << grid.x(j) << ',' << grid.xi(k) << ',' << dec.residual(j, k) << '\n';
  out.files["residual.csv"] = residual_csv.str();
  std::ostringstream mask_csv;
  mask.write_csv(mask_csv);
  out.files["trapped.csv"] = mask_csv.str();
  return out;
}

// -------------------------------------------------------------- operators

struct PositivityResult {
  double h = 0.0;
  double min_ratio = 0.0;  // Rayleigh quotient / (2h)
  double max_ratio = 0.0;
};

/// Rayleigh quotients of i[Q+, Q-] on coherent states centered inside O.
inline PositivityResult positivity_transfer(const ModelSpec& model, const PhaseGrid& grid) {
  const ClosedForm chi_O = radial_plateau(2.0 * model.O_radius, 3.0 * model.O_radius);
  auto cut_off = [&chi_O](const ClosedForm& phi) {
    return ClosedForm([=](const auto& x, const auto& xi) {
      using T = std::decay_t<decltype(x)>;
      return T(phi(x, xi) * chi_O(x, xi));
    });
  };
  const Eigen::MatrixXcd Qp = weyl_quantize(cut_off(model.phi_plus), grid).entries;
  const Eigen::MatrixXcd Qm = weyl_quantize(cut_off(model.phi_minus), grid).entries;
  PositivityResult r{grid.h(), INFINITY, -INFINITY};
  const double rO = model.O_radius / 2.0;
  for (const Point c : {Point{0, 0}, Point{rO, 0}, Point{0, -rO}, Point{-rO / 2, rO / 2},
                        Point{rO / 2, rO / 2}}) {
    const Eigen::VectorXcd v = coherent_state(grid, c.x, c.xi);
    const Eigen::VectorXcd a = Qp * v;
    const Eigen::VectorXcd b = Qm * v;
    // <i[Q+,Q-]v, v> = i(<Q- v, Q+ v> - <Q+ v, Q- v>) for Hermitian Q+-.
    const double q = (cdouble(0, 1) * (a.dot(b) - b.dot(a))).real();
    r.min_ratio = std::min(r.min_ratio, q / (2.0 * grid.h()));
    r.max_ratio = std::max(r.max_ratio, q / (2.0 * grid.h()));
  }
  return r;
}

/// ||((i/h)[Op(a), Op(b)] - Op({a,b})) v|| over interior probes.
inline double commutator_law_defect(const ClosedForm& a, const ClosedForm& b, const PhaseGrid& grid) {
  const Eigen::MatrixXcd A = weyl_quantize(a, grid, SupportCheck::kSkip).entries;
  const Eigen::MatrixXcd B = weyl_quantize(b, grid, SupportCheck::kSkip).entries;
  const ClosedForm bracket = ClosedForm::value_only([a, b](double x, double xi) {
    const SymbolGradient ga = a.gradient(x, xi);
    const SymbolGradient gb = b.gradient(x, xi);
    return ga.dxi * gb.dx - ga.dx * gb.dxi;
  });
  const Eigen::MatrixXcd C = weyl_quantize(bracket, grid, SupportCheck::kSkip).entries;
  double worst = 0.0;
  for (double x0 : {-1.0, 0.0, 0.5}) {
    const Eigen::VectorXcd v = coherent_state(grid, x0, 0.3);
    const Eigen::VectorXcd Av = A * v, Bv = B * v;
    const Eigen::VectorXcd lhs = cdouble(0, 1.0 / grid.h()) * (A * Bv - B * Av);
    worst = std::max(worst, (lhs - C * v).norm());
  }
  return worst;
}

inline SuiteResult run_verify_operators(const ExperimentConfig& cfg) {
  SuiteResult out;
  const ModelSpec model = model_from(cfg);
  const CutoffFamily cut = cutoffs_from(cfg);
  const CommutantSet cs = build_commutant(model, cut);

  json d_records = json::array();
  std::vector<double> d_over_h;
  double off_support = 0.0;
  double hermitian = 0.0;
  double law = 0.0;
  for (double h : cfg.operator_h_list) {
    const PhaseGrid grid = grid_for(cfg, h);
    const OperatorCommutatorReport rep = verify_operator_commutator(model, cut, grid, cfg.operator_tol);
    d_over_h.push_back(rep.norm_D_over_h);
    off_support = std::max(off_support, rep.off_support_max);
    d_records.push_back({{"h", h}, {"n_x", rep.n_x}, {"norm_D", rep.norm_D},
                         {"norm_D_over_h", rep.norm_D_over_h}, {"off_support", rep.off_support_max},
                         {"passed", rep.passed}});
    for (const ClosedForm* f : {&cs.a, &cs.a_plus, &cs.e_minus})
      hermitian = std::max(hermitian, hermitian_defect(weyl_quantize(*f, grid).entries));
    law = std::max({law, commutator_law_defect(model.p, model.phi_plus, grid),
                    commutator_law_defect(model.p, model.phi_minus, grid),
                    commutator_law_defect(model.phi_plus, model.phi_minus, grid)});
  }

  json positivity = json::array();
  double pos_lo = INFINITY, pos_hi = -INFINITY;
  for (double h : cfg.h_list) {
    const PositivityResult r = positivity_transfer(model, grid_for(cfg, h));
    pos_lo = std::min(pos_lo, r.min_ratio);
    pos_hi = std::max(pos_hi, r.max_ratio);
    positivity.push_back({{"h", h}, {"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio}});
  }

  const double d_spread = d_over_h.empty() ? 1.0 : spread(d_over_h);
  out.data = {{"commutator_remainder", d_records},
              {"norm_D_over_h_spread", d_spread},
              {"off_support_max", off_support},
              {"hermitian_defect_max", hermitian},
              {"quadratic_commutator_defect", law},
              {"positivity", positivity}};
  out.checks.push_back({"remainder_bound", std::all_of(d_records.begin(), d_records.end(),
                                                       [](const json& r) { return r["passed"].get<bool>(); }),
                        false, "||D||/h <= " + fmt(cfg.operator_tol) + " at every h"});
  out.checks.push_back({"remainder_stability", d_spread <= 2.0, false,
                        "max/min of ||D||/h = " + fmt(d_spread) + " (bound 2)"});
  out.checks.push_back({"remainder_off_support", off_support <= 1e-8, false,
                        "max ||Dv||/||v|| off supp a = " + fmt(off_support) + " (bound 1e-8)"});
  out.checks.push_back({"hermitian_real_symbols", hermitian <= 1e-12, false,
                        "max relative Frobenius defect = " + fmt(hermitian)});
  out.checks.push_back({"quadratic_commutator_exact", law <= 1e-8, false,
                        "max interior defect = " + fmt(law)});
  out.checks.push_back({"positivity_transfer", pos_lo >= 0.95 && pos_hi <= 1.05, false,
                        "Rayleigh quotient / 2h in [" + fmt(pos_lo) + ", " + fmt(pos_hi) + "]"});
  return out;
}

// ---------------------------------------------------------------- bsymbols

inline SuiteResult run_verify_bsymbols(const ExperimentConfig& cfg) {
  SuiteResult out;
  const BStructuralModel mdl = bmodel_from(cfg);
  const BCommutantParams base = bparams_from(cfg);
  BGrid grid;
  grid.nodes = static_cast<int>(cfg.b_nodes);

  const BVerification plain = verify_b_decomposition(mdl, base, grid);
  BCommutantParams weighted = base;
  weighted.r = -1.0;
  const BVerification neg = verify_b_weighted(mdl, weighted, grid);
  BCommutantParams reversed = base;
  reversed.r = 1.0;
  reversed.orientation = BOrientation::kReversed;
  const BVerification rev = verify_b_weighted(mdl, reversed, grid);

  // Parabolic threshold in the worked configuration, in a tall tau box where
  // the termwise bound 2|beta+| u_max / (c_d^2 - c~^2) is approached.
  BStructuralModel para;
  para.beta_plus = 1.0;
  para.c_d_sq = 1.0;
  para.c_plus_sq = 1.0;
  const ParabolicBox tall{0.5, 50.0, 0.4, 201};
  const double threshold = parabolic_check(para, 2.0, tall).M_threshold;
  const double expected = 2.0 * para.beta_plus * 0.5 / (para.c_d_sq - 0.5);
  const double rel = std::abs(threshold - expected) / expected;

  auto summary = [](const BVerification& v) {
    return json{{"max_residual", v.max_residual}, {"max_lhs", v.max_lhs}, {"points", v.points},
                {"a_r_at_gamma", v.a_r_at_gamma}};
  };
  out.data = {{"default", summary(plain)},
              {"weighted_r_minus_1", summary(neg)},
              {"reversed_r_plus_1", summary(rev)},
              {"parabolic", {{"threshold", threshold}, {"termwise_bound", expected},
                             {"relative_gap", rel}, {"tau_box", tall.tau_max}}}};
  auto residual_check = [&](const std::string& name, const BVerification& v) {
    out.checks.push_back({name, v.max_residual <= 1e-9, false,
                          "max residual = " + fmt(v.max_residual) + " over " +
                              std::to_string(v.points) + " nodes"});
  };
  residual_check("b_decomposition_default", plain);
  residual_check("b_weighted_r_minus_1", neg);
  residual_check("b_reversed_r_plus_1", rev);
  out.checks.push_back({"a_r_elliptic_at_gamma", neg.a_r_at_gamma > 0.0 && rev.a_r_at_gamma > 0.0,
                        false, "a_r(Gamma) = " + fmt(neg.a_r_at_gamma)});
  out.checks.push_back({"parabolic_threshold", rel <= 0.05, false,
                        "threshold " + fmt(threshold) + " vs " + fmt(expected)});
  return out;
}

// ------------------------------------------------------------------ norms

inline SuiteResult run_norms(const ExperimentConfig& cfg, int threads = 1) {
  SuiteResult out;
  const ModelSpec model = model_from(cfg);
  const std::size_t count = cfg.norms_h_list.size();
  std::vector<NormEquivalence> eq(count), control(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const PhaseGrid grid = grid_for(cfg, cfg.norms_h_list[i]);
    eq[i] = check_norm_equivalence(build_frame(model, grid));
    // Transversality broken: both defining functions cut out the same manifold.
    control[i] = check_norm_equivalence(
        build_frame(model, grid, FrameOptions{model.phi_plus, model.phi_plus}));
  });
  json rows = json::array();
  double c_min = INFINITY, c_upper = 0.0;
  std::vector<double> control_over_h;
  for (std::size_t i = 0; i < count; ++i) {
    const double h = cfg.norms_h_list[i];
    rows.push_back({{"h", h}, {"c_lower", eq[i].c_lower}, {"C_upper", eq[i].C_upper},
                    {"control_c_lower", control[i].c_lower}});
    c_min = std::min(c_min, eq[i].c_lower);
    c_upper = std::max(c_upper, eq[i].C_upper);
    control_over_h.push_back(control[i].c_lower / h);
  }
  out.data = {{"equivalence", rows}};
  out.checks.push_back({"norm_equivalence", c_min >= cfg.c_lower_min && c_upper <= 1.0, false,
                        "min c_lower = " + fmt(c_min) + " (bound " + fmt(cfg.c_lower_min) + ")"});
  if (count >= 2) {
    const auto [hmin, hmax] = std::minmax_element(cfg.norms_h_list.begin(), cfg.norms_h_list.end());
    const std::size_t i_min = static_cast<std::size_t>(hmin - cfg.norms_h_list.begin());
    const std::size_t i_max = static_cast<std::size_t>(hmax - cfg.norms_h_list.begin());
    const double decay = control[i_min].c_lower / control[i_max].c_lower;
    const double ratio = *hmin / *hmax;
    const double s = spread(control_over_h);
    out.data["control_c_lower_over_h_spread"] = s;
    // Least-squares slope of log c_lower against log h; 1 means proportional to h.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      mx += std::log(cfg.norms_h_list[i]);
      my += std::log(control[i].c_lower);
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double dx = std::log(cfg.norms_h_list[i]) - mx;
      sxy += dx * (std::log(control[i].c_lower) - my);
      sxx += dx * dx;
    }
    const double exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    out.data["control_c_lower_exponent"] = exponent;
    out.checks.push_back({"negative_control_decays_like_h",
                          s <= 2.0 && decay <= 2.0 * ratio && decay >= 0.5 * ratio, false,
                          "c_lower ratio " + fmt(decay) + " over h ratio " + fmt(ratio) +
                              ", spread of c_lower/h = " + fmt(s) +
                              ", log-log exponent " + fmt(exponent)});
  }
  return out;
}

// ---------------------------------------------------------------- scaling

struct ScalingOutcome {
  std::vector<ScalingRecord> records;  // h strictly decreasing
  std::vector<SampleStatistics> samples;
  std::vector<double> conditioning;
};

enum class NormSelector { kL2, kIso, kSandwich };

inline FitResult fit_scaling(const std::vector<ScalingRecord>& records, NormSelector which) {
  std::vector<double> h, v;
  for (const auto& r : records) {
    h.push_back(r.h);
    v.push_back(which == NormSelector::kL2 ? r.norm_l2
                : which == NormSelector::kIso ? r.norm_iso
                                              : r.norm_sandwich);
  }
  return fit_models(h, v);
}

inline json to_json(const ScalingRecord& r, bool with_time) {
  return {{"h", r.h}, {"n_x", r.n_x}, {"norm_l2", r.norm_l2}, {"norm_iso", r.norm_iso},
          {"norm_sandwich", r.norm_sandwich}, {"wall_time_s", with_time ? r.wall_time : 0.0},
          {"converged", r.converged}};
}

inline json to_json(const FitResult& f) {
  return {{"power", {{"C", std::exp(f.power.log_C)}, {"alpha", f.power.alpha},
                     {"residual", f.power.residual}}},
          {"log", {{"c1", f.log.c1}, {"c2", f.log.c2}, {"residual", f.log.residual}}},
          {"winner", f.winner_name()},
          {"improvement", f.improvement}};
}

inline ScalingOutcome compute_scaling(const ExperimentConfig& cfg, int threads = 1) {
  std::vector<double> hs = cfg.h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  if (std::adjacent_find(hs.begin(), hs.end()) != hs.end())
    throw std::invalid_argument("scaling: duplicate h values");
  const ModelSpec model = model_from(cfg);
  ScalingOutcome out;
  out.records.resize(hs.size());
  out.samples.resize(hs.size());
  out.conditioning.resize(hs.size());
  parallel_for(hs.size(), threads, [&](std::size_t i) {
    const double h = hs[i];
    const auto start = std::chrono::steady_clock::now();
    const PhaseGrid grid = grid_for(cfg, h);
    const NormFrame frame = build_frame(model, grid);
    const Resolvent R(model, grid, cdouble(cfg.z_re, cfg.im_z_coeff * h * h), cfg.im_z_bound);
    ScalingRecord rec = resolvent_norms(
        R, frame, {cfg.norm_tol, static_cast<int>(cfg.max_iter), static_cast<std::uint64_t>(cfg.seed)});
    out.samples[i] = check_theorem1_samples(R, frame, static_cast<int>(cfg.samples),
                                            static_cast<std::uint64_t>(cfg.seed) + i);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.conditioning[i] = frame.condition_number();
    out.records[i] = rec;
  });
  return out;
}

/// Acceptance checks on a completed sweep.
inline std::vector<Check> scaling_checks(const ScalingOutcome& s, json& data) {
  std::vector<Check> checks;
  const auto& rec = s.records;
  bool converged = true, conditioned = true;
  std::vector<double> iso_h, sw_h, l2_h, weak;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    converged = converged && rec[i].converged;
    conditioned = conditioned && s.conditioning[i] <= 1e14;
    iso_h.push_back(rec[i].h * rec[i].norm_iso);
    sw_h.push_back(rec[i].h * rec[i].norm_sandwich);
    l2_h.push_back(rec[i].h * rec[i].norm_l2);
    weak.push_back(s.samples[i].weak_max);
  }
  checks.push_back({"norm_estimates_converged", converged, false, "Lanczos residual criterion"});
  checks.push_back({"gram_conditioning", conditioned, true, "cond(G) <= 1e14"});
  if (rec.size() < 2) return checks;

  const double iso_spread = spread(iso_h), sw_spread = spread(sw_h), weak_spread = spread(weak);
  bool monotone = true;
  for (std::size_t i = 1; i < l2_h.size(); ++i) monotone = monotone && l2_h[i] > l2_h[i - 1];
  data["h_norm_iso_spread"] = iso_spread;
  data["h_norm_sandwich_spread"] = sw_spread;
  data["weak_estimate_spread"] = weak_spread;
  data["h_norm_l2_monotone"] = monotone;
  checks.push_back({"iso_scaling_bounded", iso_spread <= 3.0, false,
                    "max/min h*norm_iso = " + fmt(iso_spread) + " (bound 3)"});
  checks.push_back({"sandwich_scaling_bounded", sw_spread <= 3.0, false,
                    "max/min h*norm_sandwich = " + fmt(sw_spread) + " (bound 3)"});
  checks.push_back({"l2_loss_monotone", monotone, false, "h*norm_l2 increasing as h decreases"});
  checks.push_back({"weak_estimate_stable", weak_spread <= 2.0, false,
                    "max/min of the sampled constant = " + fmt(weak_spread) + " (bound 2)"});
  if (rec.size() >= 4) {
    const FitResult iso = fit_scaling(rec, NormSelector::kIso);
    const FitResult l2 = fit_scaling(rec, NormSelector::kL2);
    checks.push_back({"iso_power_exponent", iso.power.alpha >= 0.9 && iso.power.alpha <= 1.1, false,
                      "alpha = " + fmt(iso.power.alpha) + " (range [0.9, 1.1])"});
    checks.push_back({"l2_log_model_wins", l2.winner == FitWinner::kLog, false,
                      "residual log " + fmt(l2.log.residual) + " vs power " + fmt(l2.power.residual)});
    checks.push_back({"l2_log_margin", l2.improvement >= 0.1, true,
                      "residual improvement " + fmt(100.0 * l2.improvement) + "% (warn below 10%)"});
  }
  return checks;
}

inline SuiteResult run_scaling(const ExperimentConfig& cfg, int threads = 1) {
  const ScalingOutcome s = compute_scaling(cfg, threads);
  SuiteResult out;
  json records = json::array(), samples = json::array();
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    records.push_back(to_json(s.records[i], cfg.wall_time));
    samples.push_back({{"h", s.records[i].h}, {"weak_max", s.samples[i].weak_max},
                       {"weak_mean", s.samples[i].weak_mean}, {"iso_max", s.samples[i].iso_max},
                       {"iso_mean", s.samples[i].iso_mean},
                       {"gram_condition", s.conditioning[i]}});
  }
  out.data = {{"records", records}, {"samples", samples}};
  if (s.records.size() >= 4) {
    out.data["fits"] = {{"norm_l2", to_json(fit_scaling(s.records, NormSelector::kL2))},
                        {"norm_iso", to_json(fit_scaling(s.records, NormSelector::kIso))},
                        {"norm_sandwich", to_json(fit_scaling(s.records, NormSelector::kSandwich))}};
  } else {
    out.data["fits"] = {{"error", "fit_scaling: need at least 4 records"}};
  }
  out.checks = scaling_checks(s, out.data);

  std::ostringstream csv;
  csv.precision(17);
  csv << "h,n_x,norm_l2,norm_iso,norm_sandwich,wall_time_s\n";
  for (const auto& r : s.records)
    csv << r.h << ',' << r.n_x << ',' << r.norm_l2 << ',' << r.norm_iso << ',' << r.norm_sandwich
        << ',' << (cfg.wall_time ? r.wall_time : 0.0) << '\n';
  out.files["records.csv"] = csv.str();
  return out;
}

}  // namespace nhtrap
