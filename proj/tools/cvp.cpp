// cvp: causal variational principles on finite weighted point clouds.
//
// Subcommands cover the full pipeline: instance generation, critical
// weights, Euler-Lagrange checks, the linearized field operator, surface
// layer diagnostics, local and global weak solves, Green's operators, the
// exact-sequence verifier and causal cone structures. Every run writes a
// manifest next to its primary output. Exit codes: 0 pass, 1 check failed,
// 2 usage or configuration error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvp/io.hpp"

using namespace cvp;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string json_kv(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + k + "\": " + v;
  }
  return out + "}";
}

std::string manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

CoveringParams covering_params_from(const Instance& inst, double stride, double height,
                                    double delta, double t_start, int grid_n, int trials,
                                    bool enforce_hyp, uint64_t seed, double sign) {
  CoveringParams p;
  p.stride = stride;
  p.height = height;
  p.delta = delta;
  p.grid_n = grid_n;
  p.time_sign = sign;
  p.lens.hyp_mode = enforce_hyp ? HypMode::Enforce : HypMode::Report;
  p.lens.hyp_trials = trials;
  p.lens.seed = seed;
  double lo = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < inst.size(); ++i) lo = std::min(lo, sign * inst.time(i));
  p.t_start = lo + t_start;  // t_start is an offset from the earliest slice
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal variational principles toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 42;
  app.add_option("--seed", seed, "seed for deterministic multi-start routines");

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a lattice instance");
  std::string gen_lattice = "8x8", gen_kernel = "iso_bump", gen_out = "instance.json";
  std::string gen_periodic = "1";
  double gen_spacing = 1.0, gen_range = 1.6, gen_amp = 1.0, gen_slope = 1.0, gen_s = 0.0;
  gen->add_option("--lattice", gen_lattice, "points per axis, e.g. 16x16 (time axis first)");
  gen->add_option("--spacing", gen_spacing, "lattice spacing");
  gen->add_option("--kernel", gen_kernel, "iso_bump | lightcone_bump");
  gen->add_option("--range", gen_range, "kernel support radius");
  gen->add_option("--amplitude", gen_amp, "kernel amplitude");
  gen->add_option("--cone-slope", gen_slope, "lightcone slope kappa");
  gen->add_option("--periodic-axes", gen_periodic, "comma list of periodic axes, e.g. 1 or 1,2");
  gen->add_option("--s-param", gen_s, "volume parameter (default: median kernel row sum)");
  gen->add_option("--out", gen_out, "output instance file");

  // ---- critical -----------------------------------------------------------
  auto* critical = app.add_subcommand("critical", "solve for critical weights");
  std::string crit_in = "instance.json", crit_out = "critical.json";
  critical->add_option("--instance", crit_in, "input instance");
  critical->add_option("--out", crit_out, "output instance with solved weights");

  // ---- check-el -------------------------------------------------------------
  auto* checkel = app.add_subcommand("check-el", "verify the restricted EL equations");
  std::string el_in = "instance.json";
  double el_tol = 1e-10;
  checkel->add_option("--instance", el_in, "input instance");
  checkel->add_option("--tol", el_tol, "tolerance");

  // ---- delta ----------------------------------------------------------------
  auto* delta = app.add_subcommand("delta", "assemble the linearized field operator");
  std::string delta_in = "instance.json", delta_dump;
  delta->add_option("--instance", delta_in, "input instance");
  delta->add_option("--dump", delta_dump, "write the operator matrix (row-major CSV)");

  // ---- energy-check ----------------------------------------------------------
  auto* energy = app.add_subcommand("energy-check", "energy identity finite-difference check");
  std::string en_in = "instance.json";
  double en_t = 0.5, en_h = 0.02, en_delta = 0.8, en_tmin = 0.0, en_tmax = 1.0;
  uint64_t en_jets = 3;
  energy->add_option("--instance", en_in, "input instance");
  energy->add_option("--t", en_t, "evaluation time");
  energy->add_option("--step", en_h, "finite-difference step");
  energy->add_option("--delta", en_delta, "softening width");
  energy->add_option("--t-min", en_tmin, "foliation start");
  energy->add_option("--t-max", en_tmax, "foliation end");
  energy->add_option("--jets", en_jets, "number of random jets");

  // ---- hyperbolicity ---------------------------------------------------------
  auto* hyp = app.add_subcommand("hyperbolicity", "verify the hyperbolicity condition");
  std::string hyp_in = "instance.json";
  double hyp_t = 0.5, hyp_delta = 0.8;
  int hyp_trials = 64;
  hyp->add_option("--instance", hyp_in, "input instance");
  hyp->add_option("--t", hyp_t, "time parameter");
  hyp->add_option("--delta", hyp_delta, "softening width");
  hyp->add_option("--trials", hyp_trials, "multistart trials");

  // ---- solve-local ------------------------------------------------------------
  auto* local = app.add_subcommand("solve-local", "weak Cauchy solve in one lens");
  std::string loc_in = "instance.json", loc_lens = "lens.json", loc_w = "w.json",
              loc_out = "v.json";
  bool loc_enforce_hyp = false;
  local->add_option("--instance", loc_in, "input instance");
  local->add_option("--lens", loc_lens, "lens file: {t_min, t_max, delta, grid_n, U?}");
  local->add_option("--inhom", loc_w, "inhomogeneity jet file");
  local->add_option("--out", loc_out, "solution jet file");
  local->add_flag("--enforce-hyperbolicity", loc_enforce_hyp,
                  "fail instead of reporting hyperbolicity witnesses");

  // ---- glue ----------------------------------------------------------------
  auto* glue = app.add_subcommand("glue", "global weak solution by gluing");
  std::string gl_in = "instance.json", gl_w = "w.json", gl_out = "v.json",
              gl_trace = "trace.json";
  double gl_stride = 7.0, gl_height = 9.0, gl_delta = 0.8, gl_tstart = -0.75, gl_tol = 1e-12;
  int gl_grid = 13, gl_maxit = 32, gl_trials = 8;
  bool gl_enforce_hyp = false;
  glue->add_option("--instance", gl_in, "input instance");
  glue->add_option("--inhom", gl_w, "inhomogeneity jet file");
  glue->add_option("--out", gl_out, "solution jet file");
  glue->add_option("--trace", gl_trace, "iteration trace file");
  glue->add_option("--stride", gl_stride, "lens stride");
  glue->add_option("--height", gl_height, "lens height");
  glue->add_option("--delta", gl_delta, "softening width");
  glue->add_option("--t-start", gl_tstart, "first lens t_min, offset from the earliest slice");
  glue->add_option("--grid-n", gl_grid, "foliation grid points");
  glue->add_option("--max-iter", gl_maxit, "iteration cap");
  glue->add_option("--tol", gl_tol, "residual tolerance (relative)");
  glue->add_option("--trials", gl_trials, "hyperbolicity trials per grid time");
  glue->add_flag("--enforce-hyperbolicity", gl_enforce_hyp, "fail on hyperbolicity witnesses");

  // ---- green ----------------------------------------------------------------
  auto* green = app.add_subcommand("green", "assemble causal Green's operators");
  std::string gr_in = "instance.json", gr_out = "gs.json";
  double gr_stride = 7.0, gr_height = 9.0, gr_delta = 0.8, gr_tstart = -0.75;
  int gr_grid = 13, gr_trials = 4;
  green->add_option("--instance", gr_in, "input instance");
  green->add_option("--out", gr_out, "output system file (matrices as CSV side files)");
  green->add_option("--stride", gr_stride, "lens stride");
  green->add_option("--height", gr_height, "lens height");
  green->add_option("--delta", gr_delta, "softening width");
  green->add_option("--t-start", gr_tstart, "first lens offset");
  green->add_option("--grid-n", gr_grid, "foliation grid points");
  green->add_option("--trials", gr_trials, "hyperbolicity trials");

  // ---- exact-seq -------------------------------------------------------------
  auto* exact = app.add_subcommand("exact-seq", "verify the exact sequence");
  std::string ex_in = "instance.json", ex_report = "exact_seq.json";
  double ex_tol = 1e-8;
  exact->add_option("--instance", ex_in, "input instance");
  exact->add_option("--tol", ex_tol, "check tolerance");
  exact->add_option("--report", ex_report, "output report file");

  // ---- cones ----------------------------------------------------------------
  auto* cones = app.add_subcommand("cones", "causal relations from retarded supports");
  std::string cn_in = "instance.json", cn_out = "rel.csv", cn_dot, cn_slices;
  double cn_rnb = 1.0;
  cones->add_option("--instance", cn_in, "input instance");
  cones->add_option("--out", cn_out, "closure pairs CSV");
  cones->add_option("--dot", cn_dot, "DOT digraph output");
  cones->add_option("--slices", cn_slices, "per-time-slice cone cross sections CSV");
  cones->add_option("--neighborhood", cn_rnb, "neighborhood radius (default lattice scale)");

  // the green/exact-seq/cones pipelines share the covering options
  for (auto* sub : {exact, cones}) {
    sub->add_option("--cov-stride", gr_stride, "lens stride");
    sub->add_option("--cov-height", gr_height, "lens height");
    sub->add_option("--cov-delta", gr_delta, "softening width");
    sub->add_option("--cov-t-start", gr_tstart, "first lens offset");
    sub->add_option("--cov-grid-n", gr_grid, "foliation grid points");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Timer timer;
  try {
    if (*gen) {
      LatticeSpec spec;
      std::vector<int> extent;
      for (std::size_t pos = 0; pos < gen_lattice.size();) {
        std::size_t next = gen_lattice.find('x', pos);
        extent.push_back(std::stoi(gen_lattice.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      spec.dim = static_cast<int>(extent.size());
      spec.extent = extent;
      spec.spacing = gen_spacing;
      spec.kernel.kind = kernel_kind_from_name(gen_kernel);
      spec.kernel.range = gen_range;
      spec.kernel.amplitude = gen_amp;
      spec.kernel.cone_slope = gen_slope;
      spec.periodic_axes.assign(spec.dim, false);
      if (!gen_periodic.empty()) {
        std::stringstream ss(gen_periodic);
        std::string tok;
        while (std::getline(ss, tok, ','))
          if (!tok.empty()) spec.periodic_axes.at(std::stoi(tok)) = true;
      }
      spec.s_param = gen_s;
      Instance inst = generate_lattice(spec);
      write_instance(inst, gen_out);
      write_manifest(manifest_path(gen_out), "gen", {},
                     json_kv({{"lattice", "\"" + gen_lattice + "\""},
                              {"kernel", "\"" + gen_kernel + "\""},
                              {"range", format_double(gen_range)},
                              {"s_param", format_double(inst.s_param)}}),
                     timer.seconds());
      std::cout << "wrote " << gen_out << " with " << inst.size() << " points\n";
      return 0;
    }

    if (*critical) {
      Instance inst = read_instance(crit_in);
      Instance crit = solve_critical_weights(inst);
      write_instance(crit, crit_out);
      ElReport rep = eval_ell(crit);
      write_manifest(manifest_path(crit_out), "critical", {crit_in},
                     json_kv({{"max_abs_ell", format_double(rep.max_abs_ell)}}),
                     timer.seconds());
      std::cout << "max |ell| = " << rep.max_abs_ell << "\n";
      return 0;
    }

    if (*checkel) {
      Instance inst = read_instance(el_in);
      ElReport rep = eval_ell(inst);
      JetSpace test = make_test_space(inst, rep, el_tol);
      ElCheck chk = check_restricted_el(inst, test, el_tol);
      double max_grad = 0.0;
      for (Index c = 0; c < test.dim(); ++c)
        for (Index i = 0; i < inst.size(); ++i)
          max_grad = std::max(max_grad, std::abs(jet_vector(inst, test.basis.col(c), i)
                                                     .dot(rep.grad_ell.row(i))));
      std::cout << json_kv({{"max_abs_ell", format_double(rep.max_abs_ell)},
                            {"max_grad_norm_on_test", format_double(max_grad)},
                            {"worst_violation", format_double(chk.worst)},
                            {"worst_point", std::to_string(chk.worst_point)},
                            {"pass", chk.pass ? "true" : "false"}})
                << "\n";
      write_manifest(el_in + ".check-el.manifest.json", "check-el", {el_in},
                     json_kv({{"tol", format_double(el_tol)},
                              {"worst", format_double(chk.worst)}}),
                     timer.seconds());
      return chk.pass ? 0 : 1;
    }

    if (*delta) {
      Instance inst = read_instance(delta_in);
      LinOp op = assemble_delta(inst);
      if (!delta_dump.empty()) {
        write_matrix_csv(op.D, delta_dump);
        write_manifest(manifest_path(delta_dump), "delta", {delta_in}, "{}", timer.seconds());
      }
      std::cout << "assembled " << op.D.rows() << "x" << op.D.cols() << " operator\n";
      return 0;
    }

    if (*energy) {
      Instance inst = read_instance(en_in);
      Workspace ws = make_workspace(inst);
      Foliation fol = make_foliation(inst, en_tmin, en_tmax, en_delta, 9);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      bool ok = true;
      for (uint64_t k = 0; k < en_jets; ++k) {
        Vec v(inst.coeff_count());
        for (Index c = 0; c < v.size(); ++c) v[c] = gauss(rng);
        EnergyCheck c1 = energy_identity_check(inst, fol, v, en_t, en_h, ws.delta, ws.d2);
        EnergyCheck c2 = energy_identity_check(inst, fol, v, en_t, en_h / 2, ws.delta, ws.d2);
        const double order = std::log2(std::max(c1.gap, 1e-300) / std::max(c2.gap, 1e-300));
        std::cout << "jet " << k << ": lhs " << c1.lhs << " rhs " << c1.rhs << " gap " << c1.gap
                  << " order " << order << "\n";
        ok = ok && order >= 1.9;
      }
      write_manifest(en_in + ".energy.manifest.json", "energy-check", {en_in},
                     json_kv({{"t", format_double(en_t)}, {"h", format_double(en_h)}}),
                     timer.seconds());
      return ok ? 0 : 1;
    }

    if (*hyp) {
      Instance inst = read_instance(hyp_in);
      Workspace ws = make_workspace(inst);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (Index i = 0; i < inst.size(); ++i) {
        lo = std::min(lo, inst.time(i));
        hi = std::max(hi, inst.time(i));
      }
      Foliation fol = make_foliation(inst, lo, hi, hyp_delta, 9);
      JetSpace vary = build_space_full(inst, Mat());
      HypReport rep = verify_hyperbolicity(inst, fol, hyp_t, hyp_trials, vary, ws.d2, seed);
      std::string witness = "null";
      if (!rep.pass && rep.witness.size()) witness = "\"(jet with negative margin)\"";
      std::cout << json_kv({{"pass", rep.pass ? "true" : "false"},
                            {"C", rep.pass ? format_double(rep.C) : "null"},
                            {"best_ratio", format_double(rep.best_ratio)},
                            {"certified", rep.certified ? "true" : "false"},
                            {"cert_ratio", format_double(rep.cert_ratio)},
                            {"degenerate_rhs", rep.degenerate_rhs ? "true" : "false"},
                            {"witness", witness}})
                << "\n";
      write_manifest(hyp_in + ".hyp.manifest.json", "hyperbolicity", {hyp_in},
                     json_kv({{"t", format_double(hyp_t)},
                              {"trials", std::to_string(hyp_trials)}}),
                     timer.seconds());
      return rep.pass ? 0 : 1;
    }

    if (*local) {
      Instance inst = read_instance(loc_in);
      Workspace ws = make_workspace(inst);
      std::ifstream lf(loc_lens);
      if (!lf) throw CvpError("cannot open lens file " + loc_lens);
      nlohmann::json lj;
      lf >> lj;
      Foliation fol = make_foliation(inst, lj.at("t_min").get<double>(),
                                     lj.at("t_max").get<double>(), lj.at("delta").get<double>(),
                                     lj.value("grid_n", 9));
      PointSet U(inst.size(), true);
      if (lj.contains("U") && lj.at("U").is_array()) {
        U.assign(inst.size(), false);
        for (const auto& i : lj.at("U")) U.at(i.get<Index>()) = true;
      }
      fol.U = U;
      JetSpace vary = build_space_full(inst, Mat());
      LensOptions opt;
      opt.hyp_mode = loc_enforce_hyp ? HypMode::Enforce : HypMode::Report;
      opt.seed = seed;
      LensRegion lens = build_lens(ws, U, fol, vary, opt);
      Vec w = read_jet(inst, loc_w);
      WeakSolution sol = solve_weak(ws, lens, w);
      write_jet(inst, sol.v, loc_out);
      write_manifest(manifest_path(loc_out), "solve-local", {loc_in, loc_lens, loc_w},
                     json_kv({{"gamma", format_double(sol.gamma)},
                              {"residual", format_double(sol.residual)},
                              {"hyperbolicity_pass", lens.hyp_all_pass ? "true" : "false"}}),
                     timer.seconds());
      std::cout << "Gamma = " << sol.gamma << ", residual = " << sol.residual << "\n";
      return 0;
    }

    if (*glue) {
      Instance inst = read_instance(gl_in);
      Workspace ws = make_workspace(inst);
      JetSpace vary = build_space_full(inst, Mat());
      CoveringParams p = covering_params_from(inst, gl_stride, gl_height, gl_delta, gl_tstart,
                                              gl_grid, gl_trials, gl_enforce_hyp, seed, 1.0);
      Covering cov = build_covering(ws, p, vary);
      Vec w = read_jet(inst, gl_w);
      GlueResult res = glue_global(ws, cov, w, gl_maxit, gl_tol);
      write_jet(inst, res.v, gl_out);
      {
        std::ofstream tr(gl_trace);
        tr << "{\n  \"iterations\": " << res.trace.iterations << ",\n  \"residual_norm\": [";
        for (std::size_t k = 0; k < res.trace.residual_norm.size(); ++k)
          tr << (k ? ", " : "") << format_double(res.trace.residual_norm[k]);
        tr << "],\n  \"residual_min_time\": [";
        for (std::size_t k = 0; k < res.trace.residual_min_time.size(); ++k)
          tr << (k ? ", " : "") << format_double(res.trace.residual_min_time[k]);
        tr << "],\n  \"pieces\": [";
        for (std::size_t k = 0; k < res.trace.pieces.size(); ++k) {
          const auto& pc = res.trace.pieces[k];
          tr << (k ? ", " : "")
             << json_kv({{"iteration", std::to_string(pc.iteration)},
                         {"lens", std::to_string(pc.lens)},
                         {"norm", format_double(pc.piece_norm)},
                         {"solve_residual", format_double(pc.solve_residual)}});
        }
        tr << "],\n  \"final_residual\": " << format_double(res.trace.final_residual)
           << ",\n  \"finished_in_ftop\": " << (res.trace.finished_in_ftop ? "true" : "false")
           << "\n}\n";
      }
      write_manifest(manifest_path(gl_out), "glue", {gl_in, gl_w},
                     json_kv({{"iterations", std::to_string(res.trace.iterations)},
                              {"final_residual", format_double(res.trace.final_residual)}}),
                     timer.seconds());
      std::cout << "glued in " << res.trace.iterations
                << " iterations, final residual = " << res.trace.final_residual << "\n";
      return 0;
    }

    if (*green || *exact || *cones) {
      // all three share the Green's system assembly path
      const std::string in_path = *green ? gr_in : (*exact ? ex_in : cn_in);
      Instance inst = read_instance(in_path);
      Workspace ws = make_workspace(inst);
      JetSpace vary = build_space_full(inst, Mat());
      CoveringParams pf = covering_params_from(inst, gr_stride, gr_height, gr_delta, gr_tstart,
                                               gr_grid, gr_trials, false, seed, 1.0);
      CoveringParams pp = covering_params_from(inst, gr_stride, gr_height, gr_delta, gr_tstart,
                                               gr_grid, gr_trials, false, seed, -1.0);
      Covering fut = build_covering(ws, pf, vary);
      Covering past = build_covering(ws, pp, vary);
      GreensSystem gs = assemble_greens(ws, fut, past);

      if (*green) {
        write_matrix_csv(gs.S_ret, gr_out + ".S_ret.csv");
        write_matrix_csv(gs.S_adv, gr_out + ".S_adv.csv");
        write_matrix_csv(gs.G, gr_out + ".G.csv");
        std::ofstream out(gr_out);
        out << "{\n  \"admissible_points\": [";
        bool first = true;
        for (Index i = 0; i < inst.size(); ++i)
          if (gs.admissible[i]) {
            out << (first ? "" : ", ") << i;
            first = false;
          }
        out << "],\n  \"matrices\": [\"" << gr_out << ".S_ret.csv\", \"" << gr_out
            << ".S_adv.csv\", \"" << gr_out << ".G.csv\"],\n  \"covering\": "
            << json_kv({{"stride", format_double(gr_stride)},
                        {"height", format_double(gr_height)},
                        {"delta", format_double(gr_delta)}})
            << "\n}\n";
        write_manifest(manifest_path(gr_out), "green", {gr_in}, "{}", timer.seconds());
        std::cout << "assembled Green's system over " << set_count(gs.admissible)
                  << " admissible points\n";
        return 0;
      }

      if (*exact) {
        SequenceSpaces sp = extract_sequence_spaces(ws, gs, vary, ex_tol);
        auto checks = verify_exact_sequence(ws, gs, sp, ex_tol);
        std::ofstream out(ex_report);
        out << "{\n  \"dims\": "
            << json_kv({{"J0_testlike", std::to_string(sp.J0_testlike.dim())},
                        {"J0_dual", std::to_string(sp.J0_dual.dim())},
                        {"J_sc", std::to_string(sp.J_sc.dim())},
                        {"J_sc_dual", std::to_string(sp.J_sc_dual.dim())}})
            << ",\n  \"checks\": [\n";
        bool all = true;
        for (std::size_t k = 0; k < checks.size(); ++k) {
          const auto& c = checks[k];
          all = all && c.pass;
          out << (k ? ",\n" : "") << "    "
              << json_kv({{"name", "\"" + c.name + "\""},
                          {"pass", c.pass ? "true" : "false"},
                          {"vacuous", c.vacuous ? "true" : "false"},
                          {"residual", format_double(c.residual)}});
          std::cout << (c.pass ? "PASS " : "FAIL ") << (c.vacuous ? "(vacuous) " : "") << c.name
                    << "  residual " << c.residual << "\n";
        }
        out << "\n  ]\n}\n";
        write_manifest(manifest_path(ex_report), "exact-seq", {ex_in},
                       json_kv({{"tol", format_double(ex_tol)}}), timer.seconds());
        return all ? 0 : 1;
      }

      // cones
      HatRResult hat = build_hatR(ws, gs, cn_rnb);
      CausalRelation closed = transitive_closure(hat.rel);
      write_relation_csv(closed, cn_out);
      if (!cn_dot.empty()) write_relation_dot(closed, cn_dot);
      if (!cn_slices.empty()) {
        std::ofstream sl(cn_slices);
        sl << "source,slice_time,point,in_future\n";
        for (Index x = 0; x < inst.size(); ++x) {
          if (!hat.row_built[x]) continue;
          PointSet fut_set = future_set(closed, x);
          for (Index y = 0; y < inst.size(); ++y)
            sl << x << "," << format_double(inst.time(y)) << "," << y << ","
               << (fut_set[y] ? 1 : 0) << "\n";
        }
      }
      write_manifest(manifest_path(cn_out), "cones", {cn_in},
                     json_kv({{"neighborhood", format_double(cn_rnb)},
                              {"edges", std::to_string(closed.edge_count())}}),
                     timer.seconds());
      std::cout << "relation with " << closed.edge_count() << " pairs ("
                << hat.rel.edge_count() << " before closure)\n";
      return 0;
    }
  } catch (const CvpError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
