// Command-line front end: exponent computations, sweeps, partition
// construction, oracle certification, and simulation campaigns. Every
// command writes CSV files plus a key=value run manifest; identical inputs
// and seeds produce byte-identical outputs.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jscc/channel_exp.hpp"
#include "jscc/config.hpp"
#include "jscc/csv.hpp"
#include "jscc/hull.hpp"
#include "jscc/oracle.hpp"
#include "jscc/partition.hpp"
#include "jscc/prob.hpp"
#include "jscc/sim.hpp"
#include "jscc/source_exp.hpp"

namespace {

using namespace jscc;

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  double grid_rho_max = 0.0;
  int grid_points = 0;
  double q_res = -1.0;
  uint64_t seed = 0;
  bool seed_set = false;
  bool exact = false;
  std::vector<int> n_override;
  int best_of_override = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "scenario config (JSON)");
  cmd->add_option("--preset", a.preset, "preset name (presets/NAME.json)");
  cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--grid-rho-max", a.grid_rho_max, "override grids.rho_max");
  cmd->add_option("--grid-points", a.grid_points,
                  "override rho_points and r_points");
  cmd->add_option("--q-res", a.q_res, "override grids.q_resolution");
  cmd->add_flag("--exact", a.exact, "force exact enumeration paths");
}

ScenarioConfig resolve_config(const CommonArgs& a) {
  std::string path;
  if (!a.config_path.empty())
    path = a.config_path;
  else if (!a.preset.empty())
    path = resolve_preset(a.preset);
  else
    throw std::invalid_argument("one of --config or --preset is required");
  ScenarioConfig c = load_config(path);
  if (a.grid_rho_max > 0.0) c.grids.rho_max = a.grid_rho_max;
  if (a.grid_points > 0) {
    c.grids.rho_points = a.grid_points;
    c.grids.r_points = a.grid_points;
  }
  if (a.q_res >= 0.0) c.grids.q_resolution = a.q_res;
  if (a.seed_set) c.sim.seed = a.seed;
  if (!a.n_override.empty()) c.sim.n_list = a.n_override;
  if (a.best_of_override > 0) c.sim.best_of = a.best_of_override;
  return c;
}

std::string out_path(const CommonArgs& a, const std::string& name) {
  std::filesystem::create_directories(a.out_dir);
  return (std::filesystem::path(a.out_dir) / name).string();
}

std::string flag_cell(uint8_t flags) { return flags ? "*" : ""; }

Manifest base_manifest(const std::string& command, const ScenarioConfig& c) {
  Manifest m;
  m.set("command", command);
  m.set("rho_max", c.grids.rho_max);
  m.set("rho_points", static_cast<int64_t>(c.grids.rho_points));
  m.set("r_points", static_cast<int64_t>(c.grids.r_points));
  m.set("q_resolution", c.grids.q_resolution);
  m.set("t", c.t);
  return m;
}

int cmd_source_exp(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Distribution pv = c.source();
  int supp = 0;
  for (int i = 0; i < pv.size(); ++i)
    if (pv[i] > 0.0) ++supp;
  const double rmax = std::log(static_cast<double>(supp));
  {
    CsvWriter csv(out_path(a, "source_e.csv"), {"R", "e_primal", "e_dual", "flag"});
    for (double r : lin_space(0.0, rmax, c.grids.r_points)) {
      const double ep = source_reliability_primal(r, pv);
      const double ed = source_reliability_dual(r, pv);
      csv.row({format_g9(r), format_g9(ep), format_g9(ed), ""});
    }
  }
  {
    CsvWriter csv(out_path(a, "source_es.csv"), {"rho", "Es"});
    for (double rho : log_space(1e-3, c.grids.rho_max, c.grids.rho_points))
      csv.row({format_g9(rho), format_g9(gallager_source_fn(rho, pv))});
  }
  Manifest m = base_manifest("source-exp", c);
  m.set("source_entropy", entropy(pv));
  m.write(out_path(a, "source-exp_manifest.txt"));
  return 0;
}

int cmd_channel_exp(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Channel w = c.channel();
  const BhattacharyyaMatrix d = bhattacharyya(w);
  {
    CsvWriter csv(out_path(a, "channel_db.csv"), {"x", "xbar", "d_B"});
    for (int x = 0; x < d.size(); ++x)
      for (int xb = 0; xb < d.size(); ++xb)
        csv.row({std::to_string(x), std::to_string(xb), format_g9(d(x, xb))});
  }
  SimplexGrid qg{c.grids.q_resolution};
  {
    CsvWriter csv(out_path(a, "channel_rho.csv"),
                  {"rho", "Exp_max", "Ex_max", "flag"});
    for (double rho : log_space(1.0, c.grids.rho_max, c.grids.rho_points)) {
      const QMax mp = ex_prime_dual_max(rho, d, qg);
      const QMax ms = ex_single_dual_max(rho, d, qg);
      csv.row({format_g9(rho), format_g9(mp.value), format_g9(ms.value), ""});
    }
  }
  {
    const Distribution qu = Distribution::uniform(d.size());
    RhoGridOptions ro;
    ro.rho_max = c.grids.rho_max;
    ro.points = c.grids.rho_points;
    CsvWriter csv(out_path(a, "channel_r.csv"),
                  {"R", "Eex_prime_dual", "Eex_prime_primal", "Eex_ckm", "flag"});
    for (double r :
         lin_space(0.0, std::log(static_cast<double>(d.size())), c.grids.r_points)) {
      const RhoSup ds = eex_prime_from_dual(qu, r, d, ro);
      const double pp = eex_prime_primal(qu, r, d);
      const double ck = eex_ckm_primal(qu, r, d);
      csv.row({format_g9(r), format_g9(ds.value), format_g9(pp), format_g9(ck),
               ds.flag == SupAttain::kInterior ? "" : "*"});
    }
  }
  Manifest m = base_manifest("channel-exp", c);
  m.write(out_path(a, "channel-exp_manifest.txt"));
  return 0;
}

int cmd_joint(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Distribution pv = c.source();
  const Channel w = c.channel();
  const BhattacharyyaMatrix d = bhattacharyya(w);

  const JointResult ej2 = joint_exponent_EJ2(c.t, pv, w, c.grids);
  const JointResult ej1 = joint_exponent_EJ1(c.t, pv, w, c.grids);
  const CsiszarDual cd = csiszar_dual_exponent(c.t, pv, d, c.grids);
  const JointResult sc = single_class_dual_exponent(c.t, pv, d, c.grids);

  {
    // Decomposition of the EJ2 objective over the R grid.
    int supp = 0;
    for (int i = 0; i < pv.size(); ++i)
      if (pv[i] > 0.0) ++supp;
    const double rmax = c.t * std::log(static_cast<double>(supp));
    SimplexGrid qg{c.grids.q_resolution};
    RhoGridOptions ro;
    ro.rho_max = c.grids.rho_max;
    ro.points = c.grids.rho_points;
    CsvWriter csv(out_path(a, "joint_r.csv"),
                  {"R", "source_term", "channel_term", "sum", "flag"});
    for (double r : lin_space(0.0, rmax, c.grids.r_points)) {
      const double src = c.t * source_reliability_primal(r / c.t, pv);
      // max_Q E'_ex(Q, R) evaluated through the sampled max curve
      double ch = -kInf;
      uint8_t fl = 0;
      {
        // reuse the csiszar curve: sup_rho (curve - rho R)
        if (r <= 1e-14) {
          ch = cd.curve.values.back();
          fl |= kCurveTruncated;
        } else {
          for (size_t i = 0; i < cd.curve.grid.size(); ++i) {
            const double v = cd.curve.values[i] - cd.curve.grid[i] * r;
            if (v > ch) ch = v;
          }
        }
      }
      csv.row({format_g9(r), format_g9(src), format_g9(ch), format_g9(src + ch),
               flag_cell(fl)});
    }
  }
  Manifest m = base_manifest("joint", c);
  m.set("EJ1", ej1.value);
  m.set("EJ2", ej2.value);
  m.set("EJ2_argmin_R", ej2.arg);
  m.set("EJ2_flag", static_cast<int64_t>(ej2.flags));
  m.set("csiszar_dual", cd.result.value);
  m.set("csiszar_dual_lambda0", cd.lambda0);
  m.set("csiszar_dual_flag", static_cast<int64_t>(cd.result.flags));
  m.set("single_class_dual", sc.value);
  m.set("single_class_flag", static_cast<int64_t>(sc.flags));
  // Both orderings are reported side by side; no ordering is asserted.
  m.write(out_path(a, "joint_manifest.txt"));
  return 0;
}

int cmd_hull(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Distribution pv = c.source();
  const BhattacharyyaMatrix d = bhattacharyya(c.channel());
  const CsiszarDual cd = csiszar_dual_exponent(c.t, pv, d, c.grids);
  CsvWriter csv(out_path(a, "hull.csv"),
                {"lambda", "Exp_max", "hull", "biconjugate", "flag"});
  for (int i = 0; i < cd.curve.size(); ++i) {
    const double lam = cd.curve.grid[static_cast<size_t>(i)];
    csv.row({format_g9(lam), format_g9(cd.curve.values[static_cast<size_t>(i)]),
             format_g9(cd.hull.values[static_cast<size_t>(i)]),
             format_g9(biconjugate_eval(cd.curve, lam)),
             flag_cell(cd.curve.flags.empty() ? 0 : cd.curve.flags[static_cast<size_t>(i)])});
  }
  Manifest m = base_manifest("hull", c);
  m.set("sup_value", cd.result.value);
  m.set("lambda0", cd.lambda0);
  m.write(out_path(a, "hull_manifest.txt"));
  return 0;
}

int cmd_partition(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Distribution pv = c.source();
  const Channel w = c.channel();
  int k = c.sim.k;
  if (k <= 0 && !c.sim.n_list.empty())
    k = static_cast<int>(std::lround(c.t * c.sim.n_list.front()));
  if (k <= 0) throw std::invalid_argument("partition: sim.k required");
  const int n = static_cast<int>(std::lround(k / c.t));
  if (std::abs(k / c.t - n) > 1e-9)
    throw std::invalid_argument("partition: k/t is not an integer blocklength");

  const TwoClassPlan plan = build_two_class_plan(c.t, pv, w, k, c.grids);
  const SourceTypeTable types = enumerate_types(k, pv.size(), c.t);
  const FeasibilityReport feas = check_feasibility(plan.plan, n, types);

  {
    CsvWriter csv(out_path(a, "partition_types.csv"),
                  {"type_index", "R_i", "class", "row_primal", "row_dual", "flag"});
    for (const TypeRow& row : plan.table.rows)
      csv.row({std::to_string(row.type_index), format_g9(row.rate),
               std::to_string(row.class_index), format_g9(row.primal),
               format_g9(row.dual), flag_cell(row.flags)});
  }
  {
    CsvWriter csv(out_path(a, "partition_feasibility.csv"),
                  {"class", "log_class_size", "log_type_class_size", "margin",
                   "pass"});
    for (size_t cidx = 0; cidx < feas.margins.size(); ++cidx)
      csv.row({std::to_string(cidx), format_g9(feas.log_class_sizes[cidx]),
               format_g9(feas.log_type_sizes[cidx]), format_g9(feas.margins[cidx]),
               feas.margins[cidx] >= -1e-9 ? "1" : "0"});
  }
  Manifest m = base_manifest("partition", c);
  m.set("k", static_cast<int64_t>(k));
  m.set("n", static_cast<int64_t>(n));
  m.set("lambda0", plan.lambda0);
  m.set("lambda1", plan.lambda1);
  m.set("lambda2", plan.lambda2);
  m.set("threshold_R0",
        plan.threshold_r0 ? format_g9(*plan.threshold_r0) : std::string("none"));
  m.set("plan_exponent", plan.exponent);
  m.set("feasible", static_cast<int64_t>(feas.feasible ? 1 : 0));
  m.set("flags", static_cast<int64_t>(plan.flags));
  m.write(out_path(a, "partition_manifest.txt"));
  if (!feas.feasible) {
    std::cerr << "partition: plan infeasible at n=" << n << "\n";
    return 2;
  }
  return 0;
}

int cmd_certify(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const oracle::DualityReport rep =
      oracle::duality_report(c.t, c.source(), c.channel(), c.grids);
  CsvWriter csv(out_path(a, "certify.csv"),
                {"section", "param", "primal", "dual", "gap", "flag", "pass"});
  for (const auto& row : rep.rows)
    csv.row({row.section, format_g9(row.param), format_g9(row.primal),
             format_g9(row.dual), format_g9(row.gap), row.boundary ? "*" : "",
             row.pass ? "1" : "0"});
  Manifest m = base_manifest("certify", c);
  m.set("max_source_gap", rep.max_source_gap);
  m.set("max_channel_gap", rep.max_channel_gap);
  m.set("max_joint_gap", rep.max_joint_gap);
  m.set("pass", static_cast<int64_t>(rep.pass ? 1 : 0));
  m.write(out_path(a, "certify_manifest.txt"));
  return rep.pass ? 0 : 2;
}

int cmd_simulate(const CommonArgs& a) {
  const ScenarioConfig c = resolve_config(a);
  const Distribution pv = c.source();
  const Channel w = c.channel();
  std::vector<int> n_list = c.sim.n_list;
  if (n_list.empty()) {
    if (c.sim.k <= 0) throw std::invalid_argument("simulate: sim.n_list or sim.k required");
    n_list.push_back(static_cast<int>(std::lround(c.sim.k / c.t)));
  }
  CsvWriter csv(out_path(a, "simulate.csv"),
                {"n", "k", "trials", "p_e", "ci_halfwidth", "empirical_exponent",
                 "bound_exponent", "union_bound", "exact", "flag"});
  Manifest m = base_manifest("simulate", c);
  m.set("seed", static_cast<int64_t>(c.sim.seed));
  m.set("best_of", static_cast<int64_t>(c.sim.best_of));
  m.set("trials", c.sim.trials);
  int row_idx = 0;
  for (int n : n_list) {
    const int k = static_cast<int>(std::lround(c.t * n));
    if (std::abs(c.t * n - k) > 1e-9)
      throw std::invalid_argument("simulate: t*n is not an integer k for n=" +
                                  std::to_string(n));
    const TwoClassPlan plan = build_two_class_plan(c.t, pv, w, k, c.grids);
    const SourceTypeTable types = enumerate_types(k, pv.size(), c.t);
    BestOfResult best = expurgate_best_of(plan.plan, types, pv, w, n,
                                          c.sim.best_of, c.sim.trials,
                                          c.sim.seed, a.exact);
    const double union_bound = finite_n_union_bound(plan.table, types, n, pv.size());
    csv.row({std::to_string(n), std::to_string(k),
             std::to_string(best.result.exact ? 0 : c.sim.trials),
             format_g9(best.result.p_e), format_g9(best.result.ci_halfwidth),
             format_g9(best.result.empirical_exponent), format_g9(plan.exponent),
             format_g9(union_bound), best.result.exact ? "1" : "0",
             flag_cell(plan.flags)});
    m.set("best_index_n" + std::to_string(n),
          static_cast<int64_t>(best.best_index));
    ++row_idx;
  }
  m.write(out_path(a, "simulate_manifest.txt"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint source-channel expurgated exponent toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<uint64_t>(
        "--seed",
        [&](uint64_t s) {
          args.seed = s;
          args.seed_set = true;
        },
        "override sim.seed");
  };

  CLI::App* c1 = app.add_subcommand("source-exp", "source reliability curves");
  CLI::App* c2 = app.add_subcommand("channel-exp", "channel exponent curves");
  CLI::App* c3 = app.add_subcommand("joint", "composite joint exponents");
  CLI::App* c4 = app.add_subcommand("hull", "curve, hull and biconjugate");
  CLI::App* c5 = app.add_subcommand("partition", "two-class plan construction");
  CLI::App* c6 = app.add_subcommand("certify", "oracle duality report");
  CLI::App* c7 = app.add_subcommand("simulate", "Monte Carlo campaign");
  for (CLI::App* cmd : {c1, c2, c3, c4, c5, c6, c7}) {
    add_common(cmd, args);
    add_seed(cmd);
  }
  c7->add_option("--n", args.n_override, "blocklength list")->delimiter(',');
  c7->add_option("--best-of", args.best_of_override, "codebooks per point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c1->parsed()) return cmd_source_exp(args);
    if (c2->parsed()) return cmd_channel_exp(args);
    if (c3->parsed()) return cmd_joint(args);
    if (c4->parsed()) return cmd_hull(args);
    if (c5->parsed()) return cmd_partition(args);
    if (c6->parsed()) return cmd_certify(args);
    if (c7->parsed()) return cmd_simulate(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
