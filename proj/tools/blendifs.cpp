// blendifs: discrete blends of IFS attractors and their similarity metrics.
//
// Exit codes: 0 success, 1 numerical or validation failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blendifs/blendifs.hpp"
#include "blendifs/config.hpp"
#include "blendifs/image.hpp"
#include "blendifs/report.hpp"

namespace fs = std::filesystem;
using namespace blendifs;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string config;
  std::optional<int> resolution;
  std::string out;
  unsigned threads = 0;
  int width = 0;
  int height = 0;
};

struct Context {
  RunConfig cfg;
  BlendSystem sys;
  Grid grid;
  fs::path out;
  ExecOptions exec;
  RenderSpec render;
};

Context make_context(const CommonOptions& o) {
  RunConfig cfg = load_config_file(o.config);
  if (o.resolution) cfg.resolution = *o.resolution;
  BlendSystem sys = cfg.blend_system();
  for (const auto& w : sys.warnings()) std::cerr << "warning: " << w << " (images will be clamped)\n";
  Grid grid(cfg.bbox, cfg.resolution);
  fs::path out = o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
  fs::create_directories(out);
  RenderSpec render;
  render.width = o.width;
  render.height = o.height;
  return {std::move(cfg), std::move(sys), grid, out, ExecOptions{o.threads}, render};
}

int require_ifs(const BlendSystem& sys, const std::string& name) {
  const int idx = sys.index_of(name);
  if (idx == 0) {
    std::string avail;
    for (const auto& s : sys.systems()) avail += (avail.empty() ? "" : ", ") + s.name();
    throw Error(ErrorKind::UnknownIfs, "no IFS named '" + name + "'; available: " + avail);
  }
  return idx;
}

std::vector<std::string> names_of(const BlendSystem& sys) {
  std::vector<std::string> names;
  for (const auto& s : sys.systems()) names.push_back(s.name());
  return names;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ParseError, "cannot write '" + path.string() + "'");
  f << text;
}

void write_report(const Context& ctx, const std::string& stem, const Json& report) {
  write_text(ctx.out / (stem + ".json"), report.dump(2) + "\n");
  std::ostringstream flat;
  write_flat(flat, report);
  write_text(ctx.out / (stem + ".txt"), flat.str());
}

void write_outputs(const Context& ctx, const std::string& stem, const DiscreteSet& set, const Json& report) {
  {
    std::ofstream f(ctx.out / (stem + ".pgm"), std::ios::binary);
    write_pgm(f, render(set, ctx.render));
  }
  {
    std::ofstream f(ctx.out / (stem + ".cells"), std::ios::binary);
    write_cell_list(f, set);
  }
  write_report(ctx, stem, report);
}

BlendingSequence theta_from_options(const std::string& literal, std::optional<std::uint64_t> seed,
                                    std::optional<std::int64_t> length, const RunConfig& cfg, int n_systems) {
  if (!literal.empty()) return parse_theta(literal);
  if (!length) throw Error(ErrorKind::ParseError, "give --theta, or --length (with optional --seed)");
  return generate_theta(seed.value_or(cfg.seed), *length, n_systems);
}

std::vector<double> parse_lambdas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad --lambdas entry '" + item + "'");
    }
  }
  return out;
}

Json beta_json(const BetaReport& r, const std::vector<std::string>& names, const std::string& variant) {
  Json j = to_json(r, names);
  for (auto& s : j["systems"]) {
    if (variant == "definition") s.erase("beta_examples");
    if (variant == "examples") {
      s.erase("beta_def_lower");
      s.erase("beta_def_upper");
    }
  }
  if (variant == "examples") j.erase("tail_bound");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete, error-certified blends of IFS attractors"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--resolution", common.resolution, "grid resolution M (overrides the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    sub->add_option("--threads", common.threads, "worker threads, 0 = all cores");
    sub->add_option("--width", common.width, "image width in pixels (default M+1)")->check(CLI::NonNegativeNumber);
    sub->add_option("--height", common.height, "image height in pixels (default M+1)")->check(CLI::NonNegativeNumber);
  };

  std::string ifs_name;
  std::optional<int> depth;
  std::optional<double> delta;
  std::string theta_literal;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> length;
  std::string z_file;
  std::string variant = "both";
  std::string radii = "both";
  std::string lambdas_text;
  std::string pair_a, pair_b;
  bool brute = false;

  auto* attractor = app.add_subcommand("attractor", "discrete attractor of one IFS");
  add_common(attractor);
  attractor->add_option("--ifs", ifs_name, "IFS name from the config")->required();
  auto* depth_opt = attractor->add_option("-k,--depth", depth, "operator applications")->check(CLI::PositiveNumber);
  attractor->add_option("--delta", delta, "target Hausdorff error; picks k and M")->excludes(depth_opt);

  auto* blend = app.add_subcommand("blend", "blend of the configured IFSs along theta");
  add_common(blend);
  auto* theta_opt = blend->add_option("--theta", theta_literal, "comma-separated 1-based symbols, theta_1 first");
  blend->add_option("--seed", seed, "seed for a generated theta")->excludes(theta_opt);
  blend->add_option("--length", length, "length of a generated theta")->excludes(theta_opt);
  blend->add_option("--z", z_file, "seed set Z as a cell list (default: full grid)")->check(CLI::ExistingFile);
  blend->add_option("--variant", variant, "blending coefficients to report")
      ->check(CLI::IsMember({"definition", "examples", "both"}));

  auto* metrics = app.add_subcommand("metrics", "similarity metrics");
  metrics->require_subcommand(1);
  auto* m_haus = metrics->add_subcommand("hausdorff", "Hausdorff distances between attractors");
  auto* m_beta = metrics->add_subcommand("beta", "blending coefficients of theta");
  auto* m_delta = metrics->add_subcommand("delta", "self-dissimilarity of each attractor");
  auto* m_env = metrics->add_subcommand("envelope", "covering radii of the blend attractor");
  for (auto* sub : {m_haus, m_beta, m_delta, m_env}) add_common(sub);
  for (auto* sub : {m_haus, m_delta, m_env}) {
    sub->add_option("-k,--depth", depth, "operator applications per attractor (default 30)")
        ->check(CLI::PositiveNumber);
  }
  m_haus->add_option("--a", pair_a, "first IFS (default: all pairs)");
  m_haus->add_option("--b", pair_b, "second IFS");
  m_haus->add_flag("--brute", brute, "use the O(|A||B|) reference implementation");
  auto* m_theta = m_beta->add_option("--theta", theta_literal, "comma-separated 1-based symbols");
  m_beta->add_option("--seed", seed, "seed for a generated theta")->excludes(m_theta);
  m_beta->add_option("--length", length, "length of a generated theta")->excludes(m_theta);
  m_beta->add_option("--variant", variant)->check(CLI::IsMember({"definition", "examples", "both"}));
  m_beta->add_option("--lambdas", lambdas_text, "override contractivity constants, e.g. 0.5,0.8,0.5435");
  m_delta->add_option("--ifs", ifs_name, "only this IFS");
  m_env->add_option("--radii", radii, "radius variant")->check(CLI::IsMember({"thm31", "selfmax", "both"}));

  auto* info = app.add_subcommand("info", "show systems, constants and grid parameters");
  add_common(info);
  info->add_option("--delta", delta, "also show parameters chosen for this target error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    Context ctx = make_context(common);
    const auto names = names_of(ctx.sys);

    if (*attractor) {
      const int idx = require_ifs(ctx.sys, ifs_name);
      const BlendSystem single(ctx.cfg.bbox, {ctx.sys.system(idx)});
      int k = depth.value_or(30);
      Grid grid = ctx.grid;
      std::optional<Parameters> chosen;
      const double target = delta.value_or(0.0);
      if (delta) {
        chosen = choose_parameters(*delta, single, ctx.cfg.bbox);
        k = chosen->k;
        if (grid.epsilon() > chosen->epsilon_max) grid = Grid(ctx.cfg.bbox, chosen->m_min);
      }
      const auto result = blend_approx(single, grid, BlendingSequence::constant(1, static_cast<std::size_t>(k)),
                                       DiscreteSet::full(grid), ctx.exec);
      Json report = to_json(result);
      report.erase("theta");
      report["ifs"] = ifs_name;
      report["lambda"] = single.lambda_script_r();
      if (chosen) {
        report["delta"] = target;
        report["epsilon_max"] = chosen->epsilon_max;
        report["m_min"] = chosen->m_min;
      }
      write_outputs(ctx, "attractor-" + ifs_name, result.output, report);
      std::cout << ifs_name << ": " << result.output.size() << " cells, k=" << k << ", M=" << grid.resolution()
                << ", error bound " << format_real(result.error_bound_tight) << " (worst "
                << format_real(result.error_bound_worst) << ")\n";
      return 0;
    }

    if (*blend) {
      const auto theta = theta_from_options(theta_literal, seed, length, ctx.cfg, static_cast<int>(ctx.sys.size()));
      theta.check_against(ctx.sys);
      DiscreteSet z = DiscreteSet::full(ctx.grid);
      if (!z_file.empty()) {
        std::ifstream in(z_file);
        z = to_discrete_set(ctx.grid, read_cell_list(in));
      }
      const auto result = blend_approx(ctx.sys, ctx.grid, theta, z, ctx.exec);
      const auto lambdas = system_lambdas(ctx.sys);
      Json report = to_json(result);
      report["beta"] = beta_json(beta_report(theta, lambdas), names, variant);
      write_outputs(ctx, "blend", result.output, report);
      std::cout << "blend theta=" << theta.to_string() << ": " << result.output.size() << " cells, error bound "
                << format_real(result.error_bound_tight) << " (worst " << format_real(result.error_bound_worst)
                << ")\n";
      return 0;
    }

    if (*info) {
      std::cout << "grid: M=" << ctx.grid.resolution() << " epsilon=" << format_real(ctx.grid.epsilon())
                << " diam=" << format_real(ctx.cfg.bbox.diameter()) << '\n';
      for (std::size_t i = 0; i < ctx.sys.size(); ++i) {
        const auto& s = ctx.sys.systems()[i];
        std::cout << i + 1 << ' ' << s.name() << ": " << s.size() << " maps, lambda=" << format_real(s.lambda_r())
                  << " (";
        for (std::size_t j = 0; j < s.size(); ++j) std::cout << (j ? ", " : "") << format_real(s.lambdas()[j]);
        std::cout << ")\n";
      }
      std::cout << "lambda_max=" << format_real(ctx.sys.lambda_script_r()) << '\n';
      if (delta) {
        const auto p = choose_parameters(*delta, ctx.sys, ctx.cfg.bbox);
        std::cout << "delta=" << format_real(*delta) << ": k=" << p.k << " epsilon_max=" << format_real(p.epsilon_max)
                  << " m_min=" << p.m_min << '\n';
      }
      return 0;
    }

    // metrics
    const int k = depth.value_or(30);
    auto attractor_uncertainty = [&] {
      const auto theta = BlendingSequence::constant(1, static_cast<std::size_t>(k));
      const auto b = error_bounds(ctx.sys, theta, ctx.grid.epsilon(), ctx.cfg.bbox.diameter());
      return ctx.grid.cell_diagonal() + 2.0 * b.worst;
    };

    if (*m_beta) {
      const auto theta = theta_from_options(theta_literal, seed, length, ctx.cfg, static_cast<int>(ctx.sys.size()));
      const auto lambdas = lambdas_text.empty() ? system_lambdas(ctx.sys) : parse_lambdas(lambdas_text);
      if (lambdas.size() != ctx.sys.size()) {
        throw Error(ErrorKind::ParseError, "--lambdas needs one value per system");
      }
      Json report = beta_json(beta_report(theta, lambdas), names, variant);
      report["lambdas"] = lambdas;
      write_report(ctx, "metrics-beta", report);
      std::ostringstream flat;
      write_flat(flat, report);
      std::cout << flat.str();
      return 0;
    }

    if (*m_haus) {
      const auto attractors = compute_attractors(ctx.sys, ctx.grid, k, ctx.exec);
      std::vector<std::pair<int, int>> pairs;
      if (!pair_a.empty() || !pair_b.empty()) {
        pairs.emplace_back(require_ifs(ctx.sys, pair_a), require_ifs(ctx.sys, pair_b));
      } else {
        for (int a = 1; a <= static_cast<int>(ctx.sys.size()); ++a) {
          for (int b = a + 1; b <= static_cast<int>(ctx.sys.size()); ++b) pairs.emplace_back(a, b);
        }
      }
      Json report;
      report["resolution"] = ctx.grid.resolution();
      report["depth"] = k;
      report["method"] = brute ? "brute" : "distance-transform";
      report["uncertainty"] = attractor_uncertainty();
      Json list = Json::array();
      int index = 0;
      for (auto [a, b] : pairs) {
        const auto& sa = attractors[static_cast<std::size_t>(a - 1)];
        const auto& sb = attractors[static_cast<std::size_t>(b - 1)];
        const auto h = brute ? hausdorff_brute(sa, sb, ctx.exec) : hausdorff(sa, sb, ctx.exec);
        Json e;
        e["index"] = ++index;
        e["a"] = names[static_cast<std::size_t>(a - 1)];
        e["b"] = names[static_cast<std::size_t>(b - 1)];
        e["directed_ab"] = h.directed_ab;
        e["directed_ba"] = h.directed_ba;
        e["symmetric"] = h.symmetric;
        list.push_back(std::move(e));
        std::cout << names[static_cast<std::size_t>(a - 1)] << " vs " << names[static_cast<std::size_t>(b - 1)]
                  << ": " << format_real(h.symmetric) << '\n';
      }
      report["pairs"] = std::move(list);
      write_report(ctx, "metrics-hausdorff", report);
      return 0;
    }

    if (*m_delta) {
      const auto attractors = compute_attractors(ctx.sys, ctx.grid, k, ctx.exec);
      Json report;
      report["resolution"] = ctx.grid.resolution();
      report["depth"] = k;
      report["uncertainty"] = attractor_uncertainty();
      Json list = Json::array();
      for (int i = 1; i <= static_cast<int>(ctx.sys.size()); ++i) {
        if (!ifs_name.empty() && i != require_ifs(ctx.sys, ifs_name)) continue;
        const double d = delta_self_dissimilarity(ctx.sys, ctx.grid, i, attractors, ctx.exec);
        list.push_back({{"index", i}, {"name", names[static_cast<std::size_t>(i - 1)]}, {"delta", d}});
        std::cout << "delta " << names[static_cast<std::size_t>(i - 1)] << " = " << format_real(d) << '\n';
      }
      report["systems"] = std::move(list);
      write_report(ctx, "metrics-delta", report);
      return 0;
    }

    if (*m_env) {
      const auto attractors = compute_attractors(ctx.sys, ctx.grid, k, ctx.exec);
      const double m_value = attractor_spread(attractors, ctx.exec);
      const auto lambdas = system_lambdas(ctx.sys);
      Json report;
      report["resolution"] = ctx.grid.resolution();
      report["depth"] = k;
      report["m_value"] = m_value;
      report["uncertainty"] = attractor_uncertainty();
      if (radii == "selfmax" || radii == "both") {
        report["selfmax"] = to_json(covering_radii_selfmax(lambdas, m_value), names);
      }
      if (radii == "thm31" || radii == "both") {
        report["thm31"] = to_json(covering_radii_thm31(lambdas, m_value), names);
      }
      write_report(ctx, "metrics-envelope", report);
      std::ostringstream flat;
      write_flat(flat, report);
      std::cout << flat.str();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::UnknownIfs) ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
