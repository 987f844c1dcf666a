// minsurf: solve flux targets, mesh ends, verify asymptotics, sweep grids.
//
// Exit codes: 0 success, 1 a verification check failed, 2 solver or
// quadrature failure, 3 I/O failure, 4 unparseable input or arguments.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minsurf/minsurf.hpp"

namespace fs = std::filesystem;
using namespace minsurf;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kSolverFailed = 2, kIoFailed = 3, kParseFailed = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_path(const std::string &given, const std::string &fallback) {
  if (!given.empty()) return given;
  const char *dir = std::getenv("MINSURF_OUT_DIR");
  return fs::path(dir && *dir ? dir : ".") / fallback;
}

void write_file(const fs::path &p, const std::string &bytes) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream o(p, std::ios::binary);
  if (!o) throw IoError("cannot open " + p.string() + " for writing");
  o << bytes;
  if (!o.flush()) throw IoError("write failed for " + p.string());
}

Json read_json(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error &e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

std::string comment_line(const Json &config) {
  const Json t = tool_block(config);
  return "minsurf " + t["version"].get<std::string>() + " config " +
         t["configHash"].get<std::string>();
}

int cmd_solve(double a, double b, int window, const std::string &out) {
  const Json config{{"command", "solve"}, {"a", a}, {"b", b}, {"window", window}};
  const SolveResult r = solve({a, b}, window);
  Json j = to_json(r);
  j["target"] = Json::array({a, b});
  j["tool"] = tool_block(config);
  const fs::path p = out_path(out, "solve.json");
  write_file(p, dump(j));
  std::printf("%s family, period residual %.3e, flux (%.12g, %.3g, %.12g) -> %s\n",
              std::string(variant_name(r.family)).c_str(), r.period_residual, r.achieved_flux.x,
              r.achieved_flux.y, r.achieved_flux.z, p.string().c_str());
  return kOk;
}

struct MeshArgs {
  std::string family;
  double r_min = -1.0, r_max = -1.0;
  int nr = 16, ntheta = 64;
  double theta_span = kTwoPi;
  std::string format = "obj";
  int jobs = 1;
  std::string out;
};

int cmd_mesh(const MeshArgs &m) {
  const Json doc = read_json(m.family);
  const WeierstrassFamily f = family_from_json(doc);
  const double r_min = m.r_min >= 0.0 ? m.r_min : std::max(f.domain_radius, 1.0);
  const double r_max = m.r_max >= 0.0 ? m.r_max : r_min + 4.0;
  const Json config{{"command", "mesh"},  {"family", to_json(f)}, {"rMin", r_min},
                    {"rMax", r_max},      {"nr", m.nr},           {"ntheta", m.ntheta},
                    {"thetaSpan", m.theta_span}, {"format", m.format}};
  const MeshGrid g = sample_mesh(f, r_min, r_max, m.nr, m.ntheta, m.theta_span, m.jobs);
  const auto fmt = m.format == "ply" ? MeshFormat::Ply : MeshFormat::Obj;
  const MeshExport e = export_mesh(g, fmt, {comment_line(config)});
  const fs::path p = out_path(m.out, m.format == "ply" ? "mesh.ply" : "mesh.obj");
  write_file(p, e.bytes);
  std::printf("%zu vertices, %zu triangles (%zu degenerate skipped), max relative cell closure defect %.3e -> %s\n",
              e.vertices, e.triangles, e.skipped, g.closure_defect, p.string().c_str());
  return kOk;
}

std::set<std::string> parse_checks(const std::vector<std::string> &given) {
  std::set<std::string> out;
  for (const auto &c : given) {
    if (c == "all") {
      out.insert(all_checks().begin(), all_checks().end());
    } else {
      out.insert(c);
    }
  }
  if (out.empty()) out.insert(all_checks().begin(), all_checks().end());
  return out;
}

int cmd_verify(const std::string &family, const std::set<std::string> &checks,
               const VerifyConfig &cfg, const std::string &out) {
  const Json doc = read_json(family);
  const WeierstrassFamily f = family_from_json(doc);
  Json tol;
  Tolerances t = cfg.tol;
  for (auto &[name, ptr] : t.named()) tol[name] = *ptr;
  const Json config{{"command", "verify"},
                    {"family", to_json(f)},
                    {"checks", std::vector<std::string>(checks.begin(), checks.end())},
                    {"tolerances", tol}};
  const AsymptoticsReport rep = run_verification(f, checks, cfg);
  Json j = to_json(rep);
  j["family"] = to_json(f);
  j["tool"] = tool_block(config);
  const fs::path p = out_path(out, "report.json");
  fs::path csv = p;
  csv.replace_extension(".csv");
  write_file(p, dump(j));
  write_file(csv, "# " + comment_line(config) + "\n" + to_csv(rep));
  int code = kOk;
  for (const auto &c : rep.checks) {
    std::printf("%-10s %s  %s\n", c.name.c_str(),
                !c.applicable ? "n/a " : (c.passed ? "pass" : "FAIL"), c.detail.c_str());
    if (!c.passed) code = kCheckFailed;
  }
  if (code != kOk) {
    for (const auto &c : rep.checks) {
      if (!c.passed) std::fprintf(stderr, "check failed: %s\n", c.name.c_str());
    }
  }
  return code;
}

std::string sweep_row(double a, double b, bool timing) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string row = format_double(a) + "," + format_double(b) + ",";
  try {
    const SolveResult r = solve({a, b});
    double t = 0.0, B = 0.0;
    Complex A{};
    if (const auto *p = std::get_if<NonVerticalFlux>(&r.family.data)) {
      t = p->t;
      A = p->A;
      B = p->B;
    } else if (const auto *p = std::get_if<VerticalFlux>(&r.family.data)) {
      A = p->A;
      B = p->B;
    }
    row += "ok," + std::string(variant_name(r.family)) + "," + format_double(t) + "," +
           format_double(A.real()) + "," + format_double(A.imag()) + "," + format_double(B) + "," +
           format_double(r.rotation_angle) + "," + format_double(r.period_residual) + "," +
           format_double(r.achieved_flux.x) + "," + format_double(r.achieved_flux.y) + "," +
           format_double(r.achieved_flux.z) + ",";
  } catch (const std::exception &e) {
    std::string msg = e.what();
    for (auto &ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    // Ten empty solution columns, then the message.
    row += "failed" + std::string(11, ',') + msg;
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row += ",";
  row += timing ? format_double(dt) : "";
  return row + "\n";
}

int cmd_sweep(const std::vector<double> &as, const std::vector<double> &bs, int jobs, bool timing,
              const std::string &out) {
  for (double v : as) {
    if (!(v >= 0.0)) throw ParseError("sweep values must be nonnegative");
  }
  for (double v : bs) {
    if (!(v >= 0.0)) throw ParseError("sweep values must be nonnegative");
  }
  std::vector<std::pair<double, double>> grid;
  for (double a : as)
    for (double b : bs) grid.emplace_back(a, b);
  std::vector<std::string> rows(grid.size());
  jobs = std::max(1, jobs);
  std::vector<std::future<void>> fs;
  for (int w = 0; w < jobs; ++w) {
    fs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = static_cast<std::size_t>(w); k < grid.size();
           k += static_cast<std::size_t>(jobs)) {
        rows[k] = sweep_row(grid[k].first, grid[k].second, timing);
      }
    }));
  }
  for (auto &f : fs) f.get();
  const Json config{{"command", "sweep"}, {"a", as}, {"b", bs}};
  std::string csv = "# " + comment_line(config) + "\n";
  csv += "a,b,status,variant,t,A_re,A_im,B,rotation,period_residual,flux_x,flux_y,flux_z,error,"
         "wall_time_s\n";
  std::size_t failed = 0;
  for (const auto &r : rows) {
    csv += r;
    if (r.find(",failed,") != std::string::npos) ++failed;
  }
  const fs::path p = out_path(out, "sweep.csv");
  write_file(p, csv);
  std::printf("%zu rows (%zu failed) -> %s\n", rows.size(), failed, p.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Embedded minimal annular ends from explicit Weierstrass data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  double a = 0.0, b = 0.0;
  int window = 1;
  std::string out;
  auto *solve_cmd = app.add_subcommand("solve", "solve the period problem for flux (a, 0, -b)");
  solve_cmd->add_option("--a", a, "horizontal flux length a >= 0")->required();
  solve_cmd->add_option("--b", b, "vertical flux b >= 0")->required();
  solve_cmd->add_option("--window", window, "argument-matching window index (a > 0)")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", out, "output JSON path");

  MeshArgs m;
  auto *mesh_cmd = app.add_subcommand("mesh", "sample the immersion on a conformal grid");
  mesh_cmd->add_option("--family", m.family, "family or solve-result JSON")->required();
  mesh_cmd->add_option("--r-min", m.r_min, "inner radius (default max(R', 1))");
  mesh_cmd->add_option("--r-max", m.r_max, "outer radius (default r-min + 4)");
  mesh_cmd->add_option("--nr", m.nr, "radial samples")->check(CLI::Range(2, 1 << 20));
  mesh_cmd->add_option("--ntheta", m.ntheta, "angular samples")->check(CLI::Range(2, 1 << 20));
  mesh_cmd->add_option("--theta-span", m.theta_span, "angular span, may exceed 2 pi");
  mesh_cmd->add_option("--format", m.format, "obj or ply")->check(CLI::IsMember({"obj", "ply"}));
  mesh_cmd->add_option("--jobs", m.jobs, "worker threads")->check(CLI::PositiveNumber);
  mesh_cmd->add_option("--out", m.out, "output mesh path");

  std::string vfamily;
  std::vector<std::string> checks;
  VerifyConfig cfg;
  std::string vout;
  double v_rmax = 1e5;
  auto *verify_cmd = app.add_subcommand("verify", "run asymptotic verification checks");
  verify_cmd->add_option("--family", vfamily, "family or solve-result JSON")->required();
  verify_cmd->add_option("--checks", checks, "comma-separated subset or 'all'")
      ->delimiter(',')
      ->check(CLI::IsMember([] {
        auto v = all_checks();
        v.push_back("all");
        return v;
      }()));
  verify_cmd->add_option("--r-max", v_rmax, "largest multigraph radius (decades from 1e2)");
  verify_cmd->add_option("--out", vout, "output JSON path (CSV written alongside)");
  for (auto &[name, ptr] : cfg.tol.named()) {
    verify_cmd->add_option("--tol-" + name, *ptr, "tolerance override")->check(CLI::PositiveNumber);
  }

  std::vector<double> as, bs;
  int jobs = 1;
  bool omit_timing = false;
  std::string sout;
  auto *sweep_cmd = app.add_subcommand("sweep", "solve every target of a grid");
  sweep_cmd->add_option("--a", as, "comma-separated a values")->delimiter(',')->required();
  sweep_cmd->add_option("--b", bs, "comma-separated b values")->delimiter(',')->required();
  sweep_cmd->add_option("--jobs", jobs, "parallel rows")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--omit-timing", omit_timing, "leave the wall-time column empty");
  sweep_cmd->add_option("--out", sout, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseFailed;
  }

  try {
    if (*solve_cmd) return cmd_solve(a, b, window, out);
    if (*mesh_cmd) return cmd_mesh(m);
    if (*verify_cmd) {
      if (cfg.tol.period > solver_tol::kPeriodResidual) {
        throw ParseError("--tol-period may not exceed the solver certificate 1e-9");
      }
      cfg.graph_radii.clear();
      for (double r = 1e2; r <= v_rmax * (1.0 + 1e-12); r *= 10.0) cfg.graph_radii.push_back(r);
      if (cfg.graph_radii.size() < 2) throw ParseError("--r-max must be at least 1e3");
      return cmd_verify(vfamily, parse_checks(checks), cfg, vout);
    }
    if (*sweep_cmd) return cmd_sweep(as, bs, jobs, !omit_timing, sout);
  } catch (const IoError &e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIoFailed;
  } catch (const ParseError &e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kParseFailed;
  } catch (const DomainError &e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kParseFailed;
  } catch (const SolverError &e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    if (!e.trace().empty()) std::fprintf(stderr, "trace: %s\n", e.trace().c_str());
    return kSolverFailed;
  } catch (const QuadratureError &e) {
    std::fprintf(stderr, "quadrature failure: %s (last (%.17g, %.17g), previous (%.17g, %.17g))\n",
                 e.what(), e.last().real(), e.last().imag(), e.previous().real(),
                 e.previous().imag());
    return kSolverFailed;
  } catch (const MeshError &e) {
    std::fprintf(stderr, "mesh failure: %s\n", e.what());
    return kSolverFailed;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverFailed;
  }
  return kOk;
}
