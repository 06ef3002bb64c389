#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "shufflelab/io.hpp"
#include "shufflelab/lab.hpp"

namespace shufflelab {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Common options and validation
// ---------------------------------------------------------------------------

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  double prune = 1e-14;
  double tol = 1e-8;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out,
                  "output directory (default: $SHUFFLELAB_OUT_DIR, else the "
                  "working directory)");
  sub->add_option("--seed", c.seed, "64-bit seed recorded in the report");
  sub->add_option("--jobs", c.jobs, "maximum number of worker threads");
  sub->add_option("--prune", c.prune,
                  "relative pruning threshold, in (0, 1e-6]");
  sub->add_option("--tol", c.tol,
                  "limit/truncation tolerance, in (0, 1e-6]");
}

void validate_common(const Common& c) {
  if (!(c.prune > 0.0) || !(c.prune <= 1e-6))
    throw std::invalid_argument("--prune must lie in (0, 1e-6]");
  if (!(c.tol > 0.0) || !(c.tol <= 1e-6))
    throw std::invalid_argument("--tol must lie in (0, 1e-6]");
  if (c.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
}

// ---------------------------------------------------------------------------
// Grid parsing: "a,b,c" comma lists or "start:stop:factor" geometric grids
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& token, const std::string& name) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size() || !std::isfinite(v))
      throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(name + ": cannot parse number '" + token + "'");
  }
}

std::vector<double> parse_real_grid(const std::string& text,
                                    const std::string& name) {
  if (text.empty()) throw std::invalid_argument(name + ": empty grid");
  std::vector<double> out;
  const std::vector<std::string> colon_parts = split(text, ':');
  if (colon_parts.size() == 3) {
    const double start = parse_number(colon_parts[0], name);
    const double stop = parse_number(colon_parts[1], name);
    const double factor = parse_number(colon_parts[2], name);
    if (!(start > 0.0) || !(stop > 0.0))
      throw std::invalid_argument(name + ": endpoints must be positive");
    if (!(factor > 0.0) || factor == 1.0)
      throw std::invalid_argument(name + ": factor must be positive and != 1");
    if ((factor > 1.0 && stop < start) || (factor < 1.0 && stop > start))
      throw std::invalid_argument(name +
                                  ": stop is on the wrong side of start for "
                                  "this factor");
    double x = start;
    while (true) {
      out.push_back(x);
      if (out.size() > 10000)
        throw std::invalid_argument(name + ": more than 10000 grid points");
      const double next = x * factor;
      if (factor > 1.0 ? next > stop * (1.0 + 1e-12)
                       : next < stop * (1.0 - 1e-12))
        break;
      x = next;
    }
    return out;
  }
  if (colon_parts.size() != 1)
    throw std::invalid_argument(name +
                                ": expected a comma list or start:stop:factor");
  for (const std::string& token : split(text, ','))
    out.push_back(parse_number(token, name));
  if (out.size() > 10000)
    throw std::invalid_argument(name + ": more than 10000 grid points");
  return out;
}

std::vector<int> parse_int_grid(const std::string& text,
                                const std::string& name) {
  std::vector<int> out;
  for (double x : parse_real_grid(text, name)) {
    const double r = std::llround(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)) || r < 1 ||
        r > 1e9)
      throw std::invalid_argument(name + ": grid points must be integers >= 1");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

void require_increasing(const std::vector<int>& grid, const std::string& name) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument(name + ": must be strictly increasing");
}

void require_sorted_nonnegative(const std::vector<double>& grid,
                                const std::string& name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0)
      throw std::invalid_argument(name + ": entries must be nonnegative");
    if (i > 0 && grid[i] < grid[i - 1])
      throw std::invalid_argument(name + ": must be sorted nondecreasing");
  }
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

fs::path resolve_out_dir(const std::string& option) {
  std::string dir = option;
  if (dir.empty()) {
    const char* env = std::getenv("SHUFFLELAB_OUT_DIR");
    dir = (env != nullptr && *env != '\0') ? env : ".";
  }
  fs::create_directories(dir);
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary);
  stream << content;
  stream.close();
  if (!stream)
    throw std::runtime_error("cannot write '" + path.string() + "'");
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& headers)
      : width_(headers.size()) {
    for (std::size_t i = 0; i < headers.size(); ++i) {
      if (i > 0) body_ += ',';
      body_ += headers[i];
    }
    body_ += '\n';
  }

  void row(const std::vector<double>& cells) {
    if (cells.size() != width_)
      throw std::runtime_error("internal: csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) body_ += ',';
      body_ += format_double(cells[i]);
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

 private:
  std::size_t width_;
  std::string body_;
};

ordered_json vwe_json(const ValueWithError& v) {
  return ordered_json{{"value", v.value}, {"error_bar", v.error_bar}};
}

ordered_json delta_json(const DeltaResult& d) {
  return ordered_json{
      {"value", d.value}, {"raw", d.raw}, {"error_bar", d.error_bar}};
}

ordered_json fit_json(const RateReport& r) {
  ordered_json values = ordered_json::array();
  for (const ValueWithError& v : r.errors) values.push_back(vwe_json(v));
  ordered_json used = ordered_json::array();
  for (bool u : r.used) used.push_back(u);
  return ordered_json{{"fitted", r.fitted},
                      {"slope", r.slope},
                      {"intercept", r.intercept},
                      {"used_count", r.used_count},
                      {"used", used},
                      {"max_log_residual", r.max_log_residual},
                      {"note", r.note},
                      {"grid", r.grid},
                      {"values", values}};
}

// Accumulates check outcomes, output files, and the final JSON report.
class ReportBuilder {
 public:
  ReportBuilder(std::string command, const Common& common, fs::path dir)
      : command_(std::move(command)), dir_(std::move(dir)) {
    doc_["command"] = command_;
    doc_["options"] = ordered_json{{"out_dir", dir_.string()},
                                   {"seed", common.seed},
                                   {"jobs", common.jobs},
                                   {"prune", common.prune},
                                   {"tol", common.tol}};
  }

  ordered_json& doc() { return doc_; }
  const fs::path& dir() const { return dir_; }

  void add_output(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    outputs_.push_back(name);
  }

  void add_check(const std::string& id, bool passed, const std::string& detail) {
    checks_.push_back(ordered_json{
        {"id", id}, {"passed", passed}, {"detail", detail}});
    if (!passed) failed_ = true;
  }

  bool all_passed() const { return !failed_; }

  int finish(std::ostream& out) {
    ordered_json checks = ordered_json::array();
    for (const ordered_json& c : checks_) checks.push_back(c);
    doc_["checks"] = checks;
    doc_["verdict"] = failed_ ? "fail" : "pass";
    const std::string report_name = command_ + "_report.json";
    outputs_.push_back(report_name);
    doc_["outputs"] = outputs_;
    write_file(dir_ / report_name, doc_.dump(2) + "\n");
    for (const ordered_json& c : checks_)
      out << "check " << c["id"].get<std::string>() << ": "
          << (c["passed"].get<bool>() ? "pass" : "FAIL") << " -- "
          << c["detail"].get<std::string>() << "\n";
    out << command_ << ": verdict " << (failed_ ? "fail" : "pass")
        << "; report " << (dir_ / report_name).string() << "\n";
    return failed_ ? 2 : 0;
  }

 private:
  std::string command_;
  fs::path dir_;
  ordered_json doc_;
  std::vector<ordered_json> checks_;
  std::vector<std::string> outputs_;
  bool failed_ = false;
};

// Resolve a scenario argument: a catalog name first, else a JSON file path.
RandomizerScenario resolve_scenario(const std::string& spec,
                                    ordered_json& report_doc) {
  for (const ScenarioCatalogEntry& entry : catalog())
    if (entry.name == spec) {
      report_doc["scenario"] =
          ordered_json{{"name", spec},
                       {"definition", ordered_json::parse(
                                          scenario_to_json(entry.scenario))}};
      return entry.scenario;
    }
  const RandomizerScenario scn = load_scenario_file(spec);
  report_doc["scenario"] = ordered_json{
      {"path", spec},
      {"definition", ordered_json::parse(scenario_to_json(scn))}};
  return scn;
}

// Deterministic indexed parallel map: results land in input order no matter
// how many workers run.
template <typename T, typename Fn>
std::vector<T> parallel_map(int jobs, std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

Mat local_matmul(const Mat& a, const Mat& b) {
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j)
        out(i, j) += a(i, k) * b(k, j);
  return out;
}

Mat local_transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

double vec_max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct GeometryOpts {
  std::string scenario = "two_dominant_disjoint";
};

int cmd_geometry(std::string& stage, const GeometryOpts& opts,
                 const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  stage = "output";
  ReportBuilder report("geometry", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn = resolve_scenario(opts.scenario, report.doc());
  stage = "computation";
  const QuotientGeometry g = scn.geometry();
  const std::size_t dim = static_cast<std::size_t>(g.dim);

  const double sum_err =
      max_abs_diff(matadd(g.proj_g, g.proj_j), Mat::identity(dim));
  report.add_check("projector_sum", sum_err <= 1e-12,
                   "max |G + J - I| = " + format_double(sum_err));

  double shape_err = 0.0;
  for (const Mat* p : {&g.proj_g, &g.proj_j}) {
    shape_err = std::max(shape_err, max_abs_diff(local_matmul(*p, *p), *p));
    shape_err = std::max(shape_err, max_abs_diff(*p, local_transpose(*p)));
  }
  report.add_check("projector_shape", shape_err <= 1e-10,
                   "max idempotence/symmetry residual = " +
                       format_double(shape_err));

  double collapse_err = 0.0;
  for (int side = 0; side < 2; ++side) {
    const std::vector<int>& dom = side == 0 ? g.d0 : g.d1;
    const Vec& mu = side == 0 ? g.mu0 : g.mu1;
    for (int y : dom) {
      Vec v(dim, 0.0);
      v[static_cast<std::size_t>(y)] = 1.0;
      collapse_err =
          std::max(collapse_err, vec_max_abs(matvec(g.proj_j, sub(v, mu))));
    }
  }
  report.add_check("dominant_collapse", collapse_err <= 1e-10,
                   "max |J (e_y - mu_b)| over dominant y = " +
                       format_double(collapse_err));

  const Vec direct = matvec(g.proj_j, sub(g.mu1, g.mu0));
  const int c0 = g.component_index[static_cast<std::size_t>(g.d0.front())];
  const int c1 = g.component_index[static_cast<std::size_t>(g.d1.front())];
  const Vec via_atoms = sub(g.component_atoms[static_cast<std::size_t>(c1)],
                            g.component_atoms[static_cast<std::size_t>(c0)]);
  const double shift_err =
      std::max(vec_max_abs(sub(direct, via_atoms)),
               vec_max_abs(sub(g.delta_shift, direct)));
  report.add_check("shift_consistency", shift_err <= 1e-10,
                   "max disagreement between shift formulas = " +
                       format_double(shift_err));

  report.doc()["results"] =
      ordered_json{{"components", g.components.size()},
                   {"rare_classes", g.rare_classes.size()},
                   {"levy_atoms", g.levy_atoms.size()},
                   {"delta_shift", g.delta_shift},
                   {"delta_shift_max_abs", vec_max_abs(g.delta_shift)}};
  stage = "output";
  report.add_output("geometry.json", geometry_to_json(g, scn.alphabet));
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// transcript
// ---------------------------------------------------------------------------

struct TranscriptOpts {
  std::string scenario = "two_dominant_disjoint";
  int n = 0;
  int k = -1;  // -1: composition default
  int sample = 0;
};

int cmd_transcript(std::string& stage, const TranscriptOpts& opts,
                   const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  if (opts.n < 1) throw std::invalid_argument("--n must be at least 1");
  if (opts.sample < 0)
    throw std::invalid_argument("--sample must be nonnegative");
  stage = "output";
  ReportBuilder report("transcript", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn = resolve_scenario(opts.scenario, report.doc());
  stage = "argument validation";
  const int k = opts.k >= 0 ? opts.k
                            : scn.composition.k_for(opts.n, scn.pi_limit);
  if (k > opts.n)
    throw std::invalid_argument("--k cannot exceed --n");
  stage = "computation";
  const TranscriptLaw law = transcript_law(scn, opts.n, k, common.prune);

  const double mass_gap =
      std::abs(law.law.total_mass() + law.law.deficit() - 1.0);
  report.add_check("mass_conservation", mass_gap <= common.tol,
                   "|mass + deficit - 1| = " + format_double(mass_gap));
  bool keys_ok = true;
  for (const Atom& a : law.law.atoms()) {
    std::int64_t total = 0;
    for (std::int64_t c : a.key) total += c;
    if (total != opts.n) keys_ok = false;
  }
  report.add_check("keys_sum_to_n", keys_ok,
                   keys_ok ? "every histogram sums to n"
                           : "found a histogram not summing to n");

  report.doc()["results"] = ordered_json{{"n", opts.n},
                                         {"k", k},
                                         {"atoms", law.law.atoms().size()},
                                         {"total_mass", law.law.total_mass()},
                                         {"deficit", law.law.deficit()}};
  stage = "output";
  report.add_output("transcript_law.csv",
                    transcript_law_to_csv(law, scn.alphabet));
  if (opts.sample > 0) {
    stage = "computation";
    std::vector<std::string> headers = scn.alphabet.symbols;
    Csv csv(headers);
    RandomStream root(common.seed);
    for (int r = 0; r < opts.sample; ++r) {
      const LatticeKey draw = sample_transcript(
          scn, opts.n, k, root.split(static_cast<std::uint64_t>(r)).seed());
      std::vector<double> cells;
      for (std::int64_t c : draw) cells.push_back(static_cast<double>(c));
      csv.row(cells);
    }
    stage = "output";
    report.add_output("transcript_samples.csv", csv.str());
  }
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// privacy-curve
// ---------------------------------------------------------------------------

struct PrivacyCurveOpts {
  std::string scenario = "two_dominant_disjoint";
  int n = 0;
  std::string eps = "0,0.5,1,2";
};

int cmd_privacy_curve(std::string& stage, const PrivacyCurveOpts& opts,
                      const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  if (opts.n < 1) throw std::invalid_argument("--n must be at least 1");
  const std::vector<double> eps = parse_real_grid(opts.eps, "--eps");
  require_sorted_nonnegative(eps, "--eps");
  stage = "output";
  ReportBuilder report("privacy-curve", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn = resolve_scenario(opts.scenario, report.doc());
  stage = "computation";
  const BinaryExperiment e = neighboring_experiment(scn, opts.n, common.prune);

  bool monotone = true;
  std::vector<PrivacyCurvePoint> points;
  try {
    points = privacy_curve(e, eps).points;
  } catch (const std::logic_error&) {
    monotone = false;
    for (double x : eps) {
      const DeltaResult d = privacy_delta(e, x);
      points.push_back({x, d.value, d.error_bar});
    }
  }
  report.add_check("curve_monotone", monotone,
                   monotone ? "delta is nonincreasing in epsilon"
                            : "monotonicity violated beyond error bars");
  bool in_range = true;
  for (const PrivacyCurvePoint& p : points)
    if (p.delta < 0.0 || p.delta > 1.0) in_range = false;
  report.add_check("delta_in_range", in_range,
                   in_range ? "all values inside [0, 1]"
                            : "a value left [0, 1]");

  Csv csv({"epsilon", "delta", "delta_bar"});
  ordered_json rows = ordered_json::array();
  for (const PrivacyCurvePoint& p : points) {
    csv.row({p.epsilon, p.delta, p.error_bar});
    rows.push_back(ordered_json{
        {"epsilon", p.epsilon}, {"delta", p.delta}, {"error_bar", p.error_bar}});
  }
  report.doc()["grids"] = ordered_json{{"eps", eps}};
  report.doc()["results"] = ordered_json{{"n", opts.n}, {"points", rows}};
  stage = "output";
  report.add_output("privacy_curve.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// projected-rate
// ---------------------------------------------------------------------------

struct ProjectedRateOpts {
  std::string scenario = "two_dominant_disjoint";
  std::string n_grid = "8,16,32,64,128,256,512";
  double slope_max = -0.9;
};

int cmd_projected_rate(std::string& stage, const ProjectedRateOpts& opts,
                       const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<int> grid = parse_int_grid(opts.n_grid, "--n-grid");
  require_increasing(grid, "--n-grid");
  stage = "output";
  ReportBuilder report("projected-rate", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn = resolve_scenario(opts.scenario, report.doc());
  stage = "computation";
  const ProjectedRateResult res =
      projected_rate_experiment(scn, grid, common.prune, common.tol);

  Csv csv({"n", "null_distance", "null_distance_bar", "alt_distance",
           "alt_distance_bar", "total_distance", "total_distance_bar"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv.row({static_cast<double>(grid[i]), res.null_errors[i].value,
             res.null_errors[i].error_bar, res.alt_errors[i].value,
             res.alt_errors[i].error_bar, res.total_errors[i].value,
             res.total_errors[i].error_bar});

  auto fit_check = [&](const char* id, const RateReport& fit) {
    std::ostringstream detail;
    if (!fit.fitted) {
      report.add_check(id, false, "fit failed: " + fit.note);
      return;
    }
    detail << "slope " << format_double(fit.slope) << " (used "
           << fit.used_count << "/" << fit.grid.size() << ")";
    report.add_check(id, fit.slope <= opts.slope_max, detail.str());
  };
  fit_check("null_rate", res.null_fit);
  fit_check("alt_rate", res.alt_fit);

  report.doc()["grids"] = ordered_json{{"n", grid}};
  report.doc()["results"] =
      ordered_json{{"null_fit", fit_json(res.null_fit)},
                   {"alt_fit", fit_json(res.alt_fit)},
                   {"total_fit", fit_json(res.total_fit)},
                   {"slope_max", opts.slope_max}};
  stage = "output";
  report.add_output("projected_rate.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// full-privacy
// ---------------------------------------------------------------------------

struct FullPrivacyOpts {
  std::string scenario = "two_dominant_disjoint";
  std::string n_grid = "16,32,64,128,256";
  std::string eps = "0,0.5,1";
  double gap_max = 0.05;
};

int cmd_full_privacy(std::string& stage, const FullPrivacyOpts& opts,
                     const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<int> grid = parse_int_grid(opts.n_grid, "--n-grid");
  require_increasing(grid, "--n-grid");
  const std::vector<double> eps = parse_real_grid(opts.eps, "--eps");
  require_sorted_nonnegative(eps, "--eps");
  if (!(opts.gap_max > 0.0))
    throw std::invalid_argument("--gap-max must be positive");
  stage = "output";
  ReportBuilder report("full-privacy", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn = resolve_scenario(opts.scenario, report.doc());
  stage = "computation";
  const FullPrivacyResult res =
      full_privacy_convergence(scn, grid, eps, common.prune, common.tol);

  Csv csv({"n", "epsilon", "delta_n", "delta_n_bar", "delta_limit",
           "delta_limit_bar", "gap", "gap_bar"});
  for (const PrivacyGapRow& row : res.rows)
    csv.row({static_cast<double>(row.n), row.epsilon, row.delta_n.value,
             row.delta_n.error_bar, row.delta_limit.value,
             row.delta_limit.error_bar, row.gap.value, row.gap.error_bar});

  for (std::size_t e = 0; e < eps.size(); ++e) {
    // Rows are n-major: the final block holds the largest n.
    const PrivacyGapRow& last =
        res.rows[(grid.size() - 1) * eps.size() + e];
    std::ostringstream detail;
    detail << "gap " << format_double(last.gap.value) << " at n = " << last.n;
    report.add_check("limit_gap_eps_" + format_double(eps[e]),
                     last.gap.value < opts.gap_max, detail.str());
  }

  ordered_json fits = ordered_json::array();
  for (const RateReport& f : res.gap_fits) fits.push_back(fit_json(f));
  report.doc()["grids"] = ordered_json{{"n", grid}, {"eps", eps}};
  report.doc()["results"] =
      ordered_json{{"gap_fits", fits}, {"gap_max", opts.gap_max}};
  stage = "output";
  report.add_output("full_privacy.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// sharpness
// ---------------------------------------------------------------------------

struct SharpnessOpts {
  double p = 0.3;
  double q = 0.8;
  double lambda = 1.0;
  std::string n_grid = "32,64,128,256";
};

int cmd_sharpness(std::string& stage, const SharpnessOpts& opts,
                  const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<int> grid = parse_int_grid(opts.n_grid, "--n-grid");
  require_increasing(grid, "--n-grid");
  stage = "output";
  ReportBuilder report("sharpness", common, resolve_out_dir(common.out));
  stage = "scenario loading";
  const RandomizerScenario scn =
      sharpness_scenario(opts.p, opts.q, opts.lambda);
  report.doc()["scenario"] = ordered_json{
      {"name", "sharpness(p, q, lambda)"},
      {"p", opts.p},
      {"q", opts.q},
      {"lambda", opts.lambda},
      {"definition", ordered_json::parse(scenario_to_json(scn))}};
  stage = "computation";
  const AuxiliarySeries series =
      auxiliary_comparison(scn, grid, common.prune);

  Csv csv({"n", "null_tv", "null_tv_bar", "alt_tv", "alt_tv_bar",
           "scaled_null", "scaled_null_bar"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double root = std::sqrt(static_cast<double>(grid[i]));
    csv.row({static_cast<double>(grid[i]), series.null_tv[i].value,
             series.null_tv[i].error_bar, series.alt_tv[i].value,
             series.alt_tv[i].error_bar, series.scaled_null[i],
             root * series.null_tv[i].error_bar});
  }

  double lo = 1e300, hi = 0.0;
  for (double v : series.scaled_null) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  {
    std::ostringstream detail;
    detail << "sqrt(n)-scaled distances span [" << format_double(lo) << ", "
           << format_double(hi) << "]";
    report.add_check("window_factor_two", lo > 0.0 && hi <= 2.0 * lo,
                     detail.str());
  }
  if (!series.null_fit.fitted) {
    report.add_check("slope_in_window", false,
                     "fit failed: " + series.null_fit.note);
  } else {
    std::ostringstream detail;
    detail << "slope " << format_double(series.null_fit.slope);
    report.add_check("slope_in_window",
                     series.null_fit.slope >= -0.65 &&
                         series.null_fit.slope <= -0.35,
                     detail.str());
  }

  report.doc()["grids"] = ordered_json{{"n", grid}};
  report.doc()["results"] =
      ordered_json{{"null_fit", fit_json(series.null_fit)},
                   {"null_all_zero", series.null_all_zero},
                   {"alt_all_zero", series.alt_all_zero}};
  stage = "output";
  report.add_output("sharpness.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// binom-ber
// ---------------------------------------------------------------------------

struct BinomBerOpts {
  std::string m_grid = "1:4096:2";
  double p = 0.0;
  double q = 0.0;
  double mismatch_max = 1e-12;
};

int cmd_binom_ber(std::string& stage, const BinomBerOpts& opts,
                  const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<int> grid = parse_int_grid(opts.m_grid, "--m-grid");
  require_increasing(grid, "--m-grid");
  if (!(opts.p > 0.0) || !(opts.p < 1.0))
    throw std::invalid_argument("--p must lie in (0, 1)");
  if (!(opts.q >= 0.0) || !(opts.q <= 1.0))
    throw std::invalid_argument("--q must lie in [0, 1]");
  stage = "output";
  ReportBuilder report("binom-ber", common, resolve_out_dir(common.out));
  report.doc()["scenario"] =
      ordered_json{{"p", opts.p}, {"q", opts.q}};
  stage = "computation";
  const std::vector<BinomialBernoulliRow> rows =
      parallel_map<BinomialBernoulliRow>(
          common.jobs, grid.size(), [&](std::size_t i) {
            return binomial_bernoulli_check({grid[i]}, opts.p, opts.q)
                .rows.front();
          });

  Csv csv({"m", "tv", "tv_bar", "closed_form", "closed_form_bar", "mismatch",
           "mismatch_bar", "scaled_tv", "scaled_tv_bar", "asymptote",
           "asymptote_bar"});
  double worst = 0.0;
  for (const BinomialBernoulliRow& row : rows) {
    worst = std::max(worst, row.mismatch);
    csv.row({static_cast<double>(row.m), row.tv, 0.0, row.closed_form, 0.0,
             row.mismatch, 0.0, row.scaled, 0.0, row.asymptote, 0.0});
  }
  report.add_check("closed_form_match", worst <= opts.mismatch_max,
                   "max |tv - closed form| = " + format_double(worst));

  report.doc()["grids"] = ordered_json{{"m", grid}};
  report.doc()["results"] = ordered_json{
      {"max_mismatch", worst}, {"mismatch_max", opts.mismatch_max}};
  stage = "output";
  report.add_output("binom_ber.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// boundary-be
// ---------------------------------------------------------------------------

struct BoundaryBeOpts {
  std::string c_grid = "0.4,0.2,0.1,0.05";
  std::string eps = "1";
  std::string pi = "0.3,0.5";
  double slope_min = 0.9;
};

int cmd_boundary_be(std::string& stage, const BoundaryBeOpts& opts,
                    const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<double> c_grid = parse_real_grid(opts.c_grid, "--c-grid");
  for (double c : c_grid)
    if (!(c > 0.0) || !(c <= 1.0))
      throw std::invalid_argument("--c-grid entries must lie in (0, 1]");
  const std::vector<double> eps = parse_real_grid(opts.eps, "--eps");
  require_sorted_nonnegative(eps, "--eps");
  const std::vector<double> pis = parse_real_grid(opts.pi, "--pi");
  for (double pi : pis)
    if (!(pi > 0.0) || !(pi < 1.0))
      throw std::invalid_argument("--pi entries must lie in (0, 1)");
  stage = "output";
  ReportBuilder report("boundary-be", common, resolve_out_dir(common.out));
  stage = "computation";
  const BoundaryBeResult res =
      boundary_be_experiment(c_grid, eps, pis, common.tol);

  Csv couplings({"c", "jitter_tv", "jitter_tv_bar", "rounding_tv",
                 "rounding_tv_bar"});
  bool below = true;
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (res.jitter[i].value > 2.0 * c_grid[i] ||
        res.rounding[i].value > 2.0 * c_grid[i])
      below = false;
    couplings.row({c_grid[i], res.jitter[i].value, res.jitter[i].error_bar,
                   res.rounding[i].value, res.rounding[i].error_bar});
  }
  report.add_check("coupling_below_two_c", below,
                   below ? "jitter and rounding distances stay below 2c"
                         : "a coupling distance exceeded 2c");
  for (const auto& [id, fit] :
       {std::pair<const char*, const RateReport*>{"jitter_rate",
                                                  &res.jitter_fit},
        std::pair<const char*, const RateReport*>{"rounding_rate",
                                                  &res.rounding_fit}}) {
    if (!fit->fitted)
      report.add_check(id, false, "fit failed: " + fit->note);
    else
      report.add_check(id, fit->slope >= opts.slope_min,
                       "slope " + format_double(fit->slope));
  }

  Csv poisson({"c", "epsilon", "delta_lattice", "delta_lattice_bar",
               "delta_gauss", "delta_gauss_bar", "gap", "gap_bar",
               "kernel_bound", "kernel_bound_bar"});
  Csv skellam({"pi", "c", "epsilon", "delta_lattice", "delta_lattice_bar",
               "delta_gauss", "delta_gauss_bar", "gap", "gap_bar"});
  ordered_json fits = ordered_json::array();
  for (const GapSeries& s : res.series) {
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
      if (s.skellam)
        skellam.row({s.pi, c_grid[i], s.epsilon, s.lattice[i].value,
                     s.lattice[i].error_bar, s.gauss[i], 0.0, s.gaps[i].value,
                     s.gaps[i].error_bar});
      else
        poisson.row({c_grid[i], s.epsilon, s.lattice[i].value,
                     s.lattice[i].error_bar, s.gauss[i], 0.0, s.gaps[i].value,
                     s.gaps[i].error_bar, s.kernel_bound[i], 0.0});
    }
    std::string id = s.skellam
                         ? "gap_rate_centered_pi_" + format_double(s.pi) +
                               "_eps_" + format_double(s.epsilon)
                         : "gap_rate_unit_shift_eps_" +
                               format_double(s.epsilon);
    if (!s.fit.fitted)
      report.add_check(id, false, "fit failed: " + s.fit.note);
    else
      report.add_check(id, s.fit.slope >= opts.slope_min,
                       "slope " + format_double(s.fit.slope));
    if (!s.skellam)
      report.add_check(
          "kernel_bound_eps_" + format_double(s.epsilon), s.bound_ok,
          s.bound_ok ? "gap stays below (1 + e^eps)(jitter + rounding)"
                     : "pointwise kernel bound violated");
    ordered_json fj = fit_json(s.fit);
    fj["epsilon"] = s.epsilon;
    fj["family"] = s.skellam ? "centered_difference" : "unit_shift";
    if (s.skellam) fj["pi"] = s.pi;
    fits.push_back(fj);
  }

  report.doc()["grids"] =
      ordered_json{{"c", c_grid}, {"eps", eps}, {"pi", pis}};
  report.doc()["results"] =
      ordered_json{{"jitter_fit", fit_json(res.jitter_fit)},
                   {"rounding_fit", fit_json(res.rounding_fit)},
                   {"gap_fits", fits},
                   {"slope_min", opts.slope_min}};
  stage = "output";
  report.add_output("couplings.csv", couplings.str());
  report.add_output("gaps_unit_shift.csv", poisson.str());
  report.add_output("gaps_centered_difference.csv", skellam.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// obstruction
// ---------------------------------------------------------------------------

struct ObstructionOpts {
  std::string n = "1,2,5,10,20";
  std::string eps = "0,0.5,1,2";
  double floor = 0.5 - 1e-12;
};

int cmd_obstruction(std::string& stage, const ObstructionOpts& opts,
                    const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  const std::vector<int> n_grid = parse_int_grid(opts.n, "--n");
  require_increasing(n_grid, "--n");
  const std::vector<double> eps = parse_real_grid(opts.eps, "--eps");
  require_sorted_nonnegative(eps, "--eps");
  stage = "output";
  ReportBuilder report("obstruction", common, resolve_out_dir(common.out));
  const ScenarioCatalogEntry& entry = catalog_entry("obstruction");
  report.doc()["scenario"] = ordered_json{
      {"name", entry.name},
      {"definition", ordered_json::parse(scenario_to_json(entry.scenario))}};
  stage = "computation";
  const std::vector<std::vector<DeltaResult>> rows =
      parallel_map<std::vector<DeltaResult>>(
          common.jobs, n_grid.size(), [&](std::size_t i) {
            const BinaryExperiment e =
                neighboring_experiment(entry.scenario, n_grid[i], common.prune);
            std::vector<DeltaResult> out_row;
            for (double x : eps) out_row.push_back(privacy_delta(e, x));
            return out_row;
          });

  Csv csv({"n", "epsilon", "delta", "delta_bar"});
  double min_delta = 1.0;
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    for (std::size_t e = 0; e < eps.size(); ++e) {
      min_delta = std::min(min_delta, rows[i][e].value);
      csv.row({static_cast<double>(n_grid[i]), eps[e], rows[i][e].value,
               rows[i][e].error_bar});
    }
  report.add_check("delta_floor", min_delta >= opts.floor,
                   "min delta = " + format_double(min_delta) +
                       " against floor " + format_double(opts.floor));

  report.doc()["grids"] = ordered_json{{"n", n_grid}, {"eps", eps}};
  report.doc()["results"] =
      ordered_json{{"min_delta", min_delta}, {"floor", opts.floor}};
  stage = "output";
  report.add_output("obstruction.csv", csv.str());
  return report.finish(out);
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

struct CatalogOpts {
  bool run_checks = false;
  std::string scenario;  // optional filter
};

int cmd_catalog(std::string& stage, const CatalogOpts& opts,
                const Common& common, std::ostream& out) {
  stage = "argument validation";
  validate_common(common);
  if (!opts.scenario.empty()) catalog_entry(opts.scenario);  // validates name
  stage = "output";
  ReportBuilder report("catalog", common, resolve_out_dir(common.out));

  ordered_json listing = ordered_json::array();
  for (const ScenarioCatalogEntry& entry : catalog()) {
    ordered_json checks = ordered_json::array();
    for (const ScenarioCheck& c : entry.checks)
      checks.push_back(
          ordered_json{{"id", c.id}, {"description", c.description}});
    listing.push_back(ordered_json{{"name", entry.name},
                                   {"summary", entry.summary},
                                   {"checks", checks}});
  }
  report.add_output("catalog.json", ordered_json(listing).dump(2) + "\n");

  if (opts.run_checks) {
    stage = "computation";
    for (const ScenarioCatalogEntry& entry : catalog()) {
      if (!opts.scenario.empty() && entry.name != opts.scenario) continue;
      for (const CheckOutcome& outcome : run_all_checks(entry))
        report.add_check(entry.name + "." + outcome.id, outcome.passed,
                         outcome.detail);
    }
    stage = "output";
  }
  report.doc()["results"] = ordered_json{
      {"entries", catalog().size()},
      {"checks_run", opts.run_checks},
      {"filter", opts.scenario.empty() ? "all" : opts.scenario}};
  return report.finish(out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"numerical laboratory for finite-alphabet shuffle experiments"};
  app.require_subcommand(1);

  Common common;

  GeometryOpts geometry_opts;
  CLI::App* geometry_cmd = app.add_subcommand(
      "geometry", "quotient geometry report with projector identity checks");
  geometry_cmd->add_option("--scenario", geometry_opts.scenario,
                           "catalog name or scenario JSON file");
  add_common(geometry_cmd, common);

  TranscriptOpts transcript_opts;
  CLI::App* transcript_cmd = app.add_subcommand(
      "transcript", "exact histogram law, optionally with sampled draws");
  transcript_cmd->add_option("--scenario", transcript_opts.scenario,
                             "catalog name or scenario JSON file");
  transcript_cmd->add_option("--n", transcript_opts.n, "number of users")
      ->required();
  transcript_cmd->add_option("--k", transcript_opts.k,
                             "composition (defaults to the scenario rule)");
  transcript_cmd->add_option("--sample", transcript_opts.sample,
                             "also draw this many seeded samples");
  add_common(transcript_cmd, common);

  PrivacyCurveOpts curve_opts;
  CLI::App* curve_cmd = app.add_subcommand(
      "privacy-curve", "hockey-stick curve of the neighboring experiment");
  curve_cmd->add_option("--scenario", curve_opts.scenario,
                        "catalog name or scenario JSON file");
  curve_cmd->add_option("--n", curve_opts.n, "number of users")->required();
  curve_cmd->add_option("--eps", curve_opts.eps, "epsilon grid");
  add_common(curve_cmd, common);

  ProjectedRateOpts rate_opts;
  CLI::App* rate_cmd = app.add_subcommand(
      "projected-rate", "projected distance to the limit experiment over n");
  rate_cmd->add_option("--scenario", rate_opts.scenario,
                       "catalog name or scenario JSON file");
  rate_cmd->add_option("--n-grid", rate_opts.n_grid, "n grid");
  rate_cmd->add_option("--slope-max", rate_opts.slope_max,
                       "declared maximum fitted slope");
  add_common(rate_cmd, common);

  FullPrivacyOpts full_opts;
  CLI::App* full_cmd = app.add_subcommand(
      "full-privacy", "finite-n hockey-stick values against the limit");
  full_cmd->add_option("--scenario", full_opts.scenario,
                       "catalog name or scenario JSON file");
  full_cmd->add_option("--n-grid", full_opts.n_grid, "n grid");
  full_cmd->add_option("--eps", full_opts.eps, "epsilon grid");
  full_cmd->add_option("--gap-max", full_opts.gap_max,
                       "declared gap bound at the largest n");
  add_common(full_cmd, common);

  SharpnessOpts sharp_opts;
  CLI::App* sharp_cmd = app.add_subcommand(
      "sharpness", "sqrt(n) window for the surrogate distance");
  sharp_cmd->add_option("--p", sharp_opts.p, "dominant conditional weight");
  sharp_cmd->add_option("--q", sharp_opts.q, "rare split weight");
  sharp_cmd->add_option("--lambda", sharp_opts.lambda, "rare intensity scale");
  sharp_cmd->add_option("--n-grid", sharp_opts.n_grid, "n grid");
  add_common(sharp_cmd, common);

  BinomBerOpts binom_opts;
  CLI::App* binom_cmd = app.add_subcommand(
      "binom-ber", "binomial-plus-Bernoulli closed-form verification");
  binom_cmd->add_option("--m-grid", binom_opts.m_grid, "m grid");
  binom_cmd->add_option("--p", binom_opts.p, "binomial success probability")
      ->required();
  binom_cmd->add_option("--q", binom_opts.q, "alternative Bernoulli weight")
      ->required();
  binom_cmd->add_option("--mismatch-max", binom_opts.mismatch_max,
                        "declared closed-form mismatch bound");
  add_common(binom_cmd, common);

  BoundaryBeOpts boundary_opts;
  CLI::App* boundary_cmd = app.add_subcommand(
      "boundary-be", "lattice-to-Gaussian couplings and divergence gaps");
  boundary_cmd->add_option("--c-grid", boundary_opts.c_grid,
                           "lattice spacing grid, entries in (0, 1]");
  boundary_cmd->add_option("--eps", boundary_opts.eps, "epsilon list");
  boundary_cmd->add_option("--pi", boundary_opts.pi,
                           "mixing weights for the centered family");
  boundary_cmd->add_option("--slope-min", boundary_opts.slope_min,
                           "declared minimum fitted slope");
  add_common(boundary_cmd, common);

  ObstructionOpts obstruction_opts;
  CLI::App* obstruction_cmd = app.add_subcommand(
      "obstruction", "divergence floor of the pinned-composition scenario");
  obstruction_cmd->add_option("--n", obstruction_opts.n, "n list");
  obstruction_cmd->add_option("--eps", obstruction_opts.eps, "epsilon list");
  obstruction_cmd->add_option("--floor", obstruction_opts.floor,
                              "declared divergence floor");
  add_common(obstruction_cmd, common);

  CatalogOpts catalog_opts;
  CLI::App* catalog_cmd = app.add_subcommand(
      "catalog", "list the scenario catalog, optionally running its checks");
  catalog_cmd->add_flag("--run-checks", catalog_opts.run_checks,
                        "execute every declared check");
  catalog_cmd->add_option("--scenario", catalog_opts.scenario,
                          "restrict --run-checks to one entry");
  add_common(catalog_cmd, common);

  std::map<const CLI::App*, std::function<int(std::string&)>> runners;
  runners[geometry_cmd] = [&](std::string& stage) {
    return cmd_geometry(stage, geometry_opts, common, out);
  };
  runners[transcript_cmd] = [&](std::string& stage) {
    return cmd_transcript(stage, transcript_opts, common, out);
  };
  runners[curve_cmd] = [&](std::string& stage) {
    return cmd_privacy_curve(stage, curve_opts, common, out);
  };
  runners[rate_cmd] = [&](std::string& stage) {
    return cmd_projected_rate(stage, rate_opts, common, out);
  };
  runners[full_cmd] = [&](std::string& stage) {
    return cmd_full_privacy(stage, full_opts, common, out);
  };
  runners[sharp_cmd] = [&](std::string& stage) {
    return cmd_sharpness(stage, sharp_opts, common, out);
  };
  runners[binom_cmd] = [&](std::string& stage) {
    return cmd_binom_ber(stage, binom_opts, common, out);
  };
  runners[boundary_cmd] = [&](std::string& stage) {
    return cmd_boundary_be(stage, boundary_opts, common, out);
  };
  runners[obstruction_cmd] = [&](std::string& stage) {
    return cmd_obstruction(stage, obstruction_opts, common, out);
  };
  runners[catalog_cmd] = [&](std::string& stage) {
    return cmd_catalog(stage, catalog_opts, common, out);
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[argument parsing]: " << e.what() << "\n";
    return 1;
  }

  std::string stage = "setup";
  try {
    for (const auto& [sub, runner] : runners)
      if (sub->parsed()) return runner(stage);
    err << "error[argument parsing]: no subcommand selected\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[" << stage << "]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace shufflelab
