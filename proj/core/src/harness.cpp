#include "paa/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "paa/errors.hpp"

namespace paa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidSpec("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  if (t.empty() || t[0] == '-') throw InvalidSpec("'" + key + "' expects a non-negative integer");
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw InvalidSpec("'" + key + "' expects a non-negative integer, got '" + text + "'");
  return v;
}

Vector parse_vector(const std::string& key, const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw InvalidSpec("'" + key + "' expects a comma-separated list");
  return out;
}

// A single value broadcasts to every coordinate.
Vector fit_to(const Vector& v, std::size_t n, const std::string& what) {
  if (v.size() == n) return v;
  if (v.size() == 1) return Vector(n, v[0]);
  throw InvalidSpec(what + " has " + std::to_string(v.size()) + " entries, problem dimension is " +
                    std::to_string(n));
}

bool valid_label(const std::string& label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':' || c == '+' ||
           c == '(' || c == ')';
  });
}

SolverSetup parse_solver(const std::string& label, const std::string& text) {
  SolverSetup s;
  s.label = label;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw InvalidSpec("solver '" + label + "': expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "precond") {
      s.kind = PreconditionerKind::parse(value);
    } else if (key == "m") {
      s.m = parse_uint(key, value);
    } else if (key == "beta") {
      s.beta = parse_real(key, value);
    } else if (key == "n_update") {
      s.n_update = parse_uint(key, value);
    } else {
      throw InvalidSpec("solver '" + label + "': unknown key '" + key + "'");
    }
  }
  return s;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (problem.empty()) throw InvalidSpec("no problem given");
  if (runs < 1) throw InvalidSpec("runs must be at least 1");
  if (solvers.empty()) throw InvalidSpec("no solver configurations given");
  if (!(tol > 0.0)) throw InvalidSpec("tol must be positive");
  if (max_iter < 1) throw InvalidSpec("max_iter must be at least 1");
  std::set<std::string> seen;
  for (const auto& s : solvers) {
    if (!valid_label(s.label)) throw InvalidSpec("invalid solver label '" + s.label + "'");
    if (!seen.insert(s.label).second) throw InvalidSpec("duplicate solver label '" + s.label + "'");
    SolverConfig c;
    c.m = s.m;
    c.beta = s.beta;
    c.n_update = s.n_update;
    c.kind = s.kind;
    c.tol = tol;
    c.n_max = max_iter;
    c.divergence_threshold = divergence_threshold;
    try {
      c.validate();
    } catch (const InvalidSpec& e) {
      throw InvalidSpec("solver '" + s.label + "': " + e.what());
    }
  }
  if (box) {
    if (box->lower.size() != box->upper.size())
      throw InvalidSpec("box bounds have different lengths");
    for (std::size_t i = 0; i < box->lower.size(); ++i)
      if (box->lower[i] > box->upper[i]) throw InvalidSpec("box lower bound exceeds upper bound");
  }
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const NonlinearProblem problem = make_problem(spec.problem, spec.params);
  const std::size_t n = problem.dimension;

  std::optional<InitialGuessBox> box = spec.box;
  std::optional<Vector> fixed;
  if (spec.x0) fixed = fit_to(*spec.x0, n, "x0");
  if (!box && !fixed) {
    const DefaultGuess guess = default_guess(problem);
    box = guess.box;
    fixed = guess.fixed;
  }
  if (box) {
    box->lower = fit_to(box->lower, n, "box.lower");
    box->upper = fit_to(box->upper, n, "box.upper");
  }

  std::vector<Vector> starts(spec.runs);
  for (std::size_t r = 0; r < spec.runs; ++r) {
    if (fixed) {
      starts[r] = *fixed;
    } else {
      InitialGuessBox b = *box;
      b.seed = spec.seed + r;
      starts[r] = random_guess(b);
    }
  }

  struct Task {
    const SolverSetup* setup;
    std::size_t run;
  };
  std::vector<Task> tasks;
  for (const auto& s : spec.solvers)
    for (std::size_t r = 0; r < spec.runs; ++r) tasks.push_back({&s, r});

  auto execute = [&](const Task& t) {
    SolverConfig c;
    c.m = t.setup->m;
    c.beta = t.setup->beta;
    c.n_update = t.setup->n_update;
    c.kind = t.setup->kind;
    c.tol = spec.tol;
    c.n_max = spec.max_iter;
    c.divergence_threshold = spec.divergence_threshold;
    SolveReport rep = paa_solve(problem, starts[t.run], c);
    RunRecord rec;
    rec.label = t.setup->label;
    rec.run = t.run;
    rec.seed = spec.seed + t.run;
    rec.status = rep.status;
    rec.iterations = rep.iterations;
    rec.jacobian_builds = rep.jacobian_builds;
    rec.n_update = t.setup->n_update;
    rec.jacobian_kind = t.setup->kind.uses_jacobian();
    rec.wall_time_s = rep.wall_time_s;
    rec.residual_norms = std::move(rep.residual_norms);
    return rec;
  };

  std::vector<RunRecord> records(tasks.size());
  const std::size_t threads = std::max<std::size_t>(1, spec.threads);
  for (std::size_t begin = 0; begin < tasks.size(); begin += threads) {
    const std::size_t end = std::min(tasks.size(), begin + threads);
    if (threads == 1) {
      records[begin] = execute(tasks[begin]);
      continue;
    }
    std::vector<std::future<RunRecord>> pending;
    for (std::size_t i = begin; i < end; ++i)
      pending.push_back(std::async(std::launch::async, execute, std::cref(tasks[i])));
    for (std::size_t i = begin; i < end; ++i) records[i] = pending[i - begin].get();
  }

  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.label, a.run) < std::tie(b.label, b.run);
  });
  return records;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  if (records.empty()) throw InvalidSpec("write_csv: no records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  std::vector<const RunRecord*> ordered;
  for (const auto& r : records) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](const RunRecord* a, const RunRecord* b) {
    return std::tie(a->label, a->run) < std::tie(b->label, b->run);
  });

  const auto history_path = dir / "history.csv";
  auto history = open_for_write(history_path);
  history << "label,run,iter,residual_norm\n";
  for (const RunRecord* r : ordered)
    for (std::size_t k = 0; k < r->residual_norms.size(); ++k)
      history << r->label << ',' << r->run << ',' << k << ','
              << format_double(r->residual_norms[k]) << '\n';
  finish(history, history_path);

  const auto summary_path = dir / "summary.csv";
  auto summary = open_for_write(summary_path);
  summary << "label,run,status,iterations,jacobian_builds,wall_time_s\n";
  for (const RunRecord* r : ordered)
    summary << r->label << ',' << r->run << ',' << to_string(r->status) << ',' << r->iterations
            << ',' << r->jacobian_builds << ',' << format_double(r->wall_time_s) << '\n';
  finish(summary, summary_path);
}

std::map<HistoryKey, std::vector<double>> read_history_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "label,run,iter,residual_norm")
    throw IoError("'" + path.string() + "' is not a history CSV");
  std::map<HistoryKey, std::vector<double>> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string label, run, iter, value;
    if (!std::getline(ss, label, ',') || !std::getline(ss, run, ',') ||
        !std::getline(ss, iter, ',') || !std::getline(ss, value))
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    try {
      auto& seq = out[{label, parse_uint("run", run)}];
      if (parse_uint("iter", iter) != seq.size())
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": iteration out of order");
      seq.push_back(parse_real("residual_norm", value));
    } catch (const InvalidSpec& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SummaryRow> summary_rows(const std::vector<RunRecord>& records) {
  std::map<std::string, std::vector<const RunRecord*>> by_label;
  for (const auto& r : records) by_label[r.label].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [label, recs] : by_label) {
    SummaryRow row;
    row.label = label;
    row.runs = recs.size();
    double iters = 0.0, builds = 0.0, time = 0.0;
    for (const RunRecord* r : recs) {
      if (r->status != SolveStatus::Converged) continue;
      ++row.converged;
      iters += static_cast<double>(r->iterations);
      builds += static_cast<double>(r->jacobian_builds);
      time += r->wall_time_s;
    }
    row.failed = row.runs - row.converged;
    if (row.converged > 0) {
      const double c = static_cast<double>(row.converged);
      row.mean_iterations = iters / c;
      row.mean_jacobian_builds = builds / c;
      row.mean_wall_time_s = time / c;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summarize(const std::vector<RunRecord>& records) {
  const auto rows = summary_rows(records);
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.label.size());

  std::ostringstream out;
  auto opt = [](const std::optional<double>& v, int precision, bool sci) {
    if (!v) return std::string();
    std::ostringstream s;
    if (sci)
      s << std::scientific << std::setprecision(precision) << *v;
    else
      s << std::fixed << std::setprecision(precision) << *v;
    return s.str();
  };
  out << std::left << std::setw(static_cast<int>(width)) << "label" << std::right
      << std::setw(6) << "runs" << std::setw(11) << "converged" << std::setw(10) << "diverged"
      << std::setw(12) << "mean_iters" << std::setw(13) << "mean_builds" << std::setw(14)
      << "mean_time_s" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.label << std::right
        << std::setw(6) << r.runs << std::setw(11) << r.converged << std::setw(10) << r.failed
        << std::setw(12) << opt(r.mean_iterations, 2, false) << std::setw(13)
        << opt(r.mean_jacobian_builds, 2, false) << std::setw(14)
        << opt(r.mean_wall_time_s, 3, true) << '\n';
  }
  return out.str();
}

ExperimentSpec parse_experiment(const std::string& text) {
  ExperimentSpec spec;
  std::optional<Vector> lower, upper;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidSpec("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "problem") {
        spec.problem = value;
      } else if (key.rfind("param.", 0) == 0) {
        spec.params[key.substr(6)] = value;
      } else if (key.rfind("solver.", 0) == 0) {
        spec.solvers.push_back(parse_solver(key.substr(7), value));
      } else if (key == "runs") {
        spec.runs = parse_uint(key, value);
      } else if (key == "seed") {
        spec.seed = parse_uint(key, value);
      } else if (key == "tol") {
        spec.tol = parse_real(key, value);
      } else if (key == "max_iter") {
        spec.max_iter = parse_uint(key, value);
      } else if (key == "divergence") {
        spec.divergence_threshold = parse_real(key, value);
      } else if (key == "threads") {
        spec.threads = parse_uint(key, value);
      } else if (key == "out") {
        spec.out = value;
      } else if (key == "x0") {
        spec.x0 = parse_vector(key, value);
      } else if (key == "box.lower") {
        lower = parse_vector(key, value);
      } else if (key == "box.upper") {
        upper = parse_vector(key, value);
      } else {
        throw InvalidSpec("unknown key '" + key + "'");
      }
    } catch (const InvalidSpec& e) {
      throw InvalidSpec("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (lower.has_value() != upper.has_value())
    throw InvalidSpec("box.lower and box.upper must be given together");
  if (lower) {
    if (lower->size() != upper->size() && lower->size() != 1 && upper->size() != 1)
      throw InvalidSpec("box bounds have different lengths");
    const std::size_t n = std::max(lower->size(), upper->size());
    spec.box = InitialGuessBox{fit_to(*lower, n, "box.lower"), fit_to(*upper, n, "box.upper"), 0};
  }
  if (spec.box && spec.x0) throw InvalidSpec("give either x0 or a box, not both");
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

void apply_overrides(ExperimentSpec& spec, const SpecOverrides& o) {
  if (o.problem && *o.problem != spec.problem) {
    spec.problem = *o.problem;
    spec.params.clear();
    spec.box.reset();
    spec.x0.reset();
  }
  for (const auto& [k, v] : o.params) spec.params[k] = v;

  const bool solver_override = o.precond || o.m || o.beta || o.n_update;
  if (solver_override && spec.solvers.empty()) {
    SolverSetup s;
    s.label = o.precond.value_or("const:1");
    spec.solvers.push_back(s);
  }
  for (auto& s : spec.solvers) {
    if (o.precond) s.kind = PreconditionerKind::parse(*o.precond);
    if (o.m) s.m = *o.m;
    if (o.beta) s.beta = *o.beta;
    if (o.n_update) s.n_update = *o.n_update;
  }
  if (o.tol) spec.tol = *o.tol;
  if (o.max_iter) spec.max_iter = *o.max_iter;
  if (o.seed) spec.seed = *o.seed;
  if (o.runs) spec.runs = *o.runs;
  if (o.out) spec.out = *o.out;
}

}  // namespace paa
