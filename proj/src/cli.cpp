#include "bcp/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcp/boundary.hpp"
#include "bcp/mc_engine.hpp"
#include "bcp/oracle.hpp"

namespace bcp::cli {

namespace {

double parse_value(std::string_view token, std::string_view spec) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (token.empty() || ec != std::errc{} || ptr != last)
    throw std::invalid_argument("bad number '" + std::string(token) + "' in '" + std::string(spec) +
                                "'");
  return v;
}

std::vector<double> parse_values(std::string_view body, std::size_t expected,
                                 std::string_view spec) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = body.find(',', start);
    out.push_back(parse_value(body.substr(start, comma == std::string_view::npos ? comma : comma - start), spec));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected)
    throw std::invalid_argument("expected " + std::to_string(expected) + " values in '" +
                                std::string(spec) + "'");
  return out;
}

std::pair<std::string_view, std::string_view> split_kind(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("missing ':' in '" + std::string(spec) + "'");
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace

JumpCountProcess parse_jumps(std::string_view spec) {
  const auto [kind, body] = split_kind(spec);
  if (kind != "poisson")
    throw std::invalid_argument("unknown jump process '" + std::string(kind) + "'");
  return PoissonProcess{parse_values(body, 1, spec)[0]};
}

JumpSizeLaw parse_law(std::string_view spec) {
  const auto [kind, body] = split_kind(spec);
  if (kind == "de") {
    const auto v = parse_values(body, 3, spec);
    return DoubleExponentialLaw{v[0], v[1], v[2]};
  }
  if (kind == "exp") return ExponentialLaw{parse_values(body, 1, spec)[0]};
  if (kind == "ber") {
    const auto v = parse_values(body, 3, spec);
    return BernoulliLaw{v[0], v[1], v[2]};
  }
  throw std::invalid_argument("unknown jump law '" + std::string(kind) + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

RunRecord run(const RunSpec& spec) {
  const Boundary boundary = parse_boundary(spec.boundary, spec.n_points);
  const JumpSizeLaw law = parse_law(spec.law);
  const JumpCountProcess jumps = PoissonProcess{spec.lambda};

  RunRecord rec{spec, 0.0, 0.0, 0.0};
  McEstimate est;
  if (spec.method == "engine") {
    ExperimentConfig c;
    c.boundary = boundary;
    c.jumps = jumps;
    c.law = law;
    c.horizon = spec.t;
    c.replications = spec.reps;
    c.seed = spec.seed;
    c.series = spec.series;
    c.workers = spec.workers;
    est = bcp(c);
  } else if (spec.method == "oracle") {
    OracleConfig oc;
    oc.grid_step = spec.grid_step;
    oc.replications = spec.reps;
    oc.seed = spec.seed;
    oc.workers = spec.workers;
    est = simulate_bcp(boundary, jumps, law, spec.t, oc);
  } else {
    throw std::invalid_argument("unknown method '" + spec.method + "'");
  }
  rec.estimate = est.estimate;
  rec.std_error = est.std_error;
  rec.wall_time = est.wall_time;
  return rec;
}

std::vector<RunSpec> table_specs(Table which, std::uint64_t seed, std::size_t reps) {
  const std::vector<std::string> boundaries =
      which == Table::Linear ? std::vector<std::string>{"constant:1", "linear:0.5,1.5", "linear:-0.5,1.5"}
                             : std::vector<std::string>{"quad", "sqrt", "expneg"};
  const std::vector<std::string> laws = {"de:0.5,10," + format_number(1.0 / 0.15), "exp:0.15",
                                         "ber:0.5,0.15,-0.15"};
  std::vector<RunSpec> out;
  for (const auto& b : boundaries) {
    for (const auto& law : laws) {
      for (double lambda : {0.0, 0.01, 3.0}) {
        RunSpec s;
        s.boundary = b;
        s.law = law;
        s.lambda = lambda;
        s.t = 1.0;
        s.reps = reps;
        s.n_points = 32;
        s.seed = seed;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::string csv_header() {
  return "boundary,law,lambda,t,reps,n,seed,method,estimate,std_error,wall_time_s";
}

std::string format_record(const RunRecord& r, Format f, bool timing) {
  const double wall = timing ? r.wall_time : 0.0;
  if (f == Format::Csv) {
    std::string line;
    line += csv_field(r.spec.boundary) + ',';
    line += csv_field(r.spec.law) + ',';
    line += format_number(r.spec.lambda) + ',';
    line += format_number(r.spec.t) + ',';
    line += std::to_string(r.spec.reps) + ',';
    line += std::to_string(r.spec.n_points) + ',';
    line += std::to_string(r.spec.seed) + ',';
    line += r.spec.method + ',';
    line += fixed6(r.estimate) + ',';
    line += fixed6(r.std_error) + ',';
    line += fixed6(wall);
    return line;
  }
  nlohmann::ordered_json j;
  j["boundary"] = r.spec.boundary;
  j["law"] = r.spec.law;
  j["lambda"] = r.spec.lambda;
  j["t"] = r.spec.t;
  j["reps"] = r.spec.reps;
  j["n"] = r.spec.n_points;
  j["seed"] = r.spec.seed;
  j["method"] = r.spec.method;
  j["estimate"] = round6(r.estimate);
  j["std_error"] = round6(r.std_error);
  j["wall_time_s"] = round6(wall);
  return j.dump();
}

std::vector<std::string> to_flags(const RunRecord& r) {
  return {"--boundary", r.spec.boundary,
          "--jumps",    "poisson:" + format_number(r.spec.lambda),
          "--law",      r.spec.law,
          "--t",        format_number(r.spec.t),
          "--reps",     std::to_string(r.spec.reps),
          "--n-points", std::to_string(r.spec.n_points),
          "--seed",     std::to_string(r.spec.seed),
          "--method",   r.spec.method};
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary-crossing probabilities of Brownian motion with jumps", "bcp"};

  std::string boundary;
  std::string jumps = "poisson:0";
  std::string law = "de:0.5,10," + format_number(1.0 / 0.15);
  double t = 1.0;
  std::size_t reps = 200000;
  std::optional<std::uint64_t> seed;
  int n_points = 32;
  double series_tol = SeriesTolerance{}.epsilon;
  std::string method = "engine";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string format = "csv";
  bool table1 = false, table2 = false, no_timing = false;
  std::string output;
  double grid_step = 1e-3;

  app.add_option("--boundary", boundary,
                 "constant:<b> | linear:<a>,<b> | two-sided:<a>,<b>,<c>,<d> | "
                 "pwl:<s0:v0;s1:v1;...> | quad | sqrt | expneg");
  app.add_option("--jumps", jumps, "poisson:<rate>")->capture_default_str();
  app.add_option("--law", law, "de:<p>,<eta1>,<eta2> | exp:<mean> | ber:<p>,<up>,<down>")
      ->capture_default_str();
  app.add_option("--t", t, "Horizon")->capture_default_str();
  app.add_option("--reps", reps, "Monte Carlo replications")->capture_default_str();
  app.add_option("--seed", seed, "Seed (falls back to $BCP_SEED, then 42)");
  app.add_option("--n-points", n_points, "Subintervals for nonlinear boundaries")
      ->capture_default_str();
  app.add_option("--series-tol", series_tol, "Term cutoff for two-sided series")
      ->capture_default_str();
  app.add_option("--method", method, "engine | oracle")
      ->check(CLI::IsMember({"engine", "oracle"}))
      ->capture_default_str();
  app.add_option("--grid-step", grid_step, "Oracle grid step")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (results do not depend on it)");
  app.add_option("--format", format, "csv | jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  app.add_flag("--table1", table1, "Run the linear-boundary table grid");
  app.add_flag("--table2", table2, "Run the nonlinear-boundary table grid");
  app.add_flag("--no-timing", no_timing, "Write 0 for wall time (byte-stable output)");
  app.add_option("--output", output, "Write records to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::uint64_t seed_value = 42;
  if (seed) {
    seed_value = *seed;
  } else if (const char* env = std::getenv("BCP_SEED")) {
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed_value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      err << "usage error: bad BCP_SEED '" << s << "'\n";
      return 2;
    }
  }

  std::vector<RunSpec> specs;
  try {
    if (table1 || table2) {
      if (table1)
        for (auto& s : table_specs(Table::Linear, seed_value, reps)) specs.push_back(s);
      if (table2)
        for (auto& s : table_specs(Table::Nonlinear, seed_value, reps)) specs.push_back(s);
      for (auto& s : specs) {
        s.method = method;
        s.workers = workers;
        s.series.epsilon = series_tol;
        s.grid_step = grid_step;
      }
    } else {
      if (boundary.empty()) {
        err << "usage error: --boundary is required (or --table1/--table2)\n";
        return 2;
      }
      RunSpec s;
      s.boundary = boundary;
      s.law = law;
      const auto proc = parse_jumps(jumps);
      s.lambda = std::get<PoissonProcess>(proc).rate;
      s.t = t;
      s.reps = reps;
      s.n_points = n_points;
      s.seed = seed_value;
      s.method = method;
      s.series.epsilon = series_tol;
      s.grid_step = grid_step;
      s.workers = workers;
      // Reject malformed specs before any sampling.
      (void)parse_boundary(s.boundary, s.n_points);
      (void)parse_law(s.law);
      specs.push_back(s);
    }
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) {
      err << "cannot open output file '" << output << "'\n";
      return 1;
    }
  }
  std::ostream& sink = output.empty() ? out : file;
  const Format fmt = format == "csv" ? Format::Csv : Format::Jsonl;
  if (fmt == Format::Csv) sink << csv_header() << '\n';
  try {
    for (const auto& s : specs) {
      sink << format_record(run(s), fmt, !no_timing) << '\n';
      sink.flush();
    }
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace bcp::cli
