#include "contab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "contab/exact.hpp"
#include "contab/io.hpp"

namespace contab::cli {

namespace {

enum class Format { Json, Csv, Text };

struct Options {
  std::string mode = "zero-one";
  std::string margins_path;
  std::string mask_path;
  double tol = 1e-10;
  std::uint64_t budget = 10'000'000;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string format;
  std::string out_path;
  std::uint64_t count = 1;
  bool exact = true;
  std::int64_t guard = kDefaultEnumerationGuard;
};

std::string fmt(double v) {
  if (!std::isfinite(v)) return v < 0 ? "-inf" : (v > 0 ? "inf" : "nan");
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_null()) return "n/a";
  return v.dump();
}

// key: value lines (text) or key,value rows (csv) for a flat report.
std::string render_flat(const json& doc, Format format) {
  std::ostringstream s;
  if (format == Format::Csv) s << "key,value\n";
  for (const auto& [key, value] : doc.items()) {
    const std::string text = value.is_structured() ? value.dump() : scalar_text(value);
    if (format == Format::Csv)
      s << key << ',' << (value.is_structured() ? "\"" + text + "\"" : text) << '\n';
    else
      s << key << ": " << text << '\n';
  }
  return s.str();
}

SolverOptions solver_options(const Options& o) {
  SolverOptions s;
  s.tolerance = o.tol;
  return s;
}

struct CompareRow {
  std::string verb;
  std::optional<double> value_log;
  std::string decimal = "n/a";
  std::string flags;
};

std::string render_compare(const std::vector<CompareRow>& rows, std::optional<double> reference, Format format) {
  std::ostringstream s;
  auto gap = [&](const CompareRow& r) -> std::optional<double> {
    if (!reference || !r.value_log) return std::nullopt;
    return *r.value_log - *reference;
  };
  if (format == Format::Json) {
    json doc = json::array();
    for (const auto& r : rows) {
      const auto g = gap(r);
      doc.push_back({{"verb", r.verb},
                     {"value_log", r.value_log ? json(*r.value_log) : json(nullptr)},
                     {"value_decimal_or_na", r.decimal},
                     {"gap", g ? json(*g) : json(nullptr)},
                     {"regime_flags", r.flags}});
    }
    return doc.dump(2) + "\n";
  }
  if (format == Format::Csv) {
    s << "verb,value_log,value_decimal_or_na,regime_flags\n";
    for (const auto& r : rows)
      s << r.verb << ',' << (r.value_log ? fmt(*r.value_log) : "n/a") << ',' << r.decimal << ',' << r.flags << '\n';
    return s.str();
  }
  auto line = [&s](const std::string& verb, const std::string& value, const std::string& g, const std::string& dec,
                   const std::string& flags) {
    s << std::left << std::setw(22) << verb << ' ' << std::setw(18) << value << ' ' << std::setw(18) << g << ' '
      << std::setw(24) << dec << ' ' << flags << '\n';
  };
  line("verb", "value_log", "gap", "decimal", "flags");
  for (const auto& r : rows) {
    const auto g = gap(r);
    line(r.verb, r.value_log ? fmt(*r.value_log) : "n/a", g ? fmt(*g) : "n/a", r.decimal, r.flags);
  }
  return s.str();
}

class Runner {
 public:
  Runner(std::string verb, Options o, std::ostream& out) : verb_(std::move(verb)), o_(std::move(o)), out_(out) {}

  int run() {
    doc_ = read_json_file(o_.margins_path);
    mode_ = mode_from_string(o_.mode);
    if (verb_ == "concavity") return concavity();
    auto input = margins_from_json(doc_);
    margins_ = std::move(input.margins);
    mask_ = std::move(input.mask);
    if (!o_.mask_path.empty()) mask_ = mask_from_json(read_json_file(o_.mask_path), margins_->m(), margins_->n());

    if (verb_ == "feasible") return feasible();
    if (verb_ == "count") return count();
    if (verb_ == "maxent") return maxent();
    if (verb_ == "bounds") return bounds();
    if (verb_ == "independence") return independence();
    if (verb_ == "diagnose") return emit(to_json(correlation_diagnostic(*margins_, mode_, {2.0, solver_options(o_)})));
    if (verb_ == "asymptotic") return emit(to_json(asymptotic_count(*margins_, mode_, {0.1, solver_options(o_)})));
    if (verb_ == "sample") return sample();
    if (verb_ == "compare") return compare();
    throw Error(ErrorKind::ParseError, "unknown verb " + verb_);
  }

 private:
  Format format(Format fallback) const {
    if (o_.format.empty()) return fallback;
    if (o_.format == "json") return Format::Json;
    if (o_.format == "csv") return Format::Csv;
    return Format::Text;
  }

  int write(const std::string& text) {
    if (o_.out_path.empty() || verb_ == "sample") {
      out_ << text;
    } else {
      std::ofstream f(o_.out_path);
      if (!f) throw Error(ErrorKind::ParseError, "cannot write '" + o_.out_path + "'");
      f << text;
    }
    return kOk;
  }

  int emit(const json& doc, Format fallback = Format::Text) {
    const auto f = format(fallback);
    return write(f == Format::Json ? doc.dump(2) + "\n" : render_flat(doc, f));
  }

  int feasible() {
    const bool ok = gale_ryser_feasible(*margins_);
    if (format(Format::Text) == Format::Text) return write(ok ? "feasible\n" : "infeasible\n");
    return emit({{"feasible", ok}});
  }

  int count() {
    const auto c = count_exact(*margins_, mode_, mask_);
    if (format(Format::Text) == Format::Text) return write(to_decimal(c) + "\n");
    return emit({{"mode", to_string(mode_)}, {"count", to_decimal(c)}, {"log_count", log_of(c)}});
  }

  int maxent() {
    const auto sol = solve_maxent(mode_, *margins_, mask_, solver_options(o_));
    return emit(to_json(sol), Format::Json);
  }

  int bounds() {
    if (mode_ == Mode::ZeroOne) {
      const auto b = bounds_01(*margins_, solver_options(o_));
      return emit({{"mode", "zero-one"}, {"log_lower", b.log_lower}, {"log_upper", b.log_upper}});
    }
    const auto b = bounds_nonneg(*margins_, solver_options(o_));
    return emit({{"mode", "nonneg"}, {"log_upper", b.log_upper}, {"correction", b.correction}});
  }

  int independence() {
    return emit({{"mode", to_string(mode_)}, {"log_independence", independence_estimate(mode_, *margins_)}});
  }

  int concavity() {
    if (!doc_.contains("items") || !doc_.at("items").is_array())
      throw Error(ErrorKind::ParseError, "concavity input needs an \"items\" array");
    std::vector<WeightedMargins> items;
    for (const auto& it : doc_.at("items")) {
      if (!it.contains("weight") || !it.at("weight").is_number())
        throw Error(ErrorKind::ParseError, "each item needs a numeric \"weight\"");
      items.push_back({margins_from_json(it).margins, it.at("weight").get<double>()});
    }
    return emit(to_json(log_concavity_check(items, mode_, o_.exact, o_.guard)));
  }

  int sample() {
    std::ofstream sink;
    SamplerOptions opts;
    opts.budget = o_.budget;
    opts.threads = o_.threads;
    opts.target_accepted = o_.count;
    opts.keep_samples = std::min<std::uint64_t>(o_.count, 10);
    opts.solver = solver_options(o_);
    if (!o_.out_path.empty()) {
      sink.open(o_.out_path);
      if (!sink) throw Error(ErrorKind::ParseError, "cannot write '" + o_.out_path + "'");
      opts.sink = [&sink](const IntMatrix& d) { sink << matrix_to_json(d).dump() << '\n'; };
    }
    const auto result = sample_uniform(*margins_, mode_, {o_.seed, 0}, opts);
    emit(to_json(result.report), Format::Json);
    if (result.exhausted()) throw Error(ErrorKind::BudgetExhausted, "no sample accepted within the trial budget");
    return kOk;
  }

  int compare() {
    std::vector<CompareRow> rows;
    std::optional<double> reference;
    const auto& M = *margins_;
    if (M.m() * M.n() <= o_.guard) {
      const auto c = count_exact(M, mode_);
      reference = log_of(c);
      rows.push_back({"count", reference, to_decimal(c), "exact"});
    } else {
      rows.push_back({"count", std::nullopt, "n/a", "outside_guard"});
    }
    try {
      if (mode_ == Mode::ZeroOne) {
        const auto b = bounds_01(M, solver_options(o_));
        rows.push_back({"bounds_lower", b.log_lower, "n/a", ""});
        rows.push_back({"bounds_upper", b.log_upper, "n/a", ""});
      } else {
        const auto b = bounds_nonneg(M, solver_options(o_));
        rows.push_back({"bounds_upper", b.log_upper, "n/a", "correction=" + fmt(b.correction)});
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoInterior) throw;
      rows.push_back({"bounds", std::nullopt, "n/a", "no_interior"});
    }
    try {
      rows.push_back({"independence", independence_estimate(mode_, M), "n/a", ""});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OutOfRange) throw;
      rows.push_back({"independence", std::nullopt, "n/a", "out_of_range"});
    }
    try {
      const auto e = asymptotic_count(M, mode_, {0.1, solver_options(o_)});
      const std::string flag = e.in_regime ? "in_regime" : "outside_regime";
      rows.push_back({"asymptotic_gaussian", e.gaussian_log, "n/a", flag});
      rows.push_back({"asymptotic_corrected", e.corrected_log, "n/a", flag});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoInterior && e.kind() != ErrorKind::OutOfRange) throw;
      rows.push_back({"asymptotic", std::nullopt, "n/a", e.kind() == ErrorKind::NoInterior ? "no_interior" : "out_of_range"});
    }
    return write(render_compare(rows, reference, format(Format::Text)));
  }

  std::string verb_;
  Options o_;
  std::ostream& out_;
  json doc_;
  Mode mode_ = Mode::ZeroOne;
  std::optional<Margins> margins_;
  std::optional<CellMask> mask_;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Count, estimate and sample matrices with prescribed row and column sums", "contab"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"feasible", "Gale-Ryser test for 0-1 matrices"},
      {"count", "exact count by dynamic programming"},
      {"maxent", "maximum-entropy matrix and dual certificate"},
      {"bounds", "upper and lower bounds from the maximum-entropy value"},
      {"independence", "independence estimate"},
      {"diagnose", "repel/attract diagnostic"},
      {"concavity", "log-concavity check over weighted margins"},
      {"asymptotic", "Gaussian and Edgeworth-corrected asymptotic count"},
      {"sample", "exact-uniform rejection sampling"},
      {"compare", "all estimates side by side"},
  };
  const std::vector<std::string> modes = {"zero-one", "01", "nonneg", "non-negative"};
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--mode", o.mode, "zero-one | nonneg")->check(CLI::IsMember(modes));
    sub->add_option("--margins,margins", o.margins_path, "margins JSON file")->required();
    sub->add_option("--mask", o.mask_path, "mask JSON file");
    sub->add_option("--tol", o.tol, "solver gradient tolerance (relative to 1 + N)")->check(CLI::PositiveNumber);
    sub->add_option("--budget", o.budget, "maximum sampling trials");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", o.out_path, "output path (sample: JSON-lines of accepted matrices)");
    if (name == "sample") sub->add_option("--count", o.count, "number of accepted samples")->check(CLI::PositiveNumber);
    if (name == "concavity") sub->add_flag("--exact,!--no-exact", o.exact, "use exact counts (default on)");
    if (name == "compare" || name == "concavity")
      sub->add_option("--guard", o.guard, "largest m*n for exact counting");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsageError;
  }

  const auto subs = app.get_subcommands();
  try {
    return Runner(subs.front()->get_name(), o, out).run();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ParseError ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace contab::cli
