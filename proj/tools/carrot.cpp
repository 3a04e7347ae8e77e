#include <glob.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carrot/convergence.hpp"
#include "carrot/corpus.hpp"
#include "carrot/diff.hpp"
#include "carrot/minilang.hpp"

namespace fs = std::filesystem;
using namespace carrot;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for " + path);
}

void emit(const std::string& out_path, std::string_view content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

// run_10 sorts after run_2: digit runs compare numerically.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      std::string_view na = std::string_view(a).substr(i, ie - i);
      std::string_view nb = std::string_view(b).substr(j, je - j);
      std::string_view ta = na.substr(std::min(na.find_first_not_of('0'), na.size()));
      std::string_view tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size()));
      if (ta.size() != tb.size()) return ta.size() < tb.size();
      if (ta != tb) return ta < tb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

std::vector<std::string> expand_traces(const std::vector<std::string>& patterns) {
  std::vector<std::string> paths;
  for (const std::string& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), GLOB_NOSORT, nullptr, &g);
    std::vector<std::string> matched;
    if (rc == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) matched.emplace_back(g.gl_pathv[i]);
    globfree(&g);
    if (rc == GLOB_NOMATCH || matched.empty())
      throw std::runtime_error("no traces match '" + pattern + "'");
    if (rc != 0 && rc != GLOB_NOMATCH)
      throw std::runtime_error("cannot expand '" + pattern + "'");
    std::sort(matched.begin(), matched.end(), natural_less);
    for (std::string& p : matched)
      if (std::find(paths.begin(), paths.end(), p) == paths.end())
        paths.push_back(std::move(p));
  }
  return paths;
}

Trace load_trace(const std::string& path) {
  try {
    return parse_trace(read_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line()) + ": " +
                             e.message());
  }
}

std::vector<Trace> load_traces(const std::vector<std::string>& paths) {
  std::vector<Trace> traces;
  traces.reserve(paths.size());
  for (const std::string& p : paths) traces.push_back(load_trace(p));
  return traces;
}

struct ConfigFlags {
  std::string schemata;
  bool no_vsets = false;
  bool no_psets = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--schemata", schemata,
                   "Comma list of eq,sum,lessthan,const (default: all)");
    cmd.add_flag("--no-vsets", no_vsets, "Disable value sets");
    cmd.add_flag("--no-psets", no_psets, "Disable pair value sets");
  }

  AnalysisConfig to_config() const {
    AnalysisConfig cfg;
    if (!schemata.empty()) {
      cfg.schemas = SchemaSet::none();
      std::stringstream ss{schemata};
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto kind = mini_flag(item);
        if (!kind)
          throw std::runtime_error("unknown schema '" + item +
                                   "' (expected eq, sum, lessthan, const)");
        cfg.schemas.insert(*kind);
      }
    }
    cfg.value_sets = !no_vsets;
    cfg.pair_sets = !no_psets;
    cfg.validate();
    return cfg;
  }

private:
  static std::optional<SchemaKind> mini_flag(const std::string& item) {
    return schema_from_flag(item);
  }
};

uint64_t step_budget_from_env() {
  const char* env = std::getenv("CARROT_STEP_BUDGET");
  if (!env) return mini::InterpOptions{}.step_budget;
  const std::string text(env);
  uint64_t value = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc{} || ptr != last || value == 0)
    throw std::runtime_error("CARROT_STEP_BUDGET must be a positive integer, got '" +
                             text + "'");
  return value;
}

int cmd_trace(const std::string& program_path, const std::string& cases_path,
              const std::string& out_dir, std::string entry) {
  const std::string source = read_file(program_path);
  mini::Program program;
  try {
    program = mini::parse_program(source);
  } catch (const mini::LangError& e) {
    throw std::runtime_error(program_path + ":" + std::to_string(e.pos().line) + ":" +
                             std::to_string(e.pos().col) + ": " + e.message());
  }
  if (entry.empty()) {
    if (program.functions.size() != 1) {
      std::string names;
      for (const mini::FunctionDef& fn : program.functions)
        names += (names.empty() ? "" : ", ") + fn.name;
      throw std::runtime_error("program defines " +
                               std::to_string(program.functions.size()) +
                               " functions (" + names + "); pick one with --entry");
    }
    entry = program.functions[0].name;
  }
  std::vector<mini::InputCase> cases;
  try {
    cases = mini::parse_cases(read_file(cases_path), entry);
  } catch (const ParseError& e) {
    throw std::runtime_error(cases_path + ":" + std::to_string(e.line()) + ": " +
                             e.message());
  }
  if (cases.empty()) {
    std::cerr << "carrot: warning: no cases in " << cases_path << ", nothing to do\n";
    return 0;
  }
  mini::InterpOptions options;
  options.step_budget = step_budget_from_env();
  const mini::CorpusResult corpus =
      mini::run_corpus(program, cases, mini::LabelRule::Oracle, options);
  fs::create_directories(out_dir);
  for (const mini::LabeledRun& run : corpus.runs) {
    const fs::path path = fs::path(out_dir) / (run.outcome.trace.run_id + ".trace");
    write_file(path.string(), write_trace(run.outcome.trace));
  }
  std::cout << "wrote " << corpus.runs.size() << " traces to " << out_dir << ": "
            << corpus.good_count() << " good, " << corpus.bad_count() << " bad\n";
  return 0;
}

int cmd_spectrum(const std::string& trace_path, const ConfigFlags& flags,
                 const std::string& out_path) {
  const Trace trace = load_trace(trace_path);
  const Spectrum spectrum = compute_spectrum(trace, flags.to_config());
  emit(out_path, write_spectrum(spectrum));
  return 0;
}

int cmd_model(const std::vector<std::string>& patterns, const ConfigFlags& flags,
              const std::string& out_path) {
  const std::vector<Trace> traces = load_traces(expand_traces(patterns));
  const Model model = model_of_traces(traces, flags.to_config());
  write_file(out_path, write_model(model));
  std::cout << "live invariants: " << model.live_count() << "\n";
  return 0;
}

int cmd_diff(const std::string& model_path, const std::string& trace_path,
             const std::string& format, const std::string& out_path) {
  Model model;
  try {
    model = parse_model(read_file(model_path));
  } catch (const ParseError& e) {
    throw std::runtime_error(model_path + ":" + std::to_string(e.line()) + ": " +
                             e.message());
  }
  const Trace bad = load_trace(trace_path);
  // the bad spectrum must be comparable, so it inherits the model's config
  const Spectrum spectrum = compute_spectrum(bad, model.config);
  const DiffReport report = diff(model, spectrum);
  emit(out_path, render_report(report, format == "structured"
                                           ? ReportFormat::Structured
                                           : ReportFormat::Text));
  return 0;
}

int cmd_converge(const std::vector<std::string>& patterns, const ConfigFlags& flags,
                 std::size_t window, const std::string& out_path) {
  const std::vector<Trace> traces = load_traces(expand_traces(patterns));
  const std::vector<Spectrum> spectra = compute_spectra(traces, flags.to_config());
  const ConvergenceCurve curve = convergence_curve(spectra);
  const auto steady = steady_state(curve, window);
  std::string out = curve_to_csv(curve);
  out += "steady_state=" + (steady ? std::to_string(*steady) : std::string("none")) +
         "\n";
  emit(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carrot: potential-invariant spectra for fault localization"};
  app.require_subcommand(1);

  // trace
  auto* trace_cmd = app.add_subcommand(
      "trace", "Run a .mini program over a case file and write labeled traces");
  std::string program_path, cases_path, out_dir, entry;
  trace_cmd->add_option("program", program_path, "Program source (.mini)")->required();
  trace_cmd->add_option("cases", cases_path, "Case file: 'arg... -> expected'")
      ->required();
  trace_cmd->add_option("outdir", out_dir, "Output directory for .trace files")
      ->required();
  trace_cmd->add_option("--entry", entry,
                        "Entry function (default: the only function)");

  // spectrum
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "Compute one run's spectrum from a trace");
  std::string spectrum_trace, spectrum_out;
  ConfigFlags spectrum_flags;
  spectrum_cmd->add_option("trace", spectrum_trace, "Trace file")->required();
  spectrum_flags.attach(*spectrum_cmd);
  spectrum_cmd->add_option("--out", spectrum_out, "Write here instead of stdout");

  // model
  auto* model_cmd =
      app.add_subcommand("model", "Combine good-run traces into a model file");
  std::vector<std::string> model_patterns;
  std::string model_out;
  ConfigFlags model_flags;
  model_cmd->add_option("traces", model_patterns, "Trace files or globs")->required();
  model_flags.attach(*model_cmd);
  model_cmd->add_option("--out", model_out, "Model file to write")->required();

  // diff
  auto* diff_cmd =
      app.add_subcommand("diff", "Contrast a model with a bad run's trace");
  std::string diff_model, diff_trace, diff_format = "text", diff_out;
  diff_cmd->add_option("model", diff_model, "Model file")->required();
  diff_cmd->add_option("trace", diff_trace, "Bad run's trace file")->required();
  diff_cmd->add_option("--format", diff_format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  diff_cmd->add_option("--out", diff_out, "Write here instead of stdout");

  // converge
  auto* converge_cmd = app.add_subcommand(
      "converge", "Curve of model evolution over an ordered good corpus");
  std::vector<std::string> converge_patterns;
  std::string converge_out;
  std::size_t window = 10;
  ConfigFlags converge_flags;
  converge_cmd->add_option("traces", converge_patterns, "Trace files or globs")
      ->required();
  converge_cmd->add_option("--window", window, "Steady-state window (runs)")
      ->check(CLI::PositiveNumber);
  converge_flags.attach(*converge_cmd);
  converge_cmd->add_option("--out", converge_out, "Write here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trace_cmd->parsed()) return cmd_trace(program_path, cases_path, out_dir, entry);
    if (spectrum_cmd->parsed())
      return cmd_spectrum(spectrum_trace, spectrum_flags, spectrum_out);
    if (model_cmd->parsed()) return cmd_model(model_patterns, model_flags, model_out);
    if (diff_cmd->parsed()) return cmd_diff(diff_model, diff_trace, diff_format, diff_out);
    if (converge_cmd->parsed())
      return cmd_converge(converge_patterns, converge_flags, window, converge_out);
  } catch (const std::exception& e) {
    std::cerr << "carrot: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
