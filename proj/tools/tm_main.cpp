// tm — command-line surface for the thinging-machine toolkit.
//
// Subcommands: validate | simulate | import | render | fmt
// Machine output (canonical text, histories, DOT) goes to stdout;
// diagnostics go to stderr. Exit codes: 0 ok, 1 validation/replay
// errors, 2 usage/parse errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmkit/tmkit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_parse_errors(const std::vector<tmkit::dsl::ParseDiagnostic>& errors) {
  for (const auto& e : errors) {
    std::cerr << "ERROR E-SYNTAX " << e.span.line << ":" << e.span.column << " "
              << e.message;
    if (!e.expected.empty()) {
      std::cerr << " (expected ";
      for (std::size_t i = 0; i < e.expected.size(); ++i) {
        if (i) std::cerr << ", ";
        std::cerr << e.expected[i];
      }
      std::cerr << ")";
    }
    std::cerr << "\n";
  }
}

tmkit::dsl::SourceSpan span_of(const tmkit::dsl::Document& doc,
                               const tmkit::Location& loc) {
  using Kind = tmkit::Location::Kind;
  const auto& spans = doc.spans;
  switch (loc.kind) {
    case Kind::Thimac:
      if (auto it = spans.thimacs.find(loc.id); it != spans.thimacs.end())
        return it->second;
      break;
    case Kind::Flow:
      if (loc.index >= 0 && loc.index < static_cast<int>(spans.flows.size()))
        return spans.flows[static_cast<std::size_t>(loc.index)];
      break;
    case Kind::Trigger:
      if (loc.index >= 0 && loc.index < static_cast<int>(spans.triggers.size()))
        return spans.triggers[static_cast<std::size_t>(loc.index)];
      break;
    case Kind::Event:
      if (auto it = spans.events.find(loc.id); it != spans.events.end())
        return it->second;
      break;
    case Kind::None:
      break;
  }
  return tmkit::dsl::SourceSpan{0, 0, 0};
}

void print_model_diagnostics(const tmkit::dsl::Document& doc,
                             const std::vector<tmkit::Diagnostic>& diags) {
  for (const auto& d : diags) {
    auto span = span_of(doc, d.location);
    std::cerr << (d.is_error() ? "ERROR " : "WARNING ") << d.code << " "
              << span.line << ":" << span.column << " " << d.message << "\n";
  }
}

// Loads and parses a .tm file. Returns nullopt after printing diagnostics;
// sets `exit_code` accordingly.
std::optional<tmkit::dsl::Document> load_document(const std::string& path,
                                                  int& exit_code) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "ERROR E-IO cannot read " << path << "\n";
    exit_code = kExitUsage;
    return std::nullopt;
  }
  auto result = tmkit::dsl::parse(*text);
  if (!result.ok()) {
    print_parse_errors(result.errors);
    exit_code = kExitUsage;
    return std::nullopt;
  }
  return std::move(result.doc);
}

bool write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "ERROR E-IO cannot write " << out_path << "\n";
    return false;
  }
  out << text;
  return true;
}

long max_tick_limit(long cli_value, bool cli_given, int& exit_code) {
  if (cli_given) return cli_value;
  if (const char* env = std::getenv("TM_MAX_TICK")) {
    char* end = nullptr;
    long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 0) {
      std::cerr << "ERROR E-USAGE TM_MAX_TICK is not a non-negative integer: "
                << env << "\n";
      exit_code = kExitUsage;
      return -1;
    }
    return value;
  }
  return tmkit::engine::kDefaultMaxTick;
}

int cmd_validate(const std::string& path) {
  int exit_code = kExitOk;
  auto doc = load_document(path, exit_code);
  if (!doc) return exit_code;
  auto diags = tmkit::validate(doc->model);
  print_model_diagnostics(*doc, doc->warnings);
  print_model_diagnostics(*doc, diags);
  return tmkit::has_errors(diags) ? kExitInvalid : kExitOk;
}

int cmd_fmt(const std::string& path) {
  int exit_code = kExitOk;
  auto doc = load_document(path, exit_code);
  if (!doc) return exit_code;
  auto diags = tmkit::validate(doc->model);
  if (tmkit::has_errors(diags)) {
    print_model_diagnostics(*doc, diags);
    return kExitInvalid;
  }
  std::cout << tmkit::dsl::print(*doc);
  return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& history_out,
                 long max_tick, bool max_tick_given) {
  int exit_code = kExitOk;
  long limit = max_tick_limit(max_tick, max_tick_given, exit_code);
  if (limit < 0) return exit_code;
  auto doc = load_document(path, exit_code);
  if (!doc) return exit_code;
  auto diags = tmkit::validate(doc->model);
  if (tmkit::has_errors(diags)) {
    print_model_diagnostics(*doc, diags);
    return kExitInvalid;
  }
  try {
    tmkit::engine::ReplayLimits limits{limit};
    auto history =
        tmkit::engine::replay(doc->model, doc->events, doc->schedule, limits);
    std::string text = tmkit::engine::history_to_text(history);
    if (!write_output(text, history_out)) return kExitUsage;
    if (!history_out.empty()) std::cout << text;
    for (const auto& d : history.diagnostics)
      std::cerr << (d.is_error() ? "ERROR " : "WARNING ") << d.code << " 0:0 "
                << d.message << "\n";
    return tmkit::has_errors(history.diagnostics) ? kExitInvalid : kExitOk;
  } catch (const tmkit::engine::EngineError& err) {
    std::cerr << "ERROR E-REPLAY 0:0 " << err.what() << "\n";
    return kExitInvalid;
  }
}

int cmd_import(const std::string& format, const std::string& path,
               const std::string& model_name) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "ERROR E-IO cannot read " << path << "\n";
    return kExitUsage;
  }
  try {
    tmkit::StaticModel model;
    if (format == "triples") {
      auto doc = tmkit::importers::parse_triples(*text);
      if (!doc.ok()) {
        print_parse_errors(doc.errors);
        return kExitUsage;
      }
      try {
        model = tmkit::importers::import_triples(doc.triples, model_name);
      } catch (const tmkit::importers::ImportError& err) {
        auto span = err.input_index >= 0 &&
                            err.input_index < static_cast<int>(doc.spans.size())
                        ? doc.spans[static_cast<std::size_t>(err.input_index)]
                        : tmkit::dsl::SourceSpan{0, 0, 0};
        std::cerr << "ERROR E-IMPORT " << span.line << ":" << span.column << " "
                  << err.message << "\n";
        return kExitUsage;
      }
    } else if (format == "er") {
      auto doc = tmkit::importers::parse_er(*text);
      if (!doc.ok()) {
        print_parse_errors(doc.errors);
        return kExitUsage;
      }
      try {
        model = tmkit::importers::import_er(doc.schema, model_name);
      } catch (const tmkit::importers::ImportError& err) {
        auto span =
            err.input_index >= 0 &&
                    err.input_index <
                        static_cast<int>(doc.relationship_spans.size())
                ? doc.relationship_spans[static_cast<std::size_t>(err.input_index)]
                : tmkit::dsl::SourceSpan{0, 0, 0};
        std::cerr << "ERROR E-IMPORT " << span.line << ":" << span.column << " "
                  << err.message << "\n";
        return kExitUsage;
      }
    } else {
      std::cerr << "ERROR E-USAGE unknown import format: " << format << "\n";
      return kExitUsage;
    }
    std::cout << tmkit::dsl::print(model, {}, {});
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "ERROR E-IMPORT 0:0 " << err.what() << "\n";
    return kExitUsage;
  }
}

int cmd_render(const std::string& path, const std::string& history_path,
               const std::vector<std::string>& highlight,
               const std::string& out_path, bool hide_labels) {
  int exit_code = kExitOk;
  auto doc = load_document(path, exit_code);
  if (!doc) return exit_code;
  auto diags = tmkit::validate(doc->model);
  if (tmkit::has_errors(diags)) {
    print_model_diagnostics(*doc, diags);
    return kExitInvalid;
  }
  tmkit::render::RenderOptions options;
  options.highlight_events = highlight;
  options.show_labels = !hide_labels;
  try {
    std::string dot;
    if (!history_path.empty()) {
      auto text = read_file(history_path);
      if (!text) {
        std::cerr << "ERROR E-IO cannot read " << history_path << "\n";
        return kExitUsage;
      }
      auto history = tmkit::engine::history_from_text(*text, doc->events);
      dot = tmkit::render::render_history(doc->model, history, options);
    } else {
      dot = tmkit::render::render_static(doc->model, options, doc->events);
    }
    if (!write_output(dot, out_path)) return kExitUsage;
    return kExitOk;
  } catch (const tmkit::engine::EngineError& err) {
    std::cerr << "ERROR E-RENDER 0:0 " << err.what() << "\n";
    // a history file that does not parse is an input error, not a model error
    return err.code() == tmkit::engine::EngineErrorCode::MalformedHistory
               ? kExitUsage
               : kExitInvalid;
  } catch (const std::exception& err) {
    std::cerr << "ERROR E-RENDER 0:0 " << err.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thinging-machine modeling toolkit"};
  app.require_subcommand(1);

  std::string path, history_out, history_path, out_path, format, model_name;
  std::vector<std::string> highlight;
  long max_tick = tmkit::engine::kDefaultMaxTick;
  bool hide_labels = false;

  auto* validate_cmd =
      app.add_subcommand("validate", "parse a .tm file and report diagnostics");
  validate_cmd->add_option("path", path, "model file")->required();

  auto* simulate_cmd =
      app.add_subcommand("simulate", "replay a model's schedule to a history");
  simulate_cmd->add_option("path", path, "model file")->required();
  simulate_cmd->add_option("--history-out", history_out,
                           "also write the history to this file");
  auto* max_tick_opt = simulate_cmd->add_option(
      "--max-tick", max_tick, "cut off trigger cascades at this tick");

  auto* import_cmd =
      app.add_subcommand("import", "translate .triples or .er input to .tm");
  import_cmd->add_option("--format", format, "triples or er")->required();
  import_cmd->add_option("path", path, "input file")->required();
  import_cmd->add_option("--name", model_name, "model name for the output")
      ->default_val("imported");

  auto* render_cmd = app.add_subcommand("render", "emit DOT for a model");
  render_cmd->add_option("path", path, "model file")->required();
  render_cmd->add_option("--history", history_path,
                         "history file to annotate the drawing with");
  render_cmd->add_option("--highlight", highlight,
                         "event ids to color in the static drawing")
      ->delimiter(',');
  render_cmd->add_option("-o,--out", out_path, "write DOT here instead of stdout");
  render_cmd->add_flag("--no-labels", hide_labels, "drop flow labels");

  auto* fmt_cmd = app.add_subcommand("fmt", "parse and reprint canonically");
  fmt_cmd->add_option("path", path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "ERROR E-USAGE " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(path);
    if (simulate_cmd->parsed())
      return cmd_simulate(path, history_out, max_tick,
                          max_tick_opt->count() > 0);
    if (import_cmd->parsed()) return cmd_import(format, path, model_name);
    if (render_cmd->parsed())
      return cmd_render(path, history_path, highlight, out_path, hide_labels);
    if (fmt_cmd->parsed()) return cmd_fmt(path);
  } catch (const std::exception& err) {
    std::cerr << "ERROR E-INTERNAL 0:0 " << err.what() << "\n";
    return kExitInvalid;
  } catch (...) {
    std::cerr << "ERROR E-INTERNAL 0:0 unknown failure\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
