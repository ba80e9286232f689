#pragma once

#include "mcp/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace mcp::cli {

struct Input {
  enum class Kind { builtin, file };
  Kind kind;
  std::string name;
};

struct Options {
  Command command = Command::certify;
  std::vector<Input> inputs;
  Overrides overrides;
  std::string format = "text";
  std::string seed = "identity";
  std::string out_path;
  bool parallel = true;
};

inline InstanceSpec load(const Input& in) {
  if (in.kind == Input::Kind::builtin) return builtin(in.name);
  std::ifstream f(in.name, std::ios::binary);
  if (!f) throw InputError("cannot open '" + in.name + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_instance(buf.str());
}

inline Json error_report(const Input& in, Command c, const std::exception& e) {
  Json j;
  j["instance"] = in.name;
  j["command"] = command_name(c);
  Json err;
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    static constexpr const char* kinds[] = {"lexical", "syntax", "reference", "semantic"};
    err["kind"] = kinds[static_cast<int>(pe->kind)];
    err["line"] = pe->where.line;
    err["column"] = pe->where.column;
    err["message"] = pe->message;
    if (!pe->expected.empty()) err["expected"] = pe->expected;
  } else {
    err["kind"] = "input";
    err["message"] = e.what();
  }
  j["error"] = err;
  j["exit_code"] = exit_code::input;
  return j;
}

struct Job {
  Outcome outcome;
  std::string diagnostic;  // one line for stderr on input errors
};

inline Job run_one(const Input& in, const Options& opt) {
  Job job;
  try {
    InstanceSpec spec = load(in);
    job.outcome = run_command(opt.command, spec, opt.overrides, Seed::parse(opt.seed));
  } catch (const ParseError& e) {
    job.outcome = {exit_code::input, error_report(in, opt.command, e), std::nullopt};
    job.diagnostic = (in.kind == Input::Kind::file ? in.name + ": " : "") + std::string(e.what());
  } catch (const UnknownInstance& e) {
    job.outcome = {exit_code::input, error_report(in, opt.command, e), std::nullopt};
    job.diagnostic = e.what();
  } catch (const InputError& e) {
    job.outcome = {exit_code::input, error_report(in, opt.command, e), std::nullopt};
    job.diagnostic = in.name + ": " + e.what();
  }
  return job;
}

/// Runs the tool on `args` (without the program name); returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify metric contact pairs on Lie algebras with exact arithmetic", "mcpcert"};
  app.require_subcommand(1);
  Options opt;
  std::vector<std::string> builtins, files;
  std::string kappa_text;
  std::optional<double> tol;
  bool list = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--builtin", builtins, "Registered instance name (repeatable)");
    sub->add_option("--file", files, "Instance file in .cps format (repeatable)");
    sub->add_option("--kappa", kappa_text, "Pairing constant, a positive rational");
    sub->add_option("--tol", tol, "Float tolerance for constructed metrics");
    sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--serial", [&](std::int64_t) { opt.parallel = false; }, "Process batch inputs one at a time");
  };
  auto* validate = app.add_subcommand("validate", "Check Jacobi and d^2 = 0");
  auto* detect = app.add_subcommand("detect", "Detect the contact pair type, Reeb fields and distributions");
  auto* certify = app.add_subcommand("certify", "Certify the full metric contact pair and its foliations");
  auto* associate = app.add_subcommand("associate", "Build an associated metric with decomposable phi");
  auto* listing = app.add_subcommand("list", "List builtin instances");
  listing->callback([&] { list = true; });
  for (auto* s : {validate, detect, certify, associate}) add_common(s);
  associate->add_option("--seed", opt.seed, "Seed metric: identity, metric, or random:<n>");
  associate->add_option("--out", opt.out_path, "Write the constructed instance as .cps");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::success;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::input;
  }
  if (list) {
    for (const auto& n : builtin_names()) out << n << '\n';
    return exit_code::success;
  }
  if (validate->parsed()) opt.command = Command::validate;
  else if (detect->parsed()) opt.command = Command::detect;
  else if (associate->parsed()) opt.command = Command::associate;
  else opt.command = Command::certify;

  try {
    if (!kappa_text.empty()) {
      Rational k = parse_rational(kappa_text);
      if (k <= 0) throw std::invalid_argument("kappa must be positive");
      opt.overrides.kappa = k;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: --kappa: " << e.what() << '\n';
    return exit_code::input;
  }
  if (tol) {
    if (!(*tol > 0)) {
      err << "error: --tol must be positive\n";
      return exit_code::input;
    }
    opt.overrides.tol = *tol;
  }
  try {
    Seed::parse(opt.seed);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::input;
  }
  for (const auto& b : builtins) opt.inputs.push_back({Input::Kind::builtin, b});
  for (const auto& f : files) opt.inputs.push_back({Input::Kind::file, f});
  if (opt.inputs.empty()) {
    err << "error: no input; pass --builtin <name> or --file <path>\n";
    return exit_code::input;
  }
  if (!opt.out_path.empty() && opt.inputs.size() != 1) {
    err << "error: --out needs exactly one input\n";
    return exit_code::input;
  }

  std::vector<Job> jobs;
  if (opt.parallel && opt.inputs.size() > 1) {
    std::vector<std::future<Job>> futures;
    for (const auto& in : opt.inputs) futures.push_back(std::async(std::launch::async, run_one, in, std::cref(opt)));
    for (auto& f : futures) jobs.push_back(f.get());
  } else {
    for (const auto& in : opt.inputs) jobs.push_back(run_one(in, opt));
  }

  int code = exit_code::success;
  Json all = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    code = std::max(code, j.outcome.exit_code);
    if (!j.diagnostic.empty()) err << "error: " << j.diagnostic << '\n';
    if (opt.format == "json") {
      all.push_back(j.outcome.report);
    } else {
      if (i) out << '\n';
      out << render_text(j.outcome.report);
    }
  }
  if (opt.format == "json") out << render_json(jobs.size() == 1 ? all[0] : all);

  if (!opt.out_path.empty()) {
    const auto& written = jobs.front().outcome.written;
    if (written) {
      std::ofstream f(opt.out_path, std::ios::binary);
      if (!f) {
        err << "error: cannot write '" << opt.out_path << "'\n";
        return exit_code::input;
      }
      f << *written;
    }
  }
  return code;
}

}  // namespace mcp::cli
