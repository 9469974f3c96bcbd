// snpkit command line: simulate, transform, check, matrix, classify, export-dot.
//
// Exit codes: 0 success / ACCEPT, 1 parse failure, 2 validation error,
// 3 out-of-scope transform, 4 REJECT from check.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snpkit/constructs.hpp"
#include "snpkit/dot.hpp"
#include "snpkit/equivalence.hpp"
#include "snpkit/errors.hpp"
#include "snpkit/matrix.hpp"
#include "snpkit/parser.hpp"
#include "snpkit/simulator.hpp"
#include "snpkit/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitOutOfScope = 3;
constexpr int kExitReject = 4;

std::map<std::string, long> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, long> vars;
  for (const std::string& s : sets) {
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw snpkit::Error("--set expects name=<int>, got '" + s + "'");
    vars[s.substr(0, eq)] = std::stol(s.substr(eq + 1));
  }
  return vars;
}

snpkit::SystemDescription load(const std::string& path, const std::vector<std::string>& sets) {
  std::string text = snpkit::read_file(path);
  auto vars = parse_sets(sets);
  if (!vars.empty() || text.find('$') != std::string::npos)
    text = snpkit::substitute(text, vars);
  return snpkit::parse_system(text);
}

void write_out(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw snpkit::Error("cannot write '" + out_path + "'");
  f << content;
}

int cmd_simulate(const std::string& path, const std::vector<std::string>& sets, long horizon,
                 bool verbose, const std::string& format, const std::string& out_path) {
  snpkit::SystemDescription sys = load(path, sets);
  if (horizon <= 0) horizon = sys.default_horizon();
  snpkit::RunResult r = snpkit::run(sys, horizon);

  std::ostringstream out;
  if (format == "records") {
    for (const auto& ev : r.trace.events) out << snpkit::event_to_record(sys, ev) << "\n";
  } else {
    // events of step s, then the configuration after step s
    size_t next_event = 0;
    for (const auto& config : r.trace.configs) {
      while (next_event < r.trace.events.size() &&
             r.trace.events[next_event].step <= config.clock) {
        out << snpkit::event_to_text(sys, r.trace.events[next_event]) << "\n";
        ++next_event;
      }
      if (verbose) out << "t=" << config.clock << " config " << snpkit::config_to_text(config) << "\n";
    }
    for (; next_event < r.trace.events.size(); ++next_event)
      out << snpkit::event_to_text(sys, r.trace.events[next_event]) << "\n";
    out << "halted=" << (r.halted ? "true" : "false") << "\n";
    for (auto& [sink, list] : r.sinks.per_sink) {
      out << "sink " << sys.neurons[static_cast<size_t>(sink)].id << ":";
      long total = 0;
      for (const auto& a : list) {
        out << " " << a.step << ":" << a.count;
        total += a.count;
      }
      out << " total=" << total << "\n";
    }
    if (r.sinks.total_runtime) out << "total-runtime=" << *r.sinks.total_runtime << "\n";
    out << "lost-spikes=" << snpkit::lost_spike_count(r.trace) << "\n";
  }
  write_out(out_path, out.str());
  return kExitOk;
}

int cmd_transform(const std::string& path, const std::vector<std::string>& sets,
                  const std::string& out_path) {
  snpkit::SystemDescription sys = load(path, sets);
  snpkit::TransformResult tr = snpkit::transform(sys);
  std::string doc = snpkit::serialize_system(tr.system);
  if (out_path.empty()) {
    std::cout << doc;
    std::cerr << tr.report();
  } else {
    write_out(out_path, doc);
    write_out(out_path + ".report", tr.report());
  }
  return kExitOk;
}

int cmd_check(const std::string& original_path, const std::string& candidate_path,
              const std::vector<std::string>& sets, long horizon) {
  snpkit::SystemDescription original = load(original_path, sets);
  snpkit::SystemDescription candidate = load(candidate_path, sets);
  if (horizon <= 0)
    horizon = std::max({snpkit::compare_horizon(original), original.default_horizon(),
                        candidate.default_horizon()});
  snpkit::EquivalenceVerdict v = snpkit::compare(original, candidate, horizon);
  std::cout << v.report();
  return v.accepted ? kExitOk : kExitReject;
}

int cmd_matrix(const std::string& path, const std::vector<std::string>& sets, long horizon,
               const std::string& out_path) {
  snpkit::SystemDescription sys = load(path, sets);
  snpkit::TransitionMatrix mat = snpkit::build_transition_matrix(sys);
  std::ostringstream out;
  out << snpkit::matrix_to_text(sys, mat);
  if (horizon > 0) {
    snpkit::MatrixRun mr = snpkit::matrix_run(sys, horizon);
    out << "trace:\n";
    for (const auto& config : mr.trace) {
      for (size_t i = 0; i < config.size(); ++i) out << (i ? " " : "") << config[i];
      out << "\n";
    }
    out << "halted=" << (mr.halted ? "true" : "false") << "\n";
  }
  write_out(out_path, out.str());
  return kExitOk;
}

int cmd_classify(const std::string& path, const std::vector<std::string>& sets) {
  snpkit::SystemDescription sys = load(path, sets);
  snpkit::RoutingGraph rg = snpkit::classify_constructs(sys);
  for (const auto& c : rg.constructs) std::cout << snpkit::construct_to_text(sys, c) << "\n";
  snpkit::ValidationReport vr = snpkit::validate_restricted(sys);
  std::cout << vr.to_text();
  return kExitOk;
}

int cmd_export_dot(const std::string& path, const std::vector<std::string>& sets,
                   const std::string& out_path) {
  snpkit::SystemDescription sys = load(path, sets);
  write_out(out_path, snpkit::export_dot(sys));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking neural P system toolkit: simulate delayed systems, rewrite the four "
               "routing constructs into delay-free form, verify the rewrite, run delay-free "
               "systems as matrices."};
  app.require_subcommand(1);

  std::vector<std::string> sets;
  long horizon = 0;
  bool verbose = false;
  std::string format = "text";
  std::string out_path;

  app.add_option("--set", sets, "substitute $name in the document, name=<int>")
      ->take_all()
      ->expected(-1);
  app.add_option("--horizon", horizon, "maximum number of steps (default per system)");
  app.add_flag("--verbose", verbose, "print a configuration line per step");
  app.add_option("--format", format, "text|records")->check(CLI::IsMember({"text", "records"}));
  app.add_option("--out", out_path, "write output to this file");

  std::string in_path, candidate_path;
  auto* sim = app.add_subcommand("simulate", "run a system and report trace and sink arrivals");
  sim->add_option("file", in_path)->required();
  auto* tra = app.add_subcommand("transform", "rewrite a delayed system into a delay-free one");
  tra->add_option("file", in_path)->required();
  auto* chk = app.add_subcommand("check", "verify that the candidate simulates the original");
  chk->add_option("original", in_path)->required();
  chk->add_option("candidate", candidate_path)->required();
  auto* mat = app.add_subcommand("matrix", "dump the transition matrix (and a trace with --horizon)");
  mat->add_option("file", in_path)->required();
  auto* cls = app.add_subcommand("classify", "list routing constructs and profile violations");
  cls->add_option("file", in_path)->required();
  auto* dot = app.add_subcommand("export-dot", "emit the topology as a DOT digraph");
  dot->add_option("file", in_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(in_path, sets, horizon, verbose, format, out_path);
    if (tra->parsed()) return cmd_transform(in_path, sets, out_path);
    if (chk->parsed()) return cmd_check(in_path, candidate_path, sets, horizon);
    if (mat->parsed()) return cmd_matrix(in_path, sets, horizon, out_path);
    if (cls->parsed()) return cmd_classify(in_path, sets);
    if (dot->parsed()) return cmd_export_dot(in_path, sets, out_path);
  } catch (const snpkit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const snpkit::OutOfScopeError& e) {
    std::cerr << "out of scope: " << e.what() << "\n";
    return kExitOutOfScope;
  } catch (const snpkit::NondeterminismError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const snpkit::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const snpkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
