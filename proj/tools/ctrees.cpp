// Command-line front end. Exit codes: 0 holds or success, 1 fails, 2 unknown
// (budget exhausted), 64 bad usage or unreadable input.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctree/ccs.hpp"
#include "ctree/coop.hpp"
#include "ctree/core.hpp"
#include "ctree/equiv.hpp"
#include "ctree/interp.hpp"
#include "ctree/laws.hpp"
#include "ctree/lts.hpp"

using namespace ctree;
using json = nlohmann::ordered_json;

namespace {

constexpr int kHolds = 0, kFails = 1, kUnknown = 2, kUsage = 64;

struct Globals {
  std::size_t fuel = 10'000;
  std::size_t max_states = 100'000;
  bool json = false;
  std::string dot;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  Budget budget() const { return Budget{max_states, fuel}; }
};

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_for(const Verdict& v) { return v.is_holds() ? kHolds : v.is_fails() ? kFails : kUnknown; }

// A program argument names a file when one exists at that path, and is taken
// as source text otherwise.
std::string source_of(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream in(arg);
  if (!in) throw InputError("cannot read " + arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_dot(const Globals& g, const FiniteLTS& lts) {
  if (g.dot.empty()) return;
  std::ofstream out(g.dot);
  if (!out) throw InputError("cannot write " + g.dot);
  out << to_dot(lts);
}

std::string ccs_label(const Label& l) {
  if (l.is_tau()) return "tau";
  if (l.is_obs() && event_name(l.event()) == "act") {
    const Value& a = event_args(l.event())[0];
    return a.is_sym() ? a.as_sym() : "'" + a[1].as_sym();
  }
  return l.str();
}

std::string plain_label(const Label& l) { return l.str(); }

template <class Fmt>
std::string trace_text(const std::vector<Label>& trace, Fmt fmt) {
  std::string s;
  for (const auto& l : trace) s += (s.empty() ? "" : " ") + fmt(l);
  return s;
}

template <class Fmt>
int report_verdict(const Globals& g, const Verdict& v, Fmt fmt) {
  if (g.json) {
    std::cout << json::parse(v.to_json()).dump(2) << "\n";
  } else {
    std::cout << v.name() << "\n";
    if (v.is_fails()) {
      std::cout << "counterexample: " << trace_text(v.witness().trace, fmt) << "\n";
      if (!v.witness().note.empty()) std::cout << "note: " << v.witness().note << "\n";
    }
    if (v.is_unknown()) std::cout << "reason: " << v.reason() << "\n";
  }
  return exit_for(v);
}

template <class Fmt, class StateFmt>
int report_lts(const Globals& g, const FiniteLTS& lts, Fmt fmt, StateFmt state) {
  write_dot(g, lts);
  if (g.json) {
    std::cout << json::parse(to_json(lts)).dump(2) << "\n";
  } else {
    std::cout << "states " << lts.size() << ", transitions " << lts.transitions.size()
              << (lts.partial ? ", partial" : "") << "\n";
    for (std::size_t s = 0; s < lts.size(); ++s) {
      std::string st = state(lts.states[s]);
      if (!st.empty()) std::cout << "  s" << s << " = " << st << "\n";
    }
    for (const auto& t : lts.transitions) {
      std::cout << "  s" << t.src << " --" << fmt(lts.labels[t.label]) << "--> s" << t.dst << "\n";
    }
  }
  return lts.partial ? kUnknown : kHolds;
}

std::string no_state(const Value&) { return ""; }

// ---------------------------------------------------------------------------

struct CcsOpts {
  std::string p, q;
  std::string mode = "strong";
  std::string semantics = "den";
  std::string unit = "collapse";
};

ccs::Mode unit_mode(const CcsOpts& o) { return o.unit == "verbatim" ? ccs::Mode::Verbatim : ccs::Mode::Collapse; }

Value parse_ccs(const std::string& text) { return ccs::parse(source_of(text)); }

int ccs_parse(const Globals& g, const CcsOpts& o) {
  Value p = parse_ccs(o.p);
  if (g.json) {
    json j;
    j["process"] = ccs::print(p);
    j["ast"] = p.str();
    j["channels"] = ccs::channels(p);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << ccs::print(p) << "\n";
  }
  return kHolds;
}

int ccs_check(const Globals& g, const CcsOpts& o) {
  Value p = parse_ccs(o.p), q = parse_ccs(o.q);
  bool weak = o.mode == "weak";
  Budget b = g.budget();
  auto den = [&] { return weak ? ccs::check_den_wbisim(p, q, b) : ccs::check_den_bisim(p, q, b); };
  auto op = [&] { return weak ? ccs::check_op_wbisim(p, q, b) : ccs::check_op_bisim(p, q, b); };
  if (o.semantics == "op") return report_verdict(g, op(), ccs_label);
  if (o.semantics == "den") return report_verdict(g, den(), ccs_label);
  Verdict d = den(), s = op();
  bool agree = d.status() == s.status() || d.is_unknown() || s.is_unknown();
  if (g.json) {
    json j;
    j["denotational"] = json::parse(d.to_json());
    j["operational"] = json::parse(s.to_json());
    j["agree"] = agree;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "denotational: " << d.name() << "\n";
    if (d.is_fails()) std::cout << "counterexample: " << trace_text(d.witness().trace, ccs_label) << "\n";
    std::cout << "operational: " << s.name() << "\n";
    if (!agree) std::cout << "the two semantics disagree\n";
  }
  if (!agree) return kUnknown;
  return exit_for(d.is_unknown() ? s : d);
}

int ccs_lts(const Globals& g, const CcsOpts& o) {
  Value p = parse_ccs(o.p);
  if (o.semantics == "op") {
    FiniteLTS l = ccs::op_lts({p}, g.budget(), unit_mode(o));
    return report_lts(g, l, ccs_label, [](const Value& s) { return ccs::print(s); });
  }
  FiniteLTS l = ccs::den_lts({p}, g.budget(), unit_mode(o));
  return report_lts(g, l, ccs_label, no_state);
}

// ---------------------------------------------------------------------------

struct CoopOpts {
  std::string p, q;
  std::string scheduler = "random";
  std::size_t steps = 1000;
  std::int64_t domain = 3;
  std::vector<std::string> init;
  std::string mode = "weak";
  std::string level = "mem";
};

Value parse_program(const std::string& arg) { return coop::parse_imp(source_of(arg)); }

Value initial_store(const CoopOpts& o, const std::vector<Value>& progs) {
  std::set<std::string> vars;
  for (const auto& s : progs) {
    for (const auto& x : coop::variables(s)) vars.insert(x);
  }
  std::vector<std::pair<std::string, std::int64_t>> init;
  for (const auto& kv : o.init) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--init expects x=v, got " + kv);
    std::string x = kv.substr(0, eq);
    std::int64_t v = 0;
    try {
      v = std::stoll(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("--init expects x=v, got " + kv);
    }
    vars.insert(x);
    init.emplace_back(x, v);
  }
  return coop::make_store({vars.begin(), vars.end()}, init);
}

json store_json(const Value& store) {
  json j = json::object();
  for (const auto& row : store.items()) j[row[0].as_sym()] = row[1].as_int();
  return j;
}

int coop_run(const Globals& g, const CoopOpts& o) {
  Value s = parse_program(o.p);
  coop::Config cfg{o.domain};
  Value st = initial_store(o, {s});
  Value t = coop::run_program(s, st, cfg);
  bool rr = o.scheduler == "rr";
  // The round-robin refinement threads a counter through the store pair.
  if (rr) t = refine_state(spick::round_robin(), t, vint(0));
  RunResult r = run_random(DefTable::standard(), t, g.seed, o.steps, g.budget());
  json j = json::parse(r.to_json());
  json out;
  out["scheduler"] = o.scheduler;
  out["seed"] = g.seed;
  out["outcome"] = j["outcome"];
  out["trace"] = j["trace"];
  if (r.outcome == RunResult::Outcome::Returned) {
    const Value& final_pair = rr ? r.value[1] : r.value;
    out["store"] = store_json(final_pair[0]);
  } else {
    out["store"] = nullptr;
  }
  std::cout << out.dump(2) << "\n";
  return r.outcome == RunResult::Outcome::OutOfSteps ? kUnknown : kHolds;
}

Value coop_tree(const CoopOpts& o, const Value& s, const Value& st) {
  coop::Config cfg{o.domain};
  if (o.level == "sched") return coop::run_scheduled(s, cfg);
  if (o.level == "den") return coop::denote(s, cfg);
  return coop::run_program(s, st, cfg);
}

int coop_equiv(const Globals& g, const CoopOpts& o) {
  Value a = parse_program(o.p), b = parse_program(o.q);
  Value st = initial_store(o, {a, b});
  Value ta = coop_tree(o, a, st), tb = coop_tree(o, b, st);
  const DefTable& d = DefTable::standard();
  Verdict v = o.mode == "strong" ? check_sbisim(d, ta, tb, g.budget()) : check_wbisim(d, ta, tb, g.budget());
  return report_verdict(g, v, plain_label);
}

int coop_lts(const Globals& g, const CoopOpts& o) {
  Value s = parse_program(o.p);
  Value st = initial_store(o, {s});
  FiniteLTS l = extract_lts(DefTable::standard(), coop_tree(o, s, st), g.budget());
  return report_lts(g, l, plain_label, no_state);
}

// ---------------------------------------------------------------------------

struct ImpBrOpts {
  std::string mode = "brd";
  std::string program = "br { while true do print end } { block }";
};

int impbr_demo(const Globals& g, const ImpBrOpts& o) {
  Value s = coop::parse_impbr(source_of(o.program));
  coop::BrMode m = o.mode == "vis" ? coop::BrMode::VisFlip : o.mode == "brs" ? coop::BrMode::BrS : coop::BrMode::BrD;
  if (!coop::variables(s).empty()) {
    FiniteLTS l = extract_lts(DefTable::standard(),
                              coop::run_impbr(s, m, coop::make_store(coop::variables(s))), g.budget());
    return report_lts(g, l, plain_label, no_state);
  }
  FiniteLTS l = extract_lts(DefTable::standard(), coop::denote_impbr(s, m), g.budget());
  return report_lts(g, l, plain_label, no_state);
}

// ---------------------------------------------------------------------------

struct LawOpts {
  std::string suite;
  std::size_t instances = 200;
};

int check_laws(const Globals& g, const LawOpts& o) {
  std::string suite = o.suite == "fig8" ? "elementary" : o.suite;
  auto reports = check_suite(suite, g.seed, o.instances, g.budget(), std::max(1u, g.jobs));
  bool fails = false, unknown = false;
  json arr = json::array();
  for (const auto& r : reports) {
    fails |= r.fails > 0;
    unknown |= r.unknown > 0;
    if (g.json) {
      json j;
      j["law"] = r.name;
      j["relation"] = r.relation;
      j["checked"] = r.checked;
      j["fails"] = r.fails;
      j["unknown"] = r.unknown;
      j["vacuous"] = r.vacuous;
      j["counterexamples"] = r.counterexamples;
      arr.push_back(j);
    } else {
      std::cout << suite << "/" << r.name << " [" << r.relation << "] checked " << r.checked << ", fails " << r.fails
                << ", unknown " << r.unknown;
      if (r.vacuous) std::cout << ", vacuous " << r.vacuous;
      std::cout << (r.ok() ? "" : "  FAILED") << "\n";
      for (const auto& c : r.counterexamples) std::cout << "  counterexample: " << c << "\n";
    }
  }
  if (g.json) {
    json j;
    j["suite"] = suite;
    j["seed"] = g.seed;
    j["instances"] = o.instances;
    j["laws"] = arr;
    std::cout << j.dump(2) << "\n";
  }
  return fails ? kFails : unknown ? kUnknown : kHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Choice trees: build, explore and compare labelled transition systems"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--fuel", g.fuel, "Delayed nodes visited per closure")->capture_default_str();
  app.add_option("--max-states", g.max_states, "States expanded per exploration")->capture_default_str();
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--dot", g.dot, "Write the explored LTS as Graphviz to FILE");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for law suites")->capture_default_str()->check(CLI::Range(1u, 256u));

  std::function<int()> action;

  CcsOpts co;
  auto* ccs = app.add_subcommand("ccs", "CCS processes")->require_subcommand(1)->fallthrough();
  auto* ccs_parse_cmd = ccs->add_subcommand("parse", "Parse and print a process")->fallthrough();
  ccs_parse_cmd->add_option("process", co.p, "Process text or file")->required();
  ccs_parse_cmd->callback([&] { action = [&] { return ccs_parse(g, co); }; });
  auto* ccs_check_cmd = ccs->add_subcommand("check", "Compare two processes")->fallthrough();
  ccs_check_cmd->add_option("p", co.p, "Process text or file")->required();
  ccs_check_cmd->add_option("q", co.q, "Process text or file")->required();
  ccs_check_cmd->add_option("--mode", co.mode, "strong or weak")->check(CLI::IsMember({"strong", "weak"}))->capture_default_str();
  ccs_check_cmd->add_option("--semantics", co.semantics, "den, op or both")
      ->check(CLI::IsMember({"den", "op", "both"}))
      ->capture_default_str();
  ccs_check_cmd->callback([&] { action = [&] { return ccs_check(g, co); }; });
  auto* ccs_lts_cmd = ccs->add_subcommand("lts", "Explore the transition system of a process")->fallthrough();
  ccs_lts_cmd->add_option("process", co.p, "Process text or file")->required();
  ccs_lts_cmd->add_option("--semantics", co.semantics, "den or op")->check(CLI::IsMember({"den", "op"}))->capture_default_str();
  ccs_lts_cmd->add_option("--unit", co.unit, "collapse or verbatim handling of P | 0")
      ->check(CLI::IsMember({"collapse", "verbatim"}))
      ->capture_default_str();
  ccs_lts_cmd->callback([&] { action = [&] { return ccs_lts(g, co); }; });

  CoopOpts po;
  auto* coop = app.add_subcommand("coop", "Cooperative threads with fork and yield")->require_subcommand(1)->fallthrough();
  auto add_store_opts = [&](CLI::App* c) {
    c->add_option("--domain", po.domain, "Values are 0..domain-1")->check(CLI::Range(2, 64))->capture_default_str();
    c->add_option("--init", po.init, "Initial value, x=v (repeatable)");
  };
  auto* run_cmd = coop->add_subcommand("run", "Run one schedule")->fallthrough();
  run_cmd->add_option("program", po.p, "Program file or text")->required();
  run_cmd->add_option("--scheduler", po.scheduler, "random or rr")->check(CLI::IsMember({"random", "rr"}))->capture_default_str();
  run_cmd->add_option("--steps", po.steps, "Transition limit")->capture_default_str();
  add_store_opts(run_cmd);
  run_cmd->callback([&] { action = [&] { return coop_run(g, po); }; });
  auto* equiv_cmd = coop->add_subcommand("equiv", "Compare two programs")->fallthrough();
  equiv_cmd->add_option("p", po.p, "Program file or text")->required();
  equiv_cmd->add_option("q", po.q, "Program file or text")->required();
  equiv_cmd->add_option("--mode", po.mode, "strong or weak")->check(CLI::IsMember({"strong", "weak"}))->capture_default_str();
  equiv_cmd->add_option("--level", po.level, "den, sched or mem")->check(CLI::IsMember({"den", "sched", "mem"}))->capture_default_str();
  add_store_opts(equiv_cmd);
  equiv_cmd->callback([&] { action = [&] { return coop_equiv(g, po); }; });
  auto* coop_lts_cmd = coop->add_subcommand("lts", "Explore the transition system of a program")->fallthrough();
  coop_lts_cmd->add_option("program", po.p, "Program file or text")->required();
  coop_lts_cmd->add_option("--level", po.level, "den, sched or mem")->check(CLI::IsMember({"den", "sched", "mem"}))->capture_default_str();
  add_store_opts(coop_lts_cmd);
  coop_lts_cmd->callback([&] { action = [&] { return coop_lts(g, po); }; });

  ImpBrOpts io;
  auto* impbr = app.add_subcommand("impbr", "Branching imp")->require_subcommand(1)->fallthrough();
  auto* demo = impbr->add_subcommand("demo", "Transition system under one branch semantics")->fallthrough();
  demo->add_option("--mode", io.mode, "vis, brs or brd")->check(CLI::IsMember({"vis", "brs", "brd"}))->capture_default_str();
  demo->add_option("program", io.program, "Program file or text")->capture_default_str();
  demo->callback([&] { action = [&] { return impbr_demo(g, io); }; });

  LawOpts lo;
  auto* tree = app.add_subcommand("tree", "Choice tree utilities")->require_subcommand(1)->fallthrough();
  auto* laws = tree->add_subcommand("check-laws", "Run an equational law suite on random trees")->fallthrough();
  laws->add_option("--suite", lo.suite, "fig8 (alias elementary), monadic or iter")
      ->required()
      ->check(CLI::IsMember({"fig8", "elementary", "monadic", "iter"}));
  laws->add_option("--instances", lo.instances, "Random instances per law")->capture_default_str();
  laws->callback([&] { action = [&] { return check_laws(g, lo); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
  } catch (const coop::UndeclaredVariable& e) {
    std::cerr << e.what() << "\n";
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
  }
  return kUsage;
}
