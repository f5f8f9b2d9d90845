// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//   acceptance CTREES_BINARY REPO_ROOT

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "ctree/ccs.hpp"
#include "ctree/coop.hpp"
#include "ctree/core.hpp"
#include "ctree/equiv.hpp"
#include "ctree/interp.hpp"
#include "ctree/laws.hpp"

using namespace ctree;
namespace fs = std::filesystem;

namespace {

const DefTable& D() { return DefTable::standard(); }
Budget B() { return Budget{}; }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

unsigned jobs() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

void suite_summary(Outcome& o, const std::string& suite, std::size_t n) {
  std::size_t checked = 0, fails = 0, unknown = 0;
  for (const auto& r : check_suite(suite, 1, n, B(), jobs())) {
    checked += r.checked;
    fails += r.fails;
    unknown += r.unknown;
    o.require(r.checked >= n, suite + "/" + r.name + " checked too few");
    o.require(r.fails == 0, suite + "/" + r.name + (r.counterexamples.empty() ? "" : " " + r.counterexamples[0]));
    o.require(r.unknown * 100 < r.checked, suite + "/" + r.name + " unknown rate");
  }
  o.detail << suite << ": " << checked << " instances, " << fails << " fails, " << unknown << " unknown; ";
}

Outcome elementary_laws() {
  Outcome o;
  suite_summary(o, "elementary", 200);
  return o;
}

Outcome monadic_and_iter_laws() {
  Outcome o;
  suite_summary(o, "monadic", 200);
  suite_summary(o, "iter", 200);
  return o;
}

Outcome br_s_elimination() {
  Outcome o;
  TreeGen g(31);
  int holds = 0;
  for (int i = 0; i < 200; ++i) {
    Value t = g.tree();
    bool ok = check_sbisim(D(), br_s_elim(t), t, B()).is_holds();
    o.require(ok, t.str());
    holds += ok;
  }
  o.detail << holds << "/200 hold";
  return o;
}

Outcome bind_decomposition() {
  Outcome o;
  TreeGen g(77);
  std::vector<Value> ks = {k_ret(), k_const(stuck_d()), k_sel({g.tree(), g.tree(), g.tree()}),
                           k_sel({step(ret(vint(5))), spin_d(), trigger(g.event())}),
                           k_sel({g.tree(), brS_of({ret(vint(1)), g.tree()}), guard(g.tree())})};
  int holds = 0, pairs = 0;
  for (int i = 0; i < 100; ++i) {
    Value t = g.tree();
    for (const auto& k : ks) {
      bool ok = check_bind_transitions(D(), t, k, B()).is_holds();
      o.require(ok, t.str() + " >>= " + k.str());
      holds += ok;
      ++pairs;
    }
  }
  o.detail << holds << "/" << pairs << " pairs decompose";
  return o;
}

Value flip() { return event("flip", {}, {vint(0), vint(1)}); }
Value flip_to(int a, int b) { return vis_of(flip(), {ret(vint(a)), ret(vint(b))}); }

Outcome stepping_handler_counterexample() {
  Outcome o;
  Value l = brD_of({flip_to(0, 1), flip_to(2, 3)});
  Value r = brD_of({flip_to(2, 1), flip_to(0, 3)});
  Verdict before = check_sbisim(D(), l, r, B());
  Verdict after = check_sbisim(D(), interp(Handler::step_trigger(), l), interp(Handler::step_trigger(), r), B());
  o.require(before.is_holds(), "pair not bisimilar before interpretation");
  o.require(after.is_fails(), "pair still bisimilar after interpretation");
  o.detail << "before " << before.name() << ", after " << after.name();
  return o;
}

Value ev_a() { return event("a", {}, {vint(0)}); }
Value ev_b() { return event("b", {}, {vint(0), vint(1)}); }
Value ev_c() { return event("c", {}, {vint(0), vint(1), vint(2)}); }

Outcome simple_handlers_preserve_bisimilarity() {
  Outcome o;
  Value x = event("x", {}, {vint(0)}), y = event("y", {}, {vint(0), vint(1)}), z = event("z", {}, {vint(0), vint(1), vint(2)});
  Handler mixed{cont("h.table", {vtup({vtup({ev_a(), ret(vint(0))}), vtup({ev_b(), trigger(y)}),
                                        vtup({ev_c(), ret(vint(2))})})}),
                Handler::Kind::Pure};
  std::vector<Handler> hs = {Handler::identity(),
                             Handler::pure({{ev_a(), vint(0)}, {ev_b(), vint(1)}, {ev_c(), vint(2)}}),
                             Handler::rename({{ev_a(), x}, {ev_b(), y}, {ev_c(), z}}), mixed};
  TreeGen g(2);
  int holds = 0;
  for (int i = 0; i < 100; ++i) {
    Value t = g.tree();
    Value u = g.rewrite(t, 3);
    o.require(check_sbisim(D(), t, u, B()).is_holds(), "rewrite not sound: " + t.str());
    const Handler& h = hs[g.below(hs.size())];
    o.require(h.simple(), "handler not simple");
    bool ok = check_sbisim(D(), interp(h, t), interp(h, u), B()).is_holds();
    o.require(ok, t.str());
    holds += ok;
  }
  Value l = brD_of({flip_to(0, 1), flip_to(2, 3)}), r = brD_of({flip_to(2, 1), flip_to(0, 3)});
  bool broken = !Handler::step_trigger().simple() &&
                check_sbisim(D(), interp(Handler::step_trigger(), l), interp(Handler::step_trigger(), r), B()).is_fails();
  o.require(broken, "stepping handler did not break bisimilarity");
  o.detail << holds << "/100 pairs preserved; stepping handler breaks " << (broken ? "yes" : "no");
  return o;
}

Outcome refinement() {
  Outcome o;
  TreeGen g(3);
  std::vector<Value> picks = {pick::first(), pick::last(), pick::fixed(1)};
  int cst = 0, st = 0;
  for (int i = 0; i < 200; ++i) {
    Value x = g.tree();
    bool ok = check_ssim(D(), refine_cst(picks[i % 3], x), x, B()).is_holds();
    o.require(ok, "constant: " + x.str());
    cst += ok;
  }
  TreeGen h(4);
  for (int i = 0; i < 200; ++i) {
    Value x = h.tree();
    bool ok = check_ssim(D(), refine_state(spick::round_robin(), x, vint(0)), x, B(), LabelRel::val_projection())
                  .is_holds();
    o.require(ok, "stateful: " + x.str());
    st += ok;
  }
  o.detail << "constant " << cst << "/200, stateful " << st << "/200";
  return o;
}

Outcome embedding_respects_eutt() {
  Outcome o;
  TreeGen g(6);
  int eutt = 0, non = 0;
  for (int i = 0; i < 99; ++i) {
    Value it = g.itree();
    Value iu = g.pad_laters(it, 1 + static_cast<int>(g.below(3)));
    o.require(check_eutt(D(), it, iu, B()).is_holds(), "padding changed eutt class: " + it.str());
    bool ok = check_sbisim(D(), embed(it), embed(iu), B()).is_holds();
    o.require(ok, it.str());
    eutt += ok;
    if (auto bad = g.mutate_return(it); bad && non < 20) {
      o.require(check_eutt(D(), it, *bad, B()).is_fails(), "mutation kept eutt: " + it.str());
      bool sep = check_sbisim(D(), embed(it), embed(*bad), B()).is_fails();
      o.require(sep, "mutation not separated: " + it.str());
      non += sep;
    }
  }
  Value omega1 = igraph(vtup({vtup({vsym("later"), vint(0)})}), 0);
  Value omega2 = igraph(vtup({vtup({vsym("later"), vint(1)}), vtup({vsym("later"), vint(0)})}), 0);
  o.require(check_eutt(D(), omega1, omega2, B()).is_holds(), "silent divergence pair not eutt");
  bool div = check_sbisim(D(), embed(omega1), embed(omega2), B()).is_holds();
  o.require(div, "silent divergence pair not bisimilar");
  eutt += div;
  o.require(non == 20, "fewer than 20 non-eutt pairs");
  o.detail << eutt << "/100 eutt pairs hold, " << non << "/20 non-eutt pairs fail";
  return o;
}

Outcome ccs_agreement() {
  using namespace ctree::ccs;
  Outcome o;
  Budget sweep{100, 2000};
  ProcGen g(5);
  int unknown = 0, agree = 0;
  for (int i = 0; i < 200; ++i) {
    Value p = g.process(6);
    Value q = (i % 2) ? g.variant(p) : g.process(6);
    Verdict op = check_op_bisim(p, q, sweep);
    Verdict den = check_den_bisim(p, q, sweep);
    if (op.is_unknown() || den.is_unknown()) {
      ++unknown;
      continue;
    }
    bool ok = op.is_holds() == den.is_holds();
    o.require(ok, print(p) + " vs " + print(q));
    agree += ok;
  }
  o.require(unknown * 100 < 5 * 200, "unknown rate");
  o.detail << agree << " agree, " << unknown << " unknown of 200; ";

  ProcGen e(2024);
  std::vector<std::pair<std::string, std::function<std::pair<Value, Value>(const Value&, const Value&, const Value&)>>>
      eqs{
          {"plus_comm", [](auto& p, auto& q, auto&) { return std::pair{plus(p, q), plus(q, p)}; }},
          {"plus_assoc", [](auto& p, auto& q, auto& r) { return std::pair{plus(plus(p, q), r), plus(p, plus(q, r))}; }},
          {"plus_unit", [](auto& p, auto&, auto&) { return std::pair{plus(p, nil()), p}; }},
          {"plus_idem", [](auto& p, auto&, auto&) { return std::pair{plus(p, p), p}; }},
          {"par_unit", [](auto& p, auto&, auto&) { return std::pair{par(p, nil()), p}; }},
          {"par_comm", [](auto& p, auto& q, auto&) { return std::pair{par(p, q), par(q, p)}; }},
          {"par_assoc", [](auto& p, auto& q, auto& r) { return std::pair{par(par(p, q), r), par(p, par(q, r))}; }},
          {"bang_unfold", [](auto& p, auto&, auto&) { return std::pair{bang(p), par(bang(p), p)}; }},
      };
  // Instances too large for the budget are drawn again.
  int redrawn = 0;
  for (const auto& [label, eq] : eqs) {
    int holds = 0, skipped = 0;
    while (holds < 20 && skipped < 200) {
      auto [lhs, rhs] = eq(e.process(3), e.process(3), e.process(3));
      Verdict v = check_den_bisim(lhs, rhs, sweep);
      o.require(!v.is_fails(), label + ": " + print(lhs) + " vs " + print(rhs));
      if (v.is_holds()) {
        ++holds;
      } else {
        ++skipped;
      }
    }
    o.require(holds == 20, label + " short of 20 instances");
    redrawn += skipped;
  }
  o.detail << eqs.size() << " equations x 20 instances, " << redrawn << " redrawn";
  return o;
}

Value node(std::string_view kind, Value a, std::vector<std::int64_t> succ) {
  std::vector<Value> s;
  for (auto i : succ) s.push_back(vint(i));
  return vtup({vsym(std::string(kind)), std::move(a), Value::tuple(s)});
}

Outcome impbr_modes() {
  using namespace ctree::coop;
  Outcome o;
  Value p = parse_impbr("br { while true do print end } { block }");
  Value pr = print_event();
  Value a = graph(vtup({node("vis", flip_event(), {2, 1}), node("vis", pr, {1}), node("br", vsym("d"), {})}), 0);
  Value b = graph(vtup({node("br", vsym("s"), {1, 2}), node("vis", pr, {1}), node("br", vsym("d"), {})}), 0);
  Value c = graph(vtup({node("vis", pr, {1}), node("vis", pr, {1})}), 0);
  std::array<Value, 3> den = {denote_impbr(p, BrMode::VisFlip), denote_impbr(p, BrMode::BrS),
                              denote_impbr(p, BrMode::BrD)};
  std::array<Value, 3> hand = {a, b, c};
  const char* names[] = {"vis", "brs", "brd"};
  for (int i = 0; i < 3; ++i) {
    o.require(check_sbisim(D(), den[i], hand[i], B()).is_holds(), std::string(names[i]) + " differs from its graph");
    for (int j = i + 1; j < 3; ++j) {
      o.require(check_sbisim(D(), den[i], den[j], B()).is_fails(),
                std::string(names[i]) + " and " + names[j] + " not distinguished");
    }
  }
  o.detail << "3 modes match their graphs, 3 pairs distinguished";
  return o;
}

Outcome cooperative_threads() {
  using namespace ctree::coop;
  Outcome o;
  const std::vector<std::string> straight{
      "x := 1", "x := 1; y := x", "yield; x := 2", "x := x + 1; yield; y := x", "y := 2; x := y; yield; x := 0",
  };
  int weak = 0;
  for (std::size_t i = 0; i < straight.size(); ++i) {
    const std::string& c = straight[i];
    const std::string& c2 = straight[(i + 1) % straight.size()];
    auto check = [&](const std::string& l, const std::string& r) {
      bool ok = check_wbisim(D(), run_scheduled(parse_imp(l)), run_scheduled(parse_imp(r)), B()).is_holds();
      o.require(ok, l + " vs " + r);
      weak += ok;
    };
    check("fork { " + c + " } { skip }", c);
    check("yield; " + c, c);
    check("fork { " + c + " } { fork { " + c2 + " } { skip } }", "fork { " + c2 + " } { fork { " + c + " } { skip } }");
    check("fork { " + c + " } { fork { while true do yield end } { skip } }",
          "fork { yield; while true do yield end } { fork { " + c + " } { skip } }");
  }
  int mem = 0;
  for (std::int64_t x0 = 0; x0 < 3; ++x0) {
    Value st = make_store({"x"}, {{"x", x0}});
    bool ok = check_wbisim(D(), run_program(parse_imp("fork { x := 2 } { x := 1 }"), st),
                           run_program(parse_imp("x := 2"), st), B())
                  .is_holds();
    o.require(ok, "memory example from x = " + std::to_string(x0));
    mem += ok;
  }

  std::vector<std::pair<std::string, std::string>> pairs{
      {"while true do yield end", "yield; while true do yield end"},
      {"y := x", "skip; y := x"},
      {"x := x + 1; x := x + 1", "x := x + 1; skip; x := x + 1"},
      {"fork { x := 2 } { skip }", "fork { x := 2 } { skip; skip }"},
      {"yield", "yield; skip"},
      {"while x < 2 do x := x + 1; yield end", "while x < 2 do x := x + 1; yield end; skip"},
  };
  std::vector<std::pair<Value, Value>> threads;
  for (auto& [l, r] : pairs) {
    Value t = denote(parse_imp(l)), u = denote(parse_imp(r));
    o.require(check_sbisim(D(), t, u, B()).is_holds(), "thread pair " + l);
    threads.emplace_back(t, u);
  }
  threads.emplace_back(denote(parse_imp("x := 1; yield; x := 2")), guard(denote(parse_imp("x := 1; yield; x := 2"))));
  std::vector<std::array<std::size_t, 3>> corpus{{0, 1, 2}, {1, 3, 4}, {2, 5, 6}, {0, 4, 6}, {3, 5, 1}, {6, 2, 0}};
  int perm = 0, total = 0;
  for (const auto& tuple : corpus) {
    for (std::size_t n : {2u, 3u}) {
      std::vector<std::size_t> rho(n);
      for (std::size_t i = 0; i < n; ++i) rho[i] = i;
      do {
        std::vector<Value> v(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = threads[tuple[i]].first;
          w[rho[i]] = threads[tuple[i]].second;
        }
        for (std::int64_t i = -1; i < static_cast<std::int64_t>(n); ++i) {
          std::int64_t j = i < 0 ? -1 : static_cast<std::int64_t>(rho[static_cast<std::size_t>(i)]);
          bool ok = check_sbisim(D(), schedule(v, i), schedule(w, j), B()).is_holds();
          o.require(ok, "permuted pool");
          perm += ok;
          ++total;
        }
      } while (std::next_permutation(rho.begin(), rho.end()));
    }
  }
  o.detail << weak << "/20 scheduling equivalences, memory example " << mem << "/3 stores, permutations " << perm
           << "/" << total;
  return o;
}

Outcome impbr_equation() {
  using namespace ctree::coop;
  Outcome o;
  Value p3 = parse_impbr("x := y"), brp = parse_impbr("br { x := 0; x := y } { x := y }");
  int holds = 0;
  for (std::int64_t x0 = 0; x0 < 3; ++x0) {
    for (std::int64_t y0 = 0; y0 < 3; ++y0) {
      Value st = make_store({"x", "y"}, {{"x", x0}, {"y", y0}});
      for (BrMode m : {BrMode::BrD, BrMode::BrS}) {
        bool ok = check_wbisim(D(), run_impbr(p3, m, st), run_impbr(brp, m, st), B()).is_holds();
        o.require(ok, "store " + st.str());
        holds += ok;
      }
    }
  }
  o.detail << holds << "/18 (store, branch mode) pairs";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string run_shell(const std::string& cmd) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return "popen failed";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  int status = pclose(f);
  return out + "\nstatus " + std::to_string(status);
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Outcome cli_determinism(const std::string& bin, const std::string& root) {
  Outcome o;
  std::ifstream list(fs::path(root) / "samples" / "invocations.txt");
  o.require(static_cast<bool>(list), "missing invocation list");
  std::vector<std::string> lines;
  for (std::string l; std::getline(list, l);) {
    if (!l.empty() && l[0] != '#') lines.push_back(l);
  }
  fs::path scratch = fs::temp_directory_path() / ("ctree_acceptance_" + std::to_string(::getpid()));
  std::array<std::vector<std::string>, 2> outs;
  std::array<std::map<std::string, std::string>, 2> files;
  for (int run = 0; run < 2; ++run) {
    fs::path dir = scratch / std::to_string(run);
    fs::create_directories(dir);
    for (const auto& l : lines) {
      outs[run].push_back(run_shell("cd " + quote(root) + " && export OUT=" + quote(dir.string()) + " && " + quote(bin) + " " +
                                    l + " 2>&1"));
    }
    for (const auto& e : fs::directory_iterator(dir)) files[run][e.path().filename().string()] = slurp(e.path());
  }
  fs::remove_all(scratch);
  std::size_t same = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    bool ok = outs[0][i] == outs[1][i];
    o.require(ok, lines[i]);
    same += ok;
  }
  o.require(files[0] == files[1], "written files differ");
  o.require(!files[0].empty(), "no files written");
  o.detail << same << "/" << lines.size() << " invocations identical, " << files[0].size() << " written files compared";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance CTREES_BINARY REPO_ROOT\n";
    return 64;
  }
  std::string bin = fs::absolute(argv[1]).string(), root = fs::absolute(argv[2]).string();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"elementary laws", elementary_laws},
      {"monadic and iteration laws", monadic_and_iter_laws},
      {"stepping branch elimination", br_s_elimination},
      {"transitions under bind", bind_decomposition},
      {"stepping handler counterexample", stepping_handler_counterexample},
      {"simple handlers preserve bisimilarity", simple_handlers_preserve_bisimilarity},
      {"refinement is a simulation", refinement},
      {"embedding respects eutt", embedding_respects_eutt},
      {"ccs operational and denotational agreement", ccs_agreement},
      {"impbr branch modes", impbr_modes},
      {"cooperative threads", cooperative_threads},
      {"impbr equation after memory", impbr_equation},
      {"cli determinism", [&] { return cli_determinism(bin, root); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
