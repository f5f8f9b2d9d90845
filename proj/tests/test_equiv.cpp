#include <doctest.h>

#include <random>
#include <set>
#include <tuple>

#include "ctree/core.hpp"
#include "ctree/equiv.hpp"

using namespace ctree;

namespace {

const DefTable& D() { return DefTable::standard(); }
Budget B() { return Budget{}; }

Value ev(const char* name, int answers) {
  std::vector<Value> as;
  for (int i = 0; i < answers; ++i) as.push_back(vint(i));
  return event(name, {}, as);
}

// Small random cyclic trees, drawn independently of the library's generators.
Value random_graph(std::mt19937_64& rng, int n) {
  auto pick = [&](int m) { return static_cast<int>(rng() % static_cast<std::uint64_t>(m)); };
  std::vector<Value> nodes;
  for (int i = 0; i < n; ++i) {
    auto succs = [&](int w) {
      std::vector<Value> s;
      for (int j = 0; j < w; ++j) s.push_back(vint(pick(n)));
      return Value::tuple(std::move(s));
    };
    switch (pick(6)) {
      case 0: nodes.push_back(vtup({vsym("ret"), vint(pick(2))})); break;
      case 1: nodes.push_back(vtup({vsym("vis"), ev("a", 1), succs(1)})); break;
      case 2: nodes.push_back(vtup({vsym("vis"), ev("b", 2), succs(2)})); break;
      case 3: nodes.push_back(vtup({vsym("br"), vsym("s"), succs(pick(3))})); break;
      default: nodes.push_back(vtup({vsym("br"), vsym("d"), succs(1 + pick(2))})); break;
    }
  }
  return Value::tuple(std::move(nodes));
}

using Rel = std::vector<std::vector<char>>;

// Greatest fixpoint by naive iteration; `sim` drops the symmetric half.
Rel naive_gfp(const FiniteLTS& l, bool sim) {
  std::size_t n = l.size();
  Rel r(n, std::vector<char>(n, 1));
  auto matched = [&](std::size_t p, std::size_t q) {
    for (const auto& t : l.out(p)) {
      bool ok = false;
      for (const auto& u : l.out(q)) {
        if (u.label == t.label && r[t.dst][u.dst]) ok = true;
      }
      if (!ok) return false;
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (r[p][q] && !(matched(p, q) && (sim || matched(q, p)))) {
          r[p][q] = 0;
          changed = true;
        }
      }
    }
  }
  return r;
}

// Weak moves by brute force: tau-reachability matrix, then compose.
FiniteLTS naive_saturate(const FiniteLTS& l) {
  std::size_t n = l.size();
  Rel tau(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) tau[i][i] = 1;
  for (const auto& t : l.transitions) {
    if (l.labels[t.label].is_tau()) tau[t.src][t.dst] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (tau[i][k] && tau[k][j]) tau[i][j] = 1;
  FiniteLTS out;
  for (const auto& s : l.states) out.intern_state(s);
  std::vector<std::uint32_t> lab;
  for (const auto& x : l.labels) lab.push_back(out.intern_label(x));
  std::uint32_t tau_id = out.intern_label(Label::tau());
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (tau[i][j]) edges.emplace(i, tau_id, j);
    }
  }
  for (const auto& t : l.transitions) {
    if (l.labels[t.label].is_tau()) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!tau[i][t.src]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (tau[t.dst][j]) edges.emplace(i, lab[t.label], j);
      }
    }
  }
  for (auto [s, lb, d] : edges) out.transitions.push_back({s, lb, d});
  out.roots = l.roots;
  out.expanded.assign(n, 1);
  out.divergent.assign(n, 0);
  out.finish();
  return out;
}

}  // namespace

TEST_CASE("stepping branches are observable under strong bisimulation") {
  Value r0 = ret(vint(0));
  auto v = check_sbisim(D(), brS_of({r0, r0}), r0, B());
  REQUIRE(v.is_fails());
  CHECK(v.witness().trace.front().is_tau());
  CHECK(check_sbisim(D(), brD_of({r0, r0}), r0, B()).is_holds());
  CHECK(check_sbisim(D(), brS_of({r0, r0}), step(r0), B()).is_holds());
  CHECK(check_wbisim(D(), brS_of({r0, r0}), r0, B()).is_holds());
}

TEST_CASE("divergence under weak bisimulation") {
  Value r0 = ret(vint(0));
  auto v = check_wbisim(D(), spin_s(), r0, B());
  REQUIRE(v.is_fails());
  CHECK(check_wbisim(D(), step(step(r0)), r0, B()).is_holds());
  CHECK(check_sbisim(D(), spin_d(), stuck_d(), B()).is_holds());
  CHECK(check_sbisim(D(), spin_s(), stuck_d(), B()).is_fails());
}

TEST_CASE("structural equality") {
  Value k1 = k_sel({ret(vint(4)), stuck_d()});
  Value k2 = k_case({{vint(0), ret(vint(4))}, {vint(1), stuck_d()}});
  Value e = ev("b", 2);
  CHECK(check_equ(D(), vis(e, k1), vis(e, k2), B()).is_holds());
  CHECK(check_equ(D(), bind(ret(vint(1)), k1), stuck_d(), B()).is_holds());
  CHECK(check_equ(D(), spin_d(), spin_d_nary(1), B()).is_holds());
  CHECK(check_equ(D(), guard(ret(vint(1))), ret(vint(1)), B()).is_fails());
  CHECK(check_equ(D(), vis(e, k1), vis(e, k_sel({ret(vint(4)), ret(vint(4))})), B()).is_fails());
}

TEST_CASE("game and partition agree with a naive fixpoint") {
  std::mt19937_64 rng(2024);
  int fails = 0, holds = 0;
  for (int round = 0; round < 150; ++round) {
    Value g = random_graph(rng, 2 + static_cast<int>(rng() % 5));
    int n = static_cast<int>(g.size());
    Value t = graph(g, static_cast<std::int64_t>(rng() % n));
    Value u = graph(g, static_cast<std::int64_t>(rng() % n));
    auto lts = extract_lts(D(), std::vector<Value>{t, u}, B());
    REQUIRE_FALSE(lts.partial);
    std::size_t l = lts.roots[0], r = lts.roots[1];

    auto strong = naive_gfp(lts, false);
    auto part = bisim_partition(lts);
    for (std::size_t p = 0; p < lts.size(); ++p)
      for (std::size_t q = 0; q < lts.size(); ++q) CHECK((part[p] == part[q]) == (strong[p][q] != 0));

    GameOptions opt;
    auto game = solve_game(lts, l, r, opt);
    CHECK(game.is_holds() == (strong[l][r] != 0));
    CHECK(check_sbisim(D(), t, u, B()).is_holds() == (strong[l][r] != 0));
    if (game.is_fails()) {
      ++fails;
      std::string why;
      CHECK_MESSAGE(replay(lts, game.witness(), opt, &why), why);
    } else {
      ++holds;
    }

    auto simr = naive_gfp(lts, true);
    opt.kind = GameKind::Simulation;
    auto sim = solve_game(lts, l, r, opt);
    CHECK(sim.is_holds() == (simr[l][r] != 0));
    if (sim.is_fails()) CHECK(replay(lts, sim.witness(), opt));

    auto weak = naive_gfp(naive_saturate(lts), false);
    CHECK(check_wbisim(D(), t, u, B()).is_holds() == (weak[l][r] != 0));
  }
  CHECK(fails > 10);
  CHECK(holds > 10);
}

TEST_CASE("tampered witnesses are rejected") {
  Value r0 = ret(vint(0)), r1 = ret(vint(1));
  auto lts = extract_lts(D(), std::vector<Value>{brS_of({r0, r1}), brS_of({r0, brD_of({r0, r1})})}, B());
  GameOptions opt;
  auto v = solve_game(lts, lts.roots[0], lts.roots[1], opt);
  REQUIRE(v.is_fails());
  CHECK(replay(lts, v.witness(), opt));
  Witness bad = v.witness();
  bad.strategy[0].replies.clear();
  CHECK_FALSE(replay(lts, bad, opt));
  bad = v.witness();
  bad.strategy[0].side = bad.strategy[0].side == Side::Left ? Side::Right : Side::Left;
  CHECK_FALSE(replay(lts, bad, opt));
}

TEST_CASE("traces") {
  Value t = brS_of({ret(vint(0)), ret(vint(1))});
  auto ts = traces_to_depth(D(), t, 3, B());
  std::set<std::vector<Label>> expected = {{Label::tau(), Label::val(vint(0))}, {Label::tau(), Label::val(vint(1))}};
  CHECK(ts.traces == expected);
  CHECK(check_trace_equiv(D(), step(ret(vint(0))), ret(vint(0)), 4, B()).is_fails());

  // Strong bisimilarity implies trace equivalence; weak bisimilarity implies strong bisimilarity does not.
  std::mt19937_64 rng(99);
  for (int round = 0; round < 60; ++round) {
    Value g = random_graph(rng, 4);
    Value a = graph(g, 0), b = graph(g, static_cast<std::int64_t>(rng() % 4));
    auto s = check_sbisim(D(), a, b, B());
    if (s.is_holds()) {
      CHECK(check_trace_equiv(D(), a, b, 5, B()).is_holds());
      CHECK(check_wbisim(D(), a, b, B()).is_holds());
    }
  }
}

TEST_CASE("frontier positions make verdicts unknown, never wrong") {
  DefTable d = D();
  d.define("test.count", 1, [](const DefTable&, std::span<const Value> a) {
    return step(call("test.count", {vint(a[0].as_int() + 1)}));
  });
  Value c = call("test.count", {vint(0)});
  CHECK(check_sbisim(d, c, spin_s(), Budget{40, 100}).is_unknown());
  // The difference shows up before the frontier.
  CHECK(check_sbisim(d, c, ret(vint(0)), Budget{40, 100}).is_fails());
}
