#include "ctree/ccs.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <span>
#include <set>

#include "ctree/core.hpp"
#include "ctree/interp.hpp"

namespace ctree::ccs {

Value nil() { return vtup({vsym("nil")}); }
Value prefix(Value action, Value p) { return vtup({vsym("pre"), std::move(action), std::move(p)}); }
Value plus(Value p, Value q) { return vtup({vsym("plus"), std::move(p), std::move(q)}); }
Value par(Value p, Value q) { return vtup({vsym("par"), std::move(p), std::move(q)}); }
Value restrict(std::string_view channel, Value p) { return vtup({vsym("new"), vsym(channel), std::move(p)}); }
Value bang(Value p) { return vtup({vsym("bang"), std::move(p)}); }

Value tau_action() { return vsym("tau"); }
Value name(std::string_view channel) { return vsym(channel); }
Value coname(std::string_view channel) { return vtup({vsym("co"), vsym(channel)}); }
bool is_tau(const Value& action) { return action == tau_action(); }

Value complement(const Value& action) {
  if (is_tau(action)) return action;
  if (action.is_sym()) return vtup({vsym("co"), action});
  return action[1];
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Value run() {
    Value p = sum();
    skip();
    if (i_ < s_.size()) fail("end of input");
    return p;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string& expected) { throw SyntaxError(line_, col_, expected); }

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
  }
  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("'") + c + "'");
    advance();
  }
  bool ident_start() {
    skip();
    return i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]));
  }
  std::string ident() {
    if (!ident_start()) fail("a channel name");
    std::string out;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      out += s_[i_];
      advance();
    }
    return out;
  }
  // Keyword test without consuming.
  bool at_word(std::string_view w) {
    skip();
    if (s_.substr(i_, w.size()) != w) return false;
    std::size_t j = i_ + w.size();
    return j >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_');
  }

  Value sum() {
    Value p = parallel();
    while (peek('+')) {
      advance();
      p = plus(p, parallel());
    }
    return p;
  }
  Value parallel() {
    Value p = atom();
    while (peek('|')) {
      advance();
      p = par(p, atom());
    }
    return p;
  }
  Value atom() {
    skip();
    if (i_ >= s_.size()) fail("a process");
    char c = s_[i_];
    if (c == '0') {
      advance();
      return nil();
    }
    if (c == '!') {
      advance();
      return bang(atom());
    }
    if (c == '(') {
      advance();
      Value p = sum();
      expect(')');
      return p;
    }
    if (at_word("new")) {
      ident();
      std::string ch = ident();
      if (ch == "new" || ch == "in" || ch == "tau") fail("a channel name");
      if (!at_word("in")) fail("'in'");
      ident();
      return restrict(ch, sum());
    }
    Value act = action();
    expect('.');
    return prefix(act, atom());
  }
  Value action() {
    bool co = false;
    while (peek('\'')) {
      advance();
      co = !co;
    }
    if (!ident_start()) fail("an action");
    std::string n = ident();
    if (n == "new" || n == "in") fail("an action");
    if (n == "tau") {
      if (co) fail("a channel name");
      return tau_action();
    }
    return co ? coname(n) : name(n);
  }
};

std::string print_action(const Value& a) {
  if (a.is_sym()) return a.as_sym();
  return "'" + a[1].as_sym();
}

// level: 0 inside a sum, 1 inside a parallel, 2 atomic position.
std::string print_at(const Value& p, int level, bool rightmost) {
  const std::string& tag = p[0].as_sym();
  auto wrap = [&](std::string s, bool need) { return need ? "(" + s + ")" : s; };
  if (tag == "nil") return "0";
  if (tag == "pre") return print_action(p[1]) + "." + print_at(p[2], 2, rightmost);
  if (tag == "bang") return "!" + print_at(p[1], 2, rightmost);
  if (tag == "plus") {
    return wrap(print_at(p[1], 0, false) + " + " + print_at(p[2], 1, rightmost || level > 0), level > 0);
  }
  if (tag == "par") {
    return wrap(print_at(p[1], 1, false) + " | " + print_at(p[2], 2, rightmost || level > 1), level > 1);
  }
  if (tag == "new") {
    bool need = !(level == 0 && rightmost);
    return wrap("new " + p[1].as_sym() + " in " + print_at(p[2], 0, true), need);
  }
  throw std::invalid_argument("not a process: " + p.str());
}

void collect(const Value& p, std::set<std::string>& out) {
  const std::string& tag = p[0].as_sym();
  if (tag == "pre") {
    if (!is_tau(p[1])) out.insert(p[1].is_sym() ? p[1].as_sym() : p[1][1].as_sym());
    collect(p[2], out);
  } else if (tag == "plus" || tag == "par") {
    collect(p[1], out);
    collect(p[2], out);
  } else if (tag == "new") {
    out.insert(p[1].as_sym());
    collect(p[2], out);
  } else if (tag == "bang") {
    collect(p[1], out);
  }
}

}  // namespace

Value parse(std::string_view text) { return Parser(text).run(); }
std::string print(const Value& p) { return print_at(p, 0, true); }

std::vector<std::string> channels(const Value& p) {
  std::set<std::string> s;
  collect(p, s);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Operational semantics

namespace {

bool is_nil(const Value& p) { return p.size() == 1 && p[0].as_sym() == "nil"; }

Value mk_par(Mode mode, Value p, Value q) {
  if (mode == Mode::Collapse) {
    if (is_nil(p)) return q;
    if (is_nil(q)) return p;
  }
  return par(std::move(p), std::move(q));
}

using Steps = std::vector<std::pair<Value, Value>>;

void syncs(Mode mode, const Steps& l, const Steps& r, Steps& out,
           const std::function<Value(const Value&, const Value&)>& target) {
  for (const auto& [a, p1] : l) {
    if (is_tau(a)) continue;
    for (const auto& [b, q1] : r) {
      if (b == complement(a)) out.emplace_back(tau_action(), target(p1, q1));
    }
  }
  (void)mode;
}

Steps steps(const Value& p, Mode mode) {
  const std::string& tag = p[0].as_sym();
  Steps out;
  if (tag == "pre") {
    out.emplace_back(p[1], p[2]);
  } else if (tag == "plus") {
    out = steps(p[1], mode);
    auto r = steps(p[2], mode);
    out.insert(out.end(), r.begin(), r.end());
  } else if (tag == "par") {
    auto l = steps(p[1], mode), r = steps(p[2], mode);
    for (const auto& [a, p1] : l) out.emplace_back(a, mk_par(mode, p1, p[2]));
    for (const auto& [a, q1] : r) out.emplace_back(a, mk_par(mode, p[1], q1));
    syncs(mode, l, r, out, [&](const Value& x, const Value& y) { return mk_par(mode, x, y); });
  } else if (tag == "new") {
    Value c = p[1];
    for (const auto& [a, p1] : steps(p[2], mode)) {
      if (a == c || a == complement(c)) continue;
      out.emplace_back(a, mode == Mode::Collapse && is_nil(p1) ? p1 : restrict(c.as_sym(), p1));
    }
  } else if (tag == "bang") {
    auto one = steps(p[1], mode);
    for (const auto& [a, p1] : one) out.emplace_back(a, mk_par(mode, p1, p));
    syncs(mode, one, one, out, [&](const Value& x, const Value& y) { return mk_par(mode, x, mk_par(mode, y, p)); });
  } else if (tag != "nil") {
    throw std::invalid_argument("not a process: " + p.str());
  }
  return out;
}

}  // namespace

std::vector<std::pair<Value, Value>> op_transitions(const Value& p, Mode mode) {
  auto out = steps(p, mode);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Value act_event(const Value& action) { return event("act", {action}, {unit()}); }

Label to_label(const Value& action) {
  if (is_tau(action)) return Label::tau();
  return Label::obs(act_event(action), unit());
}

// ---------------------------------------------------------------------------
// Denotation

namespace {

Value mode_value(Mode m) { return vint(m == Mode::Collapse ? 1 : 0); }

bool is_empty_tree(const Value& t) {
  return node_kind(t) == NodeKind::Br && br_kind(t) == BranchKind::Delayed && br_width(t) == 0;
}

bool synchronizes(const Value& a, const Value& b) {
  if (!a.has_head("avis") || !b.has_head("avis")) return false;
  const Value& e = a[1];
  const Value& f = b[1];
  if (event_name(e) != "act" || event_name(f) != "act") return false;
  const Value& l = event_args(e)[0];
  return !is_tau(l) && event_args(f)[0] == complement(l);
}

using Args = std::span<const Value>;

// A head action re-emitted with each continuation routed through `k`.
Value reemit(const Value& a, const std::function<Value(const Value&)>& k) {
  if (a.has_head("abr")) return brS(a[1].as_int(), k(a[2]));
  if (a.has_head("avis")) return vis(a[1], k(a[2]));
  return stuck_d();  // processes never return
}

}  // namespace

Value denote(const Value& p, Mode mode) { return call("ccs.den", {mode_value(mode), p}); }

void register_ccs_defs(DefTable& defs) {
  defs.define("ccs.den", 2, [](const DefTable&, Args a) {
    const Value& mode = a[0];
    const Value& p = a[1];
    const std::string& tag = p[0].as_sym();
    auto den = [&](const Value& x) { return call("ccs.den", {mode, x}); };
    if (tag == "nil") return stuck_d();
    if (tag == "pre") {
      if (is_tau(p[1])) return step(den(p[2]));
      return seq(trigger(act_event(p[1])), den(p[2]));
    }
    if (tag == "plus") return brD_of({den(p[1]), den(p[2])});
    if (tag == "par") return call("ccs.par", {mode, den(p[1]), den(p[2])});
    if (tag == "new") return interp(Handler{cont("ccs.hnew", {p[1]}), Handler::Kind::General}, den(p[2]));
    if (tag == "bang") return call("ccs.pb", {mode, den(p[1]), den(p[1])});
    throw std::invalid_argument("not a process: " + p.str());
  });
  defs.define("ccs.hnew", 2, [](const DefTable&, Args a) {
    const Value& l = event_args(a[1])[0];
    if (l == a[0] || l == complement(a[0])) return stuck_d();
    return trigger(a[1]);
  });

  const Value par_f = vsym("ccs.par"), pb_f = vsym("ccs.pb");
  defs.define("ccs.par", 3, [par_f](const DefTable& d, Args a) {
    const Value& mode = a[0];
    Value p = d.unfold(a[1]), q = d.unfold(a[2]);
    if (mode.as_int() == 1) {
      if (is_empty_tree(p)) return q;
      if (is_empty_tree(q)) return p;
    }
    return brD_of({bind(head(p), cont("ccs.actL", {par_f, mode, q})), bind(head(q), cont("ccs.actR", {mode, p})),
                   bind(head(p), cont("ccs.lr1", {mode, q}))});
  });
  // (F mode q a): left component acts, F continues.
  defs.define("ccs.actL", 4, [](const DefTable&, Args a) {
    return reemit(a[3], [&](const Value& k) { return cont("ccs.kl", {a[0], a[1], k, a[2]}); });
  });
  defs.define("ccs.kl", 5, [](const DefTable&, Args a) {
    return call(a[0].as_sym(), {a[1], apply(a[2], a[4]), a[3]});
  });
  defs.define("ccs.actR", 3, [](const DefTable&, Args a) {
    return reemit(a[2], [&](const Value& k) { return cont("ccs.kr", {a[0], a[1], k}); });
  });
  defs.define("ccs.kr", 4, [](const DefTable&, Args a) { return call("ccs.par", {a[0], a[1], apply(a[2], a[3])}); });
  defs.define("ccs.lr1", 3, [](const DefTable&, Args a) {
    return bind(head(a[1]), cont("ccs.lr2", {a[0], a[2]}));
  });
  defs.define("ccs.lr2", 3, [](const DefTable&, Args a) {
    if (!synchronizes(a[1], a[2])) return stuck_d();
    return step(call("ccs.par", {a[0], apply(a[1][2], unit()), apply(a[2][2], unit())}));
  });

  // Replication: pb p q behaves as p | !q.
  defs.define("ccs.pb", 3, [pb_f](const DefTable& d, Args a) {
    const Value& mode = a[0];
    Value p = d.unfold(a[1]), q = d.unfold(a[2]);
    return brD_of({bind(head(p), cont("ccs.actL", {pb_f, mode, q})), bind(head(q), cont("ccs.pbR", {mode, p, q})),
                   bind(head(p), cont("ccs.pblr1", {mode, q})), bind(head(q), cont("ccs.pbrr1", {mode, p, q}))});
  });
  defs.define("ccs.pbR", 4, [](const DefTable&, Args a) {
    return reemit(a[3], [&](const Value& k) { return cont("ccs.pbk", {a[0], a[1], k, a[2]}); });
  });
  defs.define("ccs.pbk", 5, [](const DefTable&, Args a) {
    return call("ccs.pb", {a[0], call("ccs.par", {a[0], a[1], apply(a[2], a[4])}), a[3]});
  });
  defs.define("ccs.pblr1", 3, [](const DefTable&, Args a) {
    return bind(head(a[1]), cont("ccs.pblr2", {a[0], a[1], a[2]}));
  });
  defs.define("ccs.pblr2", 4, [](const DefTable&, Args a) {
    if (!synchronizes(a[2], a[3])) return stuck_d();
    Value both = call("ccs.par", {a[0], apply(a[2][2], unit()), apply(a[3][2], unit())});
    return step(call("ccs.pb", {a[0], both, a[1]}));
  });
  defs.define("ccs.pbrr1", 4, [](const DefTable&, Args a) {
    return bind(head(a[2]), cont("ccs.pbrr2", {a[0], a[1], a[2], a[3]}));
  });
  defs.define("ccs.pbrr2", 5, [](const DefTable&, Args a) {
    if (!synchronizes(a[3], a[4])) return stuck_d();
    Value both = call("ccs.par", {a[0], apply(a[3][2], unit()), apply(a[4][2], unit())});
    return step(call("ccs.pb", {a[0], call("ccs.par", {a[0], a[1], both}), a[2]}));
  });
}

// ---------------------------------------------------------------------------
// LTSs and checks

FiniteLTS op_lts(const std::vector<Value>& roots, const Budget& b, Mode mode) {
  auto succ = [mode](const Value& p) {
    Moves m;
    for (auto& [a, q] : op_transitions(p, mode)) m.moves.push_back(Move{to_label(a), q});
    std::sort(m.moves.begin(), m.moves.end(), [](const Move& x, const Move& y) {
      if (auto c = x.label <=> y.label; c != 0) return c < 0;
      return x.target < y.target;
    });
    return m;
  };
  return explore(roots, succ, b.max_states);
}

FiniteLTS den_lts(const std::vector<Value>& roots, const Budget& b, Mode mode) {
  std::vector<Value> ts;
  for (const auto& r : roots) ts.push_back(denote(r, mode));
  return extract_lts(DefTable::standard(), ts, b);
}

Verdict check_op_bisim(const Value& p, const Value& q, const Budget& b) {
  FiniteLTS l = op_lts({p, q}, b);
  return bisim_states(l, l.roots[0], l.roots[1]);
}

Verdict check_den_bisim(const Value& p, const Value& q, const Budget& b) {
  return check_sbisim(DefTable::standard(), denote(p), denote(q), b);
}

Verdict check_op_wbisim(const Value& p, const Value& q, const Budget& b) {
  FiniteLTS l = saturate(op_lts({p, q}, b));
  return bisim_states(l, l.roots[0], l.roots[1]);
}

Verdict check_den_wbisim(const Value& p, const Value& q, const Budget& b) {
  return check_wbisim(DefTable::standard(), denote(p), denote(q), b);
}

// ---------------------------------------------------------------------------
// Random processes

std::size_t size(const Value& p) {
  const std::string& tag = p[0].as_sym();
  if (tag == "nil") return 1;
  if (tag == "pre" || tag == "new") return 1 + size(p[2]);
  if (tag == "bang") return 1 + size(p[1]);
  return 1 + size(p[1]) + size(p[2]);
}

ProcGen::ProcGen(std::uint64_t seed, int alphabet) : rng_(seed), alphabet_(std::clamp(alphabet, 1, 3)) {}

Value ProcGen::action() {
  std::size_t r = below(2 * alphabet_ + 1);
  if (r == 0) return tau_action();
  std::string c(1, static_cast<char>('a' + (r - 1) / 2));
  return r % 2 ? name(c) : coname(c);
}

Value ProcGen::process(std::size_t max_size) { return process_of_size(1 + below(std::max<std::size_t>(max_size, 1))); }

Value ProcGen::process_of_size(std::size_t n) {
  if (n <= 1) return nil();
  std::size_t r = below(10);
  if (n == 2 || r < 4) return prefix(action(), process_of_size(n - 1));
  if (r < 5) return bang(process_of_size(n - 1));
  if (r < 6) return restrict(std::string(1, static_cast<char>('a' + below(alphabet_))), process_of_size(n - 1));
  std::size_t left = 1 + below(n - 2);
  Value l = process_of_size(left), rr = process_of_size(n - 1 - left);
  return r < 8 ? plus(l, rr) : par(l, rr);
}

namespace {

using Path = std::vector<std::size_t>;

void positions(const Value& p, Path& at, const std::function<bool(const Value&)>& want, std::vector<Path>& out) {
  if (want(p)) out.push_back(at);
  const std::string& tag = p[0].as_sym();
  auto visit = [&](std::size_t i) {
    at.push_back(i);
    positions(p[i], at, want, out);
    at.pop_back();
  };
  if (tag == "pre" || tag == "new") visit(2);
  if (tag == "bang") visit(1);
  if (tag == "plus" || tag == "par") {
    visit(1);
    visit(2);
  }
}

Value replace_at(const Value& p, const Path& path, std::size_t depth, const std::function<Value(const Value&)>& f) {
  if (depth == path.size()) return f(p);
  std::vector<Value> items(p.items().begin(), p.items().end());
  items[path[depth]] = replace_at(p[path[depth]], path, depth + 1, f);
  return Value::tuple(std::move(items));
}

}  // namespace

Value ProcGen::variant(const Value& p) {
  Path at;
  std::vector<Path> binary, prefixes;
  positions(p, at, [](const Value& x) { return x[0].as_sym() == "plus" || x[0].as_sym() == "par"; }, binary);
  positions(p, at, [](const Value& x) { return x[0].as_sym() == "pre"; }, prefixes);
  if (!prefixes.empty() && (binary.empty() || below(3) == 0)) {
    Value a = action();
    return replace_at(p, prefixes[below(prefixes.size())], 0, [&](const Value& x) { return prefix(a, x[2]); });
  }
  if (binary.empty()) return p;
  bool reassoc = below(2) == 0;
  return replace_at(p, binary[below(binary.size())], 0, [&](const Value& x) {
    const Value& op = x[0];
    if (reassoc && x[1][0] == op) return vtup({op, x[1][1], vtup({op, x[1][2], x[2]})});
    if (reassoc && x[2][0] == op) return vtup({op, vtup({op, x[1], x[2][1]}), x[2][2]});
    return vtup({op, x[2], x[1]});
  });
}

}  // namespace ctree::ccs

namespace ctree {
void register_ccs(DefTable& defs) { ccs::register_ccs_defs(defs); }
}  // namespace ctree
