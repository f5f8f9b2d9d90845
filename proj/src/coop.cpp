#include "ctree/coop.hpp"

#include <cctype>
#include <map>
#include <set>
#include <span>

#include "ctree/core.hpp"

namespace ctree::coop {

Value skip() { return vtup({vsym("skip")}); }
Value assign(std::string_view x, Value e) { return vtup({vsym("assign"), vsym(x), std::move(e)}); }
Value seq(Value s1, Value s2) { return vtup({vsym("seq"), std::move(s1), std::move(s2)}); }
Value while_(Value cond, Value body) { return vtup({vsym("while"), std::move(cond), std::move(body)}); }
Value fork(Value s1, Value s2) { return vtup({vsym("fork"), std::move(s1), std::move(s2)}); }
Value yield() { return vtup({vsym("yield")}); }
Value br(Value s1, Value s2) { return vtup({vsym("br"), std::move(s1), std::move(s2)}); }
Value block() { return vtup({vsym("block")}); }
Value print() { return vtup({vsym("print")}); }

Value num(std::int64_t n) { return vtup({vsym("num"), vint(n)}); }
Value var(std::string_view x) { return vtup({vsym("var"), vsym(x)}); }
Value truth(bool b) { return vtup({vsym(b ? "true" : "false")}); }
Value binop(std::string_view op, Value l, Value r) { return vtup({vsym(op), std::move(l), std::move(r)}); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

const std::set<std::string, std::less<>> kKeywords{"skip", "yield", "while", "do", "end", "fork",
                                                    "br",   "block", "print", "true", "false"};

class Parser {
 public:
  Parser(std::string_view s, bool impbr) : s_(s), impbr_(impbr) {}

  Value run() {
    Value p = program();
    skip_space();
    if (i_ < s_.size()) fail("';' or end of input");
    return p;
  }

 private:
  std::string_view s_;
  bool impbr_;
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
  void skip_space() {
    while (i_ < s_.size()) {
      if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        advance();
      } else {
        break;
      }
    }
  }
  bool at(std::string_view tok) {
    skip_space();
    return s_.substr(i_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!at(tok)) return false;
    for (std::size_t k = 0; k < tok.size(); ++k) advance();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("'" + std::string(tok) + "'");
  }
  std::string peek_word() {
    skip_space();
    std::size_t j = i_;
    if (j < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) {
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    }
    return std::string(s_.substr(i_, j - i_));
  }
  std::string word() {
    std::string w = peek_word();
    for (std::size_t k = 0; k < w.size(); ++k) advance();
    return w;
  }
  void keyword(std::string_view kw) {
    if (peek_word() != kw) fail("'" + std::string(kw) + "'");
    word();
  }

  bool at_statement_end() {
    skip_space();
    return i_ >= s_.size() || at("}") || at(")") || peek_word() == "end";
  }

  Value program() {
    Value s = statement();
    if (accept(";")) {
      if (at_statement_end()) return s;
      return coop::seq(s, program());
    }
    return s;
  }

  Value braced() {
    expect("{");
    Value p = program();
    expect("}");
    return p;
  }

  Value statement() {
    if (accept("(")) {
      Value p = program();
      expect(")");
      return p;
    }
    std::string w = peek_word();
    if (w.empty()) fail("a statement");
    if (w == "skip") return word(), skip();
    if (w == "while") {
      word();
      Value c = expr();
      keyword("do");
      Value body = program();
      keyword("end");
      return while_(c, body);
    }
    if (!impbr_ && w == "yield") return word(), yield();
    if (!impbr_ && w == "fork") {
      word();
      Value l = braced();
      return fork(l, braced());
    }
    if (impbr_ && w == "block") return word(), block();
    if (impbr_ && w == "print") return word(), print();
    if (impbr_ && w == "br") {
      word();
      Value l = braced();
      return br(l, braced());
    }
    if (kKeywords.contains(w)) fail("a statement");
    word();
    expect(":=");
    return assign(w, expr());
  }

  Value expr() {
    Value l = arith();
    for (auto [tok, op] : {std::pair{"<=", "le"}, {"!=", "ne"}, {"<", "lt"}, {"=", "eq"}}) {
      if (accept(tok)) return binop(op, l, arith());
    }
    return l;
  }
  Value arith() {
    Value l = term();
    while (true) {
      if (accept("+")) {
        l = binop("add", l, term());
      } else if (at("-")) {
        accept("-");
        l = binop("sub", l, term());
      } else {
        return l;
      }
    }
  }
  Value term() {
    if (accept("(")) {
      Value e = expr();
      expect(")");
      return e;
    }
    skip_space();
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      std::int64_t n = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        if (n > 1'000'000'000) fail("a smaller number");
        n = n * 10 + (s_[i_] - '0');
        advance();
      }
      return num(n);
    }
    std::string w = peek_word();
    if (w == "true" || w == "false") return word(), truth(w == "true");
    if (w.empty() || kKeywords.contains(w)) fail("an expression");
    return var(word());
  }
};

std::string show_expr(const Value& e, bool nested) {
  const std::string& tag = e[0].as_sym();
  if (tag == "num") return std::to_string(e[1].as_int());
  if (tag == "var") return e[1].as_sym();
  if (tag == "true" || tag == "false") return tag;
  static const std::map<std::string, std::string> ops{{"add", "+"}, {"sub", "-"}, {"lt", "<"},
                                                      {"le", "<="}, {"eq", "="},  {"ne", "!="}};
  bool arith = tag == "add" || tag == "sub";
  // Left operands of + and - associate; everything else nests in parentheses.
  bool left_flat = arith && (e[1][0].as_sym() == "add" || e[1][0].as_sym() == "sub");
  std::string s = show_expr(e[1], !left_flat) + " " + ops.at(tag) + " " + show_expr(e[2], true);
  return nested ? "(" + s + ")" : s;
}

std::string show_stmt(const Value& s) {
  const std::string& tag = s[0].as_sym();
  if (tag == "skip" || tag == "yield" || tag == "block" || tag == "print") return tag;
  if (tag == "assign") return s[1].as_sym() + " := " + show_expr(s[2], false);
  if (tag == "seq") {
    std::string l = show_stmt(s[1]);
    if (s[1][0].as_sym() == "seq") l = "(" + l + ")";
    return l + "; " + show_stmt(s[2]);
  }
  if (tag == "while") return "while " + show_expr(s[1], false) + " do " + show_stmt(s[2]) + " end";
  if (tag == "fork" || tag == "br") return tag + " { " + show_stmt(s[1]) + " } { " + show_stmt(s[2]) + " }";
  throw std::invalid_argument("not a statement: " + s.str());
}

void collect_vars(const Value& v, std::set<std::string>& out) {
  if (!v.is_tuple() || v.size() == 0) return;
  if (v[0].is_sym() && v[0].as_sym() == "var") {
    out.insert(v[1].as_sym());
    return;
  }
  if (v[0].is_sym() && v[0].as_sym() == "assign") out.insert(v[1].as_sym());
  for (const auto& c : v.items()) collect_vars(c, out);
}

}  // namespace

Value parse_imp(std::string_view text) { return Parser(text, false).run(); }
Value parse_impbr(std::string_view text) { return Parser(text, true).run(); }
std::string show(const Value& s) { return show_stmt(s); }

std::vector<std::string> variables(const Value& s) {
  std::set<std::string> out;
  collect_vars(s, out);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Events and denotation

Value yield_event() { return event("yield", {}, {unit()}); }
Value spawn_event() { return event("spawn", {}, {vint(0), vint(1)}); }
Value rd_event(std::string_view x, const Config& cfg) {
  Value dom = int_range(0, cfg.domain);
  return event("rd", {vsym(x)}, std::vector<Value>(dom.items().begin(), dom.items().end()));
}
Value wr_event(std::string_view x, std::int64_t v) { return event("wr", {vsym(x), vint(v)}, {unit()}); }
Value flip_event() { return event("flip", {}, {vint(0), vint(1)}); }
Value print_event() { return event("print", {}, {unit()}); }

namespace {

// The denotation's configuration travels as (domain brmode), brmode -1 for
// the threaded dialect.
Value cfg_value(const Config& cfg, int mode) { return vtup({vint(cfg.domain), vint(mode)}); }

int mode_code(BrMode m) {
  switch (m) {
    case BrMode::VisFlip: return 0;
    case BrMode::BrS: return 1;
    case BrMode::BrD: return 2;
  }
  return 2;
}

std::int64_t wrap(std::int64_t v, std::int64_t n) { return ((v % n) + n) % n; }

std::int64_t apply_op(const std::string& op, std::int64_t a, std::int64_t b, std::int64_t n) {
  if (op == "add") return wrap(a + b, n);
  if (op == "sub") return wrap(a - b, n);
  if (op == "lt") return a < b;
  if (op == "le") return a <= b;
  if (op == "eq") return a == b;
  if (op == "ne") return a != b;
  throw std::invalid_argument("unknown operator " + op);
}

Value den(const Value& cfg, const Value& s) { return call("coop.den", {cfg, s}); }
Value eval(const Value& cfg, const Value& e) { return call("coop.eval", {cfg, e}); }

using Args = std::span<const Value>;

Value with_thread(const Value& pool, std::int64_t i, Value t) {
  std::vector<Value> v(pool.items().begin(), pool.items().end());
  v[static_cast<std::size_t>(i)] = std::move(t);
  return Value::tuple(std::move(v));
}

}  // namespace

Value denote(const Value& s, const Config& cfg) { return den(cfg_value(cfg, -1), s); }
Value denote_impbr(const Value& s, BrMode mode, const Config& cfg) { return den(cfg_value(cfg, mode_code(mode)), s); }

Value schedule(std::vector<Value> pool, std::int64_t active) {
  return call("coop.sched", {Value::tuple(std::move(pool)), vint(active)});
}

Value run_scheduled(const Value& s, const Config& cfg) { return schedule({denote(s, cfg)}, -1); }

Value make_store(const std::vector<std::string>& vars, const std::vector<std::pair<std::string, std::int64_t>>& init) {
  Value st = Value::tuple({});
  for (const auto& x : vars) st = store_set(st, vsym(x), vint(0));
  for (const auto& [x, v] : init) st = store_set(st, vsym(x), vint(v));
  return st;
}

namespace {

void check_store(const Value& s, const Value& store, const Config& cfg) {
  std::set<std::string> bound;
  for (const auto& row : store.items()) {
    bound.insert(row[0].as_sym());
    std::int64_t v = row[1].as_int();
    if (v < 0 || v >= cfg.domain) {
      throw std::invalid_argument("value " + std::to_string(v) + " of " + row[0].as_sym() + " outside the domain");
    }
  }
  for (const auto& x : variables(s)) {
    if (!bound.contains(x)) throw UndeclaredVariable(x);
  }
}

}  // namespace

Value run_program(const Value& s, const Value& store, const Config& cfg) {
  check_store(s, store, cfg);
  return interp_state(StateHandler::memory(), run_scheduled(s, cfg), store);
}

Value run_impbr(const Value& s, BrMode mode, const Value& store, const Config& cfg) {
  check_store(s, store, cfg);
  return interp_state(StateHandler{cont("coop.mem"), true}, denote_impbr(s, mode, cfg), store);
}

void register_coop_defs(DefTable& defs) {
  // Memory, passing flip and print through.
  defs.define("coop.mem", 1, [](const DefTable&, Args a) {
    const Value& e = a[0][1];
    if (event_name(e) == "rd" || event_name(e) == "wr") return apply(StateHandler::memory().impl, a[0]);
    return bind(trigger(e), cont("sh.pair", {a[0][0]}));
  });
  defs.define("coop.eval", 2, [](const DefTable&, Args a) {
    const Value& cfg = a[0];
    const Value& e = a[1];
    std::int64_t n = cfg[0].as_int();
    const std::string& tag = e[0].as_sym();
    if (tag == "num") return ret(vint(wrap(e[1].as_int(), n)));
    if (tag == "true" || tag == "false") return ret(vint(tag == "true"));
    if (tag == "var") return trigger(rd_event(e[1].as_sym(), Config{n}));
    return bind(eval(cfg, e[1]), cont("coop.eval.l", {cfg, e}));
  });
  defs.define("coop.eval.l", 3, [](const DefTable&, Args a) {
    return bind(eval(a[0], a[1][2]), cont("coop.eval.r", {a[0], a[1][0], a[2]}));
  });
  defs.define("coop.eval.r", 4, [](const DefTable&, Args a) {
    return ret(vint(apply_op(a[1].as_sym(), a[2].as_int(), a[3].as_int(), a[0][0].as_int())));
  });

  defs.define("coop.den", 2, [](const DefTable&, Args a) {
    const Value& cfg = a[0];
    const Value& s = a[1];
    const std::string& tag = s[0].as_sym();
    if (tag == "skip") return ret(unit());
    if (tag == "assign") return bind(eval(cfg, s[2]), cont("coop.wr", {s[1]}));
    if (tag == "seq") return ctree::seq(den(cfg, s[1]), den(cfg, s[2]));
    if (tag == "while") return iter(cont("coop.loop", {cfg, s}), unit());
    if (tag == "yield") return trigger(yield_event());
    // Spawn answers 1 in the new thread, which runs the left command.
    if (tag == "fork") return bind(trigger(spawn_event()), k_sel({den(cfg, s[2]), den(cfg, s[1])}));
    if (tag == "block") return stuck_d();
    if (tag == "print") return trigger(print_event());
    if (tag == "br") {
      switch (cfg[1].as_int()) {
        case 0: return vis_of(flip_event(), {den(cfg, s[2]), den(cfg, s[1])});
        case 1: return brS_of({den(cfg, s[1]), den(cfg, s[2])});
        case 2: return brD_of({den(cfg, s[1]), den(cfg, s[2])});
      }
    }
    throw std::invalid_argument("not a statement: " + s.str());
  });
  defs.define("coop.wr", 2, [](const DefTable&, Args a) {
    return trigger(wr_event(a[0].as_sym(), a[1].as_int()));
  });
  defs.define("coop.loop", 3, [](const DefTable&, Args a) {
    return bind(eval(a[0], a[1][1]), cont("coop.cond", {a[0], a[1][2]}));
  });
  defs.define("coop.cond", 3, [](const DefTable&, Args a) {
    if (a[2].as_int() == 0) return ret(inr(unit()));
    return bind(den(a[0], a[1]), k_const(ret(inl(unit()))));
  });

  defs.define("coop.sched", 2, [](const DefTable& d, Args a) {
    const Value& pool = a[0];
    std::int64_t i = a[1].as_int();
    auto n = static_cast<std::int64_t>(pool.size());
    if (i < 0) {
      if (n == 0) return ret(unit());
      return brS(n, cont("coop.pick", {pool}));
    }
    Value t = d.unfold(pool[static_cast<std::size_t>(i)]);
    switch (node_kind(t)) {
      case NodeKind::Ret: {
        std::vector<Value> rest;
        for (std::int64_t j = 0; j < n; ++j) {
          if (j != i) rest.push_back(pool[static_cast<std::size_t>(j)]);
        }
        return guard(schedule(std::move(rest), -1));
      }
      case NodeKind::Br:
        return br(br_kind(t), br_width(t), cont("coop.resume", {pool, a[1], node_cont(t)}));
      case NodeKind::Vis: {
        const Value& e = vis_event(t);
        const Value& k = node_cont(t);
        if (e == yield_event()) return guard(call("coop.sched", {with_thread(pool, i, apply(k, unit())), vint(-1)}));
        if (e == spawn_event()) {
          std::vector<Value> v{apply(k, vint(1))};
          Value rest = with_thread(pool, i, apply(k, vint(0)));
          v.insert(v.end(), rest.items().begin(), rest.items().end());
          return step(schedule(std::move(v), i + 1));
        }
        return vis(e, cont("coop.resume", {pool, a[1], k}));
      }
      case NodeKind::Call: break;
    }
    throw std::logic_error("unfold returned a call");
  });
  defs.define("coop.pick", 2, [](const DefTable&, Args a) { return call("coop.sched", {a[0], a[1]}); });
  defs.define("coop.resume", 4, [](const DefTable&, Args a) {
    return call("coop.sched", {with_thread(a[0], a[1].as_int(), apply(a[2], a[3])), a[1]});
  });
}

}  // namespace ctree::coop

namespace ctree {
void register_coop(DefTable& defs) { coop::register_coop_defs(defs); }
}  // namespace ctree
