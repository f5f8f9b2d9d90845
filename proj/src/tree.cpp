#include "ctree/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctree {

namespace {

const Value& S_ret() { static const Value v = vsym("ret"); return v; }
const Value& S_vis() { static const Value v = vsym("vis"); return v; }
const Value& S_br() { static const Value v = vsym("br"); return v; }
const Value& S_call() { static const Value v = vsym("call"); return v; }
const Value& S_k() { static const Value v = vsym("k"); return v; }
const Value& S_ev() { static const Value v = vsym("ev"); return v; }
const Value& S_s() { static const Value v = vsym("s"); return v; }
const Value& S_d() { static const Value v = vsym("d"); return v; }

[[noreturn]] void bad(const char* what, const Value& t) {
  throw std::logic_error(std::string("malformed ") + what + ": " + t.str());
}

}  // namespace

Value ret(Value v) { return Value::tuple({S_ret(), std::move(v)}); }

Value vis(Value e, Value k) {
  if (!is_event(e)) bad("event", e);
  return Value::tuple({S_vis(), std::move(e), std::move(k)});
}

Value br(BranchKind kind, std::int64_t width, Value k) {
  if (width < 0) throw std::invalid_argument("negative branch width");
  return Value::tuple({S_br(), kind == BranchKind::Stepping ? S_s() : S_d(), vint(width), std::move(k)});
}

Value brS(std::int64_t width, Value k) { return br(BranchKind::Stepping, width, std::move(k)); }
Value brD(std::int64_t width, Value k) { return br(BranchKind::Delayed, width, std::move(k)); }

Value call(std::string_view def, std::vector<Value> args) {
  args.insert(args.begin(), vsym(def));
  args.insert(args.begin(), S_call());
  return Value::tuple(std::move(args));
}

Value cont(std::string_view tmpl, std::vector<Value> captured) {
  captured.insert(captured.begin(), vsym(tmpl));
  captured.insert(captured.begin(), S_k());
  return Value::tuple(std::move(captured));
}

Value event(std::string_view name, std::vector<Value> args, std::vector<Value> answers) {
  if (answers.empty()) throw std::invalid_argument("event '" + std::string(name) + "' has an empty answer domain");
  std::vector<Value> sorted = answers;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("event '" + std::string(name) + "' has duplicate answers");
  }
  return Value::tuple({S_ev(), vsym(name), Value::tuple(std::move(args)), Value::tuple(std::move(answers))});
}

Value apply(const Value& k, const Value& x) {
  if (!k.has_head("k") || k.size() < 2) bad("continuation", k);
  std::vector<Value> items(k.items().begin(), k.items().end());
  items[0] = S_call();
  items.push_back(x);
  return Value::tuple(std::move(items));
}

NodeKind node_kind(const Value& t) {
  if (t.is_tuple() && t.size() >= 2 && t[0].is_sym()) {
    const auto& h = t[0].as_sym();
    if (h == "ret" && t.size() == 2) return NodeKind::Ret;
    if (h == "vis" && t.size() == 3) return NodeKind::Vis;
    if (h == "br" && t.size() == 4) return NodeKind::Br;
    if (h == "call") return NodeKind::Call;
  }
  bad("tree", t);
}

bool is_tree(const Value& t) noexcept {
  if (!t.is_tuple() || t.size() < 2 || !t[0].is_sym()) return false;
  const auto& h = t[0].as_sym();
  return (h == "ret" && t.size() == 2) || (h == "vis" && t.size() == 3) || (h == "br" && t.size() == 4) ||
         (h == "call" && t[1].is_sym());
}

const Value& ret_value(const Value& t) {
  if (!t.has_head("ret")) bad("ret node", t);
  return t[1];
}

const Value& vis_event(const Value& t) {
  if (!t.has_head("vis")) bad("vis node", t);
  return t[1];
}

const Value& node_cont(const Value& t) {
  if (t.has_head("vis")) return t[2];
  if (t.has_head("br")) return t[3];
  bad("vis/br node", t);
}

BranchKind br_kind(const Value& t) {
  if (!t.has_head("br")) bad("br node", t);
  return t[1] == S_s() ? BranchKind::Stepping : BranchKind::Delayed;
}

std::int64_t br_width(const Value& t) {
  if (!t.has_head("br")) bad("br node", t);
  return t[2].as_int();
}

const std::string& call_name(const Value& t) {
  if (!t.has_head("call")) bad("call node", t);
  return t[1].as_sym();
}

bool is_event(const Value& e) noexcept {
  return e.has_head("ev") && e.size() == 4 && e[1].is_sym() && e[2].is_tuple() && e[3].is_tuple() &&
         e[3].size() > 0;
}

const std::string& event_name(const Value& e) {
  if (!is_event(e)) bad("event", e);
  return e[1].as_sym();
}

const Value& event_args(const Value& e) {
  if (!is_event(e)) bad("event", e);
  return e[2];
}

const Value& event_answers(const Value& e) {
  if (!is_event(e)) bad("event", e);
  return e[3];
}

const std::string& cont_template(const Value& k) {
  if (!k.has_head("k")) bad("continuation", k);
  return k[1].as_sym();
}

Value k_ret() { return cont("ret"); }
Value k_const(Value t) { return cont("const", {std::move(t)}); }
Value k_sel(std::vector<Value> ts) { return cont("sel", {Value::tuple(std::move(ts))}); }

Value k_case(std::vector<std::pair<Value, Value>> table) {
  std::sort(table.begin(), table.end());
  std::vector<Value> rows;
  for (auto& [x, t] : table) rows.push_back(Value::tuple({x, t}));
  return cont("case", {Value::tuple(std::move(rows))});
}

Value inl(Value v) { return Value::tuple({vint(0), std::move(v)}); }
Value inr(Value v) { return Value::tuple({vint(1), std::move(v)}); }

}  // namespace ctree
