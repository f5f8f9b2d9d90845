#include "ctree/lts.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>
#include <set>
#include <unordered_set>

#include "ctree/core.hpp"

namespace ctree {

ClosureResult brd_closure(const DefTable& defs, const Value& t, const Budget& b) {
  ClosureResult res;
  struct Frame {
    Value node;
    std::int64_t next;
    std::int64_t width;
  };
  std::vector<Frame> stack;
  std::unordered_set<Value, ValueHash> on_stack, done, heads;
  std::size_t visited = 0;

  auto visit = [&](Value u) {
    if (u.has_head("br") && br_kind(u) == BranchKind::Delayed) {
      if (on_stack.count(u)) {
        res.divergence_detected = true;
        return;
      }
      if (done.count(u)) return;
      if (++visited > b.max_closure_depth) {
        res.budget_exhausted = true;
        return;
      }
      on_stack.insert(u);
      std::int64_t w = br_width(u);
      stack.push_back(Frame{std::move(u), 0, w});
      return;
    }
    if (heads.insert(u).second) res.heads.push_back(std::move(u));
  };

  visit(defs.unfold(t));
  while (!stack.empty() && !res.budget_exhausted) {
    Frame& f = stack.back();
    if (f.next < f.width) {
      Value child = defs.apply(node_cont(f.node), vint(f.next++));
      visit(std::move(child));
    } else {
      on_stack.erase(f.node);
      done.insert(f.node);
      stack.pop_back();
    }
  }
  return res;
}

Value stuck_state() { return stuck_d(); }

Moves transitions(const DefTable& defs, const Value& t, const Budget& b) {
  Moves out;
  ClosureResult c = brd_closure(defs, t, b);
  out.divergent = c.divergence_detected;
  if (c.budget_exhausted) {
    out.partial = true;
    return out;
  }
  for (const auto& h : c.heads) {
    switch (node_kind(h)) {
      case NodeKind::Ret:
        out.moves.push_back(Move{Label::val(h[1]), stuck_state()});
        break;
      case NodeKind::Vis: {
        const Value& e = h[1];
        for (const auto& a : event_answers(e).items()) {
          out.moves.push_back(Move{Label::obs(e, a), defs.apply(h[2], a)});
        }
        break;
      }
      case NodeKind::Br:
        for (std::int64_t i = 0; i < br_width(h); ++i) {
          out.moves.push_back(Move{Label::tau(), defs.apply(h[3], vint(i))});
        }
        break;
      case NodeKind::Call:
        throw std::logic_error("closure head is a call");
    }
  }
  std::sort(out.moves.begin(), out.moves.end(), [](const Move& x, const Move& y) {
    if (auto c = x.label <=> y.label; c != 0) return c < 0;
    return x.target < y.target;
  });
  out.moves.erase(std::unique(out.moves.begin(), out.moves.end()), out.moves.end());
  return out;
}

Verdict is_stuck(const DefTable& defs, const Value& t, const Budget& b) {
  Moves m = transitions(defs, t, b);
  if (m.partial) return Verdict::unknown("closure budget exhausted");
  if (m.moves.empty()) return Verdict::holds();
  Witness w;
  w.kind = "stuck";
  w.trace.push_back(m.moves.front().label);
  return Verdict::fails(std::move(w));
}

std::span<const Transition> FiniteLTS::out(std::size_t s) const {
  return std::span<const Transition>(transitions).subspan(out_begin_[s], out_begin_[s + 1] - out_begin_[s]);
}

std::optional<std::size_t> FiniteLTS::find(const Value& key) const {
  auto it = state_index_.find(key);
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FiniteLTS::find_label(const Label& l) const {
  auto it = label_index_.find(l.repr());
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FiniteLTS::intern_state(const Value& key) {
  auto [it, fresh] = state_index_.try_emplace(key, states.size());
  if (fresh) {
    states.push_back(key);
    expanded.push_back(0);
    divergent.push_back(0);
  }
  return it->second;
}

std::uint32_t FiniteLTS::intern_label(const Label& l) {
  auto [it, fresh] = label_index_.try_emplace(l.repr(), static_cast<std::uint32_t>(labels.size()));
  if (fresh) labels.push_back(l);
  return it->second;
}

void FiniteLTS::finish() {
  std::stable_sort(transitions.begin(), transitions.end(),
                   [](const Transition& a, const Transition& b) { return a.src < b.src; });
  out_begin_.assign(states.size() + 1, 0);
  for (const auto& t : transitions) ++out_begin_[t.src + 1];
  for (std::size_t i = 0; i < states.size(); ++i) out_begin_[i + 1] += out_begin_[i];
}

FiniteLTS explore(const std::vector<Value>& roots, const Successors& succ, std::size_t max_states) {
  FiniteLTS lts;
  for (const auto& r : roots) lts.roots.push_back(lts.intern_state(r));
  std::size_t next = 0;
  for (; next < lts.states.size() && next < max_states; ++next) {
    Moves m = succ(lts.states[next]);
    lts.divergent[next] = m.divergent;
    if (m.partial) {
      lts.partial = true;
      continue;
    }
    lts.expanded[next] = 1;
    for (const auto& mv : m.moves) {
      auto lbl = lts.intern_label(mv.label);
      auto dst = static_cast<std::uint32_t>(lts.intern_state(mv.target));
      lts.transitions.push_back(Transition{static_cast<std::uint32_t>(next), lbl, dst});
    }
  }
  if (next < lts.states.size()) lts.partial = true;
  lts.finish();
  return lts;
}

FiniteLTS extract_lts(const DefTable& defs, const Value& t, const Budget& b) {
  return extract_lts(defs, std::vector<Value>{t}, b);
}

FiniteLTS extract_lts(const DefTable& defs, const std::vector<Value>& roots, const Budget& b) {
  std::vector<Value> unfolded;
  for (const auto& r : roots) unfolded.push_back(defs.unfold(r));
  return explore(unfolded, [&](const Value& s) { return transitions(defs, s, b); }, b.max_states);
}

namespace {

std::vector<std::size_t> tau_closure(const FiniteLTS& lts, std::size_t s, std::optional<std::uint32_t> tau) {
  std::vector<std::size_t> seen{s};
  std::unordered_set<std::size_t> mark{s};
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!tau) break;
    for (const auto& t : lts.out(seen[i])) {
      if (t.label == *tau && mark.insert(t.dst).second) seen.push_back(t.dst);
    }
  }
  std::sort(seen.begin(), seen.end());
  return seen;
}

std::optional<std::uint32_t> tau_id(const FiniteLTS& lts) {
  auto id = lts.find_label(Label::tau());
  if (!id) return std::nullopt;
  return static_cast<std::uint32_t>(*id);
}

}  // namespace

std::vector<std::size_t> weak_transitions(const FiniteLTS& lts, std::size_t s, const Label& l) {
  auto tau = tau_id(lts);
  auto pre = tau_closure(lts, s, tau);
  if (l.is_tau()) return pre;
  auto lid = lts.find_label(l);
  if (!lid) return {};
  std::set<std::size_t> out;
  for (auto u : pre) {
    for (const auto& t : lts.out(u)) {
      if (t.label != *lid) continue;
      for (auto w : tau_closure(lts, t.dst, tau)) out.insert(w);
    }
  }
  return {out.begin(), out.end()};
}

FiniteLTS saturate(const FiniteLTS& lts) {
  FiniteLTS sat;
  for (const auto& s : lts.states) sat.intern_state(s);
  for (const auto& l : lts.labels) sat.intern_label(l);
  auto tau_lbl = sat.intern_label(Label::tau());
  sat.roots = lts.roots;
  sat.partial = lts.partial;

  auto tau = tau_id(lts);
  std::vector<std::vector<std::size_t>> closure(lts.size());
  for (std::size_t s = 0; s < lts.size(); ++s) closure[s] = tau_closure(lts, s, tau);

  for (std::size_t s = 0; s < lts.size(); ++s) {
    bool frontier = false;
    std::set<std::pair<std::uint32_t, std::size_t>> moves;
    for (auto u : closure[s]) {
      if (lts.is_frontier(u)) frontier = true;
      moves.emplace(tau_lbl, u);
      for (const auto& t : lts.out(u)) {
        if (tau && t.label == *tau) continue;
        for (auto w : closure[t.dst]) {
          if (lts.is_frontier(w)) frontier = true;
          moves.emplace(t.label, w);
        }
      }
    }
    sat.divergent[s] = lts.divergent[s];
    if (frontier) continue;
    sat.expanded[s] = 1;
    for (const auto& [l, w] : moves) {
      sat.transitions.push_back(
          Transition{static_cast<std::uint32_t>(s), l, static_cast<std::uint32_t>(w)});
    }
  }
  sat.finish();
  return sat;
}

namespace {

std::string pretty_label(const Label& l) {
  if (l.is_tau()) return "tau";
  if (l.is_val()) return "val " + l.value().str();
  std::string s = event_name(l.event());
  if (event_args(l.event()).size() > 0) s += event_args(l.event()).str();
  return s + " " + l.answer().str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const FiniteLTS& lts) {
  std::string out = "digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (std::size_t s = 0; s < lts.size(); ++s) {
    out += "  s" + std::to_string(s) + " [label=\"" + std::to_string(s) + "\"";
    if (lts.is_frontier(s)) out += ", style=dashed";
    out += "];\n";
  }
  for (std::size_t r = 0; r < lts.roots.size(); ++r) {
    out += "  init" + std::to_string(r) + " [shape=point];\n";
    out += "  init" + std::to_string(r) + " -> s" + std::to_string(lts.roots[r]) + ";\n";
  }
  for (const auto& t : lts.transitions) {
    out += "  s" + std::to_string(t.src) + " -> s" + std::to_string(t.dst) + " [label=\"" +
           escape(pretty_label(lts.labels[t.label])) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string to_json(const FiniteLTS& lts) {
  nlohmann::ordered_json j;
  auto states = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < lts.size(); ++s) {
    states.push_back({{"id", s},
                      {"key", lts.states[s].str()},
                      {"frontier", lts.is_frontier(s)},
                      {"divergent", static_cast<bool>(lts.divergent[s])}});
  }
  j["states"] = states;
  j["initial"] = lts.roots.empty() ? 0 : lts.initial();
  j["roots"] = lts.roots;
  j["partial"] = lts.partial;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& t : lts.transitions) {
    edges.push_back({{"src", t.src}, {"label", lts.labels[t.label].str()}, {"dst", t.dst}});
  }
  j["transitions"] = edges;
  return j.dump();
}

}  // namespace ctree
