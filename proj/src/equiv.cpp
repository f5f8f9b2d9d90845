#include "ctree/equiv.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ctree/tree.hpp"

namespace ctree {

LabelRel LabelRel::equality() {
  return LabelRel{"equal", [](const Label& a, const Label& b) { return a == b; }, true};
}

LabelRel LabelRel::val_projection() {
  return LabelRel{"val-projection",
                  [](const Label& a, const Label& b) {
                    if (a.is_val() && b.is_val()) {
                      const Value& v = a.value();
                      return v.is_tuple() && v.size() == 2 && v[1] == b.value();
                    }
                    return a == b;
                  },
                  false};
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::size_t, std::size_t>& p) const noexcept {
    return p.first * 0x9e3779b97f4a7c15ull ^ (p.second + 0x632be59bd9b4e019ull);
  }
};

class Game {
 public:
  Game(const FiniteLTS& lts, const GameOptions& opt) : lts_(lts), opt_(opt) {
    rel_.assign(lts.labels.size() * lts.labels.size(), 0);
    for (std::size_t i = 0; i < lts.labels.size(); ++i) {
      for (std::size_t j = 0; j < lts.labels.size(); ++j) {
        rel_[i * lts.labels.size() + j] = opt.rel.related(lts.labels[i], lts.labels[j]);
      }
    }
  }

  Verdict solve(std::size_t left, std::size_t right) {
    std::size_t root = position(left, right);
    for (std::size_t i = 0; i < pos_.size(); ++i) expand(i);
    propagate();
    if (pos_[root].won) return Verdict::fails(witness(root));
    if (wild_) return Verdict::unknown("state budget exhausted before the game was decided");
    return Verdict::holds();
  }

 private:
  struct Response {
    std::uint32_t label;
    std::size_t state;
    std::size_t pos;
  };
  struct Attack {
    std::size_t owner;
    Side side;
    std::uint32_t label;
    std::size_t target;
    std::vector<Response> responses;
    std::size_t remaining;
    bool won = false;
  };
  struct Position {
    std::size_t left, right;
    bool won = false;
    std::size_t strategy = 0;
    std::vector<std::size_t> attacks;
    std::vector<std::size_t> preds;  // attack ids with a response here, one entry per response
  };

  bool related(std::uint32_t a, std::uint32_t b) const { return rel_[a * lts_.labels.size() + b]; }

  std::size_t position(std::size_t l, std::size_t r) {
    auto [it, fresh] = index_.try_emplace({l, r}, pos_.size());
    if (fresh) pos_.push_back(Position{l, r, false, 0, {}, {}});
    return it->second;
  }

  void expand(std::size_t id) {
    std::size_t l = pos_[id].left, r = pos_[id].right;
    if (lts_.is_frontier(l) || lts_.is_frontier(r) || id >= opt_.max_positions) {
      wild_ = true;
      return;
    }
    for (const auto& t : lts_.out(l)) {
      Attack a{id, Side::Left, t.label, t.dst, {}, 0};
      for (const auto& u : lts_.out(r)) {
        if (related(t.label, u.label)) a.responses.push_back(Response{u.label, u.dst, 0});
      }
      add_attack(std::move(a));
    }
    if (opt_.kind == GameKind::Simulation) return;
    for (const auto& t : lts_.out(r)) {
      Attack a{id, Side::Right, t.label, t.dst, {}, 0};
      for (const auto& u : lts_.out(l)) {
        if (related(u.label, t.label)) a.responses.push_back(Response{u.label, u.dst, 0});
      }
      add_attack(std::move(a));
    }
  }

  void add_attack(Attack a) {
    std::size_t aid = attacks_.size();
    for (auto& resp : a.responses) {
      resp.pos = a.side == Side::Left ? position(a.target, resp.state) : position(resp.state, a.target);
      pos_[resp.pos].preds.push_back(aid);
    }
    a.remaining = a.responses.size();
    pos_[a.owner].attacks.push_back(aid);
    if (a.remaining == 0) ready_.push_back(aid);
    attacks_.push_back(std::move(a));
  }

  void propagate() {
    for (std::size_t i = 0; i < ready_.size(); ++i) {
      Attack& a = attacks_[ready_[i]];
      if (a.won) continue;
      a.won = true;
      Position& p = pos_[a.owner];
      if (p.won) continue;
      p.won = true;
      p.strategy = ready_[i];
      for (auto pred : p.preds) {
        if (--attacks_[pred].remaining == 0) ready_.push_back(pred);
      }
    }
  }

  Witness witness(std::size_t root) {
    Witness w;
    w.kind = "game";
    w.labels = lts_.labels;
    std::unordered_map<std::size_t, std::size_t> node_of;
    std::vector<std::size_t> order{root};
    node_of[root] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Attack& a = attacks_[pos_[order[i]].strategy];
      for (const auto& r : a.responses) {
        if (node_of.try_emplace(r.pos, order.size()).second) order.push_back(r.pos);
      }
    }
    for (std::size_t pid : order) {
      const Position& p = pos_[pid];
      const Attack& a = attacks_[p.strategy];
      StrategyNode n;
      n.left = p.left;
      n.right = p.right;
      n.side = a.side;
      n.label = a.label;
      n.target = a.target;
      for (const auto& r : a.responses) n.replies.push_back({r.label, r.state, node_of.at(r.pos)});
      w.strategy.push_back(std::move(n));
    }
    // Principal line: always follow the first defender reply.
    std::size_t cur = 0;
    for (std::size_t guard = 0; guard <= w.strategy.size(); ++guard) {
      const auto& n = w.strategy[cur];
      w.trace.push_back(lts_.labels[n.label]);
      w.sides.push_back(n.side);
      if (n.replies.empty()) break;
      cur = n.replies.front().next;
    }
    return w;
  }

  const FiniteLTS& lts_;
  const GameOptions& opt_;
  std::vector<std::uint8_t> rel_;
  std::vector<Position> pos_;
  std::vector<Attack> attacks_;
  std::vector<std::size_t> ready_;
  std::unordered_map<std::pair<std::size_t, std::size_t>, std::size_t, PairHash> index_;
  bool wild_ = false;
};

}  // namespace

Verdict solve_game(const FiniteLTS& lts, std::size_t left, std::size_t right, const GameOptions& opt) {
  Game g(lts, opt);
  return g.solve(left, right);
}

std::vector<std::size_t> bisim_partition(const FiniteLTS& lts) {
  std::vector<std::size_t> block(lts.size(), 0);
  std::size_t count = 1;
  while (true) {
    std::map<std::pair<std::size_t, std::vector<std::pair<std::uint32_t, std::size_t>>>, std::size_t> sigs;
    std::vector<std::size_t> next(lts.size());
    for (std::size_t s = 0; s < lts.size(); ++s) {
      std::vector<std::pair<std::uint32_t, std::size_t>> sig;
      for (const auto& t : lts.out(s)) sig.emplace_back(t.label, block[t.dst]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto [it, fresh] = sigs.try_emplace({block[s], std::move(sig)}, sigs.size());
      next[s] = it->second;
    }
    block = std::move(next);
    if (sigs.size() == count) break;
    count = sigs.size();
  }
  return block;
}

Verdict bisim_states(const FiniteLTS& lts, std::size_t left, std::size_t right) {
  GameOptions opt;
  if (!lts.partial) {
    auto block = bisim_partition(lts);
    if (block[left] == block[right]) return Verdict::holds();
  }
  return solve_game(lts, left, right, opt);
}

bool replay(const FiniteLTS& lts, const Witness& w, const GameOptions& opt, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (w.kind != "game" || w.strategy.empty()) return fail("not a game witness");
  auto find_label = [&](std::size_t wid) -> std::optional<std::uint32_t> {
    if (wid >= w.labels.size()) return std::nullopt;
    auto id = lts.find_label(w.labels[wid]);
    if (!id) return std::nullopt;
    return static_cast<std::uint32_t>(*id);
  };
  // 0 = unvisited, 1 = on stack, 2 = verified
  std::vector<std::uint8_t> state(w.strategy.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  state[0] = 1;
  while (!stack.empty()) {
    auto& [idx, next_reply] = stack.back();
    const StrategyNode& n = w.strategy[idx];
    if (next_reply == 0) {
      if (n.side == Side::Right && opt.kind == GameKind::Simulation) return fail("right move in a simulation game");
      std::size_t atk = n.side == Side::Left ? n.left : n.right;
      std::size_t def = n.side == Side::Left ? n.right : n.left;
      if (atk >= lts.size() || def >= lts.size()) return fail("state out of range");
      if (lts.is_frontier(atk) || lts.is_frontier(def)) return fail("witness touches a frontier state");
      auto lbl = find_label(n.label);
      if (!lbl) return fail("unknown attacker label");
      bool found = false;
      for (const auto& t : lts.out(atk)) found |= t.label == *lbl && t.dst == n.target;
      if (!found) return fail("attacker transition missing at node " + std::to_string(idx));
      std::set<std::pair<std::uint32_t, std::size_t>> expected, got;
      for (const auto& t : lts.out(def)) {
        bool ok = n.side == Side::Left ? opt.rel.related(lts.labels[*lbl], lts.labels[t.label])
                                       : opt.rel.related(lts.labels[t.label], lts.labels[*lbl]);
        if (ok) expected.emplace(t.label, t.dst);
      }
      for (const auto& r : n.replies) {
        auto rl = find_label(r.label);
        if (!rl) return fail("unknown defender label");
        got.emplace(*rl, r.state);
        if (r.next >= w.strategy.size()) return fail("dangling strategy reference");
        const StrategyNode& m = w.strategy[r.next];
        std::pair<std::size_t, std::size_t> want =
            n.side == Side::Left ? std::pair{n.target, r.state} : std::pair{r.state, n.target};
        if (std::pair{m.left, m.right} != want) return fail("reply leads to the wrong pair");
      }
      if (expected != got) return fail("defender replies incomplete at node " + std::to_string(idx));
    }
    if (next_reply < n.replies.size()) {
      std::size_t child = n.replies[next_reply++].next;
      if (state[child] == 1) return fail("strategy is cyclic");
      if (state[child] == 0) {
        state[child] = 1;
        stack.emplace_back(child, 0);
      }
    } else {
      state[idx] = 2;
      stack.pop_back();
    }
  }
  return true;
}

Verdict check_sbisim(const DefTable& defs, const Value& t, const Value& u, const Budget& b, const LabelRel& rel) {
  FiniteLTS lts = extract_lts(defs, {t, u}, b);
  if (rel.is_equality) return bisim_states(lts, lts.roots[0], lts.roots[1]);
  GameOptions opt;
  opt.rel = rel;
  return solve_game(lts, lts.roots[0], lts.roots[1], opt);
}

Verdict check_wbisim(const DefTable& defs, const Value& t, const Value& u, const Budget& b) {
  FiniteLTS sat = saturate(extract_lts(defs, {t, u}, b));
  return bisim_states(sat, sat.roots[0], sat.roots[1]);
}

Verdict check_ssim(const DefTable& defs, const Value& t, const Value& u, const Budget& b, const LabelRel& rel) {
  FiniteLTS lts = extract_lts(defs, {t, u}, b);
  GameOptions opt;
  opt.rel = rel;
  opt.kind = GameKind::Simulation;
  return solve_game(lts, lts.roots[0], lts.roots[1], opt);
}

Verdict check_equ(const DefTable& defs, const Value& t, const Value& u, const Budget& b) {
  struct Entry {
    Value l, r;
    std::size_t parent;
    Value step;
  };
  std::vector<Entry> seen;
  std::unordered_set<Value, ValueHash> visited;
  auto push = [&](Value l, Value r, std::size_t parent, Value step) {
    Value key = vtup({l, r});
    if (visited.insert(key).second) seen.push_back(Entry{std::move(l), std::move(r), parent, std::move(step)});
  };
  push(defs.unfold(t), defs.unfold(u), 0, unit());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (i >= b.max_states) return Verdict::unknown("pair budget exhausted");
    const Value l = seen[i].l, r = seen[i].r;
    std::string mismatch;
    NodeKind kl = node_kind(l), kr = node_kind(r);
    if (kl != kr) {
      mismatch = "head constructors differ";
    } else if (kl == NodeKind::Ret && l[1] != r[1]) {
      mismatch = "returned values differ";
    } else if (kl == NodeKind::Vis && l[1] != r[1]) {
      mismatch = "events differ";
    } else if (kl == NodeKind::Br && (l[1] != r[1] || l[2] != r[2])) {
      mismatch = "branch kind or width differs";
    }
    if (!mismatch.empty()) {
      Witness w;
      w.kind = "structural";
      std::vector<Value> path;
      for (std::size_t j = i; j != 0; j = seen[j].parent) path.push_back(seen[j].step);
      std::reverse(path.begin(), path.end());
      for (const auto& s : path) {
        w.trace.push_back(s.has_head("answer") ? Label::obs(s[1], s[2]) : Label::tau());
      }
      w.note = mismatch + " after path " + Value::tuple(path).str() + ": left " + l.str() + ", right " + r.str();
      return Verdict::fails(std::move(w));
    }
    if (kl == NodeKind::Vis) {
      for (const auto& a : event_answers(l[1]).items()) {
        push(defs.apply(l[2], a), defs.apply(r[2], a), i, vtup({vsym("answer"), l[1], a}));
      }
    } else if (kl == NodeKind::Br) {
      for (std::int64_t k = 0; k < br_width(l); ++k) {
        push(defs.apply(l[3], vint(k)), defs.apply(r[3], vint(k)), i, vtup({vsym("child"), vint(k)}));
      }
    }
  }
  return Verdict::holds();
}

TraceSet traces_to_depth(const FiniteLTS& lts, std::size_t state, std::size_t d) {
  constexpr std::size_t kMaxTraces = 500'000;
  TraceSet out;
  std::vector<Label> path;  // always stack.size() - 1 labels
  std::vector<std::pair<std::size_t, std::size_t>> stack{{state, 0}};
  auto pop = [&] {
    stack.pop_back();
    if (!stack.empty()) path.resize(stack.size() - 1);
  };
  while (!stack.empty()) {
    auto [s, next] = stack.back();
    if (next == 0) {
      if (lts.is_frontier(s)) {
        out.partial = true;
        pop();
        continue;
      }
      if (path.size() == d || lts.out(s).empty()) {
        out.traces.insert(path);
        if (out.traces.size() > kMaxTraces) {
          out.partial = true;
          return out;
        }
        pop();
        continue;
      }
    }
    auto outs = lts.out(s);
    if (next < outs.size()) {
      const auto& t = outs[next];
      stack.back().second = next + 1;
      path.push_back(lts.labels[t.label]);
      stack.emplace_back(t.dst, 0);
    } else {
      pop();
    }
  }
  return out;
}

TraceSet traces_to_depth(const DefTable& defs, const Value& t, std::size_t d, const Budget& b) {
  FiniteLTS lts = extract_lts(defs, t, b);
  return traces_to_depth(lts, lts.initial(), d);
}

Verdict check_trace_equiv(const DefTable& defs, const Value& t, const Value& u, std::size_t d, const Budget& b) {
  FiniteLTS lts = extract_lts(defs, {t, u}, b);
  TraceSet a = traces_to_depth(lts, lts.roots[0], d);
  TraceSet c = traces_to_depth(lts, lts.roots[1], d);
  for (const auto& tr : a.traces) {
    if (!c.traces.count(tr)) {
      if (c.partial) break;
      Witness w{"trace", tr, std::vector<Side>(tr.size(), Side::Left), {}, {}, "trace of the left side only"};
      return Verdict::fails(std::move(w));
    }
  }
  for (const auto& tr : c.traces) {
    if (!a.traces.count(tr)) {
      if (a.partial) break;
      Witness w{"trace", tr, std::vector<Side>(tr.size(), Side::Right), {}, {}, "trace of the right side only"};
      return Verdict::fails(std::move(w));
    }
  }
  if (a.partial || c.partial) return Verdict::unknown("trace enumeration incomplete");
  return Verdict::holds();
}

}  // namespace ctree
