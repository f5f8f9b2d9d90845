#include "ctree/verdict.hpp"

#include <json.hpp>
#include <stdexcept>

namespace ctree {

namespace {
const Value& tau_value() {
  static const Value v = vsym("tau");
  return v;
}
}  // namespace

Label::Label() : v_(tau_value()) {}

Label Label::obs(Value event, Value answer) {
  return Label(vtup({vsym("obs"), std::move(event), std::move(answer)}));
}

Label Label::val(Value v) { return Label(vtup({vsym("val"), std::move(v)})); }

Label Label::from_value(const Value& v) {
  if (v == tau_value()) return Label();
  if (v.has_head("obs") && v.size() == 3) return Label(v);
  if (v.has_head("val") && v.size() == 2) return Label(v);
  throw std::invalid_argument("not a label: " + v.str());
}

Label::Kind Label::kind() const {
  if (v_.is_sym()) return Kind::Tau;
  return v_.has_head("obs") ? Kind::Obs : Kind::Val;
}

const Value& Label::event() const {
  if (!is_obs()) throw std::logic_error("label has no event: " + str());
  return v_[1];
}

const Value& Label::answer() const {
  if (!is_obs()) throw std::logic_error("label has no answer: " + str());
  return v_[2];
}

const Value& Label::value() const {
  if (!is_val()) throw std::logic_error("label has no value: " + str());
  return v_[1];
}

namespace {

const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

nlohmann::ordered_json witness_json(const Witness& w) {
  nlohmann::ordered_json j;
  j["kind"] = w.kind;
  auto trace = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < w.trace.size(); ++i) {
    nlohmann::ordered_json step;
    step["label"] = w.trace[i].str();
    if (i < w.sides.size()) step["attacker"] = side_name(w.sides[i]);
    trace.push_back(step);
  }
  j["trace"] = trace;
  if (!w.strategy.empty()) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : w.strategy) {
      nlohmann::ordered_json jn;
      jn["pair"] = {n.left, n.right};
      jn["attacker"] = side_name(n.side);
      jn["label"] = w.labels.at(n.label).str();
      jn["target"] = n.target;
      auto replies = nlohmann::ordered_json::array();
      for (const auto& r : n.replies) {
        replies.push_back({{"label", w.labels.at(r.label).str()}, {"state", r.state}, {"next", r.next}});
      }
      jn["defender"] = replies;
      nodes.push_back(jn);
    }
    j["strategy"] = nodes;
  }
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

}  // namespace

std::string Witness::to_json() const { return witness_json(*this).dump(); }

Verdict Verdict::fails(Witness w) {
  Verdict v(Status::Fails);
  v.witness_ = std::move(w);
  return v;
}

Verdict Verdict::unknown(std::string reason) {
  Verdict v(Status::Unknown);
  v.reason_ = std::move(reason);
  return v;
}

std::string Verdict::name() const {
  switch (status_) {
    case Status::Holds:
      return "holds";
    case Status::Fails:
      return "fails";
    case Status::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::string Verdict::to_json() const {
  nlohmann::ordered_json j;
  j["verdict"] = name();
  if (is_fails()) j["witness"] = witness_json(witness_);
  if (is_unknown()) j["reason"] = reason_;
  return j.dump();
}

}  // namespace ctree
