#include "ctree/value.hpp"

#include <cctype>
#include <charconv>

namespace ctree {

struct Value::Node {
  Kind kind;
  std::int64_t n = 0;
  std::string sym;
  std::vector<Value> items;
  std::size_t hash = 0;
};

namespace {

constexpr std::size_t kFnvOffset = 1469598103934665603ull;
constexpr std::size_t kFnvPrime = 1099511628211ull;

std::size_t mix(std::size_t h, std::size_t x) {
  h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::size_t hash_bytes(std::string_view s, std::size_t seed) {
  std::size_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

bool symbol_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\'') return true;
  if (first) return false;
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ':' || c == '-' ||
         c == '~' || c == '+' || c == '#';
}

}  // namespace

Value::Value() : node_(nullptr) {
  static const std::shared_ptr<const Node> unit = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Tuple;
    n->hash = mix(kFnvOffset, 3);
    return std::shared_ptr<const Node>(n);
  }();
  node_ = unit;
}

Value::Value(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Value Value::integer(std::int64_t n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Int;
  node->n = n;
  node->hash = mix(mix(kFnvOffset, 1), static_cast<std::size_t>(n));
  return Value(std::move(node));
}

Value Value::symbol(std::string_view name) {
  if (name.empty() || !symbol_char(name.front(), true)) {
    throw std::invalid_argument("invalid symbol: '" + std::string(name) + "'");
  }
  for (char c : name) {
    if (!symbol_char(c, false)) {
      throw std::invalid_argument("invalid symbol: '" + std::string(name) + "'");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Sym;
  node->sym = std::string(name);
  node->hash = hash_bytes(name, mix(kFnvOffset, 2));
  return Value(std::move(node));
}

Value Value::tuple(std::vector<Value> items) {
  if (items.empty()) return Value();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Tuple;
  std::size_t h = mix(kFnvOffset, 3);
  for (const auto& v : items) h = mix(h, v.hash());
  node->hash = mix(h, items.size());
  node->items = std::move(items);
  return Value(std::move(node));
}

Value Value::tuple(std::initializer_list<Value> items) {
  return tuple(std::vector<Value>(items));
}

Value::Kind Value::kind() const noexcept { return node_->kind; }

std::int64_t Value::as_int() const {
  if (!is_int()) throw std::logic_error("Value is not an integer: " + str());
  return node_->n;
}

const std::string& Value::as_sym() const {
  if (!is_sym()) throw std::logic_error("Value is not a symbol: " + str());
  return node_->sym;
}

std::span<const Value> Value::items() const {
  if (!is_tuple()) throw std::logic_error("Value is not a tuple: " + str());
  return node_->items;
}

std::size_t Value::size() const noexcept { return is_tuple() ? node_->items.size() : 0; }

const Value& Value::operator[](std::size_t i) const {
  if (!is_tuple() || i >= node_->items.size()) {
    throw std::out_of_range("tuple index " + std::to_string(i) + " out of range in " + str());
  }
  return node_->items[i];
}

bool Value::has_head(std::string_view tag) const noexcept {
  return is_tuple() && !node_->items.empty() && node_->items[0].is_sym() &&
         node_->items[0].node_->sym == tag;
}

std::size_t Value::hash() const noexcept { return node_->hash; }

bool operator==(const Value& a, const Value& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
  switch (a.node_->kind) {
    case Value::Kind::Int:
      return a.node_->n == b.node_->n;
    case Value::Kind::Sym:
      return a.node_->sym == b.node_->sym;
    case Value::Kind::Tuple:
      return a.node_->items == b.node_->items;
  }
  return false;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.node_->kind != b.node_->kind) return a.node_->kind <=> b.node_->kind;
  switch (a.node_->kind) {
    case Value::Kind::Int:
      return a.node_->n <=> b.node_->n;
    case Value::Kind::Sym: {
      int c = a.node_->sym.compare(b.node_->sym);
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case Value::Kind::Tuple: {
      const auto& xs = a.node_->items;
      const auto& ys = b.node_->items;
      std::size_t n = std::min(xs.size(), ys.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (auto c = xs[i] <=> ys[i]; c != 0) return c;
      }
      return xs.size() <=> ys.size();
    }
  }
  return std::strong_ordering::equal;
}

void Value::write(std::string& out) const {
  switch (kind()) {
    case Kind::Int:
      out += std::to_string(node_->n);
      break;
    case Kind::Sym:
      out += node_->sym;
      break;
    case Kind::Tuple:
      out += '(';
      for (std::size_t i = 0; i < node_->items.size(); ++i) {
        if (i) out += ' ';
        node_->items[i].write(out);
      }
      out += ')';
      break;
  }
}

std::string Value::str() const {
  std::string out;
  write(out);
  return out;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& expected)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": expected " + expected),
      line_(line),
      column_(column) {}

namespace {

class SexpReader {
 public:
  explicit SexpReader(std::string_view text) : text_(text) {}

  Value read_all() {
    skip_ws();
    Value v = read();
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return v;
  }

 private:
  Value read() {
    skip_ws();
    if (pos_ >= text_.size()) fail("value");
    char c = text_[pos_];
    if (c == '(') {
      advance();
      std::vector<Value> items;
      while (true) {
        skip_ws();
        if (pos_ >= text_.size()) fail("')'");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        items.push_back(read());
      }
      return Value::tuple(std::move(items));
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      if (c == '-') advance();
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("digit");
      }
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      std::int64_t n = 0;
      auto res = std::from_chars(text_.data() + start, text_.data() + pos_, n);
      if (res.ec != std::errc()) fail("integer in range");
      return Value::integer(n);
    }
    if (symbol_char(c, true)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && symbol_char(text_[pos_], false)) advance();
      return Value::symbol(text_.substr(start, pos_ - start));
    }
    fail("value");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& expected) { throw ParseError(line_, col_, expected); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

Value Value::parse(std::string_view text) { return SexpReader(text).read_all(); }

Value int_range(std::int64_t lo, std::int64_t hi) {
  std::vector<Value> xs;
  for (std::int64_t i = lo; i < hi; ++i) xs.push_back(Value::integer(i));
  return Value::tuple(std::move(xs));
}

}  // namespace ctree
