#include "snpkit/guard.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>

#include "snpkit/errors.hpp"

namespace snpkit {

namespace {

int add_node(std::vector<GuardNode>& nodes, GuardOp op, int left = -1, int right = -1) {
  nodes.push_back({op, left, right});
  return static_cast<int>(nodes.size()) - 1;
}

// Appends the other arena and returns the translated root.
int graft(std::vector<GuardNode>& nodes, const UnaryGuard& other) {
  const int offset = static_cast<int>(nodes.size());
  for (const GuardNode& n : other.nodes()) {
    GuardNode copy = n;
    if (copy.left >= 0) copy.left += offset;
    if (copy.right >= 0) copy.right += offset;
    nodes.push_back(copy);
  }
  return other.root() + offset;
}

}  // namespace

UnaryGuard::UnaryGuard() {
  root_ = add_node(nodes_, GuardOp::Lambda);
}

UnaryGuard UnaryGuard::lambda() { return UnaryGuard{}; }

UnaryGuard UnaryGuard::literal() {
  UnaryGuard g;
  g.nodes_.clear();
  g.root_ = add_node(g.nodes_, GuardOp::Literal);
  return g;
}

UnaryGuard UnaryGuard::exact_power(long n) {
  if (n < 0) throw Error("a^n requires n >= 0");
  if (n == 0) return lambda();
  UnaryGuard g;
  g.nodes_.clear();
  int root = add_node(g.nodes_, GuardOp::Literal);
  for (long i = 1; i < n; ++i) {
    int lit = add_node(g.nodes_, GuardOp::Literal);
    root = add_node(g.nodes_, GuardOp::Concat, root, lit);
  }
  g.root_ = root;
  return g;
}

UnaryGuard UnaryGuard::any_positive() { return plus_of(literal()); }

UnaryGuard UnaryGuard::union_of(const UnaryGuard& a, const UnaryGuard& b) {
  UnaryGuard g;
  g.nodes_.clear();
  int left = graft(g.nodes_, a);
  int right = graft(g.nodes_, b);
  g.root_ = add_node(g.nodes_, GuardOp::Union, left, right);
  return g;
}

UnaryGuard UnaryGuard::concat_of(const UnaryGuard& a, const UnaryGuard& b) {
  UnaryGuard g;
  g.nodes_.clear();
  int left = graft(g.nodes_, a);
  int right = graft(g.nodes_, b);
  g.root_ = add_node(g.nodes_, GuardOp::Concat, left, right);
  return g;
}

UnaryGuard UnaryGuard::plus_of(const UnaryGuard& a) {
  UnaryGuard g;
  g.nodes_.clear();
  int child = graft(g.nodes_, a);
  g.root_ = add_node(g.nodes_, GuardOp::Plus, child);
  return g;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

struct MemoTable {
  // key = node * 2^32 + k; value cached as 0/1
  std::unordered_map<std::uint64_t, bool> cells;
};

bool contains_rec(const std::vector<GuardNode>& nodes, int node, long k, MemoTable& memo) {
  const std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint64_t>(k);
  auto it = memo.cells.find(key);
  if (it != memo.cells.end()) return it->second;

  const GuardNode& n = nodes[static_cast<size_t>(node)];
  bool result = false;
  switch (n.op) {
    case GuardOp::Lambda:
      result = (k == 0);
      break;
    case GuardOp::Literal:
      result = (k == 1);
      break;
    case GuardOp::Union:
      result = contains_rec(nodes, n.left, k, memo) || contains_rec(nodes, n.right, k, memo);
      break;
    case GuardOp::Concat:
      for (long j = 0; j <= k && !result; ++j)
        result = contains_rec(nodes, n.left, j, memo) && contains_rec(nodes, n.right, k - j, memo);
      break;
    case GuardOp::Plus:
      if (k == 0) {
        result = contains_rec(nodes, n.left, 0, memo);
      } else {
        // first part j >= 1, remainder again in the closure
        for (long j = 1; j <= k && !result; ++j)
          result = contains_rec(nodes, n.left, j, memo) &&
                   (j == k || contains_rec(nodes, node, k - j, memo));
      }
      break;
  }
  memo.cells.emplace(key, result);
  return result;
}

}  // namespace

bool UnaryGuard::contains(long k) const {
  if (k < 0) return false;
  MemoTable memo;
  return contains_rec(nodes_, root_, k, memo);
}

bool guard_contains(const UnaryGuard& guard, long k) { return guard.contains(k); }

// ---------------------------------------------------------------------------
// Normalization via the expression's automaton

namespace {

struct Nfa {
  struct State {
    std::vector<int> eps;
    int on_a = -1;
  };
  std::vector<State> states;
  int start = 0;
  int accept = 0;

  int fresh() {
    states.push_back({});
    return static_cast<int>(states.size()) - 1;
  }
};

std::pair<int, int> thompson(const std::vector<GuardNode>& nodes, int node, Nfa& nfa) {
  const GuardNode& n = nodes[static_cast<size_t>(node)];
  switch (n.op) {
    case GuardOp::Lambda: {
      int s = nfa.fresh(), t = nfa.fresh();
      nfa.states[s].eps.push_back(t);
      return {s, t};
    }
    case GuardOp::Literal: {
      int s = nfa.fresh(), t = nfa.fresh();
      nfa.states[s].on_a = t;
      return {s, t};
    }
    case GuardOp::Union: {
      auto [ls, lt] = thompson(nodes, n.left, nfa);
      auto [rs, rt] = thompson(nodes, n.right, nfa);
      int s = nfa.fresh(), t = nfa.fresh();
      nfa.states[s].eps.push_back(ls);
      nfa.states[s].eps.push_back(rs);
      nfa.states[lt].eps.push_back(t);
      nfa.states[rt].eps.push_back(t);
      return {s, t};
    }
    case GuardOp::Concat: {
      auto [ls, lt] = thompson(nodes, n.left, nfa);
      auto [rs, rt] = thompson(nodes, n.right, nfa);
      nfa.states[lt].eps.push_back(rs);
      return {ls, rt};
    }
    case GuardOp::Plus: {
      auto [cs, ct] = thompson(nodes, n.left, nfa);
      int s = nfa.fresh(), t = nfa.fresh();
      nfa.states[s].eps.push_back(cs);
      nfa.states[ct].eps.push_back(t);
      nfa.states[ct].eps.push_back(cs);
      return {s, t};
    }
  }
  throw Error("unreachable guard node kind");
}

std::vector<int> eps_closure(const Nfa& nfa, std::vector<int> set) {
  std::vector<bool> seen(nfa.states.size(), false);
  std::vector<int> stack = set;
  for (int s : set) seen[static_cast<size_t>(s)] = true;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : nfa.states[static_cast<size_t>(s)].eps) {
      if (!seen[static_cast<size_t>(t)]) {
        seen[static_cast<size_t>(t)] = true;
        set.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
  return set;
}

}  // namespace

std::vector<Progression> UnaryGuard::normalize() const {
  Nfa nfa;
  auto [start, accept] = thompson(nodes_, root_, nfa);
  nfa.start = start;
  nfa.accept = accept;

  // The reachable-subset sequence S_0, S_1, ... over a one-letter alphabet is
  // eventually periodic; walk it until the first repeat.
  std::map<std::vector<int>, long> seen;
  std::vector<char> member;  // member[k]: does the guard accept count k
  std::vector<int> current = eps_closure(nfa, {nfa.start});
  long preperiod = -1, period = -1;
  for (long k = 0;; ++k) {
    auto it = seen.find(current);
    if (it != seen.end()) {
      preperiod = it->second;
      period = k - it->second;
      break;
    }
    seen.emplace(current, k);
    member.push_back(std::binary_search(current.begin(), current.end(), nfa.accept) ? 1 : 0);
    std::vector<int> moved;
    for (int s : current) {
      int t = nfa.states[static_cast<size_t>(s)].on_a;
      if (t >= 0) moved.push_back(t);
    }
    current = eps_closure(nfa, moved);
    if (k > 1'000'000) throw Error("guard automaton did not cycle");
  }

  // Minimize the period over its divisors, then pull the preperiod back.
  long p = period;
  for (long cand = 1; cand <= period; ++cand) {
    if (period % cand != 0) continue;
    bool ok = true;
    for (long r = 0; r < period && ok; ++r)
      ok = member[static_cast<size_t>(preperiod + r)] ==
           member[static_cast<size_t>(preperiod + (r % cand))];
    if (ok) {
      p = cand;
      break;
    }
  }
  long ell = preperiod;
  while (ell > 0 && member[static_cast<size_t>(ell - 1)] == member[static_cast<size_t>(ell - 1 + p)])
    --ell;

  std::vector<Progression> out;
  for (long k = 0; k < ell; ++k)
    if (member[static_cast<size_t>(k)]) out.push_back({k, 0});
  for (long r = 0; r < p; ++r)
    if (member[static_cast<size_t>(ell + r)]) out.push_back({ell + r, p});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Progression> normalize_guard(const UnaryGuard& guard) { return guard.normalize(); }

// ---------------------------------------------------------------------------
// Structure helpers and printing

namespace {

// Length of a left-leaning literal chain rooted at node, or -1.
long canonical_chain_length(const std::vector<GuardNode>& nodes, int node) {
  const GuardNode& n = nodes[static_cast<size_t>(node)];
  if (n.op == GuardOp::Literal) return 1;
  if (n.op != GuardOp::Concat) return -1;
  if (nodes[static_cast<size_t>(n.right)].op != GuardOp::Literal) return -1;
  long left = canonical_chain_length(nodes, n.left);
  return left < 0 ? -1 : left + 1;
}

std::string power_text(long n) { return n == 1 ? "a" : "a^" + std::to_string(n); }

// prec: Union 0, Concat 1, Plus 2, atoms 3.
int node_prec(const std::vector<GuardNode>& nodes, int node) {
  switch (nodes[static_cast<size_t>(node)].op) {
    case GuardOp::Union:
      return 0;
    case GuardOp::Concat:
      return 1;
    case GuardOp::Plus:
      return 2;
    default:
      return 3;
  }
}

std::string print_node(const std::vector<GuardNode>& nodes, int node, int min_prec) {
  const GuardNode& n = nodes[static_cast<size_t>(node)];

  // a* sugar: Union(Plus(X), Lambda)
  if (n.op == GuardOp::Union && nodes[static_cast<size_t>(n.left)].op == GuardOp::Plus &&
      nodes[static_cast<size_t>(n.right)].op == GuardOp::Lambda) {
    int child = nodes[static_cast<size_t>(n.left)].left;
    std::string inner = print_node(nodes, child, 3);
    if (node_prec(nodes, child) < 3) inner = "(" + inner + ")";
    std::string text = inner + "*";
    return min_prec > 2 ? "(" + text + ")" : text;
  }

  long chain = canonical_chain_length(nodes, node);
  if (chain >= 2) {
    // full canonical literal chains print as a^n; reparsing rebuilds the
    // identical left-leaning tree
    return power_text(chain);
  }

  std::string text;
  int prec = node_prec(nodes, node);
  switch (n.op) {
    case GuardOp::Lambda:
      return "lambda";
    case GuardOp::Literal:
      return "a";
    case GuardOp::Union:
      text = print_node(nodes, n.left, 0) + "|" + print_node(nodes, n.right, 1);
      break;
    case GuardOp::Concat:
      text = print_node(nodes, n.left, 1) + print_node(nodes, n.right, 2);
      break;
    case GuardOp::Plus: {
      std::string inner = print_node(nodes, n.left, 3);
      if (node_prec(nodes, n.left) < 3) inner = "(" + inner + ")";
      return min_prec > 2 ? "(" + inner + "+)" : inner + "+";
    }
  }
  if (prec < min_prec) text = "(" + text + ")";
  return text;
}

}  // namespace

bool UnaryGuard::is_canonical_power(long* n) const {
  const GuardNode& r = nodes_[static_cast<size_t>(root_)];
  if (r.op == GuardOp::Lambda) {
    if (n) *n = 0;
    return true;
  }
  long len = canonical_chain_length(nodes_, root_);
  if (len < 0) return false;
  if (n) *n = len;
  return true;
}

std::string UnaryGuard::to_text() const { return print_node(nodes_, root_, 0); }

namespace {

bool equal_rec(const std::vector<GuardNode>& a, int na, const std::vector<GuardNode>& b, int nb) {
  const GuardNode& x = a[static_cast<size_t>(na)];
  const GuardNode& y = b[static_cast<size_t>(nb)];
  if (x.op != y.op) return false;
  switch (x.op) {
    case GuardOp::Lambda:
    case GuardOp::Literal:
      return true;
    case GuardOp::Plus:
      return equal_rec(a, x.left, b, y.left);
    default:
      return equal_rec(a, x.left, b, y.left) && equal_rec(a, x.right, b, y.right);
  }
}

}  // namespace

bool UnaryGuard::operator==(const UnaryGuard& other) const {
  return equal_rec(nodes_, root_, other.nodes_, other.root_);
}

// ---------------------------------------------------------------------------
// Guard parser

class GuardParser {
 public:
  GuardParser(const std::string& text, int line) : text_(text), line_(line) {}

  UnaryGuard parse() {
    UnaryGuard g;
    g.nodes_.clear();
    g.root_ = parse_union(g.nodes_);
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input in guard");
    return g;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool peek_atom() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return c == 'a' || c == '(' || c == 'l' || c == 'L';
  }

  int parse_union(std::vector<GuardNode>& nodes) {
    int left = parse_concat(nodes);
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        int right = parse_concat(nodes);
        left = add_node(nodes, GuardOp::Union, left, right);
      } else {
        return left;
      }
    }
  }

  int parse_concat(std::vector<GuardNode>& nodes) {
    int left = parse_postfix(nodes);
    while (peek_atom()) {
      int right = parse_postfix(nodes);
      left = add_node(nodes, GuardOp::Concat, left, right);
    }
    return left;
  }

  int parse_postfix(std::vector<GuardNode>& nodes) {
    int node = parse_atom(nodes);
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) return node;
      char c = text_[pos_];
      if (c == '+') {
        ++pos_;
        node = add_node(nodes, GuardOp::Plus, node);
      } else if (c == '*') {
        ++pos_;
        int plus = add_node(nodes, GuardOp::Plus, node);
        int lam = add_node(nodes, GuardOp::Lambda);
        node = add_node(nodes, GuardOp::Union, plus, lam);
      } else if (c == '^') {
        ++pos_;
        skip_ws();
        long n = parse_int();
        if (n == 0) {
          node = add_node(nodes, GuardOp::Lambda);
        } else {
          int base = node;
          for (long i = 1; i < n; ++i) {
            int copy = clone(nodes, base);
            node = add_node(nodes, GuardOp::Concat, node, copy);
          }
        }
      } else {
        return node;
      }
    }
  }

  int clone(std::vector<GuardNode>& nodes, int node) {
    const GuardNode n = nodes[static_cast<size_t>(node)];
    switch (n.op) {
      case GuardOp::Lambda:
      case GuardOp::Literal:
        return add_node(nodes, n.op);
      case GuardOp::Plus: {
        int c = clone(nodes, n.left);
        return add_node(nodes, GuardOp::Plus, c);
      }
      default: {
        int l = clone(nodes, n.left);
        int r = clone(nodes, n.right);
        return add_node(nodes, n.op, l, r);
      }
    }
  }

  long parse_int() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected integer exponent");
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1'000'000) fail("exponent too large");
      ++pos_;
    }
    return v;
  }

  int parse_atom(std::vector<GuardNode>& nodes) {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected guard atom");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int node = parse_union(nodes);
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
      ++pos_;
      return node;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string word = text_.substr(start, pos_ - start);
      if (word == "lambda") return add_node(nodes, GuardOp::Lambda);
      bool all_a = !word.empty() && word.find_first_not_of('a') == std::string::npos;
      if (!all_a) {
        pos_ = start;
        fail("unknown symbol '" + word + "' in guard");
      }
      // a run of juxtaposed literals
      int node = add_node(nodes, GuardOp::Literal);
      // a trailing postfix binds to the last literal only, so re-consume all
      // but the final 'a' as plain concatenation and leave the last for the
      // caller's postfix loop
      for (size_t i = 1; i + 1 <= word.size() - 1; ++i) {
        int lit = add_node(nodes, GuardOp::Literal);
        node = add_node(nodes, GuardOp::Concat, node, lit);
      }
      if (word.size() >= 2) {
        // final literal handled here so "aa^2" means a(a^2)
        pos_ = start + word.size() - 1;
      }
      return node;
    }
    fail(std::string("unexpected character '") + c + "' in guard");
  }
};

UnaryGuard parse_guard(const std::string& text, int line) { return GuardParser(text, line).parse(); }

}  // namespace snpkit
