#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace snpkit {

// Regular expressions over the one-letter alphabet {a}. Node kinds are the
// constructor set: empty string, the letter itself, union, concatenation and
// positive closure. Star is accepted by the parser as sugar: E* == E+ | lambda.
enum class GuardOp : std::uint8_t { Lambda, Literal, Union, Concat, Plus };

struct GuardNode {
  GuardOp op;
  int left = -1;   // child / left child
  int right = -1;  // right child for Union and Concat
};

// {offset + n*period : n >= 0}; period == 0 denotes the singleton {offset}.
struct Progression {
  long offset = 0;
  long period = 0;

  bool contains(long k) const {
    if (period == 0) return k == offset;
    return k >= offset && (k - offset) % period == 0;
  }
  friend auto operator<=>(const Progression&, const Progression&) = default;
};

class UnaryGuard {
 public:
  UnaryGuard();  // denotes {0}

  static UnaryGuard lambda();
  static UnaryGuard literal();            // denotes {1}
  static UnaryGuard exact_power(long n);  // a^n, n >= 0 (n == 0 is lambda)
  static UnaryGuard any_positive();       // a+
  static UnaryGuard union_of(const UnaryGuard& a, const UnaryGuard& b);
  static UnaryGuard concat_of(const UnaryGuard& a, const UnaryGuard& b);
  static UnaryGuard plus_of(const UnaryGuard& a);

  // Membership of the count k, decided on the expression tree by recursive
  // decomposition with memoization on (subexpression, count). Safe to call
  // concurrently; the memo table is per call.
  bool contains(long k) const;

  // Exact semilinear form: a finite set of progressions whose union equals
  // the denoted set. Computed from the eventually periodic reachable-subset
  // sequence of the expression's automaton, then minimized.
  std::vector<Progression> normalize() const;

  std::string to_text() const;

  // True when the tree is lambda, a single literal, or a left-leaning chain
  // of literal concatenations; *n receives the chain length.
  bool is_canonical_power(long* n = nullptr) const;

  bool operator==(const UnaryGuard& other) const;

  const std::vector<GuardNode>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  std::vector<GuardNode> nodes_;
  int root_ = -1;

  friend UnaryGuard parse_guard(const std::string& text);
  friend class GuardParser;
};

// Parses the guard grammar: lambda, a, a^n, union "|", juxtaposition for
// concatenation, postfix "+" and "*", parentheses. line is reported in
// parse errors when the guard is embedded in a document.
UnaryGuard parse_guard(const std::string& text, int line = 0);

bool guard_contains(const UnaryGuard& guard, long k);
std::vector<Progression> normalize_guard(const UnaryGuard& guard);

}  // namespace snpkit
