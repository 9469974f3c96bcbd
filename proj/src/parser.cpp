#include "snpkit/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "snpkit/errors.hpp"

namespace snpkit {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

long parse_long(const std::string& s, int line, const std::string& what) {
  if (s.empty()) throw ParseError("expected integer for " + what, line, 1);
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("bad integer '" + s + "' for " + what, line, 1);
  return std::stol(s);
}

std::string power_text(long n) { return n == 1 ? "a" : "a^" + std::to_string(n); }

}  // namespace

Rule parse_rule_text(const std::string& text, int line) {
  size_t arrow = text.find("->");
  if (arrow == std::string::npos) throw ParseError("rule is missing '->'", line, 1);
  std::string lhs = trim(text.substr(0, arrow));
  std::string rhs = trim(text.substr(arrow + 2));

  Rule rule;
  size_t slash = lhs.find('/');
  if (slash != std::string::npos) {
    if (lhs.find('/', slash + 1) != std::string::npos)
      throw ParseError("more than one '/' in rule", line, 1);
    rule.guard = parse_guard(trim(lhs.substr(0, slash)), line);
    UnaryGuard consumed = parse_guard(trim(lhs.substr(slash + 1)), line);
    long c = 0;
    if (!consumed.is_canonical_power(&c) || c < 1)
      throw ParseError("consumed part must be a or a^c with c >= 1", line, 1);
    rule.consumed = c;
  } else {
    rule.guard = parse_guard(lhs, line);
    long c = 0;
    if (!rule.guard.is_canonical_power(&c) || c < 1)
      throw ParseError("rule without E/ prefix must have the form a^c -> ...", line, 1);
    rule.consumed = c;
  }

  std::string emit = rhs;
  size_t semi = rhs.find(';');
  if (semi != std::string::npos) {
    emit = trim(rhs.substr(0, semi));
    rule.delay = static_cast<int>(parse_long(trim(rhs.substr(semi + 1)), line, "delay"));
  }
  if (emit == "lambda") {
    rule.produced = 0;
  } else {
    UnaryGuard prod = parse_guard(emit, line);
    long b = 0;
    if (!prod.is_canonical_power(&b))
      throw ParseError("produced part must be a^b or lambda", line, 1);
    rule.produced = b;
  }
  if (rule.consumed < rule.produced)
    throw ParseError("rule consumes " + std::to_string(rule.consumed) + " but produces " +
                         std::to_string(rule.produced) + " (c >= b required)",
                     line, 1);
  return rule;
}

std::string rule_to_text(const Rule& rule) {
  std::string lhs;
  long n = 0;
  if (rule.guard.is_canonical_power(&n) && n == rule.consumed) {
    lhs = power_text(rule.consumed);
  } else {
    lhs = rule.guard.to_text() + "/" + power_text(rule.consumed);
  }
  std::string out = lhs + " -> " + (rule.produced == 0 ? "lambda" : power_text(rule.produced));
  if (rule.delay > 0) out += "; " + std::to_string(rule.delay);
  return out;
}

SystemDescription parse_system(const std::string& text) {
  SystemDescription sys;
  std::vector<std::tuple<std::string, std::string, int>> synapse_lines;
  std::vector<std::pair<std::string, int>> source_lines, sink_lines;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  int current = -1;
  while (std::getline(in, raw)) {
    ++lineno;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "neuron") {
      std::string id;
      ls >> id;
      if (!valid_id(id)) throw ParseError("bad or missing neuron id", lineno, 1);
      if (sys.index_of(id) >= 0) throw ParseError("duplicate neuron id '" + id + "'", lineno, 1);
      Neuron n;
      n.id = id;
      std::string attr;
      while (ls >> attr) {
        if (attr.rfind("spikes=", 0) == 0) {
          n.initial_spikes = parse_long(attr.substr(7), lineno, "spikes");
        } else {
          throw ParseError("unknown neuron attribute '" + attr + "'", lineno, 1);
        }
      }
      current = sys.add_neuron(std::move(n));
    } else if (word == "rule") {
      if (current < 0) throw ParseError("rule before any neuron", lineno, 1);
      size_t q1 = line.find('"');
      size_t q2 = line.rfind('"');
      if (q1 == std::string::npos || q2 == q1)
        throw ParseError("rule text must be double-quoted", lineno, 1);
      sys.neurons[static_cast<size_t>(current)].rules.push_back(
          parse_rule_text(line.substr(q1 + 1, q2 - q1 - 1), lineno));
    } else if (word == "synapse") {
      std::string from, arrow, to;
      ls >> from >> arrow >> to;
      if (arrow != "->" || !valid_id(from) || !valid_id(to))
        throw ParseError("expected 'synapse <id> -> <id>'", lineno, 1);
      synapse_lines.emplace_back(from, to, lineno);
    } else if (word == "source") {
      std::string id;
      ls >> id;
      if (!valid_id(id)) throw ParseError("bad source id", lineno, 1);
      source_lines.emplace_back(id, lineno);
    } else if (word == "sink") {
      std::string id;
      ls >> id;
      if (!valid_id(id)) throw ParseError("bad sink id", lineno, 1);
      sink_lines.emplace_back(id, lineno);
    } else {
      throw ParseError("unknown directive '" + word + "'", lineno, 1);
    }
  }

  for (auto& [from, to, ln] : synapse_lines) {
    int f = sys.index_of(from), t = sys.index_of(to);
    if (f < 0) throw ParseError("unknown neuron id '" + from + "' in synapse", ln, 1);
    if (t < 0) throw ParseError("unknown neuron id '" + to + "' in synapse", ln, 1);
    if (f == t) throw ParseError("self-loop synapse on '" + from + "'", ln, 1);
    sys.synapses.insert({f, t});
  }
  for (auto& [id, ln] : source_lines) {
    int i = sys.index_of(id);
    if (i < 0) throw ParseError("unknown neuron id '" + id + "' in source", ln, 1);
    if (sys.declared_source && *sys.declared_source != i)
      throw ParseError("more than one source declared", ln, 1);
    sys.declared_source = i;
  }
  for (auto& [id, ln] : sink_lines) {
    int i = sys.index_of(id);
    if (i < 0) throw ParseError("unknown neuron id '" + id + "' in sink", ln, 1);
    sys.declared_sinks.push_back(i);
  }
  return sys;
}

std::string serialize_system(const SystemDescription& sys) {
  std::ostringstream out;
  for (const Neuron& n : sys.neurons) {
    out << "neuron " << n.id;
    if (n.initial_spikes > 0) out << " spikes=" << n.initial_spikes;
    out << "\n";
    for (const Rule& r : n.rules) out << "  rule \"" << rule_to_text(r) << "\"\n";
  }
  for (auto& [f, t] : sys.synapses)
    out << "synapse " << sys.neurons[static_cast<size_t>(f)].id << " -> "
        << sys.neurons[static_cast<size_t>(t)].id << "\n";
  if (sys.declared_source)
    out << "source " << sys.neurons[static_cast<size_t>(*sys.declared_source)].id << "\n";
  for (int s : sys.declared_sinks)
    out << "sink " << sys.neurons[static_cast<size_t>(s)].id << "\n";
  return out.str();
}

std::string substitute(const std::string& text, const std::map<std::string, long>& vars) {
  std::string out;
  out.reserve(text.size());
  int line = 1;
  for (size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '\n') ++line;
    if (c != '$') {
      out += c;
      ++i;
      continue;
    }
    size_t j = i + 1;
    bool braced = j < text.size() && text[j] == '{';
    if (braced) ++j;
    size_t start = j;
    while (j < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
      ++j;
    std::string name = text.substr(start, j - start);
    if (braced) {
      if (j >= text.size() || text[j] != '}')
        throw ParseError("unterminated ${...} substitution", line, static_cast<int>(i + 1));
      ++j;
    }
    if (name.empty())
      throw ParseError("dangling '$' in document", line, static_cast<int>(i + 1));
    auto it = vars.find(name);
    if (it == vars.end())
      throw ParseError("no value set for $" + name + " (use --set " + name + "=<int>)", line,
                       static_cast<int>(i + 1));
    out += std::to_string(it->second);
    i = j;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace snpkit
