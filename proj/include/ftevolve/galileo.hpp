#pragma once

// Plain-text fault tree files, a subset of the Galileo format:
//
//   toplevel "T";
//   "T" or "G1" "G2";
//   "G1" and "B1" "B2";
//   "G2" 2of3 "B3" "B4" "B5";
//   "B1" prob=0.25;
//
// One statement per line, ';'-terminated, '//' comments, names restricted
// to [A-Za-z0-9_]+.  The toplevel statement comes first and appears once.
// Any referenced name without a gate definition is a basic event.

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"

namespace ftevolve {

namespace detail {

struct Token {
  enum Type { Name, Word, Semicolon } type;  // Name was quoted, Word was bare
  std::string text;
  int column;
};

inline std::vector<Token> tokenize_line(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      out.push_back({Token::Semicolon, ";", static_cast<int>(i) + 1});
      ++i;
    } else if (c == '"') {
      std::size_t start = i++;
      std::string name;
      while (i < line.size() && line[i] != '"') name += line[i++];
      if (i == line.size())
        throw parse_error("unterminated quote", line_no, static_cast<int>(start) + 1);
      ++i;
      if (!valid_name(name))
        throw parse_error("invalid name \"" + name + "\"", line_no, static_cast<int>(start) + 1);
      out.push_back({Token::Name, std::move(name), static_cast<int>(start) + 1});
    } else {
      std::size_t start = i;
      std::string word;
      while (i < line.size() && line[i] != ';' && line[i] != '"' &&
             !std::isspace(static_cast<unsigned char>(line[i])))
        word += line[i++];
      out.push_back({Token::Word, std::move(word), static_cast<int>(start) + 1});
    }
  }
  return out;
}

// Parses "<k>of<N>"; returns false when the word is not of that shape.
inline bool parse_kofn(const std::string& word, long& k, long& n) {
  std::size_t pos = word.find("of");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= word.size()) return false;
  std::string ks = word.substr(0, pos), ns = word.substr(pos + 2);
  for (char c : ks)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  for (char c : ns)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  k = std::strtol(ks.c_str(), nullptr, 10);
  n = std::strtol(ns.c_str(), nullptr, 10);
  return true;
}

}  // namespace detail

inline std::string serialize(const FaultTree& ft) {
  std::string out = "toplevel \"" + ft.top + "\";\n";
  for (const auto& [id, g] : ft.gates) {
    out += '"' + id + "\" " + kind_text(g.kind, g.inputs.size());
    for (const auto& in : g.inputs) out += " \"" + in + '"';
    out += ";\n";
  }
  for (const auto& [be, p] : ft.be_probabilities)
    out += '"' + be + "\" prob=" + detail::format_double(p) + ";\n";
  return out;
}

inline FaultTree parse_galileo(std::string_view text) {
  using detail::Token;

  FaultTree ft;
  bool have_top = false;
  int top_line = 0;
  std::map<NodeId, int> gate_line;             // for cycle reporting
  std::vector<std::pair<NodeId, int>> prob_at;  // name, line

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                    : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto c = line.find("//"); c != std::string::npos) line.resize(c);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();

    std::vector<Token> toks = detail::tokenize_line(line, line_no);
    if (toks.empty()) continue;
    if (toks.back().type != Token::Semicolon)
      throw parse_error("statement does not end with ';'", line_no,
                        static_cast<int>(line.size()) + 1);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i)
      if (toks[i].type == Token::Semicolon)
        throw parse_error("unexpected ';' inside statement", line_no, toks[i].column);
    toks.pop_back();
    if (toks.empty()) throw parse_error("empty statement", line_no, 1);

    if (toks[0].type == Token::Word && toks[0].text == "toplevel") {
      if (have_top) throw parse_error("duplicate toplevel statement", line_no, toks[0].column);
      if (!gate_line.empty() || !prob_at.empty())
        throw parse_error("toplevel must be the first statement", line_no, toks[0].column);
      if (toks.size() != 2 || toks[1].type != Token::Name)
        throw parse_error("expected: toplevel \"<name>\";", line_no, toks[0].column);
      ft.top = toks[1].text;
      have_top = true;
      top_line = line_no;
      continue;
    }

    if (!have_top)
      throw parse_error("first statement must be: toplevel \"<name>\";", line_no, toks[0].column);
    if (toks[0].type != Token::Name)
      throw parse_error("expected a quoted name", line_no, toks[0].column);
    if (toks.size() < 2 || toks[1].type != Token::Word)
      throw parse_error("expected a gate kind or prob=<value> after the name", line_no,
                        toks.size() < 2 ? toks[0].column : toks[1].column);

    const std::string& name = toks[0].text;
    const std::string& word = toks[1].text;

    if (word.rfind("prob=", 0) == 0) {
      if (toks.size() != 2)
        throw parse_error("unexpected tokens after probability", line_no, toks[2].column);
      const std::string num = word.substr(5);
      const char* begin = num.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (num.empty() || end != begin + num.size())
        throw parse_error("malformed probability \"" + num + "\"", line_no, toks[1].column);
      if (!(v >= 0.0 && v <= 1.0))
        throw parse_error("probability " + num + " outside [0,1]", line_no, toks[1].column);
      if (ft.be_probabilities.count(name))
        throw parse_error("duplicate probability for \"" + name + "\"", line_no, toks[0].column);
      ft.be_probabilities[name] = v;
      prob_at.push_back({name, line_no});
      continue;
    }

    GateKind kind;
    long k = 0, n = 0;
    if (word == "and") {
      kind = GateKind::and_gate();
    } else if (word == "or") {
      kind = GateKind::or_gate();
    } else if (detail::parse_kofn(word, k, n)) {
      kind = GateKind::at_least(static_cast<int>(k));
    } else {
      throw parse_error("unknown gate kind \"" + word + "\"", line_no, toks[1].column);
    }

    Gate g;
    g.output = name;
    g.kind = kind;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i].type != Token::Name)
        throw parse_error("expected a quoted input name", line_no, toks[i].column);
      if (g.has_input(toks[i].text))
        throw parse_error("duplicate input \"" + toks[i].text + "\"", line_no, toks[i].column);
      g.add_input(toks[i].text);
    }
    if (g.inputs.empty())
      throw parse_error("gate \"" + name + "\" needs at least one input", line_no,
                        toks[1].column);
    if (kind.op == GateOp::AtLeast && n != static_cast<long>(g.inputs.size()))
      throw parse_error("gate \"" + name + "\" declares " + std::to_string(n) +
                            " inputs but lists " + std::to_string(g.inputs.size()),
                        line_no, toks[1].column);
    if (ft.gates.count(name))
      throw parse_error("duplicate definition of gate \"" + name + "\"", line_no, toks[0].column);
    gate_line[name] = line_no;
    ft.gates.emplace(name, std::move(g));
  }

  if (!have_top) throw parse_error("missing toplevel statement", 0, 0);

  // Names referenced as inputs but never defined as gates are basic events.
  for (const auto& [id, g] : ft.gates)
    for (const auto& in : g.inputs)
      if (!ft.is_gate(in)) ft.basic_events.insert(in);

  if (!ft.is_gate(ft.top))
    throw parse_error("toplevel references undefined gate \"" + ft.top + "\"", top_line, 0);

  for (const auto& [name, line] : prob_at) {
    if (ft.is_gate(name))
      throw parse_error("probability assigned to gate \"" + name + "\"", line, 0);
    if (!ft.is_basic_event(name))
      throw parse_error("probability references undefined node \"" + name + "\"", line, 0);
  }

  // Anything still wrong at this point (cycles, cardinality out of range,
  // unreachable definitions) violates a FaultTree invariant; parsed trees
  // must always validate cleanly.
  for (const Violation& v : validate(ft)) {
    auto it = gate_line.find(v.node);
    throw parse_error(v.message, it == gate_line.end() ? 0 : it->second, 0);
  }

  return ft;
}

}  // namespace ftevolve
