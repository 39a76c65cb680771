// Copyright 2026 The GASC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gasc/geoform.hpp"

#include <array>
#include <cctype>
#include <map>
#include <utility>

#include "gasc/error.hpp"

namespace gasc::geoform {

namespace {

using enum ObjectKind;

struct OpInfo {
  std::string_view name;
  std::string_view keyword;
  OpSignature sig;
};

const std::array<OpInfo, 7>& op_table() {
  static const std::array<OpInfo, 7> table = {{
      {"line", "line", {{Point, Point}, Line}},
      {"intersection", "intersection", {{Line, Line}, Point}},
      {"midpoint", "midpoint", {{Point, Point}, Point}},
      {"parallel_through", "parallel", {{Line, Point}, Line}},
      {"perpendicular_through", "perpendicular", {{Line, Point}, Line}},
      {"foot", "foot", {{Point, Line}, Point}},
      {"circle", "circle", {{Point, Point}, Circle}},
  }};
  return table;
}

constexpr std::array<std::pair<std::string_view, std::size_t>, 6> kPredicates = {{
    {"collinear", 3},
    {"parallel", 4},
    {"perpendicular", 4},
    {"midpoint", 3},
    {"equal_distance", 4},
    {"concyclic", 4},
}};

std::string_view kind_name(ObjectKind k) {
  switch (k) {
    case Point: return "point";
    case Line: return "line";
    case Circle: return "circle";
  }
  return "?";
}

// Name -> kind, filled in definition order. Shared by both readers so the
// text and exchange forms enforce identical invariants.
class Scope {
 public:
  void define(const std::string& name, ObjectKind kind,
              std::optional<SourceLocation> at, std::string_view path = {}) {
    if (!is_valid_identifier(name)) {
      throw Error(ErrorCode::SyntaxError, with_path("bad name '" + name + "'", path), at);
    }
    if (!names_.emplace(name, kind).second) {
      throw Error(ErrorCode::Redefinition, with_path(name, path), at);
    }
  }

  void resolve(const std::string& name, ObjectKind expected,
               std::optional<SourceLocation> at, std::string_view path = {}) const {
    auto it = names_.find(name);
    if (it == names_.end()) {
      throw Error(ErrorCode::UndefinedName, with_path(name, path), at);
    }
    if (it->second != expected) {
      throw Error(ErrorCode::KindError,
                  with_path(name + " is a " + std::string(kind_name(it->second)) +
                                ", expected a " + std::string(kind_name(expected)),
                            path),
                  at);
    }
  }

 private:
  static std::string with_path(std::string msg, std::string_view path) {
    if (path.empty()) return msg;
    return msg + " (" + std::string(path) + ")";
  }

  std::map<std::string, ObjectKind, std::less<>> names_;
};

// ---------------------------------------------------------------------------
// Text dialect

enum class Tok { Ident, Number, LBrace, RBrace, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLocation at;
};

bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}
bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    i += n;
    col += static_cast<int>(n);
  };
  while (i < src.size()) {
    char c = src[i];
    SourceLocation at{line, col};
    if (c == '\n') {
      out.push_back({Tok::Newline, "\n", at});
      ++i;
      ++line;
      col = 1;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
    } else if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (c == '{' || c == '}') {
      out.push_back({c == '{' ? Tok::LBrace : Tok::RBrace, std::string(1, c), at});
      advance(1);
    } else if (ident_start(c)) {
      // '_' only occurs in keywords (equal_distance); names reject it later
      std::size_t j = i;
      while (j < src.size() && (ident_char(src[j]) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), at});
      advance(j - i);
    } else if (digit(c) || (c == '-' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && digit(src[j])) ++j;
      if (j + 1 < src.size() && src[j] == '.' && digit(src[j + 1])) {
        j += 1;
        while (j < src.size() && digit(src[j])) ++j;
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), at});
      advance(j - i);
    } else {
      std::string shown;
      auto uc = static_cast<unsigned char>(c);
      if (std::isprint(uc)) {
        shown = std::string("'") + c + "'";
      } else {
        static constexpr char kHex[] = "0123456789abcdef";
        shown = std::string("byte 0x") + kHex[uc >> 4] + kHex[uc & 0xF];
      }
      throw Error(ErrorCode::LexError, "unknown token " + shown, at);
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class TextParser {
 public:
  explicit TextParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  GeoProblem parse() {
    GeoProblem p;
    bool any_statement = false;
    bool have_conjecture = false;
    for (;;) {
      skip_newlines();
      const Token& head = toks_[pos_];
      if (head.kind == Tok::End) break;
      if (have_conjecture) {
        throw Error(ErrorCode::SyntaxError, "statement after the prove block", head.at);
      }
      if (head.kind != Tok::Ident) {
        throw Error(ErrorCode::SyntaxError, "expected a command, got '" + head.text + "'",
                    head.at);
      }
      ++pos_;
      if (head.text == "problem") {
        if (any_statement) {
          throw Error(ErrorCode::SyntaxError, "problem header must come first", head.at);
        }
        auto operands = rest_of_line();
        expect_count(head, operands, 1);
        expect_ident(operands[0]);
        if (!is_valid_problem_id(operands[0].text)) {
          throw Error(ErrorCode::InvalidId, operands[0].text, operands[0].at);
        }
        p.id = operands[0].text;
      } else if (head.text == "point") {
        auto operands = rest_of_line();
        expect_count(head, operands, 3);
        expect_ident(operands[0]);
        expect_number(operands[1]);
        expect_number(operands[2]);
        scope_.define(operands[0].text, Point, operands[0].at);
        p.construction.free_points.push_back(
            {operands[0].text, operands[1].text, operands[2].text});
      } else if (auto op = op_from_keyword(head.text)) {
        const auto& sig = signature(*op);
        auto operands = rest_of_line();
        expect_count(head, operands, sig.args.size() + 1);
        for (const auto& t : operands) expect_ident(t);
        Step step{*op, {}, {operands[0].text}};
        for (std::size_t k = 0; k < sig.args.size(); ++k) {
          const auto& t = operands[k + 1];
          scope_.resolve(t.text, sig.args[k], t.at);
          step.args.push_back(t.text);
        }
        scope_.define(operands[0].text, sig.result, operands[0].at);
        p.construction.steps.push_back(std::move(step));
      } else if (head.text == "prove") {
        p.conjecture = parse_prove(head);
        have_conjecture = true;
      } else {
        throw Error(ErrorCode::SyntaxError, "unknown command '" + head.text + "'", head.at);
      }
      any_statement = true;
    }
    if (!have_conjecture) {
      throw Error(ErrorCode::MissingConjecture, "no prove { ... } block", toks_[pos_].at);
    }
    return p;
  }

 private:
  void skip_newlines() {
    while (toks_[pos_].kind == Tok::Newline) ++pos_;
  }

  std::vector<Token> rest_of_line() {
    std::vector<Token> out;
    while (toks_[pos_].kind != Tok::Newline && toks_[pos_].kind != Tok::End) {
      out.push_back(toks_[pos_++]);
    }
    return out;
  }

  static void expect_count(const Token& head, const std::vector<Token>& operands,
                           std::size_t n) {
    if (operands.size() != n) {
      throw Error(ErrorCode::ArityError,
                  "'" + head.text + "' takes " + std::to_string(n) + " operands, got " +
                      std::to_string(operands.size()),
                  head.at);
    }
  }

  static void expect_ident(const Token& t) {
    if (t.kind != Tok::Ident) {
      throw Error(ErrorCode::SyntaxError, "expected a name, got '" + t.text + "'", t.at);
    }
  }

  static void expect_number(const Token& t) {
    if (t.kind != Tok::Number) {
      throw Error(ErrorCode::SyntaxError, "expected a number, got '" + t.text + "'", t.at);
    }
  }

  Conjecture parse_prove(const Token& head) {
    skip_newlines();
    if (toks_[pos_].kind != Tok::LBrace) {
      throw Error(ErrorCode::SyntaxError, "expected '{' after prove", toks_[pos_].at);
    }
    ++pos_;
    std::vector<Token> body;
    for (;;) {
      skip_newlines();
      const Token& t = toks_[pos_];
      if (t.kind == Tok::End) {
        throw Error(ErrorCode::SyntaxError, "unterminated prove block", head.at);
      }
      ++pos_;
      if (t.kind == Tok::RBrace) break;
      body.push_back(t);
    }
    auto rest = rest_of_line();
    if (!rest.empty()) {
      throw Error(ErrorCode::SyntaxError, "unexpected '" + rest[0].text + "'", rest[0].at);
    }
    if (body.empty()) {
      throw Error(ErrorCode::SyntaxError, "empty prove block", head.at);
    }
    expect_ident(body[0]);
    auto pred = predicate_from_name(body[0].text);
    if (!pred) {
      throw Error(ErrorCode::SyntaxError, "unknown predicate '" + body[0].text + "'",
                  body[0].at);
    }
    if (body.size() - 1 != arity(*pred)) {
      throw Error(ErrorCode::ArityError,
                  "'" + body[0].text + "' takes " + std::to_string(arity(*pred)) +
                      " points, got " + std::to_string(body.size() - 1),
                  body[0].at);
    }
    Conjecture c{*pred, {}};
    for (std::size_t k = 1; k < body.size(); ++k) {
      expect_ident(body[k]);
      scope_.resolve(body[k].text, Point, body[k].at);
      c.args.push_back(body[k].text);
    }
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Scope scope_;
};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exchange document

[[noreturn]] void schema_error(const std::string& path) {
  throw Error(ErrorCode::SchemaError, path);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path);
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_string()) schema_error(path);
  return v.get<std::string>();
}

std::string coordinate(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  std::string literal;
  if (v.is_string()) {
    literal = v.get<std::string>();
  } else if (v.is_number()) {
    literal = v.dump();
  } else {
    schema_error(path);
  }
  if (!is_valid_decimal(literal)) schema_error(path);
  return literal;
}

std::vector<std::string> name_list(const Json& obj, const char* key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_array()) schema_error(path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) schema_error(path + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

std::string ggb_args(const std::vector<std::string>& a) { return join(a, ", "); }

}  // namespace

const OpSignature& signature(StepOp op) {
  return op_table()[static_cast<std::size_t>(op)].sig;
}

std::size_t arity(Predicate p) { return kPredicates[static_cast<std::size_t>(p)].second; }

std::string_view op_name(StepOp op) { return op_table()[static_cast<std::size_t>(op)].name; }

std::optional<StepOp> op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < op_table().size(); ++i) {
    if (op_table()[i].name == name) return static_cast<StepOp>(i);
  }
  return std::nullopt;
}

std::string_view op_keyword(StepOp op) {
  return op_table()[static_cast<std::size_t>(op)].keyword;
}

std::optional<StepOp> op_from_keyword(std::string_view kw) {
  if (kw == "intersec") return StepOp::Intersection;  // GCLC spelling
  for (std::size_t i = 0; i < op_table().size(); ++i) {
    if (op_table()[i].keyword == kw) return static_cast<StepOp>(i);
  }
  return std::nullopt;
}

std::string_view predicate_name(Predicate p) {
  return kPredicates[static_cast<std::size_t>(p)].first;
}

std::optional<Predicate> predicate_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPredicates.size(); ++i) {
    if (kPredicates[i].first == name) return static_cast<Predicate>(i);
  }
  return std::nullopt;
}

bool is_valid_identifier(std::string_view name) {
  if (name.empty() || !ident_start(name[0])) return false;
  for (char c : name) {
    if (!ident_char(c)) return false;
  }
  return true;
}

bool is_valid_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t start = i;
  while (i < s.size() && digit(s[i])) ++i;
  if (i == start) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  ++i;
  start = i;
  while (i < s.size() && digit(s[i])) ++i;
  return i > start && i == s.size();
}

bool is_valid_problem_id(std::string_view id) {
  if (id.size() != 7 || id.substr(0, 3) != "GEO") return false;
  for (char c : id.substr(3)) {
    if (!digit(c)) return false;
  }
  return true;
}

void validate(const GeoProblem& p) {
  if (!p.id.empty() && !is_valid_problem_id(p.id)) throw Error(ErrorCode::InvalidId, p.id);
  Scope scope;
  for (const auto& fp : p.construction.free_points) {
    if (!is_valid_decimal(fp.x) || !is_valid_decimal(fp.y)) {
      throw Error(ErrorCode::SyntaxError, "bad coordinate for " + fp.name);
    }
    scope.define(fp.name, Point, std::nullopt);
  }
  for (const auto& step : p.construction.steps) {
    const auto& sig = signature(step.op);
    if (step.args.size() != sig.args.size() || step.out.size() != 1) {
      throw Error(ErrorCode::ArityError, std::string(op_name(step.op)));
    }
    for (std::size_t k = 0; k < sig.args.size(); ++k) {
      scope.resolve(step.args[k], sig.args[k], std::nullopt);
    }
    scope.define(step.out[0], sig.result, std::nullopt);
  }
  if (p.conjecture.args.size() != arity(p.conjecture.predicate)) {
    throw Error(ErrorCode::ArityError, std::string(predicate_name(p.conjecture.predicate)));
  }
  for (const auto& a : p.conjecture.args) scope.resolve(a, Point, std::nullopt);
}

GeoProblem parse_gclc_subset(std::string_view text) {
  TextParser parser(lex(text));
  return parser.parse();
}

std::string emit_gclc(const GeoProblem& p) {
  std::string out;
  if (!p.id.empty()) out += "problem " + p.id + "\n";
  for (const auto& fp : p.construction.free_points) {
    out += "point " + fp.name + " " + fp.x + " " + fp.y + "\n";
  }
  for (const auto& s : p.construction.steps) {
    out += std::string(op_keyword(s.op)) + " " + s.out[0] + " " + join(s.args, " ") + "\n";
  }
  out += "prove { " + std::string(predicate_name(p.conjecture.predicate)) + " " +
         join(p.conjecture.args, " ") + " }\n";
  return out;
}

std::string emit_ggb_script(const GeoProblem& p) {
  std::string out;
  for (const auto& fp : p.construction.free_points) {
    out += fp.name + " = (" + fp.x + ", " + fp.y + ")\n";
  }
  for (const auto& s : p.construction.steps) {
    const auto& a = s.args;
    std::string rhs;
    switch (s.op) {
      case StepOp::Line: rhs = "Line(" + ggb_args(a) + ")"; break;
      case StepOp::Intersection: rhs = "Intersect(" + ggb_args(a) + ")"; break;
      case StepOp::Midpoint: rhs = "Midpoint(" + ggb_args(a) + ")"; break;
      case StepOp::ParallelThrough: rhs = "Line(" + a[1] + ", " + a[0] + ")"; break;
      case StepOp::PerpendicularThrough:
        rhs = "PerpendicularLine(" + a[1] + ", " + a[0] + ")";
        break;
      case StepOp::Foot: rhs = "ClosestPoint(" + a[1] + ", " + a[0] + ")"; break;
      case StepOp::Circle: rhs = "Circle(" + ggb_args(a) + ")"; break;
    }
    out += s.out[0] + " = " + rhs + "\n";
  }
  const auto& c = p.conjecture.args;
  std::string statement;
  switch (p.conjecture.predicate) {
    case Predicate::Collinear: statement = "AreCollinear(" + ggb_args(c) + ")"; break;
    case Predicate::Parallel:
      statement = "AreParallel(Line(" + c[0] + ", " + c[1] + "), Line(" + c[2] + ", " + c[3] + "))";
      break;
    case Predicate::Perpendicular:
      statement =
          "ArePerpendicular(Line(" + c[0] + ", " + c[1] + "), Line(" + c[2] + ", " + c[3] + "))";
      break;
    case Predicate::Midpoint:
      statement = "AreEqual(" + c[0] + ", Midpoint(" + c[1] + ", " + c[2] + "))";
      break;
    case Predicate::EqualDistance:
      statement = "AreEqual(Distance(" + c[0] + ", " + c[1] + "), Distance(" + c[2] + ", " +
                  c[3] + "))";
      break;
    case Predicate::Concyclic: statement = "AreConcyclic(" + ggb_args(c) + ")"; break;
  }
  out += "Prove(" + statement + ")\n";
  return out;
}

GeoProblem read_exchange(const Json& doc) {
  if (!doc.is_object()) schema_error("(document)");
  GeoProblem p;
  p.id = string_field(doc, "id", "id");
  if (!p.id.empty() && !is_valid_problem_id(p.id)) throw Error(ErrorCode::InvalidId, p.id);

  Scope scope;
  const Json& fps = field(doc, "free_points", "free_points");
  if (!fps.is_array()) schema_error("free_points");
  for (std::size_t i = 0; i < fps.size(); ++i) {
    std::string path = "free_points[" + std::to_string(i) + "]";
    if (!fps[i].is_object()) schema_error(path);
    FreePoint fp{string_field(fps[i], "name", path + ".name"),
                 coordinate(fps[i], "x", path + ".x"), coordinate(fps[i], "y", path + ".y")};
    scope.define(fp.name, Point, std::nullopt, path + ".name");
    p.construction.free_points.push_back(std::move(fp));
  }

  const Json& steps = field(doc, "steps", "steps");
  if (!steps.is_array()) schema_error("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string path = "steps[" + std::to_string(i) + "]";
    if (!steps[i].is_object()) schema_error(path);
    auto op = op_from_name(string_field(steps[i], "op", path + ".op"));
    if (!op) schema_error(path + ".op");
    Step step{*op, name_list(steps[i], "args", path + ".args"),
              name_list(steps[i], "out", path + ".out")};
    const auto& sig = signature(*op);
    if (step.args.size() != sig.args.size()) {
      throw Error(ErrorCode::ArityError, path + ".args");
    }
    if (step.out.size() != 1) throw Error(ErrorCode::ArityError, path + ".out");
    for (std::size_t k = 0; k < sig.args.size(); ++k) {
      scope.resolve(step.args[k], sig.args[k], std::nullopt,
                    path + ".args[" + std::to_string(k) + "]");
    }
    scope.define(step.out[0], sig.result, std::nullopt, path + ".out[0]");
    p.construction.steps.push_back(std::move(step));
  }

  const Json& conj = field(doc, "conjecture", "conjecture");
  if (!conj.is_object()) schema_error("conjecture");
  auto pred = predicate_from_name(string_field(conj, "predicate", "conjecture.predicate"));
  if (!pred) schema_error("conjecture.predicate");
  p.conjecture = {*pred, name_list(conj, "args", "conjecture.args")};
  if (p.conjecture.args.size() != arity(*pred)) {
    throw Error(ErrorCode::ArityError, "conjecture.args");
  }
  for (std::size_t k = 0; k < p.conjecture.args.size(); ++k) {
    scope.resolve(p.conjecture.args[k], Point, std::nullopt,
                  "conjecture.args[" + std::to_string(k) + "]");
  }
  return p;
}

Json write_exchange(const GeoProblem& p) {
  Json doc;
  doc["id"] = p.id;
  Json fps = Json::array();
  for (const auto& fp : p.construction.free_points) {
    Json j;
    j["name"] = fp.name;
    j["x"] = fp.x;
    j["y"] = fp.y;
    fps.push_back(std::move(j));
  }
  doc["free_points"] = std::move(fps);
  Json steps = Json::array();
  for (const auto& s : p.construction.steps) {
    Json j;
    j["op"] = op_name(s.op);
    j["args"] = s.args;
    j["out"] = s.out;
    steps.push_back(std::move(j));
  }
  doc["steps"] = std::move(steps);
  Json conj;
  conj["predicate"] = predicate_name(p.conjecture.predicate);
  conj["args"] = p.conjecture.args;
  doc["conjecture"] = std::move(conj);
  return doc;
}

std::string_view dialect_name(Dialect d) {
  switch (d) {
    case Dialect::Gclc: return "gclc";
    case Dialect::Exchange: return "exchange";
    case Dialect::Ggb: return "ggb";
  }
  return "?";
}

std::optional<Dialect> dialect_from_name(std::string_view name) {
  if (name == "gclc") return Dialect::Gclc;
  if (name == "exchange") return Dialect::Exchange;
  if (name == "ggb") return Dialect::Ggb;
  return std::nullopt;
}

std::string_view default_suffix(Dialect d) {
  switch (d) {
    case Dialect::Gclc: return ".gcl";
    case Dialect::Exchange: return ".gf.json";
    case Dialect::Ggb: return ".ggb";
  }
  return "";
}

std::string emit(const GeoProblem& p, Dialect d) {
  switch (d) {
    case Dialect::Gclc: return emit_gclc(p);
    case Dialect::Exchange: return dump_pretty(write_exchange(p));
    case Dialect::Ggb: return emit_ggb_script(p);
  }
  return {};
}

GeoProblem load_problem_file(const std::string& path) {
  std::string text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::SchemaError, "(document)");
    return read_exchange(doc);
  }
  return parse_gclc_subset(text);
}

}  // namespace gasc::geoform
