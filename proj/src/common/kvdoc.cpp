#include "codesign/common/kvdoc.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "codesign/common/errors.hpp"

namespace codesign {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

const KvEntry* KvEntry::find(const std::string& k) const {
  for (const auto& c : children)
    if (c.key == k) return &c;
  return nullptr;
}

std::vector<const KvEntry*> KvEntry::find_all(const std::string& k) const {
  std::vector<const KvEntry*> out;
  for (const auto& c : children)
    if (c.key == k) out.push_back(&c);
  return out;
}

const KvEntry& KvEntry::require(const std::string& k) const {
  const KvEntry* e = find(k);
  if (!e) throw ParseError("missing required key '" + k + "'", line, k);
  return *e;
}

std::string KvEntry::get_string(const std::string& k) const { return require(k).value; }

std::string KvEntry::get_string(const std::string& k, const std::string& fallback) const {
  const KvEntry* e = find(k);
  return e ? e->value : fallback;
}

double KvEntry::get_number(const std::string& k) const {
  const KvEntry& e = require(k);
  return parse_number_token(e.value, e.line);
}

double KvEntry::get_number(const std::string& k, double fallback) const {
  const KvEntry* e = find(k);
  return e ? parse_number_token(e->value, e->line) : fallback;
}

double KvEntry::get_angle(const std::string& k) const {
  const KvEntry& e = require(k);
  return parse_angle_token(e.value, e.line);
}

double KvEntry::get_angle(const std::string& k, double fallback) const {
  const KvEntry* e = find(k);
  return e ? parse_angle_token(e->value, e->line) : fallback;
}

bool KvEntry::get_bool(const std::string& k, bool fallback) const {
  const KvEntry* e = find(k);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ParseError("expected boolean, got '" + e->value + "'", e->line, k);
}

std::vector<double> KvEntry::numbers() const {
  std::vector<double> out;
  for (const auto& tok : split_ws(value)) out.push_back(parse_number_token(tok, line));
  return out;
}

std::vector<double> KvEntry::angles() const {
  std::vector<double> out;
  for (const auto& tok : split_ws(value)) out.push_back(parse_angle_token(tok, line));
  return out;
}

std::vector<std::string> KvEntry::tokens() const { return split_ws(value); }

double parse_number_token(const std::string& token, int line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ParseError("expected a number, got '" + token + "'", line);
  return v;
}

double parse_angle_token(const std::string& token, int line) {
  std::string t = token;
  double scale = 1.0;
  auto ends_with = [&](const char* suffix) {
    std::size_t n = std::string(suffix).size();
    return t.size() > n && t.compare(t.size() - n, n, suffix) == 0;
  };
  if (ends_with("deg")) {
    scale = M_PI / 180.0;
    t = t.substr(0, t.size() - 3);
  } else if (ends_with("rad")) {
    t = t.substr(0, t.size() - 3);
  }
  return parse_number_token(t, line) * scale;
}

KvEntry parse_kvdoc(const std::string& text) {
  KvEntry root;
  root.is_block = true;
  std::vector<KvEntry*> stack{&root};
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line == "}") {
      if (stack.size() == 1) throw ParseError("unmatched '}'", line_no);
      stack.pop_back();
      continue;
    }
    if (line.back() == '{') {
      std::string head = trim(line.substr(0, line.size() - 1));
      KvEntry entry;
      entry.is_block = true;
      entry.line = line_no;
      std::size_t quote = head.find('"');
      if (quote != std::string::npos) {
        std::size_t close = head.find('"', quote + 1);
        if (close == std::string::npos) throw ParseError("unterminated label quote", line_no);
        entry.key = trim(head.substr(0, quote));
        entry.label = head.substr(quote + 1, close - quote - 1);
      } else {
        entry.key = head;
      }
      if (entry.key.empty()) throw ParseError("block without a key", line_no);
      stack.back()->children.push_back(std::move(entry));
      stack.push_back(&stack.back()->children.back());
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected 'key: value', block or '}', got '" + line + "'", line_no);
    KvEntry entry;
    entry.key = trim(line.substr(0, colon));
    entry.value = trim(line.substr(colon + 1));
    entry.line = line_no;
    if (entry.key.empty()) throw ParseError("empty key", line_no);
    stack.back()->children.push_back(std::move(entry));
  }
  if (stack.size() != 1) throw ParseError("unterminated block", line_no);
  return root;
}

KvEntry load_kvdoc(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_kvdoc(buf.str());
}

}  // namespace codesign
