#pragma once

#include <string>
#include <vector>

namespace codesign {

/// Line-oriented structured text used by robot descriptions, experiment
/// configs and design files. Grammar per line:
///
///   key: value tokens          scalar entry
///   key {                      block entry
///   key "label" {              labeled block entry
///   }                          block end
///   # comment / blank          ignored
///
/// Blocks nest. Repeated keys are allowed (e.g. several `link` blocks).
struct KvEntry {
  std::string key;
  std::string label;   // only for labeled blocks
  std::string value;   // raw scalar text, trimmed
  int line = 0;
  bool is_block = false;
  std::vector<KvEntry> children;

  /// First child entry with the given key, or nullptr.
  const KvEntry* find(const std::string& k) const;
  /// All child entries with the given key, in file order.
  std::vector<const KvEntry*> find_all(const std::string& k) const;
  /// Scalar child value accessors. Throw ParseError when missing/malformed.
  const KvEntry& require(const std::string& k) const;
  std::string get_string(const std::string& k) const;
  std::string get_string(const std::string& k, const std::string& fallback) const;
  double get_number(const std::string& k) const;
  double get_number(const std::string& k, double fallback) const;
  /// Angle value: plain number means radians; `deg`/`rad` suffixes accepted.
  double get_angle(const std::string& k) const;
  double get_angle(const std::string& k, double fallback) const;
  bool get_bool(const std::string& k, bool fallback) const;
  /// Whitespace-separated numeric tokens of this entry's own value.
  std::vector<double> numbers() const;
  /// Whitespace-separated numeric tokens, each allowing deg/rad suffix.
  std::vector<double> angles() const;
  std::vector<std::string> tokens() const;
};

/// Parses a document; the returned entry is an unnamed root block.
KvEntry parse_kvdoc(const std::string& text);
KvEntry load_kvdoc(const std::string& path);

/// Parses one numeric token with optional deg/rad suffix into radians
/// (plain numbers pass through). Throws ParseError on malformed input.
double parse_angle_token(const std::string& token, int line);
double parse_number_token(const std::string& token, int line);

}  // namespace codesign
