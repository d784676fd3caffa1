#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace explorebench {

/// Ordered list of unique snake_case color names used to label doors and
/// balls.
class Palette {
 public:
  /// Throws std::invalid_argument on duplicates or names that are not
  /// lowercase snake_case.
  explicit Palette(std::vector<std::string> names);

  /// The palette compiled in from data/colors.txt.
  static const Palette& builtin();

  /// Reads a colors.txt file: one name per line, no blank lines.
  static Palette load(const std::filesystem::path& path);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

bool is_snake_case(const std::string& name);

}  // namespace explorebench
