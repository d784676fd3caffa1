#include "explorebench/palette.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace explorebench {

namespace detail {
const std::vector<std::string>& builtin_color_names();
}

bool is_snake_case(const std::string& name) {
  if (name.empty() || name.front() == '_' || name.back() == '_') return false;
  char prev = '\0';
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok || (c == '_' && prev == '_')) return false;
    prev = c;
  }
  return true;
}

Palette::Palette(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!is_snake_case(name)) {
      throw std::invalid_argument("palette name is not snake_case: '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate palette name: " + name);
    }
  }
}

const Palette& Palette::builtin() {
  static const Palette palette(detail::builtin_color_names());
  return palette;
}

Palette Palette::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open palette file " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw std::invalid_argument("blank line in palette file " + path.string());
    names.push_back(line);
  }
  return Palette(std::move(names));
}

}  // namespace explorebench
