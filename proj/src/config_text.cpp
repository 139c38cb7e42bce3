#include "bimanual/config_text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bimanual {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

}  // namespace

ConfigText ConfigText::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.string());
}

ConfigText ConfigText::parse_string(const std::string& text, const std::string& origin) {
  ConfigText cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        fail(origin, "malformed section header at line " + std::to_string(line_no));
      current = trim(t.substr(1, t.size() - 2));
      cfg.find_or_create(current);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(origin, "expected key = value at line " + std::to_string(line_no));
    if (current.empty())
      fail(origin, "key outside any section at line " + std::to_string(line_no));
    cfg.add(current, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

const ConfigText::Section* ConfigText::find(const std::string& section) const {
  for (const auto& s : sections_)
    if (s.name == section) return &s;
  return nullptr;
}

ConfigText::Section& ConfigText::find_or_create(const std::string& section) {
  for (auto& s : sections_)
    if (s.name == section) return s;
  sections_.push_back({section, {}});
  return sections_.back();
}

bool ConfigText::has_section(const std::string& section) const { return find(section) != nullptr; }

bool ConfigText::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (!s) return false;
  for (const auto& [k, v] : s->entries)
    if (k == key) return true;
  return false;
}

std::string ConfigText::get(const std::string& section, const std::string& key) const {
  const auto all = get_all(section, key);
  if (all.empty()) fail(origin_, "missing key '" + key + "' in section [" + section + "]");
  if (all.size() > 1)
    fail(origin_, "key '" + key + "' in section [" + section + "] appears more than once");
  return all[0];
}

std::string ConfigText::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ConfigText::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(origin_, "key '" + key + "' in [" + section + "] is not a number: '" + v + "'");
  }
}

double ConfigText::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigText::get_int(const std::string& section, const std::string& key) const {
  const double d = get_double(section, key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    fail(origin_, "key '" + key + "' in [" + section + "] is not an integer");
  return i;
}

int ConfigText::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

unsigned long long ConfigText::get_u64_or(const std::string& section, const std::string& key,
                                          unsigned long long fallback) const {
  if (!has(section, key)) return fallback;
  return std::stoull(get(section, key));
}

Eigen::VectorXd ConfigText::parse_vector(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(std::stod(tok));
  Eigen::VectorXd v(values.size());
  for (size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

Eigen::VectorXd ConfigText::get_vector(const std::string& section, const std::string& key) const {
  try {
    return parse_vector(get(section, key));
  } catch (const std::invalid_argument&) {
    fail(origin_, "key '" + key + "' in [" + section + "] is not a numeric vector");
  }
}

Eigen::VectorXd ConfigText::get_vector_or(const std::string& section, const std::string& key,
                                          const Eigen::VectorXd& fallback) const {
  return has(section, key) ? get_vector(section, key) : fallback;
}

std::vector<std::string> ConfigText::get_all(const std::string& section,
                                             const std::string& key) const {
  std::vector<std::string> out;
  const Section* s = find(section);
  if (!s) return out;
  for (const auto& [k, v] : s->entries)
    if (k == key) out.push_back(v);
  return out;
}

void ConfigText::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  Section& s = find_or_create(section);
  for (auto& [k, v] : s.entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  s.entries.emplace_back(key, value);
}

void ConfigText::add(const std::string& section, const std::string& key,
                     const std::string& value) {
  find_or_create(section).entries.emplace_back(key, value);
}

std::string ConfigText::format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void ConfigText::set_double(const std::string& section, const std::string& key, double value) {
  set(section, key, format_double(value));
}

void ConfigText::set_int(const std::string& section, const std::string& key, long long value) {
  set(section, key, std::to_string(value));
}

namespace {
std::string join_vector(const Eigen::Ref<const Eigen::VectorXd>& value) {
  std::string out;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (i) out += ' ';
    out += ConfigText::format_double(value[i]);
  }
  return out;
}
}  // namespace

void ConfigText::set_vector(const std::string& section, const std::string& key,
                            const Eigen::Ref<const Eigen::VectorXd>& value) {
  set(section, key, join_vector(value));
}

void ConfigText::add_vector(const std::string& section, const std::string& key,
                            const Eigen::Ref<const Eigen::VectorXd>& value) {
  add(section, key, join_vector(value));
}

std::string ConfigText::to_string() const {
  std::string out;
  for (const auto& s : sections_) {
    if (!out.empty()) out += '\n';
    out += '[' + s.name + "]\n";
    for (const auto& [k, v] : s.entries) out += k + " = " + v + '\n';
  }
  return out;
}

void ConfigText::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config file: " + path.string());
  out << to_string();
}

}  // namespace bimanual
