#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace bimanual {

/// Flat key-value configuration with [sections]. Keys may repeat inside a
/// section (list-valued entries keep file order). Lines starting with # or ;
/// are comments.
class ConfigText {
 public:
  static ConfigText parse_file(const std::filesystem::path& path);
  static ConfigText parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Single-valued lookups; throw when missing or repeated.
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  unsigned long long get_u64_or(const std::string& section, const std::string& key,
                                unsigned long long fallback) const;
  Eigen::VectorXd get_vector(const std::string& section, const std::string& key) const;
  Eigen::VectorXd get_vector_or(const std::string& section, const std::string& key,
                                const Eigen::VectorXd& fallback) const;

  /// All values of a repeated key, file order; empty when absent.
  std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void add(const std::string& section, const std::string& key, const std::string& value);
  void set_double(const std::string& section, const std::string& key, double value);
  void set_int(const std::string& section, const std::string& key, long long value);
  void set_vector(const std::string& section, const std::string& key,
                  const Eigen::Ref<const Eigen::VectorXd>& value);
  void add_vector(const std::string& section, const std::string& key,
                  const Eigen::Ref<const Eigen::VectorXd>& value);

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  /// Shortest decimal form that parses back to the same double.
  static std::string format_double(double value);
  static Eigen::VectorXd parse_vector(const std::string& text);

  const std::string& origin() const { return origin_; }

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections_;
  std::string origin_;

  const Section* find(const std::string& section) const;
  Section& find_or_create(const std::string& section);
};

}  // namespace bimanual
