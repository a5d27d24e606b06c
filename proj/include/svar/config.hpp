#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svar::config {

/**
 * Flat key-value document.
 *
 *   # comment
 *   key = value
 *   section.key = value with spaces
 *
 * One assignment per line; keys are [A-Za-z0-9_.-]+; surrounding whitespace is trimmed;
 * a duplicate key is an error. Values are untyped text, converted on access.
 */
class KeyValues {
public:
    KeyValues() = default;

    static KeyValues parse(std::istream& in, std::string_view origin = "<input>");
    static KeyValues load(const std::filesystem::path& path);

    /// Directory of the file this was loaded from; relative paths resolve against it.
    const std::filesystem::path& base_dir() const { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string fallback) const;
    std::string require(std::string_view key) const;
    std::optional<int> get_int(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<bool> get_bool(std::string_view key) const;

    /// Later assignments win (used for flag overrides).
    void set(std::string key, std::string value);

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
    std::filesystem::path base_dir_;
};

/// Comma-separated list with whitespace trimmed and empty items dropped.
std::vector<std::string> split_list(std::string_view text);

}  // namespace svar::config
