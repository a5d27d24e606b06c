#include "svar/config.hpp"

#include "svar/error.hpp"
#include "svar/format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace svar::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, std::string_view origin) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto eq = view.find('=');
        const auto where = std::string(origin) + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) throw Error(ErrorCode::ConfigError, where + ": expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        if (!valid_key(key)) throw Error(ErrorCode::ConfigError, where + ": invalid key '" + std::string(key) + "'");
        if (kv.entries_.count(key)) throw Error(ErrorCode::ConfigError, where + ": duplicate key '" + std::string(key) + "'");
        kv.entries_.emplace(std::string(key), std::string(value));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    auto kv = parse(in, path.string());
    kv.base_dir_ = path.parent_path();
    return kv;
}

bool KeyValues::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> KeyValues::get(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValues::get_or(std::string_view key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

std::string KeyValues::require(std::string_view key) const {
    auto v = get(key);
    if (!v || v->empty()) throw Error(ErrorCode::ConfigError, "missing required key '" + std::string(key) + "'");
    return *v;
}

std::optional<int> KeyValues::get_int(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    int out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
        throw Error(ErrorCode::ConfigError, "key '" + std::string(key) + "' is not an integer: '" + *v + "'");
    return out;
}

std::optional<double> KeyValues::get_double(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    double out = 0.0;
    if (!parse_double(*v, out))
        throw Error(ErrorCode::ConfigError, "key '" + std::string(key) + "' is not a number: '" + *v + "'");
    return out;
}

std::optional<bool> KeyValues::get_bool(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw Error(ErrorCode::ConfigError, "key '" + std::string(key) + "' is not a boolean: '" + *v + "'");
}

void KeyValues::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

std::filesystem::path KeyValues::resolve(const std::filesystem::path& p) const {
    if (p.is_absolute() || base_dir_.empty()) return p;
    return base_dir_ / p;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        auto item = trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (!item.empty()) out.emplace_back(item);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace svar::config
