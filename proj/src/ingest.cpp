#include "svar/ingest.hpp"

#include "svar/error.hpp"
#include "svar/format.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svar::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Provider p) {
    switch (p) {
        case Provider::eia: return "eia";
        case Provider::fred: return "fred";
        case Provider::csv: return "csv";
    }
    return "unknown";
}

Provider parse_provider(std::string_view text) {
    if (text == "eia") return Provider::eia;
    if (text == "fred") return Provider::fred;
    if (text == "csv") return Provider::csv;
    throw Error(ErrorCode::ConfigError, "unknown provider '" + std::string(text) + "'");
}

void SourceSpec::validate() const {
    if (series_id.empty()) throw Error(ErrorCode::ConfigError, "source has an empty series_id");
    if (provider == Provider::csv && path.empty())
        throw Error(ErrorCode::ConfigError, "csv source '" + series_id + "' needs a path");
    if (provider == Provider::eia && url.empty())
        throw Error(ErrorCode::ConfigError, "eia source '" + series_id + "' needs a url");
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

std::string default_key_env(Provider p) {
    return p == Provider::eia ? "EIA_API_KEY" : p == Provider::fred ? "FRED_API_KEY" : "";
}

std::string redact(std::string url, std::string_view key) {
    if (!key.empty()) replace_all(url, key, "REDACTED");
    return url;
}

}  // namespace

std::string SourceSpec::request_url(std::string_view api_key) const {
    std::string out = url;
    if (out.empty() && provider == Provider::fred)
        out = "https://api.stlouisfed.org/fred/series/observations?series_id={series_id}&api_key={api_key}&file_type=json";
    replace_all(out, "{series_id}", series_id);
    replace_all(out, "{api_key}", api_key);
    return out;
}

// --- transport -----------------------------------------------------------------

HttpResponse OfflineTransport::get(const std::string& url) {
    throw Error(ErrorCode::CacheMiss, "offline mode: refusing request to " + url.substr(0, url.find('?')));
}

}  // namespace svar::ingest

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace svar::ingest {

HttpResponse HttpTransport::get(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "malformed url");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Get(path);
    if (!res) throw Error(ErrorCode::HttpError, "request to " + origin + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

// --- payload parsing ------------------------------------------------------------

namespace {

int period_index(std::string_view text, Frequency freq) {
    if (freq == Frequency::monthly) return ts::YearMonth::parse(text).index();
    if (text.size() == 7 && (text[5] == 'Q' || text[5] == 'q')) return ts::YearQuarter::parse(text).index();
    // Dated observations ("YYYY-MM-DD" or "YYYY-MM") stamp a quarter by its first month.
    const auto m = ts::YearMonth::parse(text);
    if ((m.month - 1) % 3 != 0)
        throw Error(ErrorCode::ParseError, "quarterly date " + std::string(text) + " does not open a quarter");
    return ts::YearQuarter{m.year, m.quarter()}.index();
}

std::string period_label(int index, Frequency freq) {
    return freq == Frequency::monthly ? ts::YearMonth::from_index(index).str() : ts::YearQuarter::from_index(index).str();
}

std::optional<double> json_value(const json& v, const std::string& where) {
    if (v.is_null()) return std::nullopt;
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.empty() || s == "." || s == "NA" || s == "--") return std::nullopt;
        double out = 0.0;
        if (!parse_double(s, out)) throw Error(ErrorCode::ParseError, where + ": bad value '" + s + "'");
        return out;
    }
    throw Error(ErrorCode::ParseError, where + ": unexpected value type");
}

json parse_body(std::string_view body, std::string_view provider) {
    try {
        return json::parse(body.begin(), body.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string(provider) + " response is not JSON: " + e.what());
    }
}

}  // namespace

std::vector<RawObservation> parse_fred_json(std::string_view body, Frequency freq) {
    const auto doc = parse_body(body, "FRED");
    if (!doc.is_object() || !doc.contains("observations") || !doc["observations"].is_array())
        throw Error(ErrorCode::ParseError, "FRED response lacks an 'observations' array");
    std::vector<RawObservation> out;
    for (const auto& o : doc["observations"]) {
        if (!o.contains("date") || !o.contains("value")) throw Error(ErrorCode::ParseError, "FRED observation lacks date/value");
        const auto date = o["date"].get<std::string>();
        out.push_back({period_index(date, freq), json_value(o["value"], "FRED " + date), "fred"});
    }
    return out;
}

std::vector<RawObservation> parse_eia_json(std::string_view body, Frequency freq) {
    const auto doc = parse_body(body, "EIA");
    if (!doc.is_object() || !doc.contains("response") || !doc["response"].contains("data") ||
        !doc["response"]["data"].is_array())
        throw Error(ErrorCode::ParseError, "EIA response lacks response.data");
    std::vector<RawObservation> out;
    for (const auto& o : doc["response"]["data"]) {
        if (!o.contains("period") || !o.contains("value")) throw Error(ErrorCode::ParseError, "EIA row lacks period/value");
        const auto period = o["period"].get<std::string>();
        std::string meta = "eia";
        if (o.contains("units") && o["units"].is_string()) meta += ";units=" + o["units"].get<std::string>();
        out.push_back({period_index(period, freq), json_value(o["value"], "EIA " + period), std::move(meta)});
    }
    return out;
}

std::vector<double> normalize(std::vector<RawObservation> obs, const std::string& id, int& first_period,
                              Frequency freq) {
    std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.period < b.period; });
    for (std::size_t i = 1; i < obs.size(); ++i)
        if (obs[i].period == obs[i - 1].period)
            throw Error(ErrorCode::ParseError, "'" + id + "' has duplicate period " + period_label(obs[i].period, freq));
    while (!obs.empty() && !obs.back().value) obs.pop_back();
    if (obs.empty()) throw Error(ErrorCode::ParseError, "'" + id + "' has no observations");
    std::vector<double> values;
    values.reserve(obs.size());
    first_period = obs.front().period;
    int expected = first_period;
    for (const auto& o : obs) {
        if (o.period != expected)
            throw Error(ErrorCode::GapError, "'" + id + "' is missing " + period_label(expected, freq));
        if (!o.value) throw Error(ErrorCode::GapError, "'" + id + "' has no value for " + period_label(o.period, freq));
        values.push_back(*o.value);
        ++expected;
    }
    return values;
}

ts::MonthlySeries to_monthly(std::vector<RawObservation> obs, const std::string& id) {
    int first = 0;
    auto values = normalize(std::move(obs), id, first, Frequency::monthly);
    return {id, ts::YearMonth::from_index(first), std::move(values)};
}

ts::QuarterlySeries to_quarterly(std::vector<RawObservation> obs, const std::string& id) {
    int first = 0;
    auto values = normalize(std::move(obs), id, first, Frequency::quarterly);
    return {id, ts::YearQuarter::from_index(first), std::move(values)};
}

// --- cache ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

fs::path default_cache_dir() {
    if (const char* dir = std::getenv("SVAR_CACHE_DIR"); dir && *dir) return dir;
    return ".svar-cache";
}

namespace {

std::optional<std::string> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void atomic_write(const fs::path& target, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const auto tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot replace " + target.string());
    }
}

class FileLock {
public:
    explicit FileLock(const fs::path& p) : fd_(::open(p.c_str(), O_RDWR | O_CREAT, 0644)) {
        if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open lock " + p.string());
        ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_;
};

}  // namespace

fs::path Cache::csv_path(Provider p, std::string_view series_id) const {
    return root_ / std::string(to_string(p)) / (std::string(series_id) + ".csv");
}

fs::path Cache::meta_path(Provider p, std::string_view series_id) const {
    return root_ / std::string(to_string(p)) / (std::string(series_id) + ".meta");
}

std::optional<Cache::Entry> Cache::read(Provider p, std::string_view series_id) const {
    auto csv = slurp(csv_path(p, series_id));
    auto meta_text = slurp(meta_path(p, series_id));
    if (!csv || !meta_text) return std::nullopt;
    json meta;
    try {
        meta = json::parse(*meta_text);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
    if (!meta.is_object() || !meta.contains("checksum") || !meta["checksum"].is_string()) return std::nullopt;
    if (meta["checksum"].get<std::string>() != "sha256:" + sha256_hex(*csv)) return std::nullopt;
    Entry e;
    e.csv = std::move(*csv);
    e.fetched_at = meta.value("fetched_at", std::int64_t{0});
    e.source_url = meta.value("source_url", std::string{});
    return e;
}

void Cache::write(Provider p, std::string_view series_id, const std::string& csv, std::int64_t fetched_at,
                  const std::string& source_url) const {
    const auto dir = root_ / std::string(to_string(p));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create cache directory " + dir.string());
    FileLock lock(dir / (std::string(series_id) + ".lock"));
    nlohmann::ordered_json meta;
    meta["provider"] = to_string(p);
    meta["series_id"] = series_id;
    meta["fetched_at"] = fetched_at;
    meta["checksum"] = "sha256:" + sha256_hex(csv);
    meta["source_url"] = source_url;
    // The csv is replaced first: a crash in between leaves a checksum mismatch, i.e. a miss.
    atomic_write(csv_path(p, series_id), csv);
    atomic_write(meta_path(p, series_id), meta.dump(2) + "\n");
}

// --- fetch ---------------------------------------------------------------------------

namespace {

std::int64_t now_seconds(const FetchContext& ctx) {
    if (ctx.now) return ctx.now();
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::optional<std::string> lookup_env(const FetchContext& ctx, const std::string& name) {
    if (ctx.getenv) return ctx.getenv(name);
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
}

// Returns the cache-format CSV text for a remote series, from cache or network.
std::string fetch_remote_csv(const SourceSpec& spec, const FetchContext& ctx) {
    const Cache cache(ctx.cache_dir);
    const auto entry = cache.read(spec.provider, spec.series_id);
    if (entry) {
        const double age_hours = static_cast<double>(now_seconds(ctx) - entry->fetched_at) / 3600.0;
        if (ctx.offline || age_hours < spec.cache_ttl_hours) return entry->csv;
    }
    if (ctx.offline)
        throw Error(ErrorCode::CacheMiss, "offline and no valid cache for " + std::string(to_string(spec.provider)) +
                                              "/" + spec.series_id + " under " + ctx.cache_dir.string());

    const auto env = spec.api_key_env.empty() ? default_key_env(spec.provider) : spec.api_key_env;
    const auto key = lookup_env(ctx, env);
    if (!key) throw Error(ErrorCode::MissingApiKey, "set " + env + " to fetch " + spec.series_id);
    if (!ctx.transport) throw Error(ErrorCode::InvalidArgument, "no transport configured");

    const auto url = spec.request_url(*key);
    const auto res = ctx.transport->get(url);
    if (res.status != 200) {
        auto excerpt = res.body.substr(0, 200);
        std::replace(excerpt.begin(), excerpt.end(), '\n', ' ');
        throw Error(ErrorCode::HttpError, "HTTP " + std::to_string(res.status) + " for " + spec.series_id + ": " +
                                              redact(excerpt, *key));
    }
    auto obs = spec.provider == Provider::eia ? parse_eia_json(res.body, spec.frequency)
                                              : parse_fred_json(res.body, spec.frequency);
    std::ostringstream csv;
    if (spec.frequency == Frequency::monthly) {
        ts::write_monthly_csv(csv, to_monthly(std::move(obs), spec.series_id));
    } else {
        ts::write_quarterly_csv(csv, to_quarterly(std::move(obs), spec.series_id));
    }
    cache.write(spec.provider, spec.series_id, csv.str(), now_seconds(ctx), redact(url, *key));
    return csv.str();
}

}  // namespace

ts::MonthlySeries fetch(const SourceSpec& spec, const FetchContext& ctx) {
    spec.validate();
    if (spec.frequency != Frequency::monthly)
        throw Error(ErrorCode::ConfigError, "'" + spec.series_id + "' is not a monthly source");
    if (spec.provider == Provider::csv) return ts::load_monthly_csv(spec.path, spec.series_id);
    std::istringstream in(fetch_remote_csv(spec, ctx));
    return ts::read_monthly_csv(in, spec.series_id);
}

ts::QuarterlySeries fetch_quarterly(const SourceSpec& spec, const FetchContext& ctx) {
    spec.validate();
    if (spec.frequency != Frequency::quarterly)
        throw Error(ErrorCode::ConfigError, "'" + spec.series_id + "' is not a quarterly source");
    if (spec.provider == Provider::csv) return ts::load_quarterly_csv(spec.path, spec.series_id);
    std::istringstream in(fetch_remote_csv(spec, ctx));
    return ts::read_quarterly_csv(in, spec.series_id);
}

// --- construction --------------------------------------------------------------------

ts::MonthlySeries build_real_price(const ts::MonthlySeries& nominal, const ts::MonthlySeries& cpi,
                                   const std::optional<ts::MonthRange>& demean_window) {
    const auto panel = ts::align({nominal, cpi});
    const auto& n = panel.column(0);
    const auto& c = panel.column(1);
    std::vector<double> out(n.size());
    for (std::size_t t = 0; t < n.size(); ++t) {
        if (!(n[t] > 0.0) || !(c[t] > 0.0))
            throw Error(ErrorCode::NonPositiveValue,
                        "non-positive price or CPI at " + (panel.start() + static_cast<int>(t)).str());
        out[t] = std::log(n[t] / c[t]);
    }
    return ts::demean(ts::MonthlySeries("real_price", panel.start(), std::move(out)), demean_window);
}

Transform parse_transform(std::string_view text) {
    if (text == "none") return Transform::none;
    if (text == "log") return Transform::log;
    if (text == "log_diff") return Transform::log_diff;
    throw Error(ErrorCode::ConfigError, "unknown transform '" + std::string(text) + "'");
}

namespace {

SourceSpec source_from(const config::KeyValues& kv, const std::string& prefix) {
    SourceSpec s;
    s.provider = parse_provider(kv.require(prefix + ".provider"));
    s.series_id = kv.get_or(prefix + ".series", "");
    if (auto p = kv.get(prefix + ".path")) {
        s.path = kv.resolve(*p);
        if (s.series_id.empty()) s.series_id = s.path.stem().string();
    }
    s.url = kv.get_or(prefix + ".url", "");
    s.api_key_env = kv.get_or(prefix + ".api_key_env", default_key_env(s.provider));
    if (auto ttl = kv.get_double(prefix + ".ttl_hours")) s.cache_ttl_hours = *ttl;
    const auto freq = kv.get_or(prefix + ".frequency", "monthly");
    if (freq == "monthly") {
        s.frequency = Frequency::monthly;
    } else if (freq == "quarterly") {
        s.frequency = Frequency::quarterly;
    } else {
        throw Error(ErrorCode::ConfigError, prefix + ".frequency must be monthly or quarterly");
    }
    s.validate();
    return s;
}

}  // namespace

SeriesRecipe recipe_from(const config::KeyValues& kv, const std::string& prefix) {
    SeriesRecipe r;
    r.source = source_from(kv, prefix);
    r.transform = parse_transform(kv.get_or(prefix + ".transform", "none"));
    r.seasonal_adjust = kv.get_bool(prefix + ".seasonal_adjust").value_or(false);
    const auto agg = kv.get_or(prefix + ".aggregate", "none");
    if (agg == "quarterly_average") {
        r.quarterly_average = true;
    } else if (agg != "none") {
        throw Error(ErrorCode::ConfigError, prefix + ".aggregate must be none or quarterly_average");
    }
    if (auto d = kv.get(prefix + ".demean")) r.demean_window = ts::MonthRange::parse(*d);
    if (r.seasonal_adjust && r.source.frequency != Frequency::monthly)
        throw Error(ErrorCode::ConfigError, prefix + ": seasonal adjustment needs a monthly source");
    if (r.quarterly_average && r.source.frequency != Frequency::monthly)
        throw Error(ErrorCode::ConfigError, prefix + ": quarterly aggregation needs a monthly source");
    return r;
}

ts::MonthlySeries load_monthly(const SeriesRecipe& recipe, const FetchContext& ctx, const std::string& id) {
    if (recipe.output_frequency() != Frequency::monthly)
        throw Error(ErrorCode::ConfigError, "'" + id + "' is not monthly after processing");
    auto s = fetch(recipe.source, ctx);
    if (recipe.seasonal_adjust) s = ts::seasonal_adjust(s);
    switch (recipe.transform) {
        case Transform::none: break;
        case Transform::log: s = ts::log(s); break;
        case Transform::log_diff: s = ts::log_diff(s); break;
    }
    if (recipe.demean_window) s = ts::demean(s, recipe.demean_window);
    return s.with_id(id);
}

ts::QuarterlySeries load_quarterly(const SeriesRecipe& recipe, const FetchContext& ctx, const std::string& id) {
    if (recipe.output_frequency() != Frequency::quarterly)
        throw Error(ErrorCode::ConfigError, "'" + id + "' is not quarterly after processing");
    ts::QuarterlySeries q;
    if (recipe.source.frequency == Frequency::quarterly) {
        q = fetch_quarterly(recipe.source, ctx);
    } else {
        auto m = fetch(recipe.source, ctx);
        if (recipe.seasonal_adjust) m = ts::seasonal_adjust(m);
        q = ts::quarterly_average(m);
    }
    switch (recipe.transform) {
        case Transform::none: break;
        case Transform::log: {
            std::vector<double> v(q.values().begin(), q.values().end());
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!(v[i] > 0.0)) throw Error(ErrorCode::NonPositiveValue, "'" + id + "' has non-positive values");
                v[i] = std::log(v[i]);
            }
            q = ts::QuarterlySeries(q.id(), q.start(), std::move(v));
            break;
        }
        case Transform::log_diff: q = ts::log_diff(q); break;
    }
    return ts::QuarterlySeries(id, q.start(), std::vector<double>(q.values().begin(), q.values().end()));
}

PanelConfig panel_config_from(const config::KeyValues& kv) {
    PanelConfig cfg;
    cfg.production = recipe_from(kv, "production");
    cfg.activity = recipe_from(kv, "activity");
    if (kv.has("price.nominal.provider")) {
        cfg.price_nominal = source_from(kv, "price.nominal");
        cfg.price_cpi = source_from(kv, "price.cpi");
        if (auto d = kv.get("price.demean")) cfg.demean_window = ts::MonthRange::parse(*d);
    } else {
        cfg.price = recipe_from(kv, "price");
    }
    if (auto s = kv.get("sample")) cfg.sample = ts::MonthRange::parse(*s);
    if (auto n = kv.get("names")) {
        cfg.names = config::split_list(*n);
        if (cfg.names.size() != 3) throw Error(ErrorCode::ConfigError, "names must list exactly 3 columns");
    }
    return cfg;
}

ts::Panel build_panel(const PanelConfig& cfg, const FetchContext& ctx) {
    auto production = load_monthly(cfg.production, ctx, cfg.names[0]);
    auto activity = load_monthly(cfg.activity, ctx, cfg.names[1]);
    ts::MonthlySeries price;
    if (cfg.price) {
        price = load_monthly(*cfg.price, ctx, cfg.names[2]);
    } else {
        if (!cfg.price_nominal || !cfg.price_cpi)
            throw Error(ErrorCode::ConfigError, "price needs either a series or nominal and cpi sources");
        price = build_real_price(fetch(*cfg.price_nominal, ctx), fetch(*cfg.price_cpi, ctx), cfg.demean_window)
                    .with_id(cfg.names[2]);
    }
    auto panel = ts::align({production, activity, price});
    if (cfg.sample) {
        if (!panel.range().contains(*cfg.sample))
            throw Error(ErrorCode::InvalidArgument,
                        "sample " + cfg.sample->str() + " not inside available data " + panel.range().str());
        panel = panel.slice(*cfg.sample);
    }
    return panel;
}

}  // namespace svar::ingest
