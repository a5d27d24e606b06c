#pragma once

#include "svar/config.hpp"
#include "svar/ts.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svar::ingest {

enum class Provider { eia, fred, csv };
enum class Frequency { monthly, quarterly };

std::string_view to_string(Provider p);
Provider parse_provider(std::string_view text);

struct SourceSpec {
    Provider provider = Provider::csv;
    std::string series_id;
    std::string api_key_env;      // defaults to EIA_API_KEY / FRED_API_KEY
    double cache_ttl_hours = 24.0;
    std::filesystem::path path;   // csv provider
    std::string url;              // request template; "{api_key}" and "{series_id}" are substituted
    Frequency frequency = Frequency::monthly;

    void validate() const;
    std::string request_url(std::string_view api_key) const;
};

// --- network boundary ---------------------------------------------------------

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Every network request goes through this interface.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

/// HTTPS client backed by cpp-httplib.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(int timeout_seconds = 30) : timeout_seconds_(timeout_seconds) {}
    HttpResponse get(const std::string& url) override;

private:
    int timeout_seconds_;
};

/// Refuses every request; used for --offline runs.
class OfflineTransport : public Transport {
public:
    HttpResponse get(const std::string& url) override;
};

// --- provider payloads ---------------------------------------------------------

/// One provider observation before normalization; `period` is a month or quarter index.
struct RawObservation {
    int period = 0;
    std::optional<double> value;
    std::string meta;
};

/// FRED `series/observations` JSON ("." marks a missing value).
std::vector<RawObservation> parse_fred_json(std::string_view body, Frequency freq = Frequency::monthly);
/// EIA v2 `.../data` JSON: response.data[] with `period` and `value`.
std::vector<RawObservation> parse_eia_json(std::string_view body, Frequency freq = Frequency::monthly);

/// Sorts, drops missing values at the tail, and rejects duplicates, interior missing
/// values (GapError) and skipped periods (GapError naming the first missing period).
std::vector<double> normalize(std::vector<RawObservation> obs, const std::string& id, int& first_period,
                              Frequency freq);

ts::MonthlySeries to_monthly(std::vector<RawObservation> obs, const std::string& id);
ts::QuarterlySeries to_quarterly(std::vector<RawObservation> obs, const std::string& id);

// --- cache -------------------------------------------------------------------------

/// `<root>/<provider>/<series_id>.csv` plus `<series_id>.meta` (JSON: fetched_at,
/// checksum, source_url). Writes are atomic (temp file + rename) under an advisory lock.
class Cache {
public:
    explicit Cache(std::filesystem::path root) : root_(std::move(root)) {}

    struct Entry {
        std::string csv;
        std::int64_t fetched_at = 0;
        std::string source_url;
    };

    std::filesystem::path csv_path(Provider p, std::string_view series_id) const;
    std::filesystem::path meta_path(Provider p, std::string_view series_id) const;

    /// Returns the entry when both files exist and the checksum matches.
    std::optional<Entry> read(Provider p, std::string_view series_id) const;
    void write(Provider p, std::string_view series_id, const std::string& csv, std::int64_t fetched_at,
               const std::string& source_url) const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

std::string sha256_hex(std::string_view data);

/// Cache root from SVAR_CACHE_DIR, else ".svar-cache".
std::filesystem::path default_cache_dir();

struct FetchContext {
    std::filesystem::path cache_dir = default_cache_dir();
    Transport* transport = nullptr;  // required unless offline or csv-only
    bool offline = false;
    std::function<std::int64_t()> now;                                      // unix seconds
    std::function<std::optional<std::string>(const std::string&)> getenv;  // API key lookup
};

ts::MonthlySeries fetch(const SourceSpec& spec, const FetchContext& ctx);
ts::QuarterlySeries fetch_quarterly(const SourceSpec& spec, const FetchContext& ctx);

// --- series construction ---------------------------------------------------------

/// ln(nominal / cpi) over the common months, demeaned over `demean_window`
/// (whole common range when absent).
ts::MonthlySeries build_real_price(const ts::MonthlySeries& nominal, const ts::MonthlySeries& cpi,
                                   const std::optional<ts::MonthRange>& demean_window);

enum class Transform { none, log, log_diff };
Transform parse_transform(std::string_view text);

/// A source plus its post-processing. Steps run in the order seasonal adjustment,
/// quarterly aggregation, transform.
struct SeriesRecipe {
    SourceSpec source;
    Transform transform = Transform::none;
    bool seasonal_adjust = false;
    bool quarterly_average = false;
    std::optional<ts::MonthRange> demean_window;

    Frequency output_frequency() const {
        return quarterly_average || source.frequency == Frequency::quarterly ? Frequency::quarterly
                                                                              : Frequency::monthly;
    }
};

/// Reads `<prefix>.provider`, `.series`, `.path`, `.url`, `.api_key_env`, `.ttl_hours`,
/// `.frequency`, `.transform`, `.seasonal_adjust`, `.aggregate`, `.demean`.
SeriesRecipe recipe_from(const config::KeyValues& kv, const std::string& prefix);

ts::MonthlySeries load_monthly(const SeriesRecipe& recipe, const FetchContext& ctx, const std::string& id);
ts::QuarterlySeries load_quarterly(const SeriesRecipe& recipe, const FetchContext& ctx, const std::string& id);

/// Canonical three-column oil-market panel: production growth, activity, real price.
struct PanelConfig {
    SeriesRecipe production;
    SeriesRecipe activity;
    std::optional<SeriesRecipe> price;          // a ready-made real-price series, or
    std::optional<SourceSpec> price_nominal;    // nominal price deflated by
    std::optional<SourceSpec> price_cpi;        // the consumer price index
    std::optional<ts::MonthRange> demean_window;
    std::optional<ts::MonthRange> sample;
    std::vector<std::string> names = {"production", "activity", "real_price"};
};

PanelConfig panel_config_from(const config::KeyValues& kv);
ts::Panel build_panel(const PanelConfig& cfg, const FetchContext& ctx);

}  // namespace svar::ingest
