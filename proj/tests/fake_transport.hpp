// Recording transport serving bundled provider snapshots; never touches the network.
#pragma once

#include "oracles.hpp"

#include "svar/ingest.hpp"

#include <unistd.h>

#include <fstream>
#include <map>
#include <sstream>

namespace fake {

class RecordingTransport : public svar::ingest::Transport {
public:
    /// Requests whose URL contains `needle` are answered with `body`.
    void route(std::string needle, std::string body, int status = 200) {
        routes_.emplace_back(std::move(needle), svar::ingest::HttpResponse{status, std::move(body)});
    }
    void route_file(std::string needle, const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        route(std::move(needle), ss.str());
    }
    svar::ingest::HttpResponse get(const std::string& url) override {
        calls.push_back(url);
        for (const auto& [needle, res] : routes_)
            if (url.find(needle) != std::string::npos) return res;
        return {404, "{\"error\":\"no route for " + url + "\"}"};
    }
    std::vector<std::string> calls;

private:
    std::vector<std::pair<std::string, svar::ingest::HttpResponse>> routes_;
};

/// Routes for every snapshot under data/fixtures/snapshots, keyed as used by data/live.conf.
inline void route_snapshots(RecordingTransport& t) {
    const auto dir = oracle::fixture("snapshots");
    t.route_file("productId", dir / "eia_world_crude_production.json");
    t.route_file("RAIMUUS", dir / "eia_rac_imported.json");
    t.route_file("series_id=CPIAUCSL", dir / "fred_CPIAUCSL.json");
    t.route_file("series_id=IGREA", dir / "fred_IGREA.json");
    t.route_file("series_id=GDPC1", dir / "fred_GDPC1.json");
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("svar-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fake
