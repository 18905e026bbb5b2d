#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/crc.hpp>
#include <json.hpp>

#include "gec/error.hpp"
#include "gec/version.hpp"

namespace gec::io {

/// CRC-64/XZ of the text as 16 hex digits.
inline std::string content_hash(const std::string& text) {
    boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true> crc;
    crc.process_bytes(text.data(), text.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(crc.checksum()));
    return buf;
}

struct StageTiming {
    std::string name;
    double wall_seconds = 0.0;
};

struct RunManifest {
    std::string config_hash;
    std::string version = kVersion;
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::vector<StageTiming> stages;
    std::vector<std::string> outputs;
    std::string status = "ok";
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    [[nodiscard]] nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["config_hash"] = config_hash;
        j["version"] = version;
        j["experiment"] = experiment;
        j["seed"] = seed;
        j["workers"] = workers;
        j["status"] = status;
        auto& st = j["stages"] = nlohmann::ordered_json::array();
        for (const auto& s : stages) st.push_back({{"name", s.name}, {"wall_seconds", s.wall_seconds}});
        j["outputs"] = outputs;
        j["summary"] = summary;
        return j;
    }
};

inline constexpr const char* kManifestName = "manifest.json";

/// Output directory plus the manifest that lists every file written to it.
class RunContext {
public:
    RunContext(std::filesystem::path out, RunManifest manifest) : out_(std::move(out)), manifest_(std::move(manifest)) {
        std::error_code ec;
        std::filesystem::create_directories(out_, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(out_ / name, std::ios::binary);
        if (!f) throw Error("cannot open " + (out_ / name).string() + " for writing");
        f << content;
        if (!f) throw Error("write failed for " + (out_ / name).string());
        manifest_.outputs.push_back(name);
    }

    template <class F>
    auto stage(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto record = [&] {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
            manifest_.stages.push_back({name, el.count()});
        };
        if constexpr (std::is_void_v<decltype(f())>) {
            try {
                f();
            } catch (...) {
                record();
                throw;
            }
            record();
        } else {
            try {
                auto r = f();
                record();
                return r;
            } catch (...) {
                record();
                throw;
            }
        }
    }

    RunManifest& manifest() { return manifest_; }
    [[nodiscard]] const std::filesystem::path& out() const { return out_; }

    void finish(const std::string& status = "ok") {
        manifest_.status = status;
        std::ofstream f(out_ / kManifestName, std::ios::binary);
        f << manifest_.to_json().dump(2) << '\n';
        if (!f) throw Error("cannot write " + (out_ / kManifestName).string());
    }

private:
    std::filesystem::path out_;
    RunManifest manifest_;
};

}  // namespace gec::io
