// manifest.hpp: run manifests: resolved parameters, version, timestamp and
// output hashes.

#pragma once

#include <ctime>
#include <cstdlib>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "json.hpp"

namespace massent::cli {

using Json = nlohmann::ordered_json;

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

// SOURCE_DATE_EPOCH pins the timestamp for reproducible manifests.
inline std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    Json params = Json::object();
    std::string version;
    std::string timestamp;
    Json outputs = Json::array();

    void add_output(const std::string& path, std::string_view bytes, std::string_view schema) {
        outputs.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}, {"schema", schema}});
    }

    std::string dump() const {
        const Json j{{"command", command},
                     {"params", params},
                     {"version", version},
                     {"timestamp", timestamp},
                     {"outputs", outputs}};
        return j.dump(2) + "\n";
    }
};

}  // namespace massent::cli
