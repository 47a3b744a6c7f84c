#include "greencm/basis_cache.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include <unistd.h>

namespace greencm {

namespace {

constexpr int kCacheVersion = 1;

std::mutex g_mu;
std::optional<std::filesystem::path> g_dir;
std::atomic<bool> g_enabled{true};

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json payload(const PlusBasis& b) {
    nlohmann::json forms = nlohmann::json::array();
    for (auto& f : b.forms) {
        nlohmann::json cs = nlohmann::json::array();
        for (auto& [e, c] : f.scalar.terms())
            cs.push_back({{to_ll(numer(e)), to_ll(denom(e))}, to_string(c)});
        forms.push_back({{"pivot", f.pivot}, {"coefficients", cs}});
    }
    return {{"j", b.j}, {"depth", b.depth}, {"order", b.order}, {"A", b.A}, {"forms", forms}};
}

}  // namespace

std::filesystem::path cache_dir() {
    std::lock_guard lk(g_mu);
    if (g_dir) return *g_dir;
    if (const char* env = std::getenv("GREENCM_CACHE"); env && *env) return env;
    return ".greencm-cache";
}

void set_cache_dir(const std::filesystem::path& p) {
    std::lock_guard lk(g_mu);
    if (p.empty()) g_dir.reset();  // back to the default lookup
    else g_dir = p;
}

void set_cache_enabled(bool on) { g_enabled = on; }

std::filesystem::path cache_file(long j, long depth, long order) {
    std::ostringstream name;
    name << "plus-j" << j << "-d" << depth << "-o" << order << ".json";
    return cache_dir() / name.str();
}

std::optional<PlusBasis> cache_load(long j, long depth, long order) {
    if (!g_enabled) return std::nullopt;
    auto path = cache_file(j, depth, order);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        nlohmann::json doc = nlohmann::json::parse(in);
        if (doc.at("format") != "greencm-plus-basis" || doc.at("version") != kCacheVersion) return std::nullopt;
        const nlohmann::json& p = doc.at("payload");
        if (fnv1a(p.dump()) != doc.at("checksum").get<std::string>()) return std::nullopt;
        PlusBasis b;
        b.j = p.at("j");
        b.depth = p.at("depth");
        b.order = p.at("order");
        b.A = p.at("A");
        if (b.j != j || b.depth != depth || b.order != order) return std::nullopt;
        for (auto& f : p.at("forms")) {
            PlusForm pf;
            pf.j = j;
            pf.pivot = f.at("pivot");
            pf.scalar = RSeries(1, pf.pivot, order);
            for (auto& c : f.at("coefficients")) {
                long long num = c.at(0).at(0), den = c.at(0).at(1);
                if (den != 1) return std::nullopt;
                pf.scalar.at(static_cast<long>(num)) = parse_rational(c.at(1).get<std::string>());
            }
            b.forms.push_back(std::move(pf));
        }
        return b;
    } catch (const std::exception&) {
        // unreadable or corrupt: recompute
        return std::nullopt;
    }
}

void cache_store(const PlusBasis& b) {
    if (!g_enabled) return;
    auto path = cache_file(b.j, b.depth, b.order);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) return;
    nlohmann::json p = payload(b);
    nlohmann::json doc = {{"format", "greencm-plus-basis"},
                          {"version", kCacheVersion},
                          {"payload", p},
                          {"checksum", fnv1a(p.dump())}};
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp);
        if (!out) return;
        out << doc.dump() << '\n';
        if (!out) return;
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace greencm
