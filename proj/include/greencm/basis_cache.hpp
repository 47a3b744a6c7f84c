#pragma once

#include "greencm/whbasis.hpp"

#include <filesystem>
#include <optional>

namespace greencm {

// directory from set_cache_dir (an empty path clears it), else $GREENCM_CACHE, else ./.greencm-cache
std::filesystem::path cache_dir();
void set_cache_dir(const std::filesystem::path& p);
void set_cache_enabled(bool on);

std::optional<PlusBasis> cache_load(long j, long depth, long order);
void cache_store(const PlusBasis& b);

std::filesystem::path cache_file(long j, long depth, long order);

}  // namespace greencm
