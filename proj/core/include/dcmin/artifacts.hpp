#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "dcmin/grid_mdp.hpp"
#include "dcmin/q_table.hpp"

namespace dcmin {

/// Free-form key=value pairs carried on the first line of an artifact.
using ArtifactMeta = std::map<std::string, std::string>;

inline constexpr int kArtifactVersion = 1;

/// Compact text identifying every axis of a grid.
std::string grid_signature(const StateGrid& grid);

/// `# dcmin-q-table v1 k=v ...` then
/// `tau,delta_key,soc_idx,peak_idx,action_idx,value,visits`, one row per
/// visited cell in key order. Values round-trip exactly.
void write_q_table(std::ostream& out, const SparseQ& q, const ArtifactMeta& meta);
/// Throws ArtifactMismatch on a wrong magic or version, ParseError on bad rows.
SparseQ read_q_table(std::istream& in, ArtifactMeta* meta = nullptr);

/// `# dcmin-policy v1 k=v ...` then `tau,delta_key,soc_idx,peak_idx,action_idx`.
void write_policy(std::ostream& out, const Policy& policy, const ArtifactMeta& meta);
Policy read_policy(std::istream& in, ArtifactMeta* meta = nullptr);

void save_q_table(const std::filesystem::path& path, const SparseQ& q, const ArtifactMeta& meta);
SparseQ load_q_table(const std::filesystem::path& path, ArtifactMeta* meta = nullptr);
void save_policy(const std::filesystem::path& path, const Policy& policy,
                 const ArtifactMeta& meta);
Policy load_policy(const std::filesystem::path& path, ArtifactMeta* meta = nullptr);

/// Throws ArtifactMismatch unless meta[key] == expected.
void require_meta(const ArtifactMeta& meta, const std::string& key, const std::string& expected);

}  // namespace dcmin
