#pragma once

// JSON file formats for instances, solutions and private keys.
//
// Instance:  {"format":"mceliece-ising/v1","n","k","t","m","reduction_poly",
//             "g_prime":[k hex rows],"q_prime":hex,"seed"}
// Solution:  {"format":"mceliece-ising-solution/v1","q":hex,"error":hex}
// Key:       {"format":"mceliece-ising-key/v1","m","reduction_poly",
//             "g":[hex coeffs, lowest degree first],"support":[hex],
//             "s":[k hex rows],"perm":[N ints]}

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mcforge/mceliece.hpp"

namespace mcforge {

inline constexpr const char* instance_format = "mceliece-ising/v1";
inline constexpr const char* solution_format = "mceliece-ising-solution/v1";
inline constexpr const char* key_format = "mceliece-ising-key/v1";

nlohmann::json to_json(const McElieceInstance& inst);
McElieceInstance instance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Solution& sol);
Solution solution_from_json(const nlohmann::json& j, std::size_t n, std::size_t k);

nlohmann::json to_json(const PrivateKey& key);
PrivateKey private_key_from_json(const nlohmann::json& j);

std::string read_file(const std::filesystem::path& p);  // IoError on failure
void write_file(const std::filesystem::path& p, const std::string& content);
nlohmann::json read_json(const std::filesystem::path& p); // IoError on parse failure
/// Pretty-printed with a trailing newline so files are byte-stable.
void write_json(const std::filesystem::path& p, const nlohmann::json& j);

McElieceInstance load_instance(const std::filesystem::path& p);

} // namespace mcforge
