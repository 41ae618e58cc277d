#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>

#include "anchorfit/errors.hpp"
#include "anchorfit/serialize.hpp"

namespace anchorfit::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

RunManifest make_manifest(std::string command, std::map<std::string, std::string> parameters,
                          const std::vector<std::filesystem::path>& inputs) {
  RunManifest m;
  m.command = std::move(command);
  m.parameters = std::move(parameters);
  for (const auto& p : inputs) m.input_digests[p.string()] = sha256_file(p);
  m.timestamp = iso8601_now();
  return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output) {
  const Json doc = {{"command", manifest.command},
                    {"parameters", manifest.parameters},
                    {"input_digests", manifest.input_digests},
                    {"tool_version", manifest.tool_version},
                    {"timestamp", manifest.timestamp}};
  const std::filesystem::path path = output.string() + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << dump_canonical(doc);
}

}  // namespace anchorfit::cli
