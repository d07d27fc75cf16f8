// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/hash.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "stylepipe/error.hpp"

namespace stylepipe {
namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

MdCtx new_sha256_ctx() {
  MdCtx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("crypto", "failed to initialise SHA-256");
  }
  return ctx;
}

Sha256Digest finish(EVP_MD_CTX* ctx) {
  Sha256Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  return out;
}

}  // namespace

Sha256Digest sha256(std::string_view data) {
  auto ctx = new_sha256_ctx();
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  return finish(ctx.get());
}

std::string to_hex(const std::uint8_t* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0xF];
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  auto d = sha256(data);
  return to_hex(d.data(), d.size());
}

namespace {

void update_from_file(EVP_MD_CTX* ctx, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  auto ctx = new_sha256_ctx();
  update_from_file(ctx.get(), path);
  auto d = finish(ctx.get());
  return to_hex(d.data(), d.size());
}

std::string sha256_files(std::span<const std::filesystem::path> paths) {
  auto ctx = new_sha256_ctx();
  for (const auto& p : paths) update_from_file(ctx.get(), p);
  auto d = finish(ctx.get());
  return to_hex(d.data(), d.size());
}

std::uint64_t hash64(std::string_view data) {
  auto d = sha256(data);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}

double unit_hash(std::string_view data) {
  // 53 high bits give an exactly representable value in [0, 1).
  return static_cast<double>(hash64(data) >> 11) * 0x1.0p-53;
}

std::string key_of(std::initializer_list<std::string_view> fields) {
  std::string key;
  for (auto f : fields) {
    key += std::to_string(f.size());
    key.push_back(':');
    key.append(f);
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace stylepipe
