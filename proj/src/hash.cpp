#include "xlr/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdint>

#include "xlr/error.hpp"

namespace xlr {

namespace {
std::string to_hex(const unsigned char* digest, unsigned int len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kDigits[digest[i] >> 4]);
    out.push_back(kDigits[digest[i] & 0xf]);
  }
  return out;
}
}  // namespace

struct FieldHasher::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

FieldHasher::FieldHasher() : impl_(new Impl) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(impl_->ctx);
    delete impl_;
    throw EnvironmentError("sha256: digest initialisation failed");
  }
}

FieldHasher::~FieldHasher() {
  EVP_MD_CTX_free(impl_->ctx);
  delete impl_;
}

FieldHasher& FieldHasher::add(std::string_view field) {
  std::array<unsigned char, 8> len{};
  std::uint64_t n = field.size();
  for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(n >> (8 * i));
  EVP_DigestUpdate(impl_->ctx, len.data(), len.size());
  EVP_DigestUpdate(impl_->ctx, field.data(), field.size());
  return *this;
}

std::string FieldHasher::hex() {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, digest, &len);
  return to_hex(digest, len);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw EnvironmentError("sha256: digest failed");
  }
  return to_hex(digest, len);
}

}  // namespace xlr
