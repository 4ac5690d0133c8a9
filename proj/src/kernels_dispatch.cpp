#include <cstdlib>
#include <string>

#include "recnet/errors.hpp"
#include "recnet/kernels.hpp"

namespace recnet::kernels {

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const auto* t = avx2()) out.push_back(t);
  if (const auto* t = neon()) out.push_back(t);
  return out;
}

const KernelTable* find(std::string_view name) {
  for (const auto* t : available())
    if (name == t->name) return t;
  return nullptr;
}

namespace {

const KernelTable& resolve() {
  if (const char* env = std::getenv("RECNET_KERNELS"); env != nullptr && *env != '\0') {
    const auto* t = find(env);
    if (t == nullptr)
      throw ConfigError(std::string("RECNET_KERNELS names an unavailable kernel set: ") + env);
    return *t;
  }
  return *available().back();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace recnet::kernels
