#pragma once

#include <span>
#include <string_view>

namespace anycap::detail {

struct EmbeddedAsset {
  std::string_view name;
  std::string_view text;
};

/// Generated at build time from core/assets/templates/*.tmpl.
std::span<const EmbeddedAsset> embedded_templates();

}  // namespace anycap::detail
