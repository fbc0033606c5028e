#include "trollmap/hashtag.hpp"

#include <cctype>
#include <locale>
#include <optional>

namespace trollmap {

namespace {

// Decodes one UTF-8 sequence at text[pos]; advances pos. nullopt for a
// malformed sequence (pos still advances by one byte).
std::optional<char32_t> decode_utf8(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos++]);
  if (lead < 0x80) return lead;
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    return std::nullopt;
  }
  if (pos + static_cast<std::size_t>(extra) > text.size()) return std::nullopt;
  for (int i = 0; i < extra; ++i) {
    const auto byte = static_cast<unsigned char>(text[pos + static_cast<std::size_t>(i)]);
    if ((byte & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (byte & 0x3F);
  }
  pos += static_cast<std::size_t>(extra);
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// wchar_t is UTF-32 on the platforms we build for; the C.UTF-8 facet gives
// Unicode-aware classification and case mapping. Falls back to ASCII rules
// when the locale is not installed.
const std::ctype<wchar_t>* unicode_ctype() {
  static const std::ctype<wchar_t>* facet = []() -> const std::ctype<wchar_t>* {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        static const std::locale loc(name);
        return &std::use_facet<std::ctype<wchar_t>>(loc);
      } catch (const std::runtime_error&) {
      }
    }
    return nullptr;
  }();
  return facet;
}

}  // namespace

std::string canonicalize_hashtag(std::string_view raw) {
  static_assert(sizeof(wchar_t) == 4, "UTF-32 wchar_t required");
  if (!raw.empty() && raw.front() == '#') raw.remove_prefix(1);
  const auto* ctype = unicode_ctype();

  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const auto cp = decode_utf8(raw, pos);
    if (!cp) continue;
    if (*cp == U'_') {
      out.push_back('_');
      continue;
    }
    if (ctype) {
      const auto wc = static_cast<wchar_t>(*cp);
      if (!ctype->is(std::ctype_base::alnum, wc)) continue;
      encode_utf8(static_cast<char32_t>(ctype->tolower(wc)), out);
    } else if (*cp < 0x80 && std::isalnum(static_cast<int>(*cp))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<int>(*cp))));
    }
  }
  return out;
}

}  // namespace trollmap
