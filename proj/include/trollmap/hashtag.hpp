#pragma once

#include <string>
#include <string_view>

namespace trollmap {

// Canonical form of a raw hashtag: a leading '#' is stripped, text is
// Unicode-lowercased and every code point that is not a letter, digit or '_'
// is dropped. Returns the empty string (the "nothing left" marker) when no
// character survives. Invalid UTF-8 bytes are dropped.
std::string canonicalize_hashtag(std::string_view raw);

}  // namespace trollmap
