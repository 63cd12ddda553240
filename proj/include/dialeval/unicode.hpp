#pragma once

#include <string>
#include <string_view>

namespace dialeval {

// Canonical composition (NFC). All loaded corpus text goes through this once;
// everything downstream compares code points directly.
std::string nfc_normalize(std::string_view text);

}  // namespace dialeval
