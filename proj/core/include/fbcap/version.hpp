#ifndef FBCAP_VERSION_HPP
#define FBCAP_VERSION_HPP

namespace fbcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fbcap

#endif  // FBCAP_VERSION_HPP
